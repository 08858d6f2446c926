"""Shared fixtures.

The expensive Monte Carlo campaigns are session-scoped and reused by every
test that needs them.  ``UAVHETNET_TEST_TRIALS`` scales the campaign sizes
down for quick development runs; the default (100000) is what the
acceptance tolerances are calibrated for.
"""

import os

import numpy as np
import pytest

from uavhetnet.coverage import NomaThresholds
from uavhetnet.params import NetworkParams
from uavhetnet.simulator import simulate_records

N_TRIALS = int(os.environ.get("UAVHETNET_TEST_TRIALS", "100000"))
WORKERS = min(2, os.cpu_count() or 1)

ALTITUDES = (50.0, 100.0, 200.0, 300.0, 400.0, 500.0)
FADING_ALTITUDES = (100.0, 200.0, 300.0)


def params_at_h(h: float) -> NetworkParams:
    """Reference scenario with the paired-UE distance scaled to 1.1 h."""
    return NetworkParams().replace(h=float(h), R_f=1.1 * float(h))


@pytest.fixture(scope="session")
def table_params() -> NetworkParams:
    return NetworkParams()


@pytest.fixture(scope="session")
def thresholds_0db() -> NomaThresholds:
    return NomaThresholds.from_db(0.0)


@pytest.fixture(scope="session")
def fading_records():
    """Full campaigns (with fading) at the three coverage altitudes."""
    return {h: simulate_records(params_at_h(h), N_TRIALS, seed=2000 + int(h),
                                workers=WORKERS, fading=True)
            for h in FADING_ALTITUDES}


@pytest.fixture(scope="session")
def records_h200(fading_records):
    return fading_records[200.0]


@pytest.fixture(scope="session")
def assoc_records(fading_records):
    """Association-grade campaigns (no fading) at all six altitudes; the
    fading campaigns double as association samples where they exist."""
    out = dict(fading_records)
    for h in ALTITUDES:
        if h not in out:
            out[h] = simulate_records(params_at_h(h), N_TRIALS, seed=2000 + int(h),
                                      workers=WORKERS, fading=False)
    return out
