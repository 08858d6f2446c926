"""Static figure regeneration for uavhetnet sweep CSVs."""

from .figures import FIGURE_KINDS, CsvContractError, build_figure, plot, read_sweep_csv

__version__ = "0.1.0"
__all__ = ["FIGURE_KINDS", "CsvContractError", "build_figure", "plot",
           "read_sweep_csv", "__version__"]
