"""Random recursive trees grown by uniform attachment with random deletions."""

from recdel.exact import MomentTable, StratumDistribution, moments, stratum_recurrence
from recdel.process import LifoRule, ProcessParams, monte_carlo, run
from recdel.series import PowerSeries, series_gf
from recdel.trees import RecursiveTree, enumerate_stratum

__all__ = [
    "LifoRule",
    "MomentTable",
    "PowerSeries",
    "ProcessParams",
    "RecursiveTree",
    "StratumDistribution",
    "enumerate_stratum",
    "moments",
    "monte_carlo",
    "run",
    "series_gf",
    "stratum_recurrence",
]

__version__ = "0.1.0"
