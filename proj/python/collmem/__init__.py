"""Post-mortem mention analysis: forgetting-curve fits, curve features, clustering and statistics."""

from ._core import *  # noqa: F401,F403
from ._core import AnalysisError, InputError, ShiftedPowerLaw, AliasIndex

__version__ = "0.1.0"
