"""Weighted-CAZAC joint timing and CFO synchronization for coherent optical OFDM."""

from ._core import *  # noqa: F401,F403
from ._core import EstimationError, InvalidArgument, TrainingSymbol

__all__ = [name for name in dir() if not name.startswith("_")]
