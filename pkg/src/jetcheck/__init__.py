"""Exact jet-bundle calculus for natural Lagrangians of metrics and linear
connections, with a verification harness (``jetcheck``)."""

from .charts import ChartSpec
from .symexpr import CheckOptions, RationalExpr, VarId, get_ring, identity_check

__version__ = "0.1.0"

__all__ = ["ChartSpec", "CheckOptions", "RationalExpr", "VarId", "get_ring", "identity_check", "__version__"]
