"""Fuzzy Lie theory toolkit: fuzzy sets and topologies, fuzzy Lie subalgebras,
PBW normal forms and symmetrization, and spherical functions on SU(2)."""

from .errors import CapacityError, DomainError, NumericError
from .report import CheckReport

__version__ = "0.1.0"

__all__ = ["CapacityError", "CheckReport", "DomainError", "NumericError", "__version__"]
