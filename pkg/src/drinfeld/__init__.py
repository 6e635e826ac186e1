"""Exact non-archimedean arithmetic for Drinfeld module periods.

The library computes rigid analytic trivializations of rank-r Drinfeld
modules as convergent infinite products of Frobenius-twisted matrices and
extracts the period lattice and quasi-periods from them, entirely in exact
truncated arithmetic over F_{q^M}((theta^(-1/e))).
"""

from .core import DrinfeldModule, carlitz, log_deformation, shadowed_partitions
from .errors import (BudgetExceededError, ContractionError,
                     DecayCertificationError, DrinfeldError, ExtensionNeeded,
                     NonUnitSeriesError, RadiusError, RamificationNeeded,
                     SpecParseError, ZeroInversionError)
from .expr import RunSpec, evaluate, parse_runspec
from .fields import FFElem, FieldConfig, get_config
from .laurent import LaurentNum, compare_mod_scalar
from .rat import (RatConfig, RatReport, carlitz_reference, legendre_check,
                  trivialize)
from .tate import TateMatrix, TateSeries, residue_at_theta
from .torsion import (PolygonData, TorsionSelection, build_xi, compute_N,
                      newton_polygon, strict_t_basis)
from .verify import property_suite

__version__ = "0.1.0"

__all__ = [
    "DrinfeldModule", "carlitz", "log_deformation", "shadowed_partitions",
    "DrinfeldError", "ZeroInversionError", "RamificationNeeded", "ExtensionNeeded",
    "NonUnitSeriesError", "DecayCertificationError", "RadiusError",
    "ContractionError", "BudgetExceededError", "SpecParseError",
    "RunSpec", "evaluate", "parse_runspec",
    "FFElem", "FieldConfig", "get_config",
    "LaurentNum", "compare_mod_scalar",
    "RatConfig", "RatReport", "carlitz_reference", "legendre_check", "trivialize",
    "TateMatrix", "TateSeries", "residue_at_theta",
    "PolygonData", "TorsionSelection", "build_xi", "compute_N",
    "newton_polygon", "strict_t_basis",
    "property_suite",
]
