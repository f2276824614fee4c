"""Exact q-expansions and finite-level checks for the explicit reciprocity law
of the elliptic polylogarithm."""
from .cyclotomic import CycNumber, cyclotomic_poly
from .distribution import CosetBox, LCFunction
from .eisenstein import (
    TorsionIndex,
    eisenstein_F,
    eisenstein_F_u,
    e_series_spec,
    siegel_unit_c,
    siegel_unit_u,
    theta_spec,
)
from .errors import DomainError, LatticePointError, LevelMismatchError
from .moments import SymVector, measure_coherence_check, soule_moment
from .qseries import QExpansion
from .reciprocity import (
    LogElement,
    PmElement,
    TadicElement,
    TowerElement,
    exp_star_verify,
    reciprocity_partial_sum,
    trace_RM,
)

__version__ = "0.1.0"

__all__ = [
    "CycNumber",
    "cyclotomic_poly",
    "QExpansion",
    "TorsionIndex",
    "eisenstein_F",
    "eisenstein_F_u",
    "e_series_spec",
    "theta_spec",
    "siegel_unit_c",
    "siegel_unit_u",
    "CosetBox",
    "LCFunction",
    "SymVector",
    "soule_moment",
    "measure_coherence_check",
    "TowerElement",
    "LogElement",
    "TadicElement",
    "PmElement",
    "trace_RM",
    "reciprocity_partial_sum",
    "exp_star_verify",
    "DomainError",
    "LatticePointError",
    "LevelMismatchError",
]
