"""Matrix-valued Cauchy bi-orthogonal polynomials and their lattice equations, verified exactly.

The usual entry points are :func:`simple_measure` or :func:`load_measure`,
then :func:`family_from_measure`, :func:`recurrence` and the ``check_*``
functions, each of which returns a :class:`ResidualReport`.
"""
from .blockmat import Mat, invert, qdet, quasidet, solve, solve_nc
from .cbop import MatPoly, PolyFamily, build_family, family_from_measure, inner_product
from .errors import (
    ConfigError,
    DivisionByZero,
    HnSingular,
    McbopError,
    MeasureParseError,
    MomentConditionViolated,
    QuasideterminantUndefined,
    Singular,
    SystemSingular,
    TruncationTooSmall,
    UnsupportedFamily,
    VnSingular,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .lattice import check_evolution, check_lax, check_nc_ctoda, check_recurrence, recurrence
from .measure import DiscreteMeasure, MomentTable, discretize, load_measure, moments, simple_measure
from .reduction import TauData, check_bridge, check_hirota, tau_sigma
from .report import ResidualReport
from .ring import JQQ, JRR, QQ, RR, Jet2, exp_node
from .t3 import check_t3, t3_construct, t3_wave_evolution

__version__ = "0.1.0"

__all__ = [
    "Mat", "invert", "qdet", "quasidet", "solve", "solve_nc",
    "MatPoly", "PolyFamily", "build_family", "family_from_measure", "inner_product",
    "ConfigError", "DivisionByZero", "HnSingular", "McbopError", "MeasureParseError",
    "MomentConditionViolated", "QuasideterminantUndefined", "Singular", "SystemSingular",
    "TruncationTooSmall", "UnsupportedFamily", "VnSingular",
    "KERNEL_BACKEND",
    "check_evolution", "check_lax", "check_nc_ctoda", "check_recurrence", "recurrence",
    "DiscreteMeasure", "MomentTable", "discretize", "load_measure", "moments", "simple_measure",
    "TauData", "check_bridge", "check_hirota", "tau_sigma",
    "ResidualReport",
    "JQQ", "JRR", "QQ", "RR", "Jet2", "exp_node",
    "check_t3", "t3_construct", "t3_wave_evolution",
]
