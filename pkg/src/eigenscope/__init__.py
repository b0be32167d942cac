"""Numerical laboratory for eigenfunction integrals over submanifolds."""

from .errors import (
    ConfigurationError,
    DegeneracyError,
    DomainError,
    EigenscopeError,
    InsufficientDataError,
    ModelError,
    NoCriticalPointError,
    PreconditionError,
    ResolutionError,
    ResourceError,
)
from .manifolds import ManifoldModel, fermi_chart, principal_symbol
from .eigenbasis import EigenLevel, Eigenfunction, enumerate_levels, evaluate, zonal_at_base
from .submanifolds import make_submanifold
from .integrals import (
    band_sum,
    eigenspace_maximizer,
    fit_exponent,
    integrate_eigenfunction,
    weyl_sum,
)
from .flow import FlowSettings, PhasePoint, conormal_sample, detect_loop, flow, looping_fraction

__version__ = "0.1.0"
