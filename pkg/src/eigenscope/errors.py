"""Exception hierarchy shared by every eigenscope module."""


class EigenscopeError(Exception):
    """Base class for all eigenscope errors."""


class DomainError(EigenscopeError, ValueError):
    """A point or argument lies outside the domain of an operation."""


class ModelError(EigenscopeError, ValueError):
    """A submanifold or chart is incompatible with the manifold model."""


class PreconditionError(EigenscopeError, ValueError):
    """An input violates a documented precondition (e.g. a non-unit covector)."""


class ResolutionError(EigenscopeError, ValueError):
    """Quadrature resolution is below the per-wavelength rule."""


class ResourceError(EigenscopeError, RuntimeError):
    """An enumeration or grid would exceed its configured cap."""


class InsufficientDataError(EigenscopeError, ValueError):
    """Too few usable samples for a fit."""


class ConfigurationError(EigenscopeError, ValueError):
    """Inconsistent numerical settings or an invalid experiment config."""


class NoCriticalPointError(EigenscopeError, RuntimeError):
    """Newton iteration did not reach a critical point."""


class DegeneracyError(EigenscopeError, ValueError):
    """A Hessian has an eigenvalue too close to zero to assign a sign."""
