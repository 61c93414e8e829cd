"""Exception and warning types shared across the package."""


class RbfAdaptError(Exception):
    """Base class for all errors raised by this package."""


class SingularVandermonde(RbfAdaptError):
    """Polynomial system is rank deficient (nodes not unisolvent)."""


class SingularSystem(RbfAdaptError):
    """Stencil saddle system could not be factorized (degenerate nodes)."""


class DegenerateExtension(RbfAdaptError):
    """Degree-extension system is singular (nodes not unisolvent at m+mu)."""


class UnsupportedOrder(RbfAdaptError):
    """Requested a kernel derivative order that is not implemented."""


class NonConvergedMoment(RbfAdaptError):
    """Subdivision quadrature for a kernel moment did not converge."""


class DegenerateInput(RbfAdaptError):
    """Point set is too degenerate to tessellate (e.g. all collinear)."""


class InsufficientNodes(RbfAdaptError):
    """Fewer nodes available than the neighborhood size requested."""


class MaxDepth(RbfAdaptError):
    """Recursive bisection exceeded the depth limit without converging."""


class ConfigError(RbfAdaptError):
    """Invalid run configuration."""


class IllConditioned(UserWarning):
    """A stencil system's condition estimate exceeded the report threshold."""
