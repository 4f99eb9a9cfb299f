"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numeric/convergence failures with 3, statistical-power failures
with 4.
"""


class NonlocalLogisticError(Exception):
    """Base class for all package errors."""


class ConfigurationError(NonlocalLogisticError):
    """Invalid parameters, domains, or run configuration."""


class DimensionError(ConfigurationError):
    """Vector/matrix shape mismatch."""


class UnsupportedKernelError(ConfigurationError):
    """Exact jump density requested for a symbol with no closed form."""


class SamplerError(ConfigurationError):
    """No increment sampler is available for the requested symbol."""


class OracleDomainError(ConfigurationError):
    """Input violates the support contract of the spectral oracle."""


class NumericError(NonlocalLogisticError):
    """Quadrature, factorization, or other numerical failure."""


class ConvergenceError(NumericError):
    """Iteration cap exceeded before reaching the requested tolerance."""


class MonotonicityError(NumericError):
    """Ordered iteration lost monotonicity (shift parameter too small)."""


class ConstructionError(NumericError):
    """Sub/supersolution construction could not satisfy its margin."""


class ContinuationError(NumericError):
    """Parameter continuation failed (singular Jacobian or divergence)."""


class SpectralProximityError(NumericError):
    """Resolvent requested too close to an eigenvalue."""


class ScanError(NumericError):
    """Existence scan produced inconsistent (non-monotone) results."""


class StatisticalPowerError(NonlocalLogisticError):
    """Too few Monte Carlo samples survive to support the estimate."""
