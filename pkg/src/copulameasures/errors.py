"""Exception hierarchy shared across the package."""


class CopulaError(Exception):
    """Base class for all library errors."""


class DimensionUnsupported(CopulaError):
    """Family does not exist at the requested dimension."""


class ParamOutOfRange(CopulaError):
    """Parameter outside the family's admissible range."""


class CorrelationNotPD(CopulaError):
    """Correlation matrix is not strictly positive definite."""


class DimensionMismatch(CopulaError):
    """Point or data dimension differs from the model dimension."""


class SamplerUnavailable(CopulaError):
    """No exact sampler is implemented for this family."""


class NotArchimedean(CopulaError):
    """Family has no Archimedean generator."""


class ToleranceNotReached(CopulaError):
    """Integration budget exhausted before the requested tolerance.

    The best available estimate is attached as ``.estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class NonFiniteIntegrand(CopulaError):
    """Integrand returned NaN or infinity."""


class NoClosedForm(CopulaError):
    """No closed-form expression is available for this family."""


class DivergenceInfinite(CopulaError):
    """Divergence integrand hit +inf on a set of positive measure."""


class NonFiniteData(CopulaError):
    """Input data contains NaN or infinity."""


class DegenerateColumn(CopulaError):
    """A data column is constant; rank statistics are undefined."""


class TauOutOfRange(CopulaError):
    """Sample concordance is outside the family's attainable range."""


class NoConvergence(CopulaError):
    """Root finding failed to converge."""


class NotFittable(CopulaError):
    """Family has no implemented rank-inversion estimator."""


class ColumnMissing(CopulaError):
    """Requested CSV column is absent."""


class NoCompleteRows(CopulaError):
    """Every CSV row was dropped for missing or unparsable values."""
