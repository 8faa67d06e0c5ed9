"""Exception hierarchy shared across the package.

``DataError`` subclasses signal malformed input files or corpora;
``NumericalError`` subclasses signal computations that cannot proceed
(degenerate inputs, singular systems, non-integrable integrands). The CLI
maps these two families to distinct exit codes.
"""


class ReciError(Exception):
    """Base class for all package-specific errors."""


class DataError(ReciError):
    """A file or corpus does not match the expected format."""


class MalformedLine(DataError):
    """A data line holds non-numeric, non-finite, or too few fields."""

    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        msg = f"line {line_no}" + (f": {detail}" if detail else "")
        super().__init__(msg)


class EmptyFile(DataError):
    """A pair file holds fewer than two data rows."""


class MetaMismatch(DataError):
    """A meta file references a pair file that does not exist."""


class NumericalError(ReciError):
    """A computation cannot proceed for numerical reasons."""


class DegenerateRange(NumericalError):
    """A vector has zero range (or zero variance) where spread is required."""


class SingularSystem(NumericalError):
    """A linear least-squares system is rank deficient."""


class TooFewPointsRemain(NumericalError):
    """Low-density filtering would leave fewer than the minimum row count."""


class BothZero(NumericalError):
    """Both regression errors are exactly zero; no confidence is defined."""


class NonIntegrable(NumericalError):
    """The variance-ratio integrand blows up on the integration grid."""


class InsufficientSamples(NumericalError):
    """A conditioning cell holds too few points for a variance estimate."""


class DegenerateSpacing(NumericalError):
    """Too many tied consecutive values for slope or spacing estimates."""


class ZeroWeight(NumericalError):
    """The total record weight is zero; weighted accuracy is undefined."""


class NonConvergenceWarning(UserWarning):
    """An iterative fit hit its iteration cap; best-so-far parameters were kept."""
