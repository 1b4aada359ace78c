"""Exception hierarchy for the alignment toolkit.

Two broad families matter to callers (and to CLI exit codes):

* ``DataError`` -- the input is malformed (bad shape, bad file, bad domain).
* ``NumericError`` -- the input is well-formed but the requested quantity
  does not exist (zero-probability alignment, unsupported path entry).
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DataError(ToolkitError):
    """Malformed input: shapes, dtypes, domains, file contents."""


class NumericError(ToolkitError):
    """Well-formed input for which the requested value is undefined."""


class InvalidShape(DataError):
    """Matrix shape admits no valid alignment (T < N, or empty)."""


class NonFinite(DataError):
    """Input contains NaN or +inf (only finite values and -inf are legal)."""


class InvalidPath(DataError):
    """A hard-alignment path violates monotonicity or coverage."""


class ShapeMismatch(DataError):
    """Two matrices that must share a shape do not."""


class DimensionMismatch(DataError):
    """Embedding or coefficient dimensions disagree."""


class DomainError(DataError):
    """Scalar parameter outside its legal domain (k > n, omega <= 0, ...)."""


class LengthMismatch(DataError):
    """Two sequences that must share a length do not."""


class ParseError(DataError):
    """A matrix file could not be parsed; message carries the location."""


class UnsupportedDtype(ParseError):
    """NPY dtype outside the supported {<f4, <f8} subset."""


class FortranOrderUnsupported(ParseError):
    """NPY file declares fortran_order=True; only C order is read."""


class NoValidPath(NumericError):
    """Every monotonic alignment has probability zero."""


class PathUnsupported(NumericError):
    """The soft alignment assigns zero mass to a hard-path entry."""


class IncompleteCoverage(UserWarning):
    """Monotonic argmax ended before the final token; trailing tokens get
    zero duration."""
