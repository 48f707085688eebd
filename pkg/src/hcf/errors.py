"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: usage errors exit 2
(argparse), :class:`DataError` and its subclasses exit 3, and
:class:`VerificationError` exits 4.
"""


class DataError(Exception):
    """Bad input data: unreadable files, wrong formats, mismatched shapes."""


class AudioFormatError(DataError):
    """Malformed or unsupported WAV content."""


class MatrixFormatError(DataError):
    """Malformed HCF1 matrix file."""


class ShapeError(DataError):
    """Array arguments whose shapes do not line up."""


class VerificationError(Exception):
    """A numerical self-check exceeded its tolerance."""
