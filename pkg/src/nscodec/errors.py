"""Exception hierarchy shared across the codec.

``CodecError`` covers data and validation failures (bad files, bad
streams, unusable inputs); the CLI maps it to exit code 2. Programming
contract violations (wrong shapes passed between internal layers) raise
plain ``ValueError``.
"""


class CodecError(Exception):
    """Base class for data/validation errors surfaced to users."""


class WavFormatError(CodecError):
    """WAV file is malformed or not PCM16 mono 16 kHz."""


class BitstreamError(CodecError):
    """Base class for coded-stream container errors."""


class BadMagicError(BitstreamError):
    """Stream does not start with the expected magic bytes."""


class UnsupportedVersionError(BitstreamError):
    """Stream version is unknown to this implementation."""


class InvalidLayersError(BitstreamError):
    """Layer count outside {1, 2, 3} or exceeds what the stream holds."""


class PayloadLengthError(BitstreamError):
    """Payload size is inconsistent with the header."""


class WeightsError(CodecError):
    """Base class for weights-container errors."""


class WeightsFormatError(WeightsError):
    """Container magic, version, or record structure is invalid."""


class TruncatedWeightsError(WeightsError):
    """Container ends before all declared records (or the footer)."""


class ChecksumError(WeightsError):
    """Payload CRC32 does not match the footer."""


class DuplicateTensorError(WeightsError):
    """Two records in the container share a name."""


class ManifestError(WeightsError):
    """A required tensor is missing or has the wrong shape."""


class TrainingDataError(CodecError):
    """Not enough data to train codebooks."""
