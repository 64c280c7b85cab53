"""Exception hierarchy shared across the pipeline."""


class DctFaceError(Exception):
    """Base class for all errors raised by dctface."""


class PgmFormatError(DctFaceError, ValueError):
    pass


class MalformedHeaderError(PgmFormatError):
    pass


class UnsupportedMaxvalError(PgmFormatError):
    pass


class TruncatedDataError(PgmFormatError):
    pass


class EmptyImageError(DctFaceError, ValueError):
    pass


class DegenerateImageError(DctFaceError, ValueError):
    pass


class InvalidFactorError(DctFaceError, ValueError):
    pass


class EmptyInputError(DctFaceError, ValueError):
    pass


class ShapeMismatchError(DctFaceError, ValueError):
    pass


class CoefficientCountError(DctFaceError, ValueError):
    pass


class ImageSizeError(DctFaceError, ValueError):
    pass


class LandmarkOutOfBoundsError(DctFaceError, ValueError):
    pass


class LandmarkFormatError(DctFaceError, ValueError):
    pass


class IncompatibleTemplatesError(DctFaceError, ValueError):
    pass


class EmptyGalleryError(DctFaceError, ValueError):
    pass


class DuplicateSubjectError(DctFaceError, ValueError):
    pass


class UnknownSubjectError(DctFaceError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class WeightsError(DctFaceError, ValueError):
    pass


class GalleryFormatError(DctFaceError, ValueError):
    pass


class IncompatibleGalleryError(GalleryFormatError):
    pass


class ManifestError(DctFaceError, ValueError):
    pass


class ConfigError(DctFaceError, ValueError):
    pass
