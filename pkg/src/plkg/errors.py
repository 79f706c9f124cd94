"""Exception hierarchy shared across the package."""


class PlkgError(Exception):
    """Base class for all package errors."""


class ParseError(PlkgError):
    """Input document is not syntactically valid."""


class StructureError(PlkgError):
    """A structural invariant of the schema is violated."""

    def __init__(self, code: str, message: str, subject: str = ""):
        self.code = code
        self.subject = subject
        super().__init__(f"{code}: {message}" + (f" (subject: {subject})" if subject else ""))


class UnknownNode(PlkgError):
    """Referenced node id does not exist in the schema."""


class SchemaMismatch(PlkgError):
    """Annotation was made against a different schema version."""


class InvalidAnnotation(PlkgError):
    """Annotation has validation errors that block the requested operation."""

    def __init__(self, report, message: str = "annotation has validation errors"):
        self.report = report
        super().__init__(message)


class MixedImages(PlkgError):
    """Annotations to merge do not all reference the same image."""


class MixedSchemaVersions(PlkgError):
    """Annotations to merge do not all share one schema version."""


class BandsExceedHeight(PlkgError):
    """More warmth bands requested than the image has pixel rows."""


class ImageTooSmall(PlkgError):
    """Raster is below the minimum size for the extractor."""


class DegeneratePath(PlkgError):
    """Polyline has fewer than two points."""


class AllParallel(PlkgError):
    """Line bundle has no well-defined least-squares intersection."""


class MisalignedCorpora(PlkgError):
    """Two annotation corpora cannot be aligned by image reference."""


class UnknownRuleNode(PlkgError):
    """Consistency rule references a node id missing from the schema."""


class NoSchema(PlkgError):
    """Workspace directory has no loadable schema file."""


class CorruptIndex(PlkgError):
    """Workspace annotation index cannot be rebuilt."""


class ValidationFailed(PlkgError):
    """Write rejected because the annotation does not validate cleanly."""

    def __init__(self, report, message: str = "annotation rejected by validation"):
        self.report = report
        super().__init__(message)


class RevisionConflict(PlkgError):
    """Optimistic-concurrency revision counter did not match the stored one."""


class BindError(PlkgError):
    """Service could not bind the requested address."""
