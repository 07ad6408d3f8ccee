"""Exception types shared across the package.

Every error carries a short machine-parsable ``kind`` used by the CLI to
emit one-line error categories.
"""


class GaitRefError(Exception):
    """Base class for all errors raised by this package."""

    kind = "error"


class FitError(GaitRefError):
    """Least-squares fit failed (rank-deficient design matrix)."""

    kind = "fit"


class LibraryError(GaitRefError):
    """Base class for gait-library construction and loading errors."""

    kind = "library"


class SchemaError(LibraryError):
    """File content does not match the documented schema."""

    kind = "schema"


class DimensionError(LibraryError):
    """Curve or joint dimensions disagree within a library."""

    kind = "dimension"


class DuplicateVelocityError(LibraryError):
    """Two gaits share the same velocity label."""

    kind = "duplicate-velocity"


class MirrorMapError(LibraryError):
    """Mirror map is not a sign-consistent involution."""

    kind = "mirror-map"


class GenerationError(GaitRefError):
    """Synthetic library generation failed its own quality checks."""

    kind = "generation"


class ScriptError(GaitRefError):
    """Command script is malformed or inconsistent."""

    kind = "script"


class ConfigError(GaitRefError):
    """Invalid run configuration (rates, gains, ...)."""

    kind = "config"


class BenchError(GaitRefError):
    """Benchmark aborted (batch/sequential equivalence probe failed)."""

    kind = "bench"
