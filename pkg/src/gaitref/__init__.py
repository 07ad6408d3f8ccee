"""Continuous Bezier gait-library reference engine.

Stores velocity-indexed walking gaits as Bezier coefficient matrices,
interpolates them over velocity space, blends smoothly between them in
response to velocity commands and residual corrections, and streams
joint-level reference samples at a fixed rate for PD tracking.
"""

from .bezier import BezierCurve, bernstein_basis, bernstein_matrix, fit_least_squares, subdivision_matrices
from .engine import (
    CommandInput,
    EngineConfig,
    EngineState,
    ReferenceSample,
    gait_for_stance,
    init_engine,
    rotate_command,
    tick,
    tick_batch,
)
from .errors import (
    BenchError,
    ConfigError,
    DimensionError,
    DuplicateVelocityError,
    FitError,
    GaitRefError,
    GenerationError,
    LibraryError,
    MirrorMapError,
    SchemaError,
    ScriptError,
)
from .io import (
    SyntheticSpec,
    ValidationReport,
    default_mirror_map,
    generate_synthetic,
    import_gait_table,
    load,
    save,
    validate,
)
from .library import Gait, GaitLibrary, MirrorMap, Stance, barycentric_weights, build_index, mirror_gait
from .script import CommandScript
from .tracking import ClosedLoopTrace, PDGains, PlantState, pd_torque, plant_step, run_closed_loop
from .transition import PhaseClock, TransitionCurve, blend, make_transition, splice_tail

__version__ = "0.1.0"

__all__ = [
    "BezierCurve",
    "bernstein_basis",
    "bernstein_matrix",
    "fit_least_squares",
    "subdivision_matrices",
    "CommandInput",
    "EngineConfig",
    "EngineState",
    "ReferenceSample",
    "gait_for_stance",
    "init_engine",
    "rotate_command",
    "tick",
    "tick_batch",
    "GaitRefError",
    "FitError",
    "LibraryError",
    "SchemaError",
    "DimensionError",
    "DuplicateVelocityError",
    "MirrorMapError",
    "GenerationError",
    "ScriptError",
    "ConfigError",
    "BenchError",
    "SyntheticSpec",
    "ValidationReport",
    "default_mirror_map",
    "generate_synthetic",
    "import_gait_table",
    "load",
    "save",
    "validate",
    "Gait",
    "GaitLibrary",
    "MirrorMap",
    "Stance",
    "barycentric_weights",
    "build_index",
    "mirror_gait",
    "CommandScript",
    "ClosedLoopTrace",
    "PDGains",
    "PlantState",
    "pd_torque",
    "plant_step",
    "run_closed_loop",
    "PhaseClock",
    "TransitionCurve",
    "blend",
    "make_transition",
    "splice_tail",
]
