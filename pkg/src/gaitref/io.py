"""Gait-library serialization, validation, synthesis and import.

The on-disk format is versioned JSON (see docs/library_format.md): small
enough at realistic sizes (39 gaits x 10 outputs x 8 control points) that
a human-diffable text file beats a binary one, and numbers are written in
Python's shortest round-trip decimal form so write-then-read reproduces
every coefficient bit-exactly.

The synthetic generator stands in for an external trajectory optimizer:
it builds smooth periodic stepping waveforms whose amplitudes vary
continuously with the velocity label, fits them with Bezier least
squares, and guarantees by construction that the terminal pose of each
gait maps under the mirror onto the initial pose of the next step's gait
(within 1e-3 rad), so consecutive steps chain without reference jumps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bezier import BezierCurve, fit_least_squares
from .errors import (
    DimensionError,
    GenerationError,
    LibraryError,
    SchemaError,
)
from .library import Gait, GaitLibrary, MirrorMap, Stance, build_index

FORMAT_VERSION = 1

# Joint roles cycle per leg: hip yaw, hip roll, hip pitch, knee, ankle.
# Yaw and roll flip sign under the left/right mirror; the sagittal joints
# do not.
_ROLE_SIGNS = (-1.0, -1.0, 1.0, 1.0, 1.0)

DEFAULT_PROFILES = {
    "pitch_gain": 0.35,  # stance/swing hip pitch sweep per m/s of forward speed
    "pitch_lift": 0.18,  # swing hip flexion bump
    "clearance_base": 0.25,  # swing knee bump at zero speed
    "clearance_gain": 0.30,  # extra knee bump per m/s of speed
    "roll_base": 0.12,
    "roll_gain": 0.40,  # roll bump per m/s of lateral speed
    "yaw_gain": 0.15,
    "stance_dip": 0.06,  # stance knee compliance bump
    "knee_offset": 0.40,
    "ankle_offset": -0.20,
}


def default_mirror_map(n_outputs: int) -> MirrorMap:
    """Swap the two leg blocks with role-dependent sign flips.

    Outputs [0, n/2) are one leg, [n/2, n) the other; an odd trailing
    output (waist-style) maps to itself with sign +1.
    """
    half = n_outputs // 2
    perm = np.arange(n_outputs)
    signs = np.ones(n_outputs)
    for j in range(half):
        perm[j] = j + half
        perm[j + half] = j
        signs[j] = signs[j + half] = _ROLE_SIGNS[j % 5]
    return MirrorMap(perm, signs)


def _bump(p: np.ndarray) -> np.ndarray:
    # Quartic bell: zero value and slope at both ends, peak 1 at p = 1/2.
    # Polynomial, so it is represented exactly by the degree >= 4 fit and
    # the endpoint poses stay impact-consistent to fit precision.
    return 16.0 * p**2 * (1.0 - p) ** 2


def _waveforms(
    p: np.ndarray, vx: float, vy: float, n_outputs: int, prof: dict
) -> np.ndarray:
    """Joint waveforms of one canonical left-stance step at velocity (vx, vy).

    Endpoint poses depend only on vx and role constants, which makes the
    left-stance terminal pose map under the mirror exactly onto the
    initial pose of the gait at (vx, -vy).
    """
    half = n_outputs // 2
    speed = math.hypot(vx, vy)
    bump = _bump(p)
    sweep = np.cos(np.pi * p)
    a = prof["pitch_gain"] * vx
    clearance = prof["clearance_base"] + prof["clearance_gain"] * speed
    lift = prof["pitch_lift"] * (0.5 + speed)

    out = np.zeros((len(p), n_outputs))
    for j in range(half):
        stance, swing = j, j + half
        role = j % 5
        if role == 0:  # hip yaw
            out[:, stance] = -0.5 * prof["yaw_gain"] * vy * bump
            out[:, swing] = prof["yaw_gain"] * vy * bump
        elif role == 1:  # hip roll
            out[:, stance] = (prof["roll_base"] + 0.5 * prof["roll_gain"] * vy) * bump
            out[:, swing] = (prof["roll_base"] + prof["roll_gain"] * vy) * bump
        elif role == 2:  # hip pitch
            out[:, stance] = a * sweep
            out[:, swing] = -a * sweep + lift * bump
        elif role == 3:  # knee
            out[:, stance] = prof["knee_offset"] + prof["stance_dip"] * bump
            out[:, swing] = prof["knee_offset"] + clearance * bump
        else:  # ankle
            out[:, stance] = prof["ankle_offset"] - 0.5 * prof["stance_dip"] * bump
            out[:, swing] = prof["ankle_offset"] - 0.5 * clearance * bump
    if n_outputs % 2:
        out[:, -1] = 0.1 * prof["yaw_gain"] * vy * bump
    return out


def _default_metadata() -> dict:
    return {"robot_name": "synthetic-biped", "n_l": 14, "n_e": 41}


@dataclass(frozen=True)
class SyntheticSpec:
    """Inputs of the synthetic generator. Generation is deterministic."""

    velocities: tuple[tuple[float, float], ...]
    n_outputs: int = 10
    degree: int = 7
    step_duration: float = 0.4
    profiles: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=_default_metadata)
    fit_samples: int = 120
    fit_tolerance: float = 1e-4

    def __post_init__(self) -> None:
        vels = tuple((float(v[0]), float(v[1])) for v in self.velocities)
        if not vels:
            raise SchemaError("spec needs at least one velocity")
        object.__setattr__(self, "velocities", vels)
        if self.n_outputs < 1 or self.degree < 1:
            raise SchemaError("n_outputs and degree must be >= 1")
        if self.step_duration <= 0.0:
            raise SchemaError("step_duration must be > 0")
        if self.fit_samples < self.degree + 1:
            raise SchemaError("fit_samples must exceed the curve degree")
        unknown = set(self.profiles) - set(DEFAULT_PROFILES)
        if unknown:
            raise SchemaError(f"unknown profile parameters: {sorted(unknown)}")

    @classmethod
    def default(cls) -> "SyntheticSpec":
        """39-gait grid: 13 forward speeds x 3 lateral speeds."""
        vx = np.linspace(-0.3, 0.5, 13)
        vy = np.linspace(-0.2, 0.2, 3)
        return cls(velocities=tuple((float(x), float(y)) for x in vx for y in vy))

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticSpec":
        if not isinstance(data, dict):
            raise SchemaError(f"spec must be an object, got {type(data).__name__}")
        known = {
            "velocities",
            "vx",
            "vy",
            "n_outputs",
            "degree",
            "step_duration",
            "profiles",
            "metadata",
            "fit_samples",
            "fit_tolerance",
        }
        unknown = set(data) - known
        if unknown:
            raise SchemaError(f"unknown spec fields: {sorted(unknown)}")
        if "velocities" in data:
            try:
                velocities = tuple((float(v[0]), float(v[1])) for v in data["velocities"])
            except (TypeError, ValueError, IndexError) as exc:
                raise SchemaError(f"velocities must be a list of [v_x, v_y] pairs: {exc}") from None
        elif "vx" in data and "vy" in data:
            axes = []
            for key in ("vx", "vy"):
                axis = data[key]
                try:
                    axes.append(np.linspace(float(axis["min"]), float(axis["max"]), int(axis["count"])))
                except (TypeError, KeyError, ValueError) as exc:
                    raise SchemaError(f"{key} must be {{min, max, count}}: {exc}") from None
            velocities = tuple((float(x), float(y)) for x in axes[0] for y in axes[1])
        else:
            raise SchemaError("spec needs either 'velocities' or a 'vx'/'vy' grid")
        kwargs = {}
        for key in ("n_outputs", "degree", "fit_samples"):
            if key in data:
                kwargs[key] = int(data[key])
        for key in ("step_duration", "fit_tolerance"):
            if key in data:
                kwargs[key] = float(data[key])
        for key in ("profiles", "metadata"):
            if key in data:
                if not isinstance(data[key], dict):
                    raise SchemaError(f"{key} must be an object")
                kwargs[key] = dict(data[key])
        return cls(velocities=velocities, **kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "SyntheticSpec":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise SchemaError(f"cannot read spec {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise SchemaError(f"spec {path} is not valid JSON: {exc}") from None
        return cls.from_dict(data)


def generate_synthetic(spec: SyntheticSpec | dict) -> GaitLibrary:
    """Build a validated library from closed-form stepping waveforms.

    Raises GenerationError when a fit misses the spec's residual tolerance
    or when the constructed gaits fail the impact-consistency budget.
    """
    if isinstance(spec, dict):
        spec = SyntheticSpec.from_dict(spec)
    prof = {**DEFAULT_PROFILES, **spec.profiles}
    p = np.linspace(0.0, 1.0, spec.fit_samples)

    gaits = []
    for i, (vx, vy) in enumerate(spec.velocities):
        targets = _waveforms(p, vx, vy, spec.n_outputs, prof)
        curve = fit_least_squares(p, targets, spec.degree)
        residual = float(np.max(np.abs(curve.sample(p) - targets)))
        if residual > spec.fit_tolerance:
            raise GenerationError(
                f"gait at ({vx:g}, {vy:g}): fit residual {residual:.3e} exceeds "
                f"tolerance {spec.fit_tolerance:.3e}; lower the degree gap or relax "
                "the waveform profile"
            )
        gaits.append(
            Gait(
                curve=curve,
                velocity=(vx, vy),
                step_duration=spec.step_duration,
                stance=Stance.LEFT,
                name=f"gait_{i:02d}_vx{vx:+.3f}_vy{vy:+.3f}",
            )
        )

    mirror = default_mirror_map(spec.n_outputs)
    lib = build_index(gaits, mirror, dict(spec.metadata))

    # By-construction check: each fitted gait's terminal pose must chain
    # onto the mirrored start of the analytic gait at the flipped lateral
    # velocity (the waveforms make this identity exact; only fit error
    # remains). The interpolation-based runtime metric lives in validate().
    p0 = np.array([0.0])
    worst = 0.0
    for g in gaits:
        partner_start = _waveforms(p0, g.velocity[0], -g.velocity[1], spec.n_outputs, prof)[0]
        jump = np.abs(mirror.apply_vector(partner_start) - g.curve.eval(1.0))
        worst = max(worst, float(np.max(jump)))
    if worst > 1e-3:
        raise GenerationError(
            f"impact-consistency residual {worst:.3e} exceeds the 1e-3 construction budget"
        )
    return lib


def _impact_residuals(lib: GaitLibrary) -> list[float]:
    """Per gait: how far its terminal pose is from chaining onto the next step.

    The next step tracks the mirror of the gait interpolated at the
    laterally flipped velocity; the residual is the jump the reference
    stream would show across the step boundary.
    """
    out = []
    for g in lib.gaits:
        partner = lib.interpolate((g.velocity[0], -g.velocity[1]))
        next_start = lib.mirror.apply_vector(partner.curve.eval(0.0))
        out.append(float(np.max(np.abs(next_start - g.curve.eval(1.0)))))
    return out


# ---------------------------------------------------------------------------
# JSON library files


def payload_from_library(lib: GaitLibrary) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "n_outputs": lib.n_outputs,
        "degree": lib.degree,
        "mirror": {
            "permutation": [int(i) for i in lib.mirror.permutation],
            "signs": [int(s) for s in lib.mirror.signs],
        },
        "metadata": dict(lib.metadata),
        "gaits": [
            {
                "name": g.name,
                "v_x": g.velocity[0],
                "v_y": g.velocity[1],
                "step_duration": g.step_duration,
                "coeffs": [float(x) for x in g.curve.coeffs.ravel()],
            }
            for g in lib.gaits
        ],
    }


def _require(payload: dict, key: str, types, where: str):
    if key not in payload:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = payload[key]
    if not isinstance(value, types):
        raise SchemaError(f"{where}: field {key!r} has type {type(value).__name__}")
    return value


def library_from_payload(payload: dict) -> GaitLibrary:
    """Build a fully validated library; raises the specific error kind
    (schema, dimension, duplicate velocity, mirror map) on the first
    violation, naming the offending gait and field."""
    if not isinstance(payload, dict):
        raise SchemaError(f"library file must hold an object, got {type(payload).__name__}")
    version = _require(payload, "format_version", int, "library")
    if version != FORMAT_VERSION:
        raise SchemaError(f"library: unsupported format_version {version}, expected {FORMAT_VERSION}")
    n_outputs = _require(payload, "n_outputs", int, "library")
    degree = _require(payload, "degree", int, "library")
    if n_outputs < 1 or degree < 1:
        raise SchemaError("library: n_outputs and degree must be >= 1")

    mirror_raw = _require(payload, "mirror", dict, "library")
    mirror = MirrorMap(
        _require(mirror_raw, "permutation", list, "mirror"),
        _require(mirror_raw, "signs", list, "mirror"),
    )
    metadata = payload.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SchemaError("library: metadata must be an object")

    gaits_raw = _require(payload, "gaits", list, "library")
    gaits = []
    for i, raw in enumerate(gaits_raw):
        if not isinstance(raw, dict):
            raise SchemaError(f"gait #{i}: must be an object")
        name = raw.get("name", f"gait #{i}")
        if not isinstance(name, str):
            raise SchemaError(f"gait #{i}: name must be a string")
        where = f"gait {name!r}"
        vx = _require(raw, "v_x", (int, float), where)
        vy = _require(raw, "v_y", (int, float), where)
        duration = _require(raw, "step_duration", (int, float), where)
        if not duration > 0.0:
            raise SchemaError(f"{where}: step_duration must be > 0, got {duration}")
        coeffs = _require(raw, "coeffs", list, where)
        expected = n_outputs * (degree + 1)
        if len(coeffs) != expected:
            raise DimensionError(
                f"{where}: coeffs has {len(coeffs)} entries, expected "
                f"{expected} (n_outputs x (degree + 1))"
            )
        try:
            matrix = np.asarray(coeffs, dtype=np.float64).reshape(n_outputs, degree + 1)
            curve = BezierCurve(matrix)
            gaits.append(
                Gait(curve, (float(vx), float(vy)), float(duration), Stance.LEFT, name)
            )
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{where}: {exc}") from None

    return build_index(gaits, mirror, metadata)


def load(path: str | Path) -> GaitLibrary:
    """Read and fully validate a library file; no partially valid library
    object ever escapes this function."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read library {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"library {path} is not valid JSON: {exc}") from None
    return library_from_payload(payload)


def save(lib: GaitLibrary, path: str | Path) -> Path:
    """Write the library as versioned JSON; numbers keep full precision."""
    path = Path(path)
    with path.open("w") as fh:
        json.dump(payload_from_library(lib), fh, indent=1)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# Plain-table import (one gait per file)


def import_gait_table(path: str | Path) -> Gait:
    """Read one gait from the auxiliary plain-table format.

    Header lines are ``key value`` pairs (v_x, v_y, step_duration required,
    name optional); the remaining lines are the coefficient matrix, one
    output row per line. Lines starting with '#' are comments. See
    docs/library_format.md.
    """
    path = Path(path)
    header: dict[str, str] = {}
    rows: list[list[float]] = []
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise SchemaError(f"cannot read gait table {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        first = parts[0]
        is_number = first.lstrip("+-").replace(".", "", 1)[:1].isdigit()
        if not rows and not is_number:
            if len(parts) != 2:
                raise SchemaError(f"{path}:{lineno}: header lines must be 'key value'")
            header[parts[0]] = parts[1]
            continue
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}") from None
    for key in ("v_x", "v_y", "step_duration"):
        if key not in header:
            raise SchemaError(f"{path}: missing header {key!r}")
    if not rows:
        raise SchemaError(f"{path}: no coefficient rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaError(f"{path}: coefficient rows have uneven lengths")
    try:
        return Gait(
            curve=BezierCurve(np.asarray(rows)),
            velocity=(float(header["v_x"]), float(header["v_y"])),
            step_duration=float(header["step_duration"]),
            stance=Stance.LEFT,
            name=header.get("name", path.stem),
        )
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Validation report


@dataclass
class ValidationReport:
    ok: bool
    errors: list[dict]
    warnings: list[str]
    metrics: dict

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "errors": self.errors,
            "warnings": list(self.warnings),
            "metrics": self.metrics,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _triangle_quality(lib: GaitLibrary) -> tuple[float, float | None]:
    """(hull area, min interior angle in degrees) of the triangulation."""
    if not lib.triangulation:
        return 0.0, None
    pts = lib.velocities
    area = 0.0
    min_angle = math.inf
    for tri in lib.triangulation:
        a, b, c = (pts[i] for i in tri)
        area += 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        for p0, p1, p2 in ((a, b, c), (b, c, a), (c, a, b)):
            u, v = p1 - p0, p2 - p0
            cosang = (u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
            min_angle = min(min_angle, math.degrees(math.acos(max(-1.0, min(1.0, cosang)))))
    return area, min_angle


def validate(source: GaitLibrary | dict | str | Path) -> ValidationReport:
    """Machine-readable library health report.

    Hard invariant violations (anything that would make load() fail) land
    in `errors` and clear `ok`; interpolation-mode degradations are
    warnings; the metrics block reports impact-consistency residuals, hull
    area, triangle quality and coefficient magnitudes.
    """
    if isinstance(source, GaitLibrary):
        lib = source
    else:
        try:
            if isinstance(source, dict):
                lib = library_from_payload(source)
            else:
                lib = load(source)
        except LibraryError as exc:
            return ValidationReport(
                ok=False,
                errors=[{"kind": exc.kind, "message": str(exc)}],
                warnings=[],
                metrics={},
            )

    impact = _impact_residuals(lib)
    hull_area, min_angle = _triangle_quality(lib)
    coeffs = np.stack([g.curve.coeffs for g in lib.gaits])
    metrics = {
        "n_gaits": len(lib.gaits),
        "n_outputs": lib.n_outputs,
        "degree": lib.degree,
        "interpolation_mode": lib.interpolation_mode,
        "n_triangles": len(lib.triangulation),
        "hull_area": hull_area,
        "min_triangle_angle_deg": min_angle,
        "coeff_abs_max": float(np.max(np.abs(coeffs))),
        "coeff_abs_mean": float(np.mean(np.abs(coeffs))),
        "step_duration_min": min(g.step_duration for g in lib.gaits),
        "step_duration_max": max(g.step_duration for g in lib.gaits),
        "impact_residual_max": max(impact),
        "impact_residuals": impact,
    }
    return ValidationReport(ok=True, errors=[], warnings=list(lib.warnings), metrics=metrics)
