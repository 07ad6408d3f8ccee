"""Online stateful reference generation.

The engine ticks at a fixed rate (default 50 Hz). Each tick:

1. forms the velocity target: rotate the user command into the robot
   frame, add the velocity residual, project onto the library hull;
2. if the target moved more than the deadband and enough of the step
   remains, splices and blends the active curve toward the gait
   interpolated at the new target;
3. advances the clock by exactly one tick period;
4. on crossing the end of the step, swaps stance, installs the mirrored
   gait interpolated at the current target, and resets the clock;
5. emits the reference sample: nominal joint positions from the active
   curve, velocities from its analytic derivative, plus the clamped joint
   residual.

States are immutable; tick returns a new state, so identical (state,
command) sequences always produce bit-identical sample streams. One
logical owner advances a state; samples are safe to share.

The emitted `phase` is the stride phase (t - t0)/T: it increases strictly
within a step and resets only at step events even when mid-step splices
re-anchor the internal rescaled phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .library import Gait, GaitLibrary, Stance, mirror_gait
from .transition import PhaseClock, TransitionCurve, make_transition


def rotate_command(v_user: tuple[float, float], heading: float) -> tuple[float, float]:
    """Rotate a planar velocity command by `heading` radians into the robot frame."""
    c = math.cos(heading)
    s = math.sin(heading)
    return (c * v_user[0] - s * v_user[1], s * v_user[0] + c * v_user[1])


@dataclass(frozen=True)
class EngineConfig:
    tick_period: float = 0.02
    deadband: float = 1e-4
    epsilon_splice: float = 0.05
    residual_bound: float = 0.3
    initial_stance: Stance = Stance.LEFT
    reblend_every_tick: bool = False
    impact_tolerance: float = 0.05

    def __post_init__(self) -> None:
        if self.tick_period <= 0.0:
            raise ValueError(f"tick_period must be > 0, got {self.tick_period}")
        if self.deadband < 0.0 or self.residual_bound <= 0.0:
            raise ValueError("deadband must be >= 0 and residual_bound > 0")
        if not 0.0 < self.epsilon_splice < 1.0:
            raise ValueError(f"epsilon_splice must lie in (0, 1), got {self.epsilon_splice}")


@dataclass(frozen=True)
class CommandInput:
    """One tick's worth of input: user velocity plus residual corrections."""

    v_user: tuple[float, float]
    heading: float = 0.0
    delta_v: tuple[float, float] = (0.0, 0.0)
    delta_q: np.ndarray | None = None

    def __post_init__(self) -> None:
        v = (float(self.v_user[0]), float(self.v_user[1]))
        dv = (float(self.delta_v[0]), float(self.delta_v[1]))
        h = float(self.heading)
        if not (all(map(math.isfinite, v)) and all(map(math.isfinite, dv)) and math.isfinite(h)):
            raise ValueError("non-finite command")
        object.__setattr__(self, "v_user", v)
        object.__setattr__(self, "delta_v", dv)
        object.__setattr__(self, "heading", h)
        if self.delta_q is not None:
            dq = np.asarray(self.delta_q, dtype=np.float64).copy()
            if dq.ndim != 1 or not np.all(np.isfinite(dq)):
                raise ValueError("non-finite or non-vector joint residual")
            dq.flags.writeable = False
            object.__setattr__(self, "delta_q", dq)


@dataclass(frozen=True)
class ReferenceSample:
    """One emitted reference tick, immutable and safe to share."""

    t: float
    q_des: np.ndarray
    qdot_des: np.ndarray
    q_nominal: np.ndarray
    phase: float
    stance: Stance
    step_index: int
    v_target: tuple[float, float]
    saturated: bool = False

    def __post_init__(self) -> None:
        for name in ("q_des", "qdot_des", "q_nominal"):
            arr = getattr(self, name)
            if arr.flags.writeable:
                arr = arr.copy()
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class EngineState:
    active: TransitionCurve
    clock: PhaseClock
    stance: Stance
    step_index: int
    last_target_velocity: tuple[float, float]
    config: EngineConfig
    impact_mismatch: float = 0.0


def gait_for_stance(lib: GaitLibrary, v: tuple[float, float], stance: Stance) -> Gait:
    """Interpolated gait tracking v for the given stance side.

    The library stores left-stance gaits; a right-stance step interpolates
    at the laterally mirrored velocity and mirrors the result, so the
    returned gait tracks v with the requested stance.
    """
    if stance is Stance.LEFT:
        return lib.interpolate(v)
    return mirror_gait(lib.interpolate((v[0], -v[1])), lib.mirror)


def init_engine(
    lib: GaitLibrary, v0: tuple[float, float], config: EngineConfig | None = None
) -> EngineState:
    """Fresh state at t = 0 tracking the gait interpolated at v0.

    v0 outside the velocity hull is projected onto it, like any command.
    """
    config = config or EngineConfig()
    gait = gait_for_stance(lib, (float(v0[0]), float(v0[1])), config.initial_stance)
    clock = PhaseClock.step_start(0.0, gait.step_duration)
    return EngineState(
        active=TransitionCurve.hold(gait, clock),
        clock=clock,
        stance=config.initial_stance,
        step_index=0,
        last_target_velocity=gait.velocity,
        config=config,
    )


def tick(
    state: EngineState, lib: GaitLibrary, cmd: CommandInput
) -> tuple[EngineState, ReferenceSample]:
    """Advance one tick period and emit the reference sample."""
    cfg = state.config
    if cmd.delta_q is None:
        delta_q = np.zeros(lib.n_outputs)
    else:
        delta_q = cmd.delta_q
        if delta_q.shape != (lib.n_outputs,):
            raise ValueError(
                f"joint residual has {delta_q.shape[0]} entries, library has "
                f"{lib.n_outputs} outputs"
            )

    active = state.active
    clock = state.clock
    stance = state.stance
    step_index = state.step_index
    last_v = state.last_target_velocity
    mismatch = state.impact_mismatch

    v_rot = rotate_command(cmd.v_user, cmd.heading)
    v_target = lib.clamp_velocity((v_rot[0] + cmd.delta_v[0], v_rot[1] + cmd.delta_v[1]))

    # Mid-step splice-and-blend toward the new target. Too close to the
    # step boundary the command is latched instead and applied at the next
    # step event (blending over a vanishing window produces unbounded
    # reference velocities).
    moved = math.hypot(v_target[0] - last_v[0], v_target[1] - last_v[1]) > cfg.deadband
    if (moved or cfg.reblend_every_tick) and clock.tau() < 1.0 - cfg.epsilon_splice:
        target = gait_for_stance(lib, v_target, stance)
        current_phase = clock.tau_hat()
        clock = clock.respliced(clock.t)
        active = make_transition(active.blended, target, clock, current_phase=current_phase)
        last_v = v_target

    clock = clock.advanced(cfg.tick_period)

    if clock.tau_hat() >= 1.0:
        # Step event: swap stance, install the mirrored interpolation at
        # the (possibly latched) target, restart the clock.
        end_pose = active.blended.eval(1.0)
        stance = stance.other
        step_index += 1
        gait = gait_for_stance(lib, v_target, stance)
        clock = PhaseClock.step_start(clock.t, gait.step_duration)
        active = TransitionCurve.hold(gait, clock)
        last_v = v_target
        # Reference-stream jump across the boundary; small for impact-
        # consistent libraries (the installed gait is already mirrored).
        mismatch = float(np.max(np.abs(gait.curve.eval(0.0) - end_pose)))

    u = clock.tau_hat()
    q_nominal = active.blended.eval(u)
    qdot_des = active.blended.eval_derivative(u, 1) / clock.window
    saturated = bool(np.any(np.abs(delta_q) > cfg.residual_bound))
    q_des = q_nominal + np.clip(delta_q, -cfg.residual_bound, cfg.residual_bound)

    # Stride phase; the event check above uses the tau_hat expression,
    # which can disagree with tau by one ulp right at the step end.
    phase = min(clock.tau(), 1.0)

    sample = ReferenceSample(
        t=clock.t,
        q_des=q_des,
        qdot_des=qdot_des,
        q_nominal=q_nominal,
        phase=phase,
        stance=stance,
        step_index=step_index,
        v_target=v_target,
        saturated=saturated,
    )
    new_state = replace(
        state,
        active=active,
        clock=clock,
        stance=stance,
        step_index=step_index,
        last_target_velocity=last_v,
        impact_mismatch=mismatch,
    )
    return new_state, sample


def tick_batch(
    states: list[EngineState], lib: GaitLibrary, cmds: list[CommandInput]
) -> tuple[list[EngineState], list[ReferenceSample]]:
    """Tick many independent states.

    Implemented as the sequential loop, which makes bitwise equivalence
    with per-state tick calls true by construction; states are immutable,
    so the batch shares no storage with its inputs.
    """
    if len(states) != len(cmds):
        raise ValueError(f"got {len(states)} states but {len(cmds)} commands")
    new_states: list[EngineState] = []
    samples: list[ReferenceSample] = []
    for state, cmd in zip(states, cmds):
        ns, sample = tick(state, lib, cmd)
        new_states.append(ns)
        samples.append(sample)
    return new_states, samples
