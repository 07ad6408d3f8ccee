"""Splice-and-blend transitions between reference curves.

When the commanded velocity changes mid-step, the currently tracked curve
and the new target curve are both cut at the current phase, the remaining
tails are re-parameterized onto a rescaled phase over what is left of the
step, and the two tails are merged into one transition curve: the first
three control columns come from the current tail (pinning value, first
and second derivative at the start), the last three from the target tail
(same at the end), and the interior columns are averaged. The result
leaves the current reference with C2 continuity and lands exactly on the
target's end-of-step pose.

All functions here are pure over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bezier import BezierCurve
from .library import Gait


@dataclass(frozen=True)
class PhaseClock:
    """Step timing: stride start t0, splice time t1, step duration T, time t.

    tau is the stride phase (t - t0)/T. tau_hat rescales the remainder of
    the step after a splice, mapping [t1, t0 + T] onto [0, 1]; its
    denominator is written (t0 + T) - t1 so that tau_hat is exactly 0 at
    t1 and exactly 1 at t0 + T.
    """

    t0: float
    t1: float
    T: float
    t: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"step duration must be finite and > 0, got {self.T}")
        if not self.t0 <= self.t1 < self.t0 + self.T:
            raise ValueError(
                f"splice time must satisfy t0 <= t1 < t0 + T, got t0={self.t0}, "
                f"t1={self.t1}, T={self.T}"
            )
        if not self.t >= self.t1:
            raise ValueError(f"current time {self.t} precedes splice time {self.t1}")

    @classmethod
    def step_start(cls, t: float, T: float) -> "PhaseClock":
        return cls(t0=t, t1=t, T=T, t=t)

    @property
    def t_end(self) -> float:
        return self.t0 + self.T

    @property
    def window(self) -> float:
        """Wall-clock duration the rescaled phase spans: (t0 + T) - t1."""
        return (self.t0 + self.T) - self.t1

    def tau(self, t: float | None = None) -> float:
        t = self.t if t is None else t
        return (t - self.t0) / self.T

    def tau_hat(self, t: float | None = None) -> float:
        t = self.t if t is None else t
        return (t - self.t1) / ((self.t0 + self.T) - self.t1)

    def advanced(self, dt: float) -> "PhaseClock":
        return replace(self, t=self.t + dt)

    def respliced(self, t1: float) -> "PhaseClock":
        return replace(self, t1=t1)


def splice_tail(curve: BezierCurve, tau1: float) -> BezierCurve:
    """Remaining segment of `curve` from phase tau1, re-parameterized to [0, 1].

    tau1 = 0 returns the curve unchanged; tau1 >= 1 is an error (no step
    time remains, the caller must defer to the next step boundary).
    """
    if not 0.0 <= tau1 < 1.0:
        raise ValueError(f"splice phase must lie in [0, 1), got {tau1!r}")
    if tau1 == 0.0:
        return curve
    return curve.split(tau1)[1]


def blend(alpha1: BezierCurve, alpha2: BezierCurve) -> BezierCurve:
    """Merge two equal-shape curves into one smooth transition curve.

    Control columns 0..2 are copied from alpha1, columns b-2..b from
    alpha2, and every interior column 3..b-3 is the elementwise average
    (for degree 7 that averages exactly columns 3 and 4). Degree must be
    at least 7 so the kept boundary blocks leave an interior.
    """
    if alpha1.coeffs.shape != alpha2.coeffs.shape:
        raise ValueError(
            f"blend needs equal shapes, got {alpha1.coeffs.shape} and {alpha2.coeffs.shape}"
        )
    b = alpha1.degree
    if b < 7:
        raise ValueError(f"blend needs degree >= 7, got {b}")
    out = alpha1.coeffs.copy()
    out[:, 3 : b - 2] = 0.5 * (alpha1.coeffs[:, 3 : b - 2] + alpha2.coeffs[:, 3 : b - 2])
    out[:, b - 2 :] = alpha2.coeffs[:, b - 2 :]
    return BezierCurve(out)


@dataclass(frozen=True)
class TransitionCurve:
    """Currently tracked (possibly blended) curve and its phase mapping.

    `clock` is the snapshot taken when the curve was installed; its
    (t0, t1, T) triple defines the tau_hat domain the curve is evaluated
    in. `blended` carries the full reference; the two tails are kept for
    continuity checks and diagnostics.
    """

    blended: BezierCurve
    source_tail: BezierCurve
    target_tail: BezierCurve
    clock: PhaseClock
    target_velocity: tuple[float, float]

    def __post_init__(self) -> None:
        shape = self.blended.coeffs.shape
        if self.source_tail.coeffs.shape != shape or self.target_tail.coeffs.shape != shape:
            raise ValueError("blended, source and target curves must share shape")
        if not np.array_equal(self.blended.coeffs[:, 0], self.source_tail.coeffs[:, 0]):
            raise ValueError("blended curve must start at the source tail's first column")
        if not np.array_equal(self.blended.coeffs[:, -1], self.target_tail.coeffs[:, -1]):
            raise ValueError("blended curve must end at the target tail's last column")
        object.__setattr__(
            self,
            "target_velocity",
            (float(self.target_velocity[0]), float(self.target_velocity[1])),
        )

    @classmethod
    def hold(cls, gait: Gait, clock: PhaseClock) -> "TransitionCurve":
        """Track a single gait with no blending (used at init and step events)."""
        return cls(
            blended=gait.curve,
            source_tail=gait.curve,
            target_tail=gait.curve,
            clock=clock,
            target_velocity=gait.velocity,
        )

    def eval(self, tau_hat: float) -> np.ndarray:
        return self.blended.eval(tau_hat)

    def eval_derivative(self, tau_hat: float, order: int = 1) -> np.ndarray:
        return self.blended.eval_derivative(tau_hat, order)


def make_transition(
    current: BezierCurve,
    target_gait: Gait,
    clock: PhaseClock,
    current_phase: float | None = None,
) -> TransitionCurve:
    """Cut the current and target curves at the splice time and blend them.

    The target gait is always cut at the stride phase tau(t1). By default
    the current curve is cut at the same phase (it is the full nominal
    curve); when re-blending an already-spliced reference, pass
    `current_phase` so the active curve is cut at its own rescaled phase
    instead, keeping the emitted reference continuous.
    """
    s_target = clock.tau(clock.t1)
    if not 0.0 <= s_target < 1.0:
        raise ValueError(
            f"no step time remains at tau(t1) = {s_target}; defer to the next step"
        )
    s_current = s_target if current_phase is None else current_phase
    source_tail = splice_tail(current, s_current)
    target_tail = splice_tail(target_gait.curve, s_target)
    return TransitionCurve(
        blended=blend(source_tail, target_tail),
        source_tail=source_tail,
        target_tail=target_tail,
        clock=clock,
        target_velocity=target_gait.velocity,
    )
