"""Joint-level PD tracking against a per-joint double-integrator plant.

Demonstrates the full data path: 50 Hz reference samples held zero-order
while an inner PD loop runs at an integer multiple of the engine rate
(default 40x = 2000 Hz). The plant is deliberately simple - decoupled
double integrators stepped with semi-implicit Euler - so the loop has
closed-form oracles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import CommandInput, EngineState, ReferenceSample, tick
from .errors import ConfigError
from .library import GaitLibrary


def _as_vector(x, n: int, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"{name} must be a scalar or length-{n} vector, got {arr.shape}")
    return arr


@dataclass(frozen=True)
class PDGains:
    kp: np.ndarray
    kd: np.ndarray
    torque_limit: np.ndarray

    def __post_init__(self) -> None:
        kp = np.asarray(self.kp, dtype=np.float64)
        kd = _as_vector(self.kd, len(kp), "kd")
        limit = _as_vector(self.torque_limit, len(kp), "torque_limit")
        if np.any(kp < 0.0) or np.any(kd < 0.0):
            raise ValueError("gains must be non-negative")
        if np.any(limit <= 0.0):
            raise ValueError("torque limits must be positive")
        for arr in (kp, kd, limit):
            arr.flags.writeable = False
        object.__setattr__(self, "kp", kp)
        object.__setattr__(self, "kd", kd)
        object.__setattr__(self, "torque_limit", limit)

    @classmethod
    def uniform(cls, n: int, kp: float, kd: float, torque_limit: float = 1e3) -> "PDGains":
        return cls(np.full(n, kp), np.full(n, kd), np.full(n, torque_limit))

    @classmethod
    def critically_damped(
        cls, n: int, kp: float, inertia: float, torque_limit: float = 1e3
    ) -> "PDGains":
        """kd = 2 sqrt(kp * inertia): no overshoot on the double integrator."""
        return cls.uniform(n, kp, 2.0 * np.sqrt(kp * inertia), torque_limit)


@dataclass(frozen=True)
class PlantState:
    q: np.ndarray
    qdot: np.ndarray
    inertia: np.ndarray

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=np.float64)
        qdot = _as_vector(self.qdot, len(q), "qdot")
        inertia = _as_vector(self.inertia, len(q), "inertia")
        if np.any(inertia <= 0.0):
            raise ValueError("inertia must be positive")
        for arr in (q, qdot, inertia):
            arr.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qdot)
        object.__setattr__(self, "inertia", inertia)

    @classmethod
    def at_rest(cls, q0: np.ndarray, inertia: float = 1.0) -> "PlantState":
        q0 = np.asarray(q0, dtype=np.float64)
        return cls(q0, np.zeros_like(q0), np.full(len(q0), inertia))


def pd_torque(
    gains: PDGains, sample: ReferenceSample, q: np.ndarray, qdot: np.ndarray
) -> np.ndarray:
    """Saturated PD law: clamp(kp (q_des - q) + kd (qdot_des - qdot))."""
    raw = gains.kp * (sample.q_des - q) + gains.kd * (sample.qdot_des - qdot)
    return np.clip(raw, -gains.torque_limit, gains.torque_limit)


def plant_step(state: PlantState, torque: np.ndarray, dt: float) -> PlantState:
    """Semi-implicit Euler: velocity first, then position with the new velocity."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    qdot = state.qdot + (torque / state.inertia) * dt
    q = state.q + qdot * dt
    return PlantState(q=q, qdot=qdot, inertia=state.inertia)


_TRACE_BLOCKS = ("q_des", "q", "qdot_des", "qdot", "torque")


@dataclass(frozen=True)
class ClosedLoopTrace:
    """Inner-loop time series plus the engine samples that drove it."""

    t: np.ndarray
    q_des: np.ndarray
    q: np.ndarray
    qdot_des: np.ndarray
    qdot: np.ndarray
    torque: np.ndarray
    samples: tuple[ReferenceSample, ...]

    @property
    def n_joints(self) -> int:
        return self.q.shape[1]

    def tracking_rms(self, after: float = 0.0) -> float:
        """RMS of q - q_des over all joints for t >= after."""
        mask = self.t >= after
        err = self.q[mask] - self.q_des[mask]
        return float(np.sqrt(np.mean(err**2)))

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        n = self.n_joints
        header = ["t"]
        for block in _TRACE_BLOCKS:
            header += [f"{block}_{j}" for j in range(n)]
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(len(self.t)):
                row = [repr(float(self.t[i]))]
                for block in _TRACE_BLOCKS:
                    row += [repr(float(x)) for x in getattr(self, block)[i]]
                writer.writerow(row)
        return path


def run_closed_loop(
    state: EngineState,
    lib: GaitLibrary,
    plant: PlantState,
    gains: PDGains,
    duration: float,
    commands,
    inner_rate: float = 2000.0,
) -> ClosedLoopTrace:
    """Run the engine at its tick rate with an inner PD loop at `inner_rate`.

    `commands` is a CommandInput (held constant), an object with a
    ``command_at(t)`` method, or a callable t -> CommandInput. The inner
    rate must be an integer multiple of the engine rate; the reference is
    held zero-order between engine ticks.
    """
    ratio = inner_rate * state.config.tick_period
    n_sub = int(round(ratio))
    if n_sub < 1 or abs(ratio - n_sub) > 1e-9:
        raise ConfigError(
            f"inner rate {inner_rate} Hz is not an integer multiple of the engine "
            f"rate {1.0 / state.config.tick_period:g} Hz"
        )
    if isinstance(commands, CommandInput):
        resolve = lambda t: commands  # noqa: E731
    elif hasattr(commands, "command_at"):
        resolve = commands.command_at
    else:
        resolve = commands

    inner_dt = state.config.tick_period / n_sub
    n_ticks = int(round(duration / state.config.tick_period))
    n_rows = n_ticks * n_sub
    n = lib.n_outputs
    t_arr = np.empty(n_rows)
    blocks = {name: np.empty((n_rows, n)) for name in _TRACE_BLOCKS}
    samples: list[ReferenceSample] = []

    row = 0
    for _ in range(n_ticks):
        t_tick = state.clock.t
        state, sample = tick(state, lib, resolve(t_tick))
        samples.append(sample)
        for k in range(n_sub):
            torque = pd_torque(gains, sample, plant.q, plant.qdot)
            plant = plant_step(plant, torque, inner_dt)
            t_arr[row] = t_tick + (k + 1) * inner_dt
            blocks["q_des"][row] = sample.q_des
            blocks["q"][row] = plant.q
            blocks["qdot_des"][row] = sample.qdot_des
            blocks["qdot"][row] = plant.qdot
            blocks["torque"][row] = torque
            row += 1

    return ClosedLoopTrace(t=t_arr, samples=tuple(samples), **blocks)
