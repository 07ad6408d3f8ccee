"""Throughput measurement for the reference engine.

Before timing anything the bench proves that batched ticking is bitwise
identical to the sequential loop on a randomized probe; a mismatch aborts
with a diagnostic. Three numbers are reported:

* single_tick: one engine advanced in a Python loop;
* batch_tick: tick_batch over many independent states (per-sample rate);
* vector_sampling: reference samples (positions + velocities) produced by
  the batched matrix form of curve evaluation, the layout the coefficient
  representation exists for.
"""

from __future__ import annotations

import time

import numpy as np

from .engine import CommandInput, init_engine, tick, tick_batch
from .errors import BenchError
from .library import GaitLibrary

THROUGHPUT_TARGET = 100_000.0  # samples/s, engineering target for vector_sampling


def _random_commands(lib: GaitLibrary, rng: np.random.Generator, n: int) -> list[CommandInput]:
    pts = lib.velocities
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 0.2)
    cmds = []
    for _ in range(n):
        v = lo - 0.25 * span + rng.random(2) * 1.5 * span
        cmds.append(
            CommandInput(
                v_user=(float(v[0]), float(v[1])),
                heading=float(rng.uniform(-0.5, 0.5)),
                delta_v=(float(rng.uniform(-0.05, 0.05)), float(rng.uniform(-0.05, 0.05))),
                delta_q=rng.uniform(-0.2, 0.2, lib.n_outputs),
            )
        )
    return cmds


def _randomized_states(lib: GaitLibrary, rng: np.random.Generator, n: int) -> list:
    """Independent states desynchronized in phase, stance and target."""
    states = []
    for _ in range(n):
        cmds = _random_commands(lib, rng, 1 + int(rng.integers(0, 30)))
        state = init_engine(lib, cmds[0].v_user)
        for cmd in cmds:
            state, _ = tick(state, lib, cmd)
        states.append(state)
    return states


def _samples_equal(a, b) -> bool:
    return (
        a.t == b.t
        and a.phase == b.phase
        and a.step_index == b.step_index
        and a.stance is b.stance
        and a.v_target == b.v_target
        and a.saturated == b.saturated
        and np.array_equal(a.q_des, b.q_des)
        and np.array_equal(a.qdot_des, b.qdot_des)
        and np.array_equal(a.q_nominal, b.q_nominal)
    )


def run_bench(lib: GaitLibrary, batch_size: int = 1024, ticks: int = 2000, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)

    # Equivalence probe first; timing a wrong implementation is pointless.
    states = _randomized_states(lib, rng, batch_size)
    cmds = _random_commands(lib, rng, batch_size)
    _, batch_samples = tick_batch(states, lib, cmds)
    for i, (state, cmd) in enumerate(zip(states, cmds)):
        _, sample = tick(state, lib, cmd)
        if not _samples_equal(sample, batch_samples[i]):
            raise BenchError(
                f"batch/sequential equivalence probe failed at state {i}: "
                f"t={sample.t} vs {batch_samples[i].t}"
            )

    # Timing uses one fixed in-hull command for both paths so the numbers
    # compare like for like (the probe above already exercised the
    # irregular cases: out-of-hull clamping, residuals, splices).
    pts = lib.velocities
    center = pts.mean(axis=0)
    cmd = CommandInput(v_user=(float(center[0]), float(center[1])))

    state = init_engine(lib, cmd.v_user)
    t0 = time.perf_counter()
    for _ in range(ticks):
        state, _ = tick(state, lib, cmd)
    single_rate = ticks / (time.perf_counter() - t0)

    # Batched ticking over independent states.
    rounds = max(1, ticks // batch_size)
    hold = [cmd] * batch_size
    t0 = time.perf_counter()
    for _ in range(rounds):
        states, _ = tick_batch(states, lib, hold)
    batch_rate = rounds * batch_size / (time.perf_counter() - t0)

    # Matrix-form reference sampling: positions and velocities for a block
    # of phases in two matrix products.
    curve = state.active.blended
    window = state.clock.window
    phases = rng.random(200_000)
    t0 = time.perf_counter()
    q = curve.sample(phases)
    qdot = curve.sample_derivative(phases) / window
    vector_rate = len(phases) / (time.perf_counter() - t0)
    assert q.shape == qdot.shape  # keep both products live

    return {
        "probe_ok": True,
        "batch_size": batch_size,
        "single_tick_per_sec": single_rate,
        "batch_tick_per_sec": batch_rate,
        "vector_samples_per_sec": vector_rate,
        "throughput_target": THROUGHPUT_TARGET,
        "meets_target": vector_rate >= THROUGHPUT_TARGET,
    }
