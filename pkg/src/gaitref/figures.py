"""Render report figures next to the delimited outputs.

Matplotlib is imported lazily and forced onto the Agg backend: figures go
to files, never to a display.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .engine import ReferenceSample
from .library import GaitLibrary


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_trace_figures(samples: Sequence[ReferenceSample], out_base: str | Path) -> list[Path]:
    """Joint, velocity-target and phase figures for a streamed trace.

    Files are written as <out_base>_joints.png, _velocity.png, _phase.png.
    """
    plt = _pyplot()
    out_base = Path(out_base)
    t = np.array([s.t for s in samples])
    q_nom = np.stack([s.q_nominal for s in samples])
    q_des = np.stack([s.q_des for s in samples])
    paths = []

    fig, ax = plt.subplots(figsize=(9, 5))
    for j in range(q_nom.shape[1]):
        (line,) = ax.plot(t, q_nom[:, j], lw=1.0, label=f"joint {j}")
        ax.plot(t, q_des[:, j], lw=0.6, ls="--", color=line.get_color())
    ax.set_xlabel("time [s]")
    ax.set_ylabel("joint reference [rad]")
    ax.set_title("nominal (solid) and residual-corrected (dashed) references")
    ax.legend(fontsize=7, ncol=2, loc="upper right")
    ax.grid(alpha=0.3)
    paths.append(_save(fig, out_base.with_name(out_base.name + "_joints.png")))

    fig, ax = plt.subplots(figsize=(9, 3.2))
    v = np.array([s.v_target for s in samples])
    ax.plot(t, v[:, 0], label="v_target_x")
    ax.plot(t, v[:, 1], label="v_target_y")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("velocity target [m/s]")
    ax.legend()
    ax.grid(alpha=0.3)
    paths.append(_save(fig, out_base.with_name(out_base.name + "_velocity.png")))

    fig, ax = plt.subplots(figsize=(9, 3.2))
    ax.plot(t, [s.phase for s in samples], lw=0.8, label="phase")
    ax2 = ax.twinx()
    ax2.step(t, [s.step_index for s in samples], where="post", color="tab:red", lw=0.8, label="step index")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("stride phase")
    ax2.set_ylabel("step index")
    ax.grid(alpha=0.3)
    paths.append(_save(fig, out_base.with_name(out_base.name + "_phase.png")))
    return paths


def render_library_figure(lib: GaitLibrary, out_path: str | Path) -> Path:
    """Velocity-space scatter of the library nodes with triangulation edges."""
    plt = _pyplot()
    pts = lib.velocities
    fig, ax = plt.subplots(figsize=(6, 5))
    for tri in lib.triangulation:
        loop = list(tri) + [tri[0]]
        ax.plot(pts[loop, 0], pts[loop, 1], color="0.6", lw=0.7, zorder=1)
    ax.scatter(pts[:, 0], pts[:, 1], s=18, color="tab:blue", zorder=2)
    ax.set_xlabel("v_x [m/s]")
    ax.set_ylabel("v_y [m/s]")
    ax.set_title(f"{len(lib.gaits)} gaits, {len(lib.triangulation)} triangles")
    ax.grid(alpha=0.3)
    return _save(fig, Path(out_path))


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    import matplotlib.pyplot as plt

    plt.close(fig)
    return path
