"""Reference-trace encoding shared by the stream CLI and the wire protocol.

Column order is fixed: t, step_index, stance, phase, v_target_x,
v_target_y, then q_des[0..n), qdot_des[0..n), q_nominal[0..n). Floats are
written in shortest round-trip form, so identical runs produce byte-
identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from .engine import ReferenceSample


def trace_header(n_outputs: int) -> list[str]:
    header = ["t", "step_index", "stance", "phase", "v_target_x", "v_target_y"]
    for block in ("q_des", "qdot_des", "q_nominal"):
        header += [f"{block}_{j}" for j in range(n_outputs)]
    return header


def sample_fields(sample: ReferenceSample) -> list[str]:
    fields = [
        repr(float(sample.t)),
        str(int(sample.step_index)),
        sample.stance.value,
        repr(float(sample.phase)),
        repr(float(sample.v_target[0])),
        repr(float(sample.v_target[1])),
    ]
    for block in (sample.q_des, sample.qdot_des, sample.q_nominal):
        fields += [repr(float(x)) for x in block]
    return fields


def write_trace_csv(samples: Sequence[ReferenceSample], path: str | Path) -> Path:
    path = Path(path)
    if not samples:
        raise ValueError("no samples to write")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace_header(len(samples[0].q_des)))
        for sample in samples:
            writer.writerow(sample_fields(sample))
    return path
