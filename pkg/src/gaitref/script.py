"""Command scripts: piecewise-constant schedules driving reproducible runs.

CSV format (docs/file_formats.md): header
``t,v_x,v_y,heading,dv_x,dv_y[,dq_0,...,dq_{n-1}]`` with rows sorted by
strictly increasing t and the first row at t = 0. The residual columns
are optional as a group; when present their count must match the
library's output count.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import CommandInput
from .errors import ScriptError

BASE_COLUMNS = ("t", "v_x", "v_y", "heading", "dv_x", "dv_y")


@dataclass(frozen=True)
class CommandScript:
    times: np.ndarray
    commands: tuple[CommandInput, ...]

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1 or len(times) != len(self.commands) or len(times) == 0:
            raise ScriptError("script needs matching, non-empty times and commands")
        if times[0] != 0.0:
            raise ScriptError(f"first script row must be at t = 0, got t = {times[0]}")
        if np.any(np.diff(times) <= 0.0):
            raise ScriptError("script times must be strictly increasing")
        times = times.copy()
        times.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "commands", tuple(self.commands))

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @property
    def n_residuals(self) -> int:
        dq = self.commands[0].delta_q
        return 0 if dq is None else len(dq)

    def command_at(self, t: float) -> CommandInput:
        """Active command at time t (the last row with row time <= t)."""
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.commands[max(idx, 0)]

    @classmethod
    def from_rows(cls, rows: list[tuple[float, CommandInput]]) -> "CommandScript":
        times = np.array([r[0] for r in rows], dtype=np.float64)
        return cls(times, tuple(r[1] for r in rows))

    @classmethod
    def from_csv(cls, path: str | Path) -> "CommandScript":
        path = Path(path)
        try:
            with path.open(newline="") as fh:
                reader = csv.reader(fh)
                try:
                    header = [h.strip() for h in next(reader)]
                except StopIteration:
                    raise ScriptError(f"{path}: empty script") from None
                if tuple(header[: len(BASE_COLUMNS)]) != BASE_COLUMNS:
                    raise ScriptError(
                        f"{path}: header must start with {','.join(BASE_COLUMNS)}, "
                        f"got {','.join(header)}"
                    )
                n_dq = len(header) - len(BASE_COLUMNS)
                times = []
                commands = []
                for lineno, row in enumerate(reader, start=2):
                    if not row:
                        continue
                    if len(row) != len(header):
                        raise ScriptError(
                            f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                        )
                    try:
                        values = [float(x) for x in row]
                    except ValueError as exc:
                        raise ScriptError(f"{path}:{lineno}: {exc}") from None
                    times.append(values[0])
                    dq = np.array(values[6:]) if n_dq else None
                    commands.append(
                        CommandInput(
                            v_user=(values[1], values[2]),
                            heading=values[3],
                            delta_v=(values[4], values[5]),
                            delta_q=dq,
                        )
                    )
        except OSError as exc:
            raise ScriptError(f"cannot read script {path}: {exc}") from None
        if not times:
            raise ScriptError(f"{path}: script has a header but no rows")
        return cls(np.array(times), tuple(commands))
