"""Newline-delimited reference streaming server.

The robot side is the client and paces the exchange: it opens a TCP
connection, handshakes, then sends one request line per control tick and
reads one response line back, mirroring a client-initiated sensor/target
exchange at a fixed rate.

Protocol (version 1, all lines '\\n'-terminated text):

* handshake: client sends ``HELLO <version>``; the server answers
  ``OK <n_outputs> <rate_hz>`` or ``ERR protocol-version ...`` and closes.
* request: flat numeric record ``t v_x v_y heading dv_x dv_y dq_0 ...
  dq_{n-1}`` (6 + n_outputs floats; the timestamp is echoed back as the
  client's, pacing is per-request regardless of its value).
* response: the reference sample in trace column order, space-separated
  (see traces.trace_header). Malformed requests get a single
  ``ERR <category> <detail>`` line and the connection stays open.

One client at a time; a dropped connection discards the session's engine
state, so the next client starts from the idle (zero-velocity) reference.
"""

from __future__ import annotations

import socketserver

import numpy as np

from .engine import CommandInput, EngineConfig, init_engine, tick
from .library import GaitLibrary
from .traces import sample_fields

PROTOCOL_VERSION = 1


def parse_request(line: str, n_outputs: int) -> tuple[float, CommandInput]:
    """Decode one request line; raises ValueError with a short reason."""
    parts = line.split()
    expected = 6 + n_outputs
    if len(parts) != expected:
        raise ValueError(f"expected {expected} fields, got {len(parts)}")
    try:
        values = [float(x) for x in parts]
    except ValueError:
        raise ValueError("non-numeric field") from None
    cmd = CommandInput(
        v_user=(values[1], values[2]),
        heading=values[3],
        delta_v=(values[4], values[5]),
        delta_q=np.array(values[6:]),
    )
    return values[0], cmd


def format_response(sample) -> str:
    return " ".join(sample_fields(sample))


class _SessionHandler(socketserver.StreamRequestHandler):
    def _send(self, line: str) -> None:
        self.wfile.write((line + "\n").encode("ascii"))

    def handle(self) -> None:
        server: ReferenceServer = self.server
        hello = self.rfile.readline().decode("ascii", "replace").strip()
        parts = hello.split()
        if len(parts) != 2 or parts[0] != "HELLO" or not parts[1].isdigit():
            self._send("ERR handshake expected 'HELLO <version>'")
            return
        if int(parts[1]) != PROTOCOL_VERSION:
            self._send(f"ERR protocol-version server speaks {PROTOCOL_VERSION}")
            return
        self._send(f"OK {server.lib.n_outputs} {1.0 / server.config.tick_period:g}")

        # Fresh engine per session: the idle reference at zero velocity.
        state = init_engine(server.lib, (0.0, 0.0), server.config)
        for raw in self.rfile:
            line = raw.decode("ascii", "replace").strip()
            if not line:
                continue
            try:
                _, cmd = parse_request(line, server.lib.n_outputs)
            except ValueError as exc:
                self._send(f"ERR malformed-request {exc}")
                continue
            state, sample = tick(state, server.lib, cmd)
            self._send(format_response(sample))


class ReferenceServer(socketserver.TCPServer):
    """Single-client TCP server around one reference engine."""

    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], lib: GaitLibrary, config: EngineConfig | None = None):
        self.lib = lib
        self.config = config or EngineConfig()
        super().__init__(address, _SessionHandler)


def serve(lib: GaitLibrary, host: str, port: int, config: EngineConfig | None = None) -> None:
    """Serve until interrupted."""
    with ReferenceServer((host, port), lib, config) as server:
        server.serve_forever()
