"""Command-line entry point: gen, stream, serve, bench.

Commands exit 0 on success. Input/spec problems exit 2, runtime failures
exit 1; both print a single machine-parsable line
``error: <category>: <detail>`` to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import THROUGHPUT_TARGET, run_bench
from .engine import EngineConfig, init_engine, rotate_command, tick
from .errors import ConfigError, GaitRefError, SchemaError, ScriptError
from .io import SyntheticSpec, generate_synthetic, load, save, validate
from .library import Stance
from .script import CommandScript
from .tracking import PDGains, PlantState, run_closed_loop
from .traces import write_trace_csv

_USAGE_ERRORS = (SchemaError, ScriptError, ConfigError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitref",
        description="Continuous Bezier gait-library reference engine.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic gait library from a spec file")
    gen.add_argument("spec", help="JSON generation spec (see docs/file_formats.md)")
    gen.add_argument("--out", required=True, help="library file to write")
    gen.add_argument("--figures", action="store_true", help="render the velocity-space figure next to the library")

    stream = sub.add_parser("stream", help="run the engine over a command script, write a CSV trace")
    stream.add_argument("--library", required=True)
    stream.add_argument("--script", required=True, help="command script CSV")
    stream.add_argument("--out", required=True, help="trace CSV to write")
    stream.add_argument("--duration", type=float, default=None, help="run length in seconds (default: last script time)")
    stream.add_argument("--plant", action="store_true", help="also run the PD-tracked test plant; writes <out>_plant.csv")
    stream.add_argument("--gains", default="40,12.6", help="PD gains as 'kp,kd' (with --plant)")
    stream.add_argument("--figures", action="store_true", help="render trace figures next to the CSV")
    _add_engine_flags(stream)

    serve = sub.add_parser("serve", help="serve reference samples over the line protocol")
    serve.add_argument("--library", required=True)
    serve.add_argument("--port", type=int, required=True)
    serve.add_argument("--host", default="127.0.0.1")
    _add_engine_flags(serve)

    bench = sub.add_parser("bench", help="measure tick throughput (JSON-lines report)")
    bench.add_argument("--library", required=True)
    bench.add_argument("--batch", type=int, default=1024)
    bench.add_argument("--ticks", type=int, default=2000)
    return parser


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rate", type=float, default=50.0, help="engine rate in Hz (default 50)")
    parser.add_argument("--deadband", type=float, default=1e-4, help="velocity deadband in m/s before re-blending")
    parser.add_argument("--epsilon-splice", type=float, default=0.05, help="defer splices once this close to the step end")
    parser.add_argument("--residual-bound", type=float, default=0.3, help="joint residual clamp in rad")
    parser.add_argument("--initial-stance", choices=("L", "R"), default="L")


def _engine_config(args) -> EngineConfig:
    try:
        return EngineConfig(
            tick_period=1.0 / args.rate,
            deadband=args.deadband,
            epsilon_splice=args.epsilon_splice,
            residual_bound=args.residual_bound,
            initial_stance=Stance(args.initial_stance),
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from None


def _cmd_gen(args) -> int:
    spec = SyntheticSpec.from_file(args.spec)
    lib = generate_synthetic(spec)
    out = save(lib, args.out)
    report = validate(lib)
    print(report.to_json())
    if args.figures:
        from .figures import render_library_figure

        fig = render_library_figure(lib, out.with_suffix(".png"))
        print(f"figure: {fig}", file=sys.stderr)
    print(f"wrote {out} ({len(lib.gaits)} gaits)", file=sys.stderr)
    return 0


def _cmd_stream(args) -> int:
    lib = load(args.library)
    script = CommandScript.from_csv(args.script)
    if script.n_residuals not in (0, lib.n_outputs):
        raise ScriptError(
            f"script carries {script.n_residuals} joint residuals but the library "
            f"has {lib.n_outputs} outputs"
        )
    duration = script.duration if args.duration is None else args.duration
    if duration <= 0.0:
        raise ConfigError("run duration must be > 0; pass --duration or a script ending later")
    config = _engine_config(args)
    cmd0 = script.command_at(0.0)
    v_rot = rotate_command(cmd0.v_user, cmd0.heading)
    state = init_engine(lib, (v_rot[0] + cmd0.delta_v[0], v_rot[1] + cmd0.delta_v[1]), config)

    if args.plant:
        kp, kd = _parse_gains(args.gains)
        gains = PDGains.uniform(lib.n_outputs, kp, kd)
        sample0 = state.active.eval(0.0)
        trace = run_closed_loop(
            state, lib, PlantState.at_rest(sample0), gains, duration, script
        )
        samples = trace.samples
        plant_path = Path(args.out).with_name(Path(args.out).stem + "_plant.csv")
        trace.write_csv(plant_path)
        print(f"wrote {plant_path}", file=sys.stderr)
    else:
        n_ticks = int(round(duration * args.rate))
        samples = []
        for _ in range(n_ticks):
            state, sample = tick(state, lib, script.command_at(state.clock.t))
            samples.append(sample)

    out = write_trace_csv(samples, args.out)
    print(f"wrote {out} ({len(samples)} ticks)", file=sys.stderr)
    if args.figures:
        from .figures import render_trace_figures

        for fig in render_trace_figures(samples, out.with_suffix("")):
            print(f"figure: {fig}", file=sys.stderr)
    return 0


def _parse_gains(text: str) -> tuple[float, float]:
    try:
        kp, kd = (float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"--gains must be 'kp,kd', got {text!r}") from None
    return kp, kd


def _cmd_serve(args) -> int:
    from .server import serve

    lib = load(args.library)
    config = _engine_config(args)
    print(f"serving {args.library} on {args.host}:{args.port}", file=sys.stderr)
    serve(lib, args.host, args.port, config)
    return 0


def _cmd_bench(args) -> int:
    lib = load(args.library)
    result = run_bench(lib, batch_size=args.batch, ticks=args.ticks)
    for mode in ("single_tick", "batch_tick", "vector_samples"):
        print(json.dumps({"mode": mode, "per_sec": result[f"{mode}_per_sec"]}))
    print(json.dumps({"mode": "summary", **result}))
    if not result["meets_target"]:
        print(
            f"warning: vector sampling {result['vector_samples_per_sec']:.0f}/s is below "
            f"the {THROUGHPUT_TARGET:.0f}/s engineering target (performance regression, "
            "not a correctness failure)",
            file=sys.stderr,
        )
    return 0


_HANDLERS = {"gen": _cmd_gen, "stream": _cmd_stream, "serve": _cmd_serve, "bench": _cmd_bench}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 2
    except GaitRefError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
