"""
Command-line surface: ``run``, ``profile``, ``synth``, ``trace-dump`` and ``config``.

Exit codes: 0 success, 1 other failure, 2 configuration error, 3 a case failed.
"""

import argparse
import os

from slowpath.errors import ConfigError, SlowpathError
from slowpath.Engine.experiment import build_model, load_manifest, run_experiment
from slowpath.Engine.profiler import profile
from slowpath.Fusion.trace import read_trace_file
from slowpath.Logging.logger import error, info, success, warning
from slowpath.Meta.config import STRATEGIES, load_config, parse_config_text, serialize_config
from slowpath.Meta.version import about
from slowpath.Model.vocab import TOKENS
from slowpath.Signal.synth import (
    EventScript,
    active_regions,
    parse_event_script,
    short_time_energy,
    synth_event_audio,
)
from slowpath.Signal.waveform import read_wav, write_wav
from slowpath.TUI.box import Box
from slowpath.TUI.table import Table
from slowpath.TUI.text import Text

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CASE_FAILED = 3

PROFILE_SCRIPT = EventScript(1000.0, ((100.0, 150.0, "ring"), (500.0, 150.0, "ring")))
ENERGY_THRESHOLD = 1e-3


def _add_config_flags(parser):
    parser.add_argument("--config", default=None, help="key=value decoding configuration file (default: built-in defaults)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key, applied last (repeatable)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slowpath",
        description="Temporal contrastive decoding over toy and scripted audio-language models.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="store_true", help="show version information and exit")
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="decode an experiment manifest", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    run.add_argument("manifest", help="YAML experiment manifest")
    _add_config_flags(run)
    run.add_argument("--out", default=None, help="output directory (default: the manifest's output)")
    run.add_argument("--seed", type=int, default=None, help="seed for the noise reference (default: the manifest's seed)")
    run.add_argument(
        "--strategy",
        action="append",
        choices=STRATEGIES,
        default=None,
        help="strategy to compare, repeatable (default: the manifest's strategies)",
    )
    run.add_argument("--workers", type=int, default=None, help="parallel workers (default: the manifest's workers)")
    run.add_argument("--verbose", action="store_true", help="log every finished decode")

    prof = sub.add_parser("profile", help="latency and pass-count profile", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_config_flags(prof)
    prof.add_argument("--steps", type=int, default=100, help="decoding steps to time")
    prof.add_argument("--audio", default=None, help="WAV file or event script (default: two ring events)")
    prof.add_argument("--prompt", default="how many ring ?", help="prompt text")
    prof.add_argument("--weights", default=None, help="toy weight fixture (default: seeded toy model)")

    synth = sub.add_parser("synth", help="render an event script to WAV", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    synth.add_argument("script", help="event script file")
    synth.add_argument("output", help="output WAV path")

    dump = sub.add_parser("trace-dump", help="pretty-print a trace file", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    dump.add_argument("trace", help="trace file written by 'run'")

    conf = sub.add_parser("config", help="print the effective configuration", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_config_flags(conf)
    return parser


def _load_audio(path):
    if path is None:
        return synth_event_audio(PROFILE_SCRIPT)
    if path.lower().endswith(".wav"):
        return read_wav(path)
    with open(path, "r", encoding="utf-8") as f:
        return synth_event_audio(parse_event_script(f.read()))


def cmd_run(args):
    manifest = load_manifest(args.manifest)
    if args.strategy:
        manifest.strategies = list(dict.fromkeys(args.strategy))
    overrides = dict(manifest.overrides)
    overrides.setdefault("seed", manifest.seed)
    if args.seed is not None:
        overrides["seed"] = args.seed
    overrides.update(parse_config_text("\n".join(args.overrides), "<flags>"))
    config = load_config(args.config or manifest.config_path, overrides)

    report = run_experiment(manifest, config=config, output=args.out, workers=args.workers, verbose=args.verbose)
    print(report.render(), end="")
    return EXIT_CASE_FAILED if report.failed else EXIT_OK


def cmd_profile(args):
    config = load_config(args.config, args.overrides)
    if args.weights:
        model = build_model({"backend": "toy", "weights": args.weights})
    else:
        model = build_model({"backend": "toy"})
    report = profile(model, _load_audio(args.audio), args.prompt, config, args.steps)
    print(report.render())
    return EXIT_OK


def cmd_synth(args):
    with open(args.script, "r", encoding="utf-8") as f:
        script = parse_event_script(f.read())
    x = synth_event_audio(script)
    write_wav(args.output, x)
    regions = active_regions(short_time_energy(x), ENERGY_THRESHOLD)
    counts = ", ".join(f"{cls}={script.count(cls)}" for cls in sorted({e.event_class for e in script.events}))
    success(f"Wrote {len(x)} samples ({x.duration_ms:.0f} ms) to {args.output}")
    info(f"{len(script.events)} events ({counts or 'none'}), {regions} active regions")
    if regions != len(script.events):
        warning(f"{regions} active regions for {len(script.events)} events")
    return EXIT_OK


def _token_name(token):
    return TOKENS[token] if 0 <= token < len(TOKENS) else str(token)


def cmd_trace_dump(args):
    header, traces = read_trace_file(args.trace)
    lines = [f"{key} = {value}" for key, value in header.items()]
    for line in Box(style="double", title=os.path.basename(args.trace)).draw(lines):
        print(line)

    table = Table(["step", "r_t", "entropy", "gate", "|omega|", "moved", "max bias", "token", "baseline"])
    for trace in traces:
        bias = max(trace.applied_bias.values(), default=0.0)
        token = _token_name(trace.chosen_token)
        if trace.chosen_token != trace.baseline_token:
            token = Text.style(token, color="yellow", bold=True)
        table.add_row(
            [
                trace.step_index,
                trace.r_t,
                trace.entropy_hat,
                trace.gate,
                len(trace.candidate_ids),
                len(trace.changed_ids),
                bias,
                token,
                _token_name(trace.baseline_token),
            ]
        )
    print(table)
    return EXIT_OK


def cmd_config(args):
    print(serialize_config(load_config(args.config, args.overrides)), end="")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "profile": cmd_profile,
    "synth": cmd_synth,
    "trace-dump": cmd_trace_dump,
    "config": cmd_config,
}


def run_cli(argv=None):
    """
    Parse ``argv`` and dispatch to a subcommand.

    Returns:
        Process exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        about()
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_FAILURE

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        error(f"Configuration error: {e}", use_box=True)
        return EXIT_CONFIG
    except (SlowpathError, OSError) as e:
        error(f"{args.command} failed: {e}")
        return EXIT_FAILURE
