"""Command-line front end.

Four subcommands: `verify` sweeps the whole catalog (or a selection) for
violations with ascent off, `falsify` hunts with local ascent on, `equality`
round-trips constructed equality instances through the certificate solvers,
and `moore-complex` runs the complex-premise transfer experiment.

Output is JSON Lines on stdout (or the --out file): record lines first, then
exactly one run manifest as the final stdout line.  Floats are serialized
with 17 significant digits so every value round-trips bit-exactly; the two
timestamp fields are the only bytes that differ between identical runs.

Exit codes: 0 pass, 1 usage error, 2 confirmed violation or failed equality
round-trip, 3 experimental counterexample finding (moore-complex only).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from .catalog import CATALOG, CATALOG_VERSION, catalog_names, instance_digest
from .equality import EQUALITY_BUILDERS, builder_space
from .falsifier import (
    FieldChoice,
    GramKind,
    SearchConfig,
    Verdict,
    _trial_rng,
    falsify,
    moore_complex_experiment,
    sample_instance,
)
from .spaces import DomainError, Field


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: SearchConfig
    catalog_version: str
    started_at: str
    finished_at: str
    totals: dict


# serialization -------------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits, the shortest spelling that always round-trips
    a double.  JSON has no spelling for non-finite values, so those map to
    null."""
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def to_json(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        return "{" + ",".join(f"{to_json(str(k))}:{to_json(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(to_json(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _config_dict(config: SearchConfig) -> dict:
    return {
        "seed": config.seed,
        "trials": config.trials,
        "dims": list(config.dims),
        "ascent_steps": config.ascent_steps,
        "step_size": config.step_size,
        "fd_eps": config.fd_eps,
        "field": config.field.value,
        "gram": config.gram.value,
    }


def _manifest_line(manifest: RunManifest) -> str:
    return to_json(
        {
            "command": manifest.command,
            "config": _config_dict(manifest.config),
            "catalog_version": manifest.catalog_version,
            "started_at": manifest.started_at,
            "finished_at": manifest.finished_at,
            "totals": manifest.totals,
        }
    )


def _report_line(report) -> str:
    return to_json(
        {
            "ineq": report.ineq,
            "trials_run": report.trials_run,
            "worst_margin": report.worst_margin,
            "worst_instance_digest": report.worst_instance_digest,
            "near_equality_count": report.near_equality_count,
            "violation_count": report.violation_count,
            "margin_histogram": list(report.margin_histogram),
            "premise_starved": report.premise_starved,
        }
    )


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class _Sink:
    """Record lines go to --out when given, stdout otherwise; the manifest
    always ends up as the final stdout line."""

    def __init__(self, out_path: Optional[str]):
        self._path = out_path
        self._handle = None

    def __enter__(self):
        if self._path is not None:
            self._handle = open(self._path, "w", encoding="utf-8")
        return self

    def __exit__(self, *exc):
        if self._handle is not None:
            self._handle.close()

    def record(self, line: str):
        if self._handle is not None:
            self._handle.write(line + "\n")
        else:
            sys.stdout.write(line + "\n")

    def manifest(self, line: str):
        sys.stdout.write(line + "\n")


def _write_csv(path: str, reports):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("ineq,trials,violations,near_equality,worst_margin\n")
        for report in reports:
            worst = "" if report.worst_margin is None else format_float(report.worst_margin)
            handle.write(
                f"{report.ineq},{report.trials_run},{report.violation_count},"
                f"{report.near_equality_count},{worst}\n"
            )


# flag plumbing --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract here reserves 2 for
    violations, so usage problems exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _dims_flag(text: str):
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        return int(m.group(1)), int(m.group(2))
    if re.fullmatch(r"\d+", text):
        return int(text), int(text)
    raise argparse.ArgumentTypeError(f"expected A..B or N, got {text!r}")


def _seed_flag(text: str) -> int:
    if not re.fullmatch(r"\d+", text):
        raise argparse.ArgumentTypeError(f"seed must be an unsigned decimal, got {text!r}")
    return int(text)


def _add_common(sub, *, count_flag: str, count_default: int = 10000):
    sub.add_argument(count_flag, type=int, default=count_default, metavar="N")
    sub.add_argument("--dims", type=_dims_flag, default=(2, 6), metavar="A..B")
    sub.add_argument("--field", choices=["real", "complex", "both"], default="both")
    sub.add_argument("--gram", choices=["identity", "random"], default="identity")
    sub.add_argument("--seed", type=_seed_flag, default=0)
    sub.add_argument("--out", metavar="PATH")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ineq-forge", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    verify = commands.add_parser("verify", help="sweep for violations, ascent off")
    verify.add_argument("--ineq", default="all", metavar="NAME[,NAME...]")
    _add_common(verify, count_flag="--samples")
    verify.add_argument("--emit-instances", action="store_true")
    verify.add_argument("--csv", metavar="PATH")
    verify.set_defaults(handler=cmd_verify)

    hunt = commands.add_parser("falsify", help="hunt for violations, ascent on")
    hunt.add_argument("--ineq", default="all", metavar="NAME[,NAME...]")
    _add_common(hunt, count_flag="--trials")
    hunt.add_argument("--ascent-steps", type=int, default=50, metavar="K")
    hunt.add_argument("--step", type=float, default=1e-2, metavar="S")
    hunt.add_argument("--csv", metavar="PATH")
    hunt.set_defaults(handler=cmd_falsify)

    equality = commands.add_parser("equality", help="round-trip constructed equality instances")
    equality.add_argument("--ineq", default="all", metavar="NAME[,NAME...]")
    _add_common(equality, count_flag="--samples")
    equality.set_defaults(handler=cmd_equality)

    moore = commands.add_parser("moore-complex", help="complex-premise transfer experiment")
    moore.add_argument("--eps", type=float, required=True)
    _add_common(moore, count_flag="--samples")
    moore.add_argument("--ascent-steps", type=int, default=0, metavar="K")
    moore.set_defaults(handler=cmd_moore_complex)

    return parser


def _threads_from_env() -> int:
    raw = os.environ.get("INEQ_FORGE_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw.strip())
    except ValueError:
        raise DomainError(f"INEQ_FORGE_THREADS must be a nonnegative integer, got {raw!r}") from None
    if value < 0:
        raise DomainError(f"INEQ_FORGE_THREADS must be a nonnegative integer, got {raw!r}")
    if value == 0:
        return os.cpu_count() or 1
    return value


def _select_names(flag: str, universe) -> list:
    if flag == "all":
        return list(universe)
    names = [part.strip() for part in flag.split(",") if part.strip()]
    if not names:
        raise DomainError(f"no inequality names in {flag!r}")
    for name in names:
        if name not in universe:
            raise DomainError(f"unknown inequality {name!r}; valid names: {', '.join(universe)}")
    return names


def _search_config(args, *, trials: int, ascent_steps: int = 0, step_size: float = 1e-2,
                   field: Optional[FieldChoice] = None) -> SearchConfig:
    return SearchConfig(
        seed=args.seed,
        trials=trials,
        dims=args.dims,
        ascent_steps=ascent_steps,
        step_size=step_size,
        field=field if field is not None else FieldChoice(args.field),
        gram=GramKind(args.gram),
    )


# command handlers ------------------------------------------------------------


def _instance_line(name: str, config: SearchConfig, index: int) -> Optional[str]:
    """One JSON record for a sampled instance, or None when its premises
    failed (starvation is visible in the summary counter instead)."""
    entry = CATALOG[name]
    sampled = sample_instance(config, name, index)
    result = entry.run(sampled.space, sampled.inputs, entry.default_params)
    if entry.has_premises and result.premises_hold is False:
        return None
    binding = result.binding
    return to_json(
        {
            "ineq": name,
            "dim": sampled.space.dim,
            "field": sampled.space.field.name.lower(),
            "seed": config.seed,
            "digest": instance_digest(name, sampled.space, sampled.inputs),
            "lhs": binding.lhs,
            "center": binding.center,
            "rhs": binding.rhs,
            "margin_lower": binding.margin_lower,
            "margin_upper": binding.margin_upper,
            "holds": all(link.holds for link in result.links),
            "near_equality": binding.near_equality,
        }
    )


def _run_reports(args, names, config: SearchConfig, threads: int, sink: _Sink, emit_instances: bool):
    reports = []
    for name in names:
        if emit_instances:
            for index in range(config.trials):
                line = _instance_line(name, config, index)
                if line is not None:
                    sink.record(line)
        report = falsify(name, config, threads=threads)
        sink.record(_report_line(report))
        reports.append(report)
    return reports


def _finish(sink: _Sink, command: str, config: SearchConfig, totals: dict, started: str) -> None:
    manifest = RunManifest(
        command=command,
        config=config,
        catalog_version=CATALOG_VERSION,
        started_at=started,
        finished_at=_utc_now(),
        totals=totals,
    )
    sink.manifest(_manifest_line(manifest))


def cmd_verify(args, threads: int) -> int:
    started = _utc_now()
    names = _select_names(args.ineq, catalog_names())
    config = _search_config(args, trials=args.samples)
    with _Sink(args.out) as sink:
        reports = _run_reports(args, names, config, threads, sink, args.emit_instances)
        if args.csv:
            _write_csv(args.csv, reports)
        _finish(sink, "verify", config, {r.ineq: r.trials_run for r in reports}, started)
    return 2 if any(r.violation_count for r in reports) else 0


def cmd_falsify(args, threads: int) -> int:
    started = _utc_now()
    names = _select_names(args.ineq, catalog_names())
    config = _search_config(args, trials=args.trials, ascent_steps=args.ascent_steps, step_size=args.step)
    with _Sink(args.out) as sink:
        reports = _run_reports(args, names, config, threads, sink, emit_instances=False)
        if args.csv:
            _write_csv(args.csv, reports)
        _finish(sink, "falsify", config, {r.ineq: r.trials_run for r in reports}, started)
    return 2 if any(r.violation_count for r in reports) else 0


_FIELD_PLANS = {
    "real": (Field.REAL,),
    "complex": (Field.COMPLEX,),
    "both": (Field.REAL, Field.COMPLEX),
}


def cmd_equality(args, threads: int) -> int:
    started = _utc_now()
    names = _select_names(args.ineq, list(EQUALITY_BUILDERS))
    config = _search_config(args, trials=args.samples)
    plan = _FIELD_PLANS[args.field]
    dims = tuple(range(config.dims[0], config.dims[1] + 1))
    failures = 0
    totals = {}
    with _Sink(args.out) as sink:
        for name in names:
            build = EQUALITY_BUILDERS[name]
            passes = 0
            for index in range(config.trials):
                dim = dims[index % len(dims)]
                field = plan[(index // len(dims)) % len(plan)]
                space = builder_space(name, dim, field)
                rng = _trial_rng(config.seed, "equality:" + name, index)
                built = build(space, rng)
                passes += 1 if built.ok else 0
            failed = config.trials - passes
            failures += failed
            totals[name] = config.trials
            sink.record(to_json({"ineq": name, "samples": config.trials, "passes": passes, "failures": failed}))
        _finish(sink, "equality", config, totals, started)
    return 2 if failures else 0


def cmd_moore_complex(args, threads: int) -> int:
    started = _utc_now()
    config = _search_config(args, trials=args.samples, ascent_steps=args.ascent_steps, field=FieldChoice.COMPLEX)
    report = moore_complex_experiment(args.eps, config)
    with _Sink(args.out) as sink:
        sink.record(
            to_json(
                {
                    "eps": report.eps,
                    "samples": report.samples,
                    "samples_satisfying_premises": report.samples_satisfying_premises,
                    "min_observed_ratio": report.min_observed_ratio,
                    "first_bound": report.first_bound,
                    "second_bound": report.second_bound,
                    "verdict": report.verdict.value,
                    "witness_digest": report.witness_digest,
                }
            )
        )
        _finish(sink, "moore-complex", config, {"moore-complex": report.samples}, started)
    return 3 if report.verdict is Verdict.COUNTEREXAMPLE_FOUND else 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        threads = _threads_from_env()
        return args.handler(args, threads)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except DomainError as exc:
        sys.stderr.write(f"ineq-forge: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
