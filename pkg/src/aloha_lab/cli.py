"""aloha-lab command line.

Exit codes: 0 success, 1 configuration/validation or runtime error,
2 statistical check failure in ``validate``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .analytic_model import run_simplified, success_probability, summarize
from .config import config_from_dict
from .errors import ConfigError
from .experiments import format_csv, run_comparison, run_sweep, sweep_from_dict, write_atomic
from .physical_model import run_physical
from .stats import estimate_rate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_STAT_FAIL = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for statistical failures
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aloha-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"aloha-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")

    p = sub.add_parser("run", help="simulate one model and write a JSON report")
    common(p)
    p.add_argument("--model", choices=("physical", "simplified"), default="physical")

    p = sub.add_parser("compare", help="run both models and compare them with the closed forms")
    common(p)

    p = sub.add_parser("sweep", help="sweep one parameter and write CSV")
    common(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("validate", help="statistical checks of both models against the closed forms")
    common(p)
    return parser


def _load(path: str, seed: int | None, allow_sweep: bool = False):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if seed is not None:
        if isinstance(obj, dict):
            obj["seed"] = seed
    if allow_sweep:
        return sweep_from_dict(obj)
    return config_from_dict(obj)


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    config = _load(args.config, args.seed)
    runner = run_physical if args.model == "physical" else run_simplified
    report = runner(config)
    _emit(report.to_json(__version__), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _load(args.config, args.seed)
    cmp = run_comparison(config)
    _emit(cmp.to_json(__version__), args.out)
    (sys.stdout if args.out else sys.stderr).write(cmp.summary())
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _load(args.config, args.seed, allow_sweep=True)
    rows = run_sweep(spec, jobs=args.jobs)
    _emit(format_csv(rows), args.out)
    return EXIT_OK


def validation_checks(config) -> list[tuple[str, bool | None, str]]:
    """(name, verdict, detail) per check; verdict None means not applicable."""
    cmp = run_comparison(config)
    phys, simp = cmp.physical, cmp.simplified
    lam = config.total_rate
    p = success_probability(config.airtime, lam)
    checks = []

    n = simp.sent
    tol = 3 * math.sqrt(p * (1 - p) / n) if n else math.nan
    dev = abs(simp.delivered_fraction - p) if n else math.nan
    checks.append((
        "simplified delivered fraction within 3 sigma of p",
        bool(n) and dev <= tol,
        f"frac={simp.delivered_fraction:.6f} p={p:.6f} tol={tol:.2e}",
    ))

    predicted = summarize(config).per_user_success_rate
    bad = [
        u.id for u in simp.users
        if not estimate_rate(u.delivered, config.horizon, 2.576).contains(predicted[u.id])
    ]
    checks.append(("simplified per-user rates inside 99% CI", not bad, f"outside: {bad}"))

    ks = cmp.ks_simplified
    checks.append((
        "simplified intervals exponential (KS, alpha=0.01)",
        None if ks is None else ks.passed,
        "too few intervals" if ks is None else f"D={ks.statistic:.5f} crit={ks.critical:.5f}",
    ))

    guard = config.guard
    applicable = config.gap_model == "exponential" and guard.mode == "two_sided" and guard.window == config.airtime
    if applicable and phys.interior_sent:
        dev = abs(phys.interior_fraction - p)
        verdict = dev <= 3 * phys.interior_stderr if phys.interior_stderr > 0 else dev == 0
        detail = f"frac={phys.interior_fraction:.6f} se={phys.interior_stderr:.2e}"
    else:
        verdict, detail = None, "needs exponential gaps and two_sided guard = airtime"
    checks.append(("physical interior fraction within 3 SE of p", verdict, detail))

    if guard.mode == "two_sided":
        verdict = phys.min_interval > guard.window
        detail = f"min interval={phys.min_interval:.6g} guard={guard.window:g}"
    else:
        verdict, detail = None, "one_sided guard"
    checks.append(("physical intervals exceed guard", verdict, detail))
    return checks


def cmd_validate(args) -> int:
    config = _load(args.config, args.seed)
    checks = validation_checks(config)
    lines = []
    for name, verdict, detail in checks:
        tag = "SKIP" if verdict is None else ("PASS" if verdict else "FAIL")
        lines.append(f"{tag}  {name}  ({detail})")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_STAT_FAIL if any(v is False for _, v, _ in checks) else EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
    except ConfigError as exc:
        print(f"aloha-lab: config error: {exc}", file=sys.stderr)
    except Exception as exc:  # exit codes are exhaustive; anything else is a 1
        print(f"aloha-lab: error: {exc}", file=sys.stderr)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
