"""Command line: ``lempert-lab run <experiment>`` and ``lempert-lab estimate``.

Exit codes: 0 success, 2 usage error, 3 uncertified estimate, 4 failed
experiment checks.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .complex_core import DomainError
from .discs import from_cnum
from .domains import Domain
from .experiments import EXPERIMENTS, dumps_rows, load_config, run_experiment, summary_table
from .lempert import OptimizerConfig, PoleSpec, estimate_lempert

EXIT_OK, EXIT_USAGE, EXIT_UNCERTIFIED, EXIT_FAILED = 0, 2, 3, 4


class PolesFileError(DomainError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line, self.column = line, column


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def parse_poles_text(text: str) -> PoleSpec:
    """Parse a poles file: a JSON list of ``{"point": [{re, im}, ...], "weight": w}``.

    One-dimensional poles may drop ``point`` and give ``re``/``im`` inline.
    Errors carry the line and column of the offending record.
    """
    dec = json.JSONDecoder()
    pos = len(text) - len(text.lstrip())

    def fail(msg, at):
        raise PolesFileError(msg, *_line_col(text, at))

    if pos >= len(text) or text[pos] != "[":
        fail("expected a list of pole records", pos)
    start = pos
    pos += 1
    points, weights = [], []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos < len(text) and text[pos] == "]":
            break
        try:
            rec, end = dec.raw_decode(text, pos)
        except json.JSONDecodeError as exc:
            raise PolesFileError(exc.msg, exc.lineno, exc.colno) from None
        if not isinstance(rec, dict):
            fail("a pole record must be an object", pos)
        try:
            coords = rec["point"] if "point" in rec else [{"re": rec["re"], "im": rec.get("im", 0.0)}]
            points.append([from_cnum(c) for c in coords])
            weights.append(float(rec.get("weight", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            fail(f"malformed pole record ({exc})", pos)
        pos = end
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos < len(text) and text[pos] == ",":
            pos += 1
        elif pos < len(text) and text[pos] == "]":
            break
        else:
            fail("expected ',' or ']'", pos)
    if not points:
        fail("pole set must be non-empty", start)
    if len({len(p) for p in points}) != 1:
        fail("poles have different dimensions", start)
    try:
        return PoleSpec(np.array(points, dtype=complex), tuple(weights))
    except DomainError as exc:
        fail(str(exc), start)


def parse_domain(desc) -> Domain:
    """``unit_disc``, ``punctured_disc``, ``polydisc:2``, ``euclidean_ball:3``,
    products joined by ``*`` (``unit_disc*euclidean_ball:2``), or a record."""
    if isinstance(desc, dict):
        return Domain.from_record(desc)
    desc = desc.strip()
    if desc.startswith("{"):
        return Domain.from_record(json.loads(desc))
    parts = [p.strip() for p in desc.split("*")]
    factors = []
    for part in parts:
        kind, _, n = part.partition(":")
        kind = {"disc": "unit_disc", "ball": "euclidean_ball"}.get(kind, kind)
        rec = {"kind": kind}
        if n:
            rec["n"] = int(n)
        factors.append(Domain.from_record(rec))
    return factors[0] if len(factors) == 1 else Domain("product", factors=tuple(factors))


def parse_point(text) -> np.ndarray:
    """Comma-separated complex coordinates, ``i`` or ``j`` for the unit."""
    if isinstance(text, (list, tuple)):
        return np.array([from_cnum(c) for c in text], dtype=complex)
    try:
        return np.array([complex(s.strip().replace("i", "j")) for s in str(text).split(",")])
    except ValueError:
        raise DomainError(f"cannot read a point from {text!r}") from None


def _cmd_run(args) -> int:
    cfg = load_config(args.experiment, args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    rows = run_experiment(cfg, args.out, timing=args.timing)
    if args.out is None and cfg.output.get("path") is None:
        sys.stdout.write(dumps_rows(rows))
    print(summary_table(rows))
    failed = [r for r in rows if not r.passed]
    for r in failed:
        bad = [k for k, v in r.checks.items() if not v]
        print(f"FAILED {r.experiment_id} {r.case}: {', '.join(bad)}", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def _cmd_estimate(args) -> int:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        unknown = set(doc) - {"domain", "poles", "z", "optimizer", "output", "seed"}
        if unknown:
            raise DomainError(f"unknown config sections: {sorted(unknown)}")
    domain_desc = args.domain if args.domain is not None else doc.get("domain")
    if domain_desc is None:
        raise DomainError("a domain is required")
    domain = parse_domain(domain_desc)
    if args.poles is not None:
        spec = parse_poles_text(Path(args.poles).read_text())
    elif "poles" in doc:
        spec = parse_poles_text(json.dumps(doc["poles"]))
    else:
        raise DomainError("a poles file is required")
    z_desc = args.z if args.z is not None else doc.get("z")
    if z_desc is None:
        raise DomainError("an evaluation point is required")
    z = parse_point(z_desc)
    overrides = dict(doc.get("optimizer", {}))
    for key in ("restarts", "max_iter", "free_degree"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    config = OptimizerConfig.from_dict(overrides)
    seed = args.seed if args.seed is not None else int(doc.get("seed", 42))
    est = estimate_lempert(domain, spec, z, config, seed=seed)
    text = json.dumps(est.to_record(spec, timing=args.timing), sort_keys=True)
    out = args.out or doc.get("output", {}).get("path")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n")
    print(text)
    return EXIT_OK if est.certified else EXIT_UNCERTIFIED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lempert-lab", description="Certified estimates of the weighted multipole Lempert function."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a named experiment")
    run.add_argument("experiment", choices=EXPERIMENTS)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="JSON-lines output path (default from the config)")
    run.add_argument("--config", help="experiment config file (default: the committed one)")
    run.add_argument("--timing", action="store_true", help="record runtimes (breaks byte-identical output)")
    run.set_defaults(func=_cmd_run)

    est = sub.add_parser("estimate", help="estimate l_D(p, z) for one pole file")
    est.add_argument("--domain", help="e.g. unit_disc, polydisc:2, unit_disc*euclidean_ball:2")
    est.add_argument("--poles", help="JSON list of {point: [{re, im}, ...], weight} records")
    est.add_argument("--z", help="evaluation point, comma-separated complex coordinates")
    est.add_argument("--config", help="file with sections domain, poles, z, optimizer, output")
    est.add_argument("--restarts", type=int)
    est.add_argument("--max-iter", dest="max_iter", type=int)
    est.add_argument("--free-degree", dest="free_degree", type=int)
    est.add_argument("--seed", type=int)
    est.add_argument("--out")
    est.add_argument("--timing", action="store_true")
    est.set_defaults(func=_cmd_estimate)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"lempert-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
