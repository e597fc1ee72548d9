"""Command-line front end.

Exit status: 0 success, 1 spec or validation errors, 2 scenario assertion
failure, 3 internal error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import dsl
from .engine import SyncPolicy, applicable_steps
from .hypergraph import to_dot
from .scenario import ScenarioFailure, ScenarioRunner

OK, SPEC_ERROR, SCENARIO_FAILED, INTERNAL = 0, 1, 2, 3


def _color() -> bool:
    flag = os.environ.get("SHR_COLOR")
    if flag is not None:
        return flag == "1"
    return sys.stderr.isatty()


def _report(path: str, diagnostics) -> None:
    red, reset = ("\033[31m", "\033[0m") if _color() else ("", "")
    for d in diagnostics:
        where = f"{path}:{d.span}" if d.span is not None else path
        print(f"{where}: {red}{d.code}{reset}: {d.message}", file=sys.stderr)


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"{path}: cannot read: {exc.strerror}", file=sys.stderr)
        return None
    spec, diags = dsl.check(text)
    if diags:
        _report(path, diags)
        return None
    return spec


def cmd_validate(args) -> int:
    spec = _load(args.path)
    if spec is None:
        return SPEC_ERROR
    print(f"{args.path}: ok ({len(spec.graph.nodes)} nodes, {len(spec.graph.edges)} edges, "
          f"{len(spec.productions)} productions, {len(spec.rules)} rules)")
    return OK


def cmd_steps(args) -> int:
    spec = _load(args.path)
    if spec is None:
        return SPEC_ERROR
    steps = applicable_steps(spec.graph, spec.productions, SyncPolicy(args.policy))
    print(f"{len(steps)} transitions")
    for i, t in enumerate(steps):
        print(f"#{i} {t.describe()}")
    return OK


def cmd_apply(args) -> int:
    spec = _load(args.path)
    if spec is None:
        return SPEC_ERROR
    steps = applicable_steps(spec.graph, spec.productions, SyncPolicy(args.policy))
    if not 0 <= args.index < len(steps):
        print(f"{args.path}: no transition #{args.index} ({len(steps)} available)", file=sys.stderr)
        return SPEC_ERROR
    text = dsl.serialize(spec.with_graph(steps[args.index].result))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def cmd_run(args) -> int:
    spec = _load(args.path)
    if spec is None:
        return SPEC_ERROR
    dot_dir = Path(args.dot_dir) if args.dot_dir else None

    def dump(k, t):
        if dot_dir is not None:
            (dot_dir / f"step_{k:03d}.dot").write_text(to_dot(t.result), encoding="utf-8")

    if dot_dir is not None:
        dot_dir.mkdir(parents=True, exist_ok=True)
        if args.max_steps > 0:
            (dot_dir / "step_000.dot").write_text(to_dot(spec.graph), encoding="utf-8")
    runner = ScenarioRunner(spec, SyncPolicy(args.policy), args.max_steps, on_step=dump)
    status = OK
    try:
        runner.run()
    except ScenarioFailure as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        status = SCENARIO_FAILED
    if args.trace:
        Path(args.trace).write_text(runner.trace.to_jsonl(), encoding="utf-8")
    print(f"{len(runner.trace)} steps applied")
    return status


def cmd_dot(args) -> int:
    spec = _load(args.path)
    if spec is None:
        return SPEC_ERROR
    text = to_dot(spec.graph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shr", description="Synchronised hyperedge replacement for component assemblies")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_policy(p):
        p.add_argument("--policy", choices=[p.value for p in SyncPolicy], default="milner")
        return p

    p = sub.add_parser("validate", help="parse and validate a spec file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = with_policy(sub.add_parser("steps", help="list the applicable transitions"))
    p.add_argument("path")
    p.set_defaults(func=cmd_steps)

    p = with_policy(sub.add_parser("apply", help="apply one transition and print the resulting spec"))
    p.add_argument("path")
    p.add_argument("index", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_apply)

    p = with_policy(sub.add_parser("run", help="execute the scenario section"))
    p.add_argument("path")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--trace", help="write a JSON-lines trace here")
    p.add_argument("--dot-dir", help="write one DOT file per step here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("dot", help="render the graph section as DOT")
    p.add_argument("path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "max_steps", 0) < 0:
        print("--max-steps must be non-negative", file=sys.stderr)
        return SPEC_ERROR
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
