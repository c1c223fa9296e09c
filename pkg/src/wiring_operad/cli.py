"""
``wd``: validate, compose, run and trace diagram bundles, and run the law suites.

Exit status: 0 on success, 1 when a bundle or input fails validation (or a law
fails), 2 on usage and parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import evaluate_diagram, run_session, trace
from .builtins import BindingError
from .bundle import BundleError, dump_bundle, flattened_bundle, load_bundle, packaged_bundle
from .canonical import canonicalize
from .core import DiagramError
from .laws import run_laws
from .operad import KEEP, compose
from .propagators import PropagatorError, TupleList
from .tracefmt import emit_trace

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        shipped = packaged_bundle(p.name) if p.parent == Path(".") else None
        if shipped is not None:
            return shipped
    return p


def _load(path: str):
    return load_bundle(_resolve(path))


def _report(err: BundleError) -> int:
    for issue in err.issues:
        print(issue, file=sys.stderr)
    return EXIT_USAGE if err.is_parse_error else EXIT_INVALID


def _read_rows(path: str | None, filling, steps: int | None) -> TupleList:
    labels = [c.key.label for c in filling.ext_in]
    if path is None:
        if labels:
            raise _Usage(f"diagram has exterior inputs {labels}; pass --input")
        if steps is None:
            raise _Usage("--steps is required when there is no --input")
        return TupleList.units(steps)
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        stripped = text.lstrip()
        if stripped.startswith("["):
            records = json.loads(text)
        else:
            records = [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as exc:
        raise _Usage(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    rows = []
    for i, rec in enumerate(records, 1):
        if not isinstance(rec, dict):
            raise _Usage(f"{path}: row {i} is not an object keyed by input label")
        extra = sorted(set(rec) - set(labels))
        missing = [l for l in labels if l not in rec]
        if extra or missing:
            raise PropagatorError(f"{path}: row {i}: missing {missing}, unknown {extra}")
        rows.append(tuple(rec[l] for l in labels))
    if steps is not None:
        if steps > len(rows):
            raise _Usage(f"--steps {steps} but {path} has only {len(rows)} rows")
        rows = rows[:steps]
    return TupleList.checked(filling.ext_in, rows)


def _fmt(v) -> str:
    return json.dumps(v)


def cmd_validate(args) -> int:
    b = _load(args.bundle)
    for name in b.diagrams:
        kind = "composition" if name in b.compositions else "diagram"
        wd = b.diagrams[name]
        print(f"ok {kind} {name}: {len(wd.interior)} slots, {len(wd.delays)} delays, {len(wd.supplier)} wires")
    print(f"{b.source}: valid ({len(b.domains)} domains, {len(b.boxes)} boxes, {len(b.diagrams)} diagrams, {len(b.bindings)} bindings)")
    return EXIT_OK


def cmd_compose(args) -> int:
    b = _load(args.bundle)
    outer = b.diagram(args.outer)
    inner = [KEEP if n == "keep" else b.diagram(n) for n in args.inner]
    wd = compose(outer, inner)
    name = args.name or "_".join([args.outer] + args.inner)
    out = flattened_bundle(b, wd, name)
    if args.canonical:
        out = flattened_bundle(b, canonicalize(wd).diagram, name)
    text = dump_bundle(out)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        for d, s in wd.supplier.items():
            print(f"{d} <- {s}")
        print(f"wrote {name} to {args.out}")
    return EXIT_OK


def _filling(args):
    b = _load(args.bundle)
    return b.filling(args.diagram)


def cmd_run(args) -> int:
    filling = _filling(args)
    ell = _read_rows(args.input, filling, args.steps)
    out = run_session(filling, ell) if args.engine == "session" else evaluate_diagram(filling, ell)
    cols = out.columns()
    if args.format == "json":
        print(json.dumps({"diagram": filling.diagram.name, "steps": len(ell), "outputs": cols}))
    else:
        for label, values in cols.items():
            print(f"{label} = [{', '.join(_fmt(v) for v in values)}]")
    return EXIT_OK


def cmd_trace(args) -> int:
    filling = _filling(args)
    ell = _read_rows(args.input, filling, args.steps)
    sys.stdout.write(emit_trace(trace(filling, ell), args.format))
    return EXIT_OK


def cmd_laws(args) -> int:
    ok = True
    for res in run_laws(args.seed, args.cases):
        print(res.summary())
        for f in res.failures:
            print(f"    {f}")
        ok &= res.ok
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wd", description="Wiring diagrams and historical propagators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="load a bundle and report every problem")
    v.add_argument("bundle")
    v.set_defaults(fn=cmd_validate)

    c = sub.add_parser("compose", help="substitute inner diagrams into an outer one")
    c.add_argument("bundle")
    c.add_argument("--outer", required=True)
    c.add_argument("--inner", nargs="+", required=True, help="one diagram name (or 'keep') per outer slot")
    c.add_argument("--out", required=True, help="bundle file to write, or - for stdout")
    c.add_argument("--name", help="name of the composite (default: outer_inner...)")
    c.add_argument("--canonical", action="store_true", help="store the canonical representative")
    c.set_defaults(fn=cmd_compose)

    def io_args(q):
        q.add_argument("bundle")
        q.add_argument("--diagram", help="diagram to run (default: the bundle's main)")
        q.add_argument("--steps", type=int, help="number of ticks (required without --input)")
        q.add_argument("--input", help="JSON array or JSON-lines file of rows keyed by input label, or -")

    r = sub.add_parser("run", help="evaluate a filled diagram")
    io_args(r)
    r.add_argument("--engine", choices=("session", "oracle"), default="session")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.set_defaults(fn=cmd_run)

    t = sub.add_parser("trace", help="per-tick supply and demand values")
    io_args(t)
    t.add_argument("--format", choices=("table", "json"), default="table")
    t.set_defaults(fn=cmd_trace)

    law = sub.add_parser("laws", help="run the operad and algebra law suites on generated instances")
    law.add_argument("--seed", type=int, default=0)
    law.add_argument("--cases", type=int, default=200)
    law.set_defaults(fn=cmd_laws)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "steps", None) is not None and args.steps < 0:
        print("wd: error: --steps must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except BundleError as err:
        return _report(err)
    except _Usage as exc:
        print(f"wd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"wd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BindingError, DiagramError, PropagatorError) as exc:
        print(f"wd: invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
