"""Text and JSON renderings of evaluation traces, plus a reader for the JSON form."""
from __future__ import annotations

import json
from typing import Any

from .algebra import TraceBundle
from .core import DiagramError, ValueDomain, WireId, make_value_domain
from .propagators import Coord, TupleList

__all__ = ["TRACE_FORMAT", "emit_trace", "trace_to_dict", "read_trace", "trace_records"]

TRACE_FORMAT = "wd-trace/1"
HEADER = ("step", "wire", "role", "value")


def trace_records(tb: TraceBundle) -> list[tuple[int, str, str, Any]]:
    """(step, wire, role, value) rows: per step, supplies first, then demands."""
    out = []
    demand = tb.demand
    for k in range(tb.steps):
        out += [(k + 1, str(c.key), "supply", v) for c, v in zip(tb.supply.coords, tb.supply.rows[k])]
        out += [(k + 1, str(c.key), "demand", v) for c, v in zip(demand.coords, demand.rows[k])]
    return out


def _table(tb: TraceBundle) -> str:
    rows = [HEADER] + [(str(s), w, r, json.dumps(v)) for s, w, r, v in trace_records(tb)]
    widths = [max(len(r[i]) for r in rows) for i in range(len(HEADER))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _domains(coord_lists) -> list[dict]:
    seen: dict[str, ValueDomain] = {}
    for coords in coord_lists:
        for c in coords:
            prev = seen.setdefault(c.domain.name, c.domain)
            if prev != c.domain:
                raise DiagramError(f"two different domains are both named {c.domain.name!r}")
    return [d.describe() for d in seen.values()]


def trace_to_dict(tb: TraceBundle) -> dict:
    demand = tb.demand
    return {
        "format": TRACE_FORMAT,
        "diagram": tb.diagram,
        "steps": tb.steps,
        "domains": _domains([tb.supply.coords, demand.coords, tb.output.coords]),
        "supplier": {str(d.key): str(tb.supplier[d.key]) for d in demand.coords},
        "supply": {"wires": [[str(c.key), c.domain.name] for c in tb.supply.coords], "rows": [list(r) for r in tb.supply.rows]},
        "demand": {"wires": [[str(c.key), c.domain.name] for c in demand.coords], "rows": [list(r) for r in demand.rows]},
        "output": {"wires": [[c.key, c.domain.name] for c in tb.output.coords], "rows": [list(r) for r in tb.output.rows]},
        "records": [{"step": s, "wire": w, "role": r, "value": v} for s, w, r, v in trace_records(tb)],
    }


def emit_trace(tb: TraceBundle, format: str = "table") -> str:
    """Deterministic rendering: ``"table"`` (aligned columns) or ``"json"``."""
    if format == "table":
        return _table(tb)
    if format == "json":
        return json.dumps(trace_to_dict(tb), indent=2) + "\n"
    raise ValueError(f"unknown trace format {format!r}; expected 'table' or 'json'")


def read_trace(text: str) -> TraceBundle:
    """Inverse of ``emit_trace(tb, "json")``.

    The demand block is checked against the supply block and the supplier
    instead of being trusted.
    """
    raw = json.loads(text)
    if raw.get("format") != TRACE_FORMAT:
        raise ValueError(f"not a {TRACE_FORMAT} document")
    doms = {d["name"]: make_value_domain(d["name"], d["kind"], d.get("symbols"), d.get("basepoint")) for d in raw["domains"]}

    def block(b, parse):
        coords = tuple(Coord(parse(k), doms[n]) for k, n in b["wires"])
        return TupleList.checked(coords, b["rows"])

    supply = block(raw["supply"], WireId.parse)
    demand = block(raw["demand"], WireId.parse)
    output = block(raw["output"], str)
    supplier = {WireId.parse(d): WireId.parse(s) for d, s in raw["supplier"].items()}
    tb = TraceBundle(raw["diagram"], supply, supplier, demand.coords, output)
    if tb.demand != demand:
        raise ValueError("demand rows are not the supplier's shuttle of the supply rows")
    return tb
