"""Builtin degree-1 propagators that bundles can bind to boxes by name."""
from __future__ import annotations

import itertools
import operator
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from functools import reduce
from typing import Any

from .core import STAR, BlackBox
from .propagators import MoorePropagator, Propagator, PropagatorError, box_coords, delay_propagator, relabel

__all__ = ["BUILTIN_KINDS", "POINTWISE_OPS", "BuiltinSpec", "BindingError", "build_builtin"]

BUILTIN_KINDS = ("plus", "running_sum", "constant", "delay", "copy", "pointwise", "table")


class BindingError(ValueError):
    """A builtin spec is incomplete or does not fit the box it is bound to."""


def _fold(fn):
    return lambda row: (reduce(fn, row),)


POINTWISE_OPS: dict[str, Callable[[tuple], tuple]] = {
    "add": _fold(operator.add),
    "mul": _fold(operator.mul),
    "sub": _fold(operator.sub),
    "max": _fold(max),
    "min": _fold(min),
    "neg": lambda row: tuple(-v for v in row),
    "succ": lambda row: tuple(v + 1 for v in row),
    "identity": lambda row: tuple(row),
}


@dataclass(frozen=True)
class BuiltinSpec:
    kind: str
    init: tuple | None = None
    params: Mapping[str, Any] = field(default_factory=dict, hash=False)

    @classmethod
    def from_dict(cls, raw: Mapping) -> BuiltinSpec:
        raw = dict(raw)
        kind = raw.pop("kind")
        init = raw.pop("init", None)
        return cls(kind, None if init is None else tuple(init), raw)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.init is not None:
            out["init"] = list(self.init)
        out.update(self.params)
        return out

    def build(self, box: BlackBox) -> Propagator:
        return build_builtin(self, box)


def _init_row(spec: BuiltinSpec, box: BlackBox, default: Callable[[Any], Any] | None = None) -> tuple:
    if spec.init is not None:
        if len(spec.init) != len(box.outputs):
            raise BindingError(f"{spec.kind} on {box.name}: init has {len(spec.init)} values for {len(box.outputs)} outputs")
        for v, p in zip(spec.init, box.outputs):
            if v not in p.domain:
                raise BindingError(f"{spec.kind} on {box.name}: init value {v!r} not in {p.domain.name}")
        return tuple(spec.init)
    return tuple((default or (lambda d: d.basepoint))(p.domain) for p in box.outputs)


def _numeric(box: BlackBox, kind: str) -> None:
    for p in box.inputs + box.outputs:
        if p.domain.kind not in ("naturals", "integers"):
            raise BindingError(f"{kind} on {box.name}: wire {p.label} carries non-numeric {p.domain.name}")


def _arity(box: BlackBox, kind: str, n_in: int | None, n_out: int | None) -> None:
    if n_in is not None and len(box.inputs) != n_in:
        raise BindingError(f"{kind} on {box.name}: needs {n_in} inputs, box has {len(box.inputs)}")
    if n_out is not None and len(box.outputs) != n_out:
        raise BindingError(f"{kind} on {box.name}: needs {n_out} outputs, box has {len(box.outputs)}")


def _numeric_default(dom):
    return 0 if dom.basepoint == STAR else dom.basepoint


def build_builtin(spec: BuiltinSpec, box: BlackBox) -> Propagator:
    """Instantiate ``spec`` as a degree-1 propagator filling ``box``.

    With no ``init`` the first output row is each output's basepoint
    (``0`` for numeric domains with an adjoined basepoint).
    """
    ins, outs = box_coords(box)
    kind = spec.kind
    name = f"{kind}@{box.name}"

    def moore(init, step, state=None):
        return MoorePropagator(ins, outs, init, step, state, name=name)

    if kind == "plus":
        _arity(box, kind, None, 1)
        if not box.inputs:
            raise BindingError(f"plus on {box.name}: needs at least one input")
        _numeric(box, kind)
        return moore(_init_row(spec, box, _numeric_default), lambda row, s: ((sum(row),), s))

    if kind == "running_sum":
        _arity(box, kind, 1, 1)
        _numeric(box, kind)
        init = _init_row(spec, box, lambda d: 0)
        return moore(init, lambda row, s: ((s + row[0],), s + row[0]), init[0])

    if kind == "constant":
        init = _init_row(spec, box)
        return moore(init, lambda row, s: (init, s))

    if kind == "delay":
        n = spec.params.get("n", 1)
        if n != 1:
            raise BindingError(f"delay on {box.name}: a box filler must have degree 1, got delay({n})")
        if [p.domain for p in box.inputs] != [p.domain for p in box.outputs]:
            raise BindingError(f"delay on {box.name}: input and output domains differ")
        if spec.init is not None:
            init = _init_row(spec, box)
            return moore(init, lambda row, s: (row, s))
        return relabel(delay_propagator(1, ins), ins, outs)

    if kind == "copy":
        _arity(box, kind, 1, None)
        if any(p.domain != box.inputs[0].domain for p in box.outputs):
            raise BindingError(f"copy on {box.name}: outputs must share the input's domain")
        k = len(box.outputs)
        return moore(_init_row(spec, box), lambda row, s: (row * k, s))

    if kind == "pointwise":
        op_name = spec.params.get("op")
        if op_name not in POINTWISE_OPS:
            raise BindingError(f"pointwise on {box.name}: unknown op {op_name!r}; known: {sorted(POINTWISE_OPS)}")
        op = POINTWISE_OPS[op_name]
        if op_name != "identity":
            _numeric(box, kind)
        return moore(_init_row(spec, box), lambda row, s: (op(row), s))

    if kind == "table":
        entries = spec.params.get("entries")
        if not isinstance(entries, list):
            raise BindingError(f"table on {box.name}: 'entries' list is required")
        table: dict[tuple, tuple] = {}
        for e in entries:
            key, val = tuple(e["in"]), tuple(e["out"])
            if len(key) != len(box.inputs) or len(val) != len(box.outputs):
                raise BindingError(f"table on {box.name}: entry {e} has the wrong arity")
            for v, p in itertools.chain(zip(key, box.inputs), zip(val, box.outputs)):
                if v not in p.domain:
                    raise BindingError(f"table on {box.name}: {v!r} not in {p.domain.name} ({p.label})")
            table[key] = val
        if all(p.domain.is_finite() for p in box.inputs):
            for key in itertools.product(*(p.domain.values() for p in box.inputs)):
                if key not in table:
                    raise BindingError(f"table on {box.name}: no entry for input {list(key)}")

        def lookup(row, s):
            try:
                return table[row], s
            except KeyError:
                raise PropagatorError(f"table on {box.name}: no entry for input {list(row)}") from None

        return moore(_init_row(spec, box), lookup)

    raise BindingError(f"unknown builtin kind {kind!r}; expected one of {BUILTIN_KINDS}")
