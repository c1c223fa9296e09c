"""
Lists of tuples and historical propagators.

A propagator of degree ``n`` maps a list of input rows of length ``t`` to a
list of output rows of length ``t + n``, and commutes with dropping the last
row: ``drop_last(p(l)) == p(drop_last(l))``. Boxes are filled with degree-1
propagators, whose first output row is fixed before any input arrives.

Rows are plain tuples, one value per coordinate. A :class:`TupleList` pairs
rows with their coordinates so that lists over different wire sets cannot be
confused.
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import NamedTuple

from .core import BlackBox, ValueDomain

__all__ = [
    "Coord",
    "box_coords",
    "TupleList",
    "PropagatorError",
    "drop_last",
    "zip_align",
    "split",
    "coordinate_project",
    "Propagator",
    "Stepper",
    "PrefixPropagator",
    "MoorePropagator",
    "DelayPropagator",
    "ProductPropagator",
    "SequentialPropagator",
    "RelabeledPropagator",
    "TrimmedPropagator",
    "delay_propagator",
    "lift_pointwise",
    "moore_propagator",
    "prefix_propagator",
    "product_propagators",
    "compose_propagators",
    "trim_propagator",
    "relabel",
    "HistoricalityReport",
    "check_historical",
    "exhaustive_samples",
]


class Coord(NamedTuple):
    key: Hashable
    domain: ValueDomain


def box_coords(box: BlackBox) -> tuple[tuple[Coord, ...], tuple[Coord, ...]]:
    """Label-keyed (input, output) coordinates for propagators that fill ``box``."""
    return (
        tuple(Coord(p.label, p.domain) for p in box.inputs),
        tuple(Coord(p.label, p.domain) for p in box.outputs),
    )


class PropagatorError(ValueError):
    """A propagator produced or received a value outside its declared domain."""


def _check_row(row: tuple, coords: Sequence[Coord], where: str) -> None:
    if len(row) != len(coords):
        raise PropagatorError(f"{where}: row {row!r} has {len(row)} values, expected {len(coords)}")
    for v, c in zip(row, coords):
        if v not in c.domain:
            raise PropagatorError(f"{where}: value {v!r} on {c.key} is not in domain {c.domain.name}")


@dataclass(frozen=True)
class TupleList:
    coords: tuple[Coord, ...]
    rows: tuple[tuple, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Coord(*c) for c in self.coords))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))

    @classmethod
    def checked(cls, coords, rows) -> TupleList:
        tl = cls(coords, rows)
        for i, row in enumerate(tl.rows):
            _check_row(row, tl.coords, f"row {i + 1}")
        return tl

    @classmethod
    def from_columns(cls, columns: Mapping[Coord, Sequence] | Sequence[tuple[Coord, Sequence]]) -> TupleList:
        """Zip equal-length per-coordinate columns into a list of rows."""
        items = list(columns.items()) if isinstance(columns, Mapping) else list(columns)
        coords = tuple(c for c, _ in items)
        cols = [list(v) for _, v in items]
        lengths = {len(c) for c in cols}
        if len(lengths) > 1:
            raise PropagatorError(f"columns have different lengths {sorted(lengths)}")
        return cls.checked(coords, tuple(zip(*cols)) if cols else ())

    @classmethod
    def units(cls, t: int) -> TupleList:
        """``t`` rows over no coordinates (the ticks of a zero-input box)."""
        return cls((), ((),) * t)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def keys(self) -> tuple:
        return tuple(c.key for c in self.coords)

    def column(self, key: Hashable) -> list:
        i = self.keys.index(key)
        return [row[i] for row in self.rows]

    def columns(self) -> dict:
        return {c.key: [row[i] for row in self.rows] for i, c in enumerate(self.coords)}

    def prefix(self, k: int) -> TupleList:
        return TupleList(self.coords, self.rows[:k])


def drop_last(ell: TupleList) -> TupleList:
    """Drop the final row. The empty list has no last row."""
    if not ell.rows:
        raise PropagatorError("drop_last of an empty list")
    return TupleList(ell.coords, ell.rows[:-1])


def zip_align(parts: Sequence[TupleList]) -> TupleList:
    """Concatenate equal-length lists coordinate-wise (row i = concatenated rows i)."""
    if not parts:
        raise PropagatorError("zip_align needs at least one part")
    lengths = {len(p) for p in parts}
    if len(lengths) != 1:
        raise PropagatorError(f"zip_align: parts have different lengths {sorted(lengths)}")
    coords = tuple(c for p in parts for c in p.coords)
    rows = tuple(tuple(v for row in group for v in row) for group in zip(*(p.rows for p in parts)))
    return TupleList(coords, rows)


def split(ell: TupleList, widths: Sequence[int]) -> list[TupleList]:
    """Inverse of :func:`zip_align` for the given coordinate block widths."""
    if sum(widths) != len(ell.coords):
        raise PropagatorError(f"split widths {list(widths)} do not cover {len(ell.coords)} coordinates")
    out, lo = [], 0
    for w in widths:
        out.append(TupleList(ell.coords[lo : lo + w], tuple(row[lo : lo + w] for row in ell.rows)))
        lo += w
    return out


def _projector(source: Sequence[Coord], mapping: Mapping[Coord, Hashable]) -> list[int]:
    index = {c.key: i for i, c in enumerate(source)}
    picks = []
    for target, src_key in mapping.items():
        target = Coord(*target)
        if src_key not in index:
            raise PropagatorError(f"unknown source coordinate {src_key!r}")
        src = source[index[src_key]]
        if src.domain != target.domain:
            raise PropagatorError(
                f"domain mismatch projecting {src_key} ({src.domain.name}) onto {target.key} ({target.domain.name})"
            )
        picks.append(index[src_key])
    return picks


def coordinate_project(ell: TupleList, mapping: Mapping[Coord, Hashable]) -> TupleList:
    """Row-wise projection: target coordinate ``j`` reads source coordinate ``mapping[j]``.

    Several targets may read the same source (a wire splitting).
    """
    picks = _projector(ell.coords, mapping)
    targets = tuple(Coord(*c) for c in mapping)
    return TupleList(targets, tuple(tuple(row[i] for i in picks) for row in ell.rows))


# ---------------------------------------------------------------------------
# propagators


class Stepper:
    """Incremental driver for a degree-1 propagator.

    ``peek()`` is the next output row (row ``k + 1`` after ``k`` feeds);
    ``feed(row)`` supplies input row ``k + 1``.
    """

    def peek(self) -> tuple:
        raise NotImplementedError

    def feed(self, row: tuple) -> None:
        raise NotImplementedError


class _ReplayStepper(Stepper):
    # Fallback for propagators without native state: re-evaluate the prefix.
    def __init__(self, prop: Propagator):
        self.prop = prop
        self.history: list[tuple] = []
        self._next = prop.apply_rows(())[-1]

    def peek(self) -> tuple:
        return self._next

    def feed(self, row: tuple) -> None:
        self.history.append(tuple(row))
        self._next = self.prop.apply_rows(tuple(self.history))[-1]


class Propagator:
    """Base class: ``inputs``/``outputs`` coordinates and a historicality ``degree``."""

    inputs: tuple[Coord, ...]
    outputs: tuple[Coord, ...]
    degree: int

    def apply_rows(self, rows: Sequence[tuple]) -> list[tuple]:
        raise NotImplementedError

    def __call__(self, ell: TupleList) -> TupleList:
        if ell.coords != self.inputs:
            raise PropagatorError(
                f"input coordinates {[c.key for c in ell.coords]} do not match {[c.key for c in self.inputs]}"
            )
        return TupleList(self.outputs, self.apply_rows(ell.rows))

    def stepper(self) -> Stepper:
        if self.degree != 1:
            raise PropagatorError(f"only degree-1 propagators can be stepped (degree {self.degree})")
        return _ReplayStepper(self)

    @property
    def is_moore(self) -> bool:
        """True when :meth:`stepper` does constant work per step."""
        return False


class PrefixPropagator(Propagator):
    """A propagator given directly as a function on whole row lists."""

    def __init__(self, inputs, outputs, degree: int, fn: Callable[[tuple[tuple, ...]], Sequence[tuple]], name=""):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.degree = degree
        self.fn = fn
        self.name = name

    def apply_rows(self, rows):
        return [tuple(r) for r in self.fn(tuple(rows))]

    def __repr__(self):
        return f"PrefixPropagator({self.name or self.fn!r}, degree={self.degree})"


def prefix_propagator(inputs, outputs, degree: int, fn, name: str = "") -> PrefixPropagator:
    return PrefixPropagator(inputs, outputs, degree, fn, name)


class _MooreStepper(Stepper):
    def __init__(self, prop: MoorePropagator):
        self.prop = prop
        self.state = prop.init_state
        self._next = prop.init_row
        self.k = 0

    def peek(self):
        return self._next

    def feed(self, row):
        self.k += 1
        out, self.state = self.prop.step(tuple(row), self.state)
        out = tuple(out)
        _check_row(out, self.prop.outputs, f"{self.prop.name or 'moore'} step {self.k}")
        self._next = out


class MoorePropagator(Propagator):
    """Initial output row plus a ``step(row, state) -> (out_row, state)`` function."""

    degree = 1

    def __init__(self, inputs, outputs, init_row, step, init_state=None, name=""):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.init_row = tuple(init_row)
        _check_row(self.init_row, self.outputs, f"{name or 'moore'} initial row")
        self.step = step
        self.init_state = init_state
        self.name = name

    def apply_rows(self, rows):
        st = self.stepper()
        out = [st.peek()]
        for row in rows:
            st.feed(row)
            out.append(st.peek())
        return out

    def stepper(self) -> Stepper:
        return _MooreStepper(self)

    @property
    def is_moore(self) -> bool:
        return True

    def __repr__(self):
        return f"MoorePropagator({self.name or '?'})"


def moore_propagator(inputs, outputs, init_row, step, init_state=None, name: str = "") -> MoorePropagator:
    return MoorePropagator(inputs, outputs, init_row, step, init_state, name)


class _DelayStepper(Stepper):
    def __init__(self, prop: DelayPropagator):
        self._next = prop.basepoint_row

    def peek(self):
        return self._next

    def feed(self, row):
        self._next = tuple(row)


class DelayPropagator(Propagator):
    """``n`` basepoint rows followed by the input verbatim."""

    def __init__(self, n: int, coords):
        if n < 0:
            raise PropagatorError("delay length must be non-negative")
        self.degree = n
        self.inputs = self.outputs = tuple(Coord(*c) for c in coords)
        self.basepoint_row = tuple(c.domain.basepoint for c in self.inputs)

    def apply_rows(self, rows):
        return [self.basepoint_row] * self.degree + [tuple(r) for r in rows]

    def stepper(self):
        if self.degree != 1:
            return super().stepper()
        return _DelayStepper(self)

    @property
    def is_moore(self):
        return self.degree == 1

    def __repr__(self):
        return f"DelayPropagator({self.degree})"


def delay_propagator(n: int, coords) -> DelayPropagator:
    return DelayPropagator(n, coords)


def lift_pointwise(fn: Callable[[tuple], Sequence], inputs, outputs, name: str = "") -> PrefixPropagator:
    """Degree-0 propagator applying ``fn`` to every row independently."""
    inputs, outputs = tuple(inputs), tuple(outputs)

    def body(rows):
        out = []
        for i, row in enumerate(rows):
            res = tuple(fn(row))
            _check_row(res, outputs, f"{name or 'lift'} row {i + 1}")
            out.append(res)
        return out

    return PrefixPropagator(inputs, outputs, 0, body, name or "lift")


class _ProductStepper(Stepper):
    def __init__(self, prop: ProductPropagator):
        self.prop = prop
        self.parts = [p.stepper() for p in prop.parts]

    def peek(self):
        return tuple(v for s in self.parts for v in s.peek())

    def feed(self, row):
        for s, (lo, hi) in zip(self.parts, self.prop.in_slices):
            s.feed(row[lo:hi])


def _slices(widths):
    bounds = list(itertools.accumulate(widths, initial=0))
    return list(zip(bounds[:-1], bounds[1:]))


class ProductPropagator(Propagator):
    """Block-wise product: each part sees only its own coordinate block."""

    def __init__(self, parts: Sequence[Propagator], degree: int = 0):
        self.parts = tuple(parts)
        degrees = {p.degree for p in self.parts}
        if len(degrees) > 1:
            raise PropagatorError(f"product of propagators with different degrees {sorted(degrees)}")
        self.degree = degrees.pop() if degrees else degree
        self.inputs = tuple(c for p in self.parts for c in p.inputs)
        self.outputs = tuple(c for p in self.parts for c in p.outputs)
        self.in_slices = _slices([len(p.inputs) for p in self.parts])

    def apply_rows(self, rows):
        rows = tuple(rows)
        if not self.parts:
            return [()] * (len(rows) + self.degree)
        results = [p.apply_rows(tuple(r[lo:hi] for r in rows)) for p, (lo, hi) in zip(self.parts, self.in_slices)]
        return [tuple(v for block in group for v in block) for group in zip(*results)]

    def stepper(self):
        if self.degree != 1:
            return super().stepper()
        return _ProductStepper(self)

    @property
    def is_moore(self):
        return all(p.is_moore for p in self.parts)


def product_propagators(parts: Sequence[Propagator], degree: int = 0) -> ProductPropagator:
    """Product of same-degree propagators; ``degree`` is used only when ``parts`` is empty."""
    return ProductPropagator(parts, degree)


class SequentialPropagator(Propagator):
    def __init__(self, first: Propagator, second: Propagator):
        if first.outputs != second.inputs:
            raise PropagatorError(
                f"cannot compose: outputs {[c.key for c in first.outputs]} != inputs {[c.key for c in second.inputs]}"
            )
        self.first, self.second = first, second
        self.inputs, self.outputs = first.inputs, second.outputs
        self.degree = first.degree + second.degree

    def apply_rows(self, rows):
        return self.second.apply_rows(self.first.apply_rows(rows))


def compose_propagators(q: Propagator, q2: Propagator) -> SequentialPropagator:
    """``q2`` after ``q``; degrees add."""
    return SequentialPropagator(q, q2)


class TrimmedPropagator(Propagator):
    def __init__(self, inner: Propagator):
        if inner.degree < 1:
            raise PropagatorError("can only trim a propagator of degree >= 1")
        self.inner = inner
        self.inputs, self.outputs = inner.inputs, inner.outputs
        self.degree = inner.degree - 1

    def apply_rows(self, rows):
        return self.inner.apply_rows(rows)[:-1]


def trim_propagator(p: Propagator) -> TrimmedPropagator:
    """``drop_last`` after ``p``: one degree lower."""
    return TrimmedPropagator(p)


class RelabeledPropagator(Propagator):
    """Same behaviour, different coordinate keys (domains must agree)."""

    def __init__(self, inner: Propagator, inputs, outputs):
        inputs, outputs = tuple(Coord(*c) for c in inputs), tuple(Coord(*c) for c in outputs)
        for mine, theirs in ((inputs, inner.inputs), (outputs, inner.outputs)):
            if [c.domain for c in mine] != [c.domain for c in theirs]:
                raise PropagatorError(
                    f"relabel: domains {[c.domain.name for c in mine]} != {[c.domain.name for c in theirs]}"
                )
        self.inner = inner
        self.inputs, self.outputs = inputs, outputs
        self.degree = inner.degree

    def apply_rows(self, rows):
        return self.inner.apply_rows(rows)

    def stepper(self):
        return self.inner.stepper()

    @property
    def is_moore(self):
        return self.inner.is_moore


def relabel(p: Propagator, inputs, outputs) -> Propagator:
    if tuple(inputs) == p.inputs and tuple(outputs) == p.outputs:
        return p
    return RelabeledPropagator(p, inputs, outputs)


# ---------------------------------------------------------------------------
# historicality checking


@dataclass
class HistoricalityReport:
    degree: int
    checked: int = 0
    violation: str | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self) -> bool:
        return self.ok


def exhaustive_samples(coords: Sequence[Coord], max_len: int = 4, limit: int = 20000) -> list[tuple[tuple, ...]] | None:
    """All row lists of length ``max_len`` over finite domains (their prefixes cover shorter ones).

    Returns ``None`` if a domain is infinite or the count would exceed ``limit``.
    """
    if any(not c.domain.is_finite() for c in coords):
        return None
    alphabet = list(itertools.product(*(c.domain.values() for c in coords)))
    if len(alphabet) ** max_len > limit:
        return None
    return [tuple(seq) for seq in itertools.product(alphabet, repeat=max_len)]


def check_historical(p: Propagator, samples: Iterable | None = None, max_len: int = 4) -> HistoricalityReport:
    """Check the length law and the prefix law on every prefix of every sample.

    ``samples`` are row sequences or :class:`TupleList` values. When omitted,
    finite input domains are enumerated exhaustively up to ``max_len``.
    Stops at the first violation.
    """
    report = HistoricalityReport(p.degree)
    if samples is None:
        samples = exhaustive_samples(p.inputs, max_len)
        if samples is None:
            raise PropagatorError("samples are required when input domains are infinite")
    for sample in samples:
        rows = tuple(sample.rows if isinstance(sample, TupleList) else sample)
        previous = None
        for k in range(len(rows) + 1):
            out = p.apply_rows(rows[:k])
            report.checked += 1
            if len(out) != k + p.degree:
                report.violation = (
                    f"length law: input of length {k} gave output of length {len(out)}, "
                    f"expected {k + p.degree} (input {list(rows[:k])})"
                )
                return report
            if previous is not None and list(out[:-1]) != list(previous):
                report.violation = (
                    f"prefix law: dropping the last output row for input {list(rows[:k])} "
                    f"gives {list(out[:-1])}, but the shorter input gives {list(previous)}"
                )
                return report
            previous = out
    return report
