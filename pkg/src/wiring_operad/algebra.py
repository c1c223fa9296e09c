"""
Propagators installed in wiring diagrams.

Given a diagram ``psi`` and a degree-1 propagator for each interior slot, the
composite propagator on the exterior box is

    output = shuttle_out(step(shuttle_in(cascade(l))))

where ``cascade`` builds the supply-wire lists one tick at a time, ``shuttle``
copies each supply column to the demand columns it feeds, and ``step`` runs the
fillers side by side with a one-tick delay on every delay node.

:func:`evaluate_diagram` follows that formula literally and is the reference;
:class:`EvalSession` computes the same rows incrementally with constant filler
work per tick.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .core import DiagramError, WireId, WiringDiagram, validate_diagram
from .operad import KEEP, compose
from .propagators import (
    Coord,
    Propagator,
    PropagatorError,
    Stepper,
    TupleList,
    box_coords,
    coordinate_project,
    delay_propagator,
    product_propagators,
    relabel,
    zip_align,
)

__all__ = [
    "box_coords",
    "Filling",
    "shuttle",
    "evaluate_step",
    "cascade",
    "evaluate_diagram",
    "DiagramPropagator",
    "EvalSession",
    "open_session",
    "step_session",
    "finish_session",
    "run_session",
    "TraceBundle",
    "trace",
    "FunctorialityReport",
    "check_functoriality",
]


def _wire_coords(wd: WiringDiagram, wires: Iterable[WireId], role: str) -> tuple[Coord, ...]:
    return tuple(Coord(w, wd.domain_of(w, role)) for w in wires)


class Filling:
    """A diagram with a degree-1 propagator installed in every interior slot."""

    def __init__(self, diagram: WiringDiagram, fillers: Sequence[Propagator] | Mapping[str, Propagator]):
        problems = validate_diagram(diagram)
        if problems:
            raise DiagramError(f"cannot fill invalid diagram: {problems[0].message}")
        if isinstance(fillers, Mapping):
            missing = [s.name for s in diagram.interior if s.name not in fillers]
            if missing:
                raise DiagramError(f"no filler for slots {missing}")
            fillers = [fillers[s.name] for s in diagram.interior]
        fillers = tuple(fillers)
        if len(fillers) != len(diagram.interior):
            raise DiagramError(f"{len(fillers)} fillers for {len(diagram.interior)} slots")
        for slot, g in zip(diagram.interior, fillers):
            ins, outs = box_coords(slot.box)
            if g.degree != 1:
                raise DiagramError(f"filler for slot {slot.name} has degree {g.degree}, expected 1")
            for want, have, side in ((ins, g.inputs, "input"), (outs, g.outputs, "output")):
                if [(c.key, c.domain) for c in want] != [(_label(c.key), c.domain) for c in have]:
                    raise DiagramError(
                        f"filler for slot {slot.name} has {side} wires "
                        f"{[(_label(c.key), c.domain.name) for c in have]}, box {slot.box.name} has "
                        f"{[(c.key, c.domain.name) for c in want]}"
                    )
        self.diagram = diagram
        self.fillers = fillers

        wd = diagram
        self.ext_in = _wire_coords(wd, wd.exterior_inputs(), "supply")
        self.ext_out = _wire_coords(wd, wd.exterior_outputs(), "demand")
        self.sup = _wire_coords(wd, wd.supplies(), "supply")
        self.dem = _wire_coords(wd, wd.demands(), "demand")
        self.int_dem = _wire_coords(wd, wd.internal_demands(), "demand")
        self.int_sup = _wire_coords(wd, wd.internal_supplies(), "supply")
        self._step: Propagator | None = None

    @property
    def step_propagator(self) -> Propagator:
        if self._step is None:
            self._step = evaluate_step(self)
        return self._step

    @property
    def is_moore(self) -> bool:
        return all(g.is_moore for g in self.fillers)


def _label(key) -> str:
    return key.label if isinstance(key, WireId) else key


def shuttle(wd: WiringDiagram | Filling, supply: TupleList, part: str = "all") -> TupleList:
    """Copy supply columns onto the demand columns they feed.

    ``part`` selects the target: ``"all"`` demands, ``"internal"`` (slot inputs
    and delays) or ``"output"``; for ``"output"`` the source list ranges over
    the internal supplies only (slot outputs and delays).
    """
    fl = wd if isinstance(wd, Filling) else None
    wd = fl.diagram if fl else wd
    if part == "all":
        targets = _wire_coords(wd, wd.demands(), "demand")
        expected = _wire_coords(wd, wd.supplies(), "supply")
    elif part == "internal":
        targets = _wire_coords(wd, wd.internal_demands(), "demand")
        expected = _wire_coords(wd, wd.supplies(), "supply")
    elif part == "output":
        targets = _wire_coords(wd, wd.exterior_outputs(), "demand")
        expected = _wire_coords(wd, wd.internal_supplies(), "supply")
    else:
        raise ValueError(f"unknown shuttle part {part!r}")
    if supply.coords != expected:
        raise PropagatorError(
            f"shuttle({part}) expects coordinates {[str(c.key) for c in expected]}, "
            f"got {[str(c.key) for c in supply.coords]}"
        )
    return coordinate_project(supply, {t: wd.supplier[t.key] for t in targets})


def evaluate_step(filling: Filling) -> Propagator:
    """Fillers side by side, then a one-tick delay on the delay nodes (degree 1)."""
    wd = filling.diagram
    parts = []
    for slot, g in zip(wd.interior, filling.fillers):
        ins = tuple(Coord(WireId(slot.name, "in", c.key), c.domain) for c in box_coords(slot.box)[0])
        outs = tuple(Coord(WireId(slot.name, "out", c.key), c.domain) for c in box_coords(slot.box)[1])
        parts.append(relabel(g, ins, outs))
    parts.append(delay_propagator(1, _wire_coords(wd, wd.delay_wires(), "demand")))
    return product_propagators(parts)


def _exterior_input(filling: Filling, ell) -> TupleList:
    rows = ell.rows if isinstance(ell, TupleList) else tuple(tuple(r) for r in ell)
    if isinstance(ell, TupleList):
        if [c.domain for c in ell.coords] != [c.domain for c in filling.ext_in]:
            raise PropagatorError(
                f"input coordinates {[str(c.key) for c in ell.coords]} do not match "
                f"exterior inputs {[str(c.key) for c in filling.ext_in]}"
            )
    return TupleList.checked(filling.ext_in, rows)


def cascade(filling: Filling, ell) -> TupleList:
    """Supply-wire lists for the exterior input prefix ``ell`` (same length).

    Row ``k`` holds the exterior input at tick ``k`` and, on internal supplies,
    the last row of ``step(shuttle_in(cascade(ell[:k-1])))``. Computed from
    scratch for each ``k`` in turn, as the recursive definition does.
    """
    ell = _exterior_input(filling, ell)
    E = filling.step_propagator
    c = TupleList(filling.sup, ())
    for k in range(1, len(ell) + 1):
        internal = E(shuttle(filling, c, "internal"))
        c = zip_align([ell.prefix(k), TupleList(filling.int_sup, internal.rows)])
    return c


def evaluate_diagram(filling: Filling, ell) -> TupleList:
    """Reference evaluation; the result has ``len(ell) + 1`` rows keyed by output label."""
    c = cascade(filling, ell)
    internal = filling.step_propagator(shuttle(filling, c, "internal"))
    out = shuttle(filling, TupleList(filling.int_sup, internal.rows), "output")
    return TupleList(box_coords(filling.diagram.codomain)[1], out.rows)


# ---------------------------------------------------------------------------
# incremental evaluation


class EvalSession:
    """Tick-by-tick evaluation of a filling.

    ``step(row)`` returns output row ``k`` for input row ``k`` (it depends only
    on earlier inputs); ``finish()`` returns the look-ahead row ``t + 1``.
    A session is single-owner state.
    """

    def __init__(self, filling: Filling):
        self.filling = filling
        wd = filling.diagram
        self.steppers: list[Stepper] = [g.stepper() for g in filling.fillers]
        self.pending_delays = tuple(d.domain.basepoint for d in wd.delays)
        self.elapsed = 0
        self.finished = False
        self.supply_rows: list[tuple] = []

        sup_index = {c.key: i for i, c in enumerate(filling.sup)}
        int_index = {c.key: i for i, c in enumerate(filling.int_sup)}
        self._out_picks = [int_index[wd.supplier[c.key]] for c in filling.ext_out]
        self._dem_picks = [sup_index[wd.supplier[c.key]] for c in filling.int_dem]
        widths = [len(s.box.inputs) for s in wd.interior]
        bounds = [0]
        for w in widths:
            bounds.append(bounds[-1] + w)
        self._slices = list(zip(bounds[:-1], bounds[1:]))
        self._delay_start = bounds[-1]

    def _internal(self) -> tuple:
        row = tuple(v for s in self.steppers for v in s.peek())
        return row + self.pending_delays

    def peek(self) -> tuple:
        """The next output row, without consuming input."""
        internal = self._internal()
        return tuple(internal[i] for i in self._out_picks)

    def step(self, row) -> tuple:
        if self.finished:
            raise RuntimeError("session used after finish()")
        row = tuple(row)
        if len(row) != len(self.filling.ext_in):
            raise PropagatorError(f"tick {self.elapsed + 1}: expected {len(self.filling.ext_in)} input values")
        for v, c in zip(row, self.filling.ext_in):
            if v not in c.domain:
                raise PropagatorError(f"tick {self.elapsed + 1}: {v!r} is not in {c.domain.name} ({c.key})")
        internal = self._internal()
        out = tuple(internal[i] for i in self._out_picks)
        supply = row + internal
        self.supply_rows.append(supply)
        demand = tuple(supply[i] for i in self._dem_picks)
        self.elapsed += 1
        for s, (lo, hi) in zip(self.steppers, self._slices):
            try:
                s.feed(demand[lo:hi])
            except PropagatorError as exc:
                raise PropagatorError(f"tick {self.elapsed}: {exc}") from exc
        self.pending_delays = demand[self._delay_start :]
        return out

    def finish(self) -> tuple:
        if self.finished:
            raise RuntimeError("session already finished")
        self.finished = True
        return self.peek()


def open_session(filling: Filling) -> EvalSession:
    return EvalSession(filling)


def step_session(state: EvalSession, row) -> tuple:
    return state.step(row)


def finish_session(state: EvalSession) -> tuple:
    return state.finish()


def run_session(filling: Filling, ell) -> TupleList:
    """Evaluate through a session; equal to :func:`evaluate_diagram`."""
    ell = _exterior_input(filling, ell)
    s = EvalSession(filling)
    rows = [s.step(r) for r in ell.rows]
    rows.append(s.finish())
    return TupleList(box_coords(filling.diagram.codomain)[1], rows)


class _SessionStepper(Stepper):
    def __init__(self, filling: Filling):
        self.session = EvalSession(filling)

    def peek(self):
        return self.session.peek()

    def feed(self, row):
        self.session.step(row)


class DiagramPropagator(Propagator):
    """The degree-1 propagator obtained by filling a diagram."""

    degree = 1

    def __init__(self, filling: Filling):
        self.filling = filling
        self.inputs, self.outputs = box_coords(filling.diagram.codomain)

    def apply_rows(self, rows):
        return list(evaluate_diagram(self.filling, rows).rows)

    def stepper(self) -> Stepper:
        return _SessionStepper(self.filling)

    @property
    def is_moore(self) -> bool:
        return self.filling.is_moore

    def __repr__(self):
        return f"DiagramPropagator({self.filling.diagram.name or '?'})"


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TraceBundle:
    """Per-tick values on every supply wire, the derived demand values, and the output."""

    diagram: str
    supply: TupleList
    supplier: Mapping[WireId, WireId] = field(hash=False)
    demand_coords: tuple[Coord, ...]
    output: TupleList

    @property
    def steps(self) -> int:
        return len(self.supply)

    @property
    def demand(self) -> TupleList:
        index = {c.key: i for i, c in enumerate(self.supply.coords)}
        picks = [index[self.supplier[c.key]] for c in self.demand_coords]
        return TupleList(self.demand_coords, tuple(tuple(r[i] for i in picks) for r in self.supply.rows))

    def iteration(self, k: int) -> tuple[dict, dict]:
        """(supply, demand) values at tick ``k`` (1-based), keyed by wire."""
        sup = dict(zip(self.supply.keys, self.supply.rows[k - 1]))
        dem = dict(zip(self.demand.keys, self.demand.rows[k - 1]))
        return sup, dem


def trace(filling: Filling, ell) -> TraceBundle:
    c = cascade(filling, ell)
    return TraceBundle(
        diagram=filling.diagram.name,
        supply=c,
        supplier=dict(filling.diagram.supplier),
        demand_coords=filling.dem,
        output=evaluate_diagram(filling, ell),
    )


# ---------------------------------------------------------------------------
# functoriality


@dataclass
class FunctorialityReport:
    checked: int = 0
    mismatch: str | None = None

    @property
    def ok(self) -> bool:
        return self.mismatch is None

    def __bool__(self) -> bool:
        return self.ok


def check_functoriality(
    outer: WiringDiagram,
    inners: Sequence,
    fillers: Sequence[Sequence[Propagator] | Propagator],
    samples: Iterable,
) -> FunctorialityReport:
    """Compare filling the composite against filling the outer diagram with filled inners.

    ``fillers[i]`` lists the fillers for the slots of ``inners[i]``, or is a
    single propagator when ``inners[i]`` is ``KEEP``.
    """
    flat: list[Propagator] = []
    nested: list[Propagator] = []
    for phi, fs in zip(inners, fillers):
        if phi is KEEP:
            flat.append(fs)
            nested.append(fs)
        else:
            flat.extend(fs)
            nested.append(DiagramPropagator(Filling(phi, list(fs))))
    composite = Filling(compose(outer, inners), flat)
    stacked = Filling(outer, nested)
    report = FunctorialityReport()
    for ell in samples:
        a = evaluate_diagram(composite, ell)
        b = evaluate_diagram(stacked, ell)
        report.checked += 1
        if a.rows != b.rows:
            rows = ell.rows if isinstance(ell, TupleList) else ell
            report.mismatch = f"input {list(rows)}: composite gives {list(a.rows)}, nested gives {list(b.rows)}"
            return report
    return report
