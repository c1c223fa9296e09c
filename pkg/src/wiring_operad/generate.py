"""
Random boxes, diagrams, composable towers, fillers and input lists for
property testing.

Sizes are bounded (at most 3 interior slots, 3 wires per side, 2 delays and
3 domains). Each demand picks its supplier uniformly among the supplies of
the same domain, excluding exterior inputs for exterior outputs; when some
demand has no candidate the interior is drawn again.
"""
from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass

from .core import (
    BlackBox,
    Delay,
    Port,
    Slot,
    ValueDomain,
    WireId,
    WiringDiagram,
    make_value_domain,
)
from .operad import KEEP
from .propagators import Coord, MoorePropagator, PrefixPropagator, Propagator, TupleList, box_coords

__all__ = [
    "DOMAIN_POOL",
    "DiagramGenerator",
    "Tower",
    "random_moore_filler",
    "random_prefix_filler",
    "random_filler",
    "random_rows",
    "random_value",
]

DOMAIN_POOL: tuple[ValueDomain, ...] = (
    make_value_domain("N", "naturals", basepoint=1),
    make_value_domain("B", "finite", ["a", "b"]),
    make_value_domain("I", "integers", basepoint=0),
)


def random_value(rng: random.Random, dom: ValueDomain):
    if dom.is_finite():
        return rng.choice(dom.values())
    if dom.adjoined and rng.random() < 0.1:
        return dom.basepoint
    lo = 0 if dom.kind == "naturals" else -9
    return rng.randint(lo, 9)


def random_rows(rng: random.Random, coords: Sequence[Coord], length: int) -> TupleList:
    return TupleList(tuple(coords), tuple(tuple(random_value(rng, c.domain) for c in coords) for _ in range(length)))


@dataclass
class Tower:
    """Three composable levels: ``psi`` on the top box, ``phis[i]`` into slot ``i``
    of ``psi``, and ``taus[i][j]`` into slot ``j`` of ``phis[i]``."""

    psi: WiringDiagram
    phis: list[WiringDiagram]
    taus: list[list[WiringDiagram]]


class DiagramGenerator:
    def __init__(
        self,
        rng: random.Random | int | None = None,
        domains: Sequence[ValueDomain] = DOMAIN_POOL,
        max_slots: int = 3,
        max_wires: int = 3,
        max_delays: int = 2,
        max_attempts: int = 500,
    ):
        self.rng = rng if isinstance(rng, random.Random) else random.Random(rng)
        self.domains = tuple(domains)
        self.max_slots = max_slots
        self.max_wires = max_wires
        self.max_delays = max_delays
        self.max_attempts = max_attempts
        self._n = 0

    def _name(self, prefix: str) -> str:
        self._n += 1
        return f"{prefix}{self._n}"

    def box(self, name: str | None = None, min_outputs: int = 0) -> BlackBox:
        r = self.rng
        n_in = r.randint(0, self.max_wires)
        n_out = r.randint(min_outputs, self.max_wires)
        return BlackBox(
            name or self._name("B"),
            tuple(Port(f"i{k}", r.choice(self.domains)) for k in range(n_in)),
            tuple(Port(f"o{k}", r.choice(self.domains)) for k in range(n_out)),
        )

    def _supplier(self, wd: WiringDiagram) -> dict[WireId, WireId] | None:
        supplies = wd.supplies()
        by_dom: dict[ValueDomain, list[WireId]] = {}
        for s in supplies:
            by_dom.setdefault(wd.domain_of(s, "supply"), []).append(s)
        out = {}
        for d in wd.demands():
            options = by_dom.get(wd.domain_of(d, "demand"), [])
            if d.owner == "ext":
                options = [s for s in options if s.owner != "ext"]
            if not options:
                return None
            out[d] = self.rng.choice(options)
        return out

    def diagram(
        self, codomain: BlackBox, interior: Sequence[BlackBox] | None = None, name: str | None = None
    ) -> WiringDiagram:
        """A valid diagram on ``codomain``; the interior boxes are random unless given."""
        r = self.rng
        for _ in range(self.max_attempts):
            boxes = list(interior) if interior is not None else [self.box() for _ in range(r.randint(0, self.max_slots))]
            slots = tuple(Slot(f"s{i}", b) for i, b in enumerate(boxes))
            delays = tuple(Delay(f"d{i}", r.choice(self.domains)) for i in range(r.randint(0, self.max_delays)))
            wd = WiringDiagram(codomain, slots, delays, {}, name=name or self._name("w"))
            supplier = self._supplier(wd)
            if supplier is not None:
                return wd.with_supplier(supplier)
        raise RuntimeError(f"no valid diagram on {codomain.name} after {self.max_attempts} attempts")

    def any_diagram(self, name: str | None = None) -> WiringDiagram:
        return self.diagram(self.box(), name=name)

    def inner_for(self, wd: WiringDiagram, keep_rate: float = 0.0) -> list:
        """Random inner diagrams, one per slot of ``wd`` (some ``KEEP`` at ``keep_rate``)."""
        return [KEEP if self.rng.random() < keep_rate else self.diagram(s.box) for s in wd.interior]

    def tower(self) -> Tower:
        psi = self.any_diagram(name="psi")
        phis = [self.diagram(s.box, name=f"phi{i}") for i, s in enumerate(psi.interior)]
        taus = [[self.diagram(s.box, name=f"tau{i}_{j}") for j, s in enumerate(phi.interior)] for i, phi in enumerate(phis)]
        return Tower(psi, phis, taus)

    def permutation(self, n: int) -> list[int]:
        perm = list(range(n))
        self.rng.shuffle(perm)
        return perm


# ---------------------------------------------------------------------------
# fillers


def _encode(v, dom: ValueDomain) -> int:
    if dom.is_finite():
        return dom.values().index(v)
    return 0 if v == dom.basepoint and dom.adjoined else v


def _decode(x: int, dom: ValueDomain):
    if dom.is_finite():
        vals = dom.values()
        return vals[x % len(vals)]
    return x % 10 if dom.kind == "naturals" else x % 21 - 10


def random_moore_filler(rng: random.Random, box: BlackBox) -> MoorePropagator:
    """A degree-1 Moore machine with a small integer state and arbitrary output maps."""
    ins, outs = box_coords(box)
    init = tuple(random_value(rng, c.domain) for c in outs)
    mult, mod = rng.randint(1, 5), rng.randint(2, 13)
    weights = [rng.randint(1, 4) for _ in ins]
    plan = []
    for c in outs:
        same = [i for i, src in enumerate(ins) if src.domain == c.domain]
        if same and rng.random() < 0.3:
            plan.append(("copy", rng.choice(same)))
        else:
            plan.append(("mix", rng.randint(0, 6)))

    def step(row, state):
        code = sum(w * _encode(v, c.domain) for w, v, c in zip(weights, row, ins))
        state = (state * mult + code) % mod
        out = []
        for (how, arg), c in zip(plan, outs):
            out.append(row[arg] if how == "copy" else _decode(state + code + arg, c.domain))
        return tuple(out), state

    return MoorePropagator(ins, outs, init, step, 0, name=f"moore@{box.name}")


def random_prefix_filler(rng: random.Random, box: BlackBox) -> PrefixPropagator:
    """A degree-1 propagator given as a whole-list function (no native stepper).

    Output row ``k + 1`` depends on the first and the latest of the first ``k``
    input rows.
    """
    ins, outs = box_coords(box)
    init = tuple(random_value(rng, c.domain) for c in outs)
    offs = [rng.randint(0, 5) for _ in outs]

    def fn(rows):
        out = [init]
        for k in range(1, len(rows) + 1):
            first, last = rows[0], rows[k - 1]
            code = sum(_encode(v, c.domain) for v, c in zip(first, ins)) + 2 * sum(
                _encode(v, c.domain) for v, c in zip(last, ins)
            )
            out.append(tuple(_decode(code + k + o, c.domain) for o, c in zip(offs, outs)))
        return out

    return PrefixPropagator(ins, outs, 1, fn, name=f"prefix@{box.name}")


def random_filler(rng: random.Random, box: BlackBox, moore_rate: float = 0.8) -> Propagator:
    return random_moore_filler(rng, box) if rng.random() < moore_rate else random_prefix_filler(rng, box)

