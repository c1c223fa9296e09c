"""
Canonical forms for wiring diagrams.

Two diagrams are the same morphism when they differ only by the names of
their delay nodes and interior slots (and by the order of slots). The
canonical key is the lexicographically least encoding over all orderings
of slots and delays that are compatible with an isomorphism-invariant colour
refinement; search branches on the first non-singleton colour cell and prunes
branches that are images of explored ones under automorphisms found along
the way.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import EXTERIOR, Delay, Slot, WireId, WiringDiagram

__all__ = ["CanonicalForm", "canonicalize", "same_diagram"]


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical key plus a representative diagram with path-derived names.

    Equality compares the key only.
    """

    key: tuple
    diagram: WiringDiagram = field(compare=False)

    @property
    def demands(self) -> list[WireId]:
        return self.diagram.demands()

    @property
    def supplies(self) -> list[WireId]:
        return self.diagram.supplies()

    @property
    def supplier(self) -> dict[WireId, WireId]:
        return dict(self.diagram.supplier)


class _Graph:
    """Slots and delays as numbered nodes (slots first), with their wiring."""

    def __init__(self, wd: WiringDiagram):
        self.wd = wd
        self.n_slots = len(wd.interior)
        self.n = self.n_slots + len(wd.delays)
        self.slot_index = {s.name: i for i, s in enumerate(wd.interior)}
        self.delay_index = {d.label: self.n_slots + i for i, d in enumerate(wd.delays)}
        # (demand, supply) pairs with wires resolved to (node or None, side, label)
        self.edges = [(self._node(d), self._node(s)) for d, s in wd.supplier.items()]
        self.ins: list[list] = [[] for _ in range(self.n)]
        self.outs: list[list] = [[] for _ in range(self.n)]
        for d, s in self.edges:
            if d[0] is not None:
                self.ins[d[0]].append((d, s))
            if s[0] is not None:
                self.outs[s[0]].append((d, s))

    def _node(self, w: WireId):
        if w.owner == EXTERIOR:
            return (None, w.side, w.label)
        if w.side == "delay":
            return (self.delay_index[w.label], "delay", "")
        return (self.slot_index[w.owner], w.side, w.label)

    def initial(self) -> list[tuple]:
        out = [("slot", s.box.shape()) for s in self.wd.interior]
        out += [("delay", d.demand_domain.key(), d.supplied.key()) for d in self.wd.delays]
        return out


def _rank(keys: list) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _desc(end, colors):
    node, side, label = end
    if node is None:
        return ("E", side, label)
    return ("N", colors[node], side, label)


def _refine(g: _Graph, colors: list[int]) -> list[int]:
    while True:
        keys = []
        for v in range(g.n):
            ins = tuple(sorted((d[2], _desc(s, colors)) for d, s in g.ins[v]))
            outs = tuple(sorted((s[2], _desc(d, colors)) for d, s in g.outs[v]))
            keys.append((colors[v], ins, outs))
        new = _rank(keys)
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _encode(g: _Graph, colors: list[int]) -> tuple[tuple, list[int]]:
    order = sorted(range(g.n), key=lambda v: colors[v])
    slots = [v for v in order if v < g.n_slots]
    delays = [v for v in order if v >= g.n_slots]
    pos = {v: i for i, v in enumerate(slots)}
    pos.update({v: i for i, v in enumerate(delays)})

    def wire(end):
        node, side, label = end
        if node is None:
            return ("E", side, label)
        return ("D", pos[node]) if side == "delay" else ("S", pos[node], side, label)

    wd = g.wd
    key = (
        wd.codomain.shape(),
        tuple(wd.interior[v].box.shape() for v in slots),
        tuple((wd.delays[v - g.n_slots].demand_domain.key(), wd.delays[v - g.n_slots].supplied.key()) for v in delays),
        tuple(sorted((wire(d), wire(s)) for d, s in g.edges)),
    )
    return key, order


class _Search:
    def __init__(self, g: _Graph):
        self.g = g
        self.best: tuple | None = None
        self.best_order: list[int] | None = None
        self.leaves: dict[tuple, list[int]] = {}
        self.automorphisms: list[list[int]] = []

    def run(self, colors: list[int], path: tuple = ()):
        colors = _refine(self.g, colors)
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            self._leaf(colors)
            return
        explored: list[int] = []
        for v in target:
            if explored and self._same_orbit(v, explored, path):
                continue
            explored.append(v)
            branched = [2 * c + (0 if u == v else 1) for u, c in enumerate(colors)]
            self.run(_rank(branched), path + (v,))

    def _leaf(self, colors):
        key, order = _encode(self.g, colors)
        seen = self.leaves.get(key)
        if seen is not None:
            perm = [0] * self.g.n
            for a, b in zip(seen, order):
                perm[a] = b
            self.automorphisms.append(perm)
            return
        self.leaves[key] = order
        if self.best is None or key < self.best:
            self.best, self.best_order = key, order

    def _same_orbit(self, v: int, explored: list[int], path: tuple) -> bool:
        gens = [p for p in self.automorphisms if all(p[x] == x for x in path)]
        if not gens:
            return False
        parent = list(range(self.g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for p in gens:
            for x, y in enumerate(p):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[rx] = ry
        return any(find(v) == find(u) for u in explored)


def canonicalize(wd: WiringDiagram | CanonicalForm) -> CanonicalForm:
    """Canonical form of a diagram (idempotent: accepts a canonical form too).

    The representative renames slots ``y0, y1, ...`` and delays
    ``d0, d1, ...`` in canonical order.
    """
    if isinstance(wd, CanonicalForm):
        wd = wd.diagram
    g = _Graph(wd)
    search = _Search(g)
    search.run(_rank(g.initial()))
    key, order = search.best, search.best_order
    assert key is not None and order is not None

    slot_names, delay_names = {}, {}
    for v in order:
        if v < g.n_slots:
            slot_names[wd.interior[v].name] = f"y{len(slot_names)}"
        else:
            delay_names[wd.delays[v - g.n_slots].label] = f"d{len(delay_names)}"

    def move(w: WireId) -> WireId:
        if w.owner == EXTERIOR:
            return w
        if w.side == "delay":
            return WireId.delay(delay_names[w.label])
        return WireId(slot_names[w.owner], w.side, w.label)

    interior = sorted((Slot(slot_names[s.name], s.box) for s in wd.interior), key=lambda s: int(s.name[1:]))
    delays = sorted(
        (Delay(delay_names[d.label], d.domain, d.supply_domain) for d in wd.delays), key=lambda d: int(d.label[1:])
    )
    rep = WiringDiagram(wd.codomain, tuple(interior), tuple(delays), {}, name=wd.name)
    rank = {d: i for i, d in enumerate(rep.demands())}
    moved = sorted(((move(d), move(s)) for d, s in wd.supplier.items()), key=lambda p: rank.get(p[0], -1))
    supplier = dict(moved)
    return CanonicalForm(key, rep.with_supplier(supplier))


def same_diagram(a: WiringDiagram, b: WiringDiagram) -> bool:
    """Equality up to renaming of delays and slots, and slot order."""
    return canonicalize(a) == canonicalize(b)
