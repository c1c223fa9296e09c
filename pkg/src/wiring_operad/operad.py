"""
Operadic structure on wiring diagrams: identities, tensor, substitution and
permutation of interior slots.

Substitution of inner diagrams ``phi_i`` into the slots of an outer diagram
``psi`` computes the new supplier directly on the coproduct

    supplies(omega) = ext inputs + inner interior outputs + inner delays + outer delays

with two routing maps: ``f`` sends an outer supply to its omega supply
(identity except on slot outputs, which are looked up through the inner
supplier) and ``h`` sends an inner supply to its omega supply (identity except
on slot inputs, which are looked up through the outer supplier and ``f``).
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Union

from .core import (
    DELAY,
    EXTERIOR,
    BlackBox,
    Delay,
    DiagramError,
    Port,
    Slot,
    WireId,
    WiringDiagram,
    validate_diagram,
)

__all__ = [
    "KEEP",
    "CompositionPlan",
    "identity_diagram",
    "tensor_diagrams",
    "tensor_boxes",
    "compose_diagrams",
    "compose",
    "permute_interior",
]


class _Keep:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "KEEP"


#: Marker for a slot left as-is during substitution.
KEEP = _Keep()

Inner = Union[WiringDiagram, _Keep]


@dataclass(frozen=True)
class CompositionPlan:
    outer: WiringDiagram
    inner: tuple[Inner, ...]

    def __post_init__(self):
        object.__setattr__(self, "inner", tuple(self.inner))
        if len(self.inner) != len(self.outer.interior):
            raise DiagramError(
                f"composition plan has {len(self.inner)} inner entries for {len(self.outer.interior)} slots"
            )
        for slot, phi in zip(self.outer.interior, self.inner):
            if phi is KEEP:
                continue
            if not phi.codomain.same_shape(slot.box):
                raise DiagramError(
                    f"inner diagram {phi.name or '?'} has codomain {phi.codomain.name} "
                    f"which does not match slot {slot.name} ({slot.box.name})"
                )


def identity_diagram(box: BlackBox, slot: str | None = None) -> WiringDiagram:
    """The diagram with ``box`` as its only interior, wired straight through."""
    name = slot or (box.name if box.name not in (EXTERIOR, DELAY) else f"{box.name}_")
    supplier = {}
    for p in box.outputs:
        supplier[WireId.ext("out", p.label)] = WireId(name, "out", p.label)
    for p in box.inputs:
        supplier[WireId(name, "in", p.label)] = WireId.ext("in", p.label)
    return WiringDiagram(box, (Slot(name, box),), (), supplier, name=f"id_{box.name}")


def _unique(name: str, taken: set[str]) -> str:
    if name not in taken:
        return name
    i = 2
    while f"{name}#{i}" in taken:
        i += 1
    return f"{name}#{i}"


def _labels_clash(boxes: Sequence[BlackBox]) -> bool:
    ins = [p.label for b in boxes for p in b.inputs]
    outs = [p.label for b in boxes for p in b.outputs]
    return len(set(ins)) != len(ins) or len(set(outs)) != len(outs)


def tensor_boxes(boxes: Sequence[BlackBox], name: str | None = None) -> BlackBox:
    """Disjoint union of boxes; labels are prefixed with the part index only on collision."""
    clash = _labels_clash(boxes)
    pre = (lambda i, l: f"{i}/{l}") if clash else (lambda i, l: l)
    return BlackBox(
        name or ("(" + "*".join(b.name for b in boxes) + ")" if boxes else "I"),
        tuple(Port(pre(i, p.label), p.domain) for i, b in enumerate(boxes) for p in b.inputs),
        tuple(Port(pre(i, p.label), p.domain) for i, b in enumerate(boxes) for p in b.outputs),
    )


def tensor_diagrams(parts: Sequence[WiringDiagram]) -> WiringDiagram:
    """Place diagrams side by side, with no wires between them.

    Exterior labels, slot names and delay labels are kept when they are
    already distinct across parts and otherwise prefixed with the part index.
    """
    codomain = tensor_boxes([p.codomain for p in parts])
    ext_clash = _labels_clash([p.codomain for p in parts])
    ext_map: dict[tuple[int, str, str], str] = {}
    for i, part in enumerate(parts):
        for side, ports in (("in", part.codomain.inputs), ("out", part.codomain.outputs)):
            for p in ports:
                ext_map[i, side, p.label] = f"{i}/{p.label}" if ext_clash else p.label

    slot_names = [s.name for p in parts for s in p.interior]
    delay_names = [d.label for p in parts for d in p.delays]
    slot_clash = len(set(slot_names)) != len(slot_names)
    delay_clash = len(set(delay_names)) != len(delay_names)

    interior, delays, supplier = [], [], {}
    for i, part in enumerate(parts):
        slot_map = {s.name: f"{i}/{s.name}" if slot_clash else s.name for s in part.interior}
        delay_map = {d.label: f"{i}/{d.label}" if delay_clash else d.label for d in part.delays}

        def move(w: WireId) -> WireId:
            if w.owner == EXTERIOR:
                return WireId.ext(w.side, ext_map[i, w.side, w.label])
            if w.side == "delay":
                return WireId.delay(delay_map[w.label])
            return WireId(slot_map[w.owner], w.side, w.label)

        interior += [Slot(slot_map[s.name], s.box) for s in part.interior]
        delays += [Delay(delay_map[d.label], d.domain, d.supply_domain) for d in part.delays]
        for d, s in part.supplier.items():
            nd = move(d)
            if nd in supplier:
                raise DiagramError(f"internal error: wire {nd} collides after namespacing")
            supplier[nd] = move(s)
    return WiringDiagram(codomain, tuple(interior), tuple(delays), supplier, name="tensor")


def _rename_inner(phi: WiringDiagram, slot: Slot, keep: bool, taken_slots: set, taken_delays: set):
    """Move ``phi``'s wires into the outer diagram's namespace.

    The exterior of ``phi`` becomes the outer slot's wires; interior slots and
    delays get path names ``<outer slot>/<name>``.
    """
    slot_map, delay_map = {}, {}
    for s in phi.interior:
        new = slot.name if keep else f"{slot.name}/{s.name}"
        new = _unique(new, taken_slots)
        taken_slots.add(new)
        slot_map[s.name] = new
    for d in phi.delays:
        new = _unique(f"{slot.name}/{d.label}", taken_delays)
        taken_delays.add(new)
        delay_map[d.label] = new

    def move(w: WireId) -> WireId:
        if w.owner == EXTERIOR:
            return WireId(slot.name, w.side, w.label)
        if w.side == "delay":
            return WireId.delay(delay_map[w.label])
        return WireId(slot_map[w.owner], w.side, w.label)

    slots = [Slot(slot_map[s.name], s.box) for s in phi.interior]
    delays = [Delay(delay_map[d.label], d.domain, d.supply_domain) for d in phi.delays]
    supplier = {move(d): move(s) for d, s in phi.supplier.items()}
    return slots, delays, supplier


def compose_diagrams(plan: CompositionPlan) -> WiringDiagram:
    """Substitute ``plan.inner[i]`` into slot ``i`` of ``plan.outer``.

    Delays of the result are the inner delays followed by the outer ones;
    interior slots are the inner interiors concatenated in slot order.
    """
    psi = plan.outer
    taken_slots: set[str] = set()
    taken_delays: set[str] = {d.label for d in psi.delays}

    inner_slots: list[Slot] = []
    inner_delays: list[Delay] = []
    s_phi: dict[WireId, WireId] = {}
    for slot, phi in zip(psi.interior, plan.inner):
        keep = phi is KEEP
        if keep:
            phi = identity_diagram(slot.box)
        slots, delays, sup = _rename_inner(phi, slot, keep, taken_slots, taken_delays)
        inner_slots += slots
        inner_delays += delays
        s_phi.update(sup)

    s_psi = psi.supplier

    def f(w: WireId) -> WireId:
        # outer supply -> omega supply
        if w.owner == EXTERIOR or w.side == "delay":
            return w
        return s_phi[w]  # slot output, fed inside by an inner output or inner delay

    def h(w: WireId) -> WireId:
        # inner supply -> omega supply
        if w.side == "in" and w.owner in outer_slots:
            return f(s_psi[w])
        return w

    outer_slots = {s.name for s in psi.interior}
    outer_delays = {x.label for x in psi.delays}
    omega = WiringDiagram(psi.codomain, tuple(inner_slots), tuple(inner_delays) + psi.delays, {})
    supplier: dict[WireId, WireId] = {}
    for d in omega.demands():
        try:
            if d.owner == EXTERIOR or (d.side == "delay" and d.label in outer_delays):
                supplier[d] = f(s_psi[d])
            else:
                supplier[d] = h(s_phi[d])
        except KeyError as exc:
            raise DiagramError(f"cannot compose: wire {exc.args[0]} has no supplier") from None
    return WiringDiagram(psi.codomain, omega.interior, omega.delays, supplier, name=_compose_name(plan))


def _compose_name(plan: CompositionPlan) -> str:
    inner = ",".join("keep" if p is KEEP else (p.name or "?") for p in plan.inner)
    return f"{plan.outer.name or '?'}({inner})"


def compose(outer: WiringDiagram, inner: Sequence[Inner]) -> WiringDiagram:
    """Shorthand for ``compose_diagrams(CompositionPlan(outer, inner))``."""
    return compose_diagrams(CompositionPlan(outer, tuple(inner)))


def permute_interior(wd: WiringDiagram, perm: Sequence[int]) -> WiringDiagram:
    """Reorder interior slots: new slot ``i`` is old slot ``perm[i]``.

    Wires are keyed by slot name, so the supplier carries over unchanged.
    """
    n = len(wd.interior)
    if sorted(perm) != list(range(n)):
        raise DiagramError(f"{list(perm)} is not a permutation of 0..{n - 1}")
    return WiringDiagram(
        wd.codomain, tuple(wd.interior[j] for j in perm), wd.delays, wd.supplier, name=wd.name
    )


def check_composable(plan: CompositionPlan) -> list[str]:
    """Validation messages for every diagram in ``plan`` (empty when all are valid)."""
    msgs = [f"outer: {v.message}" for v in validate_diagram(plan.outer)]
    for i, phi in enumerate(plan.inner):
        if phi is not KEEP:
            msgs += [f"inner[{i}]: {v.message}" for v in validate_diagram(phi)]
    return msgs
