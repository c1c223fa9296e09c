"""
Value domains, black boxes and wiring diagrams.

A black box is an interface: typed input and output wires. A wiring diagram
places interior boxes and delay nodes inside an exterior box (its codomain)
and connects every *demand* wire to exactly one *supply* wire::

    demands  = exterior outputs + interior inputs + delays
    supplies = exterior inputs  + interior outputs + delays

Wires split but never merge. Validation is data, not an exception: see
:func:`validate_diagram`.
"""
from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, NamedTuple

__all__ = [
    "STAR",
    "EXTERIOR",
    "DELAY",
    "KINDS",
    "DiagramError",
    "ValueDomain",
    "DomainRegistry",
    "make_value_domain",
    "Port",
    "BlackBox",
    "make_box",
    "WireId",
    "Slot",
    "Delay",
    "WiringDiagram",
    "Violation",
    "validate_diagram",
    "wire_tables",
]

#: The freely adjoined default value.
STAR = "*"

#: Reserved owner names for exterior-box wires and delay nodes.
EXTERIOR = "ext"
DELAY = "delay"

KINDS = ("naturals", "integers", "finite", "unit")

_NAME_RE = re.compile(r"^[^.\s]+$")


class DiagramError(ValueError):
    """Raised when a domain, box or diagram cannot be constructed."""


def _check_name(name: str, what: str) -> None:
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise DiagramError(f"invalid {what} name {name!r}: must be non-empty, without dots or spaces")


# ---------------------------------------------------------------------------
# value domains


@dataclass(frozen=True)
class ValueDomain:
    """A pointed set of values a wire may carry.

    ``name`` is a registry handle only; two domains with the same kind,
    symbols and basepoint are equal regardless of name.
    """

    name: str = field(compare=False)
    kind: str
    symbols: tuple[str, ...] = ()
    basepoint: Any = STAR

    @property
    def adjoined(self) -> bool:
        """True when the basepoint is the freely adjoined ``*``."""
        return self.kind != "unit" and self.basepoint == STAR

    def __contains__(self, value: object) -> bool:
        if value == STAR and isinstance(value, str):
            return self.adjoined or self.kind == "unit"
        if self.kind == "unit":
            return False
        if self.kind == "finite":
            return isinstance(value, str) and value in self.symbols
        if isinstance(value, bool) or not isinstance(value, int):
            return False
        return self.kind == "integers" or value >= 0

    def is_finite(self) -> bool:
        return self.kind in ("finite", "unit")

    def values(self) -> tuple:
        """All values of a finite domain, basepoint first."""
        if not self.is_finite():
            raise DiagramError(f"domain {self.name} is infinite")
        if self.kind == "unit":
            return (STAR,)
        rest = tuple(s for s in self.symbols if s != self.basepoint)
        return (self.basepoint,) + rest

    def key(self) -> str:
        """Order-able structural key (used by canonical forms)."""
        return f"{self.kind}|{','.join(self.symbols)}|{self.basepoint!r}"

    def describe(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "kind": self.kind}
        if self.kind == "finite":
            out["symbols"] = list(self.symbols)
        if not self.adjoined and self.kind != "unit":
            out["basepoint"] = self.basepoint
        return out

    def __repr__(self) -> str:
        return f"ValueDomain({self.name})"


def make_value_domain(
    name: str,
    kind: str,
    symbols: Iterable[str] | None = None,
    basepoint: Any = None,
    registry: DomainRegistry | None = None,
) -> ValueDomain:
    """Build a value domain; with no ``basepoint`` the default is an adjoined ``*``.

    When ``registry`` is given the domain is also registered there, and a
    duplicate name is an error.
    """
    _check_name(name, "domain")
    if kind not in KINDS:
        raise DiagramError(f"unknown domain kind {kind!r}; expected one of {KINDS}")
    syms = tuple(symbols or ())
    if kind != "finite" and syms:
        raise DiagramError(f"domain {name}: only finite domains take symbols")
    if kind == "finite":
        if len(set(syms)) != len(syms):
            raise DiagramError(f"domain {name}: duplicate symbols in {list(syms)}")
        if any(not isinstance(s, str) or s == STAR for s in syms):
            raise DiagramError(f"domain {name}: symbols must be strings other than {STAR!r}")
        if not syms and basepoint is not None:
            raise DiagramError(f"domain {name}: empty finite domain cannot have an explicit basepoint")
    if basepoint is None:
        dom = ValueDomain(name, kind, syms, STAR)
    else:
        if kind == "unit" and basepoint != STAR:
            raise DiagramError(f"domain {name}: unit domain's only value is {STAR!r}")
        dom = ValueDomain(name, kind, syms, basepoint)
        if basepoint != STAR and basepoint not in dom:
            raise DiagramError(f"domain {name}: basepoint {basepoint!r} is not a member")
        if basepoint == STAR and kind != "unit":
            dom = ValueDomain(name, kind, syms, STAR)
    if registry is not None:
        registry.add(dom)
    return dom


class DomainRegistry(Mapping[str, ValueDomain]):
    """Name -> domain lookup that refuses duplicates."""

    def __init__(self, domains: Iterable[ValueDomain] = ()):
        self._domains: dict[str, ValueDomain] = {}
        for dom in domains:
            self.add(dom)

    def add(self, dom: ValueDomain) -> ValueDomain:
        if dom.name in self._domains:
            raise DiagramError(f"duplicate domain name {dom.name!r}")
        self._domains[dom.name] = dom
        return dom

    def __getitem__(self, name: str) -> ValueDomain:
        try:
            return self._domains[name]
        except KeyError:
            raise DiagramError(f"unknown domain {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._domains)

    def __len__(self) -> int:
        return len(self._domains)


# ---------------------------------------------------------------------------
# boxes


class Port(NamedTuple):
    label: str
    domain: ValueDomain


@dataclass(frozen=True)
class BlackBox:
    name: str
    inputs: tuple[Port, ...] = ()
    outputs: tuple[Port, ...] = ()

    def __post_init__(self):
        for side, ports in (("input", self.inputs), ("output", self.outputs)):
            labels = [p.label for p in ports]
            dup = {l for l in labels if labels.count(l) > 1}
            if dup:
                raise DiagramError(f"box {self.name}: duplicate {side} labels {sorted(dup)}")

    def port(self, side: str, label: str) -> Port:
        for p in self.inputs if side == "in" else self.outputs:
            if p.label == label:
                return p
        raise KeyError((self.name, side, label))

    def shape(self) -> tuple:
        """Structural identity: labels and domains, ignoring the name."""
        return (
            tuple((p.label, p.domain.key()) for p in self.inputs),
            tuple((p.label, p.domain.key()) for p in self.outputs),
        )

    def same_shape(self, other: BlackBox) -> bool:
        return self.inputs == other.inputs and self.outputs == other.outputs


def _ports(spec, registry: Mapping[str, ValueDomain] | None) -> tuple[Port, ...]:
    out = []
    for label, dom in spec:
        _check_name(label, "wire")
        if isinstance(dom, str):
            if registry is None:
                raise DiagramError(f"domain {dom!r} given by name but no registry supplied")
            dom = registry[dom]
        elif registry is not None and registry.get(dom.name) != dom:
            raise DiagramError(f"unknown domain {dom.name!r}")
        out.append(Port(label, dom))
    return tuple(out)


def make_box(
    name: str,
    inputs: Sequence[tuple[str, ValueDomain | str]] = (),
    outputs: Sequence[tuple[str, ValueDomain | str]] = (),
    registry: Mapping[str, ValueDomain] | None = None,
) -> BlackBox:
    """Build a black box from ``(label, domain)`` pairs.

    Domains may be given by name when a ``registry`` is supplied.
    """
    _check_name(name, "box")
    return BlackBox(name, _ports(inputs, registry), _ports(outputs, registry))


# ---------------------------------------------------------------------------
# diagrams


class WireId(NamedTuple):
    """A wire in a diagram context: ``owner`` is a slot name, ``ext`` or ``delay``."""

    owner: str
    side: str  # "in" | "out" | "delay"
    label: str

    def __str__(self) -> str:
        if self.side == "delay":
            return f"{DELAY}.{self.label}"
        return f"{self.owner}.{self.side}.{self.label}"

    @classmethod
    def parse(cls, text: str) -> WireId:
        parts = text.split(".")
        if len(parts) == 2 and parts[0] == DELAY:
            return cls(DELAY, "delay", parts[1])
        if len(parts) == 3 and parts[1] in ("in", "out") and parts[0] != DELAY:
            return cls(*parts)
        raise DiagramError(f"malformed wire reference {text!r}; expected 'owner.in|out.label' or 'delay.label'")

    @classmethod
    def ext(cls, side: str, label: str) -> WireId:
        return cls(EXTERIOR, side, label)

    @classmethod
    def delay(cls, label: str) -> WireId:
        return cls(DELAY, "delay", label)


class Slot(NamedTuple):
    """An interior position of a diagram, holding a box."""

    name: str
    box: BlackBox


@dataclass(frozen=True)
class Delay:
    """A one-step buffer node.

    ``supply_domain`` exists only so that malformed hand-written input can
    be represented and rejected; well-formed delays leave it unset.
    """

    label: str
    domain: ValueDomain
    supply_domain: ValueDomain | None = None

    @property
    def demand_domain(self) -> ValueDomain:
        return self.domain

    @property
    def supplied(self) -> ValueDomain:
        return self.domain if self.supply_domain is None else self.supply_domain


@dataclass(frozen=True, eq=True)
class WiringDiagram:
    codomain: BlackBox
    interior: tuple[Slot, ...] = ()
    delays: tuple[Delay, ...] = ()
    supplier: Mapping[WireId, WireId] = field(default_factory=dict)
    name: str = field(default="", compare=False)

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self):
        interior = tuple(s if isinstance(s, Slot) else Slot(s.name, s) for s in self.interior)
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "delays", tuple(self.delays))
        object.__setattr__(self, "supplier", dict(self.supplier))

    @property
    def boxes(self) -> tuple[BlackBox, ...]:
        return tuple(s.box for s in self.interior)

    def slot(self, name: str) -> Slot:
        for s in self.interior:
            if s.name == name:
                return s
        raise KeyError(name)

    # wire groups, in canonical order -----------------------------------

    def exterior_inputs(self) -> list[WireId]:
        return [WireId.ext("in", p.label) for p in self.codomain.inputs]

    def exterior_outputs(self) -> list[WireId]:
        return [WireId.ext("out", p.label) for p in self.codomain.outputs]

    def interior_inputs(self) -> list[WireId]:
        return [WireId(s.name, "in", p.label) for s in self.interior for p in s.box.inputs]

    def interior_outputs(self) -> list[WireId]:
        return [WireId(s.name, "out", p.label) for s in self.interior for p in s.box.outputs]

    def delay_wires(self) -> list[WireId]:
        return [WireId.delay(d.label) for d in self.delays]

    def demands(self) -> list[WireId]:
        return self.exterior_outputs() + self.interior_inputs() + self.delay_wires()

    def supplies(self) -> list[WireId]:
        return self.exterior_inputs() + self.interior_outputs() + self.delay_wires()

    def internal_demands(self) -> list[WireId]:
        return self.interior_inputs() + self.delay_wires()

    def internal_supplies(self) -> list[WireId]:
        return self.interior_outputs() + self.delay_wires()

    def domain_of(self, wire: WireId, role: str = "supply") -> ValueDomain:
        """Domain of ``wire``; ``role`` only matters for delay nodes."""
        if wire.side == "delay":
            for d in self.delays:
                if d.label == wire.label:
                    return d.supplied if role == "supply" else d.demand_domain
            raise KeyError(wire)
        box = self.codomain if wire.owner == EXTERIOR else self.slot(wire.owner).box
        return box.port(wire.side, wire.label).domain

    def with_supplier(self, supplier: Mapping[WireId, WireId]) -> WiringDiagram:
        return WiringDiagram(self.codomain, self.interior, self.delays, supplier, self.name)

    def renamed(self, name: str) -> WiringDiagram:
        return WiringDiagram(self.codomain, self.interior, self.delays, self.supplier, name)

    def describe(self) -> str:
        pairs = ", ".join(f"{d}->{s}" for d, s in self.supplier.items())
        return f"WiringDiagram({self.name or '?'}: {self.codomain.name}; {pairs})"


class Violation(NamedTuple):
    kind: str
    wires: tuple[str, ...]
    message: str


def validate_diagram(wd: WiringDiagram) -> list[Violation]:
    """Return every violation of the wiring-diagram rules; empty means valid.

    Checked: unique names, a total supplier on demands that targets real
    supplies, domain compatibility, delay domain agreement, and
    non-instantaneity (no exterior output fed straight from an exterior input).
    """
    out: list[Violation] = []
    slot_names = [s.name for s in wd.interior]
    for name in sorted({n for n in slot_names if slot_names.count(n) > 1}):
        out.append(Violation("duplicate-name", (name,), f"interior slot name {name!r} used twice"))
    for name in slot_names:
        if name in (EXTERIOR, DELAY):
            out.append(Violation("duplicate-name", (name,), f"slot name {name!r} is reserved"))
    delay_labels = [d.label for d in wd.delays]
    for name in sorted({n for n in delay_labels if delay_labels.count(n) > 1}):
        out.append(Violation("duplicate-name", (f"{DELAY}.{name}",), f"delay label {name!r} used twice"))
    if out:
        return out

    demands = wd.demands()
    supplies = set(wd.supplies())
    demand_set = set(demands)
    for d in wd.supplier:
        if d not in demand_set:
            out.append(Violation("unknown-demand", (str(d),), f"{d} is not a demand wire of this diagram"))
    for dl in wd.delays:
        if dl.demand_domain != dl.supplied:
            w = str(WireId.delay(dl.label))
            out.append(
                Violation(
                    "delay-domain",
                    (w,),
                    f"delay {w} demands {dl.demand_domain.name} but supplies {dl.supplied.name}",
                )
            )
    for d in demands:
        s = wd.supplier.get(d)
        if s is None:
            out.append(Violation("missing-supplier", (str(d),), f"demand {d} has no supplier"))
            continue
        if s not in supplies:
            out.append(Violation("unknown-supply", (str(d), str(s)), f"{d} is fed by {s}, which is not a supply wire"))
            continue
        dd, sd = wd.domain_of(d, "demand"), wd.domain_of(s, "supply")
        if dd != sd:
            out.append(
                Violation(
                    "domain-mismatch",
                    (str(d), str(s)),
                    f"{d} carries {dd.name} but its supplier {s} carries {sd.name}",
                )
            )
        if d.owner == EXTERIOR and s.owner == EXTERIOR:
            out.append(
                Violation(
                    "non-instantaneity",
                    (str(d), str(s)),
                    f"exterior output {d} is fed directly by exterior input {s}",
                )
            )
    return out


def wire_tables(wd: WiringDiagram) -> tuple[list[WireId], list[WireId]]:
    """Canonically ordered (demands, supplies): exterior, then slots, then delays."""
    return wd.demands(), wd.supplies()
