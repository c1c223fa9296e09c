"""
JSON bundles: domains, boxes, diagrams, compositions and filler bindings in
one hand-writable file.

Wire references are ``owner.side.label`` strings, where ``owner`` is a slot
name or ``ext`` and ``side`` is ``in`` or ``out``; delay nodes are written
``delay.label``. A supplier is the explicit ``{"demand": "supply"}`` map.

Bindings are keyed by box name (every slot holding that box) or by
``diagram.slot`` (one slot of one diagram, taking precedence). A binding is a
builtin spec such as ``{"kind": "plus", "init": [1]}`` or ``{"diagram": name}``,
which fills the box with that diagram's own filling.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, NamedTuple

import jsonschema

from .algebra import DiagramPropagator, Filling
from .builtins import BindingError, BuiltinSpec
from .core import (
    BlackBox,
    Delay,
    DiagramError,
    DomainRegistry,
    Slot,
    ValueDomain,
    WireId,
    WiringDiagram,
    make_box,
    make_value_domain,
    validate_diagram,
)
from .operad import KEEP, compose
from .propagators import Propagator

__all__ = [
    "FORMAT",
    "Issue",
    "BundleError",
    "DiagramBinding",
    "Bundle",
    "parse_bundle",
    "load_bundle",
    "bundle_to_dict",
    "dump_bundle",
    "bundle_schema",
    "packaged_bundle",
    "flattened_bundle",
]

FORMAT = "wd-bundle/1"

#: Issue codes that mean the input could not be read at all (exit status 2).
PARSE_CODES = frozenset({"parse", "schema", "io"})


class Issue(NamedTuple):
    code: str  # parse | schema | io | duplicate | unresolved | invalid-domain | invalid-box | violation | binding | composition
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.code}: {self.message}"


class BundleError(Exception):
    """Loading failed; ``issues`` lists every problem found."""

    def __init__(self, issues: list[Issue]):
        self.issues = list(issues)
        super().__init__("\n".join(str(i) for i in self.issues))

    @property
    def is_parse_error(self) -> bool:
        return any(i.code in PARSE_CODES for i in self.issues)


@dataclass(frozen=True)
class DiagramBinding:
    """Fill a box with the propagator of another diagram in the bundle."""

    diagram: str

    def to_dict(self) -> dict:
        return {"diagram": self.diagram}


@dataclass(frozen=True)
class Composition:
    name: str
    outer: str
    inner: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"name": self.name, "outer": self.outer, "inner": list(self.inner)}


@dataclass(frozen=True)
class Bundle:
    domains: dict[str, ValueDomain] = field(default_factory=dict)
    boxes: dict[str, BlackBox] = field(default_factory=dict)
    diagrams: dict[str, WiringDiagram] = field(default_factory=dict)
    compositions: dict[str, Composition] = field(default_factory=dict)
    bindings: dict[str, BuiltinSpec | DiagramBinding] = field(default_factory=dict)
    main: str | None = None
    source: str = field(default="<bundle>", compare=False)

    def diagram(self, name: str | None = None) -> WiringDiagram:
        """A declared or composed diagram; ``None`` selects ``main``."""
        name = name or self.main
        if name is None:
            if len(self.diagrams) == 1:
                return next(iter(self.diagrams.values()))
            raise BundleError([Issue("unresolved", self.source, "no diagram named and the bundle has no 'main'")])
        try:
            return self.diagrams[name]
        except KeyError:
            raise BundleError(
                [Issue("unresolved", self.source, f"no diagram {name!r}; known: {sorted(self.diagrams)}")]
            ) from None

    def binding_for(self, diagram: str, slot: Slot) -> BuiltinSpec | DiagramBinding | None:
        return self.bindings.get(f"{diagram}.{slot.name}", self.bindings.get(slot.box.name))

    def filler(self, diagram: str, slot: Slot, _stack: tuple[str, ...] = ()) -> Propagator:
        b = self.binding_for(diagram, slot)
        if b is None:
            raise BindingError(f"slot {slot.name} of {diagram} (box {slot.box.name}) has no binding")
        if isinstance(b, DiagramBinding):
            return DiagramPropagator(self.filling(b.diagram, _stack))
        return b.build(slot.box)

    def filling(self, name: str | None = None, _stack: tuple[str, ...] = ()) -> Filling:
        """Fill every slot of a diagram from the bindings, recursing into diagram bindings."""
        wd = self.diagram(name)
        key = name or self.main or wd.name
        if key in _stack:
            raise BindingError(f"diagram bindings form a cycle: {' -> '.join(_stack + (key,))}")
        fillers = [self.filler(key, s, _stack + (key,)) for s in wd.interior]
        return Filling(wd, fillers)


# ---------------------------------------------------------------------------
# loading


def bundle_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("data/bundle.schema.json").read_text())


def packaged_bundle(name: str) -> Path | None:
    """Path of a bundle shipped with the package, or ``None``."""
    ref = resources.files(__package__).joinpath("data", name)
    return Path(str(ref)) if ref.is_file() else None


def _pointer(path) -> str:
    return "#/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path)


def _wire(text: str, loc: str, issues: list[Issue]) -> WireId | None:
    try:
        return WireId.parse(text)
    except DiagramError as exc:
        issues.append(Issue("unresolved", loc, str(exc)))
        return None


def parse_bundle(raw: Any, source: str = "<bundle>") -> Bundle:
    """Resolve and validate an already-decoded bundle document."""
    errors = sorted(jsonschema.Draft202012Validator(bundle_schema()).iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        raise BundleError([Issue("schema", f"{source}{_pointer(e.absolute_path)}", e.message) for e in errors])

    issues: list[Issue] = []

    def at(*path) -> str:
        return f"{source}{_pointer(path)}"

    registry = DomainRegistry()
    for i, d in enumerate(raw.get("domains", [])):
        try:
            make_value_domain(d["name"], d["kind"], d.get("symbols"), d.get("basepoint"), registry=registry)
        except DiagramError as exc:
            issues.append(Issue("invalid-domain", at("domains", i), str(exc)))

    boxes: dict[str, BlackBox] = {}
    for i, b in enumerate(raw.get("boxes", [])):
        if b["name"] in boxes:
            issues.append(Issue("duplicate", at("boxes", i, "name"), f"box {b['name']!r} declared twice"))
            continue
        try:
            boxes[b["name"]] = make_box(b["name"], b.get("inputs", []), b.get("outputs", []), registry=registry)
        except DiagramError as exc:
            code = "unresolved" if "unknown domain" in str(exc) else "invalid-box"
            issues.append(Issue(code, at("boxes", i), str(exc)))

    diagrams: dict[str, WiringDiagram] = {}
    broken: set[str] = set()
    for i, d in enumerate(raw.get("diagrams", [])):
        name = d["name"]
        if name in diagrams:
            issues.append(Issue("duplicate", at("diagrams", i, "name"), f"diagram {name!r} declared twice"))
            continue
        ok = True
        codomain = boxes.get(d["codomain"])
        if codomain is None:
            issues.append(Issue("unresolved", at("diagrams", i, "codomain"), f"unknown box {d['codomain']!r}"))
            ok = False
        slots = []
        for j, s in enumerate(d.get("interior", [])):
            slot_name, box_name = (s, s) if isinstance(s, str) else (s["slot"], s["box"])
            if box_name not in boxes:
                issues.append(Issue("unresolved", at("diagrams", i, "interior", j), f"unknown box {box_name!r}"))
                ok = False
            else:
                slots.append(Slot(slot_name, boxes[box_name]))
        delays = []
        for j, dl in enumerate(d.get("delays", [])):
            try:
                dom = registry[dl["domain"]]
                sup = registry[dl["supply_domain"]] if "supply_domain" in dl else None
                delays.append(Delay(dl["label"], dom, sup))
            except DiagramError as exc:
                issues.append(Issue("unresolved", at("diagrams", i, "delays", j), str(exc)))
                ok = False
        supplier = {}
        for dem, sup in d.get("supplier", {}).items():
            loc = at("diagrams", i, "supplier", dem)
            dw, sw = _wire(dem, loc, issues), _wire(sup, loc, issues)
            if dw is None or sw is None:
                ok = False
            else:
                supplier[dw] = sw
        if not ok:
            continue
        wd = WiringDiagram(codomain, tuple(slots), tuple(delays), supplier, name=name)
        violations = validate_diagram(wd)
        for v in violations:
            loc = at("diagrams", i, "supplier", v.wires[0]) if v.kind != "duplicate-name" else at("diagrams", i)
            issues.append(Issue("violation", loc, f"{v.kind}: {v.message}"))
        if violations:
            broken.add(name)
        diagrams[name] = wd

    compositions: dict[str, Composition] = {}
    for i, c in enumerate(raw.get("compositions", [])):
        comp = Composition(c["name"], c["outer"], tuple(c["inner"]))
        if comp.name in diagrams:
            issues.append(Issue("duplicate", at("compositions", i, "name"), f"name {comp.name!r} already used"))
            continue
        refs = [comp.outer] + [n for n in comp.inner if n != "keep"]
        missing = [n for n in refs if n not in diagrams]
        if missing:
            issues.append(Issue("unresolved", at("compositions", i), f"unknown diagrams {missing}"))
            continue
        if broken.intersection(refs):
            # already reported on the component diagrams
            continue
        try:
            inner = [KEEP if n == "keep" else diagrams[n] for n in comp.inner]
            wd = compose(diagrams[comp.outer], inner).renamed(comp.name)
        except DiagramError as exc:
            issues.append(Issue("composition", at("compositions", i), str(exc)))
            continue
        for v in validate_diagram(wd):
            issues.append(Issue("violation", at("compositions", i), f"{v.kind}: {v.message}"))
        diagrams[comp.name] = wd
        compositions[comp.name] = comp

    bindings: dict[str, BuiltinSpec | DiagramBinding] = {}
    for key, b in raw.get("bindings", {}).items():
        loc = at("bindings", key)
        if "." in key:
            dname, sname = key.split(".")
            wd = diagrams.get(dname)
            targets = [s.box for s in wd.interior if s.name == sname] if wd else []
            if not targets:
                issues.append(Issue("unresolved", loc, f"no slot {sname!r} in diagram {dname!r}"))
                continue
            box = targets[0]
        elif key in boxes:
            box = boxes[key]
        else:
            issues.append(Issue("unresolved", loc, f"unknown box {key!r}"))
            continue
        if "diagram" in b:
            inner = diagrams.get(b["diagram"])
            if inner is None:
                issues.append(Issue("unresolved", loc, f"unknown diagram {b['diagram']!r}"))
                continue
            if not inner.codomain.same_shape(box):
                issues.append(
                    Issue("binding", loc, f"diagram {b['diagram']} has codomain {inner.codomain.name}, not the shape of {box.name}")
                )
                continue
            bindings[key] = DiagramBinding(b["diagram"])
        else:
            spec = BuiltinSpec.from_dict(b)
            try:
                spec.build(box)
            except (BindingError, ValueError) as exc:
                issues.append(Issue("binding", loc, str(exc)))
                continue
            bindings[key] = spec

    main = raw.get("main")
    if main is not None and main not in diagrams:
        issues.append(Issue("unresolved", at("main"), f"unknown diagram {main!r}"))

    if issues:
        raise BundleError(issues)
    bundle = Bundle(dict(registry), boxes, diagrams, compositions, bindings, main, source)
    _check_binding_cycles(bundle)
    return bundle


def _check_binding_cycles(bundle: Bundle) -> None:
    graph = {}
    for key, b in bundle.bindings.items():
        if isinstance(b, DiagramBinding):
            holders = [n for n, wd in bundle.diagrams.items() if any(bundle.binding_for(n, s) is b for s in wd.interior)]
            for h in holders:
                graph.setdefault(h, set()).add(b.diagram)
    state: dict[str, int] = {}

    def visit(n, path):
        if state.get(n) == 1:
            raise BundleError([Issue("binding", f"{bundle.source}#/bindings", f"diagram bindings form a cycle: {' -> '.join(path + [n])}")])
        if state.get(n) == 2:
            return
        state[n] = 1
        for m in sorted(graph.get(n, ())):
            visit(m, path + [n])
        state[n] = 2

    for n in sorted(graph):
        visit(n, [])


def load_bundle(path: str | Path) -> Bundle:
    """Read, schema-check, resolve and validate a bundle file.

    Every problem is collected into one :class:`BundleError`. Parse errors
    are located as ``path:line:col``, the rest as ``path#/json/pointer``.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise BundleError([Issue("io", str(path), exc.strerror or str(exc))]) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError([Issue("parse", f"{path}:{exc.lineno}:{exc.colno}", exc.msg)]) from None
    return parse_bundle(raw, str(path))


# ---------------------------------------------------------------------------
# dumping


def _ports(ports) -> list:
    return [[p.label, p.domain.name] for p in ports]


def _diagram_dict(wd: WiringDiagram) -> dict:
    out: dict[str, Any] = {"name": wd.name, "codomain": wd.codomain.name}
    out["interior"] = [s.name if s.name == s.box.name else {"slot": s.name, "box": s.box.name} for s in wd.interior]
    out["delays"] = []
    for d in wd.delays:
        entry = {"label": d.label, "domain": d.domain.name}
        if d.supply_domain is not None:
            entry["supply_domain"] = d.supply_domain.name
        out["delays"].append(entry)
    rank = {w: i for i, w in enumerate(wd.demands())}
    out["supplier"] = {str(d): str(s) for d, s in sorted(wd.supplier.items(), key=lambda p: rank.get(p[0], len(rank)))}
    return out


def bundle_to_dict(bundle: Bundle) -> dict:
    out: dict[str, Any] = {"format": FORMAT}
    if bundle.main is not None:
        out["main"] = bundle.main
    out["domains"] = [d.describe() for d in bundle.domains.values()]
    out["boxes"] = [
        {"name": b.name, "inputs": _ports(b.inputs), "outputs": _ports(b.outputs)} for b in bundle.boxes.values()
    ]
    out["diagrams"] = [_diagram_dict(wd) for n, wd in bundle.diagrams.items() if n not in bundle.compositions]
    out["compositions"] = [c.to_dict() for c in bundle.compositions.values()]
    out["bindings"] = {k: b.to_dict() for k, b in bundle.bindings.items()}
    return out


def dump_bundle(bundle: Bundle, path: str | Path | None = None) -> str:
    """Serialize to JSON text (and write it when ``path`` is given)."""
    text = json.dumps(bundle_to_dict(bundle), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def flattened_bundle(bundle: Bundle, diagram: WiringDiagram, name: str) -> Bundle:
    """A copy of ``bundle`` with ``diagram`` added as a plain declared diagram named ``name``."""
    diagrams = {k: v for k, v in bundle.diagrams.items() if k != name}
    diagrams[name] = diagram.renamed(name)
    compositions = {k: v for k, v in bundle.compositions.items() if k != name}
    return Bundle(bundle.domains, bundle.boxes, diagrams, compositions, bundle.bindings, bundle.main, bundle.source)

