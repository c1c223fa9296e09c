import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fib_example import PHI, PSI, N, X, Y, Z
from wiring_operad import (
    KEEP,
    BlackBox,
    Delay,
    DiagramError,
    Port,
    Slot,
    WireId,
    WiringDiagram,
    canonicalize,
    compose,
    identity_diagram,
    permute_interior,
    same_diagram,
    tensor_diagrams,
    validate_diagram,
)
from wiring_operad.generate import DiagramGenerator
from wiring_operad.operad import CompositionPlan, check_composable, tensor_boxes

w = WireId.parse
seeds = st.integers(min_value=0, max_value=2**32)


def as_strings(supplier):
    return {str(d): str(s) for d, s in supplier.items()}


class TestIdentity:
    def test_one_in_one_out(self):
        idy = identity_diagram(Y)
        assert as_strings(idy.supplier) == {"ext.out.c_Y": "Y.out.c_Y", "Y.in.a_Y": "ext.in.a_Y"}
        assert validate_diagram(idy) == []

    def test_no_inputs(self):
        assert as_strings(identity_diagram(Z).supplier) == {"ext.out.c_Z": "Z.out.c_Z"}

    def test_reserved_box_name(self):
        b = BlackBox("ext", (Port("a", N),), (Port("b", N),))
        assert validate_diagram(identity_diagram(b)) == []

    @given(seeds)
    def test_always_valid(self, seed):
        assert validate_diagram(identity_diagram(DiagramGenerator(seed).box())) == []


class TestCompose:
    def test_running_example_supplier(self):
        omega = compose(PSI, [PHI])
        canon = canonicalize(omega)
        assert as_strings(canon.supplier) == {
            "ext.out.c_Z": "delay.d0",
            "y0.in.a_X": "delay.d0",
            "y0.in.b_X": "y0.out.c_X",
            "delay.d0": "y0.out.c_X",
        }
        assert [s.box for s in omega.interior] == [X]
        assert len(omega.delays) == 1
        assert validate_diagram(omega) == []

    def test_raw_names_follow_slot_paths(self):
        omega = compose(PSI, [PHI])
        assert [s.name for s in omega.interior] == ["Y/X"]
        assert as_strings(omega.supplier)["Y/X.in.a_X"] == "delay.d_psi"

    def test_left_identity(self):
        assert same_diagram(compose(identity_diagram(Y), [PHI]), PHI)

    def test_right_identity(self):
        assert same_diagram(compose(PHI, [identity_diagram(X)]), PHI)

    def test_keep(self):
        assert same_diagram(compose(PSI, [KEEP]), PSI)
        assert [s.name for s in compose(PSI, [KEEP]).interior] == ["Y"]

    def test_misaligned_plan(self):
        with pytest.raises(DiagramError, match="does not match"):
            compose(PSI, [PSI])
        with pytest.raises(DiagramError, match="inner entries"):
            CompositionPlan(PSI, ())

    def test_delay_names_do_not_collide(self):
        inner = WiringDiagram(
            Y, (Slot("X", X),), (Delay("d_psi", N),),
            {w("ext.out.c_Y"): w("delay.d_psi"), w("delay.d_psi"): w("X.out.c_X"),
             w("X.in.a_X"): w("ext.in.a_Y"), w("X.in.b_X"): w("X.out.c_X")},
        )
        omega = compose(PSI, [inner])
        assert sorted(d.label for d in omega.delays) == ["Y/d_psi", "d_psi"]
        assert validate_diagram(omega) == []

    def test_unwired_inner_is_a_diagram_error(self):
        broken = PHI.with_supplier({k: v for k, v in PHI.supplier.items() if str(k) != "X.in.b_X"})
        with pytest.raises(DiagramError, match="X.in.b_X"):
            compose(PSI, [broken])

    def test_check_composable_reports_inner_problems(self):
        broken = PHI.with_supplier({})
        msgs = check_composable(CompositionPlan(PSI, (broken,)))
        assert msgs and all(m.startswith("inner[0]") for m in msgs)


class TestTensor:
    def test_single(self):
        assert same_diagram(tensor_diagrams([PHI]), PHI)

    def test_phi_with_itself(self):
        t = tensor_diagrams([PHI, PHI])
        assert validate_diagram(t) == []
        assert len(t.interior) == 2 and all(s.box == X for s in t.interior)
        assert len(t.codomain.inputs) == 2 and len(t.codomain.outputs) == 2
        owners = {d.owner.split("/")[0]: s.owner.split("/")[0] for d, s in t.supplier.items() if d.owner != "ext"}
        assert all(a == b for a, b in owners.items() if b != "ext")

    def test_empty(self):
        t = tensor_diagrams([])
        assert t.codomain == tensor_boxes([]) and t.interior == () and t.supplier == {}
        assert validate_diagram(t) == []


class TestCanonical:
    def test_idempotent(self):
        c = canonicalize(compose(PSI, [PHI]))
        assert canonicalize(c) == c and canonicalize(c.diagram) == c

    def test_delay_labels_do_not_matter(self):
        renamed = WiringDiagram(
            Z, PSI.interior, (Delay("other", N),),
            {w("ext.out.c_Z"): w("delay.other"), w("Y.in.a_Y"): w("delay.other"), w("delay.other"): w("Y.out.c_Y")},
        )
        assert same_diagram(renamed, PSI)

    def test_different_wiring_differs(self):
        other = PHI.with_supplier({**PHI.supplier, w("X.in.b_X"): w("ext.in.a_Y")})
        assert not same_diagram(other, PHI)

    def test_box_names_are_ignored(self):
        x2 = BlackBox("X2", X.inputs, X.outputs)
        renamed = WiringDiagram(Y, (Slot("Q", x2),), (), {
            w("ext.out.c_Y"): w("Q.out.c_X"), w("Q.in.a_X"): w("ext.in.a_Y"), w("Q.in.b_X"): w("Q.out.c_X")})
        assert same_diagram(renamed, PHI)

    def test_symmetric_slots(self):
        # two identical delay loops: the search must still pick one representative
        loop = lambda a, b: {w("ext.out.c_Z"): w(f"delay.{a}"), w(f"delay.{a}"): w(f"delay.{a}"), w(f"delay.{b}"): w(f"delay.{b}")}
        d1 = WiringDiagram(Z, (), (Delay("p", N), Delay("q", N)), loop("p", "q"))
        d2 = WiringDiagram(Z, (), (Delay("p", N), Delay("q", N)), loop("q", "p"))
        assert same_diagram(d1, d2)

    @given(seeds)
    @settings(max_examples=60)
    def test_random_relabelling(self, seed):
        gen = DiagramGenerator(seed)
        wd = gen.any_diagram()
        rng = random.Random(seed)
        names = {s.name: f"n{rng.randrange(10**6)}_{i}" for i, s in enumerate(wd.interior)}
        dnames = {d.label: f"e{rng.randrange(10**6)}_{i}" for i, d in enumerate(wd.delays)}

        def mv(x):
            if x.owner == "ext":
                return x
            if x.side == "delay":
                return WireId.delay(dnames[x.label])
            return WireId(names[x.owner], x.side, x.label)

        moved = WiringDiagram(
            wd.codomain,
            tuple(Slot(names[s.name], s.box) for s in wd.interior),
            tuple(Delay(dnames[d.label], d.domain) for d in reversed(wd.delays)),
            {mv(d): mv(s) for d, s in wd.supplier.items()},
        )
        perm = gen.permutation(len(wd.interior))
        assert canonicalize(permute_interior(moved, perm)) == canonicalize(wd)


class TestPermute:
    def test_identity_permutation(self):
        assert permute_interior(PSI, [0]) == PSI

    def test_swap_twice(self):
        t = tensor_diagrams([PHI, PSI.with_supplier(PSI.supplier)])
        once = permute_interior(t, [1, 0])
        assert once != t and permute_interior(once, [1, 0]) == t

    def test_not_a_permutation(self):
        with pytest.raises(DiagramError):
            permute_interior(PSI, [1])


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_associativity_property(seed):
    gen = DiagramGenerator(seed)
    t = gen.tower()
    first = compose(compose(t.psi, t.phis), [x for row in t.taus for x in row])
    second = compose(t.psi, [compose(p, r) for p, r in zip(t.phis, t.taus)])
    assert canonicalize(first) == canonicalize(second)
    assert validate_diagram(first) == [] and validate_diagram(second) == []


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_identity_and_closure_property(seed):
    gen = DiagramGenerator(seed)
    phi = gen.any_diagram()
    for omega in (compose(identity_diagram(phi.codomain), [phi]), compose(phi, [identity_diagram(s.box) for s in phi.interior])):
        assert validate_diagram(omega) == []
        assert canonicalize(omega) == canonicalize(phi)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_equivariance_property(seed):
    gen = DiagramGenerator(seed)
    psi = gen.any_diagram()
    inner = gen.inner_for(psi, keep_rate=0.3)
    perm = gen.permutation(len(psi.interior))
    a = compose(psi, inner)
    b = compose(permute_interior(psi, perm), [inner[j] for j in perm])
    assert canonicalize(a) == canonicalize(b)
    assert len(a.delays) == len(psi.delays) + sum(len(p.delays) for p in inner if p is not KEEP)


def _structure(c):
    rep = c.diagram
    return (
        rep.codomain.shape(),
        [(s.name, s.box.shape()) for s in rep.interior],
        [(d.label, d.domain.key()) for d in rep.delays],
        sorted((str(d), str(s)) for d, s in rep.supplier.items()),
    )


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_canonical_key_agrees_with_representative(seed):
    """Equal keys exactly when the canonical representatives coincide, also after a random rewiring."""
    gen = DiagramGenerator(seed)
    wd = gen.any_diagram()
    rng = random.Random(seed)
    by_dom = {}
    for s in wd.supplies():
        by_dom.setdefault(wd.domain_of(s, "supply"), []).append(s)
    d = rng.choice(list(wd.supplier)) if wd.supplier else None
    changed = wd
    if d is not None:
        alts = [a for a in by_dom[wd.domain_of(d, "demand")] if not (d.owner == "ext" and a.owner == "ext")]
        changed = wd.with_supplier({**wd.supplier, d: rng.choice(alts)})
    c1, c2 = canonicalize(wd), canonicalize(changed)
    assert (c1 == c2) == (_structure(c1) == _structure(c2))


def brute_force_key(wd):
    """Least encoding over every ordering of slots and delays (reference for small diagrams)."""
    best = None
    for so in itertools.permutations(range(len(wd.interior))):
        for do in itertools.permutations(range(len(wd.delays))):
            spos = {wd.interior[v].name: i for i, v in enumerate(so)}
            dpos = {wd.delays[v].label: i for i, v in enumerate(do)}

            def enc(x):
                if x.owner == "ext":
                    return ("E", x.side, x.label)
                if x.side == "delay":
                    return ("D", dpos[x.label])
                return ("S", spos[x.owner], x.side, x.label)

            key = (
                tuple(wd.interior[v].box.shape() for v in so),
                tuple(wd.delays[v].domain.key() for v in do),
                tuple(sorted((enc(d), enc(s)) for d, s in wd.supplier.items())),
            )
            best = key if best is None or key < best else best
    return (wd.codomain.shape(), best)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_canonical_equality_matches_brute_force(seed):
    gen = DiagramGenerator(seed)
    rng = random.Random(seed)
    a = gen.any_diagram()
    # a random rewiring of a, or a shuffled copy of it
    if rng.random() < 0.5 and a.supplier:
        by_dom = {}
        for s in a.supplies():
            by_dom.setdefault(a.domain_of(s, "supply"), []).append(s)
        d = rng.choice(list(a.supplier))
        alts = [x for x in by_dom[a.domain_of(d, "demand")] if not (d.owner == "ext" and x.owner == "ext")]
        b = a.with_supplier({**a.supplier, d: rng.choice(alts)})
    else:
        b = permute_interior(a, gen.permutation(len(a.interior)))
    assert (canonicalize(a) == canonicalize(b)) == (brute_force_key(a) == brute_force_key(b))
