"""
Executable law suites over generated instances.

Each suite returns a :class:`LawResult` with the number of cases checked, the
first few failures and the wall time. :func:`run_laws` runs them all from one
seed, which is what ``wd laws`` prints.
"""
from __future__ import annotations

import random
import time
from collections.abc import Callable
from dataclasses import dataclass, field

from .algebra import DiagramPropagator, Filling, check_functoriality, evaluate_diagram, run_session
from .canonical import canonicalize
from .core import WiringDiagram, validate_diagram
from .generate import DiagramGenerator, random_filler, random_rows
from .operad import KEEP, compose, identity_diagram, permute_interior
from .propagators import box_coords, check_historical

__all__ = [
    "LawResult",
    "FunctorialityCase",
    "operad_identity_law",
    "operad_associativity_law",
    "operad_equivariance_law",
    "algebra_identity_law",
    "functoriality_cases",
    "moore_instances",
    "functoriality_law",
    "historicality_law",
    "session_equivalence_law",
    "run_laws",
]

MAX_FAILURES = 5


@dataclass
class LawResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str) -> None:
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(msg)

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.cases} cases in {self.seconds:.2f}s"


def _timed(name: str, body: Callable[[LawResult], None]) -> LawResult:
    res = LawResult(name)
    t0 = time.perf_counter()
    body(res)
    res.seconds = time.perf_counter() - t0
    return res


def _closure(res: LawResult, omega: WiringDiagram, n_delays: int, what: str) -> None:
    for v in validate_diagram(omega):
        res.fail(f"{what}: composite is invalid ({v.kind}: {v.message})")
        return
    if len(omega.delays) != n_delays:
        res.fail(f"{what}: composite has {len(omega.delays)} delays, expected {n_delays}")


def operad_identity_law(gen: DiagramGenerator, cases: int) -> LawResult:
    """Left and right unit laws, plus closure of every composite produced."""

    def body(res):
        for k in range(cases):
            phi = gen.any_diagram(name="phi")
            want = canonicalize(phi)
            left = compose(identity_diagram(phi.codomain), [phi])
            right = compose(phi, [identity_diagram(s.box) for s in phi.interior])
            keep = compose(phi, [KEEP] * len(phi.interior))
            for label, omega in (("left", left), ("right", right), ("keep", keep)):
                _closure(res, omega, len(phi.delays), f"case {k} {label}")
                if canonicalize(omega) != want:
                    res.fail(f"case {k}: {label} unit law fails for {phi.describe()}")
            res.cases += 1

    return _timed("operad identity", body)


def operad_associativity_law(gen: DiagramGenerator, cases: int) -> LawResult:
    def body(res):
        for k in range(cases):
            t = gen.tower()
            psi_phi = compose(t.psi, t.phis)
            first = compose(psi_phi, [tau for row in t.taus for tau in row])
            second = compose(t.psi, [compose(phi, taus) for phi, taus in zip(t.phis, t.taus)])
            n = len(t.psi.delays) + sum(len(p.delays) for p in t.phis) + sum(len(x.delays) for r in t.taus for x in r)
            _closure(res, psi_phi, len(t.psi.delays) + sum(len(p.delays) for p in t.phis), f"case {k} psi.phi")
            _closure(res, first, n, f"case {k} (psi.phi).tau")
            _closure(res, second, n, f"case {k} psi.(phi.tau)")
            if canonicalize(first) != canonicalize(second):
                res.fail(f"case {k}: the two bracketings differ for psi={t.psi.describe()}")
            res.cases += 1

    return _timed("operad associativity", body)


def operad_equivariance_law(gen: DiagramGenerator, cases: int) -> LawResult:
    """Permuting the outer slots and the inner list together leaves the composite unchanged."""

    def body(res):
        for k in range(cases):
            psi = gen.any_diagram(name="psi")
            inner = gen.inner_for(psi, keep_rate=0.25)
            perm = gen.permutation(len(psi.interior))
            a = compose(psi, inner)
            b = compose(permute_interior(psi, perm), [inner[j] for j in perm])
            if canonicalize(a) != canonicalize(b):
                res.fail(f"case {k}: permutation {perm} changes the composite")
            if canonicalize(permute_interior(psi, perm)) != canonicalize(psi):
                res.fail(f"case {k}: permutation {perm} changes the canonical form")
            res.cases += 1

    return _timed("operad equivariance", body)


def algebra_identity_law(gen: DiagramGenerator, cases: int, max_len: int = 6) -> LawResult:
    """Filling the identity diagram with ``g`` gives back ``g``."""

    def body(res):
        rng = gen.rng
        for k in range(cases):
            box = gen.box()
            g = random_filler(rng, box)
            filled = Filling(identity_diagram(box), [g])
            ins, _ = box_coords(box)
            for _ in range(3):
                ell = random_rows(rng, ins, rng.randint(0, max_len))
                got = evaluate_diagram(filled, ell).rows
                want = tuple(g.apply_rows(ell.rows))
                if got != want:
                    res.fail(f"case {k}: identity filled with {g!r} gives {list(got)}, expected {list(want)}")
            res.cases += 1

    return _timed("algebra identity", body)


@dataclass
class FunctorialityCase:
    outer: WiringDiagram
    inners: list
    fillers: list
    samples: list

    @property
    def all_moore(self) -> bool:
        flat = [f for fs in self.fillers for f in (fs if isinstance(fs, list) else [fs])]
        return all(f.is_moore for f in flat)

    def composite(self) -> Filling:
        flat = [f for fs in self.fillers for f in (fs if isinstance(fs, list) else [fs])]
        return Filling(compose(self.outer, self.inners), flat)


def functoriality_cases(gen: DiagramGenerator, cases: int, max_len: int = 6, moore_rate: float = 0.8) -> list[FunctorialityCase]:
    rng = gen.rng
    out = []
    for _ in range(cases):
        psi = gen.any_diagram(name="psi")
        inners = gen.inner_for(psi, keep_rate=0.15)
        fillers: list = []
        for slot, phi in zip(psi.interior, inners):
            if phi is KEEP:
                fillers.append(random_filler(rng, slot.box, moore_rate))
            else:
                fillers.append([random_filler(rng, s.box, moore_rate) for s in phi.interior])
        ins, _ = box_coords(psi.codomain)
        samples = [random_rows(rng, ins, rng.randint(0, max_len)) for _ in range(2)]
        out.append(FunctorialityCase(psi, inners, fillers, samples))
    return out


def functoriality_law(instances: list[FunctorialityCase]) -> LawResult:
    def body(res):
        for k, case in enumerate(instances):
            rep = check_functoriality(case.outer, case.inners, case.fillers, case.samples)
            if not rep.ok:
                res.fail(f"case {k}: {rep.mismatch}")
            res.cases += 1

    return _timed("algebra functoriality", body)


def historicality_law(instances: list[FunctorialityCase]) -> LawResult:
    """Every composite propagator has degree 1 and commutes with dropping the last row."""

    def body(res):
        for k, case in enumerate(instances):
            p = DiagramPropagator(case.composite())
            rep = check_historical(p, [s.rows for s in case.samples])
            if p.degree != 1 or not rep.ok:
                res.fail(f"case {k}: {rep.violation or f'degree {p.degree}'}")
            res.cases += 1

    return _timed("historicality of composites", body)


def session_equivalence_law(instances: list[FunctorialityCase], gen: DiagramGenerator, steps: int = 8) -> LawResult:
    """Incremental sessions agree with the reference evaluation on Moore-filled composites."""

    def body(res):
        rng = gen.rng
        for k, case in enumerate(instances):
            if not case.all_moore:
                continue
            filled = case.composite()
            ell = random_rows(rng, filled.ext_in, steps)
            a, b = run_session(filled, ell).rows, evaluate_diagram(filled, ell).rows
            if a != b:
                res.fail(f"case {k}: session gives {list(a)}, reference gives {list(b)}")
            res.cases += 1

    return _timed("session equals reference", body)


def moore_instances(gen: DiagramGenerator, cases: int, max_len: int = 6) -> list[FunctorialityCase]:
    """Functoriality instances whose fillers are all Moore machines."""
    return functoriality_cases(gen, cases, max_len, moore_rate=1.0)


def run_laws(seed: int = 0, cases: int = 200) -> list[LawResult]:
    """Run every suite from ``seed``; ``cases`` sets the size of each (the unit
    law for fillers uses half as many)."""
    gen = DiagramGenerator(random.Random(seed))
    results = [
        operad_identity_law(gen, cases),
        operad_associativity_law(gen, cases),
        operad_equivariance_law(gen, cases),
        algebra_identity_law(gen, max(1, cases // 2)),
    ]
    instances = functoriality_cases(gen, cases)
    results.append(functoriality_law(instances))
    results.append(historicality_law(instances))
    results.append(session_equivalence_law(instances, gen))
    return results

