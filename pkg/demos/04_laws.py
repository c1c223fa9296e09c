"""Checking the algebraic laws on randomly generated diagrams.

Each suite draws its instances from a seeded generator, so a failure can be
reproduced from the seed alone.  The same suites back ``wd laws``.
"""
import random

from wiring_operad.generate import DiagramGenerator
from wiring_operad.laws import functoriality_cases, functoriality_law, run_laws

for result in run_laws(seed=7, cases=100):
    print(result.summary())
    for failure in result.failures[:3]:
        print("   ", failure)

# a closer look at one functoriality instance with a couple of slots
gen = DiagramGenerator(random.Random(7))
case = next(c for c in functoriality_cases(gen, 50) if len(c.outer.interior) >= 2)
print("\nouter diagram:", case.outer.describe())
for i, inner in enumerate(case.inners):
    print(f"  slot {i} gets", inner.describe() if hasattr(inner, "describe") else "KEEP")
print("filled composite equals nested filling:", functoriality_law([case]).ok)
