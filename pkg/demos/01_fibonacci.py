"""Fibonacci numbers from two small wiring diagrams.

A box X that adds its two inputs sits inside a diagram phi with its output
fed back into one of its inputs, so phi computes running totals plus one.
Plugging phi into psi, whose only wire is a delayed loop, gives the
Fibonacci sequence.  This script loads the shipped bundle, runs it both as a
nested filling and as the flattened composite, and prints the per-tick trace.
"""
from wiring_operad import TupleList, evaluate_diagram, packaged_bundle, load_bundle, run_session
from wiring_operad.tracefmt import emit_trace
from wiring_operad import trace

bundle = load_bundle(packaged_bundle("fib.bundle"))
print("diagrams in the bundle:", ", ".join(bundle.diagrams))
for name in ("phi", "psi", "fib"):
    print(" ", bundle.diagrams[name].describe())

# psi filled with phi (itself filled with "+") versus the flat composite psi(phi)
nested = bundle.filling("psi")
flat = bundle.filling("fib")
ticks = TupleList.units(10)
print("\nnested, incremental session:", run_session(nested, ticks).column("c_Z"))
print("flat, reference evaluation: ", evaluate_diagram(flat, ticks).column("c_Z"))

# phi alone turns any input stream into running totals plus one
phi = bundle.filling("phi")
ell = TupleList.from_columns([(phi.ext_in[0], [5, 2, 4, 10])])
print("\nphi on [5, 2, 4, 10]:", evaluate_diagram(phi, ell).column("c_Y"))

print("\nwhat travels on each wire during the first three ticks:")
print(emit_trace(trace(flat, TupleList.units(3)), "table"))
