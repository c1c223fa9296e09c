"""Historical propagators: stream functions that answer before they are asked.

A propagator of degree n maps a list of k input rows to k+n output rows, and
its output on a prefix is a prefix of its output.  Moore machines are the
degree-1 case with an explicit state; they can be stepped one row at a time.
"""
from wiring_operad import (
    STAR,
    Coord,
    TupleList,
    check_historical,
    compose_propagators,
    delay_propagator,
    drop_last,
    make_value_domain,
    moore_propagator,
    prefix_propagator,
)

N0 = make_value_domain("N0", "naturals", basepoint=0)
S = make_value_domain("S", "finite", ["a", "b", "c", "d"])
x, y, s = Coord("x", N0), Coord("y", N0), Coord("s", S)


def col(coord, values):
    return TupleList.from_columns([(coord, values)])


total = moore_propagator([x], [y], (0,), lambda row, acc: ((acc + row[0],), acc + row[0]), 0, name="running sum")
print("running sum of [1, 3, 5, 7, 10]:", total(col(x, [1, 3, 5, 7, 10])).column("y"))

delay3 = delay_propagator(3, [s])
print("three-tick delay of [a, a, b, *, d]:", delay3(col(s, ["a", "a", "b", STAR, "d"])).column("s"))
print("dropping the last row of [0, 1, 4, 9, 16]:", drop_last(col(x, [0, 1, 4, 9, 16])).column("x"))

# degrees add under sequential composition
both = compose_propagators(total, delay_propagator(2, [y]))
print("\nrunning sum then a two-tick delay has degree", both.degree, "->", both(col(x, [1, 2])).column("y"))

# stepping a Moore machine: each fed row reveals one more output row
stepper = total.stepper()
seen = [stepper.peek()]
for v in (4, 4, 4):
    stepper.feed((v,))
    seen.append(stepper.peek())
print("stepped one row at a time:", [r[0] for r in seen])

# the checker catches a function that peeks at the future
cheat = prefix_propagator([x], [y], 1, lambda rows: [(rows[-1][0] if rows else 0,)] * (len(rows) + 1), name="cheat")
samples = [[(1,), (2,), (3,)]]
for label, rep in (
    ("running sum", check_historical(total, samples)),
    ("delay", check_historical(delay3, max_len=3)),  # finite domain: every list up to length 3
    ("cheat", check_historical(cheat, samples)),
):
    print(f"{label:>12}: {'historical' if rep.ok else rep.violation}")
