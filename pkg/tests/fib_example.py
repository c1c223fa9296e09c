"""The X, Y, Z boxes, the diagrams phi: X -> Y and psi: Y -> Z, and the "+" filler."""
from wiring_operad import (
    BlackBox,
    Delay,
    Port,
    Slot,
    WireId,
    WiringDiagram,
    make_value_domain,
    moore_propagator,
)
from wiring_operad.propagators import box_coords

N = make_value_domain("N", "naturals", basepoint=1)

X = BlackBox("X", (Port("a_X", N), Port("b_X", N)), (Port("c_X", N),))
Y = BlackBox("Y", (Port("a_Y", N),), (Port("c_Y", N),))
Z = BlackBox("Z", (), (Port("c_Z", N),))

w = WireId.parse

PHI = WiringDiagram(
    Y,
    (Slot("X", X),),
    (),
    {w("ext.out.c_Y"): w("X.out.c_X"), w("X.in.a_X"): w("ext.in.a_Y"), w("X.in.b_X"): w("X.out.c_X")},
    name="phi",
)

PSI = WiringDiagram(
    Z,
    (Slot("Y", Y),),
    (Delay("d_psi", N),),
    {w("ext.out.c_Z"): w("delay.d_psi"), w("Y.in.a_Y"): w("delay.d_psi"), w("delay.d_psi"): w("Y.out.c_Y")},
    name="psi",
)

FIB = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def plus(box=X, init=1):
    """ "+": first output ``init``, then the sum of the previous input row."""
    ins, outs = box_coords(box)
    return moore_propagator(ins, outs, (init,), lambda row, s: ((sum(row),), s), name="+")
