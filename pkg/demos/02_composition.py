"""Building, composing and comparing wiring diagrams.

Diagrams are plain values.  Composition substitutes inner diagrams into the
slots of an outer one, and two diagrams count as equal when their canonical
forms agree, whatever their slot names, delay labels or slot order.
"""
from wiring_operad import (
    KEEP,
    Delay,
    Slot,
    WireId,
    WiringDiagram,
    canonicalize,
    compose,
    identity_diagram,
    make_box,
    make_value_domain,
    permute_interior,
    same_diagram,
    tensor_diagrams,
    validate_diagram,
)

w = WireId.parse
N = make_value_domain("N", "naturals", basepoint=1)
X = make_box("X", [("a_X", N), ("b_X", N)], [("c_X", N)])
Y = make_box("Y", [("a_Y", N)], [("c_Y", N)])
Z = make_box("Z", [], [("c_Z", N)])

phi = WiringDiagram(
    Y, (Slot("X", X),), (),
    {w("ext.out.c_Y"): w("X.out.c_X"), w("X.in.a_X"): w("ext.in.a_Y"), w("X.in.b_X"): w("X.out.c_X")},
    name="phi",
)
psi = WiringDiagram(
    Z, (Slot("Y", Y),), (Delay("d", N),),
    {w("ext.out.c_Z"): w("delay.d"), w("Y.in.a_Y"): w("delay.d"), w("delay.d"): w("Y.out.c_Y")},
    name="psi",
)

omega = compose(psi, [phi])
print("psi(phi) as built:     ", omega.describe())
print("psi(phi) canonicalized:", canonicalize(omega).diagram.describe())

# unit laws: wrapping in identities changes nothing, and KEEP leaves a slot alone
print("\nid(phi) == phi:", same_diagram(compose(identity_diagram(Y), [phi]), phi))
print("phi(id)  == phi:", same_diagram(compose(phi, [identity_diagram(X)]), phi))
print("psi(KEEP) == psi:", same_diagram(compose(psi, [KEEP]), psi))

# side by side, then with the two slots swapped
pair = tensor_diagrams([phi, psi])
swapped = permute_interior(pair, [1, 0])
print("\nslot order before and after the swap:", [s.name for s in pair.interior], [s.name for s in swapped.interior])
print("same diagram up to slot order:", same_diagram(pair, swapped))

# an exterior output wired straight to an exterior input has no delay in between
bad = WiringDiagram(Y, (), (), {w("ext.out.c_Y"): w("ext.in.a_Y")})
print("\nrejecting an instantaneous wire:")
for v in validate_diagram(bad):
    print(f"  {v.kind}: {v.message}")
