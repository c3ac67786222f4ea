"""Local Hilbert symbols over Q(sqrt 2) at a split prime and a similarity obstruction."""
from irslab import arith
from irslab.arith import DiagonalForm, PadicPlace

for root in (3, 4):
    place = PadicPlace(7, root, 2)
    print(f"sqrt2 -> {root} mod 7: (7, -3 sqrt2) = {arith.hilbert_symbol(7, arith.QuadElem.parse('-3√2', 2), place)}")

place = PadicPlace(7, 3, 2)
q = DiagonalForm.parse("1,1,1,1,-3√2", 2)
q2 = DiagonalForm.parse("7,1,1,1,-3√2", 2)
print("eps(q') =", arith.eps_invariant(q2, place))
print(arith.similarity_obstruction(q, q2, place).to_json())
print(arith.similarity_obstruction(DiagonalForm.parse("1,1,1,-3√2", 2),
                                   DiagonalForm.parse("7,1,1,-3√2", 2), place).to_json())
