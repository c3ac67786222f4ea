"""Window subshifts: factor sets, periodic points, and embedding strings as free-group geodesics."""
from irslab.symdyn import thue_morse
from irslab.symdyn.freegeo import FreeWord, axis_of, embed_string
from irslab.symdyn.subshift import SubshiftFamily, factor_set, find_periodic, thue_morse_family

tm = thue_morse_family()
print("Thue-Morse prefix 32:", thue_morse(32))
for L in (3, 4, 8):
    print(f"L={L}: {len(factor_set(tm, L))} factors, shortest periodic word {find_periodic(tm, L, 16)}")

fam = SubshiftFamily.of(["0010010010", "0110"])
print("mixed family periodic word at L=3:", find_periodic(fam, 3, 8))
gamma = embed_string("0110")
print("embedding of 0110 as generator steps:", " ".join(str(FreeWord((s,))) for s in gamma.steps))
axis, period = axis_of(FreeWord.parse("f1 f0 f1^-1"))
print(f"axis of f1 f0 f1^-1: period {period}, passes through {axis.anchor}")
