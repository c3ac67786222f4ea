"""Closed chains of pants converge to the open chain in a fixed window of PSL(2,R)."""
from irslab import chabauty, pantsurf

for R, W in ((5.0, 6), (30.0, 5)):
    curve = chabauty.lattice_limit_experiment("0", (1, 2, 4), R=R, W=W)
    print(f"R={R:g} W={W}:", ", ".join(f"k={p.k} d={p.distance:.2e}" for p in curve))

g = pantsurf.genus_two()
for W in (2, 4, 6):
    print(f"genus two, words up to {W}: largest gap in orbit directions {chabauty.direction_density(g.generators, g.base_frame.base, W):.4f}")
