"""Sample glued pants over a ball of the 3-valent tree and compare systoles with the tree bound."""
import math

from irslab import pantsurf

R, W = 2, 8
for l in (4.0, 6.0):
    tree = pantsurf.TreeSpec.regular(R)
    law = pantsurf.PointMass(l)
    bound = min((l - 1) / 2, R * math.asinh(1 / math.sinh(l)))
    sys_ = [pantsurf.systole_oracle(pantsurf.sample_surface(tree, law, s), W, max_displacement=20.0)
            for s in range(10)]
    print(f"l={l:g} R={R}: {tree.n_vertices} pants, systoles min {min(sys_):.6f}, lower bound {bound:.3e}")

law = pantsurf.LogNormal(0.5, 0.5)
for R in (1, 2, 3):
    g = pantsurf.sample_surface(pantsurf.TreeSpec.regular(R), law, 3)
    inj = pantsurf.inj_radius_at(g, g.base_frame, 6, max_displacement=12.0)
    print(f"lognormal lengths, R={R}: rank {g.rank}, injectivity radius at base point {inj:.4f}")
