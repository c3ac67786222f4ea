"""Iterate a hyperbolic isometry on a boundary arc and watch the complement collapse."""
import math

from irslab.hyp2 import Arc, compose, diag, fixed_points, ns_iterate, rotation, translation_length

h = compose(rotation(0.7), compose(diag(0.9), rotation(-0.7)))
att, rep = fixed_points(h)
ell = translation_length(h)
U = Arc(att.theta + 0.3, 2 * math.pi - 0.6)
print(f"translation length {ell:.6f}, attracting angle {att.theta:.6f}")
prev = U.complement_length
for k, arc in enumerate(ns_iterate(h, U, 12), start=1):
    c = arc.complement_length
    print(f"k={k:2d}  complement {c:.3e}  step ratio {c / prev:.4f}  (e^-l = {math.exp(-ell):.4f})")
    prev = c
