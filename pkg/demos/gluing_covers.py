"""Reweighted gluing patterns and the search for a finite cover explaining a window."""
import numpy as np

from irslab import glue
from irslab.symdyn import Bernoulli, thue_morse

geom = glue.BlockGeometry(1, 3, 1)
m = Bernoulli(("1/2", "1/2"))
X = glue.sample_nu_prime_batch(geom, m, 1, 20_000, 0)
print("reweighted weight of symbol 1:", glue.nu_prime_weight(geom, m), "empirical", np.mean(X[:, 0] == 1))

unit = glue.BlockGeometry(1, 1, 1)
for name, alpha in (("(001)^20", "001" * 20), ("Thue-Morse 64", thue_morse(64))):
    res = glue.find_cover(alpha, unit, 8, 16)
    print(f"{name}: cover word {res.word}, searched {res.n_hypotheses} hypotheses")

chain = glue.realize_chain("0110", seed=1)
print("chain realization of 0110, internal lengths ok:", glue.internal_lengths_ok(chain))
