"""Certify the supporting matrix-integral identities numerically.

Each identity is evaluated on both sides by unrelated methods; Monte Carlo
verdicts carry a standard error and pass within three standard errors.
"""

import numpy as np

from ginedge.ensemble import AtomMeasure
from ginedge.geometry import refine_to_boundary
from ginedge.oracles import (
    verify_andreief,
    verify_cone_integral,
    verify_hciz,
    verify_tensor_commutation,
    verify_triangular_gaussian,
)

rng = np.random.default_rng(7)

print(verify_tensor_commutation(2, 3, 10, rng).line())
print(verify_cone_integral(2, 3, [-1.0, -1.0], 400_000, rng).line())
print(verify_hciz(2, [0.0, 1.0], [0.0, 1.0], 400_000, rng).line())
print(verify_andreief(2, [("mono", 0), ("mono", 1)],
                      [("mono", 0), ("mono", 1)], ("uniform", 0.0, 1.0)).line())

nu = AtomMeasure(atoms=(-1.0, 1.0), weights=(0.5, 0.5))
edge = refine_to_boundary(nu, 1.0, 0.5 + 0.8j)
print(verify_triangular_gaussian(2, nu, edge.z0, 1.0, rng,
                                 mc_samples=200_000).line())
