"""Evaluate the limiting edge kernel across indices.

The kernel diagonal is the predicted eigenvalue density per unit local
area: 1/pi deep inside the support, decaying across the edge.  Index 0 is
the classical sharp-edge profile erfc(sqrt(2) x) / (2 pi); higher indices
(deterministic eigenvalues pinned at the edge point) develop a fat
algebraic tail outside.
"""

import math

import numpy as np

from ginedge.ensemble import AtomMeasure
from ginedge.geometry import classify_edge
from ginedge.kernels import KernelModel, ie, kernel_diag, predicted_correlation

edge = classify_edge(AtomMeasure(atoms=(0.0,), weights=(1.0,)), 1.0, 1.0)

print("moment integrals at z = 0:")
for n in (-1, 0, 1, 2):
    print(f"  ie({n:+d}, 0) = {ie(n, 0.0).real:.12f}")
print("  (1/sqrt(2 pi) =", 1.0 / math.sqrt(2 * math.pi), ")")

print("\nkernel diagonal profiles (density per unit area):")
xs = np.array([-6.0, -3.0, -1.0, 0.0, 1.0, 2.0, 4.0])
header = "      x: " + "".join(f"{x:>10.1f}" for x in xs)
print(header)
for n in range(4):
    model = KernelModel(index=n, edge=edge, tau=1.0)
    row = kernel_diag(model, xs)
    print(f"  K_{n}:   " + "".join(f"{v:>10.6f}" for v in row))
print("  bulk value 1/pi =", 1 / math.pi)
print("  every index shares K_n(0,0) = 1/(2 pi) =", 1 / (2 * math.pi))

print("\ndeterminantal repulsion (index 0, two points approaching):")
model = KernelModel(index=0, edge=edge, tau=1.0)
for sep in (3.0, 1.0, 0.3, 0.05):
    pts = [-1.0 + 0.0j, -1.0 + sep * 1.0j]
    r2 = predicted_correlation(model, pts)
    prod = np.prod([predicted_correlation(model, [p]) for p in pts])
    print(f"  separation {sep:>5.2f}: R2 / (R1 R1) = {r2 / prod:.4f}")
