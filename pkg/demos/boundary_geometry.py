"""Trace spectral-support boundaries and classify edge points.

Walks through the three geometric primitives: evaluating the limit-measure
functionals, tracing the level set p00 = 1/tau, and the regular/quadratic
dichotomy driven by the gradient p0.
"""

import numpy as np

from ginedge.ensemble import AtomMeasure
from ginedge.geometry import classify_edge, p0, p00, p1, refine_to_boundary, trace_boundary

# a single atom at the origin gives the classical circular support
single = AtomMeasure(atoms=(0.0,), weights=(1.0,))
print("single atom, tau = 1:")
print("  p00(1) =", p00(single, 1.0), " p0(1) =", p0(single, 1.0),
      " p1(1) =", p1(single, 1.0))
curve = trace_boundary(single, 1.0, (-2, 2, -2, 2), grid=256)
radii = np.abs(curve.all_vertices())
print(f"  traced {curve.vertex_count} vertices, radius spread "
      f"[{radii.min():.12f}, {radii.max():.12f}]  (unit circle)")

# two symmetric atoms: the midpoint is a quadratic (critical) boundary point
pair = AtomMeasure(atoms=(-1.0, 1.0), weights=(0.5, 0.5))
print("\nsymmetric atoms at -1, +1, tau = 1:")
for z in (0.0, 1.0 + 1.0j):
    ep = classify_edge(pair, 1.0, z)
    print(f"  z = {z}: p00 = {ep.p00:.6f}, |p0| = {abs(ep.p0):.3e}, "
          f"class = {ep.classification.value}")

# at small tau the support splits into two islands
islands = trace_boundary(pair, 0.2, (-2, 2, -2, 2), grid=256)
closed = [p for p in islands.polylines if p[0] == p[-1]]
print(f"  tau = 0.2 support has {len(closed)} separate components")

# Newton projection onto the boundary from a nearby guess
asym = AtomMeasure(atoms=(1.0, 2.0j), weights=(0.5, 0.5))
ep = refine_to_boundary(asym, 8.0 / 5.0, 0.05)
print("\nasymmetric measure, tau = 8/5: refined edge near the origin:")
print(f"  z0 = {ep.z0:.3e}, p00 = {ep.p00:.15f} (= 1/tau = 0.625), "
      f"class = {ep.classification.value}")
