"""Limit spectral geometry of the deformed ensemble.

For an atomic measure ``nu = sum c_alpha delta(a_alpha)`` define

    p00(z) = sum c_alpha / |a_alpha - z|^2
    p0(z)  = sum c_alpha (a_alpha - z) / |a_alpha - z|^4
    p1(z)  = sum c_alpha / |a_alpha - z|^4

The limiting eigenvalue support is ``{z : p00(z) >= 1/tau}``, so its
boundary is the level set ``p00 = 1/tau``.  The real gradient of ``p00``
equals ``2 (Re p0, Im p0)``, which drives both the Newton projection onto
the boundary and the regular/quadratic dichotomy: a boundary point is
quadratic exactly when ``p0`` vanishes there, and regular otherwise.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ensemble import AtomMeasure

__all__ = [
    "EdgeClass",
    "EdgePoint",
    "BoundaryCurve",
    "p00",
    "p0",
    "p1",
    "trace_boundary",
    "refine_to_boundary",
    "classify_edge",
    "boundary_csv_rows",
]

#: default tolerance on |p00 - 1/tau| for membership in the boundary
DEFAULT_TOL_B = 1e-8
#: default dimensionless threshold on |p0| / p1^{3/4} below which a boundary
#: point counts as quadratic (p1^{3/4} carries the same scaling dimension
#: as p0, making the test covariant under rescaling of the plane)
DEFAULT_TOL_Q = 1e-6


class EdgeClass(Enum):
    REGULAR = "regular"
    QUADRATIC = "quadratic"
    NOT_ON_BOUNDARY = "not_on_boundary"


@dataclass(frozen=True)
class EdgePoint:
    """A candidate boundary point with its cached functionals and class."""

    z0: complex
    p00: float
    p0: complex
    p1: float
    classification: EdgeClass

    def digest_dict(self) -> dict:
        return {
            "z0": [self.z0.real, self.z0.imag],
            "p00": self.p00,
            "p0": [self.p0.real, self.p0.imag],
            "p1": self.p1,
            "class": self.classification.value,
        }


@dataclass(frozen=True)
class BoundaryCurve:
    """Traced level set ``p00 = 1/tau``: one polyline per connected piece.

    Closed pieces repeat their first vertex at the end.
    """

    polylines: tuple[np.ndarray, ...]
    tau: float

    @property
    def vertex_count(self) -> int:
        return sum(len(p) for p in self.polylines)

    def all_vertices(self) -> np.ndarray:
        return np.concatenate([np.asarray(p) for p in self.polylines])


def _prepare(nu: AtomMeasure, z):
    z = np.asarray(z, dtype=complex)
    a = nu.atoms_array().reshape((-1,) + (1,) * z.ndim)
    c = nu.weights_array().reshape((-1,) + (1,) * z.ndim)
    d = a - z[None, ...]
    r2 = (d * d.conj()).real
    if np.any(r2 == 0.0):
        raise ZeroDivisionError("functional evaluated at an atom of the measure")
    return c, d, r2


def p00(nu: AtomMeasure, z):
    """sum c_alpha / |a_alpha - z|^2 (scalar in, scalar out; arrays broadcast)."""
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    c, _, r2 = _prepare(nu, z)
    out = np.sum(c / r2, axis=0)
    return float(out) if scalar else out


def p0(nu: AtomMeasure, z):
    """sum c_alpha (a_alpha - z) / |a_alpha - z|^4."""
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    c, d, r2 = _prepare(nu, z)
    out = np.sum(c * d / (r2 * r2), axis=0)
    return complex(out) if scalar else out


def p1(nu: AtomMeasure, z):
    """sum c_alpha / |a_alpha - z|^4 (strictly positive off the atoms)."""
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    c, _, r2 = _prepare(nu, z)
    out = np.sum(c / (r2 * r2), axis=0)
    return float(out) if scalar else out


def classify_edge(
    nu: AtomMeasure,
    tau: float,
    z0: complex,
    tol_b: float = DEFAULT_TOL_B,
    tol_q: float = DEFAULT_TOL_Q,
) -> EdgePoint:
    """Classify ``z0`` against the boundary ``p00 = 1/tau``.

    Not on the boundary when ``|p00 - 1/tau| > tol_b``; otherwise quadratic
    when ``|p0| <= tol_q * p1^(3/4)`` and regular when the gradient survives.
    Invariant under relabeling of atoms.
    """
    z0 = complex(z0)
    v00 = p00(nu, z0)
    v0 = p0(nu, z0)
    v1 = p1(nu, z0)
    if abs(v00 - 1.0 / tau) > tol_b:
        cls = EdgeClass.NOT_ON_BOUNDARY
    elif abs(v0) <= tol_q * v1 ** 0.75:
        cls = EdgeClass.QUADRATIC
    else:
        cls = EdgeClass.REGULAR
    return EdgePoint(z0=z0, p00=v00, p0=v0, p1=v1, classification=cls)


def refine_to_boundary(
    nu: AtomMeasure,
    tau: float,
    z_guess: complex,
    tol: float = 1e-12,
    max_iter: int = 100,
    tol_q: float = DEFAULT_TOL_Q,
) -> EdgePoint:
    """Newton-project ``z_guess`` onto the level set ``p00 = 1/tau``.

    Each step moves along the real gradient ``2 p0`` (treated as a complex
    direction) by the scalar Newton length, so convergence is quadratic for
    guesses inside the basin.  Raises when the gradient degenerates (a
    near-quadratic point leaves the step direction undefined) or when
    ``max_iter`` steps fail to reach ``|p00 - 1/tau| <= tol``.
    """
    z = complex(z_guess)
    level = 1.0 / tau
    for _ in range(max_iter):
        grad = 2.0 * p0(nu, z)
        if abs(grad) <= tol_q * p1(nu, z) ** 0.75:
            raise ArithmeticError(
                "gradient of p00 vanished during refinement (near-quadratic point)"
            )
        g = p00(nu, z) - level
        if abs(g) <= tol:
            return classify_edge(nu, tau, z, tol_b=max(tol * 10, 1e-12), tol_q=tol_q)
        z = z - g * grad / (abs(grad) ** 2)
    raise ArithmeticError(f"boundary refinement did not converge in {max_iter} steps")


# ---------------------------------------------------------------------------
# marching squares with bisection-refined crossings

def trace_boundary(
    nu: AtomMeasure,
    tau: float,
    box: tuple[float, float, float, float],
    grid: int = 512,
    refine_tol: float = 1e-10,
) -> BoundaryCurve:
    """Trace the level set ``p00 = 1/tau`` inside ``box``.

    ``box`` is ``(re_min, re_max, im_min, im_max)``.  The field is sampled
    on a ``grid x grid`` lattice, sign changes along lattice edges are
    refined by bisection until ``|p00 - 1/tau| <= refine_tol`` at every
    produced vertex, and the per-cell segments are stitched into ordered
    polylines (closed where the contour closes).  Grid nodes falling within
    the atom-exclusion radius are treated as deep inside the support, which
    keeps the pole neighborhoods from corrupting the sign field.
    """
    if grid < 16:
        raise ValueError("grid must be at least 16")
    re0, re1, im0, im1 = map(float, box)
    if not (re1 > re0 and im1 > im0):
        raise ValueError("box must have positive extent")
    xs = np.linspace(re0, re1, grid)
    ys = np.linspace(im0, im1, grid)
    zz = xs[None, :] + 1j * ys[:, None]  # [row=y, col=x]

    atoms = nu.atoms_array()
    excl = 1e-6 * math.hypot(re1 - re0, im1 - im0)
    dmin = np.min(np.abs(zz[None, ...] - atoms.reshape(-1, 1, 1)), axis=0)
    near_atom = dmin <= excl

    f = _field(nu, tau, zz, near_atom)

    level = 1.0 / tau
    # sign-change masks for horizontal (along x) and vertical (along y) edges
    hmask = (f[:, :-1] * f[:, 1:]) < 0.0
    vmask = (f[:-1, :] * f[1:, :]) < 0.0
    h_pts = _bisect_edges(nu, level, zz[:, :-1][hmask], zz[:, 1:][hmask], refine_tol)
    v_pts = _bisect_edges(nu, level, zz[:-1, :][vmask], zz[1:, :][vmask], refine_tol)

    h_id = np.full(hmask.shape, -1, dtype=int)
    h_id[hmask] = np.arange(len(h_pts))
    v_id = np.full(vmask.shape, -1, dtype=int)
    v_id[vmask] = np.arange(len(v_pts)) + len(h_pts)
    points = np.concatenate([h_pts, v_pts]) if len(h_pts) or len(v_pts) else np.empty(0, complex)
    if points.size == 0:
        raise ValueError("empty contour: the boundary does not intersect the box")

    segments = _cell_segments(f, h_id, v_id)
    polylines = _stitch(segments, points)
    return BoundaryCurve(polylines=tuple(polylines), tau=tau)


def _field(nu, tau, zz, near_atom):
    z_safe = np.where(near_atom, zz + 10.0 * (1 + np.max(np.abs(nu.atoms_array()))), zz)
    f = p00(nu, z_safe) - 1.0 / tau
    # a node glued to an atom is far inside the support: force positive sign
    f = np.where(near_atom, 1.0, f)
    # exact zeros would break the strict sign tests; nudge them inside
    f = np.where(f == 0.0, np.finfo(float).tiny, f)
    return f


def _bisect_edges(nu, level, za, zb, tol, max_iter=200):
    """Vectorized bisection for p00 = level along straight grid edges."""
    za = np.asarray(za, dtype=complex).ravel()
    zb = np.asarray(zb, dtype=complex).ravel()
    if za.size == 0:
        return np.empty(0, dtype=complex)
    fa = p00(nu, za) - level
    lo, hi = za.copy(), zb.copy()
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = p00(nu, mid) - level
        done = np.abs(fm) <= tol
        if bool(np.all(done)):
            break
        same = (fm > 0) == (fa > 0)
        lo = np.where(same & ~done, mid, lo)
        fa = np.where(same & ~done, fm, fa)
        hi = np.where(~same & ~done, mid, hi)
    return mid


def _cell_segments(f, h_id, v_id):
    """Per-cell segment list as (edge_id_a, edge_id_b) pairs.

    Cell corners: 1=bottom-left, 2=bottom-right, 4=top-right, 8=top-left
    (rows index the y axis).  The ambiguous saddle cases 5 and 10 are split
    according to the sign of the cell-center field value.
    """
    inside = f > 0
    bl = inside[:-1, :-1]
    br = inside[:-1, 1:]
    tr = inside[1:, 1:]
    tl = inside[1:, :-1]
    case = (bl * 1 + br * 2 + tr * 4 + tl * 8).astype(int)

    bottom = h_id[:-1, :]   # crossing on bottom edge of each cell
    top = h_id[1:, :]
    left = v_id[:, :-1]
    right = v_id[:, 1:]

    segments = []
    ambiguous = (case == 5) | (case == 10)
    if np.any(ambiguous):
        rows, cols = np.nonzero(ambiguous)
        center = 0.25 * (f[rows, cols] + f[rows, cols + 1] + f[rows + 1, cols] + f[rows + 1, cols + 1])
        center_inside = center > 0
    else:
        rows = cols = center_inside = None

    # case -> list of (edge_a, edge_b) selectors
    table = {
        1: [("left", "bottom")], 2: [("bottom", "right")], 3: [("left", "right")],
        4: [("right", "top")], 6: [("bottom", "top")], 7: [("left", "top")],
        8: [("top", "left")], 9: [("top", "bottom")], 11: [("top", "right")],
        12: [("right", "left")], 13: [("right", "bottom")], 14: [("bottom", "left")],
    }
    edge_arrays = {"bottom": bottom, "top": top, "left": left, "right": right}
    for code, pairs in table.items():
        mask = case == code
        if not np.any(mask):
            continue
        r, c = np.nonzero(mask)
        for ea, eb in pairs:
            segments.extend(zip(edge_arrays[ea][r, c], edge_arrays[eb][r, c]))

    if rows is not None:
        for r, c, ci in zip(rows, cols, center_inside):
            code = case[r, c]
            # saddle: connect crossings so the center's phase stays coherent
            if (code == 5) == bool(ci):
                pairs = [("left", "bottom"), ("right", "top")]
            else:
                pairs = [("left", "top"), ("right", "bottom")]
            for ea, eb in pairs:
                segments.append((edge_arrays[ea][r, c], edge_arrays[eb][r, c]))

    return [(int(a), int(b)) for a, b in segments if a >= 0 and b >= 0]


def _stitch(segments, points):
    """Link per-cell segments into polylines via shared edge crossings."""
    adj: dict[int, list[int]] = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    unused = {tuple(sorted(s)) for s in segments}

    def take(a, b):
        unused.discard(tuple(sorted((a, b))))

    polylines = []
    # open chains first: start from degree-1 nodes (contour leaves the box)
    for start in sorted(n for n, nb in adj.items() if len(nb) == 1):
        chain = _walk(start, adj, unused, take)
        if chain:
            polylines.append(points[np.asarray(chain)])
    # remaining segments belong to closed loops
    while unused:
        start = min(unused)[0]
        chain = _walk(start, adj, unused, take)
        if chain:
            chain.append(chain[0])
            polylines.append(points[np.asarray(chain)])
    return polylines


def _walk(start, adj, unused, take):
    chain = [start]
    node = start
    while True:
        nxt = None
        for nb in adj[node]:
            if tuple(sorted((node, nb))) in unused:
                nxt = nb
                break
        if nxt is None:
            break
        take(node, nxt)
        chain.append(nxt)
        node = nxt
    return chain if len(chain) > 1 else []


def boundary_csv_rows(nu: AtomMeasure, tau: float, curve: BoundaryCurve,
                      tol_b: float = DEFAULT_TOL_B, tol_q: float = DEFAULT_TOL_Q):
    """Rows (re, im, p00, abs_p0, p1, class) for every traced vertex."""
    rows = []
    for poly in curve.polylines:
        for z in np.asarray(poly):
            ep = classify_edge(nu, tau, complex(z), tol_b=tol_b, tol_q=tol_q)
            rows.append((z.real, z.imag, ep.p00, abs(ep.p0), ep.p1,
                         ep.classification.value))
    return rows
