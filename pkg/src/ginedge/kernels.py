"""Incomplete-Gaussian moment integrals and the limiting edge kernel.

The basic object is the one-parameter family of moments

    J_s(z) = integral_0^inf v^s exp(-(v+z)^2 / 2) dv,        s > -1,

normalized to ``ie(s, z) = J_s(z) / (sqrt(2 pi) Gamma(s+1))`` with the
``s = -1`` member defined by continuity as ``exp(-z^2/2) / sqrt(2 pi)``.
``ie(0, x)`` is ``erfc(x / sqrt 2) / 2``, so the family generalizes the
complementary error function; integration by parts yields the three-term
recurrence ``J_{k+1} = k J_{k-1} - z J_k`` seeded by

    J_0 = sqrt(pi/2) erfc(z / sqrt 2),     J_1 = exp(-z^2/2) - z J_0.

The local correlation kernel of index ``n`` at a regular spectral edge is

    K_n(z, w) = sqrt(2/pi) Gamma(n+1) exp((z + conj w)^2 / 2)
                * sqrt(ie(n-1, -2 Re z) ie(n-1, -2 Re w)) * ie(n, z + conj w),

evaluated here in the overflow-free scaled form
``K_n = sqrt(A B) Jt_n(z + conj w) / pi`` where ``A, B`` are the real
``ie(n-1, .)`` factors and ``Jt_k = exp(zeta^2/2) J_k(zeta)`` follows the
same recurrence seeded by the scaled complementary error function.
``n = 0`` collapses to the classical Ginibre edge kernel with diagonal
``erfc(sqrt 2 Re z) / (2 pi)``.  Local n-point intensities are predicted by
determinants of this kernel.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.special as sp

from .ensemble import EnsembleSpec
from .geometry import EdgeClass, EdgePoint

__all__ = [
    "WindowError",
    "KernelModel",
    "ie",
    "ie_sequence",
    "raw_moments",
    "kernel",
    "kernel_diag",
    "predicted_correlation",
    "rescale",
    "unscale",
    "kernel_index",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
#: running condition-number estimate above which the forward recurrence is
#: declared inaccurate and quadrature takes over
RECURRENCE_COND_LIMIT = 1e6
#: default half-width of the evaluation window for kernel arguments
DEFAULT_WINDOW = 6.0
#: |z0| below which the edge point counts as the origin for the index rule
ZERO_THRESHOLD = 1e-12


class WindowError(ValueError):
    """Kernel argument outside the supported evaluation window."""


# ---------------------------------------------------------------------------
# quadrature backend

@lru_cache(maxsize=8)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


#: |Im z| above which the integration path is rotated off the real axis;
#: below it the oscillatory cancellation stays under ~e^{4.5} * eps
_SHIFT_IMAG = 3.0


def _panel_grid(a: float, b: float, panels: int):
    nodes, weights = _gl_nodes(24)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    v = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return v, w


def _tail_cutoff(powers, x_min: float) -> float:
    s_top = max(max(powers), 1.0)
    peak = 0.5 * (-x_min + math.sqrt(x_min * x_min + 4.0 * s_top))
    return max(12.0, -x_min + 12.0, peak + 12.0)


def _converge(evaluate, rtol: float) -> np.ndarray:
    prev = evaluate(16)
    prev_change = math.inf
    for panels in (32, 64, 128, 256, 512, 1024, 2048, 4096):
        cur = evaluate(panels)
        scale = np.maximum(np.abs(cur), 1e-300)
        change = float(np.max(np.abs(cur - prev) / scale))
        if change <= rtol:
            return cur
        # GL panels converge super-geometrically on these analytic paths, so
        # a refinement that no longer improves means the remaining change is
        # the rounding floor of a cancelling entry, not discretization error
        if panels >= 64 and change >= 0.25 * prev_change:
            return cur
        prev = cur
        prev_change = change
    return prev


def _quad_direct(powers, z: np.ndarray, rtol: float) -> np.ndarray:
    """Moment ladder over the real path [0, v_max]; needs |Im z| small."""
    v_max = _tail_cutoff(powers, float(np.min(z.real)))

    def evaluate(panels: int) -> np.ndarray:
        v, w = _panel_grid(0.0, v_max, panels)
        core = np.exp(-0.5 * (v[:, None] + z[None, :]) ** 2)
        out = np.empty((len(powers), len(z)), dtype=complex)
        for i, p in enumerate(powers):
            factor = w if p == 0 else w * v ** p
            out[i] = factor.astype(complex) @ core
        return out

    return _converge(evaluate, rtol)


def _quad_shifted(powers, z: np.ndarray, rtol: float) -> np.ndarray:
    """Moment ladder along the rotated path 0 -> -iy -> -iy + inf.

    All inputs must have ``Im z > 0``.  On the horizontal leg the exponent
    ``-(t + Re z)^2 / 2`` is real, so the violent oscillation (and with it
    the e^{y^2/2} cancellation that destroys the real-path quadrature) is
    gone; the short vertical leg has bounded modulus.  The integrand is
    entire apart from the v^s branch point at 0, and the deformed path
    stays inside the principal branch's domain.
    """
    x = z.real
    y = z.imag
    t_max = _tail_cutoff(powers, float(np.min(x)))

    def evaluate(panels: int) -> np.ndarray:
        u, wu = _panel_grid(0.0, 1.0, panels)
        t, wt = _panel_grid(0.0, t_max, panels)
        # vertical leg: v = -i y u, u in [0, 1], dv = -i y du
        va = -1j * np.outer(u, y)
        ea = np.exp(-0.5 * (x[None, :] + 1j * np.outer(1.0 - u, y)) ** 2)
        # horizontal leg: v = t - i y, dv = dt
        vb = t[:, None] - 1j * y[None, :]
        eb = np.exp(-0.5 * (t[:, None] + x[None, :]) ** 2)
        out = np.empty((len(powers), len(z)), dtype=complex)
        for i, p in enumerate(powers):
            fa = ea if p == 0 else va ** p * ea
            fb = eb if p == 0 else vb ** p * eb
            out[i] = (-1j * y) * (wu @ fa) + wt @ fb
        return out

    return _converge(evaluate, rtol)


def _quad_ladder(powers, z, rtol: float = 1e-13) -> np.ndarray:
    """Moments J_p for every ``p`` in ``powers`` at every ``z``.

    Dispatches between the real path and the rotated path per element, and
    uses ``J(conj z) = conj(J(z))`` to keep the rotation one-sided.  Valid
    for exponents ``p >= 2`` or integer ``p >= 0``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty((len(powers), len(z)), dtype=complex)
    small = np.abs(z.imag) <= _SHIFT_IMAG
    if np.any(small):
        out[:, small] = _quad_direct(powers, z[small], rtol)
    if np.any(~small):
        zz = z[~small]
        flip = zz.imag < 0
        vals = _quad_shifted(powers, np.where(flip, zz.conj(), zz), rtol)
        vals[:, flip] = np.conj(vals[:, flip])
        out[:, ~small] = vals
    return out


def _j_quad(s: float, z: np.ndarray, rtol: float = 1e-13) -> np.ndarray:
    """J_s by panel quadrature (see :func:`_quad_ladder` for the paths)."""
    return _quad_ladder([float(s)], z, rtol)[0]


def _j_smoothed(s: float, z: np.ndarray) -> np.ndarray:
    """J_s for any real s > -1, lifting rough exponents by parts.

    For non-integer ``s < 2`` the integrand's v^s factor has unbounded
    derivatives at 0, which stalls panel quadrature; one application of
    ``J_s = (J_{s+2} + z J_{s+1}) / (s+1)`` raises the exponent instead.
    """
    if s <= -1:
        raise ValueError("exponent must exceed -1")
    if s >= 2.0 or float(s).is_integer():
        return _j_quad(s, z)
    return (_j_smoothed(s + 2.0, z) + z * _j_smoothed(s + 1.0, z)) / (s + 1.0)


def raw_moments(n_max: int, z, rtol: float = 1e-13) -> np.ndarray:
    """All of ``J_0 .. J_{n_max}`` by quadrature with shared exponentials.

    Returns shape ``(n_max + 1, len(z))``.  This is the quadrature
    counterpart of :func:`ie_sequence`: the Gaussian factor dominates the
    cost and is identical for every moment order, so evaluating the whole
    ladder at once is about ``n_max`` times cheaper than separate calls.
    """
    return _quad_ladder(list(range(n_max + 1)), z, rtol)


# ---------------------------------------------------------------------------
# public moment evaluators

def ie(n: float, z):
    """Normalized moment ``ie(n, z)`` for real ``n >= -1``, complex ``z``.

    ``n = -1`` is the Gaussian limit member; ``n > -1`` is evaluated by
    adaptive panel quadrature of the defining integral.  Satisfies
    ``ie(n, conj z) == conj(ie(n, z))`` and ``ie(0, x) == erfc(x/sqrt 2)/2``.
    Accepts scalar or array ``z``.
    """
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    if n == -1:
        out = np.exp(-0.5 * zz * zz) / _SQRT_2PI
    elif n > -1:
        out = _j_smoothed(float(n), zz) / (_SQRT_2PI * math.exp(sp.gammaln(n + 1.0)))
    else:
        raise ValueError(f"parameter n must be >= -1, got {n}")
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def ie_sequence(n_max: int, z: complex) -> tuple[np.ndarray, bool]:
    """Raw moments ``J_0 .. J_{n_max}`` by the three-term recurrence.

    Returns ``(values, accurate)``.  ``accurate`` is False when the running
    condition estimate of the recurrence exceeds ``RECURRENCE_COND_LIMIT``;
    the caller should then recompute through :func:`ie` quadrature instead
    of trusting the tail of the sequence.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max > 64:
        raise ValueError("n_max above 64 is not supported")
    z = complex(z)
    j = np.empty(n_max + 1, dtype=complex)
    j[0] = math.sqrt(math.pi / 2.0) * sp.erfc(z / math.sqrt(2.0))
    if n_max == 0:
        return j, True
    gauss = np.exp(-0.5 * z * z)
    j[1] = gauss - z * j[0]
    # cond_k bounds the amplification of the seeds' relative error into J_k;
    # the J_1 seed step already cancels, which must enter the estimate
    cond_prev = 1.0
    cond_cur = (abs(gauss) + abs(z) * abs(j[0])) / max(abs(j[1]), 1e-300)
    worst = cond_cur
    for k in range(1, n_max):
        j[k + 1] = k * j[k - 1] - z * j[k]
        denom = max(abs(j[k + 1]), 1e-300)
        cond_next = (k * cond_prev * abs(j[k - 1]) + abs(z) * cond_cur * abs(j[k])) / denom
        worst = max(worst, cond_next)
        cond_prev, cond_cur = cond_cur, cond_next
    return j, worst <= RECURRENCE_COND_LIMIT


def _j_values(n: int, y: np.ndarray) -> np.ndarray:
    """Raw J_n on an array, recurrence with elementwise quadrature fallback."""
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    j_prev = math.sqrt(math.pi / 2.0) * sp.erfc(y / math.sqrt(2.0))
    if n == 0:
        return j_prev
    gauss = np.exp(-0.5 * y * y)
    j_cur = gauss - y * j_prev
    ok = np.ones(y.shape, dtype=bool)
    cond_prev = np.ones(y.shape)
    cond_cur = (np.abs(gauss) + np.abs(y) * np.abs(j_prev)) \
        / np.maximum(np.abs(j_cur), 1e-300)
    ok &= cond_cur <= RECURRENCE_COND_LIMIT
    for k in range(1, n):
        j_next = k * j_prev - y * j_cur
        denom = np.maximum(np.abs(j_next), 1e-300)
        cond_next = (k * cond_prev * np.abs(j_prev) + np.abs(y) * cond_cur * np.abs(j_cur)) / denom
        ok &= cond_next <= RECURRENCE_COND_LIMIT
        j_prev, j_cur = j_cur, j_next
        cond_prev, cond_cur = cond_cur, cond_next
    if not bool(np.all(ok)):
        j_cur = j_cur.copy()
        j_cur[~ok] = _j_quad(float(n), y[~ok])
    return j_cur


def _scaled_j_n(n: int, zeta: np.ndarray) -> np.ndarray:
    """``exp(zeta^2/2) J_n(zeta)`` without forming the huge exponential.

    The scaled sequence obeys the same recurrence with the seed
    ``Jt_0 = sqrt(pi/2) erfcx(zeta / sqrt 2)`` (scaled complementary error
    function, evaluated through the Faddeeva function for complex input),
    so no intermediate ever overflows inside the evaluation window.
    Elements whose condition estimate blows up are recomputed by quadrature
    times the explicit exponential, which stays representable for
    ``|Re zeta| <= 2 * window``.
    """
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    erfcx = sp.wofz(1j * zeta / math.sqrt(2.0))
    j_prev = math.sqrt(math.pi / 2.0) * erfcx
    if n == 0:
        return j_prev
    j_cur = 1.0 - zeta * j_prev
    ok = np.ones(zeta.shape, dtype=bool)
    cond_prev = np.ones(zeta.shape)
    cond_cur = (1.0 + np.abs(zeta) * np.abs(j_prev)) \
        / np.maximum(np.abs(j_cur), 1e-300)
    ok &= cond_cur <= RECURRENCE_COND_LIMIT
    for k in range(1, n):
        j_next = k * j_prev - zeta * j_cur
        denom = np.maximum(np.abs(j_next), 1e-300)
        cond_next = (k * cond_prev * np.abs(j_prev) + np.abs(zeta) * cond_cur * np.abs(j_cur)) / denom
        ok &= cond_next <= RECURRENCE_COND_LIMIT
        j_prev, j_cur = j_cur, j_next
        cond_prev, cond_cur = cond_cur, cond_next
    if not bool(np.all(ok)):
        bad = ~ok
        j_cur = j_cur.copy()
        j_cur[bad] = np.exp(0.5 * zeta[bad] ** 2) * _j_quad(float(n), zeta[bad])
    return j_cur


def _ie_real(n: int, y: np.ndarray) -> np.ndarray:
    """ie(n, y) for real arrays y, n integer >= -1; returns real values."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if n == -1:
        return np.exp(-0.5 * y * y) / _SQRT_2PI
    vals = _j_values(n, y.astype(complex)).real
    return vals / (_SQRT_2PI * math.gamma(n + 1.0))


# ---------------------------------------------------------------------------
# kernel model

@dataclass(frozen=True)
class KernelModel:
    """Limit kernel of a regular edge point: index, geometry, window."""

    index: int
    edge: EdgePoint
    tau: float
    window: float = DEFAULT_WINDOW

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("kernel index must be nonnegative")
        if self.edge.classification is not EdgeClass.REGULAR:
            raise ValueError("kernel model requires a regular edge point")
        if self.window <= 0:
            raise ValueError("window must be positive")

    @classmethod
    def for_spec(cls, spec: EnsembleSpec, edge: EdgePoint,
                 window: float = DEFAULT_WINDOW) -> "KernelModel":
        return cls(index=kernel_index(spec, edge), edge=edge, tau=spec.tau,
                   window=window)


def kernel_index(spec: EnsembleSpec, edge: EdgePoint,
                 zero_threshold: float = ZERO_THRESHOLD) -> int:
    """Kernel index: r0, augmented by R0 when the edge point is the origin.

    The deterministic eigenvalues sitting exactly at the edge point set the
    index; the R0 trailing zeros of the mean matrix coincide with the edge
    point only when ``z0 = 0``.
    """
    if edge.classification is not EdgeClass.REGULAR:
        raise ValueError("kernel index is defined for regular edge points only")
    if abs(edge.z0) <= zero_threshold:
        return spec.r0 + spec.R0
    return spec.r0


def _check_window(model: KernelModel, *points) -> None:
    for p in points:
        if np.max(np.abs(np.asarray(p))) > model.window + 1e-12:
            raise WindowError(
                f"kernel argument outside evaluation window |z| <= {model.window}"
            )


def kernel(model: KernelModel, z: complex, w: complex) -> complex:
    """K_n(z, w); Hermitian with real nonnegative diagonal."""
    _check_window(model, z, w)
    z = complex(z)
    w = complex(w)
    n = model.index
    a = _ie_real(n - 1, np.array([-2.0 * z.real, -2.0 * w.real]))
    jt = _scaled_j_n(n, np.array([z + np.conj(w)], dtype=complex))[0]
    return complex(math.sqrt(a[0] * a[1]) * jt / math.pi)


def kernel_diag(model: KernelModel, x) -> np.ndarray | float:
    """Kernel diagonal K_n(z, z), a function of ``x = Re z`` alone."""
    scalar = np.isscalar(x) or getattr(x, "ndim", 0) == 0
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    _check_window(model, xx)
    n = model.index
    a = _ie_real(n - 1, -2.0 * xx)
    jt = _scaled_j_n(n, (2.0 * xx).astype(complex)).real
    out = a * jt / math.pi
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))


def predicted_correlation(model: KernelModel, points) -> float:
    """Determinantal n-point intensity ``det [K(z_i, z_j)]`` at scaled points.

    Real and nonnegative up to rounding for any point configuration;
    exactly zero (rank deficiency) when a point repeats.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    if pts.size == 0:
        raise ValueError("at least one point required")
    _check_window(model, pts)
    n = model.index
    a = _ie_real(n - 1, -2.0 * pts.real)
    zeta = pts[:, None] + np.conj(pts)[None, :]
    jt = _scaled_j_n(n, zeta.ravel()).reshape(zeta.shape)
    k = np.sqrt(np.outer(a, a)) * jt / math.pi
    det = np.linalg.det(k)
    return float(det.real)


# ---------------------------------------------------------------------------
# edge rescaling map

def _scale_factor(edge: EdgePoint, n_dim: int) -> complex:
    if edge.classification is not EdgeClass.REGULAR:
        raise ValueError("rescaling requires a regular edge point")
    if n_dim < 1:
        raise ValueError("N must be at least 1")
    # sqrt(p1) is the positive real root
    return -np.conj(edge.p0) * math.sqrt(n_dim) / math.sqrt(edge.p1)


def rescale(edge: EdgePoint, N: int, z):
    """Map eigenvalues near the edge into the local dimensionless frame.

    ``zhat = -(conj(p0) sqrt N / sqrt p1) (z - z0)``; points just outside
    the support land at positive ``Re zhat``.
    """
    s = _scale_factor(edge, N)
    if np.isscalar(z):
        return complex(s * (complex(z) - edge.z0))
    return s * (np.asarray(z, dtype=complex) - edge.z0)


def unscale(edge: EdgePoint, N: int, zhat):
    """Inverse of :func:`rescale`."""
    s = _scale_factor(edge, N)
    if np.isscalar(zhat):
        return complex(edge.z0 + complex(zhat) / s)
    return edge.z0 + np.asarray(zhat, dtype=complex) / s
