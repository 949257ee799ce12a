"""Numerical certification of the supporting matrix-integral identities.

Five independent facts underpin the determinantal edge analysis; each gets
a verifier that computes both sides by unrelated means and reports an
:class:`OracleVerdict`:

* perfect-shuffle commutation of Kronecker products,
* the integral of ``det(H)^{r0-n}`` over non-positive definite Hermitian
  matrices with pinned diagonal,
* a Gaussian integral over coupled strictly upper triangular matrices whose
  closed form is controlled by the edge functionals,
* the Harish-Chandra/Itzykson-Zuber integral over the unitary group,
* Andreief's determinant-product integration identity.

Monte Carlo verdicts carry a standard error and pass at three standard
errors; closed-form and quadrature verdicts pass at 1e-8 relative.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import AtomMeasure, RngStream
from .geometry import p0 as geo_p0
from .geometry import p00 as geo_p00

__all__ = [
    "OracleVerdict",
    "haar_unitary",
    "perfect_shuffle",
    "verify_tensor_commutation",
    "verify_cone_integral",
    "verify_triangular_gaussian",
    "verify_hciz",
    "verify_andreief",
]

CLOSED_FORM_TOL = 1e-8
#: denominator floor for rel_error; keeps identities whose exact value is 0
#: (degenerate determinants) from dividing rounding noise by rounding noise
_REL_FLOOR = 1e-8


@dataclass(frozen=True)
class OracleVerdict:
    """Outcome of one identity check.

    ``rel_error = |lhs - rhs| / max(|rhs|, floor)``.  Monte Carlo verdicts
    carry ``mc_std_error`` (standard error of the lhs estimator) and pass
    when the deviation stays within three standard errors.
    """

    name: str
    lhs: complex
    rhs: complex
    rel_error: float
    method: str                   # "closed_form" | "monte_carlo" | "quadrature"
    passed: bool
    samples: int = 0
    mc_std_error: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ""
        if self.mc_std_error is not None:
            extra = f" mc_std_error={self.mc_std_error:.3e} samples={self.samples}"
        return (f"{status} {self.name}: method={self.method} "
                f"rel_error={self.rel_error:.3e}{extra}")


def _verdict(name, lhs, rhs, method, samples=0, mc_std_error=None,
             tol=CLOSED_FORM_TOL) -> OracleVerdict:
    rel = abs(lhs - rhs) / max(abs(rhs), _REL_FLOOR)
    if mc_std_error is None:
        passed = rel <= tol
    else:
        passed = abs(lhs - rhs) <= 3.0 * mc_std_error
    return OracleVerdict(name=name, lhs=complex(lhs), rhs=complex(rhs),
                         rel_error=float(rel), method=method, passed=passed,
                         samples=samples, mc_std_error=mc_std_error)


# ---------------------------------------------------------------------------
# Haar sampling

def haar_unitary(n: int, rng: np.random.Generator, batch: int = 1) -> np.ndarray:
    """Haar-distributed unitaries via QR with phase-normalized R diagonal.

    Plain QR of a Ginibre sample is not Haar; rescaling each column of Q by
    the phase of the corresponding R diagonal entry fixes the distribution.
    Returns shape ``(batch, n, n)``.
    """
    g = rng.standard_normal((batch, n, n)) + 1j * rng.standard_normal((batch, n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1).copy()
    d /= np.abs(d)
    return q * d[:, None, :]


# ---------------------------------------------------------------------------
# Kronecker commutation

def perfect_shuffle(p: int, m: int) -> np.ndarray:
    """Permutation S with ``S (A (x) B) S_cols^T = B (x) A`` row action.

    ``S[beta * p + alpha, alpha * m + beta] = 1`` for ``alpha < p``,
    ``beta < m``; it satisfies ``S^{-1} = S^T = perfect_shuffle(m, p)``.
    """
    s = np.zeros((p * m, p * m))
    alpha = np.repeat(np.arange(p), m)
    beta = np.tile(np.arange(m), p)
    s[beta * p + alpha, alpha * m + beta] = 1.0
    return s


def verify_tensor_commutation(p: int, m: int, trials: int,
                              rng: np.random.Generator) -> OracleVerdict:
    """Shuffle identity on random rectangular complex A (p x q), B (m x n)."""
    if p > 8 or m > 8:
        raise ValueError("row dimensions above 8 are not supported")
    s_row = perfect_shuffle(p, m)
    inv_err = max(
        float(np.max(np.abs(s_row.T - perfect_shuffle(m, p)))),
        float(np.max(np.abs(s_row @ s_row.T - np.eye(p * m)))),
    )
    worst = inv_err
    for _ in range(trials):
        q = int(rng.integers(1, 9))
        n = int(rng.integers(1, 9))
        a = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
        b = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        s_col = perfect_shuffle(q, n)
        lhs = s_row @ np.kron(a, b) @ np.linalg.inv(s_col)
        dev = float(np.linalg.norm(lhs - np.kron(b, a), "fro"))
        worst = max(worst, dev)
    # both sides are explicit matrices; the verdict records the worst
    # Frobenius deviation directly
    return OracleVerdict(name="tensor_commutation", lhs=worst, rhs=0.0,
                         rel_error=worst, method="closed_form",
                         passed=worst <= 1e-13, samples=trials)


# ---------------------------------------------------------------------------
# cone integral over non-positive definite Hermitian matrices

def _cone_rhs(n: int, r0: int, diag) -> float:
    value = math.pi ** (n * (n - 1) / 2.0) / math.factorial(r0 - 1) ** n
    for k in range(1, n + 1):
        value *= math.factorial(r0 - k)
    for h in diag:
        value *= h ** (r0 - 1)
    return value


def verify_cone_integral(n: int, r0: int, diag, samples: int,
                         rng: np.random.Generator) -> OracleVerdict:
    """Box Monte Carlo of the pinned-diagonal cone integral vs closed form.

    Off-diagonal entries are sampled uniformly in the componentwise box
    ``|h_ij| <= sqrt(h_ii h_jj)`` (which contains the admissible region,
    since every 2x2 principal minor of ``H <= 0`` is nonnegative), the
    non-positive-definiteness indicator is applied, and the integrand mean
    is scaled by the box volume.
    """
    diag = [float(h) for h in diag]
    if n not in (1, 2, 3):
        raise ValueError("only n in {1, 2, 3} is supported")
    if r0 < n:
        raise ValueError("r0 must be at least n")
    if len(diag) != n or any(h >= 0 for h in diag):
        raise ValueError("diag must hold n strictly negative reals")
    rhs = _cone_rhs(n, r0, diag)
    if n == 1:
        return _verdict("cone_integral", rhs, rhs, "closed_form")

    off = [(i, j) for i in range(n) for j in range(i + 1, n)]
    radii = np.array([math.sqrt(diag[i] * diag[j]) for i, j in off])
    volume = float(np.prod((2.0 * radii) ** 2))

    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = 200_000
    while done < samples:
        b = min(chunk, samples - done)
        u = rng.uniform(-1.0, 1.0, size=(b, len(off), 2)) * radii[None, :, None]
        h = np.zeros((b, n, n), dtype=complex)
        idx_i = [i for i, _ in off]
        idx_j = [j for _, j in off]
        h[:, idx_i, idx_j] = u[..., 0] + 1j * u[..., 1]
        h += np.conj(np.swapaxes(h, 1, 2))
        h[:, np.arange(n), np.arange(n)] = np.asarray(diag)
        if n == 2:
            det = (diag[0] * diag[1] - np.abs(h[:, 0, 1]) ** 2).real
            ok = det >= 0.0
        else:
            eig = np.linalg.eigvalsh(h)
            ok = np.all(eig <= 1e-14, axis=1)
            det = np.linalg.det(h).real
        vals = np.where(ok, det ** (r0 - n), 0.0)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals ** 2))
        done += b

    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    lhs = volume * mean
    std_err = volume * math.sqrt(var / samples)
    return _verdict("cone_integral", lhs, rhs, "monte_carlo",
                    samples=samples, mc_std_error=std_err)


# ---------------------------------------------------------------------------
# Gaussian integral over coupled strictly upper triangular matrices

def _triangular_rhs(n: int, atoms: AtomMeasure, z0: complex, tau: float) -> float:
    t = len(atoms.atoms)
    f = np.abs(atoms.atoms_array() - z0) ** 2
    c = atoms.weights_array()
    p0_val = geo_p0(atoms, z0)
    half = n * (n - 1) / 2.0
    base = (f[0] / c[0]) * float(np.prod(f)) * abs(p0_val) ** 2
    return (tau ** (half * (t - 2))) * base ** (-half) * math.pi ** (half * (t - 1))


def _slot_exponent(g: np.ndarray, t_ij: complex, atoms: AtomMeasure,
                   z0: complex, tau: float) -> float | np.ndarray:
    """Exponent of the integrand for one strictly-upper slot.

    ``g`` has shape (..., t-1): the slot entries of G_2..G_t.
    """
    a = atoms.atoms_array()
    c = atoms.weights_array()
    f = np.abs(a - z0) ** 2
    kappa = np.sqrt(tau * c[1:] / f[1:])
    combo = t_ij + g @ kappa.astype(complex)
    term1 = -(f[0] ** 2 / (tau ** 2 * c[0])) * np.abs(combo) ** 2
    term2 = -(np.abs(g) ** 2 @ (f[1:] / tau))
    mix = -(a[0] - z0) * t_ij + g @ (kappa * (a[1:] - a[0]))
    term3 = np.abs(mix) ** 2 / tau
    return term1 + term2 + term3


def _slot_quadratic_form(t_ij: complex, atoms: AtomMeasure, z0: complex,
                         tau: float):
    """Reconstruct E(x) = -x' S x + v . x + c exactly from evaluations.

    The exponent is a quadratic polynomial of the 2(t-1) real coordinates,
    so finite evaluations at 0, +-e_k and e_k + e_l recover it exactly.
    """
    t = len(atoms.atoms)
    dim = 2 * (t - 1)

    def ev(x: np.ndarray) -> float:
        g = x[0::2] + 1j * x[1::2]
        return float(_slot_exponent(g[None, :], t_ij, atoms, z0, tau)[0])

    e0 = ev(np.zeros(dim))
    s = np.empty((dim, dim))
    v = np.empty(dim)
    plus = np.empty(dim)
    for k in range(dim):
        xk = np.zeros(dim)
        xk[k] = 1.0
        fp = ev(xk)
        fm = ev(-xk)
        plus[k] = fp
        s[k, k] = -(fp + fm - 2.0 * e0) / 2.0
        v[k] = (fp - fm) / 2.0
    for k in range(dim):
        for l in range(k + 1, dim):
            x = np.zeros(dim)
            x[k] = 1.0
            x[l] = 1.0
            s_kl = -(ev(x) - plus[k] - plus[l] + e0) / 2.0
            s[k, l] = s[l, k] = s_kl
    return s, v, e0


def verify_triangular_gaussian(n: int, atoms: AtomMeasure, z0: complex,
                               tau: float, rng: np.random.Generator,
                               mc_samples: int = 200_000,
                               t_matrix: np.ndarray | None = None) -> OracleVerdict:
    """Coupled triangular Gaussian integral vs its closed form.

    The left side is assembled slot by slot from the integrand itself: the
    quadratic form in each slot's variables is reconstructed by finite
    evaluation and integrated exactly (Gaussian formula), independently of
    the algebra that produced the closed form.  A plain importance-sampled
    Monte Carlo of the same integrand cross-checks the assembly when
    ``mc_samples > 0``.  The fixed strictly upper triangular matrix ``T``
    must not affect the value; callers verify that by passing different
    ``t_matrix`` values.
    """
    t = len(atoms.atoms)
    if n < 2:
        raise ValueError("n must be at least 2 (no strictly upper slots otherwise)")
    constraint = tau * geo_p00(atoms, z0)
    if abs(constraint - 1.0) > 1e-10:
        raise ValueError(
            f"constraint sum tau c_a / f_a = 1 violated (got {constraint!r}); "
            "place z0 on the support boundary"
        )
    if t_matrix is None:
        t_matrix = np.triu(
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), k=1
        )
    rhs = _triangular_rhs(n, atoms, z0, tau)
    if t == 1:
        # no integration variables: empty product, exponent vanishes on the
        # constraint, so the integral equals 1 and must match the closed form
        return _verdict("triangular_gaussian", 1.0, rhs, "closed_form")

    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    dim = 2 * (t - 1)
    log_lhs = 0.0
    slot_forms = []
    for (i, j) in slots:
        s, v, c0 = _slot_quadratic_form(t_matrix[i, j], atoms, z0, tau)
        eigs = np.linalg.eigvalsh(s)
        if np.min(eigs) <= 0:
            raise ArithmeticError(
                "slot quadratic form is not negative definite; "
                "atoms/z0/tau are inconsistent"
            )
        sign, logdet = np.linalg.slogdet(s)
        quad = float(v @ np.linalg.solve(s, v)) / 4.0
        log_lhs += (dim / 2.0) * math.log(math.pi) - 0.5 * logdet + c0 + quad
        slot_forms.append((s, v, c0, eigs))
    lhs = math.exp(log_lhs)
    verdict = _verdict("triangular_gaussian", lhs, rhs, "closed_form")

    if mc_samples > 0:
        mc, std_err = _triangular_mc(slots, slot_forms, t_matrix, atoms, z0,
                                     tau, rng, mc_samples)
        mc_ok = abs(mc - rhs) <= 3.0 * std_err
        # one combined verdict: closed-form agreement at 1e-8 and the Monte
        # Carlo cross-check within three standard errors must both hold
        return OracleVerdict(
            name=verdict.name, lhs=verdict.lhs, rhs=verdict.rhs,
            rel_error=verdict.rel_error, method="closed_form",
            passed=verdict.passed and mc_ok, samples=mc_samples,
            mc_std_error=std_err,
        )
    return verdict


def _triangular_mc(slots, slot_forms, t_matrix, atoms, z0, tau, rng, samples):
    """Importance-sampled product over slots; unbiased for any proposal.

    The proposal is an isotropic Gaussian centered on the integrand's mode
    and wider than the narrowest target direction, so the weights stay
    bounded; the value estimate still comes solely from evaluating the
    original integrand.
    """
    total_log_mean = 0.0
    rel_var = 0.0
    for (i, j), (s, v, _c0, eigs) in zip(slots, slot_forms):
        dim = s.shape[0]
        mu = np.linalg.solve(s, v) / 2.0
        sigma = 1.0 / math.sqrt(float(np.min(eigs)))  # wider than the target
        x = mu[None, :] + rng.standard_normal((samples, dim)) * sigma
        g = (x[:, 0::2] + 1j * x[:, 1::2])
        expo = _slot_exponent(g, t_matrix[i, j], atoms, z0, tau)
        log_q = (-0.5 * np.sum(((x - mu[None, :]) / sigma) ** 2, axis=1)
                 - dim * math.log(sigma * math.sqrt(2.0 * math.pi)))
        w = np.exp(expo - log_q)
        mean = float(np.mean(w))
        var = float(np.var(w))
        total_log_mean += math.log(mean)
        rel_var += var / (samples * mean * mean)
    mc = math.exp(total_log_mean)
    return mc, mc * math.sqrt(rel_var)


# ---------------------------------------------------------------------------
# Harish-Chandra / Itzykson-Zuber

def verify_hciz(n: int, a_diag, b_diag, samples: int,
                rng: np.random.Generator) -> OracleVerdict:
    """Haar Monte Carlo of ``int exp(Tr(A U B U*)) dU`` vs the determinant formula."""
    a = np.asarray([float(x) for x in a_diag])
    b = np.asarray([float(x) for x in b_diag])
    if len(a) != n or len(b) != n:
        raise ValueError("a_diag and b_diag must have length n")
    if len(set(a.tolist())) != n or len(set(b.tolist())) != n:
        raise ValueError("entries must be distinct (the formula denominator vanishes)")

    det = np.linalg.det(np.exp(np.outer(a, b)))
    denom = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            denom *= (a[j] - a[i]) * (b[j] - b[i])
    pref = float(np.prod([math.factorial(k) for k in range(1, n)]))
    rhs = det / denom * pref

    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = 100_000
    while done < samples:
        size = min(chunk, samples - done)
        u = haar_unitary(n, rng, batch=size)
        vals = np.exp(np.einsum("sij,i,j->s", np.abs(u) ** 2, a, b))
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals ** 2))
        done += size
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return _verdict("hciz", mean, rhs, "monte_carlo", samples=samples,
                    mc_std_error=math.sqrt(var / samples))


# ---------------------------------------------------------------------------
# Andreief

def _family_values(family, x: np.ndarray) -> np.ndarray:
    out = np.empty((len(family), len(x)))
    for i, (kind, k) in enumerate(family):
        if kind == "mono":
            out[i] = x ** k
        elif kind == "exp":
            out[i] = np.exp(k * x)
        else:
            raise ValueError(f"unknown catalog entry {kind!r} (use 'mono' or 'exp')")
    return out


def _measure_nodes(measure, order: int = 64):
    if measure[0] == "uniform":
        _, a, b = measure
        x, w = np.polynomial.legendre.leggauss(order)
        return 0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w
    if measure[0] == "gaussian":
        # standard normal weight exp(-x^2/2)/sqrt(2 pi) via Hermite nodes
        x, w = np.polynomial.hermite.hermgauss(order)
        return math.sqrt(2.0) * x, w / math.sqrt(math.pi)
    raise ValueError(f"unknown measure {measure[0]!r}")


def verify_andreief(n: int, f_family, g_family, measure) -> OracleVerdict:
    """n-fold tensor quadrature of a determinant product vs n! Gram determinant."""
    if n > 4:
        raise ValueError("n above 4 is not supported")
    if len(f_family) != n or len(g_family) != n:
        raise ValueError("need exactly n functions per family")
    order = {1: 96, 2: 96, 3: 64, 4: 32}[n]
    x, w = _measure_nodes(measure, order)
    fv = _family_values(f_family, x)   # (n, m)
    gv = _family_values(g_family, x)

    gram = np.einsum("im,jm,m->ij", fv, gv, w)
    rhs = math.factorial(n) * np.linalg.det(gram)

    m = len(x)
    idx = np.stack(np.meshgrid(*([np.arange(m)] * n), indexing="ij"),
                   axis=-1).reshape(-1, n)
    lhs = 0.0
    chunk = 250_000
    for lo in range(0, len(idx), chunk):
        sel = idx[lo:lo + chunk]
        fmat = fv[:, sel].transpose(1, 0, 2)   # (batch, n_funcs, n_points)
        gmat = gv[:, sel].transpose(1, 0, 2)
        dets = np.linalg.det(fmat) * np.linalg.det(gmat)
        lhs += float(np.sum(dets * np.prod(w[sel], axis=1)))
    return _verdict("andreief", lhs, rhs, "quadrature", tol=1e-10)
