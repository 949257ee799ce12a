"""Specification and sampling of additively deformed complex Ginibre matrices.

A sample is ``X = X0 + sqrt(tau/N) * G`` where ``G`` has i.i.d. standard
complex normal entries (``E g = 0``, ``E |g|^2 = 1``) and the deterministic
mean ``X0`` is a normal diagonal matrix built from

* ``t`` macroscopic blocks: value ``a_alpha`` repeated ``r_alpha`` times,
  where ``r_alpha`` tracks ``c_alpha * N`` up to an O(1) correction,
* an optional block of ``r0`` copies of a pinned value ``z0_hint``,
* an optional fixed finite normal block with diagonal ``a_t1_diag``,
* ``R0`` trailing zeros.

The ``(a_alpha, c_alpha)`` pairs form an atomic probability measure on the
complex plane; all macroscopic limit quantities downstream are integrals
against that measure.
"""

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AtomMeasure",
    "EnsembleSpec",
    "RngStream",
    "make_spec",
    "build_x0",
    "sample_ginibre",
    "sample_deformed",
    "spec_to_json",
    "spec_from_json",
]

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class AtomMeasure:
    """Atomic probability measure: pairwise-distinct atoms with weights summing to 1."""

    atoms: tuple[complex, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(complex(a) for a in self.atoms))
        object.__setattr__(self, "weights", tuple(float(c) for c in self.weights))
        if len(self.atoms) == 0:
            raise ValueError("measure needs at least one atom")
        if len(self.atoms) != len(self.weights):
            raise ValueError("atoms and weights must have equal length")
        if any(c <= 0 for c in self.weights):
            raise ValueError("all weights must be positive")
        if abs(sum(self.weights) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)!r}")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atoms must be pairwise distinct")

    def atoms_array(self) -> np.ndarray:
        return np.asarray(self.atoms, dtype=complex)

    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)


@dataclass(frozen=True)
class EnsembleSpec:
    """Complete finite-N description of the deformed ensemble."""

    nu: AtomMeasure
    tau: float
    N: int
    ranks: tuple[int, ...]
    r0: int = 0
    z0_hint: complex | None = None
    a_t1_diag: tuple[complex, ...] = ()
    R0: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        object.__setattr__(self, "a_t1_diag", tuple(complex(a) for a in self.a_t1_diag))
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if len(self.ranks) != len(self.nu.atoms):
            raise ValueError("one rank per atom required")
        if any(r < 1 for r in self.ranks):
            raise ValueError("every atom rank must be at least 1")
        if self.r0 < 0 or self.R0 < 0:
            raise ValueError("r0 and R0 must be nonnegative")
        if self.r0 > 0 and self.z0_hint is None:
            raise ValueError("r0 > 0 requires z0_hint")
        total = sum(self.ranks) + self.r0 + len(self.a_t1_diag) + self.R0
        if total != self.N:
            raise ValueError(f"ranks sum to {total}, expected N = {self.N}")
        if self.z0_hint is not None and any(
            a == complex(self.z0_hint) for a in self.a_t1_diag
        ):
            raise ValueError("z0_hint must not be an eigenvalue of the fixed block")

    @property
    def r_t1(self) -> int:
        return len(self.a_t1_diag)

    def rank_deviation(self) -> float:
        """max over atoms of |r_alpha - c_alpha * N| (must stay O(1) in N)."""
        c = self.nu.weights_array()
        r = np.asarray(self.ranks, dtype=float)
        return float(np.max(np.abs(r - c * self.N)))

    def digest(self) -> str:
        return hashlib.sha256(spec_to_json(self).encode()).hexdigest()


@dataclass(frozen=True)
class RngStream:
    """Reproducible, statistically independent random stream.

    Distinct ``(master_seed, stream_index)`` pairs give independent Philox
    streams; equal pairs replay identical draws.  Reproducibility is
    promised per build, not across library versions.
    """

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.stream_index,)
        )
        return np.random.Generator(np.random.Philox(seq))

    def substream(self, index: int) -> "RngStream":
        return RngStream(self.master_seed, index)


def make_spec(
    nu: AtomMeasure,
    tau: float,
    N: int,
    r0: int = 0,
    a_t1_diag=(),
    R0: int = 0,
    z0_hint: complex | None = None,
    max_rank_deviation: float | None = None,
) -> EnsembleSpec:
    """Build a valid spec, apportioning integer ranks to the atoms.

    The ``N - r0 - r_{t+1} - R0`` macroscopic rows are split among the atoms
    by largest-remainder apportionment of the weights, which keeps every
    ``|r_alpha - c_alpha * M|`` at most 1 and hence ``r_alpha - c_alpha * N``
    bounded independently of N.
    """
    a_t1_diag = tuple(complex(a) for a in a_t1_diag)
    fixed = r0 + len(a_t1_diag) + R0
    m = N - fixed
    t = len(nu.atoms)
    if m < t:
        raise ValueError(
            f"infeasible apportionment: {m} macroscopic rows for {t} atoms (N too small)"
        )
    ranks = _largest_remainder(nu.weights_array(), m)
    if any(r < 1 for r in ranks):
        raise ValueError("infeasible apportionment: an atom received rank 0")
    spec = EnsembleSpec(
        nu=nu, tau=tau, N=N, ranks=tuple(ranks), r0=r0,
        z0_hint=z0_hint, a_t1_diag=a_t1_diag, R0=R0,
    )
    bound = fixed + 1 if max_rank_deviation is None else max_rank_deviation
    if spec.rank_deviation() > bound:
        raise ValueError(
            f"rank deviation {spec.rank_deviation():.3f} exceeds bound {bound}"
        )
    return spec


def _largest_remainder(weights: np.ndarray, total: int) -> list[int]:
    quotas = weights * total
    base = np.floor(quotas).astype(int)
    short = total - int(base.sum())
    # distribute leftover seats by descending fractional part; ties broken
    # by atom order for determinism
    frac = quotas - base
    order = np.lexsort((np.arange(len(weights)), -frac))
    for k in range(short):
        base[order[k]] += 1
    return [int(b) for b in base]


def build_x0(spec: EnsembleSpec) -> np.ndarray:
    """The deterministic mean matrix as an N x N complex diagonal array."""
    diag = []
    for a, r in zip(spec.nu.atoms, spec.ranks):
        diag.extend([a] * r)
    if spec.r0:
        diag.extend([complex(spec.z0_hint)] * spec.r0)
    diag.extend(spec.a_t1_diag)
    diag.extend([0.0 + 0.0j] * spec.R0)
    return np.diag(np.asarray(diag, dtype=complex))


def sample_ginibre(N: int, rng: RngStream) -> np.ndarray:
    """N x N matrix of i.i.d. standard complex normals, E|g|^2 = 1."""
    if N < 1:
        raise ValueError("N must be at least 1")
    g = rng.generator().standard_normal((2, N, N))
    return (g[0] + 1j * g[1]) / math.sqrt(2.0)


def sample_deformed(spec: EnsembleSpec, rng: RngStream) -> np.ndarray:
    """One draw of ``X0 + sqrt(tau/N) * G``."""
    x = build_x0(spec)
    x += math.sqrt(spec.tau / spec.N) * sample_ginibre(spec.N, rng)
    return x


# ---------------------------------------------------------------------------
# JSON wire format: {tau, N, atoms: [{re, im, c}], r0, z0: {re, im}?,
#                    a_t1: [{re, im}], R0} -- lossless round trip.

def _c2j(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _j2c(obj) -> complex:
    return complex(float(obj["re"]), float(obj["im"]))


def spec_to_json(spec: EnsembleSpec) -> str:
    """Serialize the generating parameters of a spec.

    Integer ranks are not stored: they are recomputed by the canonical
    largest-remainder apportionment on load, so the round trip is lossless
    for every spec built through :func:`make_spec`.
    """
    obj = {
        "tau": float(spec.tau),
        "N": int(spec.N),
        "atoms": [
            {"re": float(a.real), "im": float(a.imag), "c": float(c)}
            for a, c in zip(spec.nu.atoms, spec.nu.weights)
        ],
        "r0": int(spec.r0),
        "a_t1": [_c2j(a) for a in spec.a_t1_diag],
        "R0": int(spec.R0),
    }
    if spec.z0_hint is not None:
        obj["z0"] = _c2j(complex(spec.z0_hint))
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def spec_from_json(text: str | dict) -> EnsembleSpec:
    obj = json.loads(text) if isinstance(text, str) else text
    nu = AtomMeasure(
        atoms=tuple(complex(a["re"], a["im"]) for a in obj["atoms"]),
        weights=tuple(float(a["c"]) for a in obj["atoms"]),
    )
    z0 = _j2c(obj["z0"]) if "z0" in obj else None
    return make_spec(
        nu, float(obj["tau"]), int(obj["N"]), r0=int(obj.get("r0", 0)),
        a_t1_diag=tuple(_j2c(a) for a in obj.get("a_t1", ())),
        R0=int(obj.get("R0", 0)), z0_hint=z0,
    )
