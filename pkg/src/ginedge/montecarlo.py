"""Seeded parallel experiments harvesting rescaled eigenvalues near an edge.

Each trial draws one deformed matrix, extracts all eigenvalues, maps them
through the local edge rescaling and keeps those landing inside the window
disk ``|zhat| <= window``.  Trials use disjoint Philox streams indexed by
trial number, so results are reproducible for a fixed seed and independent
of execution order or worker count.  Histograms normalize counts per unit
local area per trial, which is the quantity the limit kernel diagonal
predicts directly.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .ensemble import EnsembleSpec, RngStream, make_spec, sample_deformed, spec_from_json, spec_to_json
from .geometry import EdgeClass, EdgePoint
from .kernels import DEFAULT_WINDOW, rescale

__all__ = [
    "ExperimentConfig",
    "EdgeSampleSet",
    "HistogramGrid",
    "Profile",
    "PairCorrelation",
    "run_edge_experiment",
    "density_histogram",
    "profile_histogram",
    "pair_correlation_estimate",
    "pair_ratio",
    "convergence_study",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one edge-sampling experiment."""

    spec: EnsembleSpec
    edge: EdgePoint
    trials: int
    seed: int
    window: float = 3.0
    bins: tuple[int, int] = (24, 24)
    im_band: float = 2.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.edge.classification is not EdgeClass.REGULAR:
            raise ValueError("experiments require a regular edge point")
        if not (0 < self.window <= DEFAULT_WINDOW):
            raise ValueError(f"window must lie in (0, {DEFAULT_WINDOW}]")
        if self.im_band <= 0 or self.im_band > self.window:
            raise ValueError("im_band must lie in (0, window]")
        if min(self.bins) < 1:
            raise ValueError("bins must be positive")


@dataclass(frozen=True)
class EdgeSampleSet:
    """Per-trial rescaled eigenvalues kept inside the window disk."""

    points: tuple[np.ndarray, ...]
    trials_completed: int
    window: float
    seed: int
    spec_digest: str
    edge_digest: str

    @property
    def total_points(self) -> int:
        return sum(len(p) for p in self.points)

    def all_points(self) -> np.ndarray:
        if not self.points:
            return np.empty(0, dtype=complex)
        return np.concatenate(self.points)

    def mean_kept_per_trial(self) -> float:
        return self.total_points / self.trials_completed


def _edge_digest(edge: EdgePoint) -> str:
    import hashlib
    import json

    return hashlib.sha256(
        json.dumps(edge.digest_dict(), sort_keys=True).encode()
    ).hexdigest()


def _run_trial(spec: EnsembleSpec, edge: EdgePoint, window: float,
               seed: int, trial: int, trials: int) -> np.ndarray:
    """One matrix draw -> kept rescaled eigenvalues; retries once on failure."""
    for attempt, stream_index in enumerate((trial, trials + trial)):
        try:
            x = sample_deformed(spec, RngStream(seed, stream_index))
            eigs = linalg.eigenvalues_only(x)
            break
        except linalg.NonConvergenceError:
            if attempt == 1:
                raise
    zhat = rescale(edge, spec.N, eigs)
    return zhat[np.abs(zhat) <= window]


def _run_chunk(payload) -> list[tuple[int, np.ndarray]]:
    spec_json, edge_tuple, window, seed, lo, hi, trials = payload
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # pragma: no cover
        import contextlib

        threadpool_limits = lambda *_a, **_k: contextlib.nullcontext()
    spec = spec_from_json(spec_json)
    edge = EdgePoint(
        z0=complex(*edge_tuple[0]), p00=edge_tuple[1],
        p0=complex(*edge_tuple[2]), p1=edge_tuple[3],
        classification=EdgeClass(edge_tuple[4]),
    )
    out = []
    with threadpool_limits(limits=1):
        for trial in range(lo, hi):
            out.append((trial, _run_trial(spec, edge, window, seed, trial, trials)))
    return out


def run_edge_experiment(cfg: ExperimentConfig, threads: int | None = None) -> EdgeSampleSet:
    """Run all trials (in parallel when beneficial) and collect samples.

    Deterministic for a fixed ``cfg.seed`` regardless of ``threads``.
    """
    trials = cfg.trials
    if threads is None:
        threads = min(os.cpu_count() or 1, 8)
    threads = max(1, min(threads, trials))

    results: list[np.ndarray | None] = [None] * trials
    if threads == 1 or trials < 8:
        for trial in range(trials):
            results[trial] = _run_trial(cfg.spec, cfg.edge, cfg.window,
                                        cfg.seed, trial, trials)
    else:
        e = cfg.edge
        edge_tuple = ((e.z0.real, e.z0.imag), e.p00, (e.p0.real, e.p0.imag),
                      e.p1, e.classification.value)
        spec_json = spec_to_json(cfg.spec)
        chunk = max(1, math.ceil(trials / (threads * 8)))
        payloads = [
            (spec_json, edge_tuple, cfg.window, cfg.seed, lo, min(lo + chunk, trials), trials)
            for lo in range(0, trials, chunk)
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_run_chunk, payloads):
                for trial, arr in part:
                    results[trial] = arr

    return EdgeSampleSet(
        points=tuple(results),  # order fixed by trial index, not completion
        trials_completed=trials,
        window=cfg.window,
        seed=cfg.seed,
        spec_digest=cfg.spec.digest(),
        edge_digest=_edge_digest(cfg.edge),
    )


# ---------------------------------------------------------------------------
# geometry of the window disk, needed for honest normalization

def _circle_segment_integral(x0: float, x1: float, w: float) -> float:
    """integral of 2 sqrt(w^2 - x^2) over [x0, x1] intersected with [-w, w]."""
    x0 = max(x0, -w)
    x1 = min(x1, w)
    if x1 <= x0:
        return 0.0

    def anti(x):
        return x * math.sqrt(max(w * w - x * x, 0.0)) + w * w * math.asin(max(-1.0, min(1.0, x / w)))

    return anti(x1) - anti(x0)


def strip_area(x0: float, x1: float, window: float, band: float) -> float:
    """Area of ``[x0, x1] x [-band, band]`` clipped to the window disk."""
    if band >= window:
        return _circle_segment_integral(x0, x1, window)
    xc = math.sqrt(window * window - band * band)
    area = 0.0
    # middle region: full band height
    lo, hi = max(x0, -xc), min(x1, xc)
    if hi > lo:
        area += 2.0 * band * (hi - lo)
    # outer regions: clipped by the circle
    area += _circle_segment_integral(max(x0, xc), x1, window)
    area += _circle_segment_integral(x0, min(x1, -xc), window)
    return area


def cell_heights(y0: float, y1: float, x: np.ndarray, window: float) -> np.ndarray:
    """Vertical extent of the window disk inside a cell row, per abscissa."""
    half = np.sqrt(np.maximum(window * window - x * x, 0.0))
    return np.maximum(np.minimum(y1, half) - np.maximum(y0, -half), 0.0)


# ---------------------------------------------------------------------------
# histograms

@dataclass(frozen=True)
class HistogramGrid:
    """2-D counts over the window square with per-trial area normalization."""

    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray       # shape (nx, ny), integer counts
    trials: int
    window: float

    def cell_area(self) -> np.ndarray:
        dx = np.diff(self.x_edges)
        dy = np.diff(self.y_edges)
        return np.outer(dx, dy)

    def density(self) -> np.ndarray:
        """Counts per unit local area per trial (full-cell normalization)."""
        return self.counts / (self.trials * self.cell_area())

    def total_mass(self) -> float:
        """Normalized mass; equals kept points / trials exactly."""
        return float(np.sum(self.density() * self.cell_area()))


@dataclass(frozen=True)
class Profile:
    """1-D density vs Re zhat, averaged over the band |Im zhat| <= im_band."""

    edges: np.ndarray
    counts: np.ndarray
    areas: np.ndarray        # kept area (band strip clipped to window disk)
    trials: int
    im_band: float
    window: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def density(self) -> np.ndarray:
        return self.counts / (self.trials * self.areas)


def density_histogram(samples: EdgeSampleSet, cfg: ExperimentConfig) -> HistogramGrid:
    """2-D histogram of all kept points on the cfg bin grid."""
    pts = samples.all_points()
    if pts.size == 0:
        raise ValueError("empty sample set")
    w = samples.window
    nx, ny = cfg.bins
    x_edges = np.linspace(-w, w, nx + 1)
    y_edges = np.linspace(-w, w, ny + 1)
    counts, _, _ = np.histogram2d(pts.real, pts.imag, bins=(x_edges, y_edges))
    return HistogramGrid(x_edges=x_edges, y_edges=y_edges,
                         counts=counts.astype(np.int64),
                         trials=samples.trials_completed, window=w)


def profile_histogram(samples: EdgeSampleSet, cfg: ExperimentConfig,
                      nbins: int | None = None,
                      re_range: tuple[float, float] | None = None) -> Profile:
    """Band-averaged 1-D profile of the kept points.

    Bin areas account for the window-disk clipping of the band strip, so
    the reported density stays comparable to the kernel diagonal out to the
    rim of the window.
    """
    pts = samples.all_points()
    if pts.size == 0:
        raise ValueError("empty sample set")
    w = samples.window
    band = cfg.im_band
    if nbins is None:
        nbins = cfg.bins[0]
    lo, hi = re_range if re_range is not None else (-w, w)
    edges = np.linspace(lo, hi, nbins + 1)
    kept = pts[np.abs(pts.imag) <= band]
    counts, _ = np.histogram(kept.real, bins=edges)
    areas = np.array([
        strip_area(edges[i], edges[i + 1], w, band) for i in range(nbins)
    ])
    if np.any(areas <= 0):
        raise ValueError("profile range extends outside the window disk")
    return Profile(edges=edges, counts=counts.astype(np.int64), areas=areas,
                   trials=samples.trials_completed, im_band=band, window=w)


# ---------------------------------------------------------------------------
# pair correlations

@dataclass(frozen=True)
class PairCorrelation:
    """Within-trial ordered pair counts on a flattened bin grid."""

    centers: np.ndarray       # (B,) complex cell centers
    areas: np.ndarray         # (B,) cell areas clipped to the window disk
    marginal_counts: np.ndarray   # (B,)
    pair_counts: np.ndarray   # (B, B) ordered pairs, same trial
    trials: int
    window: float

    def r2(self) -> np.ndarray:
        """Estimated 2-point intensity per area^2 per trial."""
        a = np.where(self.areas > 0, self.areas, np.nan)
        return self.pair_counts / (self.trials * np.outer(a, a))


def pair_correlation_estimate(samples: EdgeSampleSet,
                              bins: tuple[int, int] = (24, 24),
                              r0_available: int | None = None) -> PairCorrelation:
    """Accumulate ordered within-trial pair counts over a 2-D bin grid.

    ``r0_available`` (the R0 of the generating spec, when known) guards the
    2-point prediction's validity requirement R0 >= 2.
    """
    if r0_available is not None and r0_available < 2:
        raise ValueError("pair correlations require an ensemble with R_0 >= 2")
    w = samples.window
    nx, ny = bins
    x_edges = np.linspace(-w, w, nx + 1)
    y_edges = np.linspace(-w, w, ny + 1)
    nbins = nx * ny
    marginal = np.zeros(nbins, dtype=np.int64)
    pairs = np.zeros((nbins, nbins), dtype=np.int64)
    for pts in samples.points:
        if len(pts) == 0:
            continue
        ix = np.clip(np.searchsorted(x_edges, pts.real, side="right") - 1, 0, nx - 1)
        iy = np.clip(np.searchsorted(y_edges, pts.imag, side="right") - 1, 0, ny - 1)
        flat = ix * ny + iy
        k = np.bincount(flat, minlength=nbins)
        marginal += k
        if len(pts) >= 2:
            pairs += np.outer(k, k) - np.diag(k)  # ordered distinct pairs

    cx = 0.5 * (x_edges[:-1] + x_edges[1:])
    cy = 0.5 * (y_edges[:-1] + y_edges[1:])
    centers = (cx[:, None] + 1j * cy[None, :]).ravel()
    areas = np.array([
        _cell_disk_area(x_edges[i], x_edges[i + 1], y_edges[j], y_edges[j + 1], w)
        for i in range(nx) for j in range(ny)
    ])
    return PairCorrelation(centers=centers, areas=areas, marginal_counts=marginal,
                           pair_counts=pairs, trials=samples.trials_completed,
                           window=w)


def _cell_disk_area(x0, x1, y0, y1, w, nodes: int = 48) -> float:
    """Area of an axis-aligned cell clipped to the disk |z| <= w."""
    x, wt = np.polynomial.legendre.leggauss(nodes)
    xm = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * x
    h = cell_heights(y0, y1, xm, w)
    return float(0.5 * (x1 - x0) * np.dot(wt, h))


def pair_ratio(pc: PairCorrelation, lo: float, hi: float) -> float:
    """Observed / independent pair counts for center separations in [lo, hi).

    Values well below 1 at small separations witness repulsion; values near
    1 at large separations witness asymptotic independence.
    """
    d = np.abs(pc.centers[:, None] - pc.centers[None, :])
    mask = (d >= lo) & (d < hi)
    num = float(np.sum(pc.pair_counts[mask]))
    lam = pc.marginal_counts.astype(float)
    den = float(np.sum(np.outer(lam, lam)[mask])) / pc.trials
    if den <= 0:
        raise ValueError(f"no marginal mass at separations [{lo}, {hi})")
    return num / den


# ---------------------------------------------------------------------------
# convergence across N

def convergence_study(spec_template: EnsembleSpec, edge: EdgePoint,
                      n_list, trials: int, seed: int,
                      threads: int | None = None,
                      region: tuple[float, float] = (-2.0, 2.0),
                      window: float = 3.0, bins: tuple[int, int] = (24, 24),
                      im_band: float = 2.0):
    """Profile error against the kernel prediction for increasing N.

    Returns rows ``(N, sup_rel_error, mc_noise)`` where ``mc_noise`` is the
    Poisson relative noise of the bin achieving the sup, the natural yard
    stick for judging whether an error inversion between consecutive N is
    meaningful.
    """
    from .kernels import KernelModel
    from .report import expected_profile, sup_relative_error_detail

    n_values = list(n_list)
    if any(b >= a for a, b in zip(n_values[1:], n_values[:-1])):
        raise ValueError("n_list must be strictly increasing")
    rows = []
    for n_dim in n_values:
        spec = make_spec(
            spec_template.nu, spec_template.tau, int(n_dim),
            r0=spec_template.r0, a_t1_diag=spec_template.a_t1_diag,
            R0=spec_template.R0, z0_hint=spec_template.z0_hint,
        )
        cfg = ExperimentConfig(spec=spec, edge=edge, trials=trials, seed=seed,
                               window=window, bins=bins, im_band=im_band)
        samples = run_edge_experiment(cfg, threads=threads)
        profile = profile_histogram(samples, cfg)
        model = KernelModel.for_spec(spec, edge)
        predicted = expected_profile(model, profile)
        err, idx = sup_relative_error_detail(profile, predicted, region)
        exp_counts = predicted[idx] * profile.areas[idx] * profile.trials
        noise = 1.0 / math.sqrt(max(exp_counts, 1e-12))
        rows.append((int(n_dim), float(err), float(noise)))
    return rows
