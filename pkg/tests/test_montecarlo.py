import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ginedge import kernels as ke
from ginedge import linalg as la
from ginedge import montecarlo as mc
from ginedge import report as rp
from ginedge.ensemble import AtomMeasure, make_spec


def test_config_validation(ginue_nu, ginue_edge):
    spec = make_spec(ginue_nu, 1.0, 32, R0=2)
    with pytest.raises(ValueError):
        mc.ExperimentConfig(spec=spec, edge=ginue_edge, trials=0, seed=1)
    with pytest.raises(ValueError):
        mc.ExperimentConfig(spec=spec, edge=ginue_edge, trials=5, seed=1,
                            window=9.0)
    from ginedge.geometry import classify_edge
    quad = classify_edge(AtomMeasure(atoms=(-1.0, 1.0), weights=(0.5, 0.5)),
                         1.0, 0.0)
    with pytest.raises(ValueError):
        mc.ExperimentConfig(spec=spec, edge=quad, trials=5, seed=1)


def test_mean_kept_matches_kernel_quadrature(small_run, ginue_edge):
    """Kept points per trial ~ integral of the kernel diagonal over the disk."""
    spec, cfg, samples = small_run
    model = ke.KernelModel.for_spec(spec, ginue_edge)
    x, w = np.polynomial.legendre.leggauss(128)
    xs = cfg.window * x
    kd = ke.kernel_diag(model, xs)
    heights = 2.0 * np.sqrt(np.maximum(cfg.window**2 - xs**2, 0.0))
    predicted = cfg.window * float(np.dot(w, kd * heights))
    observed = samples.mean_kept_per_trial()
    sigma = math.sqrt(predicted / cfg.trials)
    # 8% finite-size allowance at N = 128 plus Monte Carlo noise
    assert abs(observed - predicted) <= 0.08 * predicted + 3.0 * sigma


def test_determinism_and_parallel_equivalence(small_run, ginue_edge):
    spec, cfg, samples = small_run
    again = mc.run_edge_experiment(cfg, threads=2)
    assert samples.trials_completed == again.trials_completed
    for a, b in zip(samples.points, again.points):
        assert np.array_equal(a, b)


def test_histogram_mass_conservation(small_run):
    _, cfg, samples = small_run
    hist = mc.density_histogram(samples, cfg)
    assert hist.total_mass() == pytest.approx(
        samples.total_points / samples.trials_completed, rel=1e-12)
    assert hist.counts.sum() == samples.total_points


def test_histogram_order_independence(small_run):
    _, cfg, samples = small_run
    rng = np.random.default_rng(0)
    perm = rng.permutation(samples.trials_completed)
    shuffled = mc.EdgeSampleSet(
        points=tuple(samples.points[i] for i in perm),
        trials_completed=samples.trials_completed,
        window=samples.window, seed=samples.seed,
        spec_digest=samples.spec_digest, edge_digest=samples.edge_digest)
    a = mc.density_histogram(samples, cfg)
    b = mc.density_histogram(shuffled, cfg)
    assert np.array_equal(a.counts, b.counts)


def test_profile_monotone_within_noise(small_run, ginue_edge):
    spec, cfg, samples = small_run
    profile = mc.profile_histogram(samples, cfg)
    dens = profile.density()
    sigma = np.sqrt(np.maximum(profile.counts, 1.0)) / (profile.trials * profile.areas)
    sel = (profile.centers >= -2.0) & (profile.centers <= 2.0)
    idx = np.nonzero(sel)[0]
    for i, j in zip(idx, idx[1:]):
        assert dens[j] <= dens[i] + 2.0 * (sigma[i] + sigma[j])


def test_profile_deep_inside_near_bulk(small_run):
    _, cfg, samples = small_run
    profile = mc.profile_histogram(samples, cfg)
    deep = profile.centers <= -2.0
    dens = profile.density()[deep]
    counts = profile.counts[deep]
    for d, c in zip(dens, counts):
        assert abs(d - 1 / math.pi) <= 4.0 * math.sqrt(c) / c * d + 0.02


def test_strip_area_matches_geometry():
    # full band inside the disk: plain rectangle
    assert mc.strip_area(-0.5, 0.5, 3.0, 2.0) == pytest.approx(4.0 * 1.0)
    # half-disk area when the band covers everything
    assert mc.strip_area(-3.0, 0.0, 3.0, 3.0) == pytest.approx(math.pi * 9.0 / 2.0)
    # clipped region near the rim is smaller than the rectangle
    rim = mc.strip_area(2.5, 3.0, 3.0, 2.0)
    assert 0.0 < rim < 2.0 * 0.5 * 2.0


def test_empty_sample_set_errors(ginue_nu, ginue_edge):
    spec = make_spec(ginue_nu, 1.0, 32, R0=2)
    cfg = mc.ExperimentConfig(spec=spec, edge=ginue_edge, trials=2, seed=3)
    empty = mc.EdgeSampleSet(points=(np.empty(0, complex), np.empty(0, complex)),
                             trials_completed=2, window=3.0, seed=3,
                             spec_digest="x", edge_digest="y")
    with pytest.raises(ValueError):
        mc.density_histogram(empty, cfg)
    with pytest.raises(ValueError):
        mc.profile_histogram(empty, cfg)


def test_pair_counts_single_point_trials():
    pts = (np.array([0.1 + 0.1j]), np.array([0.2 - 0.1j]), np.empty(0, complex))
    samples = mc.EdgeSampleSet(points=pts, trials_completed=3, window=3.0,
                               seed=0, spec_digest="a", edge_digest="b")
    pc = mc.pair_correlation_estimate(samples, bins=(6, 6))
    assert pc.pair_counts.sum() == 0
    assert pc.marginal_counts.sum() == 2


def test_pair_requires_r0(small_run):
    _, _, samples = small_run
    with pytest.raises(ValueError):
        mc.pair_correlation_estimate(samples, r0_available=1)


def test_pair_ratios(small_run):
    _, cfg, samples = small_run
    pc = mc.pair_correlation_estimate(samples, bins=cfg.bins, r0_available=2)
    coincidence = mc.pair_ratio(pc, 0.0, 0.2)
    distant = mc.pair_ratio(pc, 4.0, 1e9)
    assert coincidence < 0.3
    assert 0.8 <= distant <= 1.2


def test_retry_once_then_propagate(monkeypatch, ginue_nu, ginue_edge):
    spec = make_spec(ginue_nu, 1.0, 16, R0=2)
    cfg = mc.ExperimentConfig(spec=spec, edge=ginue_edge, trials=3, seed=11)

    calls = {"n": 0}
    real = la.eigenvalues_only

    def flaky(m):
        calls["n"] += 1
        if calls["n"] == 2:  # fail the second trial's first attempt once
            raise la.NonConvergenceError("synthetic stall")
        return real(m)

    monkeypatch.setattr(mc.linalg, "eigenvalues_only", flaky)
    samples = mc.run_edge_experiment(cfg, threads=1)
    assert samples.trials_completed == 3
    assert calls["n"] == 4  # one retry consumed

    def broken(m):
        raise la.NonConvergenceError("always")

    monkeypatch.setattr(mc.linalg, "eigenvalues_only", broken)
    with pytest.raises(la.NonConvergenceError):
        mc.run_edge_experiment(cfg, threads=1)


def test_convergence_study_structure(ginue_nu, ginue_edge):
    spec = make_spec(ginue_nu, 1.0, 48, R0=2)
    rows = mc.convergence_study(spec, ginue_edge, [32, 48], trials=40, seed=21,
                                threads=1)
    assert [r[0] for r in rows] == [32, 48]
    assert all(np.isfinite(r[1]) and r[1] >= 0 for r in rows)
    assert all(r[2] > 0 for r in rows)
    again = mc.convergence_study(spec, ginue_edge, [32, 48], trials=40, seed=21,
                                 threads=1)
    assert rows == again
    with pytest.raises(ValueError):
        mc.convergence_study(spec, ginue_edge, [48, 32], trials=5, seed=1)
