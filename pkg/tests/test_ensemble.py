import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from ginedge import ensemble as en


def test_atom_measure_invariants():
    with pytest.raises(ValueError):
        en.AtomMeasure(atoms=(0.0, 1.0), weights=(0.5, 0.6))
    with pytest.raises(ValueError):
        en.AtomMeasure(atoms=(0.0,), weights=(-1.0,))
    with pytest.raises(ValueError):
        en.AtomMeasure(atoms=(1.0, 1.0), weights=(0.5, 0.5))
    with pytest.raises(ValueError):
        en.AtomMeasure(atoms=(), weights=())


def test_make_spec_single_atom_takes_all():
    nu = en.AtomMeasure(atoms=(0.0,), weights=(1.0,))
    spec = en.make_spec(nu, 1.0, 100, r0=0, R0=2)
    assert spec.ranks == (98,)


def test_make_spec_largest_remainder_split():
    nu = en.AtomMeasure(atoms=(-1.0, 1.0), weights=(0.5, 0.5))
    spec = en.make_spec(nu, 1.0, 101, r0=0, R0=1)
    assert spec.ranks == (50, 50)


def test_make_spec_infeasible():
    nu = en.AtomMeasure(atoms=(0.0,), weights=(1.0,))
    with pytest.raises(ValueError):
        en.make_spec(nu, 1.0, 10, R0=11)


def test_make_spec_apportionment_conservation():
    rng = np.random.default_rng(5)
    for _ in range(50):
        t = int(rng.integers(1, 5))
        w = rng.random(t) + 0.05
        w /= w.sum()
        # exact unit sum after normalization noise
        w[-1] = 1.0 - w[:-1].sum()
        nu = en.AtomMeasure(atoms=tuple(map(complex, rng.standard_normal(t) + 1j * rng.standard_normal(t))),
                            weights=tuple(w))
        n_dim = int(rng.integers(8 * t, 200))
        r0 = int(rng.integers(0, 3))
        big_r0 = int(rng.integers(0, 3))
        spec = en.make_spec(nu, 1.0, n_dim, r0=r0, R0=big_r0,
                            z0_hint=5.0 + 5.0j if r0 else None)
        assert sum(spec.ranks) + spec.r0 + spec.r_t1 + spec.R0 == spec.N
        assert spec.rank_deviation() <= r0 + big_r0 + 1


def test_build_x0_zero_matrix():
    nu = en.AtomMeasure(atoms=(0.0,), weights=(1.0,))
    spec = en.make_spec(nu, 1.0, 5, R0=2)
    assert_allclose(en.build_x0(spec), np.zeros((5, 5)))


def test_build_x0_block_layout():
    nu = en.AtomMeasure(atoms=(2.0,), weights=(1.0,))
    spec = en.make_spec(nu, 1.0, 5, r0=1, a_t1_diag=(3.0j,), R0=1, z0_hint=1.0)
    assert spec.ranks == (2,)
    assert_allclose(np.diag(en.build_x0(spec)), [2.0, 2.0, 1.0, 3.0j, 0.0])


def test_build_x0_trace_identity():
    nu = en.AtomMeasure(atoms=(1.0 + 1.0j, -2.0), weights=(0.75, 0.25))
    spec = en.make_spec(nu, 2.0, 41, r0=2, a_t1_diag=(0.5j, 1.5), R0=3,
                        z0_hint=0.25 + 0.1j)
    expected = (sum(r * a for r, a in zip(spec.ranks, nu.atoms))
                + spec.r0 * spec.z0_hint + sum(spec.a_t1_diag))
    assert np.trace(en.build_x0(spec)) == pytest.approx(expected)


def test_spec_requires_z0_hint_with_r0():
    nu = en.AtomMeasure(atoms=(0.0,), weights=(1.0,))
    with pytest.raises(ValueError):
        en.make_spec(nu, 1.0, 10, r0=1)
    with pytest.raises(ValueError):
        en.make_spec(nu, 1.0, 10, r0=1, a_t1_diag=(1.0,), z0_hint=1.0)


def test_sample_ginibre_moments():
    g = en.sample_ginibre(200, en.RngStream(77))
    # E|g|^2 = 1; 4e4 samples of a unit-variance quantity -> 3 sigma ~ 0.015
    assert 0.97 <= np.mean(np.abs(g) ** 2) <= 1.03
    # CLT bound on the grand mean
    assert abs(np.mean(g)) <= 0.03


def test_sample_ginibre_determinism():
    a = en.sample_ginibre(32, en.RngStream(5, 9))
    b = en.sample_ginibre(32, en.RngStream(5, 9))
    assert np.array_equal(a, b)
    c = en.sample_ginibre(32, en.RngStream(5, 10))
    assert not np.array_equal(a, c)


def test_sample_deformed_mean_and_variance():
    nu = en.AtomMeasure(atoms=(1.0, -1.0j), weights=(0.5, 0.5))
    spec = en.make_spec(nu, 2.0, 4)
    draws = np.stack([
        en.sample_deformed(spec, en.RngStream(123, i)) for i in range(10_000)
    ])
    x0 = en.build_x0(spec)
    sigma_mean = math.sqrt(spec.tau / spec.N) / 100.0
    assert np.max(np.abs(draws.mean(axis=0) - x0)) <= 4.0 * sigma_mean
    var = np.var(draws, axis=0)  # complex variance E|X - EX|^2
    assert_allclose(var, spec.tau / spec.N, rtol=0.05)


def test_gaussianity_ks():
    g = en.sample_ginibre(317, en.RngStream(2024))  # ~1e5 entries
    re = g.real.ravel()[:100_000]
    stat = stats.kstest(re, "norm", args=(0.0, math.sqrt(0.5))).statistic
    # 1% critical value of the Kolmogorov distribution
    assert stat < 1.6276 / math.sqrt(len(re))


def test_spec_json_round_trip():
    nu = en.AtomMeasure(atoms=(0.2 - 0.3j, 1.5), weights=(0.4, 0.6))
    spec = en.make_spec(nu, 1.7, 57, r0=2, a_t1_diag=(2.5j,), R0=3,
                        z0_hint=0.8 + 0.1j)
    text = en.spec_to_json(spec)
    again = en.spec_from_json(text)
    assert again == spec
    assert json.loads(text)["N"] == 57
    assert en.spec_to_json(again) == text


def test_digest_stability():
    nu = en.AtomMeasure(atoms=(0.0,), weights=(1.0,))
    a = en.make_spec(nu, 1.0, 20, R0=2).digest()
    b = en.make_spec(nu, 1.0, 20, R0=2).digest()
    c = en.make_spec(nu, 1.0, 21, R0=2).digest()
    assert a == b != c
