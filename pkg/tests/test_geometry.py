import numpy as np
import pytest
from numpy.testing import assert_allclose

from ginedge import geometry as ge
from ginedge.ensemble import AtomMeasure

NU_SINGLE = AtomMeasure(atoms=(0.0,), weights=(1.0,))
NU_PAIR = AtomMeasure(atoms=(-1.0, 1.0), weights=(0.5, 0.5))
NU_ASYM = AtomMeasure(atoms=(1.0, 2.0j), weights=(0.5, 0.5))


def test_p00_hand_values():
    assert ge.p00(NU_SINGLE, 1.0) == pytest.approx(1.0)
    assert ge.p00(NU_PAIR, 0.0) == pytest.approx(1.0)
    assert ge.p00(NU_ASYM, 0.0) == pytest.approx(0.625)


def test_p0_hand_values():
    assert ge.p0(NU_SINGLE, 1.0) == pytest.approx(-1.0)
    assert ge.p0(NU_PAIR, 0.0) == pytest.approx(0.0)
    assert ge.p0(NU_ASYM, 0.0) == pytest.approx(0.5 + 0.0625j)


def test_p1_hand_values():
    assert ge.p1(NU_SINGLE, 1.0) == pytest.approx(1.0)
    assert ge.p1(NU_PAIR, 0.0) == pytest.approx(1.0)
    assert ge.p1(NU_ASYM, 0.0) == pytest.approx(0.53125)


def test_pole_rejection():
    with pytest.raises(ZeroDivisionError):
        ge.p00(NU_PAIR, 1.0)


def test_gradient_identity_finite_differences():
    rng = np.random.default_rng(31)
    pts = rng.uniform(-3, 3, size=(2000, 2)) @ np.array([[1], [1j]])
    pts = pts.ravel()
    atoms = NU_ASYM.atoms_array()
    keep = np.min(np.abs(pts[:, None] - atoms[None, :]), axis=1) > 0.05
    pts = pts[keep]
    h = 1e-6
    gx = (ge.p00(NU_ASYM, pts + h) - ge.p00(NU_ASYM, pts - h)) / (2 * h)
    gy = (ge.p00(NU_ASYM, pts + 1j * h) - ge.p00(NU_ASYM, pts - 1j * h)) / (2 * h)
    grad_fd = gx + 1j * gy
    grad = 2.0 * ge.p0(NU_ASYM, pts)
    assert np.max(np.abs(grad_fd - grad) / np.abs(grad)) <= 1e-6


def test_scaling_covariance():
    rng = np.random.default_rng(37)
    for _ in range(10):
        s = complex(*rng.uniform(0.3, 2.0, 2))
        z = complex(*rng.uniform(-2, 2, 2))
        scaled = AtomMeasure(
            atoms=tuple(s * a for a in NU_ASYM.atoms), weights=NU_ASYM.weights)
        r = abs(s)
        assert ge.p00(scaled, s * z) == pytest.approx(ge.p00(NU_ASYM, z) / r**2)
        assert abs(ge.p0(scaled, s * z)) == pytest.approx(abs(ge.p0(NU_ASYM, z)) / r**3)
        assert ge.p1(scaled, s * z) == pytest.approx(ge.p1(NU_ASYM, z) / r**4)


def test_classify_edge_cases():
    assert ge.classify_edge(NU_SINGLE, 1.0, 1.0).classification is ge.EdgeClass.REGULAR
    assert ge.classify_edge(NU_PAIR, 1.0, 0.0).classification is ge.EdgeClass.QUADRATIC
    assert ge.classify_edge(NU_SINGLE, 1.0, 2.0).classification is ge.EdgeClass.NOT_ON_BOUNDARY
    ep = ge.classify_edge(NU_ASYM, 8.0 / 5.0, 0.0)
    assert ep.classification is ge.EdgeClass.REGULAR
    assert ep.p00 == pytest.approx(1.0 / (8.0 / 5.0), abs=1e-12)


def test_classify_edge_relabeling_invariance():
    relabeled = AtomMeasure(atoms=(2.0j, 1.0), weights=(0.5, 0.5))
    for z in (0.0, 0.3 + 0.2j):
        a = ge.classify_edge(NU_ASYM, 1.6, z)
        b = ge.classify_edge(relabeled, 1.6, z)
        assert a.classification is b.classification
        assert a.p00 == pytest.approx(b.p00)


def test_refine_to_boundary_unit_circle():
    for guess, target in ((1.1, 1.0), (0.9j, 1.0j)):
        ep = ge.refine_to_boundary(NU_SINGLE, 1.0, guess)
        assert abs(ep.z0 - target) <= 1e-10
        assert abs(ep.p00 - 1.0) <= 1e-12
        assert ep.classification is ge.EdgeClass.REGULAR


def test_refine_to_boundary_asymmetric():
    # the level line through 0 for this measure: Newton lands on the boundary
    # near the origin (the refined point satisfies the level equation even
    # though the gradient path need not terminate exactly at 0)
    ep = ge.refine_to_boundary(NU_ASYM, 8.0 / 5.0, 0.05)
    assert abs(ep.p00 - 0.625) <= 1e-12
    assert abs(ep.z0) <= 2e-2


def test_refine_rejects_vanishing_gradient():
    with pytest.raises(ArithmeticError):
        ge.refine_to_boundary(NU_PAIR, 1.0, 1e-9j)


def test_trace_boundary_single_atom_circle():
    curve = ge.trace_boundary(NU_SINGLE, 1.0, (-2, 2, -2, 2), grid=128)
    pts = curve.all_vertices()
    assert np.max(np.abs(np.abs(pts) - 1.0)) <= 1e-8
    assert len(curve.polylines) == 1
    poly = curve.polylines[0]
    assert poly[0] == poly[-1]  # closed


def test_trace_boundary_radius_scales_with_tau():
    curve = ge.trace_boundary(NU_SINGLE, 4.0, (-3, 3, -3, 3), grid=128)
    pts = curve.all_vertices()
    assert np.max(np.abs(np.abs(pts) - 2.0)) <= 1e-8


def test_trace_boundary_disjoint_components():
    curve = ge.trace_boundary(NU_PAIR, 0.2, (-2, 2, -2, 2), grid=192)
    closed = [p for p in curve.polylines if p[0] == p[-1]]
    assert len(closed) == 2
    centers = sorted(np.mean(np.asarray(p)).real for p in closed)
    assert centers[0] == pytest.approx(-1.0, abs=0.05)
    assert centers[1] == pytest.approx(1.0, abs=0.05)


def test_trace_boundary_vertices_on_level_set():
    curve = ge.trace_boundary(NU_ASYM, 1.6, (-2, 3, -2, 3), grid=128)
    pts = curve.all_vertices()
    assert np.max(np.abs(ge.p00(NU_ASYM, pts) - 1.0 / 1.6)) <= 1e-10


def test_trace_boundary_empty():
    with pytest.raises(ValueError):
        ge.trace_boundary(NU_SINGLE, 1.0, (5, 6, 5, 6), grid=32)


def test_boundary_csv_rows(tmp_path):
    curve = ge.trace_boundary(NU_SINGLE, 1.0, (-2, 2, -2, 2), grid=64)
    rows = ge.boundary_csv_rows(NU_SINGLE, 1.0, curve)
    assert len(rows) == curve.vertex_count
    assert all(r[5] == "regular" for r in rows)
