import json
import math

import numpy as np
import pytest

from ginedge.cli import main


def write(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


@pytest.fixture
def ginue_config(tmp_path):
    return write(tmp_path / "cfg.json", {
        "spec": {"tau": 1.0, "N": 48,
                 "atoms": [{"re": 0, "im": 0, "c": 1}],
                 "r0": 0, "a_t1": [], "R0": 2},
        "edge": {"z0": {"re": 1, "im": 0}},
        "experiment": {"trials": 30, "window": 3, "bins": [16, 16],
                       "im_band": 2, "seed": 5},
    })


def test_malformed_json_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{oops}", encoding="utf-8")
    assert main(["edge-density", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "malformed JSON" in capsys.readouterr().err


def test_unknown_keys_rejected(tmp_path, capsys):
    cfg = write(tmp_path / "c.json", {
        "atoms": [{"re": 0, "im": 0, "c": 1}], "tau": 1.0,
        "box": [-2, 2, -2, 2], "extra_key": 1,
    })
    assert main(["boundary", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "unknown keys" in capsys.readouterr().err


def test_boundary_circle(tmp_path):
    cfg = write(tmp_path / "c.json", {
        "atoms": [{"re": 0, "im": 0, "c": 1}], "tau": 1.0,
        "box": [-2, 2, -2, 2], "grid": 96,
    })
    out = tmp_path / "o"
    assert main(["boundary", "--config", cfg, "--out", str(out)]) == 0
    rows = (out / "boundary.csv").read_text().splitlines()[1:]
    radii = [math.hypot(float(r.split(",")[0]), float(r.split(",")[1]))
             for r in rows]
    assert max(abs(r - 1.0) for r in radii) <= 1e-8
    assert (out / "boundary.svg").read_text().count("<polyline") >= 1


def test_boundary_empty_contour_exits_4(tmp_path):
    cfg = write(tmp_path / "c.json", {
        "atoms": [{"re": 0, "im": 0, "c": 1}], "tau": 1.0,
        "box": [5, 6, 5, 6], "grid": 32,
    })
    assert main(["boundary", "--config", cfg, "--out", str(tmp_path / "o")]) == 4


def test_classify_quadratic_point(tmp_path, capsys):
    cfg = write(tmp_path / "c.json", {
        "atoms": [{"re": -1, "im": 0, "c": 0.5}, {"re": 1, "im": 0, "c": 0.5}],
        "tau": 1.0, "points": [{"re": 0, "im": 0}],
    })
    assert main(["classify", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert "quadratic" in capsys.readouterr().out
    data = json.loads((tmp_path / "o" / "classify.json").read_text())
    assert data[0]["class"] == "quadratic"


def test_edge_density_pipeline_and_determinism(tmp_path, ginue_config):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    assert main(["edge-density", "--config", ginue_config, "--out", str(out1),
                 "--threads", "1"]) == 0
    assert main(["edge-density", "--config", ginue_config, "--out", str(out2),
                 "--threads", "2"]) == 0
    for name in ("summary.json", "histogram.csv", "profile.csv", "samples.csv",
                 "profile.svg"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    summary = json.loads((out1 / "summary.json").read_text())
    assert summary["kernel_index"] == 0
    assert 0.0 <= summary["gof"]["pvalue"] <= 1.0


def test_edge_density_refuses_quadratic(tmp_path, capsys):
    cfg = write(tmp_path / "c.json", {
        "spec": {"tau": 1.0, "N": 32,
                 "atoms": [{"re": -1, "im": 0, "c": 0.5},
                           {"re": 1, "im": 0, "c": 0.5}],
                 "r0": 0, "a_t1": [], "R0": 2},
        "edge": {"z0": {"re": 0, "im": 0}},
        "experiment": {"trials": 5, "seed": 1},
    })
    assert main(["edge-density", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "quadratic" in capsys.readouterr().err


def test_edge_density_assert_mode(tmp_path, ginue_config):
    # 30 trials cannot satisfy the default thresholds
    code = main(["edge-density", "--config", ginue_config,
                 "--out", str(tmp_path / "o"), "--assert"])
    assert code in (0, 3)


def test_pair_correlation_requires_r0(tmp_path, capsys):
    cfg = write(tmp_path / "c.json", {
        "spec": {"tau": 1.0, "N": 32, "atoms": [{"re": 0, "im": 0, "c": 1}],
                 "r0": 0, "a_t1": [], "R0": 1},
        "edge": {"z0": {"re": 1, "im": 0}},
        "experiment": {"trials": 5, "seed": 1},
    })
    assert main(["pair-correlation", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == 2
    assert "R_0 >= n" in capsys.readouterr().err


def test_pair_correlation_runs(tmp_path, ginue_config):
    out = tmp_path / "o"
    assert main(["pair-correlation", "--config", ginue_config,
                 "--out", str(out)]) == 0
    summary = json.loads((out / "pair_summary.json").read_text())
    assert summary["coincidence_ratio"] >= 0.0
    assert summary["distant_ratio"] > 0.0


def test_convergence_table(tmp_path):
    cfg = write(tmp_path / "c.json", {
        "spec": {"tau": 1.0, "N": 32, "atoms": [{"re": 0, "im": 0, "c": 1}],
                 "r0": 0, "a_t1": [], "R0": 2},
        "edge": {"z0": {"re": 1, "im": 0}},
        "experiment": {"trials": 25, "seed": 3},
        "n_list": [24, 32],
    })
    out = tmp_path / "o"
    assert main(["convergence", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "convergence.csv").read_text().splitlines()
    assert lines[0] == "N,sup_rel_error,mc_noise"
    assert len(lines) == 3


def test_kernel_profile_matches_erfc(tmp_path):
    out = tmp_path / "o"
    assert main(["kernel", "--index", "0", "--re", "-3", "3", "13",
                 "--out", str(out)]) == 0
    rows = (out / "kernel.csv").read_text().splitlines()[1:]
    for row in rows:
        re, _, _, _, kd, _ = row.split(",")
        expected = math.erfc(math.sqrt(2.0) * float(re)) / (2.0 * math.pi)
        assert float(kd) == pytest.approx(expected, abs=1e-12)


def test_kernel_gaussian_limit_branch(capsys):
    assert main(["kernel", "--index", "-1", "--points", "0,0"]) == 0
    out = capsys.readouterr().out
    value = float(out.splitlines()[1].split(",")[2])
    assert value == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-13)


def test_kernel_out_of_window_exits_2():
    assert main(["kernel", "--index", "0", "--points", "9,0"]) == 2


def test_verify_only_filters(capsys):
    assert main(["verify", "--only", "andreief"]) == 0
    out = capsys.readouterr().out
    assert "andreief" in out
    assert "hciz" not in out


def test_verify_small_samples(capsys, tmp_path):
    code = main(["verify", "--only", "cone", "--samples", "20000",
                 "--seed", "77", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert "cone_integral" in out
    assert code in (0, 4)  # widened errors may or may not cross 3 sigma
    data = json.loads((tmp_path / "verify.json").read_text())
    assert all("mc_std_error" in v for v in data)
