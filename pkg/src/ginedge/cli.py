"""Command-line front end.

Subcommands: boundary, classify, edge-density, pair-correlation,
convergence, kernel, verify.  Configuration is a single JSON file checked
strictly (unknown keys are rejected) before any computation starts.

Exit codes: 0 success, 2 configuration error, 3 assertion failure
(thresholds requested via --assert not met), 4 numerical failure.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import geometry, kernels, montecarlo, oracles, report
from .ensemble import AtomMeasure, spec_from_json
from .geometry import EdgeClass

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSERT = 3
EXIT_NUMERICAL = 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# strict config handling

def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    return obj


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _complex_of(obj, where: str) -> complex:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object with re/im")
    _check_keys(obj, {"re", "im"}, where)
    return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))


def _atoms_of(cfg: dict) -> AtomMeasure:
    atoms = cfg.get("atoms")
    if not atoms:
        raise ConfigError("config requires a non-empty 'atoms' list")
    for i, a in enumerate(atoms):
        _check_keys(a, {"re", "im", "c"}, f"atoms[{i}]")
    return AtomMeasure(
        atoms=tuple(complex(a.get("re", 0.0), a.get("im", 0.0)) for a in atoms),
        weights=tuple(float(a["c"]) for a in atoms),
    )


def _spec_of(cfg: dict):
    spec_obj = cfg.get("spec")
    if spec_obj is None:
        raise ConfigError("config requires a 'spec' object")
    _check_keys(spec_obj, {"tau", "N", "atoms", "r0", "z0", "a_t1", "R0"}, "spec")
    try:
        return spec_from_json(spec_obj)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid spec: {exc}") from exc


def _edge_of(cfg: dict, nu: AtomMeasure, tau: float):
    edge_obj = cfg.get("edge")
    if edge_obj is None:
        raise ConfigError("config requires an 'edge' object (z0 or z_guess)")
    _check_keys(edge_obj, {"z0", "z_guess"}, "edge")
    if "z0" in edge_obj:
        edge = geometry.classify_edge(nu, tau, _complex_of(edge_obj["z0"], "edge.z0"))
    elif "z_guess" in edge_obj:
        edge = geometry.refine_to_boundary(
            nu, tau, _complex_of(edge_obj["z_guess"], "edge.z_guess"))
    else:
        raise ConfigError("edge needs either z0 or z_guess")
    if edge.classification is EdgeClass.QUADRATIC:
        raise ConfigError(
            "edge point is quadratic: its local statistics follow the critical "
            "kernel, which is outside this tool's scope"
        )
    if edge.classification is not EdgeClass.REGULAR:
        raise ConfigError(
            f"edge point is not on the boundary (p00 = {edge.p00!r}, "
            f"need 1/tau = {1.0 / tau!r})"
        )
    return edge


def _experiment_of(cfg: dict, spec, edge, seed_override):
    exp = cfg.get("experiment")
    if exp is None:
        raise ConfigError("config requires an 'experiment' object")
    _check_keys(exp, {"trials", "window", "bins", "im_band", "seed"}, "experiment")
    seed = seed_override if seed_override is not None else exp.get("seed")
    if seed is None:
        raise ConfigError("a seed is required (experiment.seed or --seed)")
    bins = exp.get("bins", [24, 24])
    if not (isinstance(bins, list) and len(bins) == 2):
        raise ConfigError("experiment.bins must be [nx, ny]")
    try:
        return montecarlo.ExperimentConfig(
            spec=spec, edge=edge,
            trials=int(exp.get("trials", 0)),
            seed=int(seed),
            window=float(exp.get("window", 3.0)),
            bins=(int(bins[0]), int(bins[1])),
            im_band=float(exp.get("im_band", 2.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid experiment parameters: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands

def cmd_boundary(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"atoms", "tau", "box", "grid"}, "config")
    nu = _atoms_of(cfg)
    tau = float(cfg.get("tau", 1.0))
    box = cfg.get("box")
    if not (isinstance(box, list) and len(box) == 4):
        raise ConfigError("config requires box = [re_min, re_max, im_min, im_max]")
    grid = int(cfg.get("grid", 512))
    try:
        curve = geometry.trace_boundary(nu, tau, tuple(map(float, box)), grid=grid)
    except ValueError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = _out_dir(args)
    rows = geometry.boundary_csv_rows(nu, tau, curve)
    lines = ["re,im,p00,abs_p0,p1,class"]
    for r in rows:
        lines.append(",".join([repr(float(v)) if not isinstance(v, str) else v
                               for v in r]))
    (out / "boundary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "boundary.svg").write_text(_boundary_svg(curve, nu), encoding="utf-8")
    print(f"traced {len(curve.polylines)} curve(s), {curve.vertex_count} vertices "
          f"-> {out / 'boundary.csv'}")
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"atoms", "tau", "points", "tol_b", "tol_q"}, "config")
    nu = _atoms_of(cfg)
    tau = float(cfg.get("tau", 1.0))
    pts = cfg.get("points")
    if not pts:
        raise ConfigError("config requires a non-empty 'points' list")
    tol_b = float(cfg.get("tol_b", geometry.DEFAULT_TOL_B))
    tol_q = float(cfg.get("tol_q", geometry.DEFAULT_TOL_Q))
    results = []
    for i, p in enumerate(pts):
        z = _complex_of(p, f"points[{i}]")
        ep = geometry.classify_edge(nu, tau, z, tol_b=tol_b, tol_q=tol_q)
        results.append(ep.digest_dict())
        print(f"z = {z.real:+.6f}{z.imag:+.6f}i  p00 = {ep.p00:.9f}  "
              f"|p0| = {abs(ep.p0):.3e}  class = {ep.classification.value}")
    if args.out:
        out = _out_dir(args)
        (out / "classify.json").write_text(
            json.dumps(results, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _run_pipeline(args, cfg):
    spec = _spec_of(cfg)
    edge = _edge_of(cfg, spec.nu, spec.tau)
    exp_cfg = _experiment_of(cfg, spec, edge, args.seed)
    model = kernels.KernelModel.for_spec(spec, edge)
    samples = montecarlo.run_edge_experiment(exp_cfg, threads=args.threads)
    return spec, edge, exp_cfg, model, samples


def cmd_edge_density(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"spec", "edge", "experiment", "region", "assert"}, "config")
    spec, edge, exp_cfg, model, samples = _run_pipeline(args, cfg)

    hist = montecarlo.density_histogram(samples, exp_cfg)
    profile = montecarlo.profile_histogram(samples, exp_cfg)
    region = tuple(cfg.get("region", (-2.5, 2.0)))
    predicted = report.expected_profile(model, profile)
    try:
        sup, _ = report.sup_relative_error_detail(profile, predicted, region)
    except ValueError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    gof = report.chi_square_gof(hist, model, im_band=exp_cfg.im_band,
                                sup_rel_error=sup,
                                region=f"|Im zhat| <= {exp_cfg.im_band}, "
                                       f"Re zhat in {list(region)}")
    hist_expected = report.expected_histogram_counts(model, hist)

    deep = profile.centers <= -2.5
    deep_dev = float(np.max(np.abs(profile.density()[deep] * math.pi - 1.0))) \
        if np.any(deep) else float("nan")

    summary = {
        "command": "edge-density",
        "spec_digest": samples.spec_digest,
        "edge": edge.digest_dict(),
        "kernel_index": model.index,
        "seed": exp_cfg.seed,
        "trials": exp_cfg.trials,
        "window": exp_cfg.window,
        "im_band": exp_cfg.im_band,
        "bins": list(exp_cfg.bins),
        "kept_points": samples.total_points,
        "mean_kept_per_trial": samples.mean_kept_per_trial(),
        "gof": gof.to_dict(),
        "deep_inside_max_rel_dev": deep_dev,
    }
    out = _out_dir(args)
    paths = report.emit_report(out, summary=summary, hist=hist,
                               hist_expected=hist_expected, profile=profile,
                               profile_expected=predicted, samples=samples)
    print(f"kernel index {model.index}; kept {samples.total_points} points in "
          f"{exp_cfg.trials} trials; pvalue = {gof.pvalue:.4g}, "
          f"sup_rel_error = {sup:.4g} on {region}")
    print(f"report -> {paths['summary']}")

    if args.assert_thresholds:
        checks = cfg.get("assert", {})
        _check_keys(checks, {"sup_rel_max", "pvalue_min", "deep_inside_max"},
                    "assert")
        sup_max = float(checks.get("sup_rel_max", 0.07))
        p_min = float(checks.get("pvalue_min", 0.005))
        failures = []
        if sup > sup_max:
            failures.append(f"sup_rel_error {sup:.4g} > {sup_max}")
        if gof.pvalue < p_min:
            failures.append(f"pvalue {gof.pvalue:.4g} < {p_min}")
        deep_max = checks.get("deep_inside_max")
        if deep_max is not None and not (deep_dev <= float(deep_max)):
            failures.append(f"deep_inside_max_rel_dev {deep_dev:.4g} > {deep_max}")
        if failures:
            print("assertion failures: " + "; ".join(failures), file=sys.stderr)
            return EXIT_ASSERT
    return EXIT_OK


def cmd_pair_correlation(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"spec", "edge", "experiment", "pair", "assert"}, "config")
    spec = _spec_of(cfg)
    if spec.R0 < 2:
        raise ConfigError(
            "pair correlations need an ensemble with R_0 >= n = 2 "
            f"(spec has R0 = {spec.R0})"
        )
    edge = _edge_of(cfg, spec.nu, spec.tau)
    exp_cfg = _experiment_of(cfg, spec, edge, args.seed)
    samples = montecarlo.run_edge_experiment(exp_cfg, threads=args.threads)

    pair_cfg = cfg.get("pair", {})
    _check_keys(pair_cfg, {"coincidence", "distant", "bins"}, "pair")
    coin = tuple(pair_cfg.get("coincidence", (0.0, 0.2)))
    dist = tuple(pair_cfg.get("distant", (4.0, 1e9)))
    bins = pair_cfg.get("bins", list(exp_cfg.bins))
    pc = montecarlo.pair_correlation_estimate(
        samples, bins=(int(bins[0]), int(bins[1])), r0_available=spec.R0)
    ratio_coin = montecarlo.pair_ratio(pc, *coin)
    ratio_dist = montecarlo.pair_ratio(pc, *dist)

    out = _out_dir(args)
    summary = {
        "command": "pair-correlation",
        "spec_digest": samples.spec_digest,
        "seed": exp_cfg.seed,
        "trials": exp_cfg.trials,
        "coincidence_separation": list(coin),
        "coincidence_ratio": ratio_coin,
        "distant_separation": list(dist),
        "distant_ratio": ratio_dist,
        "total_pairs": int(pc.pair_counts.sum()),
    }
    (out / "pair_summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"coincidence ratio {ratio_coin:.4g} on {coin}; "
          f"distant ratio {ratio_dist:.4g} on {dist}")

    if args.assert_thresholds:
        checks = cfg.get("assert", {})
        _check_keys(checks, {"coincidence_max", "distant_range"}, "assert")
        coin_max = float(checks.get("coincidence_max", 0.3))
        lo, hi = checks.get("distant_range", (0.85, 1.15))
        failures = []
        if ratio_coin >= coin_max:
            failures.append(f"coincidence ratio {ratio_coin:.4g} >= {coin_max}")
        if not (float(lo) <= ratio_dist <= float(hi)):
            failures.append(f"distant ratio {ratio_dist:.4g} outside [{lo}, {hi}]")
        if failures:
            print("assertion failures: " + "; ".join(failures), file=sys.stderr)
            return EXIT_ASSERT
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"spec", "edge", "experiment", "n_list", "region"}, "config")
    spec = _spec_of(cfg)
    edge = _edge_of(cfg, spec.nu, spec.tau)
    exp = cfg.get("experiment", {})
    _check_keys(exp, {"trials", "window", "bins", "im_band", "seed"}, "experiment")
    seed = args.seed if args.seed is not None else exp.get("seed")
    if seed is None:
        raise ConfigError("a seed is required (experiment.seed or --seed)")
    n_list = cfg.get("n_list")
    if not n_list:
        raise ConfigError("config requires a non-empty increasing 'n_list'")
    region = tuple(cfg.get("region", (-2.0, 2.0)))
    bins = exp.get("bins", [24, 24])
    rows = montecarlo.convergence_study(
        spec, edge, [int(n) for n in n_list],
        trials=int(exp.get("trials", 0)), seed=int(seed), threads=args.threads,
        region=region, window=float(exp.get("window", 3.0)),
        bins=(int(bins[0]), int(bins[1])), im_band=float(exp.get("im_band", 2.0)),
    )
    out = _out_dir(args)
    lines = ["N,sup_rel_error,mc_noise"]
    for n_dim, err, noise in rows:
        lines.append(f"{n_dim},{err!r},{noise!r}")
    (out / "convergence.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for n_dim, err, noise in rows:
        print(f"N = {n_dim:6d}  profile error = {err:.4f}  (bin noise ~ {noise:.4f})")

    if args.assert_thresholds:
        inversions = 0
        for (_, e_prev, _), (_, e_next, noise) in zip(rows, rows[1:]):
            if e_next > e_prev:
                if e_next - e_prev > 1.5 * noise:
                    print(f"assertion failure: error rose {e_prev:.4f} -> "
                          f"{e_next:.4f} beyond 1.5 x noise", file=sys.stderr)
                    return EXIT_ASSERT
                inversions += 1
        if inversions > 1:
            print(f"assertion failure: {inversions} error inversions (max 1)",
                  file=sys.stderr)
            return EXIT_ASSERT
    return EXIT_OK


def cmd_kernel(args) -> int:
    index = float(args.index)
    if index < -1:
        raise ConfigError("kernel index must be >= -1")
    pts = _kernel_points(args)
    integer_index = index >= 0 and float(index).is_integer()
    if integer_index:
        edge = geometry.classify_edge(
            AtomMeasure(atoms=(0.0,), weights=(1.0,)), 1.0, 1.0)
        model = kernels.KernelModel(index=int(index), edge=edge, tau=1.0)
    lines = ["re,im,ie_re,ie_im,kernel_diag,predicted_1pt"]
    try:
        for z in pts:
            val = kernels.ie(index, z)
            if integer_index:
                kd = kernels.kernel_diag(model, z.real)
                r1 = kernels.predicted_correlation(model, [z])
                lines.append(f"{z.real!r},{z.imag!r},{val.real!r},{val.imag!r},"
                             f"{kd!r},{r1!r}")
            else:
                lines.append(f"{z.real!r},{z.imag!r},{val.real!r},{val.imag!r},,")
    except kernels.WindowError as exc:
        raise ConfigError(str(exc)) from exc
    text = "\n".join(lines) + "\n"
    if args.out:
        out = _out_dir(args)
        (out / "kernel.csv").write_text(text, encoding="utf-8")
        print(f"wrote {out / 'kernel.csv'}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _kernel_points(args) -> list[complex]:
    if args.points:
        pts = []
        for tok in args.points.split(";"):
            re_s, im_s = tok.split(",")
            pts.append(complex(float(re_s), float(im_s)))
        return pts
    if args.re is None:
        raise ConfigError("kernel needs --points or a --re grid")
    lo, hi, num = args.re
    re_vals = np.linspace(float(lo), float(hi), int(num))
    if args.im:
        lo_i, hi_i, num_i = args.im
        im_vals = np.linspace(float(lo_i), float(hi_i), int(num_i))
    else:
        im_vals = np.array([0.0])
    return [complex(r, i) for r in re_vals for i in im_vals]


_VERIFY_NAMES = ("tensor", "cone", "triangular", "hciz", "andreief")


def cmd_verify(args) -> int:
    only = args.only
    if only is not None and only not in _VERIFY_NAMES:
        raise ConfigError(f"--only must be one of {_VERIFY_NAMES}")
    samples = args.samples if args.samples is not None else 1_000_000
    seed = args.seed if args.seed is not None else 20240801
    verdicts = []

    def want(name):
        return only is None or only == name

    rng = np.random.default_rng(seed)
    if want("tensor"):
        verdicts.append(oracles.verify_tensor_commutation(2, 3, 8, rng))
        verdicts.append(oracles.verify_tensor_commutation(4, 4, 8, rng))
    if want("cone"):
        verdicts.append(oracles.verify_cone_integral(2, 3, [-1.0, -1.0], samples, rng))
        verdicts.append(oracles.verify_cone_integral(2, 2, [-2.0, -1.0], samples, rng))
        verdicts.append(oracles.verify_cone_integral(3, 4, [-1.0, -1.5, -1.0],
                                                     samples, rng))
    if want("triangular"):
        nu = AtomMeasure(atoms=(-1.0, 1.0), weights=(0.5, 0.5))
        edge = geometry.refine_to_boundary(nu, 1.0, 0.5 + 0.8j)
        verdicts.append(oracles.verify_triangular_gaussian(
            2, nu, edge.z0, 1.0, rng, mc_samples=min(samples, 200_000)))
        nu3 = AtomMeasure(atoms=(0.0, 2.0, 1.0 + 1.5j), weights=(0.5, 0.25, 0.25))
        edge3 = geometry.refine_to_boundary(nu3, 1.0, 0.9 - 0.55j)
        verdicts.append(oracles.verify_triangular_gaussian(
            3, nu3, edge3.z0, 1.0, rng, mc_samples=min(samples, 200_000)))
    if want("hciz"):
        verdicts.append(oracles.verify_hciz(2, [0.0, 1.0], [0.0, 1.0], samples, rng))
        verdicts.append(oracles.verify_hciz(3, [0.0, 0.7, 1.6], [-0.4, 0.3, 1.1],
                                            samples, rng))
    if want("andreief"):
        verdicts.append(oracles.verify_andreief(
            1, [("mono", 0)], [("mono", 1)], ("uniform", 0.0, 1.0)))
        verdicts.append(oracles.verify_andreief(
            2, [("mono", 0), ("mono", 1)], [("mono", 0), ("mono", 1)],
            ("uniform", 0.0, 1.0)))
        verdicts.append(oracles.verify_andreief(
            3, [("exp", 1), ("mono", 1), ("mono", 2)],
            [("mono", 0), ("exp", -1), ("mono", 1)], ("gaussian",)))

    for v in verdicts:
        print(v.line())
    if args.out:
        out = _out_dir(args)
        payload = [
            {"name": v.name, "method": v.method, "passed": v.passed,
             "lhs": [v.lhs.real, v.lhs.imag], "rhs": [v.rhs.real, v.rhs.imag],
             "rel_error": v.rel_error, "samples": v.samples,
             "mc_std_error": v.mc_std_error}
            for v in verdicts
        ]
        (out / "verify.json").write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_NUMERICAL


def _boundary_svg(curve, nu, width: int = 520, height: int = 520) -> str:
    pts = curve.all_vertices()
    re0, re1 = float(np.min(pts.real)), float(np.max(pts.real))
    im0, im1 = float(np.min(pts.imag)), float(np.max(pts.imag))
    pad = 0.08 * max(re1 - re0, im1 - im0, 1e-9)
    re0, re1, im0, im1 = re0 - pad, re1 + pad, im0 - pad, im1 + pad
    scale = min(width / (re1 - re0), height / (im1 - im0))

    def px(z):
        return (z.real - re0) * scale, height - (z.imag - im0) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        "<style>.curve{fill:none;stroke:#1f6fb2;stroke-width:1.5}"
        ".atom{fill:#c23b22}</style>",
    ]
    for poly in curve.polylines:
        coords = " ".join(f"{px(z)[0]:.2f},{px(z)[1]:.2f}" for z in np.asarray(poly))
        parts.append(f'<polyline class="curve" points="{coords}"/>')
    for a in nu.atoms:
        x, y = px(complex(a))
        parts.append(f'<circle class="atom" cx="{x:.2f}" cy="{y:.2f}" r="3"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginedge",
        description="Edge statistics laboratory for deformed complex "
                    "Ginibre ensembles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker process cap")
        p.add_argument("--assert", dest="assert_thresholds", action="store_true",
                       help="exit 3 when acceptance thresholds are not met")

    common(sub.add_parser("boundary", help="trace and export the support boundary"))
    common(sub.add_parser("classify", help="classify points against the boundary"))
    common(sub.add_parser("edge-density",
                          help="full pipeline: sample, histogram, compare, report"))
    common(sub.add_parser("pair-correlation",
                          help="within-trial pair statistics near the edge"))
    common(sub.add_parser("convergence",
                          help="profile error across a list of matrix sizes"))

    p = sub.add_parser("kernel", help="evaluate moment integrals / kernel diagonal")
    p.add_argument("--index", required=True,
                   help="kernel index (real, >= -1; integer for kernel columns)")
    p.add_argument("--points", default=None, help="semicolon list 're,im;re,im'")
    p.add_argument("--re", nargs=3, metavar=("LO", "HI", "NUM"), default=None)
    p.add_argument("--im", nargs=3, metavar=("LO", "HI", "NUM"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--threads", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--assert", dest="assert_thresholds", action="store_true",
                   help=argparse.SUPPRESS)

    p = sub.add_parser("verify", help="run the matrix-integral identity suite")
    p.add_argument("--only", default=None, choices=_VERIFY_NAMES)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--assert", dest="assert_thresholds", action="store_true",
                   help=argparse.SUPPRESS)
    return parser


_HANDLERS = {
    "boundary": cmd_boundary,
    "classify": cmd_classify,
    "edge-density": cmd_edge_density,
    "pair-correlation": cmd_pair_correlation,
    "convergence": cmd_convergence,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config-error code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
