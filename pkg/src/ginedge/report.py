"""Goodness-of-fit against the kernel prediction, and report emission.

Expected bin occupancies are obtained by quadrature of the kernel diagonal
over each bin (clipped to the window disk), scaled by the trial count.  The
Pearson statistic uses the textbook small-expectation merging rule; its
p-value comes from the regularized upper incomplete gamma.  Reports are
emitted as JSON/CSV/SVG with fully deterministic bytes: identical inputs
reproduce identical files.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.special as sp

from .kernels import KernelModel, kernel_diag
from .montecarlo import (
    EdgeSampleSet,
    HistogramGrid,
    Profile,
    cell_heights,
)

__all__ = [
    "GofResult",
    "expected_profile",
    "expected_histogram_counts",
    "chi_square_gof",
    "sup_relative_error",
    "sup_relative_error_detail",
    "emit_report",
]

#: predicted-density floor below which profile bins are dropped from the
#: sup-relative-error comparison (the prediction is unresolvable there)
PROFILE_FLOOR = 1e-4


@dataclass(frozen=True)
class GofResult:
    statistic: float
    dof: int
    pvalue: float
    sup_rel_error: float
    region: str

    def __post_init__(self):
        if not (0.0 <= self.pvalue <= 1.0):
            raise ValueError("pvalue must lie in [0, 1]")
        if self.dof < 1:
            raise ValueError("dof must be at least 1")

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "dof": self.dof,
            "pvalue": self.pvalue,
            "sup_rel_error": self.sup_rel_error,
            "region": self.region,
        }


def _gl(nodes: int = 32):
    return np.polynomial.legendre.leggauss(nodes)


def expected_profile(model: KernelModel, profile: Profile) -> np.ndarray:
    """Area-weighted kernel-diagonal mean over each profile bin.

    This is the density the empirical band-averaged profile estimates, so
    the two are comparable bin by bin even where the window disk clips the
    band.
    """
    x, wt = _gl()
    out = np.empty(len(profile.edges) - 1)
    w = profile.window
    band = profile.im_band
    for i in range(len(out)):
        a, b = profile.edges[i], profile.edges[i + 1]
        xm = 0.5 * (a + b) + 0.5 * (b - a) * x
        heights = np.minimum(cell_heights(-band, band, xm, w), 2.0 * band)
        kd = kernel_diag(model, xm)
        mass = 0.5 * (b - a) * np.dot(wt, kd * heights)
        out[i] = mass / profile.areas[i]
    return out


def expected_histogram_counts(model: KernelModel, hist: HistogramGrid) -> np.ndarray:
    """Expected counts per 2-D cell: trials x integral of the diagonal."""
    x, wt = _gl()
    nx = len(hist.x_edges) - 1
    ny = len(hist.y_edges) - 1
    expected = np.empty((nx, ny))
    for i in range(nx):
        a, b = hist.x_edges[i], hist.x_edges[i + 1]
        xm = 0.5 * (a + b) + 0.5 * (b - a) * x
        kd = kernel_diag(model, xm)
        for j in range(ny):
            h = cell_heights(hist.y_edges[j], hist.y_edges[j + 1], xm, hist.window)
            expected[i, j] = 0.5 * (b - a) * np.dot(wt, kd * h)
    return expected * hist.trials


def chi_square_gof(hist: HistogramGrid, model: KernelModel,
                   min_expected: float = 5.0,
                   im_band: float | None = None,
                   sup_rel_error: float = math.nan,
                   region: str = "") -> GofResult:
    """Pearson chi-square of observed vs kernel-predicted cell counts.

    Cells with expected count below ``min_expected`` are merged into the
    scan neighbor (row-major over the included region) until every bucket
    is testable; ``dof = buckets - 1``.  When ``im_band`` is given, only
    cell rows within the band participate, matching the profile region
    where curvature bias is controlled.
    """
    expected = expected_histogram_counts(model, hist)
    observed = hist.counts.astype(float)
    if im_band is not None:
        yc = 0.5 * (hist.y_edges[:-1] + hist.y_edges[1:])
        keep = np.abs(yc) <= im_band
        expected = expected[:, keep]
        observed = observed[:, keep]
        if not region:
            region = f"|Im zhat| <= {im_band}"
    if not region:
        region = "full window"

    exp_flat = expected.ravel()
    obs_flat = observed.ravel()
    buckets_o, buckets_e = _merge_small(obs_flat, exp_flat, min_expected)
    if len(buckets_e) < 2:
        raise ValueError("fewer than 2 merged bins: nothing to test")
    stat = float(np.sum((buckets_o - buckets_e) ** 2 / buckets_e))
    dof = len(buckets_e) - 1
    pvalue = float(sp.gammaincc(dof / 2.0, stat / 2.0))
    return GofResult(statistic=stat, dof=dof, pvalue=pvalue,
                     sup_rel_error=float(sup_rel_error), region=region)


def _merge_small(observed: np.ndarray, expected: np.ndarray, min_expected: float):
    """Greedy row-major merge of under-populated cells."""
    o_buckets, e_buckets = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            o_buckets.append(acc_o)
            e_buckets.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and e_buckets:
        # fold the undersized tail into the final bucket
        o_buckets[-1] += acc_o
        e_buckets[-1] += acc_e
    elif acc_e > 0:
        o_buckets.append(acc_o)
        e_buckets.append(acc_e)
    return np.asarray(o_buckets), np.asarray(e_buckets)


def sup_relative_error_detail(profile: Profile, predicted: np.ndarray,
                              region: tuple[float, float],
                              floor: float = PROFILE_FLOOR) -> tuple[float, int]:
    """Max relative profile deviation over resolvable bins, plus its index.

    Bins participate when their center lies in ``region`` and the predicted
    density clears ``floor``; raises when no bin qualifies (the region sits
    too far outside the support for the prediction to be resolvable).
    """
    centers = profile.centers
    mask = (centers >= region[0]) & (centers <= region[1]) & (predicted >= floor)
    if not np.any(mask):
        raise ValueError("no resolvable profile bins inside the region")
    emp = profile.density()
    rel = np.abs(emp - predicted) / predicted
    rel = np.where(mask, rel, -np.inf)
    idx = int(np.argmax(rel))
    return float(rel[idx]), idx


def sup_relative_error(profile: Profile, model: KernelModel,
                       region: tuple[float, float],
                       floor: float = PROFILE_FLOOR) -> float:
    predicted = expected_profile(model, profile)
    value, _ = sup_relative_error_detail(profile, predicted, region, floor=floor)
    return value


# ---------------------------------------------------------------------------
# deterministic emission


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _csv(rows, header: tuple[str, ...]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def emit_report(out_dir, *, summary: dict, hist: HistogramGrid,
                hist_expected: np.ndarray, profile: Profile,
                profile_expected: np.ndarray,
                samples: EdgeSampleSet | None = None) -> dict:
    """Write summary JSON, histogram/profile/samples CSV and the SVG overlay.

    Emission is pure serialization: identical inputs give byte-identical
    files, and re-emitting overwrites in place.  Returns the path map.
    """
    out = Path(out_dir)
    paths = {}

    text = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    paths["summary"] = out / "summary.json"
    _write_text(paths["summary"], text)

    xc = 0.5 * (hist.x_edges[:-1] + hist.x_edges[1:])
    yc = 0.5 * (hist.y_edges[:-1] + hist.y_edges[1:])
    area = hist.cell_area()
    dens = hist.density()
    pred = hist_expected / (hist.trials * area)
    rows = [
        (xc[i], yc[j], dens[i, j], pred[i, j])
        for i in range(len(xc)) for j in range(len(yc))
    ]
    paths["histogram"] = out / "histogram.csv"
    _write_text(paths["histogram"], _csv(rows, ("re", "im", "density", "predicted")))

    prows = [
        (profile.centers[i], profile.density()[i], profile_expected[i],
         int(profile.counts[i]))
        for i in range(len(profile.counts))
    ]
    paths["profile"] = out / "profile.csv"
    _write_text(paths["profile"], _csv(prows, ("re", "density", "predicted", "counts")))

    if samples is not None:
        srows = []
        for trial, pts in enumerate(samples.points):
            for z in pts:
                srows.append((trial, z.real, z.imag))
        paths["samples"] = out / "samples.csv"
        _write_text(paths["samples"], _csv(srows, ("trial", "re", "im")))

    paths["svg"] = out / "profile.svg"
    _write_text(paths["svg"], _profile_svg(profile, profile_expected))
    return paths


def _profile_svg(profile: Profile, predicted: np.ndarray,
                 width: int = 640, height: int = 420) -> str:
    """Self-contained overlay plot: empirical vs predicted profile."""
    margin = 50.0
    xs = profile.centers
    emp = profile.density()
    top = max(float(np.max(emp)), float(np.max(predicted)), 1e-12) * 1.08

    def px(x):
        return margin + (x - xs[0]) / (xs[-1] - xs[0]) * (width - 2 * margin)

    def py(y):
        return height - margin - y / top * (height - 2 * margin)

    def polyline(ys, cls):
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        return f'<polyline class="{cls}" points="{pts}"/>'

    ticks = []
    for t in np.linspace(xs[0], xs[-1], 7):
        ticks.append(
            f'<line class="tick" x1="{px(t):.2f}" y1="{height - margin:.2f}" '
            f'x2="{px(t):.2f}" y2="{height - margin + 5:.2f}"/>'
            f'<text class="lbl" x="{px(t):.2f}" y="{height - margin + 18:.2f}">{t:.2g}</text>'
        )
    for t in np.linspace(0.0, top, 5):
        ticks.append(
            f'<line class="tick" x1="{margin - 5:.2f}" y1="{py(t):.2f}" '
            f'x2="{margin:.2f}" y2="{py(t):.2f}"/>'
            f'<text class="lbl" x="{margin - 8:.2f}" y="{py(t) + 4:.2f}" text-anchor="end">{t:.3g}</text>'
        )

    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        "<style>\n"
        ".empirical{fill:none;stroke:#1f6fb2;stroke-width:1.8}\n"
        ".predicted{fill:none;stroke:#c23b22;stroke-width:1.4;stroke-dasharray:6 3}\n"
        ".axis{stroke:#333;stroke-width:1}\n"
        ".tick{stroke:#333;stroke-width:1}\n"
        ".lbl{font:11px sans-serif;fill:#333;text-anchor:middle}\n"
        "</style>\n"
        f'<line class="axis" x1="{margin}" y1="{height - margin}" '
        f'x2="{width - margin}" y2="{height - margin}"/>\n'
        f'<line class="axis" x1="{margin}" y1="{margin}" '
        f'x2="{margin}" y2="{height - margin}"/>\n'
        + "\n".join(ticks) + "\n"
        + polyline(emp, "empirical") + "\n"
        + polyline(predicted, "predicted") + "\n"
        + "</svg>\n"
    )
