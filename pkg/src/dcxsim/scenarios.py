"""Preset experiment scenarios wiring samplers, comparison harnesses and
estimators together; each runner returns a verdict plus plot-ready tables."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import ordering, processes, wireless
from .distributions import ClusterKernel, MassDistribution, constant, exponential
from .geometry import Box, RngStream, Window, make_window
from .ops import displace, superpose, thin_iid
from .ordering import (
    CONSISTENT,
    VIOLATION,
    compare_on_boxes,
    compare_vectors,
    counts_on_boxes,
    lo_compare,
    make_suite,
    oracle_ginibre_radii,
    oracle_ising_exact,
    oracle_poisson_scaling,
)
from .shotnoise import ResponseKernel, extremal_sn
from .stats import mixed_palm_estimate, ripley_k
from .geometry import count_in, mass_in


@dataclass
class ScenarioResult:
    scenario_id: str
    verdict: str
    per_function: list = field(default_factory=list)
    mean_equality: Optional[dict] = None
    details: dict = field(default_factory=dict)
    csv_header: list = field(default_factory=list)
    csv_rows: list = field(default_factory=list)


def _window(params: dict, lows, highs, topology="torus") -> Window:
    wspec = params.get("window", {})
    return make_window(
        wspec.get("lows", lows), wspec.get("highs", highs), wspec.get("topology", topology)
    )


def _quadrant_boxes(w: Window) -> list[Box]:
    """2^d congruent half-open boxes partitioning the window."""
    mids = (w.lows + w.highs) / 2.0
    boxes = []
    for mask in range(2**w.dim):
        lo = np.where([(mask >> k) & 1 for k in range(w.dim)], mids, w.lows)
        hi = np.where([(mask >> k) & 1 for k in range(w.dim)], w.highs, mids)
        boxes.append(Box(lo, hi))
    return boxes


def _order_csv(report) -> tuple[list, list]:
    header = ["id", "family", "mean_x", "mean_y", "diff", "stderr", "z"]
    rows = [
        [r.fid, r.family, r.mean_x, r.mean_y, r.diff, r.stderr, r.z] for r in report.records
    ]
    return header, rows


def _thomas_sampler_matching(lam: float, params: dict, w: Window) -> Callable:
    """Thomas sampler with total intensity lam."""
    cluster_size = float(params.get("cluster_size", 5.0))
    sigma = float(params.get("sigma", 0.05))
    return processes.make_thomas_sampler(lam / cluster_size, cluster_size, sigma, w)


# ---------------------------------------------------------------------------
# Scenario runners

def run_ising_vs_poisson(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    mu1 = float(params.get("mu1", 2.0))
    mu2 = float(params.get("mu2", 0.0))
    p_plus = float(params.get("p_plus", 0.5))
    n_reps = int(params.get("n_reps", 20_000))
    suite_size = int(params.get("suite_size", 100))
    z_crit = float(params.get("z_crit", 3.0))
    cells = int(params.get("cells_per_axis", 32))
    w = _window(params, [0.0, 0.0], [4.0, 4.0])
    lam_bar = mu1 * p_plus + mu2 * (1.0 - p_plus)
    boxes = _quadrant_boxes(w)

    def draw_poisson(gen):
        return processes.sample_poisson(lam_bar, w, gen)

    def draw_ising(gen):
        f = processes.sample_ising_field(mu1, mu2, p_plus, w, [cells] * w.dim, gen)
        return processes.sample_cox(f, gen)

    scale = np.array([lam_bar * b.volume for b in boxes])
    suite = make_suite("dcx", len(boxes), suite_size, stream.split(10**6), scale=scale)
    report = compare_on_boxes(
        draw_poisson, draw_ising, boxes, suite, n_reps, stream,
        z_crit=z_crit, workers=workers,
    )
    header, rows = _order_csv(report)
    n_separated = int(sum(r.z > 3.0 for r in report.records))
    return ScenarioResult(
        "ising-vs-poisson",
        report.verdict,
        [r.to_dict() for r in report.records],
        report.mean_equality,
        {"lam_bar": lam_bar, "n_strictly_separated": n_separated},
        header,
        rows,
    )


def run_ppcluster_family(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    lam = float(params.get("lam", 20.0))
    sigma = float(params.get("sigma", 0.1))
    n_reps = int(params.get("n_reps", 20_000))
    suite_size = int(params.get("suite_size", 40))
    pairs = [tuple(p) for p in params.get("c_pairs", [(4.0, 1.0), (2.0, 0.5)])]
    w = _window(params, [0.0, 0.0], [1.0, 1.0])
    kernel = ClusterKernel("gaussian", (sigma,))
    queries = np.asarray(
        params.get("queries", [[0.2, 0.2], [0.5, 0.5], [0.8, 0.6]]), dtype=float
    )

    def draw_at(c):
        return lambda gen: processes.ppcluster_intensity_at(c, lam, kernel, w, queries, gen)

    results = []
    variances = {}
    verdict = CONSISTENT
    per_function = []
    mean_eq = None
    rows = []
    for k, (c_hi, c_lo) in enumerate(pairs):
        suite = make_suite(
            "dcx", queries.shape[0], suite_size, stream.split(10**6 + k),
            scale=np.full(queries.shape[0], lam),
        )
        # larger c is the less variable (dcx-smaller) member of the family
        rep = compare_vectors(
            draw_at(c_hi), draw_at(c_lo), suite, n_reps, stream.split(2 * k),
            workers=workers,
        )
        if rep.verdict != CONSISTENT and verdict == CONSISTENT:
            verdict = rep.verdict
        per_function.extend(dict(r.to_dict(), c_pair=[c_hi, c_lo]) for r in rep.records)
        mean_eq = rep.mean_equality
        for c in (c_hi, c_lo):
            if c not in variances:
                gen = stream.split(10**6 + 100 + round(1000 * c)).generator()
                vals = np.array([draw_at(c)(gen)[0] for _ in range(n_reps)])
                variances[c] = float(vals.var(ddof=1))
        results.append(
            {
                "c_pair": [c_hi, c_lo],
                "verdict": rep.verdict,
                "var_hi": variances[c_hi],
                "var_lo": variances[c_lo],
                "var_ratio": variances[c_hi] / variances[c_lo],
                "expected_ratio": c_lo / c_hi,
            }
        )
        rows.append(
            [c_hi, c_lo, rep.verdict, variances[c_hi], variances[c_lo],
             variances[c_hi] / variances[c_lo], c_lo / c_hi]
        )
    return ScenarioResult(
        "ppcluster-family",
        verdict,
        per_function,
        mean_eq,
        {"pairs": results},
        ["c_hi", "c_lo", "verdict", "var_hi", "var_lo", "var_ratio", "expected_ratio"],
        rows,
    )


def _sinr_layout(params: dict, w: Window) -> wireless.LinkLayout:
    t = float(params.get("T", 1.0))
    beta = float(params.get("beta", 4.0))
    power = float(params.get("power", 1.0))
    noise = float(params.get("noise", 0.01))
    tx = np.asarray(params.get("emitters", [[0.3, 0.3], [0.7, 0.7]]), dtype=float)
    rx = np.asarray(params.get("receivers", [[0.3, 0.35], [0.7, 0.75]]), dtype=float)
    return wireless.LinkLayout(
        w, tx, rx, t,
        ResponseKernel("power_law", (beta,), emitted_power=power),
        exponential(float(params.get("fading_mean", 1.0))),
        constant(noise),
    )


def run_sinr_compare(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    lam = float(params.get("lam", 5.0))
    n_reps = int(params.get("n_reps", 20_000))
    w = _window(params, [0.0, 0.0], [1.0, 1.0])
    layout = _sinr_layout(params, w)
    poisson = lambda gen: processes.sample_poisson(lam, w, gen)
    thomas = _thomas_sampler_matching(lam, params, w)
    p_po, se_po = wireless.sinr_success_rayleigh(
        layout, poisson, n_reps, stream.split(0), workers=workers
    )
    p_th, se_th = wireless.sinr_success_rayleigh(
        layout, thomas, n_reps, stream.split(1), workers=workers
    )
    p_ind, se_ind = wireless.sinr_success(
        layout, poisson, n_reps, stream.split(2), workers=workers
    )
    pooled = float(np.hypot(se_po, se_ind))
    estimators_agree = abs(p_po - p_ind) <= 3.0 * pooled
    sep = float(np.hypot(se_po, se_th))
    # clustered interferers leave more interference-free space: claim p_th >= p_po
    verdict = VIOLATION if p_th < p_po - 3.0 * sep else CONSISTENT
    if not estimators_agree:
        verdict = VIOLATION
    details = {
        "p_poisson": p_po, "stderr_poisson": se_po,
        "p_thomas": p_th, "stderr_thomas": se_th,
        "p_poisson_indicator": p_ind, "stderr_poisson_indicator": se_ind,
        "estimators_agree": estimators_agree,
        "ci_separated": bool(p_th - p_po > 3.0 * sep),
    }
    rows = [
        ["poisson", "rayleigh", p_po, se_po],
        ["thomas", "rayleigh", p_th, se_th],
        ["poisson", "indicator", p_ind, se_ind],
    ]
    return ScenarioResult(
        "sinr-compare", verdict, [], None, details,
        ["interferers", "estimator", "p_success", "stderr"], rows,
    )


def run_coverage_compare(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    lam = float(params.get("lam", 20.0))
    r = float(params.get("r", 0.1))
    n_reps = int(params.get("n_reps", 20_000))
    w = _window(params, [0.0, 0.0], [1.0, 1.0])
    queries = np.asarray(params.get("queries", [[0.5, 0.5]]), dtype=float)
    radius = constant(r)
    poisson = lambda gen: processes.sample_poisson(lam, w, gen)
    thomas = _thomas_sampler_matching(lam, params, w)
    rep_po = wireless.boolean_coverage(
        poisson, radius, queries, n_reps, stream.split(0), workers=workers
    )
    rep_th = wireless.boolean_coverage(
        thomas, radius, queries, n_reps, stream.split(1), workers=workers
    )
    se_cov = np.hypot(rep_po.p_cover_stderr, rep_th.p_cover_stderr)
    se_m1 = np.hypot(rep_po.mean_count_stderr, rep_th.mean_count_stderr)
    se_m2 = np.hypot(rep_po.second_moment_stderr, rep_th.second_moment_stderr)
    # claims: coverage lower for the clustered germs, first moments equal,
    # second moments higher for the clustered germs
    bad = (
        np.any(rep_po.p_cover < rep_th.p_cover - 3 * se_cov)
        or np.any(np.abs(rep_po.mean_count - rep_th.mean_count) > 3 * se_m1)
        or np.any(rep_th.second_moment < rep_po.second_moment - 3 * se_m2)
    )
    analytic = 1.0 - float(np.exp(-lam * np.pi * r**2))
    verdict = VIOLATION if bad else CONSISTENT
    details = {
        "poisson": rep_po.to_dict(),
        "thomas": rep_th.to_dict(),
        "poisson_coverage_analytic": analytic,
    }
    rows = []
    for i in range(queries.shape[0]):
        rows.append(
            ["poisson", i, float(rep_po.p_cover[i]), float(rep_po.p_cover_stderr[i]),
             float(rep_po.mean_count[i]), float(rep_po.second_moment[i]), analytic]
        )
        rows.append(
            ["thomas", i, float(rep_th.p_cover[i]), float(rep_th.p_cover_stderr[i]),
             float(rep_th.mean_count[i]), float(rep_th.second_moment[i]), ""]
        )
    return ScenarioResult(
        "coverage-compare", verdict, [], None, details,
        ["germs", "query", "p_cover", "stderr", "mean_count", "second_moment", "analytic"],
        rows,
    )


def run_palm_poisson_check(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    lam = float(params.get("lam", 5.0))
    n_reps = int(params.get("n_reps", 20_000))
    w = _window(params, [0.0, 0.0], [2.0, 2.0])
    box_a = Box(params.get("box_lows", [0.0, 0.0]), params.get("box_highs", [1.0, 1.0]))
    f = lambda pts: box_a.contains(pts).astype(float)
    g = lambda p: float(count_in(p, box_a))
    sampler = lambda gen: processes.sample_poisson(lam, w, gen)
    est, se = mixed_palm_estimate(sampler, f, g, n_reps, stream.split(0))
    expected = lam * box_a.volume + 1.0
    ok = abs(est - expected) <= 3.0 * se
    return ScenarioResult(
        "palm-poisson-check",
        CONSISTENT if ok else VIOLATION,
        [],
        None,
        {"estimate": est, "stderr": se, "expected": expected},
        ["estimate", "stderr", "expected"],
        [[est, se, expected]],
    )


def run_ginibre_oracle(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    b_values = [float(b) for b in params.get("b_values", [0.5, 1.0, 2.0, 5.0])]
    rows, reports = [], []
    passed = True
    for b in b_values:
        rep = oracle_ginibre_radii(b)
        passed = passed and rep.passed
        reports.append(dict(rep.to_dict(), b=b))
        rows.append([b, rep.cx.max_violation, rep.mean_structured, rep.mean_poisson])
    return ScenarioResult(
        "ginibre-oracle",
        "pass" if passed else "fail",
        [],
        None,
        {"per_b": reports},
        ["b", "max_violation", "mean_structured", "mean_poisson"],
        rows,
    )


def run_oracle_poisson_scaling(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    a_values = [float(a) for a in params.get("a_values", [0.5, 1.0, 2.0])]
    c_values = [float(c) for c in params.get("c_values", [1.5, 2.0, 3.0])]
    if "a" in params:
        a_values = [float(params["a"])]
    if "c" in params:
        c_values = [float(params["c"])]
    rows, reports = [], []
    passed = True
    violation = 0.0
    for a in a_values:
        for c in c_values:
            rep = oracle_poisson_scaling(a, c)
            passed = passed and rep.passed
            violation = max(violation, rep.max_violation)
            reports.append(dict(rep.to_dict(), a=a, c=c))
            rows.append([a, c, rep.max_violation, rep.mean_x, rep.mean_y])
    return ScenarioResult(
        "oracle-poisson-scaling",
        "pass" if passed else "fail",
        [],
        None,
        {"per_pair": reports, "violation": violation},
        ["a", "c", "max_violation", "mean_x", "mean_y"],
        rows,
    )


def run_lo_extremal(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    lam = float(params.get("lam", 20.0))
    beta = float(params.get("beta", 4.0))
    n_reps = int(params.get("n_reps", 20_000))
    w = _window(params, [0.0, 0.0], [1.0, 1.0])
    queries = np.asarray(params.get("queries", [[0.25, 0.25], [0.75, 0.75]]), dtype=float)
    h = ResponseKernel("power_law", (beta,))
    poisson = lambda gen: processes.sample_poisson(lam, w, gen)
    thomas = _thomas_sampler_matching(lam, params, w)
    draw_po = lambda gen: extremal_sn(poisson(gen), h, queries)
    draw_th = lambda gen: extremal_sn(thomas(gen), h, queries)
    grid_1d = np.asarray(params.get("threshold_grid", np.linspace(0.1, 0.9, 5)), dtype=float)
    thresholds = np.array([[t1, t2] for t1 in grid_1d for t2 in grid_1d])
    # the clustered field has more uncovered space: claim U_thomas <= U_poisson (lo)
    rep = lo_compare(draw_th, draw_po, thresholds, n_reps, stream, workers=workers)
    rows = [
        [thresholds[i, 0], thresholds[i, 1], float(rep.cdf_1[i]), float(rep.cdf_2[i]),
         float(rep.stderr[i])]
        for i in range(thresholds.shape[0])
    ]
    return ScenarioResult(
        "lo-extremal", rep.verdict, [], None, rep.to_dict(),
        ["t1", "t2", "cdf_thomas", "cdf_poisson", "stderr"], rows,
    )


def run_levy_grid(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    spacing = float(params.get("lattice_spacing", 1.0))
    n_reps = int(params.get("n_reps", 20_000))
    suite_size = int(params.get("suite_size", 60))
    w = _window(params, [0.0, 0.0], [4.0, 4.0])
    boxes = _quadrant_boxes(w)
    # equal-mean masses: a sum of two Exp(1/2) is convex-smaller than one Exp(1)
    mass_x = MassDistribution("sum_of_exponentials", (0.5, 0.5))
    mass_y = exponential(1.0)

    def draw(mass):
        def inner(gen):
            m = processes.sample_levy_grid_basis(spacing, mass, w, gen)
            return np.array([mass_in(m, b) for b in boxes])
        return inner

    atoms_per_box = (w.volume / spacing**w.dim) / len(boxes)
    suite = make_suite(
        "dcx", len(boxes), suite_size, stream.split(10**6),
        scale=np.full(len(boxes), atoms_per_box),
    )
    rep = compare_vectors(
        draw(mass_x), draw(mass_y), suite, n_reps, stream, workers=workers
    )
    header, rows = _order_csv(rep)
    return ScenarioResult(
        "levy-grid", rep.verdict, [r.to_dict() for r in rep.records],
        rep.mean_equality, {"atoms_per_box": atoms_per_box}, header, rows,
    )


def run_marked_basis(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    lam = float(params.get("lam", 10.0))
    mark_mean = float(params.get("mark_mean", 1.0))
    n_reps = int(params.get("n_reps", 20_000))
    suite_size = int(params.get("suite_size", 60))
    w = _window(params, [0.0, 0.0], [1.0, 1.0])
    boxes = _quadrant_boxes(w)
    mark = exponential(mark_mean)

    def draw(which):
        def inner(gen):
            const, marked = processes.sample_marked_poisson_basis(lam, mark, w, gen)
            m = const if which == 0 else marked
            return np.array([mass_in(m, b) for b in boxes])
        return inner

    scale = np.array([lam * mark_mean * b.volume for b in boxes])
    suite = make_suite("dcx", len(boxes), suite_size, stream.split(10**6), scale=scale)
    rep = compare_vectors(draw(0), draw(1), suite, n_reps, stream, workers=workers)
    header, rows = _order_csv(rep)
    return ScenarioResult(
        "marked-basis", rep.verdict, [r.to_dict() for r in rep.records],
        rep.mean_equality, {}, header, rows,
    )


def run_ops_preservation(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    mu1 = float(params.get("mu1", 2.0))
    mu2 = float(params.get("mu2", 0.0))
    p_plus = float(params.get("p_plus", 0.5))
    n_reps = int(params.get("n_reps", 10_000))
    suite_size = int(params.get("suite_size", 30))
    cells = int(params.get("cells_per_axis", 32))
    w = _window(params, [0.0, 0.0], [4.0, 4.0])
    lam_bar = mu1 * p_plus + mu2 * (1.0 - p_plus)
    boxes = _quadrant_boxes(w)
    shift = np.asarray(params.get("shift", [0.35, 0.15]), dtype=float)

    def base_poisson(gen):
        return processes.sample_poisson(lam_bar, w, gen)

    def base_ising(gen):
        f = processes.sample_ising_field(mu1, mu2, p_plus, w, [cells] * w.dim, gen)
        return processes.sample_cox(f, gen)

    transforms = {
        "thin_iid_half": lambda p, gen: thin_iid(p, 0.5, gen),
        "displace_shift": lambda p, gen: displace(p, lambda x: x + shift),
        "superpose_poisson": lambda p, gen: superpose(
            p, processes.sample_poisson(1.0, w, gen)
        ),
    }
    rows = []
    verdicts = {}
    for op_idx, (name, op) in enumerate(transforms.items()):
        extra = 1.0 * w.volume if name == "superpose_poisson" else 0.0
        factor = 0.5 if name == "thin_iid_half" else 1.0
        scale = np.array([factor * lam_bar * b.volume + extra / len(boxes) for b in boxes])
        suite = make_suite(
            "dcx", len(boxes), suite_size, stream.split(10**6 + op_idx), scale=scale,
        )
        sx = lambda gen, op=op: op(base_poisson(gen), gen)
        sy = lambda gen, op=op: op(base_ising(gen), gen)
        rep = compare_on_boxes(
            sx, sy, boxes, suite, n_reps, stream.split(op_idx), workers=workers
        )
        verdicts[name] = rep.verdict
        min_z = min(r.z for r in rep.records)
        rows.append([name, rep.verdict, min_z])
    verdict = CONSISTENT
    for v in verdicts.values():
        if v != CONSISTENT:
            verdict = v
            break
    return ScenarioResult(
        "ops-preservation", verdict, [], None, {"per_op": verdicts},
        ["operation", "verdict", "min_z"], rows,
    )


def run_ripley_poisson(params: dict, stream: RngStream, workers: int) -> ScenarioResult:
    lam = float(params.get("lam", 50.0))
    n_reps = int(params.get("n_reps", 1000))
    r_grid = np.asarray(params.get("r_grid", [0.02, 0.05, 0.1, 0.15]), dtype=float)
    w = _window(params, [0.0, 0.0], [1.0, 1.0])
    gen = stream.split(0).generator()
    reps = [processes.sample_poisson(lam, w, gen) for _ in range(n_reps)]
    k_hat, se = ripley_k(reps, r_grid, lam)
    ref = np.pi * r_grid**2
    ok = bool(np.all(np.abs(k_hat - ref) <= 3.0 * se))
    rows = [
        [float(r_grid[i]), float(k_hat[i]), float(se[i]), float(ref[i])]
        for i in range(r_grid.size)
    ]
    return ScenarioResult(
        "ripley-poisson",
        CONSISTENT if ok else VIOLATION,
        [],
        None,
        {"k_hat": k_hat.tolist(), "stderr": se.tolist(), "reference": ref.tolist()},
        ["r", "k_hat", "stderr", "pi_r_squared"],
        rows,
    )


SCENARIOS: dict[str, tuple[str, Callable]] = {
    "ising-vs-poisson": (
        "dcx comparison of box counts: homogeneous Poisson vs the spin-lattice Cox process",
        run_ising_vs_poisson,
    ),
    "ppcluster-family": (
        "cluster-intensity family: dcx-decreasing in the parent-splitting parameter c",
        run_ppcluster_family,
    ),
    "sinr-compare": (
        "joint SINR success probability: Poisson vs clustered interferers",
        run_sinr_compare,
    ),
    "coverage-compare": (
        "Boolean-model coverage: Poisson vs clustered germs at equal intensity",
        run_coverage_compare,
    ),
    "palm-poisson-check": (
        "reweighted-law identity: box-count expectation lam|A| + 1 under the size-biased law",
        run_palm_poisson_check,
    ),
    "ginibre-oracle": (
        "exact convex-order oracle for the stacked-radii count vs a Poisson count",
        run_ginibre_oracle,
    ),
    "oracle-poisson-scaling": (
        "exact convex-order oracle: Poisson(c a) vs c * Poisson(a)",
        run_oracle_poisson_scaling,
    ),
    "lo-extremal": (
        "lower-orthant comparison of extremal shot-noise fields, clustered vs Poisson",
        run_lo_extremal,
    ),
    "levy-grid": (
        "lattice measures with i.i.d. masses: convex-ordered masses give dcx-ordered boxes",
        run_levy_grid,
    ),
    "marked-basis": (
        "coupled Poisson support: constant masses vs i.i.d. random marks, dcx on box masses",
        run_marked_basis,
    ),
    "ops-preservation": (
        "thinning, displacement and superposition applied to an ordered pair keep the verdict",
        run_ops_preservation,
    ),
    "ripley-poisson": (
        "Ripley K baseline on the torus: homogeneous Poisson against pi r^2",
        run_ripley_poisson,
    ),
}


def run_scenario(scenario_id: str, params: dict, stream: RngStream, workers: int = 1) -> ScenarioResult:
    if scenario_id not in SCENARIOS:
        raise KeyError(f"unknown scenario {scenario_id!r}")
    return SCENARIOS[scenario_id][1](params, stream, workers)
