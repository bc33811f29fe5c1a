"""Stochastic-order testing: certified test-function suites, paired Monte-Carlo
comparisons with Bonferroni-corrected verdicts, and exact discrete oracles.

A claim "X <= Y in class F" is tested by estimating E f(X) and E f(Y) for a
randomized suite of functions f certified to lie in F.  Monte Carlo can only
falsify an ordering, so passing verdicts are CONSISTENT rather than proven.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats as sps

from .geometry import Box, GridField, PointPattern, RngStream, boxes_disjoint, count_in

CONSISTENT = "CONSISTENT"
VIOLATION = "VIOLATION"
INCONCLUSIVE = "INCONCLUSIVE"

# classes whose order requires equal mean measures (linear test functions both ways)
MEAN_EQUALITY_CLASSES = ("dcx", "cx")

_EXP_ARG_CAP = 30.0


# ---------------------------------------------------------------------------
# Test functions

@dataclass(frozen=True)
class TestFunction:
    """One certified member of an order-generating function class.

    families:
      lin_convex    phi(theta . x), phi in {exp, ((u - t)+)^p}; dcx and increasing
      lin_concave   phi(theta . x), phi in {log1p, sqrt, min(., t)}; idcv
      pair_product  x_i * x_j; dcx on the non-negative orthant
      pgf_up        prod s_j^{x_j}, s_j >= 1; idcx
      pgf_down      prod s_j^{x_j}, 0 < s_j <= 1; ddcx
    """

    __test__ = False  # not a pytest collection target

    fid: int
    family: str
    declared_class: str
    theta: np.ndarray
    phi: str = ""
    t: float = 0.0
    p: float = 1.0
    s: Optional[np.ndarray] = None
    shift: float = 0.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.family == "lin_convex":
            u = x @ self.theta
            if self.phi == "exp":
                return np.exp(np.minimum(u - self.shift, _EXP_ARG_CAP * 3))
            return np.maximum(u - self.t, 0.0) ** self.p
        if self.family == "lin_concave":
            u = x @ self.theta
            if self.phi == "log1p":
                return np.log1p(u)
            if self.phi == "sqrt":
                return np.sqrt(u)
            return np.minimum(u, self.t)
        if self.family == "pair_product":
            i, j = int(self.theta[0]), int(self.theta[1])
            return x[:, i] * x[:, j]
        # pgf families
        return np.exp(x @ np.log(self.s))

    def describe(self) -> str:
        if self.family == "lin_convex":
            return f"{self.family}/{self.phi}"
        if self.family == "lin_concave":
            return f"{self.family}/{self.phi}"
        return self.family


_CLASS_FAMILIES = {
    "dcx": ("lin_convex:exp", "lin_convex:power", "pair_product"),
    "cx": ("lin_convex:exp", "lin_convex:power"),
    "icx": ("lin_convex:exp", "lin_convex:power"),
    "idcx": ("lin_convex:exp", "lin_convex:power", "pair_product", "pgf_up"),
    "idcv": ("lin_concave:log1p", "lin_concave:sqrt", "lin_concave:cap"),
    "icv": ("lin_concave:log1p", "lin_concave:sqrt", "lin_concave:cap"),
    "ddcx": ("pgf_down",),
}


def make_suite(
    order_class: str,
    n: int,
    count: int,
    rng,
    scale: Optional[np.ndarray] = None,
) -> list[TestFunction]:
    """Randomized suite of `count` functions of the given class on R^n.

    `scale` is a pilot estimate of the mean of the compared vectors; thresholds
    and exp-family weights are calibrated against it so arguments stay in a
    numerically benign range.
    """
    if order_class not in _CLASS_FAMILIES:
        raise ValueError(f"unknown order class {order_class!r}")
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    xbar = np.ones(n) if scale is None else np.maximum(np.asarray(scale, dtype=float), 1e-9)
    families = _CLASS_FAMILIES[order_class]
    out: list[TestFunction] = []
    for fid in range(count):
        fam = families[fid % len(families)]
        theta = gen.random(n)
        u_bar = float(theta @ xbar)
        if fam == "lin_convex:exp":
            target = gen.uniform(0.5, 2.5)
            theta = theta * (target / max(u_bar, 1e-12))
            out.append(
                TestFunction(fid, "lin_convex", order_class, theta, phi="exp", shift=target)
            )
        elif fam == "lin_convex:power":
            p = float(gen.choice([1.0, 2.0, 3.0]))
            t = float(gen.uniform(0.0, 1.2) * u_bar) if p > 1 or gen.random() < 0.5 else 0.0
            out.append(TestFunction(fid, "lin_convex", order_class, theta, phi="power", t=t, p=p))
        elif fam == "pair_product":
            i = int(gen.integers(n))
            j = int(gen.integers(n - 1)) if n > 1 else 0
            if n > 1 and j >= i:
                j += 1
            out.append(
                TestFunction(fid, "pair_product", order_class, np.array([i, j], dtype=float))
            )
        elif fam == "lin_concave:cap":
            t = float(gen.uniform(0.5, 1.5) * u_bar)
            out.append(TestFunction(fid, "lin_concave", order_class, theta, phi="cap", t=t))
        elif fam.startswith("lin_concave"):
            phi = fam.split(":")[1]
            out.append(TestFunction(fid, "lin_concave", order_class, theta, phi=phi))
        elif fam == "pgf_up":
            w = gen.random(n) * (0.5 / (1.0 + xbar))
            out.append(TestFunction(fid, "pgf_up", order_class, theta, s=np.exp(w)))
        else:  # pgf_down
            s = gen.uniform(0.2, 1.0, size=n)
            out.append(TestFunction(fid, "pgf_down", order_class, theta, s=s))
    return out


def verify_dcx_numeric(
    f: TestFunction, probes: np.ndarray, delta: float, tol: float = 1e-9
) -> tuple[bool, float]:
    """Finite-difference certificate for the declared class.

    Checks all mixed second differences
      f(x + d e_i + d e_j) - f(x + d e_i) - f(x + d e_j) + f(x)
    (sign per class) and, for monotone classes, the first differences.
    Returns (passed, worst signed violation).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    n = probes.shape[1]
    cls = f.declared_class
    concave = cls in ("idcv", "icv")
    monotone = {"idcx": 1, "icx": 1, "idcv": 1, "icv": 1, "ddcx": -1}.get(cls, 0)
    base = f(probes)
    scale = 1.0 + np.max(np.abs(base))
    worst = 0.0
    shifted = {i: f(probes + delta * np.eye(n)[i]) for i in range(n)}
    for i in range(n):
        if monotone:
            worst = min(worst, float(np.min(monotone * (shifted[i] - base))))
        for j in range(i, n):
            both = f(probes + delta * (np.eye(n)[i] + np.eye(n)[j]))
            mixed = both - shifted[i] - shifted[j] + base
            signed = -mixed if concave else mixed
            worst = min(worst, float(np.min(signed)))
    return worst >= -tol * scale, worst


# ---------------------------------------------------------------------------
# Monte-Carlo comparison harness

@dataclass(frozen=True)
class FunctionRecord:
    fid: int
    family: str
    mean_x: float
    mean_y: float
    diff: float
    stderr: float
    z: float

    def to_dict(self) -> dict:
        return {
            "id": self.fid,
            "family": self.family,
            "mean_x": self.mean_x,
            "mean_y": self.mean_y,
            "diff": self.diff,
            "stderr": self.stderr,
            "z": self.z,
        }


@dataclass
class OrderReport:
    """Outcome of a paired comparison testing the claim X <= Y in some class."""

    records: list[FunctionRecord]
    verdict: str
    mean_equality: Optional[dict]
    n_reps: int
    z_crit: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "n_reps": self.n_reps,
            "z_crit": self.z_crit,
            "mean_equality": self.mean_equality,
            "per_function": [r.to_dict() for r in self.records],
        }


def bonferroni_z(z_crit: float, n_tests: int) -> float:
    return float(sps.norm.isf(sps.norm.sf(z_crit) / max(n_tests, 1)))


def _chunk_sizes(n_reps: int, chunk_size: int) -> list[int]:
    full, rem = divmod(n_reps, chunk_size)
    return [chunk_size] * full + ([rem] if rem else [])


def _run_chunks(worker, n_chunks: int, workers: int) -> list:
    """Run chunk workers, merging results in chunk order for determinism."""
    if workers <= 1:
        return [worker(ci) for ci in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, range(n_chunks)))


def compare_vectors(
    draw_x: Callable[[np.random.Generator], np.ndarray],
    draw_y: Callable[[np.random.Generator], np.ndarray],
    suite: Sequence[TestFunction],
    n_reps: int,
    stream: RngStream,
    *,
    require_equal_means: Optional[bool] = None,
    z_crit: float = 3.0,
    workers: int = 1,
    chunk_size: int = 2000,
) -> OrderReport:
    """Independent MC estimates of E f(X) and E f(Y) per suite function, with
    Welch z-scores against the claim X <= Y and a Bonferroni-corrected verdict."""
    if len(suite) == 0:
        raise ValueError("empty test-function suite")
    if require_equal_means is None:
        require_equal_means = suite[0].declared_class in MEAN_EQUALITY_CLASSES
    sizes = _chunk_sizes(n_reps, chunk_size)
    nf = len(suite)

    def worker(ci: int):
        size = sizes[ci]
        gx = stream.split(2 * ci).generator()
        gy = stream.split(2 * ci + 1).generator()
        X = np.stack([np.atleast_1d(draw_x(gx)) for _ in range(size)])
        Y = np.stack([np.atleast_1d(draw_y(gy)) for _ in range(size)])
        fx = np.stack([f(X) for f in suite])
        fy = np.stack([f(Y) for f in suite])
        return (
            fx.sum(axis=1), (fx**2).sum(axis=1),
            fy.sum(axis=1), (fy**2).sum(axis=1),
            X.sum(axis=0), (X**2).sum(axis=0),
            Y.sum(axis=0), (Y**2).sum(axis=0),
        )

    parts = _run_chunks(worker, len(sizes), workers)
    acc = [np.zeros_like(parts[0][k]) for k in range(8)]
    for part in parts:
        for k in range(8):
            acc[k] = acc[k] + part[k]
    sfx, sfx2, sfy, sfy2, sx, sx2, sy, sy2 = acc
    n = float(n_reps)

    def mean_var(s, s2):
        m = s / n
        v = np.maximum((s2 - n * m**2) / (n - 1), 0.0)
        return m, v

    mfx, vfx = mean_var(sfx, sfx2)
    mfy, vfy = mean_var(sfy, sfy2)
    se = np.sqrt((vfx + vfy) / n)
    diff = mfy - mfx
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / np.where(se > 0, se, 1.0), np.where(diff == 0, 0.0, np.sign(diff) * np.inf))
    records = [
        FunctionRecord(f.fid, f.describe(), float(mfx[i]), float(mfy[i]), float(diff[i]), float(se[i]), float(z[i]))
        for i, f in enumerate(suite)
    ]

    mx, vx = mean_var(sx, sx2)
    my, vy = mean_var(sy, sy2)
    se_m = np.sqrt((vx + vy) / n)
    with np.errstate(divide="ignore", invalid="ignore"):
        zm = np.where(se_m > 0, (my - mx) / np.where(se_m > 0, se_m, 1.0), 0.0)
    means_equal = bool(np.all(np.abs(zm) <= 3.0))
    mean_eq = {
        "checked": require_equal_means,
        "mean_x": mx.tolist(),
        "mean_y": my.tolist(),
        "z": zm.tolist(),
        "passed": means_equal,
    }

    zb = bonferroni_z(z_crit, nf)
    if np.any(z < -zb):
        verdict = VIOLATION
    elif require_equal_means and not means_equal:
        verdict = INCONCLUSIVE
    else:
        verdict = CONSISTENT
    return OrderReport(records, verdict, mean_eq, n_reps, z_crit)


def counts_on_boxes(sampler: Callable, boxes: Sequence[Box]) -> Callable:
    """Adapt a pattern sampler into a count-vector sampler over the boxes."""

    def draw(gen: np.random.Generator) -> np.ndarray:
        p = sampler(gen)
        return np.array([count_in(p, b) for b in boxes], dtype=float)

    return draw


def compare_on_boxes(
    sampler_x: Callable,
    sampler_y: Callable,
    boxes: Sequence[Box],
    suite: Sequence[TestFunction],
    n_reps: int,
    stream: RngStream,
    **kwargs,
) -> OrderReport:
    """compare_vectors on the count vectors of pairwise-disjoint boxes."""
    if not boxes_disjoint(boxes):
        raise ValueError("boxes must be pairwise disjoint")
    return compare_vectors(
        counts_on_boxes(sampler_x, boxes),
        counts_on_boxes(sampler_y, boxes),
        suite,
        n_reps,
        stream,
        **kwargs,
    )


def field_values(sampler: Callable, queries: np.ndarray) -> Callable:
    """Adapt a field sampler (GridField or vector output) to query values."""
    queries = np.atleast_2d(np.asarray(queries, dtype=float))

    def draw(gen: np.random.Generator) -> np.ndarray:
        out = sampler(gen)
        if isinstance(out, GridField):
            return out.value_at(queries)
        return np.atleast_1d(np.asarray(out, dtype=float))

    return draw


def compare_fields(
    sampler_x: Callable,
    sampler_y: Callable,
    queries: np.ndarray,
    suite: Sequence[TestFunction],
    n_reps: int,
    stream: RngStream,
    **kwargs,
) -> OrderReport:
    """compare_vectors on field values at shared query points."""
    return compare_vectors(
        field_values(sampler_x, queries),
        field_values(sampler_y, queries),
        suite,
        n_reps,
        stream,
        **kwargs,
    )


def pilot_scale(draw: Callable, stream: RngStream, n: int = 1000) -> np.ndarray:
    """Pilot mean vector used to calibrate test-function thresholds."""
    gen = stream.generator()
    return np.stack([np.atleast_1d(draw(gen)) for _ in range(n)]).mean(axis=0)


# ---------------------------------------------------------------------------
# Lower-orthant comparison

@dataclass
class LoReport:
    thresholds: np.ndarray
    cdf_1: np.ndarray
    cdf_2: np.ndarray
    stderr: np.ndarray
    verdict: str

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "per_threshold": [
                {
                    "t": self.thresholds[i].tolist(),
                    "cdf_1": float(self.cdf_1[i]),
                    "cdf_2": float(self.cdf_2[i]),
                    "stderr": float(self.stderr[i]),
                }
                for i in range(len(self.cdf_1))
            ],
        }


def lo_compare(
    draw_u1: Callable,
    draw_u2: Callable,
    thresholds: np.ndarray,
    n_reps: int,
    stream: RngStream,
    *,
    workers: int = 1,
    chunk_size: int = 2000,
) -> LoReport:
    """Test the claim U1 <= U2 in lower-orthant order:
    P(U1 <= t) >= P(U2 <= t) jointly at every threshold vector t."""
    thresholds = np.atleast_2d(np.asarray(thresholds, dtype=float))
    sizes = _chunk_sizes(n_reps, chunk_size)

    def worker(ci: int):
        size = sizes[ci]
        g1 = stream.split(2 * ci).generator()
        g2 = stream.split(2 * ci + 1).generator()
        u1 = np.stack([np.atleast_1d(draw_u1(g1)) for _ in range(size)])
        u2 = np.stack([np.atleast_1d(draw_u2(g2)) for _ in range(size)])
        c1 = np.all(u1[:, None, :] <= thresholds[None, :, :], axis=2).sum(axis=0)
        c2 = np.all(u2[:, None, :] <= thresholds[None, :, :], axis=2).sum(axis=0)
        return c1, c2

    parts = _run_chunks(worker, len(sizes), workers)
    c1 = sum(p[0] for p in parts)
    c2 = sum(p[1] for p in parts)
    p1 = c1 / n_reps
    p2 = c2 / n_reps
    se = np.sqrt(p1 * (1 - p1) / n_reps + p2 * (1 - p2) / n_reps)
    verdict = VIOLATION if np.any(p1 < p2 - 3.0 * se) else CONSISTENT
    return LoReport(thresholds, p1, p2, se, verdict)


# ---------------------------------------------------------------------------
# Exact convex-order oracles for discrete laws

@dataclass
class ExactCxReport:
    """Stop-loss comparison of two pmfs testing X <= Y in convex order."""

    max_violation: float
    mean_x: float
    mean_y: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "max_violation": self.max_violation,
            "mean_x": self.mean_x,
            "mean_y": self.mean_y,
        }


def _stop_loss(values: np.ndarray, probs: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    return np.maximum(values[None, :] - t_grid[:, None], 0.0) @ probs


def cx_compare_exact(
    pmf_x: tuple[np.ndarray, np.ndarray],
    pmf_y: tuple[np.ndarray, np.ndarray],
    t_grid: Optional[np.ndarray] = None,
    tol: float = 1e-9,
) -> ExactCxReport:
    """Exact stop-loss check of X <= Y in cx order (requires equal means).

    The default t grid is every support point of both pmfs plus midpoints,
    which is sufficient for piecewise-linear stop-loss transforms.
    """
    vx, px = (np.asarray(a, dtype=float) for a in pmf_x)
    vy, py = (np.asarray(a, dtype=float) for a in pmf_y)
    for p in (px, py):
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("pmf not normalized within 1e-12")
    if t_grid is None:
        support = np.unique(np.concatenate([vx, vy]))
        mids = (support[:-1] + support[1:]) / 2.0
        t_grid = np.concatenate([support, mids])
    t_grid = np.asarray(t_grid, dtype=float)
    viol = float(np.max(_stop_loss(vx, px, t_grid) - _stop_loss(vy, py, t_grid)))
    mean_x = float(vx @ px)
    mean_y = float(vy @ py)
    passed = viol <= tol and abs(mean_x - mean_y) <= tol
    return ExactCxReport(max(viol, 0.0), mean_x, mean_y, passed)


def _poisson_pmf_truncated(mean: float, tail: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    m = int(sps.poisson.isf(tail, mean)) + 2
    k = np.arange(m + 1)
    return k.astype(float), sps.poisson.pmf(k, mean)


def oracle_poisson_scaling(a: float, c: float, t_grid=None) -> ExactCxReport:
    """Exact check that Poisson(c a) <= c * Poisson(a) in convex order (c >= 1)."""
    if a <= 0 or c < 1:
        raise ValueError("need a > 0 and c >= 1")
    kx, px = _poisson_pmf_truncated(c * a)
    ky, py = _poisson_pmf_truncated(a)
    return cx_compare_exact((kx, px), (c * ky, py), t_grid)


def _poisson_binomial_pmf(probs: np.ndarray) -> np.ndarray:
    pmf = np.array([1.0])
    for p in probs:
        nxt = np.zeros(pmf.size + 1)
        nxt[:-1] += pmf * (1.0 - p)
        nxt[1:] += pmf * p
        pmf = nxt
    return pmf


@dataclass
class GinibreOracleReport:
    cx: ExactCxReport
    mean_structured: float
    mean_poisson: float
    passed: bool

    def to_dict(self) -> dict:
        d = self.cx.to_dict()
        d.update(
            {
                "verdict": "pass" if self.passed else "fail",
                "mean_structured": self.mean_structured,
                "mean_poisson": self.mean_poisson,
            }
        )
        return d


def oracle_ginibre_radii(b: float, t_grid=None, tol: float = 1e-9) -> GinibreOracleReport:
    """Exact check that the count sum_k Bern(P(Poisson(b) >= k)) of the
    stacked-radii construction is convex-smaller than Poisson(b); both means b."""
    if b <= 0:
        raise ValueError("b must be positive")
    m = int(sps.poisson.isf(1e-12, b)) + 2
    k = np.arange(1, m + 1)
    bern = sps.poisson.sf(k - 1, b)  # P(N_b >= k)
    pmf_x = _poisson_binomial_pmf(bern)
    ky, py = _poisson_pmf_truncated(b)
    cx = cx_compare_exact((np.arange(pmf_x.size, dtype=float), pmf_x), (ky, py), t_grid, tol)
    mean_x = float(np.arange(pmf_x.size) @ pmf_x)
    mean_y = float(ky @ py)
    passed = cx.passed and abs(mean_x - b) <= tol and abs(mean_y - b) <= tol
    return GinibreOracleReport(cx, mean_x, mean_y, passed)


@dataclass
class IsingOracleReport:
    worst_violation: float
    n_functions: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "worst_violation": self.worst_violation,
            "n_functions": self.n_functions,
        }


def oracle_ising_exact(
    n_sites: int,
    mu1: float,
    mu2: float,
    p_plus: float,
    suite: Sequence[TestFunction],
    site_cells: Optional[Sequence[int]] = None,
    tol: float = 1e-9,
) -> IsingOracleReport:
    """Exact enumeration check that the i.i.d.-spin lattice intensity field is
    larger than its constant mean field for every dcx suite function:
    f(mean, ..., mean) <= E f(values at the sites)."""
    if mu2 > mu1:
        raise ValueError("need mu2 <= mu1")
    cells = list(range(n_sites)) if site_cells is None else list(site_cells)
    if len(cells) != n_sites:
        raise ValueError("site_cells must assign one lattice cell per site")
    uniq = sorted(set(cells))
    if len(uniq) > 12:
        raise ValueError("at most 12 distinct lattice cells can be enumerated")
    cell_index = {c: i for i, c in enumerate(uniq)}
    site_idx = np.array([cell_index[c] for c in cells])
    configs = np.array(list(itertools.product([0, 1], repeat=len(uniq))), dtype=float)
    weights = np.prod(np.where(configs == 1, p_plus, 1.0 - p_plus), axis=1)
    values = np.where(configs[:, site_idx] == 1, mu1, mu2)
    mean_field = np.full((1, n_sites), mu1 * p_plus + mu2 * (1.0 - p_plus))
    worst = 0.0
    for f in suite:
        ef = float(weights @ f(values))
        f0 = float(f(mean_field)[0])
        worst = min(worst, ef - f0)
    return IsingOracleReport(worst, len(suite), worst >= -tol)
