"""Estimators that confront directional-transience theory with simulation.

Events at infinity are replaced by documented finite-horizon proxies, and
every verdict is three-valued: undecided is a meaningful outcome here, not a
failure.  Where the theory supplies two independent routes to a quantity
(raw path limits vs renewal increments, Monte Carlo vs exact solves), both
routes are exposed so their agreement can be measured rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .cone import ConeSpec, RenewalRecord
from .errors import ConfigError
from .walk import Trajectory, run_slab_ensemble, simulate_ensemble

Z95 = 1.959963984540054


class Verdict(Enum):
    TRANSIENT_PLUS = "transient+"
    TRANSIENT_MINUS = "transient-"
    UNDECIDED = "undecided"


class TransiencePattern(Enum):
    ALL_ZERO = "all-zero"
    SINGLE_DIRECTION = "single-direction"
    OPEN_HALF_SPACE = "open-half-space"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class InsufficientData:
    """Explicit could-not-decide result; never an exception."""

    reason: str


def _stable_norm(v: np.ndarray) -> float:
    """Euclidean norm with an order-independent sum, so coordinate
    permutations and reflections of the input move the output exactly."""
    sq = np.sort(np.asarray(v, dtype=np.float64) ** 2)
    return float(np.sqrt(sq.sum()))


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    du = np.asarray(u, dtype=np.float64)
    dv = np.asarray(v, dtype=np.float64)
    c = float(du @ dv) / (_stable_norm(du) * _stable_norm(dv))
    return float(np.arccos(min(1.0, max(-1.0, c))))


def _normal_ci(mean: float, sd: float, n: int) -> tuple[float, float]:
    if n <= 1:
        return (mean, mean)
    half = Z95 * sd / math.sqrt(n)
    return (mean - half, mean + half)


def _binom_ci(k: int, n: int) -> tuple[float, float]:
    if n == 0:
        return (float("nan"), float("nan"))
    p = k / n
    half = Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)
    return (max(0.0, p - half), min(1.0, p + half))


def default_level_threshold(horizon: int) -> float:
    return 2.0 * math.sqrt(max(horizon, 1))


def _resolve_thresholds(horizon: int, level_threshold, dip_allowance) -> tuple[float, float]:
    thr = default_level_threshold(horizon) if level_threshold is None else float(level_threshold)
    dip = thr / 2.0 if dip_allowance is None else float(dip_allowance)
    return thr, dip


def _classify_levels(s: np.ndarray, thr: float, dip: float) -> int:
    """Finite-horizon transience proxy for one projected path.

    Counts toward the plus event when the final level clears the threshold
    and the path's last-half running high is within ``dip`` of the final
    value (it has not fallen back); the minus rule is the exact mirror.
    """
    half = s.shape[0] // 2
    tail = s[half:]
    final = s[-1]
    if final >= thr and (tail.max() - final) <= dip:
        return 1
    if final <= -thr and (final - tail.min()) <= dip:
        return -1
    return 0


@dataclass(frozen=True)
class TransienceVerdict:
    l: tuple[float, ...]
    verdict: Verdict
    p_hat_plus: float
    p_hat_minus: float
    level_threshold: float
    dip_allowance: float
    n_walks: int


def classify_transience(
    trajs: Sequence[Trajectory],
    l,
    level_threshold: float | None = None,
    dip_allowance: float | None = None,
) -> TransienceVerdict:
    """Classify an ensemble as transient toward +l, toward -l, or undecided."""
    if not trajs:
        raise ValueError("classify_transience needs a nonempty ensemble")
    lv = np.asarray(l, dtype=np.float64)
    thr, dip = _resolve_thresholds(len(trajs[0]), level_threshold, dip_allowance)
    n_plus = n_minus = 0
    for t in trajs:
        c = _classify_levels(t.positions() @ lv, thr, dip)
        if c > 0:
            n_plus += 1
        elif c < 0:
            n_minus += 1
    n = len(trajs)
    p_plus, p_minus = n_plus / n, n_minus / n
    if p_plus >= 0.99 and p_minus <= 0.01:
        verdict = Verdict.TRANSIENT_PLUS
    elif p_minus >= 0.99 and p_plus <= 0.01:
        verdict = Verdict.TRANSIENT_MINUS
    else:
        verdict = Verdict.UNDECIDED
    return TransienceVerdict(
        tuple(float(x) for x in lv), verdict, p_plus, p_minus, thr, dip, n
    )


@dataclass(frozen=True)
class SpeedEstimate:
    mean: float
    ci: tuple[float, float]
    n_walks: int
    mean_plus: float | None
    n_plus: int
    mean_minus: float | None
    n_minus: int


def estimate_speed(
    trajs: Sequence[Trajectory],
    l,
    level_threshold: float | None = None,
    dip_allowance: float | None = None,
) -> SpeedEstimate:
    """Mean of X_N . l / N with a normal CI, split by transience class."""
    if not trajs:
        raise ValueError("estimate_speed needs a nonempty ensemble")
    lv = np.asarray(l, dtype=np.float64)
    thr, dip = _resolve_thresholds(len(trajs[0]), level_threshold, dip_allowance)
    vals = np.empty(len(trajs))
    cls = np.empty(len(trajs), dtype=np.int64)
    for i, t in enumerate(trajs):
        s = t.positions() @ lv
        n = max(len(t), 1)
        vals[i] = s[-1] / n
        cls[i] = _classify_levels(s, thr, dip)
    mean = float(vals.mean())
    sd = float(vals.std(ddof=1)) if len(trajs) > 1 else 0.0
    plus = vals[cls > 0]
    minus = vals[cls < 0]
    return SpeedEstimate(
        mean,
        _normal_ci(mean, sd, len(trajs)),
        len(trajs),
        float(plus.mean()) if plus.size else None,
        int(plus.size),
        float(minus.mean()) if minus.size else None,
        int(minus.size),
    )


@dataclass(eq=False)
class DirectionEstimate:
    nu_hat: np.ndarray
    dispersion: float
    n_samples: int
    route: str


ROUTE_RAW = "raw-limit"
ROUTE_RENEWAL = "renewal-lln"


def estimate_direction(
    trajs: Sequence[Trajectory] | None = None,
    records: Sequence[RenewalRecord] | None = None,
    route: str = ROUTE_RAW,
    level_threshold: float | None = None,
) -> DirectionEstimate | InsufficientData:
    """Asymptotic-direction estimate via final positions or renewal increments.

    The raw route averages X_N / |X_N| over walks whose final radius clears
    the transience threshold; the renewal route averages confirmed renewal
    increments pooled over walks (only walks contributing at least one full
    increment, i.e. two confirmed renewals, count).
    """
    if route == ROUTE_RAW:
        if not trajs:
            return InsufficientData("no trajectories supplied")
        thr = (
            default_level_threshold(len(trajs[0]))
            if level_threshold is None
            else float(level_threshold)
        )
        dirs = []
        for t in trajs:
            x = t.final_position().astype(np.float64)
            r = _stable_norm(x)
            if r >= thr:
                dirs.append(x / r)
        if not dirs:
            return InsufficientData("no walk reached the radius threshold")
        samples = np.asarray(dirs)
    elif route == ROUTE_RENEWAL:
        if not records:
            return InsufficientData("no renewal records supplied")
        chunks = [r.increments() for r in records if r.increments().shape[0] >= 1]
        if not chunks:
            return InsufficientData("no walk produced two confirmed renewals")
        samples = np.vstack(chunks).astype(np.float64)
    else:
        raise ConfigError(f"unknown route {route!r}")
    mean = samples.mean(axis=0)
    norm = _stable_norm(mean)
    if norm == 0.0:
        return InsufficientData("mean displacement is zero")
    nu = mean / norm
    unit = samples / np.linalg.norm(samples, axis=1, keepdims=True)
    angles = np.arccos(np.clip(unit @ nu, -1.0, 1.0))
    return DirectionEstimate(nu, float(angles.mean()), samples.shape[0], route)


def pooled_increments(records: Sequence[RenewalRecord]) -> np.ndarray:
    """Confirmed renewal increments concatenated in walker order."""
    chunks = [r.increments() for r in records if r.increments().shape[0]]
    if not chunks:
        return np.zeros((0, 0), dtype=np.int64)
    return np.vstack(chunks)


@dataclass(eq=False)
class IndependenceReport:
    lag1: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    n: int
    passed: bool


def independence_test(increments: np.ndarray) -> IndependenceReport | InsufficientData:
    """Per-coordinate lag-1 autocorrelation with a Fisher-z 95% CI.

    Passes when every coordinate's CI contains 0.
    """
    inc = np.asarray(increments, dtype=np.float64)
    if inc.ndim != 2 or inc.shape[0] < 100:
        return InsufficientData("need at least 100 increments")
    n = inc.shape[0] - 1
    r = np.empty(inc.shape[1])
    for k in range(inc.shape[1]):
        x, y = inc[:-1, k], inc[1:, k]
        sx, sy = x.std(), y.std()
        if sx == 0.0 or sy == 0.0:
            return InsufficientData(f"coordinate {k} is degenerate (zero variance)")
        r[k] = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
    z = np.arctanh(np.clip(r, -0.999999, 0.999999))
    half = Z95 / math.sqrt(max(n - 3, 1))
    lo = np.tanh(z - half)
    hi = np.tanh(z + half)
    passed = bool(np.all((lo <= 0.0) & (0.0 <= hi)))
    return IndependenceReport(r, lo, hi, n + 1, passed)


@dataclass(eq=False)
class OscillationReport:
    mean: float
    mean_ci: tuple[float, float]
    n: int
    sign_changes: int
    running_min: float
    running_max: float
    increment_std: float
    degenerate: bool


def orthogonal_oscillation(
    records: Sequence[RenewalRecord], l, l_star
) -> OscillationReport | InsufficientData:
    """Partial-sum statistics of renewal increments projected orthogonally to l.

    The projected increments should be centered, and their partial sums should
    oscillate: sign changes accumulate and the running extrema grow in both
    directions.  A path locked to the direction l produces all-zero
    projections; that degenerate case is flagged, not averaged away.
    """
    li = np.asarray(l, dtype=np.int64)
    ls = np.asarray(l_star, dtype=np.int64)
    if li.shape != ls.shape:
        raise ConfigError("l and l_star must have the same dimension")
    if int(li @ ls) != 0:
        raise ValueError("l_star must be exactly orthogonal to l")
    inc = pooled_increments(records)
    if inc.size == 0:
        return InsufficientData("no confirmed renewal increments")
    y = (inc @ ls).astype(np.float64)
    partial = np.cumsum(y)
    mean = float(y.mean())
    sd = float(y.std(ddof=1)) if y.size > 1 else 0.0
    signs = np.sign(partial)
    nz = signs[signs != 0]
    changes = int(np.count_nonzero(np.diff(nz))) if nz.size else 0
    return OscillationReport(
        mean,
        _normal_ci(mean, sd, y.size),
        int(y.size),
        changes,
        float(partial.min()),
        float(partial.max()),
        sd,
        bool(np.all(y == 0.0)),
    )


@dataclass(eq=False)
class RenewalIdentityReport:
    """Two-sided check of the mean renewal advance against its probability form.

    lhs is the mean confirmed increment in direction l; rhs is
    1 / (p_cone * hit_level_prob) where p_cone estimates the chance of never
    leaving the origin-rooted cone given forward transience and
    hit_level_prob estimates the chance that the first passage over i-1 lands
    exactly on level i, averaged over a window of levels.
    """

    lhs: float
    lhs_ci: tuple[float, float]
    p_cone: float
    p_cone_ci: tuple[float, float]
    hit_level_prob: float
    rhs: float
    ratio: float
    ratio_ci: tuple[float, float]
    window: tuple[int, int]
    n_increments: int
    n_walks: int


def _level_hits(s: np.ndarray, i_min: int, i_max: int) -> np.ndarray:
    """hits[i - i_min] = 1 if the first passage over i-1 lands exactly at i."""
    run = np.maximum.accumulate(s)
    levels = np.arange(i_min, i_max + 1, dtype=np.int64)
    t = np.searchsorted(run, levels)  # first n with run[n] >= i
    reached = t < s.shape[0]
    out = np.zeros(levels.shape[0], dtype=np.float64)
    idx = np.flatnonzero(reached)
    out[idx] = s[t[idx]] == levels[idx]
    return out


def renewal_mean_identity(
    trajs: Sequence[Trajectory],
    records: Sequence[RenewalRecord],
    spec: ConeSpec,
    window: tuple[int, int] | None = None,
    level_threshold: float | None = None,
    dip_allowance: float | None = None,
    n_boot: int = 1000,
    boot_seed: int = 12345,
) -> RenewalIdentityReport | InsufficientData:
    """Estimate both sides of the renewal mean identity with a bootstrap CI.

    The increment mean uses confirmed increments only (the stretch before the
    first renewal has a different law and is excluded by construction).  The
    cone-survival probability conditions on walks classified forward
    transient; level hits are averaged over the window, which defaults to the
    upper half of the levels every walk in the sample reached, so horizon
    censoring cannot masquerade as overshoot.
    """
    if len(trajs) != len(records):
        raise ConfigError("one renewal record per trajectory required")
    if not trajs:
        return InsufficientData("empty ensemble")
    lv = np.asarray(spec.l, dtype=np.int64)
    thr, dip = _resolve_thresholds(len(trajs[0]), level_threshold, dip_allowance)
    n = len(trajs)
    inc_sum = np.zeros(n)
    inc_cnt = np.zeros(n)
    is_plus = np.zeros(n, dtype=bool)
    stays = np.zeros(n, dtype=bool)
    max_lv = np.zeros(n, dtype=np.int64)
    all_s = []
    for i, (t, rec) in enumerate(zip(trajs, records)):
        pos = t.positions()
        s = pos @ lv
        all_s.append(s)
        max_lv[i] = s.max()
        is_plus[i] = _classify_levels(s.astype(np.float64), thr, dip) > 0
        stays[i] = bool(((pos @ spec.matrix.T) >= 0).all())
        inc = rec.increments()
        if inc.shape[0]:
            proj = inc @ lv
            inc_sum[i] = float(proj.sum())
            inc_cnt[i] = inc.shape[0]
    if window is None:
        top = int(max_lv.min())
        if top < 1:
            return InsufficientData("some walk reached no positive level")
        window = (max(1, top // 2), top)
    i_min, i_max = int(window[0]), int(window[1])
    if i_min < 1 or i_max < i_min:
        raise ConfigError("level window must satisfy 1 <= i_min <= i_max")
    width = i_max - i_min + 1
    hit_frac = np.empty(n)
    for i, s in enumerate(all_s):
        hit_frac[i] = _level_hits(s, i_min, i_max).mean()
    total_inc = int(inc_cnt.sum())
    n_plus = int(is_plus.sum())
    if total_inc < 10:
        return InsufficientData(f"only {total_inc} confirmed increments")
    if n_plus == 0:
        return InsufficientData("no walk classified forward transient")
    if hit_frac.mean() == 0.0:
        return InsufficientData("no level hits inside the window")

    def estimates(sel: np.ndarray) -> tuple[float, float, float]:
        cnt = inc_cnt[sel].sum()
        plus = is_plus[sel].sum()
        lhs = inc_sum[sel].sum() / cnt if cnt else float("nan")
        pc = (is_plus[sel] & stays[sel]).sum() / plus if plus else float("nan")
        hit = hit_frac[sel].mean()
        return lhs, pc, hit

    idx_all = np.arange(n)
    lhs, p_cone, hit = estimates(idx_all)
    if p_cone == 0.0:
        return InsufficientData("no transient walk stayed in the origin cone")
    rhs = 1.0 / (p_cone * hit)
    ratio = lhs / rhs
    rng = np.random.default_rng(boot_seed)
    ratios = np.empty(n_boot)
    for bidx in range(n_boot):
        sel = rng.integers(0, n, size=n)
        bl, bp, bh = estimates(sel)
        ratios[bidx] = bl * bp * bh if bp and bh else float("nan")
    ratios = ratios[np.isfinite(ratios)]
    if ratios.size < max(10, n_boot // 10):
        return InsufficientData("bootstrap produced too few valid resamples")
    ratio_ci = (float(np.percentile(ratios, 2.5)), float(np.percentile(ratios, 97.5)))
    # increment-level CI for the lhs
    pool = []
    for rec in records:
        inc = rec.increments()
        if inc.shape[0]:
            pool.append(inc @ lv)
    proj = np.concatenate(pool).astype(np.float64)
    lhs_ci = _normal_ci(float(proj.mean()), float(proj.std(ddof=1)), proj.size)
    return RenewalIdentityReport(
        lhs,
        lhs_ci,
        p_cone,
        _binom_ci(int((is_plus & stays).sum()), n_plus),
        hit,
        rhs,
        ratio,
        ratio_ci,
        (i_min, i_max),
        total_inc,
        n,
    )


@dataclass(eq=False)
class ClusterResult:
    """Antipodal clustering of final directions; n_clusters 0 means no
    directional limit was detectable at the requested tolerance."""

    n_clusters: int
    centers: list[np.ndarray]
    max_angular_dev: float | None
    antipodal_dev: float | None
    reason: str | None = None


def antipodal_clustering(
    trajs: Sequence[Trajectory],
    theta_tol: float = 0.3,
    antipodal_tol: float = 0.05,
) -> ClusterResult:
    """Split final directions by the leading principal axis and test tightness."""
    dirs = []
    for t in trajs:
        x = t.final_position().astype(np.float64)
        r = _stable_norm(x)
        if r > 0:
            dirs.append(x / r)
    if not dirs:
        return ClusterResult(0, [], None, None, "all walks ended at the origin")
    u = np.asarray(dirs)
    second = u.T @ u / u.shape[0]
    eigvals, eigvecs = np.linalg.eigh(second)
    axis = eigvecs[:, -1]
    side = u @ axis >= 0.0
    centers = []
    devs = []
    for mask in (side, ~side):
        if not mask.any():
            continue
        m = u[mask].mean(axis=0)
        norm = _stable_norm(m)
        if norm == 0.0:
            return ClusterResult(0, [], None, None, "a cluster has no mean direction")
        c = m / norm
        centers.append(c)
        devs.append(float(np.arccos(np.clip(u[mask] @ c, -1.0, 1.0)).max()))
    max_dev = max(devs)
    if max_dev > theta_tol:
        return ClusterResult(0, [], max_dev, None, "angular dispersion exceeds tolerance")
    if len(centers) == 1:
        return ClusterResult(1, centers, max_dev, None)
    anti = _angle(centers[0], -centers[1])
    if anti > antipodal_tol:
        return ClusterResult(0, centers, max_dev, anti, "cluster centers are not antipodal")
    return ClusterResult(2, centers, max_dev, anti)


@dataclass(frozen=True)
class DecayPoint:
    L: float
    p_left: float
    ci: tuple[float, float]
    n_left: int
    n_exits: int
    n_censored: int


@dataclass(eq=False)
class SlabDecayCurve:
    points: list[DecayPoint]
    log_slope: float | None
    n_fit: int


def slab_exit_decay(
    model,
    master_seed: int,
    l_prime,
    b: float,
    L_list: Sequence[float],
    n_walks: int,
    horizon: int,
    threads: int = 1,
) -> SlabDecayCurve:
    """Left-exit probability across slab widths, with a log-linear slope.

    The same walker streams are reused at every width, so the estimates are
    coupled and the expected monotone decay is not blurred by resampling
    noise.  The slope of log p against L is the diagnostic for exponential
    (gamma = 1) decay; zero-hit widths are reported but excluded from the fit.
    """
    Ls = [float(x) for x in L_list]
    if any(b2 <= a for a, b2 in zip(Ls, Ls[1:])):
        raise ConfigError("L_list must be strictly increasing")
    if b <= 0:
        raise ConfigError("b must be positive")
    points = []
    for L in Ls:
        tally = run_slab_ensemble(
            model, master_seed, n_walks, l_prime, b, L, horizon, threads=threads
        )
        exits = tally.n_left + tally.n_right
        p = tally.n_left / exits if exits else float("nan")
        points.append(
            DecayPoint(L, p, _binom_ci(tally.n_left, exits), tally.n_left, exits, tally.n_censored)
        )
    fit = [(pt.L, pt.p_left) for pt in points if pt.n_left > 0 and np.isfinite(pt.p_left)]
    slope = None
    if len(fit) >= 2:
        xs = np.asarray([f[0] for f in fit])
        ys = np.log(np.asarray([f[1] for f in fit]))
        slope = float(np.polyfit(xs, ys, 1)[0])
    return SlabDecayCurve(points, slope, len(fit))


@dataclass(eq=False)
class ZeroOneScanResult:
    angles: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    verdicts: list[Verdict]
    pattern: TransiencePattern
    nu_hat: np.ndarray | None


def zero_one_scan(
    model,
    master_seed: int,
    n_angles: int,
    n_walks: int,
    horizon: int,
    threads: int = 1,
    level_threshold: float | None = None,
    dip_allowance: float | None = None,
    orth_band: float = 0.2,
    trajs: Sequence[Trajectory] | None = None,
) -> ZeroOneScanResult:
    """Transience verdicts over an angular grid, labeled by global pattern.

    Patterns: all directions undecided; a single transient direction; an open
    half-space of transient directions with the mirror half transient the
    other way; anything else is inconsistent.  Near-orthogonal angles (within
    ``orth_band`` of the estimated axis) are allowed to be undecided.
    """
    if model.dim != 2:
        raise ConfigError("the angular scan is two-dimensional")
    if n_angles < 4:
        raise ConfigError("need at least 4 angles")
    if trajs is None:
        trajs = simulate_ensemble(model, master_seed, n_walks, horizon, threads=threads)
    angles = np.arange(n_angles) * (2.0 * np.pi / n_angles)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    thr, dip = _resolve_thresholds(len(trajs[0]) if trajs else horizon, level_threshold, dip_allowance)
    counts = np.zeros((n_angles, 2), dtype=np.int64)
    for t in trajs:
        pos = t.positions().astype(np.float64)
        for a in range(n_angles):
            c = _classify_levels(pos @ dirs[a], thr, dip)
            if c > 0:
                counts[a, 0] += 1
            elif c < 0:
                counts[a, 1] += 1
    n = max(len(trajs), 1)
    p_plus = counts[:, 0] / n
    p_minus = counts[:, 1] / n
    verdicts = []
    for a in range(n_angles):
        if p_plus[a] >= 0.99 and p_minus[a] <= 0.01:
            verdicts.append(Verdict.TRANSIENT_PLUS)
        elif p_minus[a] >= 0.99 and p_plus[a] <= 0.01:
            verdicts.append(Verdict.TRANSIENT_MINUS)
        else:
            verdicts.append(Verdict.UNDECIDED)
    plus_idx = [a for a, v in enumerate(verdicts) if v is Verdict.TRANSIENT_PLUS]
    minus_idx = [a for a, v in enumerate(verdicts) if v is Verdict.TRANSIENT_MINUS]
    if not plus_idx and not minus_idx:
        return ZeroOneScanResult(angles, p_plus, p_minus, verdicts, TransiencePattern.ALL_ZERO, None)
    acc = np.zeros(2)
    for a in plus_idx:
        acc += dirs[a]
    for a in minus_idx:
        acc -= dirs[a]
    norm = _stable_norm(acc)
    if norm == 0.0:
        return ZeroOneScanResult(
            angles, p_plus, p_minus, verdicts, TransiencePattern.INCONSISTENT, None
        )
    nu = acc / norm
    consistent = True
    for a in range(n_angles):
        dot = float(dirs[a] @ nu)
        v = verdicts[a]
        if dot > orth_band and v is not Verdict.TRANSIENT_PLUS:
            consistent = False
        elif dot < -orth_band and v is not Verdict.TRANSIENT_MINUS:
            consistent = False
        elif abs(dot) <= orth_band and v is not Verdict.UNDECIDED:
            # a decided verdict this close to orthogonal is still consistent
            # with a half-space pattern as long as its sign matches
            if (v is Verdict.TRANSIENT_PLUS) != (dot > 0):
                consistent = False
    if not consistent:
        return ZeroOneScanResult(
            angles, p_plus, p_minus, verdicts, TransiencePattern.INCONSISTENT, nu
        )
    if plus_idx and minus_idx:
        pattern = TransiencePattern.OPEN_HALF_SPACE
    elif len(plus_idx) + len(minus_idx) == 1:
        pattern = TransiencePattern.SINGLE_DIRECTION
    else:
        pattern = TransiencePattern.INCONSISTENT
    return ZeroOneScanResult(angles, p_plus, p_minus, verdicts, pattern, nu)
