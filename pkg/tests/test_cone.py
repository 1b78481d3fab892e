from fractions import Fraction

import numpy as np
import pytest

from rwre_lab import ConfigError, ConeSpec, Trajectory, cone_contains, detect_renewals, fresh_maxima
from rwre_lab.cone import DEFAULT_LAMBDA_GRID, lambda_scan
from rwre_lab.walk import simulate_ensemble

DIAG = ConeSpec((1, 1), ((1, 1), (1, -1)), Fraction(1), (1, 0))


# ---------------------------------------------------------------- oracles

def contains_oracle(spec: ConeSpec, apex, x) -> bool:
    """Rational-arithmetic membership, independent of the integer fast path."""
    lam = spec.lam
    d = spec.dim
    rel = [Fraction(int(x[i]) - int(apex[i])) for i in range(d)]
    for k in range(d):
        face = [lam * spec.sigma[k] * spec.basis[k][i] + (1 - lam) * spec.l[i] for i in range(d)]
        if sum(f * r for f, r in zip(face, rel)) < 0:
            return False
    return True


def fresh_maxima_oracle(traj, l):
    pos = traj.positions()
    lv = pos @ np.asarray(l)
    out = []
    for n in range(1, pos.shape[0]):
        if lv[n] > max(lv[:n]) and lv[n] > 0:
            out.append(n)
    return out


def random_spec(rng) -> ConeSpec:
    d = int(rng.integers(1, 4))
    while True:
        basis = rng.integers(-3, 4, size=(d, d))
        if abs(np.linalg.det(basis.astype(float))) < 0.5:
            continue
        sigma = tuple(int(s) for s in rng.choice([-1, 1], size=d))
        l = rng.integers(-3, 4, size=d)
        if not l.any():
            continue
        g = np.gcd.reduce(np.abs(l[l != 0]))
        l = l // g
        q = int(rng.integers(1, 9))
        p = int(rng.integers(1, q + 1))
        try:
            return ConeSpec(
                sigma,
                tuple(tuple(int(v) for v in row) for row in basis),
                Fraction(p, q),
                tuple(int(v) for v in l),
                check_direction=False,
            )
        except ConfigError:
            continue


# ---------------------------------------------------------------- ConeSpec

class TestConeSpec:
    def test_rejects_dependent_basis(self):
        with pytest.raises(ConfigError):
            ConeSpec((1, 1), ((1, 2), (2, 4)), Fraction(1), (1, 0))

    def test_rejects_bad_sigma(self):
        with pytest.raises(ConfigError):
            ConeSpec((1, 0), ((1, 0), (0, 1)), Fraction(1), (1, 1))

    def test_rejects_bad_lambda(self):
        with pytest.raises(ConfigError):
            ConeSpec((1,), ((1,),), Fraction(0), (1,))
        with pytest.raises(ConfigError):
            ConeSpec((1,), ((1,),), Fraction(3, 2), (1,))

    def test_rejects_non_primitive_l(self):
        with pytest.raises(ConfigError):
            ConeSpec((1, 1), ((1, 0), (0, 1)), Fraction(1), (2, 4))

    def test_direction_condition_enforced(self):
        # l = (1, 0) is orthogonal to the extreme ray (0, 1) of the standard quadrant
        with pytest.raises(ConfigError):
            ConeSpec((1, 1), ((1, 0), (0, 1)), Fraction(1, 2), (1, 0))
        ConeSpec((1, 1), ((1, 0), (0, 1)), Fraction(1, 2), (1, 0), check_direction=False)

    def test_diagonal_basis_is_valid(self):
        assert DIAG.extreme_rays() == [(1, 1), (1, -1)]
        assert DIAG.matrix.tolist() == [[1, 1], [1, -1]]

    def test_lambda_string_accepted(self):
        spec = ConeSpec((1, 1), ((1, 1), (1, -1)), "1/2", (1, 0))
        assert spec.lam == Fraction(1, 2)


class TestConeContains:
    def test_apex_always_inside(self):
        assert cone_contains(DIAG, (3, -7), (3, -7))

    def test_lambda_one_reduces_to_signed_basis(self, rng):
        # with lambda = 1 membership must equal the sign checks on the basis
        spec = ConeSpec((1, -1), ((2, 1), (1, 1)), Fraction(1), (1, 1), check_direction=False)
        pts = rng.integers(-6, 7, size=(200, 2))
        for x in pts:
            by_signs = (2 * x[0] + x[1] >= 0) and (-(x[0] + x[1]) >= 0)
            assert cone_contains(spec, (0, 0), x) == by_signs

    def test_hand_computed_interpolation(self):
        # basis e1, e2, sigma (+,+), l = (1,1), lambda 1/2: faces are
        # (1/2)(1,0) + (1/2)(1,1) -> (2,1) and (1/2)(0,1) + (1/2)(1,1) -> (1,2);
        # x = (1,-1) satisfies the first and fails the second
        spec = ConeSpec((1, 1), ((1, 0), (0, 1)), Fraction(1, 2), (1, 1))
        assert spec.matrix.tolist() == [[2, 1], [1, 2]]
        assert not cone_contains(spec, (0, 0), (1, -1))
        assert cone_contains(spec, (0, 0), (1, 0))

    def test_matches_rational_oracle(self, rng):
        for _ in range(300):
            spec = random_spec(rng)
            apex = rng.integers(-10, 11, size=spec.dim)
            x = rng.integers(-10, 11, size=spec.dim)
            assert cone_contains(spec, apex, x) == contains_oracle(spec, apex, x)


# ---------------------------------------------------------------- fresh maxima

class TestFreshMaxima:
    def test_monotone_path(self):
        t = Trajectory(np.zeros(12, np.int8), 2, 0)
        assert fresh_maxima(t, (1, 0)).tolist() == list(range(1, 13))

    def test_hand_case(self):
        # +e1, -e1, +e1, +e1: levels 1,0,1,2 -> fresh at 1 and 4
        t = Trajectory(np.asarray([0, 1, 0, 0], np.int8), 1, 0)
        assert fresh_maxima(t, (1,)).tolist() == [1, 4]

    def test_matches_quadratic_oracle(self, rng):
        for _ in range(25):
            steps = rng.integers(0, 4, size=rng.integers(1, 150)).astype(np.int8)
            t = Trajectory(steps, 2, 0)
            l = (1, 0) if rng.integers(2) else (0, 1)
            assert fresh_maxima(t, l).tolist() == fresh_maxima_oracle(t, l)

    def test_requires_primitive_l(self):
        t = Trajectory(np.zeros(3, np.int8), 2, 0)
        with pytest.raises(ConfigError):
            fresh_maxima(t, (2, 0))


# ---------------------------------------------------------------- renewal detection

def recheck_record(traj, spec, H, rec):
    """Post-hoc oracle: fresh maximum plus windowed containment, via cone_contains."""
    pos = traj.positions()
    lv = pos @ np.asarray(spec.l)
    for tau in rec.confirmed_times:
        assert (lv[:tau] < lv[tau]).all(), "confirmed renewal is not a fresh maximum"
        for m in range(tau, min(len(traj), tau + H) + 1):
            assert cone_contains(spec, pos[tau], pos[m]), "path leaves the cone in the window"


class TestDetectRenewals:
    def test_straight_path_confirms_everything(self):
        # spec with the standard basis needs the direction check disabled
        n, H = 60, 10
        spec = ConeSpec((1, 1), ((1, 0), (0, 1)), Fraction(1, 2), (1, 0), check_direction=False)
        t = Trajectory(np.zeros(n, np.int8), 2, 0)
        rec = detect_renewals(t, spec, H)
        assert rec.confirmed_times.tolist() == list(range(1, n - H + 1))
        assert rec.censored_tail
        assert rec.times[-1] == n - H + 1

    def test_immediate_exit_gives_empty_record(self):
        # levels 1,2,1,0 repeating: both fresh maxima fail their windows
        spec = ConeSpec((1,), ((1,),), Fraction(1), (1,))
        t = Trajectory(np.asarray([0, 0, 1, 1] * 5, np.int8), 1, 0)
        rec = detect_renewals(t, spec, 4)
        assert rec.times.size == 0
        assert not rec.censored_tail

    def test_alternating_single_candidate(self):
        spec = ConeSpec((1,), ((1,),), Fraction(1), (1,))
        t = Trajectory(np.asarray([0, 1] * 10, np.int8), 1, 0)
        rec = detect_renewals(t, spec, 5)
        assert rec.times.size == 0

    def test_posthoc_oracle_on_random_drifted_paths(self, rng):
        for _ in range(25):
            steps = rng.choice(4, size=400, p=[0.45, 0.1, 0.225, 0.225]).astype(np.int8)
            t = Trajectory(steps, 2, 0)
            H = int(rng.integers(5, 60))
            rec = detect_renewals(t, DIAG, H)
            recheck_record(t, DIAG, H, rec)
            levels = rec.positions @ np.asarray(DIAG.l)
            assert (np.diff(levels) > 0).all()

    def test_monotone_in_confirm_horizon(self, rng):
        steps = rng.choice(4, size=2000, p=[0.45, 0.1, 0.225, 0.225]).astype(np.int8)
        t = Trajectory(steps, 2, 0)
        counts = [detect_renewals(t, DIAG, H).n_confirmed for H in (10, 40, 160, 640)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_increments_exclude_censored_tail(self):
        n, H = 40, 10
        spec = ConeSpec((1,), ((1,),), Fraction(1), (1,))
        t = Trajectory(np.zeros(n, np.int8), 1, 0)
        rec = detect_renewals(t, spec, H)
        inc = rec.increments()
        assert inc.shape[0] == rec.n_confirmed - 1
        assert (inc == 1).all()

    def test_dimension_mismatch(self):
        t = Trajectory(np.zeros(5, np.int8), 1, 0)
        with pytest.raises(ConfigError):
            detect_renewals(t, DIAG, 5)


class TestLambdaScan:
    def test_single_lambda_above_floor(self, drift2d):
        res = lambda_scan(
            drift2d, 3, (1, 1), ((1, 1), (1, -1)), (1, 0),
            lambdas=(Fraction(1, 2),), n_walks=60, horizon=1500, confirm_horizon=150,
        )
        assert res.found
        assert res.chosen == Fraction(1, 2)

    def test_drifted_model_accepts_largest(self, drift2d):
        res = lambda_scan(
            drift2d, 3, (1, 1), ((1, 1), (1, -1)), (1, 0),
            lambdas=DEFAULT_LAMBDA_GRID, n_walks=80, horizon=2000, confirm_horizon=200,
        )
        assert res.found
        assert res.chosen == Fraction(1)
        rates = {str(r.lam): r.rate_per_1k for r in res.rows}
        assert rates["1/2"] > rates["1"] > 1.0

    def test_symmetric_model_finds_nothing(self, srw2d):
        trajs = simulate_ensemble(srw2d, 4, 60, 4000)
        res = lambda_scan(
            srw2d, 4, (1, 1), ((1, 1), (1, -1)), (1, 0),
            lambdas=DEFAULT_LAMBDA_GRID, confirm_horizon=1000, trajs=trajs,
        )
        assert not res.found
        assert res.chosen is None
