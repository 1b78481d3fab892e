import numpy as np
import pytest

from rwre_lab import (
    BoxRegion,
    ConfigError,
    Dirichlet,
    FiniteMixture,
    FiniteRegionProblem,
    Homogeneous,
    IntervalRegion,
    QuenchedEnvironment,
    SlabRegion,
    TransitionVector,
    annealed_exit,
    exact_quenched_exit,
    exit_distribution,
    gamblers_ruin,
    solomon_1d,
)
from rwre_lab.oracle import SolomonVerdict


def hom_env(probs, seed=0):
    return QuenchedEnvironment(Homogeneous(TransitionVector(probs)), seed)


class TestGamblersRuin:
    def test_symmetric(self):
        assert gamblers_ruin(0.5, 3, 3) == 0.5

    def test_one_step(self):
        assert gamblers_ruin(0.7, 1, 1) == pytest.approx(0.7, abs=1e-15)

    def test_closed_form_value(self):
        # rho = 3/7: (1 - rho^2) / (1 - rho^4) = 49/58
        assert gamblers_ruin(0.7, 2, 2) == pytest.approx(49 / 58, abs=1e-12)

    def test_rejects_bad_p(self):
        with pytest.raises(ConfigError):
            gamblers_ruin(1.0, 2, 2)


class TestExactQuenchedExit:
    def test_single_site(self):
        problem = IntervalRegion(-1, 1).build(hom_env([0.7, 0.3]))
        assert exact_quenched_exit(problem, "Right") == pytest.approx(0.7, abs=1e-12)

    @pytest.mark.parametrize("p,M,N", [(0.7, 2, 2), (0.6, 3, 5), (0.5, 4, 4), (0.35, 2, 6)])
    def test_matches_gamblers_ruin(self, p, M, N):
        problem = IntervalRegion(-M, N).build(hom_env([p, 1 - p]))
        got = exact_quenched_exit(problem, "Right")
        assert abs(got - gamblers_ruin(p, M, N)) < 1e-9

    def test_class_probabilities_sum_to_one(self):
        env = QuenchedEnvironment(Dirichlet((1.0, 0.7, 1.3, 0.9)), 42)
        problem = SlabRegion((1.0, 0.0), 1.0, 3.0, 6).build(env)
        dist = exit_distribution(problem)
        assert set(dist) == {"Left", "Right", "Side"}
        assert abs(sum(dist.values()) - 1.0) < 1e-9

    def test_solver_paths_agree(self):
        env = QuenchedEnvironment(Dirichlet((1.0, 1.0, 1.0, 1.0)), 7)
        problem = BoxRegion((-4, -4), (4, 4)).build(env, (0, 0))
        dense = exact_quenched_exit(problem, "high0", method="dense")
        sweep = exact_quenched_exit(problem, "high0", method="sweep")
        assert abs(dense - sweep) < 1e-9

    def test_target_monotonicity(self):
        env = QuenchedEnvironment(Dirichlet((1.0, 1.0, 1.0, 1.0)), 11)
        problem = SlabRegion((1.0, 0.0), 1.0, 3.0, 5).build(env)
        small = exact_quenched_exit(problem, "Right")
        big = exact_quenched_exit(problem, {"Right", "Side"})
        assert big >= small

    def test_unknown_class_rejected(self):
        problem = IntervalRegion(-2, 2).build(hom_env([0.7, 0.3]))
        with pytest.raises(ConfigError):
            exact_quenched_exit(problem, "Up")

    def test_unlabeled_neighbor_rejected(self):
        env = hom_env([0.7, 0.3])
        sites = np.asarray([[0], [1]])
        with pytest.raises(ConfigError):
            FiniteRegionProblem(sites, {(-1,): "Left"}, env, (0,))

    def test_start_outside_rejected(self):
        env = hom_env([0.7, 0.3])
        with pytest.raises(ConfigError):
            IntervalRegion(-2, 2).build(env, (5,))


class TestSolomon:
    def test_homogeneous_ballistic(self):
        res = solomon_1d(Homogeneous(TransitionVector([0.7, 0.3])))
        assert res.verdict is SolomonVerdict.TRANSIENT_PLUS
        assert res.speed == pytest.approx(0.4, abs=1e-12)

    def test_mixture_speed(self):
        # E[rho] = (2/3 + 1/4) / 2 = 11/24, speed (1 - 11/24) / (1 + 11/24) = 13/35
        model = FiniteMixture(
            (TransitionVector([0.6, 0.4]), TransitionVector([0.8, 0.2])), (0.5, 0.5)
        )
        res = solomon_1d(model)
        assert res.verdict is SolomonVerdict.TRANSIENT_PLUS
        assert res.e_rho == pytest.approx(11 / 24, abs=1e-12)
        assert res.speed == pytest.approx(13 / 35, abs=1e-12)

    def test_symmetric_recurrent(self):
        res = solomon_1d(Homogeneous(TransitionVector([0.5, 0.5])))
        assert res.verdict is SolomonVerdict.RECURRENT
        assert res.speed == 0.0

    def test_transient_minus_mirror(self):
        res = solomon_1d(Homogeneous(TransitionVector([0.3, 0.7])))
        assert res.verdict is SolomonVerdict.TRANSIENT_MINUS
        assert res.speed == pytest.approx(-0.4, abs=1e-12)

    def test_zero_speed_regime(self):
        # E[log rho] < 0 but E[rho] > 1: transient with zero speed
        model = FiniteMixture(
            (TransitionVector([0.9, 0.1]), TransitionVector([0.26, 0.74])), (0.5, 0.5)
        )
        res = solomon_1d(model)
        assert res.verdict is SolomonVerdict.TRANSIENT_PLUS
        assert res.e_rho > 1.0
        assert res.speed == 0.0

    def test_dirichlet_unsupported(self):
        with pytest.raises(ConfigError):
            solomon_1d(Dirichlet((1.0, 1.0)))


class TestAnnealedExit:
    def test_homogeneous_zero_variance(self):
        model = Homogeneous(TransitionVector([0.7, 0.3]))
        res = annealed_exit(model, IntervalRegion(-2, 2), (0,), "Right", 5, 3)
        assert res.sd < 1e-12
        assert res.ci[1] - res.ci[0] < 1e-12
        assert res.mean == pytest.approx(49 / 58, abs=1e-9)

    def test_single_env_matches_exact_bitwise(self):
        from rwre_lab.rng import TAG_ENV, derive_key

        model = Dirichlet((1.0, 1.0))
        res = annealed_exit(model, IntervalRegion(-3, 3), (0,), "Right", 1, 99)
        env = QuenchedEnvironment(model, int(derive_key(99, TAG_ENV, 0)))
        direct = exact_quenched_exit(IntervalRegion(-3, 3).build(env), "Right")
        assert res.mean == direct
        assert res.ci == (direct, direct)

    def test_ci_shrinks_with_more_environments(self):
        model = FiniteMixture(
            (TransitionVector([0.6, 0.4]), TransitionVector([0.8, 0.2])), (0.5, 0.5)
        )
        few = annealed_exit(model, IntervalRegion(-3, 3), (0,), "Right", 8, 1)
        many = annealed_exit(model, IntervalRegion(-3, 3), (0,), "Right", 128, 1)
        assert few.sd > 0
        width_few = few.ci[1] - few.ci[0]
        width_many = many.ci[1] - many.ci[0]
        assert width_many < width_few
