from fractions import Fraction as F

import numpy as np
import pytest

from pitman_lab import (
    FiniteSupport,
    LevelLaw,
    Params,
    PointMass,
    QNegativeBinomial,
    RegimeError,
    RngStream,
    chain_increment_law,
    conditioned_walk_law,
    rejection_oracle,
    sample_walk,
    survival_prob,
    v_law_from_initial,
)


class TestSurvivalProb:
    def test_closed_form_values(self):
        assert survival_prob(0, Params(F(1, 2))) == F(3, 4)
        assert survival_prob(1, Params(F(2, 3))) == F(65, 81)

    def test_monotone_to_one(self):
        params = Params(F(1, 2), F(1))
        vals = [survival_prob(a, params) for a in range(30)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert 1 - vals[-1] < F(1, 10**17)

    def test_gamblers_ruin_oracle(self):
        # P(ever dip below the start) for one barrier equals rho^2: simulate
        params = Params(F(1, 2))
        walks = sample_walk(120, params, RngStream(3), n=200000)
        dip = (walks.min(axis=1) < 0).mean()
        assert abs(dip - 0.25) < 4 * np.sqrt(0.25 * 0.75 / 200000) + 1e-9

    def test_regime_guard(self):
        with pytest.raises(RegimeError):
            survival_prob(0, Params(F(1)))
        with pytest.raises(RegimeError):
            survival_prob(0, Params(F(3, 2)))


class TestVLaw:
    def test_point_mass_is_degenerate(self):
        vlaw = v_law_from_initial(PointMass(3), Params(F(1, 2)), "I")
        assert vlaw.pmf(3) == 1

    def test_finite_support_hand_value(self):
        # weights 1/2 and (1/2)/[2]_{1/4} = 2/5 renormalize to 5/9, 4/9
        law = FiniteSupport(((0, F(1, 2)), (1, F(1, 2))))
        vlaw = v_law_from_initial(law, Params(F(1, 2)), "I")
        assert vlaw.pmf(0) == F(5, 9) and vlaw.pmf(1) == F(4, 9)

    def test_qnb_part_two_is_geometric(self):
        rho, rho0 = F(3, 2), F(1, 2)
        params = Params(rho)
        law = QNegativeBinomial(params.q, rho0 / rho)
        vlaw = v_law_from_initial(law, params, "II")
        for k in range(10):
            assert vlaw.pmf(k) == (1 - rho0 * rho) * (rho0 * rho) ** k

    def test_wrong_regime(self):
        with pytest.raises(RegimeError):
            v_law_from_initial(PointMass(1), Params(F(3, 2)), "I")
        with pytest.raises(RegimeError):
            v_law_from_initial(PointMass(1), Params(F(1)), "II")


class TestConditionedWalkLaw:
    @pytest.mark.parametrize("rho", [F(1, 2), F(2, 3)])
    @pytest.mark.parametrize("sigma", [F(0), F(1)])
    def test_matches_chain_part_one(self, rho, sigma):
        params = Params(rho, sigma)
        for law in (PointMass(0), PointMass(2),
                    QNegativeBinomial(params.q, F(1, 2))):
            vlaw = v_law_from_initial(law, params, "I")
            for t in (1, 3, 4):
                cond = conditioned_walk_law(t, vlaw, params, "I")
                chain = chain_increment_law(t, law, params)
                assert cond.max_abs_diff(chain) == (0, None)
                assert cond.mass() == 1

    def test_matches_chain_part_two(self):
        params = Params(F(3, 2), F(1))
        law = QNegativeBinomial(params.q, F(1, 3))
        vlaw = v_law_from_initial(law, params, "II")
        for t in (1, 2, 4):
            cond = conditioned_walk_law(t, vlaw, params, "II")
            chain = chain_increment_law(t, law, params)
            assert cond.max_abs_diff(chain) == (0, None)

    def test_mismatched_level_gives_witness(self):
        params = Params(F(1, 2))
        cond = conditioned_walk_law(2, LevelLaw.point(0), params, "I")
        chain = chain_increment_law(2, PointMass(1), params)
        diff, witness = cond.max_abs_diff(chain)
        assert diff > 0 and witness is not None

    def test_regime_errors(self):
        with pytest.raises(RegimeError):
            conditioned_walk_law(2, LevelLaw.point(0), Params(F(1)), "I")
        with pytest.raises(RegimeError):
            conditioned_walk_law(2, LevelLaw.point(0), Params(F(1, 2)), "II")


class TestRejectionOracle:
    def test_agrees_with_exact_law(self):
        params = Params(F(1, 2))
        law = PointMass(1)
        vlaw = v_law_from_initial(law, params, "I")
        t = 3
        res = rejection_oracle(t, vlaw, params, "I", horizon_pad=200,
                               n_samples=200000, rng=RngStream(11))
        exact = chain_increment_law(t, law, params)
        assert res["acceptance_rate"] > 0.5
        n_acc = res["accepted"]
        for path, p in exact.as_float().items():
            se = np.sqrt(p * (1 - p) / n_acc)
            tol = 4.5 * se + res["truncation_bound"] + 1e-12
            assert abs(res["table"][path] - p) <= tol

    def test_truncation_bound_is_tiny(self):
        params = Params(F(1, 2))
        vlaw = LevelLaw.point(2)
        res = rejection_oracle(2, vlaw, params, "I", horizon_pad=60,
                               n_samples=20000, rng=RngStream(5))
        assert res["truncation_bound"] < 1e-10
