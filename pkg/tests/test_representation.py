import math
from fractions import Fraction as F

import pytest

from pitman_lab import (
    FiniteSupport,
    Geometric,
    LevelLaw,
    NegativeBinomial,
    Params,
    Path,
    PointMass,
    QNegativeBinomial,
    ShiftedPoisson,
    damage_check,
    enumerate_paths,
    g_law_from_initial,
    poisson_split_check,
    preimage,
    q_bracket,
    rhs_law_enumeration,
    rhs_law_formula,
    rhs_law_table_formula,
    stats,
    verify_thm1,
    verify_two_sided,
    walk_match_report,
    walk_law,
    walk_path_prob,
)

FS3 = FiniteSupport(((0, F(1, 6)), (2, F(1, 3)), (5, F(1, 2))))


def brute_pushforward(t, glaw, params, g_top=40):
    """Oracle: P(T_G(S) = x) by direct mixing over (g, s), with the exact
    geometric remainder P(G > g_top) landing on the negated path."""
    from pitman_lab import apply_T

    table = {}
    for s in enumerate_paths(t, allow_flat=params.sigma > 0):
        ws = walk_path_prob(s, params)
        for g in range(g_top + 1):
            x = apply_T(g, s)
            table[x] = table.get(x, F(0)) + glaw.pmf(g) * ws
    # for g > g_top >= t >= max running max, the image is -s identically
    for s in enumerate_paths(t, allow_flat=params.sigma > 0):
        x = s.negate()
        table[x] = table.get(x, F(0)) + glaw.tail(g_top + 1) * walk_path_prob(s, params)
    return table


class TestGLaw:
    def test_point_mass_at_q_one_is_uniform(self):
        glaw = g_law_from_initial(PointMass(4), Params(F(1)), "G")
        assert all(glaw.pmf(m) == F(1, 5) for m in range(5))
        assert glaw.pmf(5) == 0

    @pytest.mark.parametrize("rho,rho0", [(F(3, 2), F(1, 2)), (F(5, 4), F(2, 5))])
    def test_qnb_gives_geometric(self, rho, rho0):
        params = Params(rho)
        law = QNegativeBinomial(params.q, rho0 / rho)
        g = g_law_from_initial(law, params, "G")
        gt = g_law_from_initial(law, params, "Gtilde")
        for n in range(30):
            assert g.pmf(n) == (1 - rho0 * rho) * (rho0 * rho) ** n
            assert gt.pmf(n) == (1 - rho0 / rho) * (rho0 / rho) ** n
            assert g.tail(n) == (rho0 * rho) ** n

    def test_tail_consistent_with_pmf(self):
        for law in (PointMass(3), FS3, QNegativeBinomial(F(1, 4), F(1, 2))):
            glaw = g_law_from_initial(law, Params(F(1, 2)), "G")
            assert glaw.tail(0) == 1
            for n in range(12):
                assert glaw.tail(n) - glaw.tail(n + 1) == glaw.pmf(n)

    def test_thinning_mixture_route(self):
        # mixing the conditional law q^m/[n+1]_q over the initial law gives
        # the same pmf as the tail-sum formula
        params = Params(F(2, 3))
        q = params.q
        glaw = g_law_from_initial(FS3, params, "G")
        for m in range(8):
            mix = sum(
                FS3.pmf(n) * q**m / q_bracket(n + 1, q)
                for n in range(m, 6)
            )
            assert glaw.pmf(m) == mix

    def test_complement_matches_flipped_law(self):
        # X0 - G (under the thinning coupling) has the law built at 1/q
        params = Params(F(2, 3))
        q = params.q
        glaw_t = g_law_from_initial(FS3, params, "Gtilde")
        for k in range(8):
            conv = sum(
                FS3.pmf(n) * q ** (n - k) / q_bracket(n + 1, q)
                for n in range(k, 6)
            )
            assert glaw_t.pmf(k) == conv

    def test_shifted_poisson_gives_poisson(self):
        glaw = g_law_from_initial(ShiftedPoisson(1.0), Params(F(1)), "G",
                                  mode="approx", trunc_n=200)
        for m in range(21):
            assert abs(glaw.pmf(m) - math.exp(-1) / math.factorial(m)) <= 1e-12


class TestRhsLaw:
    def test_formula_examples(self):
        params = Params(F(1))
        g0 = LevelLaw.point(0)
        assert rhs_law_formula(Path.parse("0,1"), g0, params) == 1
        assert rhs_law_formula(Path.parse("0,-1"), g0, params) == 0

    @pytest.mark.parametrize("rho", [F(1, 2), F(2, 3)])
    @pytest.mark.parametrize("sigma", [F(0), F(1)])
    def test_geometric_level_gives_walk_law(self, rho, sigma):
        params = Params(rho, sigma)
        glaw = LevelLaw.geometric(params.q)
        for t in (1, 3, 5):
            wl = walk_law(t, params)
            for x in wl.entries:
                assert rhs_law_formula(x, glaw, params) == wl[x]

    @pytest.mark.parametrize("glaw", [
        LevelLaw.point(0),
        LevelLaw.point(2),
        LevelLaw.geometric(F(1, 3)),
        LevelLaw.from_pmf({0: F(1, 2), 3: F(1, 2)}),
    ])
    @pytest.mark.parametrize("rho,sigma", [(F(1, 2), F(0)), (F(1), F(1)), (F(3, 2), F(1))])
    def test_enumeration_equals_formula_and_mass(self, glaw, rho, sigma):
        params = Params(rho, sigma)
        for t in (1, 2, 4):
            enum = rhs_law_enumeration(t, glaw, params)
            form = rhs_law_table_formula(t, glaw, params)
            assert enum.max_abs_diff(form) == (0, None)
            assert enum.mass() == 1

    @pytest.mark.parametrize("glaw", [LevelLaw.point(1), LevelLaw.geometric(F(1, 4))])
    def test_against_brute_force_pushforward(self, glaw):
        params = Params(F(2, 3), F(1))
        for t in (1, 2, 3):
            enum = rhs_law_enumeration(t, glaw, params)
            brute = brute_pushforward(t, glaw, params)
            assert set(brute) == set(enum.entries)
            for x, v in brute.items():
                assert enum[x] == v


class TestVerify:
    def test_forward_pass(self):
        rep = verify_thm1(4, PointMass(1), Params(F(1, 2)), "I")
        assert rep["status"] == "PASS" and rep["max_abs_diff"]["float"] == 0.0

    def test_wrong_candidate_gives_witness(self):
        rep = verify_thm1(2, PointMass(1), Params(F(1, 2)), "I",
                          candidate=LevelLaw.point(0))
        assert rep["status"] == "FAIL"
        assert rep["witness"] is not None

    def test_qnb_geometric_candidate_passes(self):
        rho, rho0 = F(3, 2), F(1, 2)
        params = Params(rho)
        law = QNegativeBinomial(params.q, rho0 / rho)
        rep = verify_thm1(3, law, params, "I",
                          candidate=LevelLaw.geometric(rho0 * rho))
        assert rep["status"] == "PASS"

    def test_part_two(self):
        rep = verify_thm1(4, FS3, Params(F(2, 3), F(1)), "II")
        assert rep["status"] == "PASS"

    def test_approx_initial_law(self):
        rep = verify_thm1(3, Geometric(F(1, 3)), Params(F(2, 3)), "I")
        assert rep["status"] == "PASS" and rep["exact"] is False

    def test_two_sided(self):
        assert verify_two_sided(4, PointMass(2), Params(F(2, 3)))["status"] == "PASS"
        assert verify_two_sided(3, NegativeBinomial(F(1, 2)), Params(F(1), F(1)))["status"] == "PASS"
        params = Params(F(3, 2))
        law = QNegativeBinomial(params.q, F(1, 3))
        assert verify_two_sided(3, law, params)["status"] == "PASS"

    def test_walk_match_both_directions(self):
        params = Params(F(1, 2), F(1))
        assert walk_match_report(LevelLaw.geometric(params.q), params, 4)["status"] == "MATCH"
        rep = walk_match_report(LevelLaw.geometric(F(1, 3)), params, 4)
        assert rep["status"] == "DIFFER" and rep["witness"]


class TestDamage:
    @pytest.mark.parametrize("q,theta", [(F(1, 4), F(1, 2)), (F(1), F(1, 2)), (F(4), F(1, 5))])
    def test_factorization(self, q, theta):
        rep = damage_check(q, theta, nmax=40)
        assert rep["status"] == "PASS"
        assert rep["factorization_violations"] == 0
        assert rep["rao_rubin_holds"] and rep["marginals_match"]

    def test_q_one_iid_marginals(self):
        rep = damage_check(F(1), F(1, 2), nmax=30)
        assert rep["survivor_law"] == rep["damaged_law"]

    def test_note_flags_assignment(self):
        assert "other way round" in damage_check(F(1, 4), F(1, 2), nmax=5)["note"]

    def test_poisson_split(self):
        rep = poisson_split_check()
        assert rep["status"] == "PASS"
        assert rep["sup_level_law_error"] <= 1e-12
        assert rep["sup_marginal_error"] <= 1e-12
