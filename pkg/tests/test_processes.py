import math
from fractions import Fraction as F

import pytest

from pitman_lab import (
    FiniteSupport,
    Geometric,
    NegativeBinomial,
    Params,
    Path,
    PointMass,
    QNegativeBinomial,
    ShiftedPoisson,
    UnsupportedExactModeError,
    chain_increment_law,
    chain_transition,
    enumerate_paths,
    initial_pmf,
    parse_initial_law,
    q_bracket,
    step_pmf,
    walk_law,
    walk_path_prob,
)

RHOS = [F(1, 2), F(2, 3), F(1), F(3, 2), F(2)]


class TestStepPmf:
    def test_symmetric_case(self):
        pm = step_pmf(Params(F(1)))
        assert pm[1] == pm[-1] == F(1, 2) and pm[0] == 0

    def test_direct_substitution(self):
        pm = step_pmf(Params(F(2), F(1)))  # z = 7/2
        assert pm == {1: F(1, 7), 0: F(2, 7), -1: F(4, 7)}

    @pytest.mark.parametrize("rho", RHOS)
    @pytest.mark.parametrize("sigma", [F(0), F(1), F(5, 2)])
    def test_mass_one(self, rho, sigma):
        assert sum(step_pmf(Params(rho, sigma)).values()) == 1


class TestWalkPathProb:
    def test_symmetric_cube(self):
        params = Params(F(1))
        for p in enumerate_paths(3, allow_flat=False):
            assert walk_path_prob(p, params) == F(1, 8)

    def test_product_oracle(self):
        params = Params(F(2), F(1))
        p = Path.from_values((0, 1, 1, 0))
        assert walk_path_prob(p, params) == F(1, 7) * F(2, 7) * F(4, 7) == F(8, 343)
        pm = step_pmf(params)
        for path in enumerate_paths(4):
            assert walk_path_prob(path, params) == math.prod(
                (pm[s] for s in path.steps), start=F(1)
            )

    def test_flat_step_impossible_without_weight(self):
        assert walk_path_prob(Path((1, 0)), Params(F(2))) == 0

    @pytest.mark.parametrize("rho", [F(1, 2), F(1), F(2)])
    @pytest.mark.parametrize("sigma", [F(0), F(1)])
    def test_total_mass(self, rho, sigma):
        params = Params(rho, sigma)
        for t in (1, 4, 8):
            assert walk_law(t, params).mass() == 1


class TestChainTransition:
    def test_classic_kernel(self):
        # rho = 1, sigma = 0: up-probability (k+2)/(2(k+1))
        params = Params(F(1))
        assert chain_transition(1, 1, params) == F(3, 4)
        assert chain_transition(0, -1, params) == 0

    def test_forced_up_step(self):
        assert chain_transition(0, 1, Params(F(2))) == 1

    @pytest.mark.parametrize("rho", RHOS)
    @pytest.mark.parametrize("sigma", [F(0), F(1)])
    def test_row_sums(self, rho, sigma):
        params = Params(rho, sigma)
        for k in range(21):
            assert sum(chain_transition(k, d, params) for d in (-1, 0, 1)) == 1

    @pytest.mark.parametrize("rho", [F(1, 2), F(2, 3), F(3, 2)])
    def test_rho_inversion_symmetry(self, rho):
        a, b = Params(rho, F(1)), Params(1 / rho, F(1))
        for k in range(15):
            for d in (-1, 0, 1):
                assert chain_transition(k, d, a) == chain_transition(k, d, b)

    def test_rejects_negative_level(self):
        with pytest.raises(ValueError):
            chain_transition(-1, 1, Params(F(1)))


class TestInitialLaws:
    def test_pmf_examples(self):
        q, theta = F(1, 4), F(1, 2)
        assert initial_pmf(QNegativeBinomial(q, theta), 0) == (1 - theta) * (1 - theta * q)
        assert initial_pmf(NegativeBinomial(F(1, 2)), 3) == F(1, 4) * 4 * F(1, 8)
        assert initial_pmf(ShiftedPoisson(1.0), 1) == pytest.approx(math.exp(-1))
        assert initial_pmf(ShiftedPoisson(1.0), 0) == 0

    def test_mass_one(self):
        for law in (
            PointMass(3),
            FiniteSupport(((0, F(1, 6)), (2, F(1, 3)), (5, F(1, 2)))),
            Geometric(F(1, 3)),
            QNegativeBinomial(F(9, 4), F(2, 9)),
            NegativeBinomial(F(1, 2)),
        ):
            assert law.tail_mass(0) == 1
        assert ShiftedPoisson(1.0).tail_mass(0) == pytest.approx(1.0, abs=1e-12)

    def test_qnb_is_two_geometric_convolution(self):
        q, theta = F(1, 4), F(1, 2)
        law = QNegativeBinomial(q, theta)
        a, b = q * theta, theta
        for m in range(12):
            conv = sum(
                (1 - a) * a**i * (1 - b) * b ** (m - i) for i in range(m + 1)
            )
            assert law.pmf(m) == conv

    def test_finite_support_must_normalize(self):
        with pytest.raises(ValueError):
            FiniteSupport(((0, F(1, 2)),))

    def test_parse_round_trip(self):
        for text in ("point:2", "finite:0=1/3,2=2/3", "geo:1/3",
                     "qnb:q=1/4,theta=1/2", "nb:rho0=1/2", "spoisson:1"):
            law = parse_initial_law(text)
            assert parse_initial_law(law.cli_string()).cli_string() == law.cli_string()
        with pytest.raises(ValueError):
            parse_initial_law("bogus:1")
        with pytest.raises(ValueError):
            parse_initial_law("finite:0=1/2")


class TestChainIncrementLaw:
    def test_reflecting_start(self):
        tbl = chain_increment_law(1, PointMass(0), Params(F(1)))
        assert tbl[Path((1,))] == 1
        assert tbl[Path((-1,))] == 0

    def test_kernel_product_hand_check(self):
        # from level 1 at rho=1: P(up)=3/4 then from 2: P(up)=2/3
        tbl = chain_increment_law(2, PointMass(1), Params(F(1)))
        assert tbl[Path((1, 1))] == F(3, 4) * F(2, 3)
        assert tbl[Path((1, -1))] == F(3, 4) * F(1, 3)
        assert tbl[Path((-1, 1))] == F(1, 4) * 1

    @pytest.mark.parametrize("rho", [F(1, 2), F(1), F(3, 2)])
    @pytest.mark.parametrize("sigma", [F(0), F(1)])
    def test_mass_one(self, rho, sigma):
        params = Params(rho, sigma)
        laws = [PointMass(2), FiniteSupport(((0, F(1, 2)), (3, F(1, 2))))]
        if params.q != 1:
            laws.append(QNegativeBinomial(params.q, F(1, 5)))
        else:
            laws.append(NegativeBinomial(F(1, 3)))
        for law in laws:
            for t in (1, 3, 4):
                assert chain_increment_law(t, law, params).mass() == 1

    @pytest.mark.parametrize("rho", [F(1, 2), F(2, 3), F(1), F(3, 2)])
    @pytest.mark.parametrize("sigma", [F(0), F(1)])
    def test_formula_equals_product_route_finite(self, rho, sigma):
        params = Params(rho, sigma)
        for law in [PointMass(n) for n in range(5)] + [
            FiniteSupport(((1, F(1, 4)), (4, F(3, 4))))
        ]:
            for t in (1, 2, 4, 6):
                a = chain_increment_law(t, law, params, route="formula")
                b = chain_increment_law(t, law, params, route="product")
                diff, _ = a.max_abs_diff(b)
                assert diff == 0

    @pytest.mark.parametrize("rho,sigma,t", [
        (F(1, 2), F(0), 3), (F(2, 3), F(1), 3), (F(1), F(1), 3),
        (F(3, 2), F(0), 5),
    ])
    def test_formula_vs_truncated_product_qnb(self, rho, sigma, t):
        # infinite support: the product route truncates; the exact formula
        # value must sit inside the certified interval
        params = Params(rho, sigma)
        q = params.q
        law = QNegativeBinomial(q, F(1, 2) if q <= 1 else 1 / (2 * q))
        exact = chain_increment_law(t, law, params, route="formula")
        trunc = chain_increment_law(t, law, params, route="product", mode="approx")
        for p, v in exact.entries.items():
            assert abs(float(v) - trunc[p]) <= trunc.err + 1e-12

    def test_product_route_exact_needs_finite_support(self):
        params = Params(F(1, 2))
        with pytest.raises(UnsupportedExactModeError):
            chain_increment_law(2, Geometric(F(1, 3)), params,
                                route="product", mode="exact")

    def test_approx_route_geometric_initial(self):
        params = Params(F(2, 3))
        tbl = chain_increment_law(3, Geometric(F(1, 2)), params)
        assert tbl.mode == "approx"
        assert tbl.mass() == pytest.approx(1.0, abs=1e-12)
