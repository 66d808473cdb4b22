"""Walk and chain laws: step pmf, the q-deformed kernel, initial-law catalog,
and exact finite-dimensional distributions over the path space.

The chain on Z>=0 moves from k by a step delta in {-1, 0, +1} with probability
``P(step = delta) * [k+delta+1]_q / [k+1]_q`` where q = rho^2 and the step law
is the three-point walk law below.  The canonical law object is the table of
increment paths (X_j - X_0), built either from the closed-form sum over the
initial level ("formula" route) or by mixing kernel products over the level
("product" route).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    APPROX_TAIL_TOL,
    Rat,
    UnsupportedExactModeError,
    geometric_bracket_tail,
    geometric_tail,
    prob_json,
    q_bracket,
    rat,
    rat_str,
)
from .paths import Path, enumerate_paths, stats


@dataclass(frozen=True)
class Params:
    """Walk/chain parameters (rho, sigma), both exact rationals.

    q = rho^2 and the normalizer z = rho + sigma + 1/rho are derived on
    access, never stored.
    """

    rho: Rat
    sigma: Rat = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rho", rat(self.rho))
        object.__setattr__(self, "sigma", rat(self.sigma))
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    @property
    def q(self) -> Rat:
        return self.rho**2

    @property
    def z(self) -> Rat:
        return self.rho + self.sigma + 1 / self.rho

    def tilde(self) -> "Params":
        """Parameters of the sign-flipped walk (rho -> 1/rho, same sigma)."""
        return Params(1 / self.rho, self.sigma)

    def to_json(self):
        return {"rho": rat_str(self.rho), "sigma": rat_str(self.sigma)}


def step_pmf(params: Params) -> dict:
    """Exact one-step law of the walk: {+1: 1/(rho*z), 0: sigma/z, -1: rho/z}."""
    z = params.z
    return {1: 1 / (params.rho * z), 0: params.sigma / z, -1: params.rho / z}


def walk_path_prob(path: Path, params: Params) -> Rat:
    """Probability that the walk follows ``path`` exactly.

    Equals sigma^H (1/rho)^U rho^D / z^t, i.e. the product of the one-step
    probabilities along the increments.
    """
    st = stats(path)
    if st.H and params.sigma == 0:
        return Fraction(0)
    return (
        params.sigma**st.H
        * params.rho ** (st.D - st.U)
        / params.z ** path.horizon
    )


def chain_transition(k: int, delta: int, params: Params) -> Rat:
    """One-step chain probability from level k to k + delta.

    The [0]_q = 0 factor kills the down step at k = 0, so the chain never
    leaves Z>=0; rows sum to 1 exactly.
    """
    if k < 0:
        raise ValueError("chain level must be >= 0")
    if delta not in (-1, 0, 1):
        raise ValueError("delta must be in {-1, 0, +1}")
    q = params.q
    return step_pmf(params)[delta] * q_bracket(k + delta + 1, q) / q_bracket(k + 1, q)


# ---------------------------------------------------------------------------
# initial-law catalog
# ---------------------------------------------------------------------------


class InitialLaw:
    """Base class for laws of the chain's starting level on Z>=0.

    Subclasses provide the pmf and upper-tail mass, plus (where a closed form
    exists) a geometric representation of pmf(k)/[k+1]_q used by the exact
    tail sums.  ``exact`` marks laws with rational pmf values.
    """

    exact = True

    def pmf(self, n: int):
        raise NotImplementedError

    def tail_mass(self, n: int):
        """P(X0 >= n)."""
        raise NotImplementedError

    def pmf_float(self, n: int) -> float:
        return float(self.pmf(n))

    def tail_mass_float(self, n: int) -> float:
        return float(self.tail_mass(n))

    def support_max(self):
        """Largest support point, or None for infinite support."""
        return None

    def ratio_geometric_form(self, q: Rat):
        """(c, r) such that pmf(k)/[k+1]_q = c * r^k for all k, else None."""
        return None

    # -- exact tail machinery ------------------------------------------------

    def ratio_tail_exact(self, n: int, q: Rat) -> Rat:
        """Sum of pmf(j)/[j+1]_q over j >= n, in closed form."""
        top = self.support_max()
        if top is not None:
            return sum(
                (self.pmf(j) / q_bracket(j + 1, q) for j in range(n, top + 1) if self.pmf(j)),
                Fraction(0),
            )
        form = self.ratio_geometric_form(q)
        if form is None:
            raise UnsupportedExactModeError(
                f"{self.cli_string()!r} has no exact tail sum at q={q}; use approx mode"
            )
        c, r = form
        return c * geometric_tail(r, n)

    def bracket_ratio_sum_exact(self, a: int, b: int, q: Rat) -> Rat:
        """Sum of pmf(k) * [k+b+1]_q / [k+1]_q over k >= a, in closed form."""
        top = self.support_max()
        if top is not None:
            return sum(
                (
                    self.pmf(k) * q_bracket(k + b + 1, q) / q_bracket(k + 1, q)
                    for k in range(a, top + 1)
                    if self.pmf(k)
                ),
                Fraction(0),
            )
        form = self.ratio_geometric_form(q)
        if form is None:
            raise UnsupportedExactModeError(
                f"{self.cli_string()!r} has no exact bracket sum at q={q}; use approx mode"
            )
        c, r = form
        return c * geometric_bracket_tail(r, a, b, q)

    def exact_capable(self, q: Rat) -> bool:
        return self.support_max() is not None or self.ratio_geometric_form(q) is not None

    # -- misc ------------------------------------------------------------------

    def truncation_point(self, tol: float = APPROX_TAIL_TOL) -> int:
        top = self.support_max()
        if top is not None:
            return top
        n = 0
        while self.tail_mass_float(n + 1) >= tol and n < 10**7:
            n += 1
        return n

    def sample(self, rng, size):
        raise NotImplementedError

    def cli_string(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.cli_string()!r})"


@dataclass(frozen=True, repr=False)
class PointMass(InitialLaw):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("point mass must sit in Z>=0")

    def pmf(self, n):
        return Fraction(1) if n == self.n else Fraction(0)

    def tail_mass(self, n):
        return Fraction(1) if self.n >= n else Fraction(0)

    def support_max(self):
        return self.n

    def sample(self, rng, size):
        import numpy as np

        return np.full(size, self.n, dtype=np.int64)

    def cli_string(self):
        return f"point:{self.n}"


@dataclass(frozen=True, repr=False)
class FiniteSupport(InitialLaw):
    masses: tuple  # ((level, Fraction), ...)

    def __post_init__(self):
        pairs = tuple(sorted((int(n), rat(p)) for n, p in dict(self.masses).items()))
        if any(n < 0 or p < 0 for n, p in pairs):
            raise ValueError("levels must be >= 0 with nonnegative mass")
        if sum(p for _, p in pairs) != 1:
            raise ValueError("masses must sum to 1 exactly")
        object.__setattr__(self, "masses", pairs)

    def pmf(self, n):
        return dict(self.masses).get(n, Fraction(0))

    def tail_mass(self, n):
        return sum((p for lvl, p in self.masses if lvl >= n), Fraction(0))

    def support_max(self):
        return self.masses[-1][0]

    def sample(self, rng, size):
        import numpy as np

        levels = np.array([n for n, _ in self.masses])
        cum = np.cumsum([float(p) for _, p in self.masses])
        return levels[np.searchsorted(cum, rng.random(size), side="right").clip(0, len(levels) - 1)]

    def cli_string(self):
        return "finite:" + ",".join(f"{n}={rat_str(p)}" for n, p in self.masses)


@dataclass(frozen=True, repr=False)
class Geometric(InitialLaw):
    """P(X0 = n) = (1-p) p^n.  Exact pmf, but no closed-form tail ratio."""

    p: Rat

    def __post_init__(self):
        object.__setattr__(self, "p", rat(self.p))
        if not 0 <= self.p < 1:
            raise ValueError("geometric parameter must be in [0, 1)")

    def pmf(self, n):
        return (1 - self.p) * self.p**n

    def tail_mass(self, n):
        return self.p**n

    def sample(self, rng, size):
        return rng.geometric(float(1 - self.p), size) - 1

    def cli_string(self):
        return f"geo:{rat_str(self.p)}"


@dataclass(frozen=True, repr=False)
class QNegativeBinomial(InitialLaw):
    """P(X0 = m) = [m+1]_q theta^m (1-theta)(1-theta q).

    The convolution of two independent geometrics with parameters q*theta and
    theta.  Because the [m+1]_q factor cancels, the tail ratio collapses to a
    geometric series both at q itself and at 1/q.
    """

    q: Rat
    theta: Rat

    def __post_init__(self):
        object.__setattr__(self, "q", rat(self.q))
        object.__setattr__(self, "theta", rat(self.theta))
        if self.q <= 0:
            raise ValueError("q must be > 0")
        if not 0 <= self.theta < 1 or self.theta * self.q >= 1:
            raise ValueError("need 0 <= theta < 1 and theta*q < 1")

    def pmf(self, n):
        return q_bracket(n + 1, self.q) * self.theta**n * (1 - self.theta) * (1 - self.theta * self.q)

    def tail_mass(self, n):
        c = (1 - self.theta) * (1 - self.theta * self.q)
        return c * geometric_bracket_tail(self.theta, n, 0, self.q)

    def ratio_geometric_form(self, q):
        c = (1 - self.theta) * (1 - self.theta * self.q)
        if q == self.q:
            # pmf(k)/[k+1]_q = c * theta^k
            return (c, self.theta)
        if q * self.q == 1:
            # [k+1]_{1/q} = [k+1]_q / q^k turns the ratio into c (q theta)^k
            return (c, self.q * self.theta)
        return None

    def sample(self, rng, size):
        a = rng.geometric(float(1 - self.q * self.theta), size) - 1
        b = rng.geometric(float(1 - self.theta), size) - 1
        return a + b

    def cli_string(self):
        return f"qnb:q={rat_str(self.q)},theta={rat_str(self.theta)}"


@dataclass(frozen=True, repr=False)
class NegativeBinomial(InitialLaw):
    """P(X0 = n) = (1-rho0)^2 (n+1) rho0^n, the two-geometric convolution."""

    rho0: Rat

    def __post_init__(self):
        object.__setattr__(self, "rho0", rat(self.rho0))
        if not 0 <= self.rho0 < 1:
            raise ValueError("rho0 must be in [0, 1)")

    def pmf(self, n):
        return (1 - self.rho0) ** 2 * (n + 1) * self.rho0**n

    def tail_mass(self, n):
        return (1 - self.rho0) ** 2 * geometric_bracket_tail(self.rho0, n, 0, Fraction(1))

    def ratio_geometric_form(self, q):
        if q == 1:
            # the (n+1) factor cancels against [n+1]_1
            return ((1 - self.rho0) ** 2, self.rho0)
        return None

    def sample(self, rng, size):
        p = float(1 - self.rho0)
        return (rng.geometric(p, size) - 1) + (rng.geometric(p, size) - 1)

    def cli_string(self):
        return f"nb:rho0={rat_str(self.rho0)}"


@dataclass(frozen=True, repr=False)
class ShiftedPoisson(InitialLaw):
    """X0 = 1 + Poisson(lam): P(X0 = n) = e^-lam lam^(n-1)/(n-1)! for n >= 1."""

    lam: float
    exact = False

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be > 0")

    def pmf(self, n):
        if n < 1:
            return 0.0
        return math.exp(-self.lam + (n - 1) * math.log(self.lam) - math.lgamma(n))

    def tail_mass(self, n):
        # P(Poisson >= n-1), summed far enough that the ratio bound below
        # certifies the remainder
        if n <= 1:
            return 1.0
        m = n - 1
        total, term, k = 0.0, math.exp(-self.lam + m * math.log(self.lam) - math.lgamma(m + 1)), m
        while True:
            total += term
            k += 1
            term *= self.lam / k
            if k > self.lam and term < 1e-18 * (total + 1e-300):
                # remaining mass < term / (1 - lam/(k+1))
                total += term / (1 - self.lam / (k + 1))
                return total

    def sample(self, rng, size):
        return 1 + rng.poisson(self.lam, size)

    def cli_string(self):
        return f"spoisson:{self.lam:g}"


def initial_pmf(law: InitialLaw, n: int):
    """pmf of the initial level at n (exact for rational classes)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return law.pmf(n)


def parse_initial_law(text: str) -> InitialLaw:
    """Parse CLI law strings: point:2, finite:0=1/3,2=2/3, geo:1/3,
    qnb:q=1/4,theta=1/2, nb:rho0=1/2, spoisson:1."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "point":
            return PointMass(int(arg))
        if kind == "finite":
            pairs = {}
            for item in arg.split(","):
                lvl, _, mass = item.partition("=")
                pairs[int(lvl)] = rat(mass)
            return FiniteSupport(tuple(pairs.items()))
        if kind == "geo":
            return Geometric(rat(arg))
        if kind == "qnb":
            kv = dict(item.split("=", 1) for item in arg.split(","))
            return QNegativeBinomial(rat(kv["q"]), rat(kv["theta"]))
        if kind == "nb":
            kv = dict(item.split("=", 1) for item in arg.split(","))
            return NegativeBinomial(rat(kv["rho0"]))
        if kind == "spoisson":
            return ShiftedPoisson(float(arg))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed initial-law string {text!r}: {exc}") from exc
    raise ValueError(f"unknown initial-law kind {kind!r}")


# ---------------------------------------------------------------------------
# distribution tables over the path space
# ---------------------------------------------------------------------------


@dataclass
class DistTable:
    """Probability table keyed by increment paths of one fixed horizon.

    ``mode`` is "exact" (Fraction entries, mass exactly 1) or "approx" (float
    entries, ``err`` bounds the total truncated mass).
    """

    horizon: int
    mode: str
    entries: dict
    err: float = 0.0

    def mass(self):
        return sum(self.entries.values())

    def __getitem__(self, path: Path):
        zero = Fraction(0) if self.mode == "exact" else 0.0
        return self.entries.get(path, zero)

    def max_abs_diff(self, other: "DistTable"):
        """Largest entrywise discrepancy and a path witnessing it."""
        worst, witness = Fraction(0) if self.mode == "exact" == other.mode else 0.0, None
        for p in set(self.entries) | set(other.entries):
            d = abs(self[p] - other[p])
            if d > worst:
                worst, witness = d, p
        return worst, witness

    def as_float(self) -> dict:
        return {p: float(v) for p, v in self.entries.items()}

    def items_sorted(self):
        return sorted(self.entries.items(), key=lambda kv: kv[0].steps)

    def to_json(self):
        return {
            "horizon": self.horizon,
            "mode": self.mode,
            "err": self.err,
            "entries": {str(p): prob_json(v) for p, v in self.items_sorted()},
        }


def walk_law(t: int, params: Params) -> DistTable:
    """Exact table of the plain walk's paths over horizon t."""
    allow_flat = params.sigma > 0
    entries = {p: walk_path_prob(p, params) for p in enumerate_paths(t, allow_flat)}
    return DistTable(t, "exact", entries)


def chain_increment_law(
    t: int,
    law: InitialLaw,
    params: Params,
    route: str = "formula",
    mode: str = None,
    kmax: int = None,
) -> DistTable:
    """Exact finite-dimensional law of the chain increments (X_j - X_0).

    formula route: per path x, sigma^H / (z^t rho^(x_t)) times the closed-form
    sum over initial levels k >= -K of pmf(k) [x_t+k+1]_q / [k+1]_q; levels
    outside the support contribute exact zeros.

    product route: mixes the kernel products over the initial level directly;
    exact for finite-support laws, truncated (with certified leftover mass in
    ``err``) otherwise.
    """
    q = params.q
    if mode is None:
        mode = "exact" if (law.exact and law.exact_capable(q)) else "approx"
    allow_flat = params.sigma > 0

    if route == "formula":
        return _chain_law_formula(t, law, params, mode, kmax)
    if route != "product":
        raise ValueError(f"unknown route {route!r}")

    top = law.support_max()
    if mode == "exact" and top is None:
        raise UnsupportedExactModeError(
            "product route is exact only for finite-support laws; use mode='approx'"
        )
    entries, err = {}, 0.0
    if top is None:
        top = kmax if kmax is not None else law.truncation_point()
        err = law.tail_mass_float(top + 1)
    levels = [k for k in range(top + 1) if law.pmf(k)]
    weights = [law.pmf(k) for k in levels]
    for x in enumerate_paths(t, allow_flat):
        total = Fraction(0)
        for k, w in zip(levels, weights):
            if k + min(x.values) < 0:
                continue
            prod = w
            for a, b in zip(x.values, x.values[1:]):
                prod *= chain_transition(k + a, b - a, params)
                if not prod:
                    break
            total += prod
        entries[x] = total if mode == "exact" else float(total)
    return DistTable(t, mode, entries, err=err)


def _chain_law_formula(t, law, params, mode, kmax):
    q, z, rho = params.q, params.z, params.rho
    allow_flat = params.sigma > 0
    entries = {}
    err = 0.0
    trunc_top = None
    if mode == "approx":
        trunc_top = kmax if kmax is not None else law.truncation_point()
        err = law.tail_mass_float(trunc_top + 1)
    for x in enumerate_paths(t, allow_flat):
        st = stats(x)
        a = -st.K0
        if mode == "exact":
            pref = params.sigma**st.H / (z**t * rho**x.end)
            entries[x] = pref * law.bracket_ratio_sum_exact(a, x.end, q)
        else:
            pref = float(params.sigma) ** st.H / (float(z) ** t * float(rho) ** x.end)
            qf = float(q)
            s = 0.0
            for k in range(a, trunc_top + 1):
                pk = law.pmf_float(k)
                if pk:
                    s += pk * _bracket_ratio_float(x.end, k, qf)
            entries[x] = pref * s
    return DistTable(t, mode, entries, err=err)


def _bracket_ratio_float(xt, k, q):
    if q == 1.0:
        return (xt + k + 1) / (k + 1)
    return math.expm1((xt + k + 1) * math.log(q)) / math.expm1((k + 1) * math.log(q))


def chain_position_prob(positions, law: InitialLaw, params: Params) -> Rat:
    """Convenience wrapper for position (not increment) probabilities:
    P(X_0 = k0, ..., X_t = kt) = pmf(k0) * product of kernel factors."""
    positions = [int(v) for v in positions]
    if any(v < 0 for v in positions):
        return Fraction(0)
    prob = law.pmf(positions[0])
    for a, b in zip(positions, positions[1:]):
        if not prob:
            break
        prob *= chain_transition(a, b - a, params)
    return prob
