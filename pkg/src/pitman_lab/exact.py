"""Exact rational arithmetic: q-brackets, geometric sums, certified tail sums.

Every exact probability in this package is a ``fractions.Fraction`` (kept
normalized by the stdlib, arbitrary precision).  Approximate quantities are
floats paired with a certified truncation bound, see :class:`Approx`.  The
two modes never mix inside one computation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Union

Rat = Fraction
ProbValue = Union[Fraction, float]

#: truncation target for approximate tail sums: stop once the remaining
#: probability mass is certifiably below this
APPROX_TAIL_TOL = 1e-15


class Approx(NamedTuple):
    """Float value together with a certified bound on the truncation error."""

    value: float
    err: float

    def to_json(self):
        return {"value": self.value, "err": self.err}


class UnsupportedExactModeError(ValueError):
    """Exact evaluation requested for a law with no closed-form cancellation."""


class RegimeError(ValueError):
    """Parameters violate the hypothesis of the identity being checked."""


def rat(x, den=None) -> Rat:
    """Coerce ints, strings like ``"2/3"``, or Fractions to a Fraction."""
    if den is not None:
        return Fraction(x, den)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rat(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted where exact rationals are required")
    return Fraction(x)


def parse_rat(s: str) -> Rat:
    """Parse "a/b", integer, or decimal strings; all three are exact."""
    return Fraction(s.strip())


def rat_str(x: Rat) -> str:
    """Serialize a rational as ``"num/den"`` (the wire format for exact values)."""
    return f"{x.numerator}/{x.denominator}"


def prob_json(p: ProbValue):
    """JSON form of a probability: ``"num/den"`` when exact, plain float otherwise."""
    if isinstance(p, Fraction):
        return rat_str(p)
    if isinstance(p, Approx):
        return p.to_json()
    return float(p)


def q_bracket(n: int, q: Rat) -> Rat:
    """The q-analog [n]_q = 1 + q + ... + q^(n-1).

    Returns 0 for n = 0 (empty sum) and n itself at q = 1; the q = 1 case is
    handled directly so no (q^n - 1)/(q - 1) division-by-zero branch exists.
    """
    if n < 0:
        raise ValueError(f"q_bracket requires n >= 0, got {n}")
    q = rat(q)
    if q <= 0:
        raise ValueError("q_bracket requires q > 0")
    if q == 1:
        return Fraction(n)
    return (q**n - 1) / (q - 1)


def geometric_tail(r: Rat, a: int) -> Rat:
    """Sum of r^k for k >= a, requiring 0 <= r < 1."""
    r = rat(r)
    if not 0 <= r < 1:
        raise ValueError("geometric tail needs 0 <= r < 1")
    return r**a / (1 - r)


def geometric_bracket_tail(r: Rat, a: int, b: int, q: Rat) -> Rat:
    """Sum of r^k * [k+b+1]_q for k >= a, in closed form.

    Splitting [k+b+1]_q = (1 - q^(k+b+1))/(1 - q) leaves two geometric tails;
    convergence needs r < 1 and r*q < 1.  The q = 1 case sums r^k (k+b+1)
    directly.
    """
    r, q = rat(r), rat(q)
    if not 0 <= r < 1:
        raise ValueError("need 0 <= r < 1")
    if q == 1:
        return r**a * ((a + b + 1) * (1 - r) + r) / (1 - r) ** 2
    if r * q >= 1:
        raise ValueError("series diverges: r*q >= 1")
    return (geometric_tail(r, a) - q ** (b + 1) * geometric_tail(r * q, a)) / (1 - q)


def tail_sum_ratio(law, n: int, q: Rat, mode: str = "exact", trunc_n=None):
    """Sum of P(X0 = j) / [j+1]_q over j >= n.

    This is the building block of every level-law formula in the package.
    ``mode="exact"`` returns a Fraction and is available only for law classes
    whose terms collapse to a geometric series (the law decides, see
    ``InitialLaw.ratio_geometric_form``); ``mode="approx"`` truncates once the
    remaining pmf mass is below ``APPROX_TAIL_TOL`` (or at the explicit cutoff
    ``trunc_n``) and returns an :class:`Approx`.  The reported error bound is
    the leftover pmf mass, valid because 1/[j+1]_q <= 1 for every q > 0.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    q = rat(q)
    if mode == "exact":
        return law.ratio_tail_exact(n, q)
    if mode != "approx":
        raise ValueError(f"unknown mode {mode!r}")

    qf = float(q)
    total = 0.0
    j = n
    cap = trunc_n if trunc_n is not None else 10**7
    while j <= cap:
        if trunc_n is None and law.tail_mass_float(j) < APPROX_TAIL_TOL:
            break
        pj = law.pmf_float(j)
        if pj:
            total += pj / _bracket_float(j + 1, qf)
        j += 1
    return Approx(total, law.tail_mass_float(j))


def _bracket_float(n: int, q: float) -> float:
    if q == 1.0:
        return float(n)
    return (q**n - 1.0) / (q - 1.0)
