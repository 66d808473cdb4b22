"""Reproducible sampling and empirical statistics.

All randomness flows through counter-based Philox streams keyed by
(seed, stream index): identical keys give identical sequences on any
platform, and distinct stream indices are independent, so Monte Carlo work
can be sharded across workers deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .processes import InitialLaw, Params, step_pmf
from .representation import LevelLaw


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(self.seed << 64) | self.stream))

    def child(self, stream: int) -> "RngStream":
        return RngStream(self.seed, stream)


def _gen(rng) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def _step_thresholds(params: Params):
    pm = step_pmf(params)
    return float(pm[1]), float(pm[1] + pm[0])


def sample_walk(t: int, params: Params, rng, n: int = 1) -> np.ndarray:
    """n walk paths of horizon t; returns values of shape (n, t+1)."""
    gen = _gen(rng)
    p_up, p_upflat = _step_thresholds(params)
    u = gen.random((n, t))
    steps = np.where(u < p_up, 1, np.where(u < p_upflat, 0, -1))
    out = np.zeros((n, t + 1), dtype=np.int64)
    np.cumsum(steps, axis=1, out=out[:, 1:])
    return out


def sample_chain(t: int, law: InitialLaw, params: Params, rng, n: int = 1) -> np.ndarray:
    """n chain paths of horizon t (values include the random start level).

    One vectorized kernel step per time unit; the up/down probabilities are
    computed through expm1 so the q -> 1 and level-0 cases stay exact in
    floating point.
    """
    gen = _gen(rng)
    z = float(params.z)
    rho = float(params.rho)
    sigma = float(params.sigma)
    lnq = 2.0 * math.log(rho)
    c_up, c_dn = 1.0 / (rho * z), rho / z

    out = np.empty((n, t + 1), dtype=np.int64)
    k = law.sample(gen, n).astype(np.float64)
    out[:, 0] = k
    for j in range(1, t + 1):
        if lnq == 0.0:
            up = c_up * (k + 2) / (k + 1)
            dn = c_dn * k / (k + 1)
        else:
            denom = np.expm1((k + 1) * lnq)
            up = c_up * np.expm1((k + 2) * lnq) / denom
            dn = c_dn * np.expm1(k * lnq) / denom
        u = gen.random(n)
        if sigma == 0.0:
            # up + dn = 1 up to rounding; never emit a flat step here
            k = k + np.where(u < up, 1, -1)
        else:
            k = k + np.where(u < up, 1, np.where(u < up + dn, -1, 0))
        out[:, j] = k
    return out


def sample_level(level_law: LevelLaw, rng, n: int = 1) -> np.ndarray:
    """n draws from a level law on Z>=0."""
    gen = _gen(rng)
    if level_law.kind == "geometric":
        return gen.geometric(float(1 - level_law._p), n) - 1
    pmf = level_law.pmf_floats()
    cum = np.cumsum(pmf)
    return np.searchsorted(cum, gen.random(n), side="right").clip(0, len(pmf) - 1)


# ---------------------------------------------------------------------------
# empirical statistics
# ---------------------------------------------------------------------------


def ks_distance(samples_a, samples_b=None, cdf=None) -> float:
    """One- or two-sample Kolmogorov-Smirnov statistic.

    Pass a second sample for the two-sample form or a callable CDF for the
    one-sample form; at least 100 points per sample are required.
    """
    a = np.sort(np.asarray(samples_a, dtype=float))
    if len(a) < 100:
        raise ValueError("need at least 100 samples")
    if (samples_b is None) == (cdf is None):
        raise ValueError("pass exactly one of samples_b / cdf")
    if cdf is not None:
        f = np.array([cdf(x) for x in a])
        n = len(a)
        up = np.arange(1, n + 1) / n - f
        dn = f - np.arange(0, n) / n
        return float(max(up.max(), dn.max()))
    b = np.sort(np.asarray(samples_b, dtype=float))
    if len(b) < 100:
        raise ValueError("need at least 100 samples")
    everything = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, everything, side="right") / len(a)
    cdf_b = np.searchsorted(b, everything, side="right") / len(b)
    return float(np.abs(cdf_a - cdf_b).max())


def ks_two_sample_critical(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample rejection threshold at level alpha."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n + m) / (n * m))


def empirical_table(value_rows: np.ndarray):
    """Map from increment tuples to empirical frequencies."""
    rows = np.asarray(value_rows)
    keys, counts = np.unique(rows, axis=0, return_counts=True)
    total = counts.sum()
    return {tuple(k.tolist()): c / total for k, c in zip(keys, counts)}
