"""The walk conditioned to stay above an independent random level.

For a downward-unlikely walk (rho < 1) the future infimum is geometric with
parameter rho^2, which turns the infinite-horizon conditioning event into the
closed form used here: no simulation enters the exact route.  The conditional
path law is

    P(path x | inf_u (S_u + V) >= 0)
        = rho^(-x_t) sigma^H / (c z^t) * sum_{j >= -K} P(V=j) [j + x_t + 1]_q

with normalizer c = sum_j P(V=j) [j+1]_q.  The sign-flipped regime (rho > 1)
reduces to the same formulas at 1/rho.
"""

from __future__ import annotations

import numpy as np

from .exact import Rat, RegimeError, q_bracket
from .paths import Path, enumerate_paths, stats
from .processes import DistTable, InitialLaw, Params, step_pmf
from .representation import LevelLaw


def _effective_params(params: Params, part: str) -> Params:
    if part == "I":
        if params.rho >= 1:
            raise RegimeError("part I requires rho < 1 (walk drifts upward)")
        return params
    if part == "II":
        if params.rho <= 1:
            raise RegimeError("part II requires rho > 1 (sign-flipped walk drifts upward)")
        return params.tilde()
    raise ValueError("part must be 'I' or 'II'")


def survival_prob(a: int, params: Params) -> Rat:
    """P(the walk never drops below -a) = 1 - rho^(2(a+1)), for rho < 1.

    The amount by which the walk ever falls below its start is geometric with
    parameter rho^2.
    """
    if a < 0:
        raise ValueError("a must be >= 0")
    if params.rho >= 1:
        raise RegimeError("survival probability degenerates unless rho < 1")
    return 1 - params.rho ** (2 * (a + 1))


def v_law_from_initial(law: InitialLaw, params: Params, part: str = "I") -> LevelLaw:
    """The level law making the conditioned walk match the chain:
    P(V = k) proportional to P(X0 = k) / [k+1]_q with q = rho^2 (part I) or
    1/rho^2 (part II)."""
    eff = _effective_params(params, part)
    q = eff.q
    top = law.support_max()
    if top is not None:
        weights = {
            k: law.pmf(k) / q_bracket(k + 1, q) for k in range(top + 1) if law.pmf(k)
        }
        total = sum(weights.values())
        return LevelLaw.from_pmf(
            {k: w / total for k, w in weights.items()},
            label=f"V[{law.cli_string()}]",
        )
    form = law.ratio_geometric_form(q)
    if form is None:
        raise RegimeError(
            f"no exact level law for {law.cli_string()!r} at q={q}"
        )
    _, r = form
    # weights c * r^k normalize to a geometric law outright
    return LevelLaw.geometric(r)


def conditioned_walk_law(t: int, vlaw: LevelLaw, params: Params, part: str = "I") -> DistTable:
    """Exact law of the first t steps of the walk conditioned on
    inf_u (S_u + V) >= 0 (sign-flipped walk for part II)."""
    eff = _effective_params(params, part)
    q, z, rho = eff.q, eff.z, eff.rho
    c = vlaw.bracket_tail(0, 0, q)
    allow_flat = eff.sigma > 0
    entries = {}
    for x in enumerate_paths(t, allow_flat):
        st = stats(x)
        pref = eff.sigma**st.H / (rho**x.end * z**t)
        entries[x] = pref * vlaw.bracket_tail(-st.K0, x.end, q) / c
    return DistTable(t, "exact", entries)


def rejection_oracle(t: int, vlaw: LevelLaw, params: Params, part: str = "I",
                     horizon_pad: int = 200, n_samples: int = 200000,
                     rng=None, chunk: int = 50000) -> dict:
    """Monte Carlo cross-check: sample V and a length-(t+pad) walk, keep the
    paths with min(S + V) >= 0 over the whole window, and tabulate the first t
    increments.

    Conditioning on a finite window instead of all time inflates acceptance;
    the leftover is estimated from the accepted sample itself via the exact
    later-dip probability rho^(2(S_T + V + 1)), reported as
    ``truncation_bound``.
    """
    eff = _effective_params(params, part)
    if rng is None:
        rng = np.random.default_rng(0)
    gen = rng.generator() if hasattr(rng, "generator") else rng
    T = t + horizon_pad
    probs = step_pmf(eff)
    p_up, p_flat = float(probs[1]), float(probs[0])
    pmf = vlaw.pmf_floats()
    cum_v = np.cumsum(pmf)

    counts = {}
    accepted = 0
    dip_mass = 0.0
    rho_f = float(eff.rho)
    remaining = n_samples
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        u = gen.random((m, T))
        steps = np.where(u < p_up, 1, np.where(u < p_up + p_flat, 0, -1)).astype(np.int32)
        s = np.cumsum(steps, axis=1)
        v = np.searchsorted(cum_v, gen.random(m), side="right").clip(0, len(pmf) - 1)
        keep = (s.min(axis=1) + v) >= 0
        accepted += int(keep.sum())
        dip_mass += float(np.sum(rho_f ** (2.0 * (s[keep, -1] + v[keep] + 1))))
        for row in s[keep, :t]:
            key = tuple(row.tolist())
            counts[key] = counts.get(key, 0) + 1

    entries = {
        Path.from_values((0,) + k): c / accepted for k, c in counts.items()
    }
    return {
        "table": DistTable(t, "approx", entries),
        "accepted": accepted,
        "n_samples": n_samples,
        "acceptance_rate": accepted / n_samples,
        "truncation_bound": dip_mass / max(accepted, 1),
    }
