"""The level-shifted max transform, its complete preimage structure, and the
max-plus (tropical) operator identities.

``apply_T(g, s)`` sends a path s to 2*(running_max(s) - g)_+ - s.  For a
target path x with global minimum K = K0(x), the full inverse image consists
of finitely many "sporadic" members at level g = -K plus an infinite ray
{(g, -x) : g >= -K}; the ray is kept symbolic (lower endpoint only).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import Path, stats


def apply_T(g: int, s: Path) -> Path:
    """2*(max_{i<=j} s_i - g)_+ - s_j, defined for integer g >= 0.

    Collapses to -s whenever g dominates the running maximum.
    """
    if g < 0:
        raise ValueError("the transform level g must be >= 0")
    out, m = [], 0
    for v in s.values:
        m = max(m, v)
        out.append(2 * max(m - g, 0) - v)
    return Path.from_values(out)


def tilde_T(g: int, x: Path) -> Path:
    """The sign-flipped transform x_j - 2*(max_{i<=j} x_i - g)_+ (= -apply_T)."""
    return apply_T(g, x).negate()


def preimage_member(x: Path, r: int) -> Path:
    """The preimage path s^(r), r in [K0(x), x_t]:
    s^(r)_j = 2*(min(r, K_j) - K0) - x_j."""
    st = stats(x)
    if not st.K0 <= r <= x.end:
        raise ValueError(f"r must lie in [{st.K0}, {x.end}], got {r}")
    return Path.from_values(
        2 * (min(r, st.K[j]) - st.K0) - x.values[j] for j in range(x.horizon + 1)
    )


@dataclass(frozen=True)
class PreimageSet:
    """The complete inverse image of a path under the transform.

    ``sporadic`` lists the finitely many members (g = -K0, s^(r)) for
    r = K0+1 .. x_t; the ray holds (g, -x) for every g >= -K0 and is never
    materialized.
    """

    K0: int
    end: int
    ray_path: Path
    ray_g_min: int
    sporadic: tuple  # ((g, Path), ...)

    def members(self, g_max: int):
        """All members with level <= g_max (finite truncation of the ray)."""
        for g, s in self.sporadic:
            if g <= g_max:
                yield g, s
        for g in range(self.ray_g_min, g_max + 1):
            yield g, self.ray_path

    def to_json(self):
        return {
            "K0": self.K0,
            "end": self.end,
            "ray": {"s": str(self.ray_path), "g_min": self.ray_g_min},
            "sporadic": [{"g": g, "s": str(s)} for g, s in self.sporadic],
        }


def preimage(x: Path) -> PreimageSet:
    st = stats(x)
    k0 = st.K0
    sporadic = tuple((-k0, preimage_member(x, r)) for r in range(k0 + 1, x.end + 1))
    return PreimageSet(
        K0=k0,
        end=x.end,
        ray_path=preimage_member(x, k0),
        ray_g_min=-k0,
        sporadic=sporadic,
    )


def preimage_stats(x: Path, r: int):
    """(U, D, H) of s^(r) without constructing it:
    U = r - K0 + D(x), D = K0 - r + U(x), H = H(x)."""
    st = stats(x)
    if not st.K0 <= r <= x.end:
        raise ValueError(f"r must lie in [{st.K0}, {x.end}], got {r}")
    return (r - st.K0 + st.D, st.K0 - r + st.U, st.H)


def running_max_identity_check(x: Path, r: int) -> bool:
    """max_{i<=j} (s^(r)_i + K0)_+ == min(r, K_j) - K0 for every j."""
    st = stats(x)
    s = preimage_member(x, r)
    m = 0
    for j, sv in enumerate(s.values):
        m = max(m, sv + st.K0, 0)
        if m != min(r, st.K[j]) - st.K0:
            return False
    return True


# ---------------------------------------------------------------------------
# tropical operator identities
# ---------------------------------------------------------------------------


def _tilde_batch(vals: np.ndarray, g: int) -> np.ndarray:
    """tilde_T over a batch: rows are value sequences starting at 0."""
    m = np.maximum.accumulate(vals, axis=1)
    return vals - 2 * np.maximum(m - g, 0)


def tropical_identities_batch(vals: np.ndarray, g1: int, g2: int) -> dict:
    """Pointwise check of the three max-plus identities on a batch of paths.

    1. running_max(tilde_T_g(x)) == min(g, running_max(x))
    2. tilde_T_g2(tilde_T_g1(x)) == tilde_T_{min(g1,g2)}(x)
    3. 2*running_max - id applied after tilde_T_g equals 2*running_max - id

    Returns violation counts per identity (expected all zero).
    """
    vals = np.asarray(vals)
    report = {}
    m = np.maximum.accumulate(vals, axis=1)
    for tag, g in (("g1", g1), ("g2", g2)):
        y = _tilde_batch(vals, g)
        my = np.maximum.accumulate(y, axis=1)
        report[f"max_of_transform[{tag}]"] = int(np.sum(my != np.minimum(g, m)))
        report[f"two_max_minus_id[{tag}]"] = int(np.sum((2 * my - y) != (2 * m - vals)))
    lhs = _tilde_batch(_tilde_batch(vals, g1), g2)
    rhs = _tilde_batch(vals, min(g1, g2))
    report["composition"] = int(np.sum(lhs != rhs))
    report["ok"] = all(v == 0 for k, v in report.items() if k != "ok")
    return report


def tropical_compose_check(x: Path, g1: int, g2: int) -> dict:
    """Single-path wrapper around :func:`tropical_identities_batch`."""
    if g1 < 0 or g2 < 0:
        raise ValueError("levels must be >= 0")
    vals = np.asarray([x.values], dtype=np.int64)
    report = tropical_identities_batch(vals, g1, g2)
    report.update({"path": str(x), "g1": g1, "g2": g2})
    return report
