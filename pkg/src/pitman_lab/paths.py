"""The discrete path space: integer sequences from 0 with steps in {-1, 0, +1}.

Paths are stored as increment tuples (compact dictionary keys); the value
sequence is materialized on construction.  Exhaustive enumeration is capped
(default horizon 14, override with the ``PITMAN_LAB_CAP`` env var) because the
space grows as 3^t.
"""

from __future__ import annotations

import itertools
import os
from typing import Iterator, NamedTuple

DEFAULT_HORIZON_CAP = 14

_STEPS = (-1, 0, 1)


class HorizonCapError(ValueError):
    """Enumeration request beyond the configured horizon cap."""


def horizon_cap() -> int:
    env = os.environ.get("PITMAN_LAB_CAP")
    return int(env) if env else DEFAULT_HORIZON_CAP


class Path:
    """An element of the path space over horizon t (values x_0=0,...,x_t)."""

    __slots__ = ("steps", "values")

    def __init__(self, steps=()):
        steps = tuple(int(s) for s in steps)
        if any(s not in _STEPS for s in steps):
            raise ValueError(f"steps must lie in {{-1,0,+1}}: {steps}")
        vals = [0]
        for s in steps:
            vals.append(vals[-1] + s)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def from_values(cls, values) -> "Path":
        values = [int(v) for v in values]
        if not values or values[0] != 0:
            raise ValueError("a path must start at 0")
        return cls(b - a for a, b in zip(values, values[1:]))

    @classmethod
    def parse(cls, text: str) -> "Path":
        """Parse the serialized value form, e.g. ``"0,1,0,-1"``."""
        return cls.from_values(int(v) for v in text.split(","))

    @property
    def horizon(self) -> int:
        return len(self.steps)

    @property
    def end(self) -> int:
        return self.values[-1]

    def negate(self) -> "Path":
        return Path(-s for s in self.steps)

    def __setattr__(self, name, value):
        raise AttributeError("Path is immutable")

    def __len__(self):
        return len(self.steps)

    def __eq__(self, other):
        return isinstance(other, Path) and self.steps == other.steps

    def __hash__(self):
        return hash(self.steps)

    def __lt__(self, other):
        return self.steps < other.steps

    def __str__(self):
        return ",".join(str(v) for v in self.values)

    def __repr__(self):
        return f"Path({self})"


class PathStats(NamedTuple):
    """Running extrema and step counts of a path.

    K[j] is the minimum of the values over indices >= j (so K[0] is the global
    minimum), M[j] the maximum over indices <= j; U/D/H count up, down and flat
    steps.  Always U + D + H = t and U - D = x_t.
    """

    K: tuple
    M: tuple
    U: int
    D: int
    H: int

    @property
    def K0(self) -> int:
        return self.K[0]


def stats(path: Path) -> PathStats:
    vals = path.values
    t = len(vals) - 1
    m = [0] * (t + 1)
    for j in range(1, t + 1):
        m[j] = max(m[j - 1], vals[j])
    k = [0] * (t + 1)
    k[t] = vals[t]
    for j in range(t - 1, -1, -1):
        k[j] = min(vals[j], k[j + 1])
    u = sum(1 for s in path.steps if s == 1)
    d = sum(1 for s in path.steps if s == -1)
    return PathStats(K=tuple(k), M=tuple(m), U=u, D=d, H=t - u - d)


def path_count(t: int, allow_flat: bool = True) -> int:
    return 3**t if allow_flat else 2**t


def enumerate_paths(t: int, allow_flat: bool = True, cap=None) -> Iterator[Path]:
    """Yield every path of horizon t exactly once.

    The order is lexicographic in increments with -1 < 0 < +1, which makes the
    enumeration deterministic and splittable by increment prefix.  Flat steps
    are skipped for allow_flat=False (they carry probability 0 when the flat
    weight vanishes), cutting the space from 3^t to 2^t.
    """
    if t < 0:
        raise ValueError("horizon must be >= 0")
    limit = horizon_cap() if cap is None else cap
    if t > limit:
        raise HorizonCapError(
            f"horizon {t} exceeds cap {limit} "
            f"({path_count(t, allow_flat)} paths); raise PITMAN_LAB_CAP to override"
        )
    steps = _STEPS if allow_flat else (-1, 1)
    for incs in itertools.product(steps, repeat=t):
        yield Path(incs)
