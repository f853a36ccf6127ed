"""Pole functions with finite support, and countable pole schedules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..complex_core import (
    DomainError,
    ZeroSequence,
    inverse_square_blaschke_bound,
    inverse_square_schedule,
)
from ..discs import cnum, from_cnum
from ..domains import Domain, contains


@dataclass(frozen=True, eq=False)
class PoleSpec:
    """Finitely many distinct poles ``a_j`` with weights ``p(a_j) > 0``.

    Restricting the pole function to a subset ``B`` is :meth:`restrict`;
    the weights of dropped poles become 0, i.e. they leave the list.
    """

    points: np.ndarray
    weights: tuple
    generator_id: Optional[str] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) == 0:
            raise DomainError("pole set must be non-empty")
        if len(weights) != pts.shape[0]:
            raise DomainError("one weight per pole is required")
        if not all(w > 0 for w in weights):
            raise DomainError("pole weights must be strictly positive")
        for i in range(len(pts)):
            for j in range(i):
                if np.array_equal(pts[i], pts[j]):
                    raise DomainError(f"repeated pole {pts[i]!r}")

    def __len__(self):
        return len(self.weights)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))

    def restrict(self, indices) -> "PoleSpec":
        idx = sorted(set(int(i) for i in indices))
        if not idx:
            raise DomainError("sub-pole-set must be non-empty")
        if idx[0] < 0 or idx[-1] >= len(self):
            raise DomainError("pole index out of range")
        return PoleSpec(self.points[idx], tuple(self.weights[i] for i in idx), self.generator_id)

    def extend(self, point, weight: float) -> "PoleSpec":
        pts = np.vstack([self.points, np.atleast_1d(np.asarray(point, dtype=complex))[None, :]])
        return PoleSpec(pts, self.weights + (float(weight),), self.generator_id)

    def check_against(self, domain: Domain, z) -> np.ndarray:
        """Validate poles and evaluation point against ``domain``; returns ``z`` as a vector."""
        z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        if self.dimension != domain.dimension or z.shape[0] != domain.dimension:
            raise DomainError("pole/point dimension does not match the domain")
        if not contains(domain, z):
            raise DomainError(f"evaluation point {z!r} is not in the domain")
        for a in self.points:
            if not contains(domain, a):
                raise DomainError(f"pole {a!r} is not in the domain")
            if np.array_equal(a, z):
                raise DomainError("the evaluation point must not be a pole")
        return z

    def dominates(self, other: "PoleSpec") -> bool:
        """True if ``other <= self`` pointwise as pole functions."""
        for a, w in zip(other.points, other.weights):
            hit = [i for i, b in enumerate(self.points) if np.array_equal(a, b)]
            if not hit or self.weights[hit[0]] < w:
                return False
        return True

    def index_of(self, point) -> int:
        point = np.atleast_1d(np.asarray(point, dtype=complex))
        for i, b in enumerate(self.points):
            if np.array_equal(point, b):
                return i
        raise KeyError(point)

    def to_records(self) -> list:
        return [
            {"point": [cnum(c) for c in a], "weight": w}
            for a, w in zip(self.points, self.weights)
        ]

    @classmethod
    def from_records(cls, records) -> "PoleSpec":
        records = list(records)
        if not records:
            raise DomainError("pole set must be non-empty")
        pts = []
        for r in records:
            p = r["point"] if "point" in r else r
            if isinstance(p, dict) and "re" in p:
                p = [p]
            pts.append([from_cnum(c) for c in p])
        return cls(np.array(pts, dtype=complex), tuple(float(r.get("weight", 1.0)) for r in records))


def single_pole(point, weight: float = 1.0) -> PoleSpec:
    return PoleSpec(np.atleast_1d(np.asarray(point, dtype=complex))[None, :], (weight,))


@dataclass(frozen=True)
class PoleSchedule:
    """A countable pole family in the unit disc, consumed by truncation.

    ``inverse_square`` yields ``1 - (1 - t)/j**2``; ``explicit`` yields the
    listed points in order and is exhausted after them.
    """

    generator_id: str = "inverse_square"
    t: float = 0.9
    weight: float = 1.0
    points: tuple = field(default_factory=tuple)
    embed: Optional[tuple] = None  # (dimension, coordinate, fill) to place points in C^n

    def available(self, m: int) -> int:
        if self.generator_id == "explicit":
            return min(m, len(self.points))
        return m

    def zero_sequence(self, m: int) -> ZeroSequence:
        if self.generator_id == "inverse_square":
            return ZeroSequence(
                tuple(inverse_square_schedule(self.t, m)),
                "inverse_square",
                inverse_square_blaschke_bound(self.t),
            )
        if self.generator_id == "explicit":
            pts = [complex(p) for p in self.points[:m]]
            return ZeroSequence(tuple(pts), "explicit", float(sum(1 - abs(p) for p in pts)))
        raise DomainError(f"unknown generator {self.generator_id!r}")

    def take(self, m: int) -> PoleSpec:
        """The truncation ``A_m`` (first ``m`` poles) with constant weight."""
        m = self.available(m)
        if m < 1:
            raise DomainError("truncation must keep at least one pole")
        seq = self.zero_sequence(m).zeros
        if self.embed is None:
            pts = np.array(seq, dtype=complex)[:, None]
        else:
            dim, coord, fill = self.embed
            pts = np.tile(np.asarray(fill, dtype=complex), (m, 1))
            pts[:, coord] = seq
        return PoleSpec(pts, (self.weight,) * m, self.generator_id)
