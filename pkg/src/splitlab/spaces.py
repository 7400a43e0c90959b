"""Flat geometric substrates: tori T^n = R^n / Z^n and open boxes in R^n.

Both carry the Euclidean metric. Points are plain float arrays; the Space
owns canonicalization (mod-1 representatives on the torus) and wrap-aware
distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

TORUS = "torus"
CHART_BOX = "chart_box"


@dataclass(frozen=True)
class Space:
    kind: str
    dimension: int
    bounds: np.ndarray | None = field(default=None)  # (n, 2), chart_box only

    def __post_init__(self):
        if self.kind not in (TORUS, CHART_BOX):
            raise ConfigError(f"unknown space kind {self.kind!r}")
        if self.dimension < 2:
            raise ConfigError("spaces need dimension >= 2")
        if self.kind == CHART_BOX:
            if self.bounds is None:
                raise ConfigError("chart_box requires bounds")
            b = np.asarray(self.bounds, dtype=float)
            if b.shape != (self.dimension, 2) or np.any(b[:, 1] <= b[:, 0]):
                raise ConfigError("bounds must be (n, 2) with max > min per axis")
            object.__setattr__(self, "bounds", b)

    @staticmethod
    def torus(n: int) -> "Space":
        return Space(TORUS, n)

    @staticmethod
    def box(bounds) -> "Space":
        b = np.asarray(bounds, dtype=float)
        return Space(CHART_BOX, b.shape[0], b)

    def canonicalize(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ConfigError(f"point of shape {x.shape}, expected ({self.dimension},)")
        if self.kind == TORUS:
            return np.mod(x, 1.0)
        return x.copy()

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if self.kind == TORUS:
            return True
        return bool(np.all(x > self.bounds[:, 0]) and np.all(x < self.bounds[:, 1]))

    def displacement(self, x, y) -> np.ndarray:
        """Shortest vector from x to y (wrap-aware on the torus)."""
        d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
        if self.kind == TORUS:
            d = d - np.round(d)
        return d

    def distance(self, x, y) -> float:
        return float(np.linalg.norm(self.displacement(x, y)))

    def random_points(self, count: int, seed: int, margin: float = 0.05) -> np.ndarray:
        """Deterministic sample of interior points, shape (count, n)."""
        rng = np.random.default_rng(seed)
        if self.kind == TORUS:
            return rng.uniform(0.0, 1.0, size=(count, self.dimension))
        lo = self.bounds[:, 0]
        hi = self.bounds[:, 1]
        pad = margin * (hi - lo)
        return rng.uniform(lo + pad, hi - pad, size=(count, self.dimension))
