from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n`` interior points strictly between ``a`` and ``b``.

    The end points are the truncation bounds; they are never sampled, so
    open domains with singular ends can use them directly.
    """

    a: float
    b: float
    n: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ValueError("grid bounds must be finite")
        if self.b <= self.a:
            raise ValueError(f"empty grid interval ({self.a}, {self.b})")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"grid needs a positive point count, got {self.n}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n + 1)

    @property
    def points(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.n + 1)

    def refine(self) -> Grid:
        """Halve the spacing; every old point stays a point of the new grid."""
        return Grid(self.a, self.b, 2 * self.n + 1)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "n": self.n, "h": self.h}
