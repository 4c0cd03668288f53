"""Three-parameter power model ``r_lambda = a * r_pb**b + c``.

For a fixed exponent the model is linear in ``(a, c)``, so the fit profiles
the residual over ``b`` alone: a coarse grid locates the basin, a bounded
golden-section/Brent search refines it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

B_MIN, B_MAX = 0.1, 20.0
GRID_SIZE = 400


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    rss: float
    n: int

    def __call__(self, r):
        return self.a * np.power(np.asarray(r, dtype=float), self.b) + self.c


def _linear_ac(r: np.ndarray, y: np.ndarray, b: float) -> tuple[float, float, float]:
    """Closed-form least squares for (a, c) at exponent b; returns (a, c, rss)."""
    x = np.power(r, b)
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx <= 1e-300:
        a = 0.0
    else:
        a = float(((x - xm) * (y - ym)).sum() / sxx)
    c = float(ym - a * xm)
    res = y - (a * x + c)
    return a, c, float(res @ res)


def fit_power(points, b_bounds=(B_MIN, B_MAX), grid_size: int = GRID_SIZE) -> FitResult:
    """Least-squares fit of ``a * r**b + c`` to ``(r_pb, r_lambda)`` pairs."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (r_pb, r_lambda) pairs")
    r, y = pts[:, 0], pts[:, 1]
    if len(r) < 4:
        raise ValueError(f"need at least 4 points, got {len(r)}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    if np.any(r <= 0):
        raise ValueError("r_pb values must be positive")
    if np.ptp(r) == 0:
        raise ValueError("degenerate data: all r_pb values are equal")

    lo, hi = b_bounds
    grid = np.linspace(lo, hi, grid_size)
    rss = np.array([_linear_ac(r, y, b)[2] for b in grid])
    i = int(np.argmin(rss))
    best_b, best_rss = float(grid[i]), float(rss[i])
    bracket = (float(grid[max(i - 1, 0)]), float(grid[min(i + 1, grid_size - 1)]))
    if bracket[1] > bracket[0]:
        opt = minimize_scalar(
            lambda b: _linear_ac(r, y, b)[2],
            bounds=bracket,
            method="bounded",
            options={"xatol": 1e-12, "maxiter": 500},
        )
        if opt.fun <= best_rss:
            best_b, best_rss = float(opt.x), float(opt.fun)
    a, c, rss_final = _linear_ac(r, y, best_b)
    return FitResult(a, best_b, c, rss_final, len(r))
