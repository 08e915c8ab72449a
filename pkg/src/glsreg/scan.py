"""Supremum scans over exponent domains.

Every sup over p in this package is computed the same way: evaluate the
objective on a geometric grid (plus endpoint-adjacent samples), then refine
the best bracket by golden-section search.  When the domain stretches past
the scan cap and the objective is still climbing at the cap, the scan
reports +inf with an ``unbounded`` flag instead of the capped value: a
finite underestimate would silently break the norm axioms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .generating import GRID_POINTS, UPPER_CAP, Domain, PointDomain, scan_grid

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a supremum scan."""

    value: float
    argmax: float
    unbounded: bool
    grid: np.ndarray
    objective: np.ndarray


def golden_section_max(f: Callable[[float], float], a: float, b: float, iters: int = 90) -> tuple[float, float]:
    """Golden-section maximisation of a scalar function on [a, b]."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if b - a <= abs(b) * 1e-15 + 1e-300:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _is_climbing_at_cap(obj: np.ndarray, best: int) -> bool:
    if best != obj.size - 1 or obj.size < 2:
        return False
    last, prev = obj[-1], obj[-2]
    if not (math.isfinite(last) and math.isfinite(prev)):
        return False
    return last > prev + 1e-12 * max(1.0, abs(last))


def supremum_scan(
    objective: Callable[[np.ndarray], np.ndarray],
    domain: Domain,
    n_points: int = GRID_POINTS,
    refine: bool = True,
) -> ScanResult:
    """Maximise a vectorised objective over an exponent domain.

    NaNs in the objective are treated as -inf.  The result keeps the grid and
    grid objective so callers can re-check identities on the exact scan points.
    """
    grid = scan_grid(domain, n_points)
    obj = np.asarray(objective(grid), dtype=float)
    obj = np.where(np.isnan(obj), -math.inf, obj)

    best = int(np.argmax(obj))
    best_x, best_v = float(grid[best]), float(obj[best])

    if isinstance(domain, PointDomain):
        return ScanResult(best_v, best_x, False, grid, obj)

    capped = domain.upper > UPPER_CAP
    if capped and _is_climbing_at_cap(obj, best):
        return ScanResult(math.inf, math.inf, True, grid, obj)

    if refine and grid.size >= 2 and math.isfinite(best_v):
        lo = grid[best - 1] if best > 0 else grid[0]
        hi = grid[best + 1] if best < grid.size - 1 else grid[-1]

        def scalar(x: float) -> float:
            v = float(objective(np.asarray([x]))[0])
            return -math.inf if math.isnan(v) else v

        x, v = golden_section_max(scalar, float(lo), float(hi))
        if v > best_v:
            best_x, best_v = x, v

    return ScanResult(best_v, best_x, False, grid, obj)
