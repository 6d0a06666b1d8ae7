"""Two-dimensional parameter sweeps, zero contours and marker lines.

Grid cells are independent pure evaluations assembled by index, so the
result is bit-identical for any thread count or schedule.  Contours are
marching-squares polylines in the axis scale space (log axes interpolate
geometrically); saddle cells are disambiguated by evaluating the true
function at the cell center, not the bilinear interpolant.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .model import FrequencyGrid, SystemSpec, with_param
from .thermo import engine_report, entropy_production
from .workstats import (PerturbativeBreakdownError, chi2_at_i_beta, w_ext2)

SWEEP_PARAMETERS = ("p", "beta", "omega_gap", "alpha")

#: fraction of failed cells beyond which a sweep aborts
MAX_FAILED_FRACTION = 0.01


class SweepError(RuntimeError):
    def __init__(self, message: str, failures=()):
        super().__init__(message)
        self.failures = tuple(failures)


class Quantity(Enum):
    W_EXT = "wext"
    CHI_I_BETA = "chi-i-beta"
    DELTA_S = "delta-s"
    FIGURE_OF_MERIT = "figure-of-merit"


@dataclass(frozen=True)
class Axis:
    """One sweep axis: parameter name, range and scale."""

    name: str
    start: float
    stop: float
    n: int = 64
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.name not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.name!r}")
        if self.n < 16:
            raise ValueError("axis resolution must be >= 16")
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be 'linear' or 'log'")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log-scale range must be strictly positive")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.n)
        return np.linspace(self.start, self.stop, self.n)

    def to_coord(self, u: np.ndarray) -> np.ndarray:
        """Map scale-space position (log value for log axes) to value."""
        return np.exp(u) if self.scale == "log" else u

    def scale_values(self) -> np.ndarray:
        v = self.values()
        return np.log(v) if self.scale == "log" else v


@dataclass(frozen=True)
class SweepPlan:
    x: Axis
    y: Axis
    fixed: SystemSpec

    def __post_init__(self) -> None:
        if self.x.name == self.y.name:
            raise ValueError("sweep axes must be distinct parameters")
        if "p" in (self.x.name, self.y.name) or \
                "omega_gap" in (self.x.name, self.y.name):
            if self.fixed.qubit is None:
                raise ValueError("qubit axes require a qubit in the spec")


@dataclass
class SweepResult:
    """Grid of one scalar quantity plus derived contours.

    ``grid[i, j]`` belongs to (xs[i], ys[j]); failed cells hold NaN and
    are listed in ``failures`` (a numerical failure is data, never zero).
    """

    plan: SweepPlan
    quantity: Quantity
    xs: np.ndarray
    ys: np.ndarray
    grid: np.ndarray
    zero_contour: list[np.ndarray] = field(default_factory=list)
    betaq_contour: list[np.ndarray] = field(default_factory=list)
    failures: tuple = ()
    metadata: dict = field(default_factory=dict)


def _cell_value(spec: SystemSpec, quantity: Quantity,
                grid: Optional[FrequencyGrid]) -> float:
    if quantity is Quantity.W_EXT:
        return w_ext2(spec, grid)
    if quantity is Quantity.CHI_I_BETA:
        return chi2_at_i_beta(spec, grid)
    if quantity is Quantity.DELTA_S:
        return entropy_production(spec, grid)
    return engine_report(spec, grid).figure_of_merit


def run_sweep(plan: SweepPlan, quantity: Quantity,
              threads: Optional[int] = None,
              grid: Optional[FrequencyGrid] = None) -> SweepResult:
    """Evaluate ``quantity`` over the plan's grid and extract contours.

    Cells failing with a physics/validation error are recorded as NaN;
    more than MAX_FAILED_FRACTION of them aborts with the cell list.
    """
    xs, ys = plan.x.values(), plan.y.values()
    values = np.full((plan.x.n, plan.y.n), np.nan)
    failures: list[tuple[int, int, str]] = []

    def spec_at(x: float, y: float) -> SystemSpec:
        return with_param(with_param(plan.fixed, plan.x.name, x),
                          plan.y.name, y)

    def eval_column(i: int) -> None:
        for j, y in enumerate(ys):
            try:
                values[i, j] = _cell_value(spec_at(xs[i], y), quantity, grid)
            except (ValueError, PerturbativeBreakdownError,
                    ZeroDivisionError) as exc:
                failures.append((i, j, str(exc)))

    n_threads = threads if threads else (os.cpu_count() or 1)
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(eval_column, range(plan.x.n)))
    else:
        for i in range(plan.x.n):
            eval_column(i)

    failures.sort()
    if len(failures) > MAX_FAILED_FRACTION * values.size:
        raise SweepError(
            f"{len(failures)} of {values.size} sweep cells failed",
            failures)

    result = SweepResult(plan=plan, quantity=quantity, xs=xs, ys=ys,
                         grid=values, failures=tuple(failures))

    def center_fn(x: float, y: float) -> float:
        return _cell_value(spec_at(x, y), quantity, grid)

    result.zero_contour = extract_zero_contour(result, center_fn=center_fn)
    result.betaq_contour = beta_q_marker(plan)
    result.metadata = {
        "x": plan.x.name, "y": plan.y.name, "quantity": quantity.value,
        "failed_cells": len(failures),
    }
    return result


def line_scan(parameter: str, values, fixed: SystemSpec,
              quantity: Quantity,
              grid: Optional[FrequencyGrid] = None) -> np.ndarray:
    """1-D scan of ``quantity`` along one parameter."""
    out = np.full(len(values), np.nan)
    for i, val in enumerate(values):
        out[i] = _cell_value(with_param(fixed, parameter, float(val)),
                             quantity, grid)
    return out


# -- marching squares --------------------------------------------------------

# cell corners in (di, dj): 0 = (0,0), 1 = (1,0), 2 = (1,1), 3 = (0,1);
# edge k connects corner k and corner (k+1) % 4
_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))

_SEGMENTS = {
    0b0000: [], 0b1111: [],
    0b0001: [(3, 0)], 0b1110: [(3, 0)],
    0b0010: [(0, 1)], 0b1101: [(0, 1)],
    0b0100: [(1, 2)], 0b1011: [(1, 2)],
    0b1000: [(2, 3)], 0b0111: [(2, 3)],
    0b0011: [(3, 1)], 0b1100: [(3, 1)],
    0b0110: [(0, 2)], 0b1001: [(0, 2)],
    # saddles resolved by the center sample
}


def _edge_key(i: int, j: int, edge: int):
    """Unique identifier of a grid edge, shared by the two adjacent cells."""
    if edge == 0:
        return ("v", i, j)        # (i,j)-(i+1,j)
    if edge == 1:
        return ("h", i + 1, j)    # (i+1,j)-(i+1,j+1)
    if edge == 2:
        return ("v", i, j + 1)    # (i,j+1)-(i+1,j+1)
    return ("h", i, j)            # (i,j)-(i,j+1)


def extract_zero_contour(result: SweepResult,
                         center_fn: Optional[Callable] = None,
                         level: float = 0.0) -> list[np.ndarray]:
    """Marching-squares polylines of ``grid == level`` in axis coordinates.

    Crossing points are linearly interpolated in scale space and computed
    once per grid edge, so adjacent cells share vertices exactly and the
    segments join into chains without tolerance matching.  Cells touching
    NaN are skipped.  No sign change yields an empty list.
    """
    su = result.plan.x.scale_values()
    sv = result.plan.y.scale_values()
    values = result.grid - level
    nx, ny = values.shape

    crossings: dict = {}

    def crossing(kind: str, i: int, j: int) -> Optional[tuple]:
        key = (kind, i, j)
        if key in crossings:
            return crossings[key]
        if kind == "v":
            a, b = values[i, j], values[i + 1, j]
            pa = (su[i], sv[j])
            pb = (su[i + 1], sv[j])
        else:
            a, b = values[i, j], values[i, j + 1]
            pa = (su[i], sv[j])
            pb = (su[i], sv[j + 1])
        if (a > 0.0) == (b > 0.0):
            crossings[key] = None
            return None
        t = a / (a - b)
        point = (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))
        crossings[key] = point
        return point

    adjacency: dict = {}

    def link(k1, k2) -> None:
        adjacency.setdefault(k1, []).append(k2)
        adjacency.setdefault(k2, []).append(k1)

    points: dict = {}
    for i in range(nx - 1):
        for j in range(ny - 1):
            corner_vals = [values[i + di, j + dj] for di, dj in _CORNERS]
            if any(math.isnan(c) for c in corner_vals):
                continue
            code = sum((1 << k) for k, c in enumerate(corner_vals) if c > 0.0)
            if code in _SEGMENTS:
                segments = _SEGMENTS[code]
            else:
                # saddle: pair edges by the sign at the true cell center
                if center_fn is not None:
                    cx = result.plan.x.to_coord(0.5 * (su[i] + su[i + 1]))
                    cy = result.plan.y.to_coord(0.5 * (sv[j] + sv[j + 1]))
                    center = center_fn(float(cx), float(cy)) - level
                else:
                    center = float(np.mean(corner_vals))
                positive_center = center > 0.0
                corner0_positive = corner_vals[0] > 0.0
                if positive_center == corner0_positive:
                    segments = [(0, 1), (2, 3)]
                else:
                    segments = [(3, 0), (1, 2)]
            for e1, e2 in segments:
                k1, k2 = _edge_key(i, j, e1), _edge_key(i, j, e2)
                p1 = crossing(*k1)
                p2 = crossing(*k2)
                if p1 is None or p2 is None:
                    continue
                points[k1], points[k2] = p1, p2
                link(k1, k2)

    chains = _assemble_chains(adjacency)
    polylines = []
    x_axis, y_axis = result.plan.x, result.plan.y
    for chain in chains:
        coords = np.array([points[k] for k in chain])
        coords[:, 0] = x_axis.to_coord(coords[:, 0])
        coords[:, 1] = y_axis.to_coord(coords[:, 1])
        polylines.append(coords)
    return polylines


def _assemble_chains(adjacency: dict) -> list[list]:
    """Walk segment adjacency into open chains, then leftover loops."""
    visited = set()
    chains: list[list] = []

    def walk(start) -> list:
        chain = [start]
        visited.add(start)
        current = start
        while True:
            nxt = [k for k in adjacency[current] if k not in visited]
            if not nxt:
                return chain
            current = nxt[0]
            visited.add(current)
            chain.append(current)

    for node in adjacency:
        if node in visited or len(adjacency[node]) != 1:
            continue
        chains.append(walk(node))
    for node in adjacency:
        if node not in visited:
            loop = walk(node)
            loop.append(loop[0])
            chains.append(loop)
    return chains


# -- qubit-temperature marker ------------------------------------------------

def _marker_curve(xs: np.ndarray, solve) -> list[np.ndarray]:
    """Assemble (x, y) marker segments from a per-x analytic solve.

    ``solve`` returns the y value or NaN when outside the plot range;
    NaN gaps split the polyline.
    """
    segments: list[list] = [[]]
    for x in xs:
        y = solve(float(x))
        if math.isfinite(y):
            segments[-1].append((x, y))
        elif segments[-1]:
            segments.append([])
    return [np.array(s) for s in segments if len(s) >= 2]


def beta_q_marker(plan: SweepPlan, refine: int = 4) -> list[np.ndarray]:
    """Polyline of the matched-temperature condition beta = beta_q.

    Solved analytically per column from whichever axes carry beta, p or
    the gap; empty when the spec has no qubit or the curve misses the
    plotted window.
    """
    spec = plan.fixed
    if spec.qubit is None:
        return []
    names = (plan.x.name, plan.y.name)

    def dense(axis: Axis) -> np.ndarray:
        if axis.scale == "log":
            return np.geomspace(axis.start, axis.stop, axis.n * refine)
        return np.linspace(axis.start, axis.stop, axis.n * refine)

    def in_range(v: float, axis: Axis) -> bool:
        lo, hi = min(axis.start, axis.stop), max(axis.start, axis.stop)
        return lo <= v <= hi

    def bq_at(p: float, gap: float) -> float:
        if not 0.0 < p < 1.0 or gap <= 0.0:
            return math.nan
        return math.log(p / (1.0 - p)) / gap

    p_fixed = spec.qubit.p_ground
    gap_fixed = spec.qubit.omega_gap

    if "beta" in names:
        beta_axis, other_axis = (plan.x, plan.y) if plan.x.name == "beta" \
            else (plan.y, plan.x)

        def solve(other_value: float) -> float:
            p = other_value if other_axis.name == "p" else p_fixed
            gap = other_value if other_axis.name == "omega_gap" else gap_fixed
            bq = bq_at(p, gap)
            return bq if math.isfinite(bq) and in_range(bq, beta_axis) \
                else math.nan

        curves = _marker_curve(dense(other_axis), solve)
        if plan.x.name == "beta":
            curves = [c[:, ::-1] for c in curves]
        return curves

    # beta fixed: solve beta_q(p, gap) = beta along whichever qubit axis
    beta = spec.beta
    if "omega_gap" in names:
        gap_axis, other_axis = (plan.x, plan.y) if plan.x.name == "omega_gap" \
            else (plan.y, plan.x)

        def solve(other_value: float) -> float:
            p = other_value if other_axis.name == "p" else p_fixed
            if not 0.0 < p < 1.0:
                return math.nan
            gap = math.log(p / (1.0 - p)) / beta
            return gap if gap > 0 and in_range(gap, gap_axis) else math.nan

        curves = _marker_curve(dense(other_axis), solve)
        if plan.x.name == "omega_gap":
            curves = [c[:, ::-1] for c in curves]
        return curves

    if "p" in names:
        p_axis, other_axis = (plan.x, plan.y) if plan.x.name == "p" \
            else (plan.y, plan.x)
        # beta_q(p) = beta  <=>  p = 1 / (1 + e^{-beta gap})
        z = beta * gap_fixed
        p_star = 1.0 / (1.0 + math.exp(-z)) if z < 700 else 1.0

        def solve(other_value: float) -> float:
            return p_star if in_range(p_star, p_axis) else math.nan

        curves = _marker_curve(dense(other_axis), solve)
        if plan.x.name == "p":
            curves = [c[:, ::-1] for c in curves]
        return curves

    return []
