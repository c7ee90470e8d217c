"""Brute-force ground truth for desk-scale verification.

Nothing here knows about SDPs: minima are estimated by exhaustive grid
search and seeded multistart gradient descent, so these values are an
independent check on the relaxation bounds.  Grid minima always
over-estimate the true minimum (they sample), hence every sound lower
bound must sit below them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .poly import Polynomial
from .tentacle import TentacleSpec, constraint_set

GRID_BUDGET = 10 ** 8


class BudgetExceededError(RuntimeError):
    """Grid size beyond the evaluation budget."""


class EmptyFeasibleGridError(RuntimeError):
    """No grid point satisfied the constraint-set membership test."""


@dataclass(frozen=True)
class Box:
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("bound dimension mismatch")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("lower bound exceeds upper bound")

    @staticmethod
    def cube(num_vars: int, half_width: float = 5.0) -> "Box":
        return Box((-half_width,) * num_vars, (half_width,) * num_vars)

    @property
    def num_vars(self) -> int:
        return len(self.lower)

    def contains(self, point: Sequence[float]) -> bool:
        return all(
            lo - 1e-12 <= x <= hi + 1e-12
            for lo, x, hi in zip(self.lower, point, self.upper)
        )


@dataclass
class OracleResult:
    min_value: float
    argmin: Tuple[float, ...]
    points_evaluated: int


def evaluate_on_points(f: Polynomial, pts: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on an (N, n) array of points."""
    vals = np.zeros(pts.shape[0])
    for mono, coeff in f.sorted_terms():
        term = np.full(pts.shape[0], float(coeff))
        for i, e in enumerate(mono):
            if e:
                term = term * pts[:, i] ** e
        vals += term
    return vals


def _grid_chunks(box: Box, resolution: int) -> Iterator[np.ndarray]:
    """Yield the full grid in row-chunks (first axis sliced)."""
    axes = [
        np.linspace(lo, hi, resolution) for lo, hi in zip(box.lower, box.upper)
    ]
    n = box.num_vars
    per_slice = resolution ** (n - 1)
    rows_per_chunk = max(1, int(2_000_000 // per_slice))
    for start in range(0, resolution, rows_per_chunk):
        stop = min(resolution, start + rows_per_chunk)
        mesh = np.meshgrid(axes[0][start:stop], *axes[1:], indexing="ij")
        yield np.stack([m.ravel() for m in mesh], axis=1)


def grid_min(f: Polynomial, box: Box, resolution: int) -> OracleResult:
    """Exhaustive evaluation over a regular grid; deterministic argmin."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    n = box.num_vars
    if n != f.num_vars:
        raise ValueError("box dimension mismatch")
    if resolution ** n > GRID_BUDGET:
        raise BudgetExceededError(
            f"{resolution}^{n} grid points exceed the budget {GRID_BUDGET:.0e}"
        )
    best_val = math.inf
    best_pt: Optional[Tuple[float, ...]] = None
    count = 0
    for pts in _grid_chunks(box, resolution):
        vals = evaluate_on_points(f, pts)
        count += pts.shape[0]
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_pt = tuple(float(v) for v in pts[i])
    return OracleResult(best_val, best_pt, count)


def tentacle_grid_min(
    f: Polynomial,
    spec: TentacleSpec,
    box: Box,
    resolution: int,
    membership_tol: float = 1e-9,
) -> OracleResult:
    """Grid minimum restricted to the constraint set of ``spec``."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    n = box.num_vars
    if n != f.num_vars:
        raise ValueError("box dimension mismatch")
    if resolution ** n > GRID_BUDGET:
        raise BudgetExceededError(
            f"{resolution}^{n} grid points exceed the budget {GRID_BUDGET:.0e}"
        )
    cs = constraint_set(spec)
    best_val = math.inf
    best_pt: Optional[Tuple[float, ...]] = None
    count = 0
    for pts in _grid_chunks(box, resolution):
        mask = np.ones(pts.shape[0], dtype=bool)
        for g in cs.inequalities:
            mask &= evaluate_on_points(g, pts) >= -membership_tol
        for h in cs.equalities:
            mask &= np.abs(evaluate_on_points(h, pts)) <= membership_tol
        count += pts.shape[0]
        if not mask.any():
            continue
        sub = pts[mask]
        vals = evaluate_on_points(f, sub)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_pt = tuple(float(v) for v in sub[i])
    if best_pt is None:
        raise EmptyFeasibleGridError("no grid point lies in the constraint set")
    return OracleResult(best_val, best_pt, count)


ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5


def multistart_descent(
    f: Polynomial,
    box: Box,
    starts: int = 20,
    max_steps: int = 500,
    seed: int = 0,
) -> OracleResult:
    """Gradient descent with backtracking line search from seeded starts.

    Iterates are clipped to the box so the reported argmin stays inside it.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    n = box.num_vars
    if n != f.num_vars:
        raise ValueError("box dimension mismatch")
    rng = np.random.RandomState(seed)
    grads = f.gradient()
    lo = np.array(box.lower)
    hi = np.array(box.upper)
    best_val = math.inf
    best_pt: Optional[Tuple[float, ...]] = None
    evaluated = 0

    for _ in range(starts):
        x = rng.uniform(lo, hi)
        fx = f.evaluate(x)
        evaluated += 1
        for _ in range(max_steps):
            g = np.array([p.evaluate(x) for p in grads])
            gnorm2 = float(g @ g)
            if gnorm2 < 1e-24:
                break
            step = 1.0
            moved = False
            while step > 1e-16:
                trial = np.clip(x - step * g, lo, hi)
                ft = f.evaluate(trial)
                evaluated += 1
                if ft <= fx - ARMIJO_C * step * gnorm2:
                    x, fx = trial, ft
                    moved = True
                    break
                step *= ARMIJO_SHRINK
            if not moved:
                break
        if fx < best_val:
            best_val = float(fx)
            best_pt = tuple(float(v) for v in x)
    return OracleResult(best_val, best_pt, evaluated)


# ---- the asymptotic-curve check ----------------------------------------------


@dataclass
class CurveLimitReport:
    """Evaluations along the escaping curve of the squared cubic h^2.

    For h = X + X^2 Y + X^4 Y Z and gamma(s) = (s, 2a/s^2, -(1+s/(4a))/(2s^2)),
    the partial dh/dX vanishes identically along gamma, f = h^2 approaches a^2,
    and |grad f|^2 |gamma|^2 approaches (16a^2+1) a^2 (1/4+4a^2) < 1 for small
    a: the membership product stays bounded while f converges to a positive
    level, so arbitrarily many positive asymptotic values occur on the set.
    """

    a: float
    s: float
    f_value: float
    f_closed_form: float         # (3s/4 + a)^2
    f_limit: float               # a^2
    product_value: float         # |grad f|^2(gamma) * |gamma|^2, evaluated
    product_closed_form: float   # exact finite-s formula
    product_limit: float         # (16a^2+1) a^2 (1/4 + 4a^2)
    dh_dx_on_curve: float

    @property
    def f_matches_closed_form(self) -> bool:
        return abs(self.f_value - self.f_closed_form) <= 1e-10 * abs(self.f_closed_form)

    @property
    def product_matches_limit(self) -> bool:
        return abs(self.product_value - self.product_limit) <= 1e-4


def escaping_curve_polynomial() -> Polynomial:
    x = Polynomial.variable(3, 0)
    y = Polynomial.variable(3, 1)
    z = Polynomial.variable(3, 2)
    h = x + x * x * y + (x ** 4) * y * z
    return h * h


def curve_limit_check(
    a_values: Sequence[float] = (0.05, 0.1), s: float = 1e-3
) -> List[CurveLimitReport]:
    """Evaluate f = h^2 and the membership product along the escaping curve.

    The squared gradient norm is evaluated componentwise (each partial
    derivative separately, then squared): the fully expanded product
    polynomial cancels catastrophically at the curve's large coordinates.
    """
    x = Polynomial.variable(3, 0)
    y = Polynomial.variable(3, 1)
    z = Polynomial.variable(3, 2)
    h = x + x * x * y + (x ** 4) * y * z
    f = h * h
    grads = f.gradient()
    dh_dx = h.partial(0)

    reports = []
    for a in a_values:
        gamma = (s, 2.0 * a / s ** 2, -(1.0 + s / (4.0 * a)) / (2.0 * s ** 2))
        norm2 = sum(c * c for c in gamma)
        f_val = f.evaluate(gamma)
        gsq_val = sum(p.evaluate(gamma) ** 2 for p in grads)
        prod_val = gsq_val * norm2
        f_cf = (0.75 * s + a) ** 2
        prod_cf = (
            (4.0 * s ** 6 + 16.0 * a ** 2 + (1.0 + s / (4.0 * a)) ** 2)
            * f_cf
            * ((0.5 - s / (8.0 * a)) ** 2 + 4.0 * a ** 2)
        )
        reports.append(
            CurveLimitReport(
                a=a,
                s=s,
                f_value=f_val,
                f_closed_form=f_cf,
                f_limit=a * a,
                product_value=prod_val,
                product_closed_form=prod_cf,
                product_limit=(16.0 * a ** 2 + 1.0) * a ** 2 * (0.25 + 4.0 * a ** 2),
                dh_dx_on_curve=dh_dx.evaluate(gamma),
            )
        )
    return reports
