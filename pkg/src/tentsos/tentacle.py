"""Feasible-set constructions for the relaxation hierarchy.

Each relaxation restricts attention to a semialgebraic subset of R^n chosen
so that the infimum of the target polynomial over the subset matches (or
certifiably bounds) the global infimum.  The sets supported here:

  principal{R}      {x : R - |grad f(x)|^2 |x|^2 >= 0}
  higher{N}         {x : 1 - |grad f(x)|^(2N) (1 + |x|^2)^(N+1) >= 0}
  ball{R}           {x : R^2 - |x|^2 >= 0}
  gradient_variety  {x : grad f(x) = 0}
  none              all of R^n

The first three are described by a single polynomial inequality; the
gradient variety by n polynomial equalities.  Critical points of f belong
to every one of these sets, and the higher sets are nested increasingly in
N inside the principal set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence

from .poly import Polynomial, grad_norm_sq, norm_sq_x

KINDS = ("none", "principal", "higher", "ball", "gradient_variety")

DEFAULT_MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class TentacleSpec:
    """Which constraint set to use, tied to the source polynomial f."""

    kind: str
    f: Polynomial
    radius: Fraction = Fraction(1)  # principal and ball kinds
    order: int = 1                  # higher kind

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown tentacle kind {self.kind!r}")
        if self.kind in ("principal", "ball") and self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.kind == "higher" and self.order < 1:
            raise ValueError("order must be >= 1")


@dataclass
class ConstraintSet:
    """Inequalities g_j(x) >= 0 and equalities h_i(x) = 0 with shared num_vars."""

    num_vars: int
    inequalities: List[Polynomial] = field(default_factory=list)
    equalities: List[Polynomial] = field(default_factory=list)

    def __post_init__(self):
        for p in list(self.inequalities) + list(self.equalities):
            if p.num_vars != self.num_vars:
                raise ValueError("constraint variable count mismatch")


def principal_constraint(f: Polynomial, radius: Fraction = Fraction(1)) -> Polynomial:
    """R - |grad f|^2 |x|^2, the inequality cutting out the principal set.

    A constant f yields the constant R (the set is all of R^n), which is
    flagged with a warning since the relaxation then degenerates.
    """
    radius = Fraction(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    if f.degree() <= 0:
        warnings.warn("principal constraint of a constant polynomial is all of R^n")
    return Polynomial.constant(f.num_vars, radius) - grad_norm_sq(f) * norm_sq_x(f.num_vars)


def higher_constraint(f: Polynomial, order: int) -> Polynomial:
    """1 - (|grad f|^2)^N (1 + |x|^2)^(N+1) for the order-N set."""
    if order < 1:
        raise ValueError("order must be >= 1")
    n = f.num_vars
    one = Polynomial.constant(n, 1)
    return one - (grad_norm_sq(f) ** order) * ((one + norm_sq_x(n)) ** (order + 1))


def ball_constraint(num_vars: int, radius: Fraction) -> Polynomial:
    """R^2 - |x|^2 for the closed origin-centered ball of radius R."""
    radius = Fraction(radius)
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    return Polynomial.constant(num_vars, radius * radius) - norm_sq_x(num_vars)


def gradient_variety_constraints(f: Polynomial) -> ConstraintSet:
    """Equality constraints grad f = 0 (no inequalities)."""
    return ConstraintSet(f.num_vars, inequalities=[], equalities=f.gradient())


def constraint_set(spec: TentacleSpec) -> ConstraintSet:
    """The full constraint description of the set named by ``spec``."""
    f = spec.f
    if spec.kind == "none":
        return ConstraintSet(f.num_vars)
    if spec.kind == "principal":
        return ConstraintSet(f.num_vars, inequalities=[principal_constraint(f, spec.radius)])
    if spec.kind == "higher":
        return ConstraintSet(f.num_vars, inequalities=[higher_constraint(f, spec.order)])
    if spec.kind == "ball":
        return ConstraintSet(f.num_vars, inequalities=[ball_constraint(f.num_vars, spec.radius)])
    return gradient_variety_constraints(f)


def contains(spec: TentacleSpec, point: Sequence[float], tol: float = DEFAULT_MEMBERSHIP_TOL) -> bool:
    """Approximate membership test at floating tolerance ``tol``.

    Inequality kinds accept g(x) >= -tol; the gradient variety requires
    every partial derivative to vanish within tol.
    """
    if len(point) != spec.f.num_vars:
        raise ValueError(
            f"point has {len(point)} coordinates, expected {spec.f.num_vars}"
        )
    if spec.kind == "none":
        return True
    if spec.kind == "gradient_variety":
        return max(abs(p.evaluate(point)) for p in spec.f.gradient()) <= tol
    cs = constraint_set(spec)
    return cs.inequalities[0].evaluate(point) >= -tol


def auto_radius(f: Polynomial) -> Fraction:
    """Heuristic radius max(1, largest |coefficient| of |grad f|^2 |x|^2).

    Useful when the coefficient magnitudes of f are far from 1; off by
    default everywhere.
    """
    product = grad_norm_sq(f) * norm_sq_x(f.num_vars)
    return max(Fraction(1), product.max_abs_coeff())
