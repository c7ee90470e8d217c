"""Relaxation sequences and their ordering relations.

Five bound families are orchestrated here, all instances of
"maximize a such that f - a lies in a structured cone":

  sos         f - a is a sum of squares                       (level -1)
  principal   f - a = s + t * (R - |grad f|^2 |x|^2)          (deg t <= 2k)
  higher      f - a = s + t * (1 - |grad f|^(2N)(1+|x|^2)^(N+1))
  ball        f - a = s + t * (R^2 - |x|^2)
  gradvar     f - a = s + sum_i p_i df/dx_i                   (deg p_i <= d)

Increasing the level k enlarges the feasible set of the program, so the
optimal values form a nondecreasing chain starting at the plain SOS bound;
``run_hierarchy`` records any numerical violation of that ordering.  An
infeasible program is reported as the value -infinity and an unbounded one
as +infinity; levels whose solve ends in any other non-optimal status carry
value NaN and are excluded from chain comparisons.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .poly import Polynomial
from .sos_sdp import SdpProblem, SosProgram, assemble_sdp, build_gradvar_program, build_sos_program
from .solver import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
    SdpSolution,
    SolverSettings,
    solve_with_backend,
)
from .tentacle import ball_constraint, higher_constraint, principal_constraint

METHODS = ("sos", "principal", "higher", "ball", "gradvar")

STAGNATION_TOL = 1e-6


def chain_tolerance(a: float, b: float) -> float:
    scale = max(abs(v) for v in (a, b) if math.isfinite(v)) if any(
        math.isfinite(v) for v in (a, b)
    ) else 0.0
    return 1e-6 * (1.0 + scale)


@dataclass
class RelaxationResult:
    method: str
    level: int                      # k for the SOS families, d for gradvar, -1 for sos
    value: float                    # finite iff the solve reached optimality
    solution: SdpSolution
    program: SosProgram
    problem: SdpProblem
    wall_time: float
    radius: Optional[Fraction] = None
    order: Optional[int] = None
    note: str = ""

    @property
    def status(self) -> str:
        return self.solution.status

    def summary_dict(self) -> dict:
        return {
            "method": self.method,
            "level": self.level,
            "value": None if math.isnan(self.value) else self.value,
            "status": self.status,
            "gap": self.solution.gap,
            "iterations": self.solution.iterations,
            "wall_time": round(self.wall_time, 6),
            "note": self.note,
        }


def _value_of(solution: SdpSolution) -> float:
    if solution.status == STATUS_OPTIMAL:
        return solution.free_scalar
    if solution.status == STATUS_INFEASIBLE:
        return float("-inf")
    if solution.status == STATUS_UNBOUNDED:
        return float("inf")
    return float("nan")


def _run(
    method: str,
    level: int,
    f: Polynomial,
    program: SosProgram,
    settings: Optional[SolverSettings],
    backend: str,
    radius: Optional[Fraction] = None,
    order: Optional[int] = None,
    note: str = "",
) -> RelaxationResult:
    problem = assemble_sdp(program)
    start = time.perf_counter()
    solution = solve_with_backend(problem, backend, settings or SolverSettings())
    elapsed = time.perf_counter() - start
    return RelaxationResult(
        method=method,
        level=level,
        value=_value_of(solution),
        solution=solution,
        program=program,
        problem=problem,
        wall_time=elapsed,
        radius=radius,
        order=order,
        note=note,
    )


def compute_fsos(
    f: Polynomial,
    settings: Optional[SolverSettings] = None,
    backend: str = "builtin",
) -> RelaxationResult:
    """Plain SOS bound: maximize a with f - a a sum of squares."""
    return _run("sos", -1, f, build_sos_program(f, None, -1), settings, backend)


def compute_principal(
    f: Polynomial,
    k: int,
    radius: Fraction = Fraction(1),
    settings: Optional[SolverSettings] = None,
    backend: str = "builtin",
) -> RelaxationResult:
    """Level-k bound over the principal gradient tentacle of radius R."""
    if k < 0:
        raise ValueError("k must be >= 0")
    g = principal_constraint(f, radius)
    prog = build_sos_program(f, g, k)
    return _run("principal", k, f, prog, settings, backend, radius=Fraction(radius))


def compute_higher(
    f: Polynomial,
    order: int,
    k: int,
    settings: Optional[SolverSettings] = None,
    backend: str = "builtin",
) -> RelaxationResult:
    """Level-k bound over the order-N gradient tentacle."""
    if k < 0:
        raise ValueError("k must be >= 0")
    g = higher_constraint(f, order)
    prog = build_sos_program(f, g, k)
    return _run("higher", k, f, prog, settings, backend, order=order)


def compute_ball(
    f: Polynomial,
    radius: Fraction,
    k: int,
    settings: Optional[SolverSettings] = None,
    backend: str = "builtin",
) -> RelaxationResult:
    """Level-k lower bound for the minimum of f on the closed R-ball."""
    if k < 0:
        raise ValueError("k must be >= 0")
    g = ball_constraint(f.num_vars, radius)
    prog = build_sos_program(f, g, k)
    return _run("ball", k, f, prog, settings, backend, radius=Fraction(radius))


def compute_gradvar(
    f: Polynomial,
    d: int,
    settings: Optional[SolverSettings] = None,
    backend: str = "builtin",
) -> RelaxationResult:
    """Degree-d bound for the infimum of f over its gradient variety.

    Only a valid bound on the global infimum when f attains its minimum;
    the note field carries that caveat.
    """
    note = (
        "assumes the infimum of f is attained; the value bounds f only on "
        "the gradient variety"
    )
    return _run(
        "gradvar", d, f, build_gradvar_program(f, d), settings, backend, note=note
    )


# ---- hierarchy reports ------------------------------------------------------


@dataclass
class HierarchyReport:
    f: Polynomial
    method: str
    results: List[RelaxationResult]
    chain_violations: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def values(self) -> List[float]:
        return [r.value for r in self.results]

    def to_json_dict(self) -> dict:
        return {
            "format": "tentsos-report-v1",
            "polynomial": self.f.to_text(),
            "num_vars": self.f.num_vars,
            "method": self.method,
            "results": [r.summary_dict() for r in self.results],
            "chain_violations": self.chain_violations,
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        lines = [f"method: {self.method}    f = {self.f.to_text()}"]
        lines.append(f"{'level':>6}  {'value':>16}  {'status':>14}  {'gap':>9}  {'time[s]':>8}")
        for r in self.results:
            label = "sos" if r.level == -1 else str(r.level)
            if math.isnan(r.value):
                shown = "n/a"
            elif r.value == float("-inf"):
                shown = "-infinity"
            elif r.value == float("inf"):
                shown = "+infinity"
            else:
                shown = f"{r.value:.8g}"
            lines.append(
                f"{label:>6}  {shown:>16}  {r.status:>14}  {r.solution.gap:9.2e}  {r.wall_time:8.2f}"
            )
        for v in self.chain_violations:
            lines.append(
                f"chain violation: level {v['earlier_level']} -> {v['later_level']} "
                f"drops by {v['magnitude']:.3e}"
            )
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines)


def _chain_check(results: Sequence[RelaxationResult]) -> List[dict]:
    """Later levels must not undercut earlier ones beyond the noise tolerance."""
    violations = []
    comparable = [r for r in results if not math.isnan(r.value)]
    for earlier, later in zip(comparable, comparable[1:]):
        a, b = earlier.value, later.value
        if a == float("-inf") or b == float("inf"):
            continue
        if b == float("-inf") and a != float("-inf"):
            violations.append(
                {
                    "earlier_level": earlier.level,
                    "later_level": later.level,
                    "magnitude": float("inf"),
                }
            )
            continue
        if b < a - chain_tolerance(a, b):
            violations.append(
                {
                    "earlier_level": earlier.level,
                    "later_level": later.level,
                    "magnitude": a - b,
                }
            )
    return violations


def run_hierarchy(
    f: Polynomial,
    method: str = "principal",
    levels: Sequence[int] = (0, 1, 2),
    settings: Optional[SolverSettings] = None,
    radius: Fraction = Fraction(1),
    order: int = 1,
    include_sos: Optional[bool] = None,
    backend: str = "builtin",
    level_settings: Optional[dict] = None,
) -> HierarchyReport:
    """Solve the requested levels and validate the ordering chain.

    ``include_sos`` prepends the plain SOS bound (defaults to on for the
    tentacle families, off for ball and gradvar).  ``level_settings`` may
    override the solver settings per level (key -1 is the SOS bound).
    Solver errors at one level are recorded in that level's result; the
    report is produced regardless.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method != "sos" and not levels:
        raise ValueError("levels must be nonempty")
    if include_sos is None:
        include_sos = method in ("principal", "higher")

    def settings_for(level: int) -> Optional[SolverSettings]:
        if level_settings and level in level_settings:
            return level_settings[level]
        return settings

    results: List[RelaxationResult] = []
    notes: List[str] = []
    if method == "sos" or include_sos:
        results.append(compute_fsos(f, settings_for(-1), backend))
    if method != "sos":
        for level in sorted(set(int(x) for x in levels)):
            st = settings_for(level)
            if method == "principal":
                results.append(compute_principal(f, level, radius, st, backend))
            elif method == "higher":
                results.append(compute_higher(f, order, level, st, backend))
            elif method == "ball":
                results.append(compute_ball(f, radius, level, st, backend))
            else:
                results.append(compute_gradvar(f, level, st, backend))

    finite = [r.value for r in results if math.isfinite(r.value)]
    stagnant = 0
    for a, b in zip(finite, finite[1:]):
        if abs(b - a) < STAGNATION_TOL:
            stagnant += 1
            if stagnant >= 2:
                notes.append(
                    "successive values stagnated (|delta| < 1e-6 twice); "
                    "informational only, no convergence is inferred"
                )
                break
        else:
            stagnant = 0
    if method in ("principal", "higher"):
        notes.append(
            "tentacle values bound the global infimum only when f is bounded "
            "from below; otherwise they converge to the infimum over the "
            "tentacle set"
        )
    if method == "gradvar":
        notes.append(
            "gradient-variety values assume the minimum of f is attained; "
            "for f bounded below without a minimizer the reported value can "
            "exceed the global infimum"
        )

    return HierarchyReport(
        f=f,
        method=method,
        results=results,
        chain_violations=_chain_check(results),
        notes=notes,
    )


# ---- relations between tentacle orders --------------------------------------


@dataclass
class LevelInequalityReport:
    order: int
    k: int
    half_degree: int
    lhs: RelaxationResult            # order N+1, level k
    rhs: RelaxationResult            # order N,   level k+d
    holds: bool
    margin: float

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "k": self.k,
            "half_degree": self.half_degree,
            "lhs_value": self.lhs.value,
            "rhs_value": self.rhs.value,
            "holds": self.holds,
            "margin": self.margin,
        }


def check_level_inequality(
    f: Polynomial,
    order: int,
    k: int,
    settings: Optional[SolverSettings] = None,
    backend: str = "builtin",
) -> LevelInequalityReport:
    """Verify that the order-(N+1) level-k bound never beats order N at k+d.

    d is half the (even ceiling of the) degree of f.  Moving one order up
    at fixed k can always be simulated d extra levels later at the lower
    order, so lhs <= rhs up to solver noise.
    """
    deg = f.degree()
    deg = 0 if deg < 0 else int(deg)
    d = (deg + 1) // 2
    lhs = compute_higher(f, order + 1, k, settings, backend)
    rhs = compute_higher(f, order, k + d, settings, backend)
    if math.isnan(lhs.value) or math.isnan(rhs.value):
        holds = False
        margin = float("nan")
    else:
        margin = rhs.value - lhs.value
        holds = lhs.value <= rhs.value + chain_tolerance(lhs.value, rhs.value)
    return LevelInequalityReport(
        order=order,
        k=k,
        half_degree=d,
        lhs=lhs,
        rhs=rhs,
        holds=holds,
        margin=margin,
    )
