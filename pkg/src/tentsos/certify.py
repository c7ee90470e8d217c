"""Certificate extraction and independent verification of solved relaxations.

A solved relaxation yields Gram matrices; eigendecomposing them turns
"f - a = s + t*g + sum p_i h_i" into explicit squared polynomials.  Because
the matrices are floating point, the recovered identity holds only up to a
residual polynomial, which is expanded *exactly* (floats are converted to
rationals without rounding) so its coefficient norm is a hard number, not
an estimate.  A certificate therefore proves

    f >= a - slack   on the constraint set,

with slack controlled by the residual norm; ``sample_soundness`` probes
that inequality on random points of the set.

This module also houses two exact rational identity checks relating
consecutive gradient-tentacle orders (used by the level-inequality tests)
and an optional rational-rounding post-pass that tries to upgrade a
floating certificate to an exact one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .poly import Polynomial
from .sos_sdp import (
    MonomialBasis,
    SosProgram,
    coefficients_polynomial,
    gram_polynomial,
)
from .solver import SdpSolution
from .tentacle import TentacleSpec, constraint_set, contains


class CertificateRejectedError(RuntimeError):
    """A Gram matrix had an eigenvalue below the rejection floor."""


DEFAULT_EIG_FLOOR = 1e-7


@dataclass
class Certificate:
    """Explicit data witnessing "f >= bound - slack" on the constraint set."""

    bound: float
    sos_factors_s: List[Polynomial]
    sos_factors_t: List[Polynomial]
    multiplier: Optional[Polynomial]          # g, when a tentacle/ball block exists
    free_polys: List[Polynomial]              # p_i of the gradient-variety route
    free_multipliers: List[Polynomial]        # the h_i each p_i multiplies
    residual: Polynomial                      # f - bound - (recovered sum), exact
    residual_norm: float

    def to_json_dict(self) -> dict:
        def poly_terms(p: Polynomial) -> list:
            return [[list(m), str(c)] for m, c in p.sorted_terms()]

        return {
            "format": "tentsos-certificate-v1",
            "num_vars": self.residual.num_vars,
            "bound": self.bound,
            "sos_factors_s": [poly_terms(p) for p in self.sos_factors_s],
            "sos_factors_t": [poly_terms(p) for p in self.sos_factors_t],
            "multiplier": poly_terms(self.multiplier) if self.multiplier else None,
            "free_polys": [poly_terms(p) for p in self.free_polys],
            "free_multipliers": [poly_terms(p) for p in self.free_multipliers],
            "residual_norm": self.residual_norm,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @staticmethod
    def from_json_dict(data: dict) -> "Certificate":
        if data.get("format") != "tentsos-certificate-v1":
            raise ValueError("unrecognized certificate format")
        n = data["num_vars"]

        def poly(terms) -> Polynomial:
            return Polynomial(n, {tuple(m): Fraction(c) for m, c in terms})

        s = [poly(t) for t in data["sos_factors_s"]]
        t = [poly(x) for x in data["sos_factors_t"]]
        mult = poly(data["multiplier"]) if data["multiplier"] else None
        free = [poly(x) for x in data["free_polys"]]
        hmul = [poly(x) for x in data["free_multipliers"]]
        cert = Certificate(
            bound=data["bound"],
            sos_factors_s=s,
            sos_factors_t=t,
            multiplier=mult,
            free_polys=free,
            free_multipliers=hmul,
            residual=Polynomial.zero(n),
            residual_norm=data["residual_norm"],
        )
        return cert


def _rationalize_matrix(M: np.ndarray) -> List[List[Fraction]]:
    return [[Fraction(float(x)) for x in row] for row in M]


def gram_factors(
    basis: MonomialBasis, gram: np.ndarray, eig_floor: float
) -> List[Polynomial]:
    """Split v^T M v into squares via the spectral decomposition of M.

    Eigenvalues below -eig_floor reject the certificate; those in
    [-eig_floor, 0] are clamped to zero (solver noise), shrinking the
    recovered sum by at most eig_floor per eigenvector.
    """
    sym = 0.5 * (gram + gram.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    if eigvals[0] < -eig_floor:
        raise CertificateRejectedError(
            f"Gram eigenvalue {eigvals[0]:.3e} below -{eig_floor:.1e}"
        )
    factors = []
    for lam, vec in zip(eigvals, eigvecs.T):
        if lam <= 0.0:
            continue
        coeffs = math.sqrt(lam) * vec
        poly = coefficients_polynomial(
            basis, [Fraction(float(c)) for c in coeffs]
        )
        if not poly.is_zero():
            factors.append(poly)
    return factors


def extract_certificate(
    prog: SosProgram,
    solution: SdpSolution,
    eig_floor: float = DEFAULT_EIG_FLOOR,
) -> Certificate:
    """Turn an optimal solve into an explicit certificate with exact residual."""
    if solution.status != "optimal":
        raise ValueError(
            f"certificates require an optimal solve, got {solution.status!r}"
        )
    n = prog.f.num_vars
    bound = solution.free_scalar
    bound_exact = Fraction(float(bound))

    blocks_factors: List[List[Polynomial]] = []
    for gb, gram in zip(prog.gram_blocks, solution.primal_blocks):
        blocks_factors.append(gram_factors(gb.basis, gram, eig_floor))

    s_factors = blocks_factors[0] if blocks_factors else []
    t_factors = blocks_factors[1] if len(blocks_factors) > 1 else []
    multiplier = prog.gram_blocks[1].multiplier if len(prog.gram_blocks) > 1 else None

    free_polys: List[Polynomial] = []
    free_multipliers: List[Polynomial] = []
    offset = 0
    fv = solution.free_vector
    for fb in prog.free_blocks:
        size = fb.basis.size
        free_polys.append(
            coefficients_polynomial(
                fb.basis, [Fraction(float(c)) for c in fv[offset:offset + size]]
            )
        )
        free_multipliers.append(fb.h)
        offset += size

    recovered = Polynomial.constant(n, bound_exact)
    for q in s_factors:
        recovered = recovered + q * q
    if multiplier is not None:
        t_sum = Polynomial.zero(n)
        for q in t_factors:
            t_sum = t_sum + q * q
        recovered = recovered + t_sum * multiplier
    for p, h in zip(free_polys, free_multipliers):
        recovered = recovered + p * h

    residual = prog.f - recovered
    residual_norm = float(residual.max_abs_coeff())
    return Certificate(
        bound=float(bound),
        sos_factors_s=s_factors,
        sos_factors_t=t_factors,
        multiplier=multiplier,
        free_polys=free_polys,
        free_multipliers=free_multipliers,
        residual=residual,
        residual_norm=residual_norm,
    )


# ---- exact identities between tentacle orders --------------------------------


def univariate_proof_identity(order: int) -> bool:
    """(Z-1)^2 sum_{k<N} (N-k) Z^k  ==  Z^(N+1) - (N+1) Z + N, exactly."""
    if order < 1:
        raise ValueError("order must be >= 1")
    z = Polynomial.variable(1, 0)
    one = Polynomial.constant(1, 1)
    acc = Polynomial.zero(1)
    for k in range(order):
        acc = acc + (order - k) * (z ** k)
    lhs = (z - one) * (z - one) * acc
    rhs = z ** (order + 1) - (order + 1) * z + Polynomial.constant(1, order)
    return lhs == rhs


def verify_hn_identity(order: int) -> bool:
    """Exact check of the bridge between consecutive tentacle orders.

    With b_N := 1 - Y^N (1+X)^(N+1) and z := Y(1+X),

        N b_{N+1} - (N+1) z b_N  ==  z^(N+1) X + (z-1)^2 sum_{k<N} (N-k) z^k.

    Substituting |grad f|^2 for Y and |x|^2 for X turns this into the
    algebraic step that embeds an order-(N+1) representation into order N
    at d extra levels.  Everything here is exact rational arithmetic.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    X = Polynomial.variable(2, 0)
    Y = Polynomial.variable(2, 1)
    one = Polynomial.constant(2, 1)
    z = Y * (one + X)

    def b(N: int) -> Polynomial:
        return one - (Y ** N) * ((one + X) ** (N + 1))

    lhs = order * b(order + 1) - (order + 1) * z * b(order)
    acc = Polynomial.zero(2)
    for k in range(order):
        acc = acc + (order - k) * (z ** k)
    rhs = (z ** (order + 1)) * X + (z - one) * (z - one) * acc
    return lhs == rhs


# ---- sampling-based soundness -------------------------------------------------


@dataclass
class SoundnessReport:
    samples: int
    feasible: int
    violations: int
    worst_margin: float          # most negative f(x) - (bound - slack(x)); >= 0 is clean
    seed: int
    first_violations: List[Tuple[Tuple[float, ...], float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def sample_soundness(
    f: Polynomial,
    cert: Certificate,
    spec: TentacleSpec,
    samples: int = 10000,
    seed: int = 0,
    box: float = 2.0,
    membership_tol: float = 1e-9,
) -> SoundnessReport:
    """Probe "f >= bound - slack" on random points of the constraint set.

    Points are drawn uniformly from [-box, box]^n and filtered by set
    membership.  The slack at x combines the exact residual bound
    residual_norm * (1 + |x|_inf)^(deg residual) with the t*g contribution,
    which can only hurt when g(x) dips below zero within the membership
    tolerance.
    """
    rng = np.random.RandomState(seed)
    n = f.num_vars
    pts = rng.uniform(-box, box, size=(samples, n))
    deg_r = cert.residual.degree()
    deg_r = 0 if deg_r < 0 else int(deg_r)

    g = None
    if cert.multiplier is not None:
        g = cert.multiplier
    feasible = 0
    violations = 0
    worst = np.inf
    first: List[Tuple[Tuple[float, ...], float]] = []
    for row in pts:
        x = tuple(float(v) for v in row)
        if not contains(spec, x, membership_tol):
            continue
        feasible += 1
        slack = cert.residual_norm * (1.0 + max(abs(v) for v in x)) ** deg_r
        if g is not None:
            gval = g.evaluate(x)
            if gval < 0.0:
                tval = sum(q.evaluate(x) ** 2 for q in cert.sos_factors_t)
                slack += abs(tval * gval)
        margin = f.evaluate(x) - (cert.bound - slack)
        worst = min(worst, margin)
        if margin < 0.0:
            violations += 1
            if len(first) < 5:
                first.append((x, margin))
    return SoundnessReport(
        samples=samples,
        feasible=feasible,
        violations=violations,
        worst_margin=float(worst) if feasible else float("nan"),
        seed=seed,
        first_violations=first,
    )


# ---- optional rational rounding ----------------------------------------------


@dataclass
class RationalRounding:
    success: bool
    message: str
    bound: Optional[Fraction] = None


def _exact_ldl_psd(M: List[List[Fraction]]) -> bool:
    """Exact PSD test by fraction-free symmetric elimination with pivoting."""
    n = len(M)
    A = [row[:] for row in M]
    active = list(range(n))
    while active:
        pivot = max(active, key=lambda i: A[i][i])
        if A[pivot][pivot] < 0:
            return False
        if A[pivot][pivot] == 0:
            # a zero pivot requires its whole row to vanish on the active set
            for j in active:
                if A[pivot][j] != 0:
                    return False
            active.remove(pivot)
            continue
        d = A[pivot][pivot]
        active.remove(pivot)
        for i in active:
            r = A[i][pivot] / d
            if r == 0:
                continue
            for j in active:
                A[i][j] -= r * A[pivot][j]
            A[i][pivot] = Fraction(0)
    return True


def round_certificate(
    prog: SosProgram,
    solution: SdpSolution,
    denominator_limit: int = 10 ** 12,
) -> RationalRounding:
    """Attempt an exact rational certificate from a floating solve.

    The Gram matrices are rounded to small rationals and the resulting
    coefficient mismatch is absorbed into the bound (constant term) and
    the diagonal of the leading Gram block where the basis admits it.
    Failure is reported, never raised: an exact certificate at zero slack
    need not exist even when the floating relaxation is tight.
    """
    if solution.status != "optimal":
        return RationalRounding(False, "not an optimal solve")
    if prog.free_blocks:
        return RationalRounding(False, "free polynomial blocks are not rounded")
    n = prog.f.num_vars
    grams = []
    for gb, gram in zip(prog.gram_blocks, solution.primal_blocks):
        sym = 0.5 * (gram + gram.T)
        grams.append(
            [
                [Fraction(float(x)).limit_denominator(denominator_limit) for x in row]
                for row in sym
            ]
        )
    sblock = prog.gram_blocks[0]
    index = sblock.basis.index_map()

    recovered = Polynomial.zero(n)
    for gb, gram in zip(prog.gram_blocks, grams):
        recovered = recovered + gram_polynomial(gb.basis, gram) * gb.multiplier

    # absorb the residual: even monomials 2*beta go to the s diagonal, the
    # constant into the bound; anything else defeats the rounding
    residual = prog.f - recovered
    bound = Fraction(0)
    for mono, coeff in residual.sorted_terms():
        if all(e == 0 for e in mono):
            bound = coeff
            continue
        half = tuple(e // 2 for e in mono)
        if all(e % 2 == 0 for e in mono) and half in index:
            i = index[half]
            grams[0][i][i] += coeff
        else:
            return RationalRounding(
                False, f"residual monomial {mono} cannot be absorbed"
            )
    for gram in grams:
        if not _exact_ldl_psd(gram):
            return RationalRounding(
                False, "rounded Gram matrix is not positive semidefinite"
            )
    return RationalRounding(True, "exact certificate recovered", bound=bound)
