"""Translation of sums-of-squares programs into standard-form block SDPs.

A relaxation "maximize a subject to f - a = s + t*g (+ sum_i p_i h_i)" with
s, t sums of squares is parametrized by Gram matrices: s = v_s^T M_s v_s and
t = v_t^T M_t v_t over monomial basis vectors, with M_s, M_t positive
semidefinite, plus unconstrained coefficient vectors for the free
multipliers p_i.  Matching the coefficient of every monomial up to the
even matching degree D yields one linear equality per monomial, which is
the standard-form SDP assembled here.

All assembly is exact rational arithmetic; numbers become floats only
inside the solver.  Before assembly, f and every multiplier polynomial are
normalized by their largest absolute coefficient (recorded, and undone when
solutions are mapped back), which keeps the SDP data around unit scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import Exponent, Polynomial, grlex_key

# ---- monomial bases --------------------------------------------------------


@dataclass(frozen=True)
class MonomialBasis:
    """All monomials of total degree <= max_degree, graded lex order."""

    num_vars: int
    max_degree: int
    entries: Tuple[Exponent, ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def index_map(self) -> Dict[Exponent, int]:
        return {mono: i for i, mono in enumerate(self.entries)}


def _exponents_of_degree(num_vars: int, total: int) -> List[Exponent]:
    if num_vars == 1:
        return [(total,)]
    out: List[Exponent] = []
    for first in range(total, -1, -1):
        for rest in _exponents_of_degree(num_vars - 1, total - first):
            out.append((first,) + rest)
    return out


def monomial_basis(num_vars: int, max_degree: int) -> MonomialBasis:
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    entries: List[Exponent] = []
    for total in range(max_degree + 1):
        entries.extend(_exponents_of_degree(num_vars, total))
    entries.sort(key=grlex_key)
    return MonomialBasis(num_vars, max_degree, tuple(entries))


# ---- symbolic programs -----------------------------------------------------


@dataclass(frozen=True)
class GramBlock:
    """One SOS summand: multiplier * (v^T M v) with v over ``basis``."""

    multiplier: Polynomial
    basis: MonomialBasis


@dataclass(frozen=True)
class FreeBlock:
    """One free-polynomial summand p*h with p's coefficients over ``basis``."""

    h: Polynomial
    basis: MonomialBasis


@dataclass(frozen=True)
class SosProgram:
    """Symbolic relaxation data prior to SDP assembly."""

    f: Polynomial
    gram_blocks: Tuple[GramBlock, ...]
    free_blocks: Tuple[FreeBlock, ...]
    matching_degree: int

    def __post_init__(self):
        if self.matching_degree % 2 != 0:
            raise ValueError("matching degree must be even")
        fdeg = self.f.degree()
        if fdeg > self.matching_degree:
            raise ValueError("matching degree below deg f")
        for block in self.gram_blocks:
            d = block.multiplier.degree()
            d = 0 if d < 0 else int(d)
            if d + 2 * block.basis.max_degree > self.matching_degree:
                raise ValueError("gram block degree exceeds matching degree")
        for block in self.free_blocks:
            d = block.h.degree()
            d = 0 if d < 0 else int(d)
            if d + block.basis.max_degree > self.matching_degree:
                raise ValueError("free block degree exceeds matching degree")


def _even_ceiling(value) -> int:
    if value is None or value < 0:
        return 0
    v = int(value)
    return v if v % 2 == 0 else v + 1


def build_sos_program(
    f: Polynomial, g: Optional[Polynomial] = None, k: int = -1
) -> SosProgram:
    """Program for "max a : f - a = s + t*g, deg t <= 2k".

    k = -1 requests the plain SOS bound (no multiplier block, t absent).
    The matching degree D is the even ceiling of max(deg f, deg g + 2k) and
    the s-basis has degree D/2, the smallest degree-consistent choice.  A
    zero Gram matrix for t is feasible, so the k-level feasible set always
    contains the (k-1)-level one.
    """
    if k < -1:
        raise ValueError("k must be >= -1")
    if k >= 0 and g is None:
        raise ValueError("a multiplier polynomial is required when k >= 0")
    n = f.num_vars
    one = Polynomial.constant(n, 1)
    if k == -1:
        D = _even_ceiling(f.degree())
        blocks = (GramBlock(one, monomial_basis(n, D // 2)),)
    else:
        if g.num_vars != n:
            raise ValueError("multiplier variable count mismatch")
        gdeg = 0 if g.degree() < 0 else int(g.degree())
        D = _even_ceiling(max(_even_ceiling(f.degree()), gdeg + 2 * k))
        blocks = (
            GramBlock(one, monomial_basis(n, D // 2)),
            GramBlock(g, monomial_basis(n, k)),
        )
    return SosProgram(f, blocks, (), D)


def build_gradvar_program(f: Polynomial, d: int = 0) -> SosProgram:
    """Program for "max a : f - a = s + sum_i p_i * df/dx_i, deg p_i <= d"."""
    if d < 0:
        raise ValueError("d must be >= 0")
    n = f.num_vars
    fdeg = 0 if f.degree() < 0 else int(f.degree())
    D = _even_ceiling(max(fdeg, d + max(fdeg - 1, 0)))
    sblock = GramBlock(Polynomial.constant(n, 1), monomial_basis(n, D // 2))
    free = tuple(
        FreeBlock(h, monomial_basis(n, d)) for h in f.gradient()
    )
    return SosProgram(f, (sblock,), free, D)


# ---- assembled SDP ---------------------------------------------------------


@dataclass
class BlockData:
    """Constraint data of one PSD block.

    ``triplets`` holds (constraint_row, p, q, value) with p <= q; an
    off-diagonal triplet stands for the symmetric pair of entries.  The
    coefficient matrix A_row of a constraint satisfies
    <A_row, M> = coefficient of the row's monomial in multiplier * v^T M v.
    ``unscale`` maps a solved Gram matrix back to user scale.
    """

    dim: int
    triplets: List[Tuple[int, int, int, Fraction]]
    unscale: Fraction


@dataclass
class SdpProblem:
    """Standard-form block SDP: one equality per monomial, objective max a.

    Row semantics (user scale aside): for constraint row i with monomial
    alpha,

        sum_j <A_{i,j}, M_j> + sum_t F[i,t] u_t = rhs_i + a_coeff_i * a

    where a_coeff_i is -1 on the constant-monomial row and 0 elsewhere
    (the right-hand side is the coefficient vector of f - a).  The solver
    maximizes a over PSD M_j and free u.
    """

    num_vars: int
    matching_degree: int
    constraint_monomials: List[Exponent]
    rhs: List[Fraction]
    a_row: int
    blocks: List[BlockData]
    num_free: int
    free_entries: List[Tuple[int, int, Fraction]]
    free_unscale: List[Fraction]
    objective_scale: Fraction

    @property
    def num_constraints(self) -> int:
        return len(self.constraint_monomials)

    @property
    def block_dims(self) -> List[int]:
        return [b.dim for b in self.blocks]

    def a_coeff(self, row: int) -> int:
        return -1 if row == self.a_row else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SdpProblem):
            return NotImplemented
        return self.to_json_dict() == other.to_json_dict()

    # ---- serialization ----

    def to_json_dict(self) -> dict:
        return {
            "format": "tentsos-sdp-v1",
            "num_vars": self.num_vars,
            "matching_degree": self.matching_degree,
            "constraint_monomials": [list(m) for m in self.constraint_monomials],
            "rhs": [str(x) for x in self.rhs],
            "a_row": self.a_row,
            "a_coeff": -1,
            "objective": "maximize_a",
            "objective_scale": str(self.objective_scale),
            "blocks": [
                {
                    "dim": b.dim,
                    "unscale": str(b.unscale),
                    "triplets": [[i, p, q, str(v)] for (i, p, q, v) in b.triplets],
                }
                for b in self.blocks
            ],
            "free": {
                "num_cols": self.num_free,
                "unscale": [str(x) for x in self.free_unscale],
                "entries": [[i, t, str(v)] for (i, t, v) in self.free_entries],
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @staticmethod
    def from_json_dict(data: dict) -> "SdpProblem":
        if data.get("format") != "tentsos-sdp-v1":
            raise ValueError("unrecognized SDP serialization format")
        return SdpProblem(
            num_vars=data["num_vars"],
            matching_degree=data["matching_degree"],
            constraint_monomials=[tuple(m) for m in data["constraint_monomials"]],
            rhs=[Fraction(x) for x in data["rhs"]],
            a_row=data["a_row"],
            blocks=[
                BlockData(
                    dim=b["dim"],
                    triplets=[
                        (int(i), int(p), int(q), Fraction(v))
                        for (i, p, q, v) in b["triplets"]
                    ],
                    unscale=Fraction(b["unscale"]),
                )
                for b in data["blocks"]
            ],
            num_free=data["free"]["num_cols"],
            free_entries=[
                (int(i), int(t), Fraction(v)) for (i, t, v) in data["free"]["entries"]
            ],
            free_unscale=[Fraction(x) for x in data["free"]["unscale"]],
            objective_scale=Fraction(data["objective_scale"]),
        )

    @staticmethod
    def from_json(text: str) -> "SdpProblem":
        return SdpProblem.from_json_dict(json.loads(text))


def _norm_scale(p: Polynomial) -> Fraction:
    c = p.max_abs_coeff()
    return c if c > 0 else Fraction(1)


def assemble_sdp(prog: SosProgram) -> SdpProblem:
    """Exact coefficient-matching assembly of ``prog`` into an SdpProblem."""
    f = prog.f
    n = f.num_vars
    D = prog.matching_degree
    cons_basis = monomial_basis(n, D)
    index = cons_basis.index_map()
    monos = list(cons_basis.entries)

    f_scale = _norm_scale(f)
    rhs = [f.coefficient(mono) / f_scale for mono in monos]
    a_row = index[(0,) * n]

    blocks: List[BlockData] = []
    for gb in prog.gram_blocks:
        g_scale = _norm_scale(gb.multiplier)
        g_terms = sorted(gb.multiplier.terms.items(), key=lambda t: grlex_key(t[0]))
        entries = list(gb.basis.entries)
        triplets: List[Tuple[int, int, int, Fraction]] = []
        for p, beta in enumerate(entries):
            for q in range(p, len(entries)):
                gamma = entries[q]
                base = tuple(b + c for b, c in zip(beta, gamma))
                for delta, coeff in g_terms:
                    alpha = tuple(b + d for b, d in zip(base, delta))
                    triplets.append((index[alpha], p, q, coeff / g_scale))
        blocks.append(BlockData(len(entries), triplets, f_scale / g_scale))

    free_entries: List[Tuple[int, int, Fraction]] = []
    free_unscale: List[Fraction] = []
    col = 0
    for fb in prog.free_blocks:
        h_scale = _norm_scale(fb.h)
        h_terms = sorted(fb.h.terms.items(), key=lambda t: grlex_key(t[0]))
        for delta in fb.basis.entries:
            for eps, coeff in h_terms:
                alpha = tuple(d + e for d, e in zip(delta, eps))
                free_entries.append((index[alpha], col, coeff / h_scale))
            free_unscale.append(f_scale / h_scale)
            col += 1

    return SdpProblem(
        num_vars=n,
        matching_degree=D,
        constraint_monomials=monos,
        rhs=rhs,
        a_row=a_row,
        blocks=blocks,
        num_free=col,
        free_entries=free_entries,
        free_unscale=free_unscale,
        objective_scale=f_scale,
    )


# ---- mapping solutions back to polynomials ---------------------------------


def gram_polynomial(basis: MonomialBasis, gram: Sequence[Sequence[Fraction]]) -> Polynomial:
    """Exact expansion of v^T M v for a rational symmetric matrix M."""
    n = basis.num_vars
    terms: Dict[Exponent, Fraction] = {}
    entries = basis.entries
    k = len(entries)
    for p in range(k):
        for q in range(k):
            c = Fraction(gram[p][q])
            if c == 0:
                continue
            mono = tuple(a + b for a, b in zip(entries[p], entries[q]))
            terms[mono] = terms.get(mono, Fraction(0)) + c
    return Polynomial(n, terms)


def coefficients_polynomial(basis: MonomialBasis, coeffs: Sequence) -> Polynomial:
    """Polynomial with the given coefficient vector over ``basis``."""
    terms: Dict[Exponent, Fraction] = {}
    for mono, c in zip(basis.entries, coeffs):
        frac = Fraction(c) if not isinstance(c, float) else Fraction(c)
        if frac != 0:
            terms[mono] = frac
    return Polynomial(basis.num_vars, terms)


def reconstruct_polynomial(
    prog: SosProgram,
    bound: Fraction,
    gram_matrices: Sequence[Sequence[Sequence[Fraction]]],
    free_vector: Sequence[Fraction] = (),
) -> Polynomial:
    """a + sum_j (v^T M_j v) g_j + sum_i p_i h_i, expanded exactly.

    This is the right-hand side of the relaxation identity; a feasible
    solution makes it coincide with f up to solver tolerance.  Inputs are
    user-scale quantities (apply ``unscale_gram_matrices`` first when coming
    directly from the solver).
    """
    n = prog.f.num_vars
    total = Polynomial.constant(n, Fraction(bound))
    for gb, gram in zip(prog.gram_blocks, gram_matrices):
        total = total + gram_polynomial(gb.basis, gram) * gb.multiplier
    offset = 0
    for fb in prog.free_blocks:
        size = fb.basis.size
        p_i = coefficients_polynomial(fb.basis, free_vector[offset:offset + size])
        total = total + p_i * fb.h
        offset += size
    return total
