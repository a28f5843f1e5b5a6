"""Constructive side of the classification for simple and semisimple algebras.

For A_{n+1} in its standard basis every (n+1)-ary derivation splits uniquely as

    ((h_1 + ... + h_n) id + d_0, h_1 id + d, ..., h_n id + d),   d_0 = -d^T,

and on a direct sum of copies every map preserves the summands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import NaryAlgebra
from .derivations import DerivationTuple, matrix_to_json, solve_nary_derivations, verify_tuple
from .exact import Matrix, RowSpace, format_rational, parse_rational, solve, span_rank


class NotADerivation(ValueError):
    def __init__(self, witness, lhs=None, rhs=None):
        super().__init__(f"tuple is not an (n+1)-ary derivation (fails at {witness})")
        self.witness = witness
        self.lhs = lhs
        self.rhs = rhs


class DecompositionError(ValueError):
    pass


def _require_simple_shape(alg: NaryAlgebra):
    if alg.dim != alg.arity + 1:
        raise ValueError(f"expected an (n+1)-dimensional algebra, got dim {alg.dim} for arity {alg.arity}")


def lemma1_tuple(alg: NaryAlgebra, A: Matrix) -> DerivationTuple:
    """(f_0, f, ..., f) with [f_0] = A (zero diagonal) and [f] = -A^T."""
    _require_simple_shape(alg)
    if A.shape != (alg.dim, alg.dim):
        raise ValueError("matrix size does not match the algebra")
    if any(A[i, i] for i in range(A.rows)):
        raise ValueError("matrix must have zero diagonal")
    return DerivationTuple(A, (-A.T,) * alg.arity)


def qder_tail_from_head(alg: NaryAlgebra, head: Matrix) -> Matrix:
    """Diagonal tail f of the quasi-derivation (f_0, f, ..., f) with diagonal head f_0.

    f^i = (1/n) * sum_j f_0^j - f_0^i.
    """
    _require_simple_shape(alg)
    if head.shape != (alg.dim, alg.dim) or not head.is_diagonal():
        raise ValueError("head must be a diagonal matrix of the algebra's size")
    n = alg.arity
    total = head.trace() / n
    return Matrix.diagonal([total - head[i, i] for i in range(alg.dim)])


@dataclass(frozen=True)
class CanonicalDecomposition:
    h: tuple[Fraction, ...]
    d: Matrix
    d0: Matrix
    residual: DerivationTuple

    @property
    def residual_zero(self) -> bool:
        return self.residual.is_zero()

    def reassemble(self) -> DerivationTuple:
        size = self.d.rows
        ident = Matrix.identity(size)
        head = ident.scale(sum(self.h, Fraction(0))) + self.d0
        return DerivationTuple(head, tuple(ident.scale(x) + self.d for x in self.h))

    def to_json_obj(self) -> dict:
        return {
            "h": [format_rational(x) for x in self.h],
            "d": matrix_to_json(self.d),
            "d0": matrix_to_json(self.d0),
            "residual": "zero" if self.residual_zero else "nonzero",
        }


def decompose(alg: NaryAlgebra, t: DerivationTuple, check: bool = True) -> CanonicalDecomposition:
    """Split a derivation tuple of A_{n+1} into its centroid part and (d_0, d, ..., d)."""
    _require_simple_shape(alg)
    if check:
        res = verify_tuple(alg, t)
        if not res:
            raise NotADerivation(res.witness, res.lhs, res.rhs)
    n, size = alg.arity, alg.dim
    f1 = t.tail[0]
    # unknowns: h_1..h_n, then diag(d)_1..diag(d)_size
    rows, rhs = [], []
    for i, f in enumerate(t.tail):
        for k in range(size):
            row = [0] * (n + size)
            row[i] = 1
            row[n + k] = 1
            rows.append(row)
            rhs.append([f[k, k]])
    for k in range(size):
        row = [1] * n + [0] * size
        row[n + k] = -1
        rows.append(row)
        rhs.append([t.head[k, k]])
    x = solve(Matrix.from_rows(rows), Matrix.from_rows(rhs))
    if x is None:
        raise DecompositionError("diagonal system is inconsistent")
    h = tuple(x[i, 0] for i in range(n))
    entries = [f1[r, c] if r != c else x[n + r, 0] for r in range(size) for c in range(size)]
    d = Matrix(size, size, tuple(entries))
    d0 = -d.T
    dec = CanonicalDecomposition(h, d, d0, DerivationTuple(Matrix.zeros(size), (Matrix.zeros(size),) * n))
    residual = t - dec.reassemble()
    return CanonicalDecomposition(h, d, d0, residual)


@dataclass(frozen=True)
class UniquenessCertificate:
    parametrization_rank: int
    parameter_count: int
    solved_dim: int
    intersection_dim: int

    @property
    def injective(self) -> bool:
        return self.parametrization_rank == self.parameter_count

    @property
    def covers_solved(self) -> bool:
        """Every solved derivation has the normal form."""
        return self.intersection_dim == self.solved_dim

    @property
    def ok(self) -> bool:
        return self.injective and self.covers_solved

    def __bool__(self):
        return self.ok


def parametrization_vectors(alg: NaryAlgebra) -> list[list[Fraction]]:
    """Images of the unit parameters under (h, d) -> normal-form tuple."""
    _require_simple_shape(alg)
    n, size = alg.arity, alg.dim
    ident = Matrix.identity(size)
    zero = Matrix.zeros(size)
    vecs = []
    for i in range(n):
        tail = tuple(ident if j == i else zero for j in range(n))
        vecs.append(DerivationTuple(ident, tail).flatten())
    for r in range(size):
        for c in range(size):
            e = Matrix.unit(size, r, c)
            vecs.append(DerivationTuple(-e.T, (e,) * n).flatten())
    return vecs


def uniqueness_certificate(alg: NaryAlgebra, solved=None) -> UniquenessCertificate:
    """Rank certificate that the normal form exists and is unique.

    The parametrization (h, d) -> tuple must be injective, and the solved
    derivation space must lie inside its image.  The dimension of that
    intersection is the number of derivations the normal form accounts for.
    """
    if solved is None:
        solved = solve_nary_derivations(alg)
    params = parametrization_vectors(alg)
    ncols = len(params[0])
    prank = span_rank(params, ncols)
    svecs = solved.vectors()
    both = RowSpace(ncols)
    for v in params + svecs:
        both.add_fractions(enumerate(v))
    inter = prank + len(svecs) - both.rank
    return UniquenessCertificate(prank, len(params), len(svecs), inter)


@dataclass
class InvarianceViolation:
    map_index: int  # 0 for the head
    block: int
    entry: tuple[int, int]  # 1-based (row, col)
    value: Fraction


@dataclass
class BlockInvarianceReport:
    violations: list[InvarianceViolation]
    decompositions: list[CanonicalDecomposition] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and all(
            dec.residual_zero and (dec.d0 + dec.d.T).is_zero() for dec in self.decompositions)

    def __bool__(self):
        return self.ok

    def to_json_obj(self) -> dict:
        return {
            "invariant": not self.violations,
            "violations": [
                {"map": v.map_index, "block": v.block + 1, "entry": list(v.entry), "value": format_rational(v.value)}
                for v in self.violations
            ],
            "blocks": [dec.to_json_obj() for dec in self.decompositions],
        }


def restrict_tuple(t: DerivationTuple, lo: int, hi: int) -> DerivationTuple:
    def cut(m: Matrix) -> Matrix:
        return Matrix.from_rows([[m[r, c] for c in range(lo, hi)] for r in range(lo, hi)])
    return DerivationTuple(cut(t.head), tuple(cut(f) for f in t.tail))


def check_block_invariance(alg: NaryAlgebra, t: DerivationTuple, check: bool = True) -> BlockInvarianceReport:
    """Every map preserves every summand; then decompose blockwise."""
    if alg.blocks is None:
        raise ValueError("algebra carries no block metadata")
    if check:
        res = verify_tuple(alg, t)
        if not res:
            raise NotADerivation(res.witness, res.lhs, res.rhs)
    violations = []
    for j, f in enumerate(t.maps):
        for c in range(alg.dim):
            b = alg.block_of(c)
            lo, hi = alg.blocks[b]
            for r in range(alg.dim):
                if not lo <= r < hi and f[r, c]:
                    violations.append(InvarianceViolation(j, b, (r + 1, c + 1), f[r, c]))
    if violations:
        return BlockInvarianceReport(violations)
    decs = []
    for lo, hi in alg.blocks:
        decs.append(decompose(alg.restrict(lo, hi), restrict_tuple(t, lo, hi), check=False))
    return BlockInvarianceReport([], decs)


def assemble_blocks(parts: Sequence[DerivationTuple]) -> DerivationTuple:
    """Block-diagonal tuple from per-summand tuples."""
    sizes = [p.head.rows for p in parts]
    total = sum(sizes)
    n = parts[0].arity

    def stack(ms: Sequence[Matrix]) -> Matrix:
        e = [[Fraction(0)] * total for _ in range(total)]
        off = 0
        for m, s in zip(ms, sizes):
            for r in range(s):
                for c in range(s):
                    e[off + r][off + c] = m[r, c]
            off += s
        return Matrix.from_rows(e)

    return DerivationTuple(stack([p.head for p in parts]),
                           tuple(stack([p.tail[i] for p in parts]) for i in range(n)))


def normal_form_tuple(alg: NaryAlgebra, h: Sequence, d: Matrix) -> DerivationTuple:
    """((sum h) id - d^T, h_1 id + d, ..., h_n id + d)."""
    h = [parse_rational(x) for x in h]
    ident = Matrix.identity(alg.dim)
    return DerivationTuple(ident.scale(sum(h, Fraction(0))) - d.T, tuple(ident.scale(x) + d for x in h))
