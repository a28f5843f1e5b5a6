"""Operator spaces as matrix Lie algebras under the commutator.

Provides closure, the center (annihilator), the quotient by the center and a
Killing-form diagnostic for it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import CheckResult, NaryAlgebra
from .derivations import solve_gder
from .exact import Matrix, RowSpace, format_rational, span_rank

Endo = Matrix
Sparse = dict  # {index: Fraction}


class SpanCoordinates:
    """Coordinates of vectors with respect to a fixed independent list."""

    def __init__(self, vectors: Sequence[Sequence[Fraction]], ncols: int):
        k = len(vectors)
        self.ncols = ncols
        self.size = k
        rs = RowSpace(ncols + k)
        for i, v in enumerate(vectors):
            row = [(c, x) for c, x in enumerate(v) if x]
            row.append((ncols + i, Fraction(1)))
            rs.add_fractions(row)
        rows, pivots = rs.rref_rows()
        if any(p >= ncols for p in pivots):
            raise ValueError("vectors are linearly dependent")
        self._rows = rows
        self._pivots = pivots

    def coords(self, w: Sequence[Fraction]) -> Sparse | None:
        """Sparse coordinates of w, or None when w is outside the span."""
        residual = {c: x for c, x in enumerate(w) if x}
        out: Sparse = {}
        for r, p in zip(self._rows, self._pivots):
            a = residual.get(p)
            if not a:
                continue
            for c, x in r.items():
                if c < self.ncols:
                    y = residual.get(c, 0) - a * x
                    if y:
                        residual[c] = y
                    else:
                        residual.pop(c, None)
                else:
                    i = c - self.ncols
                    y = out.get(i, 0) + a * x
                    if y:
                        out[i] = y
                    else:
                        out.pop(i, None)
        if residual:
            return None
        return out


@dataclass
class LiePresentation:
    basis: tuple[Endo, ...]
    # consts[i][j] = coordinates of [x_i, x_j]
    consts: list[list[Sparse]]
    extended: bool = False

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.basis[0].rows if self.basis else 0

    def element(self, coords: Sparse | Sequence[Fraction]) -> Endo:
        if not isinstance(coords, dict):
            coords = {i: c for i, c in enumerate(coords) if c}
        d = self.size
        acc = [Fraction(0)] * (d * d)
        for i, c in coords.items():
            for p, x in enumerate(self.basis[i].entries):
                if x:
                    acc[p] += c * x
        return Matrix(d, d, tuple(acc))

    def bracket(self, a: Sparse, b: Sparse) -> Sparse:
        out: Sparse = {}
        for i, x in a.items():
            for j, y in b.items():
                for k, c in self.consts[i][j].items():
                    v = out.get(k, 0) + x * y * c
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
        return out


def _flat(ms: Sequence[Endo]) -> list[tuple[Fraction, ...]]:
    return [m.entries for m in ms]


def close_under_bracket(basis: Sequence[Endo]) -> LiePresentation:
    """Lie algebra generated by a linearly independent list of matrices."""
    current = list(basis)
    if not current:
        return LiePresentation((), [], False)
    d = current[0].rows
    ncols = d * d
    if span_rank(_flat(current), ncols) != len(current):
        raise ValueError("basis is not linearly independent")
    extended = False
    done = 0  # pairs (i, j) with j < done are known to be in span
    while True:
        coords = SpanCoordinates(_flat(current), ncols)
        new = []
        rs = RowSpace(ncols)
        for m in current:
            rs.add_fractions(enumerate(m.entries))
        k = len(current)
        for i in range(k):
            for j in range(max(i + 1, done), k):
                c = current[i].commutator(current[j])
                if coords.coords(c.entries) is None and rs.add_fractions(enumerate(c.entries)):
                    new.append(c)
        if not new:
            break
        extended = True
        done = k
        current.extend(new)
        if len(current) > ncols:
            raise RuntimeError("closure exceeded the ambient dimension")
    coords = SpanCoordinates(_flat(current), ncols)
    k = len(current)
    consts: list[list[Sparse]] = [[{} for _ in range(k)] for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            c = coords.coords(current[i].commutator(current[j]).entries)
            consts[i][j] = c
            consts[j][i] = {a: -x for a, x in c.items()}
    return LiePresentation(tuple(current), consts, extended)


def check_antisymmetry(L: LiePresentation) -> CheckResult:
    for i in range(L.dim):
        if L.consts[i][i]:
            return CheckResult(False, (i, i))
        for j in range(i + 1, L.dim):
            if L.consts[j][i] != {k: -c for k, c in L.consts[i][j].items()}:
                return CheckResult(False, (i, j))
    return CheckResult(True)


def check_jacobi(L: LiePresentation) -> CheckResult:
    """[[x,y],z] + [[y,z],x] + [[z,x],y] = 0 on basis triples i < j < k."""
    k = L.dim
    for i in range(k):
        for j in range(i + 1, k):
            for m in range(j + 1, k):
                acc: Sparse = {}
                for a, b, c in ((i, j, m), (j, m, i), (m, i, j)):
                    for p, x in L.consts[a][b].items():
                        for q, y in L.consts[p][c].items():
                            v = acc.get(q, 0) + x * y
                            if v:
                                acc[q] = v
                            else:
                                acc.pop(q, None)
                if acc:
                    return CheckResult(False, (i, j, m))
    return CheckResult(True)


def adjoint_matrix(L: LiePresentation, coords: Sparse) -> Matrix:
    """Matrix of ad x in the presentation's basis (columns are images)."""
    k = L.dim
    e = [Fraction(0)] * (k * k)
    for j in range(k):
        for q, c in L.bracket(coords, {j: Fraction(1)}).items():
            e[q * k + j] = c
    return Matrix(k, k, tuple(e))


def _center_coords(L: LiePresentation, k: int | None = None) -> list[list[Fraction]]:
    k = L.dim if k is None else k
    rows: dict[tuple[int, int], dict[int, Fraction]] = {}
    for i in range(k):
        for j in range(k):
            for q, c in L.consts[i][j].items():
                rows.setdefault((j, q), {})[i] = c
    rs = RowSpace(k)
    for r in rows.values():
        rs.add_fractions(r.items())
    return rs.kernel_vectors()


def annihilator(L: LiePresentation) -> list[Endo]:
    """Basis of the center {x in L : [x, L] = 0}."""
    return [L.element(v) for v in _center_coords(L)]


@dataclass
class QuotientReport:
    label: str
    subalgebra_dim: int
    annihilator: list[Endo]
    quotient_dim: int
    killing: Matrix
    killing_rank: int
    quotient_center_dim: int
    expected_dim: int | None = None
    complement: list[int] = field(default_factory=list)

    @property
    def annihilator_dim(self) -> int:
        return len(self.annihilator)

    @property
    def center_trivial(self) -> bool:
        return self.quotient_center_dim == 0

    @property
    def killing_nondegenerate(self) -> bool:
        return self.killing_rank == self.quotient_dim

    @property
    def sl_compatible(self) -> bool:
        dim_ok = self.expected_dim is None or self.quotient_dim == self.expected_dim
        return dim_ok and self.center_trivial and self.killing_nondegenerate

    def annihilator_is_scalar(self) -> bool:
        return all(m.is_diagonal() and len(set(m[i, i] for i in range(m.rows))) == 1 for m in self.annihilator)

    def to_json_obj(self) -> dict:
        return {
            "label": self.label,
            "subalgebra_dim": self.subalgebra_dim,
            "annihilator_dim": self.annihilator_dim,
            "annihilator_scalar": self.annihilator_is_scalar(),
            "quotient_dim": self.quotient_dim,
            "expected_dim": self.expected_dim,
            "quotient_center_dim": self.quotient_center_dim,
            "killing_rank": self.killing_rank,
            "center_trivial": self.center_trivial,
            "killing_nondegenerate": self.killing_nondegenerate,
            "sl_compatible": self.sl_compatible,
            "killing": [[format_rational(x) for x in row] for row in self.killing.to_rows()],
        }


def quotient_delta(L: LiePresentation, center: Sequence[Endo], expected_dim: int | None = None,
                   label: str = "") -> QuotientReport:
    """Quotient L / center with its Killing form K(x, y) = tr(ad x ad y)."""
    ncols = L.size * L.size
    coords = SpanCoordinates(_flat(L.basis), ncols) if L.dim else None
    center_vecs = []
    for z in center:
        c = coords.coords(z.entries) if coords else (None if not z.is_zero() else {})
        if c is None:
            raise ValueError("center is not contained in the Lie algebra")
        center_vecs.append([c.get(i, Fraction(0)) for i in range(L.dim)])
    rs = RowSpace(L.dim)
    for v in center_vecs:
        rs.add_fractions(enumerate(v))
    crows, cpivots = rs.rref_rows()
    complement = [i for i in range(L.dim) if i not in set(cpivots)]
    position = {i: a for a, i in enumerate(complement)}

    def reduce(v: Sparse) -> Sparse:
        v = dict(v)
        for r, p in zip(crows, cpivots):
            a = v.get(p)
            if a:
                for c, x in r.items():
                    y = v.get(c, 0) - a * x
                    if y:
                        v[c] = y
                    else:
                        v.pop(c, None)
        return {position[i]: x for i, x in v.items()}

    q = len(complement)
    qconsts = [[reduce(L.consts[a][b]) for b in complement] for a in complement]
    # ad_a as sparse {(row, col): value}
    ads = []
    for a in range(q):
        ad = {}
        for b in range(q):
            for k, c in qconsts[a][b].items():
                ad[(k, b)] = c
        ads.append(ad)
    K = [[Fraction(0)] * q for _ in range(q)]
    for a in range(q):
        for b in range(a, q):
            s = Fraction(0)
            adb = ads[b]
            for (k, j), x in ads[a].items():
                y = adb.get((j, k))
                if y:
                    s += x * y
            K[a][b] = K[b][a] = s
    killing = Matrix.from_rows(K, cols=q) if q else Matrix(0, 0, ())
    krank = span_rank(K, q) if q else 0
    quotient = LiePresentation(tuple(), qconsts)
    qcenter = len(_center_coords(quotient, q))
    return QuotientReport(label, L.dim, list(center), q, killing, krank, qcenter, expected_dim, complement)


def delta_pipeline(alg: NaryAlgebra, expected_dim: int | None = None, label: str = "") -> QuotientReport:
    """GDer(A) -> Ann(GDer(A)) -> quotient with Killing diagnostics."""
    if expected_dim is None:
        expected_dim = (alg.arity + 1) ** 2 - 1
    gder = solve_gder(alg)
    L = close_under_bracket(gder.basis)
    center = annihilator(L)
    return quotient_delta(L, center, expected_dim, label)


@dataclass
class BlockwiseReport:
    blocks: list[QuotientReport]
    combined: QuotientReport

    def to_json_obj(self) -> dict:
        return {
            "blocks": [b.to_json_obj() for b in self.blocks],
            "combined": self.combined.to_json_obj(),
        }


def blockwise_delta(alg: NaryAlgebra) -> BlockwiseReport:
    """One quotient report per direct summand plus one for the whole algebra."""
    if alg.blocks is None:
        raise ValueError("algebra carries no block metadata")
    per = (alg.arity + 1) ** 2 - 1
    reports = []
    for b, (lo, hi) in enumerate(alg.blocks):
        reports.append(delta_pipeline(alg.restrict(lo, hi), per, f"block {b + 1}"))
    combined = delta_pipeline(alg, per * len(alg.blocks), "combined")
    return BlockwiseReport(reports, combined)
