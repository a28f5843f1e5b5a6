"""Exact rational scalars and dense matrices.

Scalars are :class:`fractions.Fraction`, which is already a reduced
numerator/denominator pair with a positive denominator.  Elimination is done
fraction-free on integer rows (each row rescaled by its gcd after every
update) and only converted back to fractions for the final reduced form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a :class:`Fraction`.

    Decimal and float notations are refused on purpose so that no inexact
    value can sneak into a structure-constant table.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational string: {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational string: {text!r}")
    num, den = m.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix of fractions."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(parse_rational(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> "Matrix":
        return cls.diagonal([1] * size)

    @classmethod
    def diagonal(cls, values: Sequence) -> "Matrix":
        k = len(values)
        e = [Fraction(0)] * (k * k)
        for i, v in enumerate(values):
            e[i * k + i] = parse_rational(v)
        return cls(k, k, tuple(e))

    @classmethod
    def unit(cls, size: int, i: int, j: int) -> "Matrix":
        """Matrix unit E_ij (0-based) of a square matrix."""
        e = [Fraction(0)] * (size * size)
        e[i * size + j] = Fraction(1)
        return cls(size, size, tuple(e))

    @classmethod
    def column(cls, values: Sequence) -> "Matrix":
        return cls(len(values), 1, tuple(parse_rational(v) for v in values))

    # -- access -----------------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[Fraction]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> list[Fraction]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list[Fraction]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_diagonal(self) -> bool:
        return self.is_square() and all(
            self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j
        )

    def trace(self) -> Fraction:
        return sum((self[i, i] for i in range(min(self.rows, self.cols))), Fraction(0))

    # -- arithmetic -------------------------------------------------------

    def _check_same(self, other: "Matrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> "Matrix":
        c = parse_rational(c)
        return Matrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __rmul__(self, c) -> "Matrix":
        return self.scale(c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        n, m, p = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [Fraction(0)] * (n * p)
        for i in range(n):
            for k in range(m):
                x = a[i * m + k]
                if x:
                    base = k * p
                    for j in range(p):
                        y = b[base + j]
                        if y:
                            out[i * p + j] += x * y
        return Matrix(n, p, tuple(out))

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def commutator(self, other: "Matrix") -> "Matrix":
        return self @ other - other @ self

    def apply(self, vec: Sequence[Fraction]) -> list[Fraction]:
        """Image of a coordinate vector (columns are images of basis vectors)."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = [Fraction(0)] * self.rows
        for j, v in enumerate(vec):
            if v:
                for i in range(self.rows):
                    x = self.entries[i * self.cols + j]
                    if x:
                        out[i] += x * v
        return out

    def flatten(self) -> list[Fraction]:
        return list(self.entries)

    def __str__(self) -> str:
        return "\n".join(" ".join(format_rational(x) for x in r) for r in self.to_rows())


# ---------------------------------------------------------------------------
# Fraction-free sparse elimination.  Rows are dicts col -> int.
# ---------------------------------------------------------------------------

SparseRow = dict


def _integer_row(values: Iterable[tuple[int, Fraction]]) -> SparseRow:
    items = [(c, Fraction(v)) for c, v in values if v]
    if not items:
        return {}
    den = lcm(*(v.denominator for _, v in items))
    row = {c: int(v * den) for c, v in items}
    return _normalize(row)


def _normalize(row: SparseRow) -> SparseRow:
    if not row:
        return row
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {c: v // g for c, v in row.items()}


def _combine(a: int, row: SparseRow, b: int, piv: SparseRow) -> SparseRow:
    """Return a*row - b*piv, gcd-normalized, dropping zeros."""
    out = {c: a * v for c, v in row.items()} if a != 1 else dict(row)
    for c, v in piv.items():
        x = out.get(c, 0) - b * v
        if x:
            out[c] = x
        else:
            out.pop(c, None)
    return _normalize(out)


class RowSpace:
    """Incrementally maintained reduced basis of a row space.

    Every stored row has a distinguished pivot column in which all other
    stored rows vanish.  Adding a row costs one pass over the pivots it hits.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, SparseRow] = {}

    def reduce(self, row: SparseRow) -> SparseRow:
        hit = [c for c in row if c in self.pivots]
        for c in hit:
            b = row.get(c, 0)
            if not b:
                continue
            piv = self.pivots[c]
            a = piv[c]
            g = gcd(a, b)
            row = _combine(a // g, row, b // g, piv)
        return row

    def add(self, row: SparseRow) -> bool:
        """Insert a row; return True if it enlarged the space."""
        row = self.reduce(_normalize(dict(row)))
        if not row:
            return False
        q = min(row)
        if row[q] < 0:
            row = {c: -v for c, v in row.items()}
        for c, other in list(self.pivots.items()):
            b = other.get(q, 0)
            if b:
                g = gcd(row[q], b)
                new = _combine(row[q] // g, other, b // g, row)
                if new[c] < 0:
                    new = {k: -v for k, v in new.items()}
                self.pivots[c] = new
        self.pivots[q] = row
        return True

    def add_fractions(self, values: Iterable[tuple[int, Fraction]]) -> bool:
        return self.add(_integer_row(values))

    def contains(self, values: Iterable[tuple[int, Fraction]]) -> bool:
        return not self.reduce(_integer_row(values))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def rref_rows(self) -> tuple[list[dict[int, Fraction]], list[int]]:
        """The unique reduced row echelon form of the stored space."""
        rows = [dict(r) for r in self.pivots.values()]
        out: list[SparseRow] = []
        pivots: list[int] = []
        for col in range(self.ncols):
            if not rows:
                break
            cand = [k for k, r in enumerate(rows) if col in r]
            if not cand:
                continue
            k = min(cand, key=lambda k: len(rows[k]))
            piv = rows.pop(k)
            for idx, r in enumerate(rows):
                b = r.get(col, 0)
                if b:
                    g = gcd(piv[col], b)
                    rows[idx] = _combine(piv[col] // g, r, b // g, piv)
            for idx, r in enumerate(out):
                b = r.get(col, 0)
                if b:
                    g = gcd(piv[col], b)
                    out[idx] = _combine(piv[col] // g, r, b // g, piv)
            rows = [r for r in rows if r]
            out.append(piv)
            pivots.append(col)
        result = []
        for r, p in zip(out, pivots):
            lead = r[p]
            result.append({c: Fraction(v, lead) for c, v in sorted(r.items())})
        return result, pivots

    def kernel_vectors(self) -> list[list[Fraction]]:
        """Basis of {x : row . x = 0 for every stored row}, one vector per free column."""
        rows, pivots = self.rref_rows()
        pivot_set = set(pivots)
        basis = []
        for f in range(self.ncols):
            if f in pivot_set:
                continue
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for r, p in zip(rows, pivots):
                x = r.get(f)
                if x:
                    v[p] = -x
            basis.append(v)
        return basis


def _space_of(m: Matrix) -> RowSpace:
    space = RowSpace(m.cols)
    for i in range(m.rows):
        space.add_fractions(enumerate(m.row(i)))
    return space


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (zero rows kept at the bottom)."""
    rows, pivots = _space_of(m).rref_rows()
    dense = []
    for r in rows:
        v = [Fraction(0)] * m.cols
        for c, x in r.items():
            v[c] = x
        dense.append(v)
    dense.extend([[Fraction(0)] * m.cols for _ in range(m.rows - len(rows))])
    return Matrix.from_rows(dense, cols=m.cols), pivots


def rank(m: Matrix) -> int:
    return _space_of(m).rank


def nullspace(m: Matrix) -> list[Matrix]:
    """Basis of the right kernel as column vectors."""
    return [Matrix.column(v) for v in _space_of(m).kernel_vectors()]


def solve(m: Matrix, b: Matrix) -> Matrix | None:
    """One particular solution of m x = b, or None when inconsistent."""
    if b.rows != m.rows:
        raise ValueError(f"right-hand side has {b.rows} rows, matrix has {m.rows}")
    # Augmented column block [m | b]; a pivot inside the b block means inconsistency.
    aug = Matrix.from_rows([m.row(i) + b.row(i) for i in range(m.rows)], cols=m.cols + b.cols)
    rows, pivots = _space_of(aug).rref_rows()
    if any(p >= m.cols for p in pivots):
        return None
    x = [[Fraction(0)] * b.cols for _ in range(m.cols)]
    for r, p in zip(rows, pivots):
        for j in range(b.cols):
            x[p][j] = r.get(m.cols + j, Fraction(0))
    return Matrix.from_rows(x, cols=b.cols)


def span_rank(vectors: Iterable[Sequence[Fraction]], ncols: int) -> int:
    space = RowSpace(ncols)
    for v in vectors:
        space.add_fractions(enumerate(v))
    return space.rank


def is_independent(vectors: Sequence[Sequence[Fraction]], ncols: int) -> bool:
    return span_rank(vectors, ncols) == len(vectors)


def span_contains(big: Sequence[Sequence[Fraction]], small: Sequence[Sequence[Fraction]], ncols: int) -> bool:
    """True when every vector of ``small`` lies in the span of ``big``."""
    space = RowSpace(ncols)
    for v in big:
        space.add_fractions(enumerate(v))
    return all(space.contains(enumerate(v)) for v in small)
