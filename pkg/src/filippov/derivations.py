"""Linear systems for derivation-type operators and their solution spaces.

Operators are d x d matrices whose columns are the images of basis vectors.
The unknowns of an (n+1)-ary derivation system are ordered row-major: all
entries of f_0 first, then f_1, ..., f_n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import NaryAlgebra
from .exact import Matrix, RowSpace, format_rational, parse_rational, span_contains, span_rank

Endo = Matrix

KINDS = ("der", "delta_der", "centroid", "nary_der", "qder", "gder", "annihilator")
DEFAULT_DELTAS = ("1", "1/n", "-1", "1/2", "2")


class VerificationError(RuntimeError):
    """A solved basis element failed to re-verify its defining identity."""


@dataclass(frozen=True)
class DerivationTuple:
    head: Endo
    tail: tuple[Endo, ...]

    def __post_init__(self):
        object.__setattr__(self, "tail", tuple(self.tail))
        size = self.head.shape
        if not self.head.is_square() or any(f.shape != size for f in self.tail):
            raise ValueError("all entries of a derivation tuple must be square and of equal size")

    @property
    def arity(self) -> int:
        return len(self.tail)

    @property
    def maps(self) -> tuple[Endo, ...]:
        return (self.head,) + self.tail

    def flatten(self) -> list[Fraction]:
        return [x for f in self.maps for x in f.entries]

    @classmethod
    def from_flat(cls, vec: Sequence[Fraction], d: int, n: int) -> "DerivationTuple":
        k = d * d
        mats = [Matrix(d, d, tuple(vec[s * k:(s + 1) * k])) for s in range(n + 1)]
        return cls(mats[0], tuple(mats[1:]))

    @classmethod
    def constant(cls, f: Endo, n: int) -> "DerivationTuple":
        return cls(f, (f,) * n)

    def __add__(self, other: "DerivationTuple") -> "DerivationTuple":
        return DerivationTuple(self.head + other.head, tuple(a + b for a, b in zip(self.tail, other.tail)))

    def __sub__(self, other: "DerivationTuple") -> "DerivationTuple":
        return DerivationTuple(self.head - other.head, tuple(a - b for a, b in zip(self.tail, other.tail)))

    def scale(self, c) -> "DerivationTuple":
        return DerivationTuple(self.head.scale(c), tuple(f.scale(c) for f in self.tail))

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.maps)


@dataclass(frozen=True)
class OperatorSpace:
    kind: str
    basis: tuple
    delta: Fraction | None = None
    algebra_hash: str | None = None

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[list[Fraction]]:
        return [b.flatten() for b in self.basis]

    def heads(self) -> list[Endo]:
        return [b.head if isinstance(b, DerivationTuple) else b for b in self.basis]


# ---------------------------------------------------------------------------
# Constraint tuples
# ---------------------------------------------------------------------------


def sorted_tuples(alg: NaryAlgebra) -> list[tuple[int, ...]]:
    """Increasing n-tuples, then sorted tuples with exactly one repeated pair.

    Tuples with an index used three times or with two repeated pairs are left
    out: every term of the derivation identity vanishes on them.
    """
    n, d = alg.arity, alg.dim
    out = list(itertools.combinations(range(d), n))
    for i in range(d):
        others = [j for j in range(d) if j != i]
        for rest in itertools.combinations(others, n - 2):
            out.append(tuple(sorted((i, i) + rest)))
    return out


def canonical_tuples(alg: NaryAlgebra) -> list[tuple[int, ...]]:
    """Every ordering of every tuple in :func:`sorted_tuples`.

    Orderings matter once the tail maps differ: reordering the arguments is
    the same as permuting the tail, which is a different linear constraint.
    """
    out = []
    for rep in sorted_tuples(alg):
        out.extend(sorted(set(itertools.permutations(rep))))
    return out


def all_tuples(alg: NaryAlgebra) -> list[tuple[int, ...]]:
    return list(itertools.product(range(alg.dim), repeat=alg.arity))


# ---------------------------------------------------------------------------
# System assembly
# ---------------------------------------------------------------------------


@dataclass
class _Identity:
    """head_coeff * X_head [x_1..x_n] - sum over (slot, block, c) of c [.. X_block(x_slot) ..]."""

    nblocks: int
    slot_terms: list[tuple[int, int, Fraction]]
    head_block: int = 0
    head_coeff: Fraction = Fraction(1)


def _assemble(alg: NaryAlgebra, tuples: Iterable[tuple[int, ...]], identities: Sequence[_Identity],
              nblocks: int) -> RowSpace:
    d = alg.dim
    dd = d * d
    space = RowSpace(nblocks * dd)
    seen = set()
    for idx in tuples:
        p = alg.basis_product(idx)
        # replaced[s][r] = [x_1, .., e_r (slot s), .., x_n]
        replaced = []
        for s in range(alg.arity):
            row = []
            for r in range(d):
                q = list(idx)
                q[s] = r
                row.append(alg.basis_product(tuple(q)))
            replaced.append(row)
        for ident in identities:
            for k in range(d):
                eq: dict[int, Fraction] = {}
                base = ident.head_block * dd + k * d
                for m, c in p.items():
                    col = base + m
                    eq[col] = eq.get(col, 0) + ident.head_coeff * c
                for s, blk, coef in ident.slot_terms:
                    for r in range(d):
                        c = replaced[s][r].get(k)
                        if c:
                            col = blk * dd + r * d + idx[s]
                            eq[col] = eq.get(col, 0) - coef * c
                eq = {c: v for c, v in eq.items() if v}
                if not eq:
                    continue
                key = frozenset(eq.items())
                if key in seen:
                    continue
                seen.add(key)
                space.add_fractions(eq.items())
    return space


def _nary_identity(n: int) -> _Identity:
    return _Identity(n + 1, [(s, s + 1, Fraction(1)) for s in range(n)])


# ---------------------------------------------------------------------------
# Verification (evaluates the identity directly, independent of assembly)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TupleCheck:
    ok: bool
    witness: tuple[int, ...] | None = None  # 1-based
    lhs: list[Fraction] | None = None
    rhs: list[Fraction] | None = None

    def __bool__(self):
        return self.ok


def _sparse_columns(f: Endo) -> list[dict[int, Fraction]]:
    d = f.cols
    cols = [{} for _ in range(d)]
    for i in range(f.rows):
        for j in range(d):
            x = f.entries[i * d + j]
            if x:
                cols[j][i] = x
    return cols


def verify_tuple(alg: NaryAlgebra, t: DerivationTuple,
                 tuples: Iterable[tuple[int, ...]] | None = None) -> TupleCheck:
    """Check f_0[x_1..x_n] = sum_i [x_1.., f_i(x_i), ..x_n] on constraint tuples."""
    d, n = alg.dim, alg.arity
    if t.head.shape != (d, d) or t.arity != n:
        raise ValueError("tuple shape does not match the algebra")
    head_cols = _sparse_columns(t.head)
    tail_cols = [_sparse_columns(f) for f in t.tail]
    for idx in (canonical_tuples(alg) if tuples is None else tuples):
        lhs: dict[int, Fraction] = {}
        for m, c in alg.basis_product(idx).items():
            for k, a in head_cols[m].items():
                lhs[k] = lhs.get(k, 0) + a * c
        rhs: dict[int, Fraction] = {}
        for s in range(n):
            for r, a in tail_cols[s][idx[s]].items():
                q = list(idx)
                q[s] = r
                for k, c in alg.basis_product(tuple(q)).items():
                    rhs[k] = rhs.get(k, 0) + a * c
        lhs = {k: v for k, v in lhs.items() if v}
        rhs = {k: v for k, v in rhs.items() if v}
        if lhs != rhs:
            dense = lambda v: [v.get(k, Fraction(0)) for k in range(d)]
            return TupleCheck(False, tuple(i + 1 for i in idx), dense(lhs), dense(rhs))
    return TupleCheck(True)


def verify_delta_derivation(alg: NaryAlgebra, phi: Endo, delta) -> TupleCheck:
    delta = parse_rational(delta)
    return verify_tuple(alg, DerivationTuple(phi, (phi.scale(delta),) * alg.arity), sorted_tuples(alg))


def verify_derivation(alg: NaryAlgebra, D: Endo) -> TupleCheck:
    return verify_delta_derivation(alg, D, 1)


def verify_centroid(alg: NaryAlgebra, psi: Endo) -> TupleCheck:
    zero = Matrix.zeros(alg.dim)
    tuples = sorted_tuples(alg)
    for i in range(alg.arity):
        tail = [zero] * alg.arity
        tail[i] = psi
        res = verify_tuple(alg, DerivationTuple(psi, tuple(tail)), tuples)
        if not res:
            return res
    return TupleCheck(True)


def permute_tail(t: DerivationTuple, sigma: Sequence[int]) -> DerivationTuple:
    """(f_0, f_sigma(1), ..., f_sigma(n)); sigma is 1-based, as a list of images."""
    n = t.arity
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{list(sigma)} is not a permutation of 1..{n}")
    return DerivationTuple(t.head, tuple(t.tail[s - 1] for s in sigma))


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


def _matrices(vectors: Sequence[Sequence[Fraction]], d: int) -> tuple[Endo, ...]:
    return tuple(Matrix(d, d, tuple(v)) for v in vectors)


def _require(check: TupleCheck, what: str):
    if not check:
        raise VerificationError(f"{what} failed re-verification at tuple {check.witness}")


def solve_nary_derivations(alg: NaryAlgebra, tuples: Sequence[tuple[int, ...]] | None = None,
                           verify: bool = True) -> OperatorSpace:
    """Basis of all (n+1)-ary derivations (f_0, f_1, ..., f_n)."""
    n, d = alg.arity, alg.dim
    if tuples is None:
        tuples = canonical_tuples(alg)
    space = _assemble(alg, tuples, [_nary_identity(n)], n + 1)
    basis = tuple(DerivationTuple.from_flat(v, d, n) for v in space.kernel_vectors())
    if verify:
        for t in basis:
            _require(verify_tuple(alg, t), "(n+1)-ary derivation")
    return OperatorSpace("nary_der", basis, algebra_hash=alg.fingerprint())


def solve_delta_der(alg: NaryAlgebra, delta, verify: bool = True) -> OperatorSpace:
    """Basis of phi with phi[x_1..x_n] = delta * sum_i [x_1.., phi(x_i), ..x_n]."""
    delta = parse_rational(delta)
    n, d = alg.arity, alg.dim
    ident = _Identity(1, [(s, 0, delta) for s in range(n)])
    space = _assemble(alg, sorted_tuples(alg), [ident], 1)
    basis = _matrices(space.kernel_vectors(), d)
    if verify:
        for phi in basis:
            _require(verify_delta_derivation(alg, phi, delta), f"{delta}-derivation")
    kind = "der" if delta == 1 else "delta_der"
    return OperatorSpace(kind, basis, None if kind == "der" else delta, alg.fingerprint())


def solve_der(alg: NaryAlgebra, verify: bool = True) -> OperatorSpace:
    return solve_delta_der(alg, 1, verify)


def solve_centroid(alg: NaryAlgebra, verify: bool = True) -> OperatorSpace:
    """Basis of psi with psi[x_1..x_n] = [x_1.., psi(x_i), ..x_n] for every slot i."""
    n, d = alg.arity, alg.dim
    idents = [_Identity(1, [(i, 0, Fraction(1))]) for i in range(n)]
    space = _assemble(alg, sorted_tuples(alg), idents, 1)
    basis = _matrices(space.kernel_vectors(), d)
    if verify:
        for psi in basis:
            _require(verify_centroid(alg, psi), "centroid element")
    return OperatorSpace("centroid", basis, algebra_hash=alg.fingerprint())


def solve_qder(alg: NaryAlgebra, verify: bool = True) -> OperatorSpace:
    """Basis of pairs (f_0, f) such that (f_0, f, ..., f) is an (n+1)-ary derivation.

    Elements are returned as full DerivationTuples; use :func:`head_span` for
    the quasi-derivations themselves.
    """
    n, d = alg.arity, alg.dim
    ident = _Identity(2, [(s, 1, Fraction(1)) for s in range(n)])
    space = _assemble(alg, sorted_tuples(alg), [ident], 2)
    dd = d * d
    basis = []
    for v in space.kernel_vectors():
        head = Matrix(d, d, tuple(v[:dd]))
        f = Matrix(d, d, tuple(v[dd:]))
        basis.append(DerivationTuple(head, (f,) * n))
    if verify:
        for t in basis:
            _require(verify_tuple(alg, t, sorted_tuples(alg)), "quasi-derivation")
    return OperatorSpace("qder", tuple(basis), algebra_hash=alg.fingerprint())


def head_span(space: OperatorSpace, d: int | None = None) -> tuple[Endo, ...]:
    """RREF basis of the span of the heads f_0 of a space of tuples."""
    heads = space.heads()
    if d is None:
        if not heads:
            raise ValueError("empty space: pass the dimension explicitly")
        d = heads[0].rows
    rs = RowSpace(d * d)
    for h in heads:
        rs.add_fractions(enumerate(h.entries))
    rows, _ = rs.rref_rows()
    out = []
    for r in rows:
        e = [Fraction(0)] * (d * d)
        for c, x in r.items():
            e[c] = x
        out.append(Matrix(d, d, tuple(e)))
    return tuple(out)


def solve_gder(alg: NaryAlgebra, nary: OperatorSpace | None = None) -> OperatorSpace:
    """Generalized derivations: heads of (n+1)-ary derivations."""
    if nary is None:
        nary = solve_nary_derivations(alg)
    return OperatorSpace("gder", head_span(nary, alg.dim), algebra_hash=alg.fingerprint())


def end_basis(d: int) -> tuple[Endo, ...]:
    return tuple(Matrix.unit(d, i, j) for i in range(d) for j in range(d))


def random_element(space: OperatorSpace, rng, bound: int = 5):
    """Random rational combination of a space's basis."""
    if not space.basis:
        raise ValueError("space is zero")
    acc = None
    for b in space.basis:
        c = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        term = b.scale(c)
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------------------
# Inclusion chain
# ---------------------------------------------------------------------------


def resolve_deltas(deltas: Iterable, n: int) -> list[Fraction]:
    out = []
    for x in deltas:
        if isinstance(x, str) and x.strip() == "1/n":
            q = Fraction(1, n)
        else:
            q = parse_rational(x)
        if q not in out:
            out.append(q)
    return out


@dataclass
class ChainReport:
    """Der ⊆ Der_δ ⊆ QDer ⊆ GDer ⊆ End, one chain per δ.

    The Der_δ term of each chain is Der + Der_δ, the span of derivations and
    δ-derivations; ``delta_dims`` keeps the dimension of Der_δ on its own.
    """

    arity: int
    dim: int
    dims: dict[str, int]
    delta_dims: dict[Fraction, int]
    delta_entry_dims: dict[Fraction, int]
    chains: dict[Fraction, list[tuple[str, str, str]]]
    algebra_hash: str = ""
    spaces: dict = field(default_factory=dict, repr=False)

    @property
    def primary_delta(self) -> Fraction:
        q = Fraction(1, self.arity)
        return q if q in self.chains else next(iter(self.chains))

    def chain_string(self, delta=None) -> str:
        delta = self.primary_delta if delta is None else parse_rational(delta)
        rels = self.chains[delta]
        label = f"Der_{format_rational(delta)}"
        names = lambda x: label if x == "Der_delta" else x
        parts = [names(rels[0][0])]
        for _, right, rel in rels:
            parts.extend([rel, names(right)])
        return " ".join(parts)

    def relation(self, left: str, right: str, delta=None) -> str:
        delta = self.primary_delta if delta is None else parse_rational(delta)
        for a, b, r in self.chains[delta]:
            if (a, b) == (left, right):
                return r
        raise KeyError((left, right))


def _relation(small: Sequence[Endo], big: Sequence[Endo], dd: int) -> str:
    if not span_contains([b.entries for b in big], [s.entries for s in small], dd):
        return "⊄"
    return "=" if len(small) == len(big) else "⊂"


def _span_basis(mats: Iterable[Endo], d: int) -> tuple[Endo, ...]:
    rs = RowSpace(d * d)
    for m in mats:
        rs.add_fractions(enumerate(m.entries))
    rows, _ = rs.rref_rows()
    out = []
    for r in rows:
        e = [Fraction(0)] * (d * d)
        for c, x in r.items():
            e[c] = x
        out.append(Matrix(d, d, tuple(e)))
    return tuple(out)


def chain_report(alg: NaryAlgebra, deltas: Iterable | None = None) -> ChainReport:
    """Dimensions and strict/equal classification of the inclusion chain."""
    n, d = alg.arity, alg.dim
    dd = d * d
    deltas = resolve_deltas(DEFAULT_DELTAS if deltas is None else deltas, n)
    if not deltas:
        raise ValueError("at least one δ is required")
    der = solve_der(alg)
    qder = head_span(solve_qder(alg), d)
    gder = solve_gder(alg).basis
    end = end_basis(d)
    spaces = {"Der": tuple(der.basis), "QDer": qder, "GDer": tuple(gder), "End": end}
    delta_dims, entry_dims, chains = {}, {}, {}
    tail = [("QDer", "GDer", _relation(qder, gder, dd)), ("GDer", "End", _relation(gder, end, dd))]
    for q in deltas:
        sp = der if q == 1 else solve_delta_der(alg, q)
        entry = _span_basis(list(der.basis) + list(sp.basis), d)
        spaces[f"Der_{format_rational(q)}"] = entry
        delta_dims[q] = sp.dimension
        entry_dims[q] = len(entry)
        chains[q] = [
            ("Der", "Der_delta", _relation(der.basis, entry, dd)),
            ("Der_delta", "QDer", _relation(entry, qder, dd)),
        ] + tail
    return ChainReport(
        arity=n,
        dim=d,
        dims={k: len(v) for k, v in spaces.items() if k in ("Der", "QDer", "GDer", "End")},
        delta_dims=delta_dims,
        delta_entry_dims=entry_dims,
        chains=chains,
        algebra_hash=alg.fingerprint(),
        spaces=spaces,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def matrix_to_json(m: Matrix) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in m.to_rows()]


def matrix_from_json(obj) -> Matrix:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ValueError("a matrix must be a non-empty list of rows")
    return Matrix.from_rows(obj)


def tuple_to_json(t: DerivationTuple) -> list:
    return [matrix_to_json(f) for f in t.maps]


def tuple_from_json(obj) -> DerivationTuple:
    if not isinstance(obj, list) or len(obj) < 3:
        raise ValueError("a derivation tuple is a list of at least 3 matrices")
    mats = [matrix_from_json(m) for m in obj]
    return DerivationTuple(mats[0], tuple(mats[1:]))


def space_to_json(space: OperatorSpace) -> dict:
    basis = [tuple_to_json(b) if isinstance(b, DerivationTuple) else matrix_to_json(b) for b in space.basis]
    return {
        "kind": space.kind,
        "delta": None if space.delta is None else format_rational(space.delta),
        "dimension": space.dimension,
        "basis": basis,
        "algebra_hash": space.algebra_hash,
    }


def space_dimension_check(space: OperatorSpace) -> bool:
    """Basis vectors are linearly independent."""
    vecs = space.vectors()
    if not vecs:
        return True
    return span_rank(vecs, len(vecs[0])) == len(vecs)
