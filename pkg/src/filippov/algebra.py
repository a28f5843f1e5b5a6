"""n-ary anticommutative algebras given by structure constants.

Indices are 0-based internally; every user-facing format (JSON files,
witnesses printed by the CLI) uses 1-based indices to match e_1, ..., e_d.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

from .exact import format_rational, parse_rational

Vector = list  # list[Fraction] of length dim


class AlgebraFormatError(ValueError):
    """Base class for problems in an algebra file."""


class MalformedAlgebraFile(AlgebraFormatError):
    pass


class NonIncreasingArgs(AlgebraFormatError):
    pass


class IndexOutOfRange(AlgebraFormatError):
    pass


class ShapeMismatch(AlgebraFormatError):
    """Arity or dimension inconsistent with the declared header."""


def permutation_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True, eq=False)
class NaryAlgebra:
    arity: int
    dim: int
    basis: tuple[str, ...]
    # increasing 0-based index tuple -> {0-based basis index: coefficient}
    constants: Mapping[tuple[int, ...], Mapping[int, Fraction]]
    # half-open (start, stop) ranges of direct-sum summands, or None
    blocks: tuple[tuple[int, int], ...] | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.arity < 2:
            raise ValueError("arity must be at least 2")
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if len(self.basis) != self.dim:
            raise ShapeMismatch(f"{len(self.basis)} basis labels for dimension {self.dim}")
        clean = {}
        for key, vec in self.constants.items():
            key = tuple(key)
            if len(key) != self.arity:
                raise ShapeMismatch(f"product {key} has {len(key)} arguments, arity is {self.arity}")
            if any(b <= a for a, b in zip(key, key[1:])):
                raise NonIncreasingArgs(f"product arguments {key} are not strictly increasing")
            if any(not 0 <= i < self.dim for i in key) or any(not 0 <= k < self.dim for k in vec):
                raise IndexOutOfRange(f"index out of range in product {key}")
            v = {k: Fraction(c) for k, c in vec.items() if c}
            if v:
                clean[key] = v
        object.__setattr__(self, "constants", clean)
        if self.blocks is not None:
            object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))

    def __eq__(self, other):
        if not isinstance(other, NaryAlgebra):
            return NotImplemented
        return (self.arity, self.dim, self.basis, self.constants, self.blocks) == (
            other.arity, other.dim, other.basis, other.constants, other.blocks)

    def __hash__(self):
        return hash(self.fingerprint())

    # -- products ---------------------------------------------------------

    def basis_product(self, idx: Sequence[int]) -> dict[int, Fraction]:
        """[e_{i_1}, ..., e_{i_n}] for an arbitrary 0-based index tuple."""
        idx = tuple(idx)
        cache = self._cache
        hit = cache.get(idx)
        if hit is not None:
            return hit
        if len(set(idx)) < len(idx):
            out = {}
        else:
            key = tuple(sorted(idx))
            vec = self.constants.get(key)
            if not vec:
                out = {}
            else:
                order = sorted(range(len(idx)), key=idx.__getitem__)
                if permutation_sign(order) > 0:
                    out = vec
                else:
                    out = {k: -c for k, c in vec.items()}
        cache[idx] = out
        return out

    def product(self, args: Sequence[Sequence[Fraction]]) -> Vector:
        """Multilinear extension of the bracket to coordinate vectors."""
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        supports = []
        for a in args:
            if len(a) != self.dim:
                raise ValueError("argument length does not match dimension")
            supports.append([(i, Fraction(c)) for i, c in enumerate(a) if c])
        out = [Fraction(0)] * self.dim
        for combo in itertools.product(*supports):
            idx = tuple(i for i, _ in combo)
            vec = self.basis_product(idx)
            if not vec:
                continue
            coef = Fraction(1)
            for _, c in combo:
                coef *= c
            for k, c in vec.items():
                out[k] += coef * c
        return out

    def unit(self, i: int) -> Vector:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    # -- structure --------------------------------------------------------

    def increasing_tuples(self, length: int | None = None):
        return itertools.combinations(range(self.dim), self.arity if length is None else length)

    @cached_property
    def is_zero(self) -> bool:
        return not self.constants

    def block_of(self, i: int) -> int:
        if self.blocks is None:
            raise ValueError("algebra carries no block metadata")
        for b, (lo, hi) in enumerate(self.blocks):
            if lo <= i < hi:
                return b
        raise IndexError(i)

    def restrict(self, lo: int, hi: int) -> "NaryAlgebra":
        """Subalgebra on basis vectors lo..hi-1, assumed to be an ideal summand."""
        consts = {}
        for key, vec in self.constants.items():
            if all(lo <= i < hi for i in key):
                consts[tuple(i - lo for i in key)] = {k - lo: c for k, c in vec.items() if lo <= k < hi}
        return NaryAlgebra(self.arity, hi - lo, self.basis[lo:hi], consts)

    def derived_dimension(self) -> int:
        """Dimension of [A, ..., A]."""
        from .exact import span_rank
        vecs = []
        for vec in self.constants.values():
            v = [Fraction(0)] * self.dim
            for k, c in vec.items():
                v[k] = c
            vecs.append(v)
        return span_rank(vecs, self.dim)

    # -- serialization ----------------------------------------------------

    def to_json_obj(self) -> dict:
        obj = {
            "arity": self.arity,
            "dim": self.dim,
            "basis": list(self.basis),
            "products": [
                {
                    "args": [i + 1 for i in key],
                    "value": {str(k + 1): format_rational(c) for k, c in sorted(vec.items())},
                }
                for key, vec in sorted(self.constants.items())
            ],
        }
        if self.blocks is not None:
            obj["blocks"] = [[lo + 1, hi] for lo, hi in self.blocks]
        return obj

    def fingerprint(self) -> str:
        text = json.dumps(self.to_json_obj(), separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _label_basis(dim: int) -> tuple[str, ...]:
    return tuple(f"e{i + 1}" for i in range(dim))


def make_simple(n: int) -> NaryAlgebra:
    """The simple (n+1)-dimensional n-ary Filippov algebra A_{n+1}.

    [e_1, ..., ^e_i, ..., e_{n+1}] = (-1)^(n+i+1) e_i  (1-based i).
    """
    if n < 2:
        raise ValueError("arity must be at least 2")
    d = n + 1
    consts = {}
    for i in range(1, d + 1):
        key = tuple(j - 1 for j in range(1, d + 1) if j != i)
        consts[key] = {i - 1: Fraction((-1) ** (n + i + 1))}
    return NaryAlgebra(n, d, _label_basis(d), consts)


def make_zero(n: int, dim: int) -> NaryAlgebra:
    return NaryAlgebra(n, dim, _label_basis(dim), {})


def direct_sum(parts: Sequence[NaryAlgebra]) -> NaryAlgebra:
    if not parts:
        raise ValueError("direct sum of no algebras")
    n = parts[0].arity
    if any(p.arity != n for p in parts):
        raise ValueError("all summands must have the same arity")
    consts = {}
    blocks = []
    labels = []
    off = 0
    for b, p in enumerate(parts):
        for key, vec in p.constants.items():
            consts[tuple(i + off for i in key)] = {k + off: c for k, c in vec.items()}
        blocks.append((off, off + p.dim))
        if len(parts) == 1:
            labels.extend(p.basis)
        else:
            labels.extend(f"{lab}_{b + 1}" for lab in p.basis)
        off += p.dim
    return NaryAlgebra(n, off, tuple(labels), consts, tuple(blocks))


def make_semisimple(n: int, t: int) -> NaryAlgebra:
    return direct_sum([make_simple(n)] * t)


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: tuple | None = None
    lhs: dict | None = None
    rhs: dict | None = None

    def __bool__(self):
        return self.ok


def _add_into(acc: dict, vec: Mapping[int, Fraction], coef: Fraction):
    for k, c in vec.items():
        x = acc.get(k, 0) + coef * c
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)


def bracket_sparse(alg: NaryAlgebra, args: Sequence[Mapping[int, Fraction]]) -> dict[int, Fraction]:
    """Bracket of sparse vectors {index: coefficient}."""
    out: dict[int, Fraction] = {}
    for combo in itertools.product(*(list(a.items()) for a in args)):
        vec = alg.basis_product(tuple(i for i, _ in combo))
        if vec:
            coef = Fraction(1)
            for _, c in combo:
                coef *= c
            _add_into(out, vec, coef)
    return out


def check_filippov(alg: NaryAlgebra) -> CheckResult:
    """Check [[x_1..x_n], y_2..y_n] = sum_i [x_1.., [x_i, y_2..y_n], ..x_n] on basis tuples.

    x runs over increasing n-tuples and y over increasing (n-1)-tuples; by
    multilinearity and antisymmetry this covers every basis tuple.  The
    witness is reported 1-based.
    """
    n = alg.arity
    for xs in alg.increasing_tuples(n):
        inner = alg.basis_product(xs)
        for ys in alg.increasing_tuples(n - 1):
            lhs: dict[int, Fraction] = {}
            for k, c in inner.items():
                _add_into(lhs, alg.basis_product((k,) + ys), c)
            rhs: dict[int, Fraction] = {}
            for i in range(n):
                z = alg.basis_product((xs[i],) + ys)
                if not z:
                    continue
                args = [{x: Fraction(1)} for x in xs]
                args[i] = z
                _add_into(rhs, bracket_sparse(alg, args), Fraction(1))
            if lhs != rhs:
                witness = (tuple(x + 1 for x in xs), tuple(y + 1 for y in ys))
                return CheckResult(False, witness, _one_based(lhs), _one_based(rhs))
    return CheckResult(True)


def check_anticommutative(alg: NaryAlgebra) -> CheckResult:
    """Swapping two arguments negates the product; a repeated argument gives 0."""
    n = alg.arity
    for key in alg.increasing_tuples(n):
        base = alg.basis_product(key)
        for a in range(n):
            rep = list(key)
            rep[(a + 1) % n] = rep[a]
            if alg.basis_product(tuple(rep)):
                return CheckResult(False, tuple(i + 1 for i in rep))
            for b in range(a + 1, n):
                sw = list(key)
                sw[a], sw[b] = sw[b], sw[a]
                if alg.basis_product(tuple(sw)) != {k: -c for k, c in base.items()}:
                    return CheckResult(False, tuple(i + 1 for i in sw))
    return CheckResult(True)


def _one_based(vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
    return {k + 1: c for k, c in sorted(vec.items())}


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def algebra_from_json_obj(obj) -> NaryAlgebra:
    if not isinstance(obj, dict):
        raise MalformedAlgebraFile("top level must be a JSON object")
    for key in ("arity", "dim", "products"):
        if key not in obj:
            raise MalformedAlgebraFile(f"missing key {key!r}")
    arity, dim = obj["arity"], obj["dim"]
    if not isinstance(arity, int) or not isinstance(dim, int) or arity < 2 or dim < 1:
        raise MalformedAlgebraFile("arity must be an integer >= 2 and dim an integer >= 1")
    basis = obj.get("basis", list(_label_basis(dim)))
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise MalformedAlgebraFile("basis must be a list of strings")
    if len(basis) != dim:
        raise ShapeMismatch(f"{len(basis)} basis labels for dim {dim}")
    products = obj["products"]
    if not isinstance(products, list):
        raise MalformedAlgebraFile("products must be a list")
    consts: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for entry in products:
        if not isinstance(entry, dict) or "args" not in entry or "value" not in entry:
            raise MalformedAlgebraFile(f"product entry needs 'args' and 'value': {entry!r}")
        args, value = entry["args"], entry["value"]
        if not isinstance(args, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in args):
            raise MalformedAlgebraFile(f"args must be a list of integers: {args!r}")
        if not isinstance(value, dict):
            raise MalformedAlgebraFile(f"value must be an object: {value!r}")
        if len(args) != arity:
            raise ShapeMismatch(f"args {args} has length {len(args)}, arity is {arity}")
        if any(not 1 <= a <= dim for a in args):
            raise IndexOutOfRange(f"args {args} outside 1..{dim}")
        if any(b <= a for a, b in zip(args, args[1:])):
            raise NonIncreasingArgs(f"args {args} not strictly increasing")
        key = tuple(a - 1 for a in args)
        if key in consts:
            raise MalformedAlgebraFile(f"duplicate product entry for args {args}")
        vec = {}
        for k, c in value.items():
            try:
                kk = int(k)
            except ValueError:
                raise MalformedAlgebraFile(f"value key {k!r} is not an integer") from None
            if not 1 <= kk <= dim:
                raise IndexOutOfRange(f"value index {kk} outside 1..{dim}")
            try:
                vec[kk - 1] = parse_rational(c)
            except ValueError as exc:
                raise MalformedAlgebraFile(str(exc)) from None
        consts[key] = vec
    blocks = obj.get("blocks")
    if blocks is not None:
        try:
            blocks = tuple((int(lo) - 1, int(hi)) for lo, hi in blocks)
        except (TypeError, ValueError):
            raise MalformedAlgebraFile("blocks must be a list of [first, last] pairs") from None
        if any(not 0 <= lo < hi <= dim for lo, hi in blocks):
            raise IndexOutOfRange("block range outside the basis")
    return NaryAlgebra(arity, dim, tuple(basis), consts, blocks)


def load(path: str | Path) -> NaryAlgebra:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedAlgebraFile(f"{path}: invalid JSON ({exc})") from None
    return algebra_from_json_obj(obj)


def save(alg: NaryAlgebra, path: str | Path) -> None:
    Path(path).write_text(json.dumps(alg.to_json_obj(), indent=2) + "\n", encoding="utf-8")
