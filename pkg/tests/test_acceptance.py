"""Acceptance criteria, one or more tests per criterion.

Every test records a pass/fail line through the ``criterion`` fixture; the
lines are printed at the end of the pytest run.
"""
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from filippov import Matrix, make_semisimple, make_simple
from filippov.derivations import (
    DerivationTuple,
    all_tuples,
    canonical_tuples,
    chain_report,
    head_span,
    permute_tail,
    random_element,
    solve_nary_derivations,
    solve_qder,
    verify_tuple,
)
from filippov.exact import span_contains, span_rank
from filippov.lie import blockwise_delta, delta_pipeline
from filippov.theorems import (
    check_block_invariance,
    decompose,
    lemma1_tuple,
    qder_tail_from_head,
    uniqueness_certificate,
)

import oracles

SIMPLE = [2, 3, 4, 5]
SEMISIMPLE = [(2, 2), (2, 3), (3, 2)]
PROPERTY = settings(max_examples=100, derandomize=True, deadline=None,
                    suppress_health_check=[HealthCheck.function_scoped_fixture])

_nary_cache = {}


def nary_space(n, t=1):
    if (n, t) not in _nary_cache:
        alg = make_simple(n) if t == 1 else make_semisimple(n, t)
        _nary_cache[n, t] = (alg, solve_nary_derivations(alg))
    return _nary_cache[n, t]


def recorded(criterion, number, name, check):
    """Run ``check`` (which asserts) and log the outcome before re-raising."""
    try:
        detail = check() or ""
    except AssertionError as exc:
        criterion(number, name, False, str(exc).splitlines()[0] if str(exc) else "")
        raise
    criterion(number, name, True, detail)


# -- 1 ----------------------------------------------------------------------

@pytest.mark.parametrize("n", SIMPLE)
def test_c1_simple_chain(criterion, n):
    def check():
        r = chain_report(make_simple(n))
        d = r.dims
        q = Fraction(1, n)
        full = (n + 1) ** 2
        assert d["GDer"] == d["QDer"] == d["End"] == full, d
        assert d["Der"] == n * (n + 1) // 2 < full, d
        assert r.delta_entry_dims[q] > d["Der"], r.delta_entry_dims
        assert r.relation("QDer", "GDer") == "=" and r.relation("GDer", "End") == "="
        return r.chain_string()

    recorded(criterion, 1, f"chain simple:{n}", check)


# -- 2 ----------------------------------------------------------------------

@pytest.mark.parametrize("n", SIMPLE)
def test_c2_delta_is_sl(criterion, n):
    def check():
        rep = delta_pipeline(make_simple(n))
        assert rep.annihilator_dim == 1, rep.annihilator_dim
        assert rep.annihilator_is_scalar()
        assert rep.quotient_dim == (n + 1) ** 2 - 1, rep.quotient_dim
        assert rep.center_trivial
        assert rep.killing_nondegenerate
        return f"quotient {rep.quotient_dim}, Killing rank {rep.killing_rank}"

    recorded(criterion, 2, f"quotient simple:{n}", check)


# -- 3 ----------------------------------------------------------------------

@pytest.mark.parametrize("n", SIMPLE)
def test_c3_normal_form(criterion, n):
    def check():
        alg, space = nary_space(n)
        for t in space.basis:
            dec = decompose(alg, t)
            assert dec.residual_zero, "nonzero residual"
            assert dec.d0 == -dec.d.T
        return f"{space.dimension} basis tuples"

    recorded(criterion, 3, f"normal form simple:{n}", check)


@pytest.mark.parametrize("n", SIMPLE)
def test_c3_certificate(criterion, n):
    def check():
        alg, space = nary_space(n)
        cert = uniqueness_certificate(alg, space)
        assert cert.injective and cert.covers_solved, cert
        assert cert.intersection_dim == space.dimension, cert
        return f"parametrization rank {cert.parametrization_rank}, solved {cert.solved_dim}"

    recorded(criterion, 3, f"certificate simple:{n}", check)


@pytest.mark.parametrize("n", SIMPLE)
def test_c3_stated_dimension(criterion, n):
    def check():
        _, space = nary_space(n)
        stated = (n + 1) ** 2 + n
        assert space.dimension == stated, f"solved {space.dimension}, stated {stated}"

    recorded(criterion, 3, f"dimension (n+1)^2+n simple:{n}", check)


@pytest.mark.parametrize("n", [2, 3])
def test_c3_oracle_dimension(criterion, n):
    def check():
        _, space = nary_space(n)
        bracket, dim = oracles.simple_bracket(n)
        expected = oracles.kernel_dim(oracles.nary_system(bracket, dim, n))
        assert space.dimension == expected, (space.dimension, expected)
        return f"oracle {expected}"

    recorded(criterion, 3, f"independent oracle simple:{n}", check)


# -- 4 ----------------------------------------------------------------------

@pytest.mark.parametrize("n,t", SEMISIMPLE)
def test_c4_block_invariance(criterion, n, t):
    def check():
        alg, space = nary_space(n, t)
        for tup in space.basis:
            rep = check_block_invariance(alg, tup)
            assert rep.ok, rep.violations[:1]
        return f"{space.dimension} basis tuples"

    recorded(criterion, 4, f"block invariance semisimple:{n}:{t}", check)


@pytest.mark.parametrize("n,t", SEMISIMPLE)
def test_c4_additive_dimension(criterion, n, t):
    def check():
        _, space = nary_space(n, t)
        _, simple = nary_space(n)
        assert space.dimension == t * simple.dimension, (space.dimension, simple.dimension)
        return f"{space.dimension} = {t}x{simple.dimension}"

    recorded(criterion, 4, f"dimension additive semisimple:{n}:{t}", check)


@pytest.mark.parametrize("n,t", SEMISIMPLE)
def test_c4_stated_dimension(criterion, n, t):
    def check():
        _, space = nary_space(n, t)
        stated = t * ((n + 1) ** 2 + n)
        assert space.dimension == stated, f"solved {space.dimension}, stated {stated}"

    recorded(criterion, 4, f"dimension t((n+1)^2+n) semisimple:{n}:{t}", check)


# -- 5 ----------------------------------------------------------------------

@pytest.mark.parametrize("n,t", SEMISIMPLE)
def test_c5_semisimple_quotient(criterion, n, t):
    def check():
        alg = make_semisimple(n, t)
        rep = blockwise_delta(alg)
        assert rep.combined.quotient_dim == t * ((n + 1) ** 2 - 1), rep.combined.quotient_dim
        assert all(b.sl_compatible for b in rep.blocks)
        r = chain_report(alg, ["1/n"])
        gder, end = r.dims["GDer"], r.dims["End"]
        assert r.chain_string().endswith("GDer ⊂ End"), r.chain_string()
        assert gder == t * (n + 1) ** 2 < (t * (n + 1)) ** 2 == end, (gder, end)
        return f"quotient {rep.combined.quotient_dim}, GDer {gder} < End {end}"

    recorded(criterion, 5, f"semisimple quotient and chain {n}:{t}", check)


# -- 6 ----------------------------------------------------------------------

def test_c6_tail_permutation(criterion):
    alg, space = nary_space(3)

    @PROPERTY
    @given(st.randoms(use_true_random=False), st.permutations([1, 2, 3]))
    def prop(rnd, sigma):
        t = random_element(space, rnd)
        assert verify_tuple(alg, t)
        assert verify_tuple(alg, permute_tail(t, sigma)), sigma

    recorded(criterion, 6, "tail permutation on A_4 (100 cases)", prop)


# -- 7 ----------------------------------------------------------------------

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=7)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_c7_transpose_tuple(criterion, n):
    alg, space = nary_space(n)
    d = n + 1
    vectors = space.vectors()
    ncols = len(vectors[0])

    @PROPERTY
    @given(st.lists(rationals, min_size=d * d, max_size=d * d))
    def prop(entries):
        A = Matrix(d, d, tuple(Fraction(0) if k // d == k % d else x for k, x in enumerate(entries)))
        t = lemma1_tuple(alg, A)
        assert verify_tuple(alg, t)
        assert span_contains(vectors, [t.flatten()], ncols)

    recorded(criterion, 7, f"B = -A^T on simple:{n} (100 cases)", prop)


# -- 8 ----------------------------------------------------------------------

def test_c8_quasi_tail(criterion):
    alg = make_simple(3)
    qheads = head_span(solve_qder(alg))

    @PROPERTY
    @given(st.lists(rationals, min_size=4, max_size=4))
    def prop(diag):
        head = Matrix.diagonal(diag)
        tail = qder_tail_from_head(alg, head)
        assert tail.is_diagonal()
        assert verify_tuple(alg, DerivationTuple(head, (tail,) * 3))
        assert span_contains([h.entries for h in qheads], [head.entries], 16)

    recorded(criterion, 8, "quasi-derivation tails on A_4 (100 cases)", prop)


def test_c8_identity_head(criterion):
    def check():
        alg = make_simple(3)
        ident = Matrix.identity(4)
        tail = qder_tail_from_head(alg, ident)
        assert tail == ident.scale(Fraction(1, 3)), tail
        assert verify_tuple(alg, DerivationTuple(ident, (tail,) * 3))

    recorded(criterion, 8, "f_0 = id gives f = id/3", check)


# -- 9 ----------------------------------------------------------------------

def _kernels():
    alg = make_simple(2)
    canon = solve_nary_derivations(alg, canonical_tuples(alg))
    full = solve_nary_derivations(alg, all_tuples(alg))
    return canon, full


def test_c9_canonical_matches_exhaustive(criterion):
    def check():
        canon, full = _kernels()
        a, b = canon.vectors(), full.vectors()
        ncols = len(a[0])
        assert len(a) == len(b), (len(a), len(b))
        assert span_contains(a, b, ncols) and span_contains(b, a, ncols)
        assert span_rank(a + b, ncols) == len(a)
        return f"both {len(a)}"

    recorded(criterion, 9, "canonical vs exhaustive on A_3", check)


def test_c9_stated_dimension(criterion):
    def check():
        canon, full = _kernels()
        assert canon.dimension == full.dimension == 11, f"kernels {canon.dimension}, stated 11"

    recorded(criterion, 9, "kernel dimension 11 on A_3", check)
