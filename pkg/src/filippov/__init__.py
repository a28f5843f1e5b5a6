"""Exact computation of (n+1)-ary derivations of n-ary Filippov algebras."""

from .algebra import NaryAlgebra, direct_sum, make_semisimple, make_simple, make_zero
from .exact import Matrix

__all__ = ["Matrix", "NaryAlgebra", "direct_sum", "make_semisimple", "make_simple", "make_zero"]
__version__ = "0.1.0"
