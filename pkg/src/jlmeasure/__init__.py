"""Exact measure bookkeeping for GL(n) and its inner forms.

Volumes of maximal compact subgroups, formal degrees, Plancherel density
ratios, S-arithmetic covolumes and von Neumann densities over lattices,
computed with exact rational functions in q and checked against
brute-force enumeration of finite matrix groups.
"""

from .symexpr import ONE, PI, Q, ZERO, NumericValue, SymbolicScalar, canonicalize, evaluate_at, parse

__version__ = "0.1.0"
