"""Weight-function representatives of hbar-deformed Schubert classes.

Three exact flavors are built here:

* FUND: the undeformed fundamental-class representatives on a Grassmannian,
  U_I = prod_a prod_{b > i_a} (z_b - t_a) / prod_{a<b} (t_b - t_a);

* H: the rational weight functions, whose factors are x + h, h, or x
  according to the relative position of i^(k+1)_b and i^(k)_a, with
  1/(t_b - t_a) and 1/(t_b - t_a + h) denominators per level;

* K: the trigonometric weight functions with factors 1 + h*x, (1+h)*x,
  1 - x in the ratio variables, kept in the Laurent substrate so the
  (1+h) units cancel exactly.

The symmetrized function W = Sym(U) is never expanded in free t-variables.
Every consumer needs only its fixed-point restrictions t^(k)_a = z_{i^(k)_a},
so symmetrization is performed after substitution: a restriction is the sum
of prod_k lambda^(k)! substituted U-terms, accumulated as factored rationals.
Restrictions of a class at every fixed point assemble into a GKM tuple, and
the GKM matching condition along z_i = z_j walls is checked exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .flags import FlagShape, IndexTuple, Permutation, act, enumerate_tuples, \
    neighbor_pairs, tuple_index
from .scalars import HBAR, FactoredRational, MultiPoly, VarSpace, Var, tvar, zvar


class Theory(Enum):
    FUND = "fund"
    H = "h"
    K = "k"
    ELL = "ell"


EXACT_THEORIES = (Theory.FUND, Theory.H, Theory.K)


@lru_cache(maxsize=None)
def space_for(shape: FlagShape) -> VarSpace:
    return VarSpace.for_flag(shape.lambdas)


def _level_var(space: VarSpace, shape: FlagShape, k: int, a: int) -> Var:
    """t^(k)_a, with the top level resolved to z_a."""
    return zvar(a) if k == shape.N else tvar(k, a)


@lru_cache(maxsize=None)
def u_factor_lists(theory: Theory, shape: FlagShape, I: IndexTuple):
    """Numerator and denominator factor lists of U_I (unexpanded)."""
    space = space_for(shape)
    one = MultiPoly.const(space, 1)
    h = MultiPoly.variable(space, HBAR)
    num: list[MultiPoly] = []
    den: list[MultiPoly] = []

    def lv(k, a):
        return MultiPoly.variable(space, _level_var(space, shape, k, a))

    if theory is Theory.FUND:
        if shape.N != 2:
            raise ValueError("fundamental-class formulas need a Grassmannian shape")
        m, n = shape.lambdas[0], shape.n
        for a, ia in enumerate(I.parts[0], start=1):
            for b in range(ia + 1, n + 1):
                num.append(MultiPoly.variable(space, zvar(b)) - lv(1, a))
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                den.append(lv(1, b) - lv(1, a))
        return tuple(num), tuple(den)

    if theory not in (Theory.H, Theory.K):
        raise ValueError("exact factor lists exist for FUND, H, K only")

    for k in range(1, shape.N):
        lk, lk1 = shape.prefix(k), shape.prefix(k + 1)
        for a in range(1, lk + 1):
            ika = I.element(k, a)
            ta = lv(k, a)
            for b in range(1, lk1 + 1):
                ik1b = I.element(k + 1, b)
                tb = lv(k + 1, b)
                if theory is Theory.H:
                    if ik1b < ika:
                        num.append(tb - ta + h)
                    elif ik1b == ika:
                        num.append(h)
                    else:
                        num.append(tb - ta)
                else:
                    # psi^K in the ratio x = t^(k)_a / t^(k+1)_b
                    if ik1b < ika:
                        num.append(tb + h * ta)
                        den.append(tb)
                    elif ik1b == ika:
                        num.append(one + h)
                        num.append(ta)
                        den.append(tb)
                    else:
                        num.append(tb - ta)
                        den.append(tb)
        for b in range(1, lk + 1):
            tb = lv(k, b)
            for a in range(1, lk + 1):
                ta = lv(k, a)
                if a < b:
                    if theory is Theory.H:
                        den.append(tb - ta)
                    else:
                        den.append(tb - ta)
                        num.append(tb)
                if b <= a:
                    if theory is Theory.H:
                        den.append(tb - ta + h)
                    else:
                        den.append(tb + h * ta)
                        num.append(tb)
    return tuple(num), tuple(den)


def weight_U(theory: Theory, shape: FlagShape, I: IndexTuple) -> FactoredRational:
    """The single (unsymmetrized) term U_I, expanded over its factored denominator."""
    num, den = u_factor_lists(theory, shape, I)
    space = space_for(shape)
    prod = MultiPoly.const(space, 1)
    for f in num:
        prod = prod * f
    return FactoredRational.from_ratio(prod, den, reduce=True)


def _sym_permutations(shape: FlagShape):
    """The Sym_lambda index permutations, one block per t-level."""
    blocks = [itertools.permutations(range(1, shape.prefix(k) + 1))
              for k in range(1, shape.N)]
    if not blocks:
        return [()]
    return itertools.product(*blocks)


def weight_W_restriction(theory: Theory, shape: FlagShape, I: IndexTuple,
                         at: IndexTuple, sigma: Permutation, *,
                         invert: bool = False,
                         z_values: tuple | None = None) -> FactoredRational:
    """W_{sigma,I} restricted to the fixed point `at` (exact theories).

    Pipeline: form U for sigma^{-1}(I), relabel z_i -> z_{sigma(i)} inside the
    factors, then sum over the Sym_lambda substitutions t^(k)_a = z_{i^(k)_a}
    of `at`.  `invert` feeds reciprocal assignments everywhere (including
    h -> 1/h), realizing the K-theory involution at restriction level.
    `z_values` optionally pins the z variables to exact integers, keeping the
    whole computation in Z[h].
    """
    space = space_for(shape)
    Iprime = act(sigma, I)
    num_factors, den_factors = u_factor_lists(theory, shape, Iprime)
    zvals = dict(z_values) if z_values is not None else None

    def z_target(i: int):
        i = sigma(i)
        if zvals is not None:
            return MultiPoly.const(space, zvals[i])
        if invert:
            return MultiPoly.monomial(space, {zvar(i): -1})
        return MultiPoly.variable(space, zvar(i))

    def t_target(i: int):
        # restriction plugs actual z variables (or their pinned values)
        if zvals is not None:
            return MultiPoly.const(space, zvals[i])
        if invert:
            return MultiPoly.monomial(space, {zvar(i): -1})
        return MultiPoly.variable(space, zvar(i))

    base = {zvar(i): z_target(i) for i in range(1, shape.n + 1)}
    if invert:
        base[HBAR] = MultiPoly.monomial(space, {HBAR: -1})

    total = FactoredRational.from_poly(MultiPoly.zero(space))
    for pi in _sym_permutations(shape):
        assignment = dict(base)
        for k in range(1, shape.N):
            perm = pi[k - 1]
            for a in range(1, shape.prefix(k) + 1):
                assignment[tvar(k, a)] = t_target(at.element(k, perm[a - 1]))
        term_num = MultiPoly.const(space, 1)
        dead = False
        for f in num_factors:
            g = f.substitute(assignment)
            if g.is_zero():
                dead = True
                break
            term_num = term_num * g
        if dead:
            continue
        dens = []
        for f in den_factors:
            g = f.substitute(assignment)
            if g.is_zero():
                raise AssertionError(
                    "denominator vanished under a generic restriction; "
                    "this indicates a transcription bug")
            dens.append(g)
        total = total + FactoredRational.from_ratio(term_num, dens, reduce=True)
    return total


@dataclass(frozen=True)
class GKMTuple:
    """A class presented by its fixed-point restrictions, in enumeration order."""

    theory: Theory
    shape: FlagShape
    values: tuple
    origin: IndexTuple | None = None
    sigma: Permutation | None = None

    def __getitem__(self, at: IndexTuple):
        return self.values[tuple_index(self.shape)[at]]

    def entrywise_product(self, other: "GKMTuple") -> "GKMTuple":
        if self.shape != other.shape or self.theory != other.theory:
            raise ValueError("mismatched tuples")
        vals = tuple(a * b for a, b in zip(self.values, other.values))
        return GKMTuple(self.theory, self.shape, vals)

    def scale(self, c) -> "GKMTuple":
        return GKMTuple(self.theory, self.shape, tuple(c * v for v in self.values),
                        self.origin, self.sigma)


@lru_cache(maxsize=None)
def class_tuple(theory: Theory, shape: FlagShape, I: IndexTuple,
                sigma: Permutation, *, invert: bool = False,
                z_values: tuple | None = None) -> GKMTuple:
    """Restrictions of W_{sigma,I} at every fixed point of the shape."""
    values = tuple(
        weight_W_restriction(theory, shape, I, at, sigma,
                             invert=invert, z_values=z_values)
        for at in enumerate_tuples(shape))
    return GKMTuple(theory, shape, values, I, sigma)


def gkm_check(t: GKMTuple):
    """Exact GKM condition: substituting z_i = z_j into neighboring entries agrees.

    Returns the list of violations (empty means pass).
    """
    if t.theory not in EXACT_THEORIES:
        raise ValueError("exact GKM check applies to FUND/H/K tuples")
    space = space_for(t.shape)
    idx = tuple_index(t.shape)
    violations = []
    for i, j, I, J in neighbor_pairs(t.shape):
        if idx[I] > idx[J]:
            continue
        diff = t.values[idx[I]] + (-t.values[idx[J]])
        wall = diff.substitute({zvar(i): MultiPoly.variable(space, zvar(j))})
        if not wall.is_zero():
            violations.append((i, j, I, J, wall))
    return violations


# -- section-2 fundamental classes on a Grassmannian -------------------------

def fund_U(subset, m: int, n: int) -> FactoredRational:
    """U_I for an m-subset of [n], as a factored rational in t and z."""
    shape = FlagShape.grassmann(m, n)
    I = _embed_subset(subset, m, n)
    return weight_U(Theory.FUND, shape, I)


@dataclass(frozen=True)
class FundW:
    """Lazy symmetrization handle; evaluated only through restrictions."""

    subset: tuple[int, ...]
    m: int
    n: int

    def restrict(self, at_subset) -> FactoredRational:
        shape = FlagShape.grassmann(self.m, self.n)
        I = _embed_subset(self.subset, self.m, self.n)
        at = _embed_subset(at_subset, self.m, self.n)
        return weight_W_restriction(Theory.FUND, shape, I, at,
                                    Permutation.identity(self.n))


def fund_W(subset, m: int, n: int) -> FundW:
    return FundW(tuple(sorted(subset)), m, n)


def _embed_subset(subset, m: int, n: int) -> IndexTuple:
    first = tuple(sorted(subset))
    if len(first) != m or any(not 1 <= x <= n for x in first):
        raise ValueError(f"not an {m}-subset of [{n}]: {subset}")
    rest = tuple(x for x in range(1, n + 1) if x not in first)
    return IndexTuple((first, rest))
