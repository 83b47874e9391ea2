"""Littlewood-Richardson-type structure constants and basis expansions.

A product of two basis classes expands as

    class_I * class_J = sum_K LR_{I,J}^K class_K,

and each coefficient is a twisted inner product of GKM tuples:

    LR = <W_{id,I} W_{id,J}, W_{s0,K}>               (FUND, H)
    LR = <W_{id,I} W_{id,J}, (-h)^(-dim_K) iota[W_{s0,K}]>     (K)
    LR = <W_{id,I} W_{id,J}, (th(h)/th'(1))^dim tau[W_{s0,K}]> (E, numeric)

computed per K, fully reduced; exact entries are genuine (Laurent)
polynomials in z and h.  For the cohomological theories every quantity in
the sum is homogeneous of total degree dim_lambda in (z, h) jointly, so the
non-equivariant table (all z_i = 0) equals the top h coefficient and can be
extracted from exact evaluations at pinned integer z points; this graded
route is cross-checked internally at two points and against the full
symbolic route in the test suite.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from . import elliptic as ell
from .flags import (FlagShape, IndexTuple, Permutation, enumerate_tuples,
                    subset_to_partition)
from .pairing import dual_class, inner, inner_multi
from .scalars import FactoredRational, HBAR, MultiPoly, zvar
from .weights import EXACT_THEORIES, GKMTuple, Theory, class_tuple, space_for


class NonPolynomial(ArithmeticError):
    """An exact structure constant failed to reduce to a polynomial."""


@dataclass
class LRTable:
    theory: Theory
    shape: FlagShape
    i: IndexTuple
    j: IndexTuple
    entries: dict
    meta: dict = field(default_factory=dict)

    def partition_label(self, K: IndexTuple):
        if self.shape.N != 2:
            return None
        lam = subset_to_partition(K.parts[0], self.shape.lambdas[0], self.shape.n)
        return tuple(x for x in lam if x) or (0,)

    def by_partition(self) -> dict:
        """Entries keyed by stripped partition (Grassmannian shapes only)."""
        if self.shape.N != 2:
            raise ValueError("partition labels exist for Grassmannian shapes")
        return {self.partition_label(K): v for K, v in self.entries.items()}


@lru_cache(maxsize=None)
def product_tuple(theory: Theory, shape: FlagShape, I: IndexTuple, J: IndexTuple,
                  z_values: tuple | None = None) -> GKMTuple:
    """Entrywise product of the two identity-twisted classes."""
    ident = Permutation.identity(shape.n)
    f = class_tuple(theory, shape, I, ident, z_values=z_values)
    g = class_tuple(theory, shape, J, ident, z_values=z_values)
    return f.entrywise_product(g)


def lr_coefficient(theory: Theory, shape: FlagShape, I: IndexTuple, J: IndexTuple,
                   K: IndexTuple, ctx: "ell.EllipticContext | None" = None):
    """A single structure constant; exact MultiPoly or complex (elliptic)."""
    ident = Permutation.identity(shape.n)
    if theory is Theory.ELL:
        f = ell.elliptic_class_tuple(shape, I, ident, ctx)
        g = ell.elliptic_class_tuple(shape, J, ident, ctx)
        return inner_multi([f, g], dual_class(theory, shape, K, ctx), ctx)
    f = class_tuple(theory, shape, I, ident)
    g = class_tuple(theory, shape, J, ident)
    val = inner_multi([f, g], dual_class(theory, shape, K))
    poly = val.as_poly()
    if poly is None:
        raise NonPolynomial(
            f"structure constant did not reduce: denominators {list(val.den)}")
    return poly


def _lr_task(args):
    theory, shape, I, J, K = args
    return K, lr_coefficient(theory, shape, I, J, K)


def expand_product(theory: Theory, shape: FlagShape, I: IndexTuple, J: IndexTuple,
                   ctx: "ell.EllipticContext | None" = None, *,
                   specialize: str | None = None, threads: int = 1) -> LRTable:
    """All structure constants of class_I * class_J, zero entries omitted.

    specialize: None for the full equivariant table; "z0" (FUND/H) or "z1"
    (K) for the non-equivariant one.  The cohomological "z0" table is
    computed by the graded evaluation route, which is exact.
    """
    if specialize == "z0" and theory in (Theory.FUND, Theory.H):
        return _expand_nonequivariant_graded(theory, shape, I, J)
    meta = {"specialize": specialize or "none"}
    entries = {}
    targets = enumerate_tuples(shape)
    if theory in EXACT_THEORIES and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                _lr_task, [(theory, shape, I, J, K) for K in targets]))
        table = dict(results)
        pairs = [(K, table[K]) for K in targets]
    else:
        pairs = [(K, lr_coefficient(theory, shape, I, J, K, ctx)) for K in targets]
    for K, val in pairs:
        if theory is Theory.ELL:
            if abs(val) > (ctx.tol if ctx else 1e-9) * 100:
                entries[K] = val
        elif not val.is_zero():
            entries[K] = val
    table = LRTable(theory, shape, I, J, entries, meta)
    if specialize == "z1":
        return specialize_nonequivariant(table, "z1")
    if specialize == "z0":
        return specialize_nonequivariant(table, "z0")
    return table


def specialize_nonequivariant(table: LRTable, convention: str | None = None) -> LRTable:
    """Plug z_i = 0 (FUND/H) or z_i = 1 (K) into a computed table."""
    if table.theory not in EXACT_THEORIES:
        raise ValueError("specialization applies to exact tables")
    if convention is None:
        convention = "z1" if table.theory is Theory.K else "z0"
    value = 1 if convention == "z1" else 0
    space = space_for(table.shape)
    sub = {zvar(i): MultiPoly.const(space, value)
           for i in range(1, table.shape.n + 1)}
    entries = {}
    for K, poly in table.entries.items():
        p = poly.substitute(sub)
        if not p.is_zero():
            entries[K] = p
    meta = dict(table.meta)
    meta["specialize"] = convention
    return LRTable(table.theory, table.shape, table.i, table.j, entries, meta)


# -- graded non-equivariant route ---------------------------------------------

def _pinned_points(n: int) -> tuple[tuple, tuple]:
    primes = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    p1 = tuple((i, i) for i in range(1, n + 1))
    p2 = tuple((i, primes[i - 1]) for i in range(1, n + 1))
    return p1, p2


def _pinned_lr(theory: Theory, shape: FlagShape, I: IndexTuple, J: IndexTuple,
               K: IndexTuple, z_values: tuple) -> MultiPoly:
    from .pairing import denoms, sum_over_common_denominator
    space = space_for(shape)
    zsub = {zvar(i): MultiPoly.const(space, v) for i, v in z_values}
    ident = Permutation.identity(shape.n)
    s0 = Permutation.longest(shape.n)
    f = class_tuple(theory, shape, I, ident, z_values=z_values)
    g = class_tuple(theory, shape, J, ident, z_values=z_values)
    col = class_tuple(theory, shape, K, s0, z_values=z_values)
    terms = []
    for pos, L in enumerate(enumerate_tuples(shape)):
        vals = [f.values[pos], g.values[pos], col.values[pos]]
        if any(v.is_zero() for v in vals):
            continue
        pair = denoms(theory, shape, L)
        dens = [p.substitute(zsub) for p in pair.R]
        if pair.Q is not None:
            dens.extend(p.substitute(zsub) for p in pair.Q)
        term = FactoredRational.from_ratio(MultiPoly.const(space, 1), dens,
                                           reduce=False)
        for v in sorted(vals, key=lambda v: len(v.num.terms)):
            term = term * v
        terms.append(term)
    poly = sum_over_common_denominator(terms, space).as_poly()
    if poly is None:
        raise NonPolynomial("pinned structure constant did not reduce")
    return poly


def _expand_nonequivariant_graded(theory: Theory, shape: FlagShape,
                                  I: IndexTuple, J: IndexTuple) -> LRTable:
    """The z = 0 table from exact pinned evaluations.

    Every restriction is homogeneous of degree dim_lambda in (z, h), and
    cross-checked at two pinned points; for FUND (no h) the z = 0 value is
    the constant term, nonzero only in top codimension.
    """
    space = space_for(shape)
    d = shape.dim
    p1, p2 = _pinned_points(shape.n)
    entries = {}
    for K in enumerate_tuples(shape):
        v1 = _pinned_lr(theory, shape, I, J, K, p1)
        v2 = _pinned_lr(theory, shape, I, J, K, p2)
        if theory is Theory.H:
            c1 = v1.coefficient_of(HBAR, d).constant_value()
            c2 = v2.coefficient_of(HBAR, d).constant_value()
            if c1 is None or c1 != c2 or v1.max_power(HBAR) > d:
                raise ArithmeticError("graded evaluation inconsistent")
            if c1:
                entries[K] = MultiPoly.monomial(space, {HBAR: d}, c1)
        else:
            codim_match = (shape.dim - K.dim) == (shape.dim - I.dim) + (shape.dim - J.dim)
            c1 = v1.constant_value()
            c2 = v2.constant_value()
            if c1 is None or c2 is None:
                raise ArithmeticError("graded evaluation inconsistent")
            if codim_match:
                if c1 != c2:
                    raise ArithmeticError("graded evaluation inconsistent")
                if c1:
                    entries[K] = MultiPoly.const(space, c1)
    return LRTable(theory, shape, I, J, entries, {"specialize": "z0"})


# -- elliptic projective-space closed form -------------------------------------

def pn_shape(n: int) -> FlagShape:
    """Projective space with n torus fixed points: shape (1, n-1)."""
    if n < 2:
        raise ValueError("need at least two fixed points")
    return FlagShape((1, n - 1))


def pn_tuple(n: int, k: int) -> IndexTuple:
    """I_k = ({k}, [n] - {k})."""
    return IndexTuple(((k,), tuple(x for x in range(1, n + 1) if x != k)))


def elliptic_pn_closed_form(n: int, k: int, l: int, m: int,
                            ctx: "ell.EllipticContext") -> complex:
    """LR_{k,l}^m on projective space with n fixed points; k <= l.

    Vanishes for m > k; for m = k it is the displayed theta product.  For
    m < k no closed form is available and ValueError is raised.
    """
    if not (1 <= k <= l <= n):
        raise ValueError("need 1 <= k <= l <= n")
    if not 1 <= m <= n:
        raise ValueError("m out of range")
    if m > k:
        return 0j
    if m < k:
        raise ValueError("no closed form below the diagonal (m < k)")
    from .scalars import muvar
    h = ell.Mono.of({HBAR: 1})
    mu = ell.Mono.of({muvar(2): 1, muvar(1): -1, HBAR: 2 - l})
    val = ctx.theta_prime_1() ** (l - 1)
    num = ctx.theta(ell.ratio(zvar(l), zvar(k)) * mu)
    den = ctx.theta(mu)
    if abs(den) <= ctx.tol:
        raise ell.NearPole("theta(mu_2/mu_1 h^(2-l)) below tolerance")
    val *= num / den
    th = ctx.theta(h)
    if abs(th) <= ctx.tol:
        raise ell.NearPole("theta(h) below tolerance")
    for i in range(1, l):
        val *= ctx.theta(ell.ratio(zvar(i), zvar(k)) * h) / th
    for i in range(l + 1, n + 1):
        val *= ctx.theta(ell.ratio(zvar(i), zvar(k)))
    return val


# -- rendering ------------------------------------------------------------------

def _entry_value_json(theory: Theory, value):
    if theory is Theory.ELL:
        return [value.real, value.imag]
    return value.to_str()


def render_table(table: LRTable, fmt: str = "text") -> str:
    """Deterministic text or JSON rendering of an expansion table."""
    keys = [K for K in enumerate_tuples(table.shape) if K in table.entries]
    if fmt == "text":
        lines = []
        for K in keys:
            value = table.entries[K]
            if table.shape.N == 2:
                label = "[" + ",".join(map(str, table.partition_label(K))) + "]"
            else:
                label = K.label()
            text = (f"({value.real:+.12e}, {value.imag:+.12e})"
                    if table.theory is Theory.ELL else value.to_str())
            lines.append(f"{label} {text}")
        return "\n".join(lines) if lines else "{}"
    if fmt != "json":
        raise ValueError("format must be text or json")
    entries = []
    for K in keys:
        item = {"k": K.label()}
        if table.shape.N == 2:
            item["partition"] = list(table.partition_label(K))
        item["coefficient"] = _entry_value_json(table.theory, table.entries[K])
        entries.append(item)
    doc = {
        "schema": 1,
        "theory": table.theory.value,
        "lambda": list(table.shape.lambdas),
        "i": table.i.label(),
        "j": table.j.label(),
        "entries": entries,
        "meta": dict(table.meta),
    }
    return json.dumps(doc, sort_keys=False)
