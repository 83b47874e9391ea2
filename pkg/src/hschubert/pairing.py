"""Fixed-point inner products, the dual-basis twists, and orthogonality.

For each theory the pairing of two GKM tuples is the localization sum

    <f, g> = sum_{I in I_lambda} f(z_I) g(z_I) / (R_I Q_I)

with the Euler-type denominators

    H:    R_I = prod (z_b - z_a),        Q_I = prod (z_b - z_a + h),
    K:    R_I = prod (1 - z_a/z_b),      Q_I = prod (1 + z_b/(z_a h)),
    E:    R_I = prod theta(z_b/z_a),     Q_I = prod theta(h z_b/z_a),

products over k < l, a in I_k, b in I_l; the undeformed Grassmannian pairing
uses R only.  The dual basis is the s_0-twisted family, further twisted by
(-h)^(-dim_J) iota in K theory (all variables inverted) and by
(theta(h)/theta'(1))^dim_lambda tau in the elliptic theory (mu_i ->
h^(lambda_i)/mu_i).  Orthogonality of the two families is verified by
computing the full Gram matrix; for the exact theories the reduction of each
entry to an integer is itself the test.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import elliptic as ell
from .flags import FlagShape, IndexTuple, Permutation, enumerate_tuples
from .scalars import HBAR, FactoredRational, MultiPoly, zvar
from .weights import EXACT_THEORIES, GKMTuple, Theory, class_tuple, space_for


@dataclass(frozen=True)
class DenomPair:
    """R_I and Q_I, kept as factor lists (exact) or complex values (elliptic)."""

    theory: Theory
    R: tuple | complex
    Q: tuple | complex | None

    def R_poly(self) -> MultiPoly:
        out = None
        for f in self.R:
            out = f if out is None else out * f
        return out

    def Q_poly(self) -> MultiPoly:
        out = None
        for f in self.Q:
            out = f if out is None else out * f
        return out

    def reciprocal(self, space) -> FactoredRational:
        """1/(R_I Q_I) as a factored rational."""
        factors = list(self.R) + (list(self.Q) if self.Q is not None else [])
        return FactoredRational.from_ratio(MultiPoly.const(space, 1), factors,
                                           reduce=False)


def _cross_pairs(shape: FlagShape, I: IndexTuple):
    for k in range(shape.N):
        for l in range(k + 1, shape.N):
            for a in I.parts[k]:
                for b in I.parts[l]:
                    yield a, b


def denoms(theory: Theory, shape: FlagShape, I: IndexTuple,
           ctx: "ell.EllipticContext | None" = None) -> DenomPair:
    """The R_I / Q_I denominator pair of a fixed point."""
    if theory is Theory.ELL:
        if ctx is None:
            raise ValueError("elliptic denominators need an EllipticContext")
        R = 1.0 + 0j
        Q = 1.0 + 0j
        h = ell.Mono.of({HBAR: 1})
        for a, b in _cross_pairs(shape, I):
            x = ell.ratio(zvar(b), zvar(a))
            R *= ctx.theta(x)
            Q *= ctx.theta(x * h)
        return DenomPair(theory, R, Q)
    space = space_for(shape)
    h = MultiPoly.variable(space, HBAR)
    R = []
    Q = []
    for a, b in _cross_pairs(shape, I):
        za = MultiPoly.variable(space, zvar(a))
        zb = MultiPoly.variable(space, zvar(b))
        if theory in (Theory.FUND, Theory.H):
            R.append(zb - za)
            if theory is Theory.H:
                Q.append(zb - za + h)
        elif theory is Theory.K:
            # 1 - z_a/z_b and 1 + z_b/(z_a h), in the Laurent substrate
            R.append((zb - za) * MultiPoly.monomial(space, {zvar(b): -1}))
            Q.append((za * h + zb) *
                     MultiPoly.monomial(space, {zvar(a): -1, HBAR: -1}))
    return DenomPair(theory, tuple(R), tuple(Q) if theory is not Theory.FUND else None)


def sum_over_common_denominator(terms, space) -> FactoredRational:
    """Sum factored rationals over the multiset lcm of their denominators.

    The single final reduction of the accumulated numerator is where the
    localization sums collapse to polynomials.
    """
    nonzero = [t for t in terms if not t.is_zero()]
    if not nonzero:
        return FactoredRational.from_poly(MultiPoly.zero(space))
    lcm: dict = {}
    for t in nonzero:
        for fac, m in t.den.items():
            if lcm.get(fac, 0) < m:
                lcm[fac] = m
    total = MultiPoly.zero(space)
    for t in nonzero:
        n = t.num
        for fac, m in lcm.items():
            for _ in range(m - t.den.get(fac, 0)):
                n = n * fac.poly
        total = total + n
    return FactoredRational(total, lcm, reduce=True)


def inner_multi(factors, col: GKMTuple, ctx: "ell.EllipticContext | None" = None):
    """<prod(factors), col> without expanding the entrywise product first.

    Multiplying each fixed-point term by the reciprocal Euler denominators
    before the large numerator products keeps the exact cancellations early
    and the intermediate polynomials small.
    """
    shape = col.shape
    if col.theory is Theory.ELL:
        total = 0j
        for pos, L in enumerate(enumerate_tuples(shape)):
            vals = [t.values[pos] for t in factors] + [col.values[pos]]
            if any(v == 0 for v in vals):
                continue
            pair = denoms(Theory.ELL, shape, L, ctx)
            dd = pair.R * pair.Q
            if abs(dd) <= ctx.tol ** 2:
                raise ell.NearPole(
                    f"pairing denominator below tolerance at {L.label()}")
            prod = 1.0 + 0j
            for v in vals:
                prod *= v
            total += prod / dd
        return total
    space = space_for(shape)
    terms = []
    for pos, L in enumerate(enumerate_tuples(shape)):
        vals = [t.values[pos] for t in factors] + [col.values[pos]]
        if any(v.is_zero() for v in vals):
            continue
        vals.sort(key=lambda v: len(v.num.terms))
        term = _reciprocal_denoms(col.theory, shape, L)
        for v in vals:
            term = term * v
        terms.append(term)
    return sum_over_common_denominator(terms, space)


def inner(f: GKMTuple, g: GKMTuple,
          ctx: "ell.EllipticContext | None" = None):
    """<f, g>: exact FactoredRational for FUND/H/K, complex for elliptic."""
    if f.theory != g.theory or f.shape != g.shape:
        raise ValueError("mismatched tuples")
    return inner_multi([f], g, ctx)


@lru_cache(maxsize=None)
def _reciprocal_denoms(theory: Theory, shape: FlagShape, L: IndexTuple) -> FactoredRational:
    return denoms(theory, shape, L).reciprocal(space_for(shape))


# -- involutions -------------------------------------------------------------

def iota(t: GKMTuple) -> GKMTuple:
    """K-theory involution: every z_i -> 1/z_i and h -> 1/h, entrywise.

    Because the restriction plugs z values into the t slots, inverting the
    restricted values agrees with restricting the inverted weight function.
    """
    if t.theory is not Theory.K:
        raise ValueError("iota is the K-theory involution")
    space = space_for(t.shape)
    sub = {zvar(i): MultiPoly.monomial(space, {zvar(i): -1})
           for i in range(1, t.shape.n + 1)}
    sub[HBAR] = MultiPoly.monomial(space, {HBAR: -1})
    vals = tuple(v.substitute(sub) for v in t.values)
    return GKMTuple(t.theory, t.shape, vals, t.origin, t.sigma)


def tau(t: GKMTuple, ctx: "ell.EllipticContext") -> GKMTuple:
    """Elliptic involution: re-evaluate with mu_i -> h^(lambda_i)/mu_i."""
    if t.theory is not Theory.ELL:
        raise ValueError("tau is the elliptic involution")
    if t.origin is None or t.sigma is None:
        raise ValueError("tau needs a tuple with weight-function provenance")
    return ell.elliptic_class_tuple(t.shape, t.origin, t.sigma, ctx.tau_twisted(t.shape))


# -- twisted dual columns ------------------------------------------------------

def dual_class(theory: Theory, shape: FlagShape, J: IndexTuple,
               ctx: "ell.EllipticContext | None" = None) -> GKMTuple:
    """The J column of the dual family entering the orthogonality theorems."""
    s0 = Permutation.longest(shape.n)
    if theory in (Theory.FUND, Theory.H):
        return class_tuple(theory, shape, J, s0)
    if theory is Theory.K:
        space = space_for(shape)
        d = J.dim
        unit = MultiPoly.monomial(space, {HBAR: -d}, (-1) ** d)
        return iota(class_tuple(Theory.K, shape, J, s0)).scale(
            FactoredRational.from_poly(unit))
    tctx = ctx.tau_twisted(shape)
    col = ell.elliptic_class_tuple(shape, J, s0, tctx)
    scalar = (ctx.theta(ell.Mono.of({HBAR: 1})) / ctx.theta_prime_1()) ** shape.dim
    return col.scale(scalar)


def orthogonality_check(theory: Theory, shape: FlagShape,
                        ctx: "ell.EllipticContext | None" = None):
    """Gram matrix of <class_I, dual_J> minus the identity.

    Exact theories return FactoredRational deviations (all must be zero);
    the elliptic theory returns complex deviations.
    """
    tuples = enumerate_tuples(shape)
    id_perm = Permutation.identity(shape.n)
    if theory in EXACT_THEORIES:
        rows = [class_tuple(theory, shape, I, id_perm) for I in tuples]
    else:
        rows = [ell.elliptic_class_tuple(shape, I, id_perm, ctx) for I in tuples]
    cols = [dual_class(theory, shape, J, ctx) for J in tuples]
    out = []
    for i, row in enumerate(rows):
        line = []
        for j, col in enumerate(cols):
            val = inner(row, col, ctx)
            line.append(val - (1 if i == j else 0))
        out.append(line)
    return out


def max_deviation(matrix) -> float:
    """Max |entry| of an orthogonality deviation matrix (exact entries must
    first reduce to polynomials; a nonzero exact entry reports as inf)."""
    worst = 0.0
    for line in matrix:
        for entry in line:
            if isinstance(entry, FactoredRational):
                if not entry.is_zero():
                    return float("inf")
            else:
                worst = max(worst, abs(entry))
    return worst
