"""Numeric kernel for theta functions and elliptic weight functions.

Everything here evaluates over the complex numbers for a fixed nome q,
|q| < 1, with the q-product truncated at a configurable order:

    theta(x) = (x^(1/2) - x^(-1/2)) prod_{s=1..trunc} (1 - q^s x)(1 - q^s / x).

Arguments are *monomials* in the generators z_i, mu_k, h: an exponent vector
applied to fixed complex logarithm assignments.  Half powers are computed as
exp of half the accumulated logarithm, never as a principal-branch square
root of the evaluated argument, so all identities are branch-consistent.

The elliptic weight functions are evaluated per fixed-point restriction,
summing the Sym_lambda substitutions of U^E.  Numerator and denominator theta
arguments of each summand are canonicalized (theta is odd under inversion)
and cancelled as multisets before any numeric division; restrictions at
z_i = z_j walls that still leave a genuine per-term pole are obtained by
polynomial extrapolation along a short path to the wall.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass
from fractions import Fraction

from .flags import (FlagShape, IndexTuple, Permutation, act, enumerate_tuples,
                    j_invariant, neighbor_pairs, p_invariant, tuple_index)
from .scalars import HBAR, Var, muvar, zvar
from .weights import GKMTuple, Theory, _sym_permutations


class NearPole(ArithmeticError):
    """A theta denominator fell below the working tolerance."""


class NonConvergence(ArithmeticError):
    """Extrapolants failed to settle within the working tolerance."""


# ---------------------------------------------------------------------------
# monomial arguments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mono:
    """Multiplicative argument x = prod generator^exponent (halves allowed)."""

    exps: tuple  # sorted ((Var, Fraction), ...), zero exponents dropped

    @classmethod
    def of(cls, table: dict) -> "Mono":
        items = []
        for v, e in table.items():
            e = Fraction(e)
            if e.denominator not in (1, 2):
                raise ValueError("exponents must have denominator 1 or 2")
            if e:
                items.append((v, e))
        items.sort(key=lambda ve: ve[0].name)
        return cls(tuple(items))

    @classmethod
    def one(cls) -> "Mono":
        return cls(())

    def __mul__(self, other: "Mono") -> "Mono":
        table = dict(self.exps)
        for v, e in other.exps:
            table[v] = table.get(v, 0) + e
        return Mono.of(table)

    def inv(self) -> "Mono":
        return Mono(tuple((v, -e) for v, e in self.exps))

    def __pow__(self, k: int) -> "Mono":
        return Mono.of({v: e * k for v, e in self.exps})

    def is_one(self) -> bool:
        return not self.exps

    def log(self, logs: dict) -> complex:
        return sum(complex(e) * logs[v] for v, e in self.exps)

    def label(self) -> str:
        if not self.exps:
            return "1"
        return "*".join(f"{v.name}^{e}" if e != 1 else v.name for v, e in self.exps)


def zarg(i: int) -> Mono:
    return Mono.of({zvar(i): 1})


def ratio(num: Var, den: Var) -> Mono:
    if num == den:
        return Mono.one()
    return Mono.of({num: 1, den: -1})


# ---------------------------------------------------------------------------
# evaluation context
# ---------------------------------------------------------------------------

class EllipticContext:
    """Immutable numeric environment: nome, truncation, logs, tolerance, seed."""

    __slots__ = ("q", "trunc", "logs", "tol", "seed", "_qpows", "_theta_cache", "_tp1")

    def __init__(self, q: complex, trunc: int, logs: dict, tol: float = 1e-9,
                 seed: int = 0):
        if abs(q) >= 1:
            raise ValueError("need |q| < 1")
        if trunc < 1:
            raise ValueError("need trunc >= 1")
        if abs(q) ** trunc >= tol / 100 and abs(q) > 0:
            raise ValueError("truncation inadequate: |q|^trunc must be below tol/100")
        self.q = complex(q)
        self.trunc = trunc
        self.logs = dict(logs)
        self.tol = tol
        self.seed = seed
        qp = []
        p = 1.0 + 0j
        for _ in range(trunc):
            p *= self.q
            qp.append(p)
        self._qpows = qp
        self._theta_cache = {}
        self._tp1 = None

    # -- derived contexts ---------------------------------------------

    def with_logs(self, updates: dict) -> "EllipticContext":
        logs = dict(self.logs)
        logs.update(updates)
        return EllipticContext(self.q, self.trunc, logs, self.tol, self.seed)

    def degenerate(self, i: int, j: int, offset: complex = 0.0) -> "EllipticContext":
        """Move z_i onto z_j (optionally offset by `offset` in log space)."""
        return self.with_logs({zvar(i): self.logs[zvar(j)] + offset})

    def tau_twisted(self, shape: FlagShape) -> "EllipticContext":
        """The dynamical substitution mu_i -> h^(lambda_i) / mu_i, on logs."""
        lh = self.logs[HBAR]
        updates = {muvar(i): shape.lambdas[i - 1] * lh - self.logs[muvar(i)]
                   for i in range(1, shape.N + 1)}
        return self.with_logs(updates)

    # -- theta machinery -------------------------------------------------

    def theta_log(self, u: complex) -> complex:
        """theta evaluated at x = exp(u), branch fixed by u itself."""
        half = cmath.exp(u / 2)
        x = half * half
        out = half - 1 / half
        for qs in self._qpows:
            out *= (1 - qs * x) * (1 - qs / x)
        return out

    def theta(self, x: Mono) -> complex:
        key = x.exps
        val = self._theta_cache.get(key)
        if val is None:
            if not key:
                val = 0j
            else:
                val = self.theta_log(x.log(self.logs))
            self._theta_cache[key] = val
        return val

    def theta_prime_1(self) -> complex:
        """theta'(1) = prod (1 - q^s)^2."""
        if self._tp1 is None:
            out = 1.0 + 0j
            for qs in self._qpows:
                t = 1 - qs
                out *= t * t
            self._tp1 = out
        return self._tp1

    def theta_log_derivative(self, u: complex) -> complex:
        """d/du log theta(exp(u)); used by L'Hopital style oracles."""
        half = cmath.exp(u / 2)
        x = half * half
        out = 0.5 * (half + 1 / half) / (half - 1 / half)
        for qs in self._qpows:
            out += -qs * x / (1 - qs * x) + (qs / x) / (1 - qs / x)
        return out

    def value(self, x: Mono) -> complex:
        return cmath.exp(x.log(self.logs))


def theta(x: Mono, ctx: EllipticContext) -> complex:
    return ctx.theta(x)


def theta_prime_1(ctx: EllipticContext) -> complex:
    return ctx.theta_prime_1()


def delta(x: Mono, y: Mono, ctx: EllipticContext) -> complex:
    """delta(x, y) = theta(xy) theta'(1) / (theta(x) theta(y))."""
    tx = ctx.theta(x)
    ty = ctx.theta(y)
    if abs(tx) <= ctx.tol or abs(ty) <= ctx.tol:
        raise NearPole("theta denominator below tolerance in delta")
    return ctx.theta(x * y) * ctx.theta_prime_1() / (tx * ty)


def fay_residual(x1: Mono, x2: Mono, y1: Mono, y2: Mono,
                 ctx: EllipticContext) -> complex:
    """Left side of the trisecant identity with x3, y3 completed internally."""
    x3 = (x1 * x2).inv()
    y3 = (y1 * y2).inv()
    return (delta(x1, y2, ctx) * delta(x2, y1.inv(), ctx)
            + delta(x2, y3, ctx) * delta(x3, y2.inv(), ctx)
            + delta(x3, y1, ctx) * delta(x1, y3.inv(), ctx))


# ---------------------------------------------------------------------------
# seeded generic points
# ---------------------------------------------------------------------------

def generators_for(shape: FlagShape) -> tuple[Var, ...]:
    gens = [zvar(i) for i in range(1, shape.n + 1)]
    gens.extend(muvar(k) for k in range(1, shape.N + 1))
    gens.append(HBAR)
    return tuple(gens)


def generic_context(shape: FlagShape, q: complex = 0.1, trunc: int = 40,
                    tol: float = 1e-9, seed: int = 0) -> EllipticContext:
    """Seeded random log assignments on an annulus around |x| = 1."""
    rng = random.Random(seed)
    logs = {}
    for v in generators_for(shape):
        logs[v] = complex(rng.uniform(-0.35, 0.35),
                          rng.uniform(0.25, 2 * cmath.pi - 0.25))
    return EllipticContext(q, trunc, logs, tol, seed)


def retrying(shape: FlagShape, fn, q=0.1, trunc=40, tol=1e-9, seed=0, attempts=8):
    """Run fn(ctx) on seeded generic contexts, resampling on NearPole."""
    last = None
    for t in range(attempts):
        ctx = generic_context(shape, q, trunc, tol, seed + 9001 * t)
        try:
            return fn(ctx), ctx
        except NearPole as exc:
            last = exc
    raise NearPole(f"no generic point found after {attempts} attempts: {last}")


# ---------------------------------------------------------------------------
# elliptic weight functions
# ---------------------------------------------------------------------------

def _canonical(arg: Mono):
    """Orient an argument; theta(1/x) = -theta(x) contributes the sign."""
    if not arg.exps:
        return arg, 1
    v, e = arg.exps[0]
    if e < 0:
        return arg.inv(), -1
    return arg, 1


def _term_theta_lists(shape: FlagShape, Iprime: IndexTuple, at: IndexTuple,
                      sigma: Permutation, pi) -> tuple[list, list, int]:
    """Numerator/denominator theta arguments of one Sym summand of U^E."""

    def slot(k: int, a: int) -> Var:
        # t^(k)_a resolved at the fixed point; the top level carries the
        # sigma-relabelled free z variables
        if k == shape.N:
            return zvar(sigma(a))
        return zvar(at.element(k, pi[k - 1][a - 1]))

    num: list[Mono] = []
    den: list[Mono] = []
    tp1_pow = Iprime.dim
    h = Mono.of({HBAR: 1})
    for k in range(1, shape.N):
        lk, lk1 = shape.prefix(k), shape.prefix(k + 1)
        for a in range(1, lk + 1):
            ika = Iprime.element(k, a)
            for b in range(1, lk1 + 1):
                ik1b = Iprime.element(k + 1, b)
                x = ratio(slot(k + 1, b), slot(k, a))
                if ik1b < ika:
                    num.append(x * h)
                    den.append(h)
                elif ik1b == ika:
                    jj = j_invariant(Iprime, k, a)
                    e = 1 + p_invariant(Iprime, jj, ika) - p_invariant(Iprime, k + 1, ika)
                    m = Mono.of({muvar(k + 1): 1, muvar(jj): -1, HBAR: e})
                    num.append(x * m)
                    den.append(m)
                else:
                    num.append(x)
        for b in range(1, lk + 1):
            for a in range(1, lk + 1):
                tb_over_ta = ratio(slot(k, b), slot(k, a))
                if a < b:
                    den.append(tb_over_ta)
                elif b < a:
                    num.append(h)
                    den.append(tb_over_ta * h)
    return num, den, tp1_pow


def _eval_term(num, den, tp1_pow, ctx: EllipticContext) -> complex:
    """Evaluate a factored theta product with symbolic cancellation first."""
    counts: dict = {}
    sign = 1
    for arg in num:
        c, s = _canonical(arg)
        sign *= s
        counts[c] = counts.get(c, 0) + 1
    for arg in den:
        c, s = _canonical(arg)
        sign *= s
        counts[c] = counts.get(c, 0) - 1
    val = complex(sign) * ctx.theta_prime_1() ** tp1_pow
    for arg, e in counts.items():
        if not e:
            continue
        t = ctx.theta(arg)
        if e > 0:
            if t == 0:
                return 0j
            val *= t ** e
        else:
            if abs(t) <= ctx.tol:
                raise NearPole(f"denominator theta({arg.label()}) below tolerance")
            val /= t ** (-e)
    return val


def elliptic_weight_restriction(shape: FlagShape, I: IndexTuple, at: IndexTuple,
                                sigma: Permutation, ctx: EllipticContext) -> complex:
    """W^E_{sigma,I} evaluated at the fixed point `at`."""
    Iprime = act(sigma, I)
    total = 0j
    for pi in _sym_permutations(shape):
        num, den, tp1_pow = _term_theta_lists(shape, Iprime, at, sigma, pi)
        total += _eval_term(num, den, tp1_pow, ctx)
    return total


def elliptic_class_tuple(shape: FlagShape, I: IndexTuple, sigma: Permutation,
                         ctx: EllipticContext) -> GKMTuple:
    values = tuple(elliptic_weight_restriction(shape, I, at, sigma, ctx)
                   for at in enumerate_tuples(shape))
    return GKMTuple(Theory.ELL, shape, values, I, sigma)


# ---------------------------------------------------------------------------
# extrapolation and numeric checks
# ---------------------------------------------------------------------------

def extrapolate_to_zero(hs, vals, tol: float):
    """Neville polynomial extrapolation of vals(h) to h = 0.

    Raises NonConvergence when the last two extrapolants disagree by more
    than tol relative to the result's scale.
    """
    n = len(vals)
    if n < 3:
        raise ValueError("need at least three path points")
    T = [list(vals)]
    for m in range(1, n):
        row = []
        prev = T[m - 1]
        for j in range(n - m):
            num = hs[j] * prev[j + 1] - hs[j + m] * prev[j]
            row.append(num / (hs[j] - hs[j + m]))
        T.append(row)
    best, prior = T[n - 1][0], T[n - 2][0]
    scale = max(1.0, abs(best))
    if abs(best - prior) > tol * scale:
        raise NonConvergence(
            f"extrapolants disagree: {abs(best - prior):.3e} > {tol:.1e}")
    return best


def gkm_check_numeric(shape: FlagShape, I: IndexTuple, sigma: Permutation,
                      ctx: EllipticContext, pair=None) -> float:
    """Max |f_I' - f_J'| over (i,j)-neighboring fixed points at z_i = z_j.

    Entries whose summands have an honest pole on the wall (possible once a
    degenerate pair sits inside a proper prefix I^(k)) are compared through
    extrapolation along a short path onto the wall.
    """
    pairs = neighbor_pairs(shape)
    if pair is not None:
        pairs = [p for p in pairs if (p[0], p[1]) == tuple(pair)]
    idx = tuple_index(shape)
    worst = 0.0
    for i, j, L, Lp in pairs:
        if idx[L] > idx[Lp]:
            continue

        def diff_at(offset: complex) -> complex:
            dctx = ctx.degenerate(i, j, offset)
            a = elliptic_weight_restriction(shape, I, L, sigma, dctx)
            b = elliptic_weight_restriction(shape, I, Lp, sigma, dctx)
            return a - b

        try:
            residual = abs(diff_at(0.0))
        except (NearPole, ZeroDivisionError):
            hs = [0.05 / 2 ** s for s in range(7)]
            vals = [diff_at(h) for h in hs]
            residual = abs(extrapolate_to_zero(hs, vals, ctx.tol))
        worst = max(worst, residual)
    return worst


def removable_limit(ctx: EllipticContext, path=None) -> complex:
    """The structure-constant limit with the removable singularity at r = 1:

        theta'(1)^2 * lim_{r->1} (theta(r M)/theta(M) - theta(r h)/theta(h))
                                 / theta(r),
    with M = mu_2/mu_1.  Extrapolated along `path` (default: a ratio-2
    sequence of multiplicative offsets).
    """
    lM = ctx.logs[muvar(2)] - ctx.logs[muvar(1)]
    lh = ctx.logs[HBAR]
    tM = ctx.theta_log(lM)
    th = ctx.theta_log(lh)
    if abs(tM) <= ctx.tol or abs(th) <= ctx.tol:
        raise NearPole("theta(mu_2/mu_1) or theta(h) below tolerance")
    tp1 = ctx.theta_prime_1()

    def g(u: complex) -> complex:
        tr = ctx.theta_log(u)
        if abs(tr) == 0.0:
            raise NearPole("path point sits on the singularity")
        return tp1 * tp1 * (ctx.theta_log(u + lM) / tM
                            - ctx.theta_log(u + lh) / th) / tr

    if path is None:
        hs = [0.2 / 2 ** s for s in range(8)]
    else:
        hs = [cmath.log(r) for r in path]
    vals = [g(u) for u in hs]
    return extrapolate_to_zero(hs, vals, ctx.tol)
