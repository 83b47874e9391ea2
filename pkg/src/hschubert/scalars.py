"""Exact arithmetic for multivariate Laurent polynomials and factored rationals.

A polynomial lives in a fixed, ordered variable space (z_1 < ... < z_n <
t1_1 < ... < h < mu_1 < ...) and is stored sparsely as a map

    packed exponent vector (one signed digit per variable)  ->  int coefficient

with arbitrary-precision integer coefficients and integer (possibly negative)
exponents.  Packing the exponent vector into a single integer in a balanced
base makes monomial multiplication a plain integer addition, which is the hot
operation everywhere downstream.

Rational functions are kept with *factored* denominators: a numerator
polynomial together with a multiset of small irreducible factors (linear
forms such as z2 - z1 + h, binomials such as z2 + h*z1, or integer
constants).  Monomial factors are units in the Laurent ring and are folded
into the numerator's exponents.  Cancellation is done by repeated exact
division by the stored factors; no general multivariate gcd is ever needed.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass


class PoleError(ArithmeticError):
    """A substitution made a denominator factor identically zero."""


# ---------------------------------------------------------------------------
# variables and variable spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """A named generator: z_i, t^(k)_a, h (the deformation parameter), mu_i."""

    kind: str  # "z" | "t" | "h" | "mu"
    i: int = 0  # z/mu index, or t level
    a: int = 0  # slot within a t level

    @property
    def name(self) -> str:
        if self.kind == "h":
            return "h"
        if self.kind == "t":
            return f"t{self.i}_{self.a}"
        return f"{self.kind}{self.i}"

    def __repr__(self) -> str:
        return self.name


def zvar(i: int) -> Var:
    return Var("z", i)


def tvar(k: int, a: int) -> Var:
    return Var("t", k, a)


def muvar(i: int) -> Var:
    return Var("mu", i)


HBAR = Var("h")

_BASE_BITS = 16
_BASE = 1 << _BASE_BITS
_HALF = _BASE >> 1


class VarSpace:
    """An ordered tuple of variables with exponent-vector packing.

    Exponents are packed as balanced base-2^16 digits, variable 0 in the
    lowest digit, so the packed key of a product is the sum of keys.  Once
    monomial content is stripped all digits are non-negative and the packed
    integers compare in a lexicographic monomial order, which is what the
    division loop uses; `guard` carries the digit top bits for the SWAR
    divisibility test.
    """

    __slots__ = ("vars", "index", "nvars", "_name_map", "guard")

    def __init__(self, variables):
        self.vars = tuple(variables)
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.nvars = len(self.vars)
        self._name_map = {v.name: v for v in self.vars}
        self.guard = sum(_HALF << (_BASE_BITS * i) for i in range(self.nvars))
        if len(self.index) != self.nvars:
            raise ValueError("duplicate variables")

    @classmethod
    def for_flag(cls, lambdas: tuple[int, ...]) -> "VarSpace":
        """Variables for a flag shape: z_1..z_n, then t-levels 1..N-1, then h."""
        n = sum(lambdas)
        variables = [zvar(i) for i in range(1, n + 1)]
        prefix = 0
        for k, lam in enumerate(lambdas[:-1], start=1):
            prefix += lam
            variables.extend(tvar(k, a) for a in range(1, prefix + 1))
        variables.append(HBAR)
        return cls(variables)

    def encode(self, exps) -> int:
        key = 0
        for pos, e in exps:
            if not -_HALF < e < _HALF:
                raise OverflowError("exponent out of packing range")
            key += e << (_BASE_BITS * pos)
        return key

    def decode(self, key: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.nvars):
            d = ((key + _HALF) & (_BASE - 1)) - _HALF
            out.append(d)
            key = (key - d) >> _BASE_BITS
        return tuple(out)

    def total_degree(self, key: int) -> int:
        return sum(self.decode(key))

    def order_key(self, key: int):
        """Graded lex order: total degree first, then z1 > z2 > ... lexicographic."""
        e = self.decode(key)
        return (sum(e), e)

    def var_key(self, v: Var, e: int = 1) -> int:
        return self.encode([(self.index[v], e)])

    def __eq__(self, other):
        return self is other or (isinstance(other, VarSpace) and self.vars == other.vars)

    def __hash__(self):
        return hash(self.vars)

    def __repr__(self):
        return f"VarSpace({', '.join(v.name for v in self.vars)})"


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class MultiPoly:
    """Sparse exact Laurent polynomial over the integers."""

    __slots__ = ("space", "terms", "_hash", "_content")

    def __init__(self, space: VarSpace, terms: dict, *, _clean: bool = False):
        self.space = space
        if _clean:
            self.terms = terms
        else:
            self.terms = {k: c for k, c in terms.items() if c}
        self._hash = None
        self._content = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, space: VarSpace) -> "MultiPoly":
        return cls(space, {}, _clean=True)

    @classmethod
    def const(cls, space: VarSpace, c: int) -> "MultiPoly":
        return cls(space, {0: c} if c else {}, _clean=True)

    @classmethod
    def variable(cls, space: VarSpace, v: Var) -> "MultiPoly":
        return cls(space, {space.var_key(v): 1}, _clean=True)

    @classmethod
    def monomial(cls, space: VarSpace, exps: dict, coeff: int = 1) -> "MultiPoly":
        """exps: map Var -> integer exponent (negative allowed)."""
        if not coeff:
            return cls.zero(space)
        key = space.encode((space.index[v], e) for v, e in exps.items() if e)
        return cls(space, {key: coeff}, _clean=True)

    @classmethod
    def from_exponents(cls, space: VarSpace, table: dict) -> "MultiPoly":
        """table: map exponent tuple (one entry per variable) -> coefficient."""
        terms = {}
        for exps, c in table.items():
            if not c:
                continue
            key = space.encode(enumerate(exps))
            terms[key] = terms.get(key, 0) + c
        return cls(space, terms)

    # -- basic structure ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self):
        """The integer value if this is a constant, else None."""
        if not self.terms:
            return 0
        if len(self.terms) == 1 and 0 in self.terms:
            return self.terms[0]
        return None

    def as_monomial(self):
        """(coeff, packed key) if this has a single term, else None."""
        if len(self.terms) == 1:
            for k, c in self.terms.items():
                return (c, k)
        return None

    def monomial_content(self) -> int:
        """Packed key of the digit-wise minimum exponent vector (cached)."""
        if self._content is not None:
            return self._content
        it = iter(self.terms)
        mins = list(self.space.decode(next(it)))
        for k in it:
            for i, d in enumerate(self.space.decode(k)):
                if d < mins[i]:
                    mins[i] = d
        self._content = self.space.encode(enumerate(mins))
        return self._content

    def total_degree(self):
        """Max total degree over terms (None for the zero polynomial)."""
        if not self.terms:
            return None
        return max(self.space.total_degree(k) for k in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {self.space.total_degree(k) for k in self.terms}
        return len(degs) <= 1

    def max_power(self, v: Var) -> int:
        """Largest exponent of v appearing (0 for the zero polynomial)."""
        pos = self.space.index[v]
        best = 0
        for k in self.terms:
            e = self.space.decode(k)[pos]
            if e > best:
                best = e
        return best

    def coefficient_of(self, v: Var, power: int) -> "MultiPoly":
        """The coefficient of v^power, as a polynomial with v removed."""
        pos = self.space.index[v]
        vkey = self.space.var_key(v, power)
        out = {}
        for k, c in self.terms.items():
            if self.space.decode(k)[pos] == power:
                out[k - vkey] = c
        return MultiPoly(self.space, out, _clean=True)

    # -- ring operations ----------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.space is not other.space and self.space != other.space:
            raise ValueError("operands from different variable spaces")

    def __add__(self, other):
        if isinstance(other, int):
            other = MultiPoly.const(self.space, other)
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return MultiPoly(self.space, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.space, {k: -c for k, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        if isinstance(other, int):
            other = MultiPoly.const(self.space, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return MultiPoly.zero(self.space)
            return MultiPoly(
                self.space, {k: c * other for k, c in self.terms.items()}, _clean=True
            )
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        get = out.get
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                s = get(k, 0) + c1 * c2
                if s:
                    out[k] = s
                else:
                    del out[k]
        return MultiPoly(self.space, out, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            mono = self.as_monomial()
            if mono is None or mono[0] not in (1, -1):
                raise ValueError("negative power of a non-unit")
            c, k = mono
            return MultiPoly(self.space, {k * e: -1 if (c == -1 and e & 1) else 1},
                             _clean=True)
        result = MultiPoly.const(self.space, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.constant_value() == other
        return (
            isinstance(other, MultiPoly)
            and self.space == other.space
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- substitution and evaluation ------------------------------------

    def substitute(self, assignment: dict) -> "MultiPoly":
        """Simultaneously replace variables by polynomials (or integers).

        Monomial targets (including inverses like z_j^-1) are handled by
        exponent rewriting; general polynomial targets require non-negative
        exponents of the substituted variable.
        """
        space = self.space
        targets = {}
        for v, p in assignment.items():
            if isinstance(p, int):
                p = MultiPoly.const(space, p)
            targets[space.index[v]] = p
        if not targets:
            return self
        all_mono = all(p.as_monomial() for p in targets.values())
        if all_mono:
            out = {}
            for k, c in self.terms.items():
                exps = space.decode(k)
                nk = k
                coeff = c
                for pos, p in targets.items():
                    e = exps[pos]
                    if not e:
                        continue
                    mc, mk = p.as_monomial()
                    nk += mk * e - (e << (_BASE_BITS * pos))
                    if mc == 1:
                        pass
                    elif mc == -1:
                        coeff = -coeff if e & 1 else coeff
                    elif e > 0:
                        coeff *= mc ** e
                    else:
                        raise ValueError("negative power of a non-unit constant")
                s = out.get(nk, 0) + coeff
                if s:
                    out[nk] = s
                else:
                    out.pop(nk, None)
            return MultiPoly(space, out)
        # general path: expand powers of targets
        powers: dict[int, list] = {pos: [MultiPoly.const(space, 1)] for pos in targets}
        result = MultiPoly.zero(space)
        for k, c in self.terms.items():
            exps = space.decode(k)
            rest = 0
            factor = MultiPoly.const(space, c)
            ok = True
            for pos, e in enumerate(exps):
                if not e:
                    continue
                if pos not in targets:
                    rest += e << (_BASE_BITS * pos)
                    continue
                p = targets[pos]
                if p.is_zero():
                    if e < 0:
                        raise PoleError("substituting zero into a negative power")
                    ok = False
                    break
                if e < 0:
                    mono = p.as_monomial()
                    if mono is None or mono[0] not in (1, -1):
                        raise ValueError("negative power of a non-monomial target")
                    c0, k0 = mono
                    factor = factor * MultiPoly(
                        space, {k0 * e: -1 if (c0 == -1 and e & 1) else 1}, _clean=True)
                    continue
                cache = powers[pos]
                while len(cache) <= e:
                    cache.append(cache[-1] * p)
                factor = factor * cache[e]
            if ok:
                result = result + factor * MultiPoly(space, {rest: 1}, _clean=True)
        return result

    def evaluate(self, point: dict):
        """Numeric evaluation; point maps every occurring Var to a number."""
        space = self.space
        vals = [point.get(v) for v in space.vars]
        total = 0
        for k, c in self.terms.items():
            term = c
            for pos, e in enumerate(space.decode(k)):
                if e:
                    term *= vals[pos] ** e
            total = total + term
        return total

    # -- canonical text form --------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.space.order_key(kv[0]),
                      reverse=True)

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        space = self.space
        pieces = []
        for k, c in self.sorted_terms():
            exps = space.decode(k)
            factors = []
            for pos, e in enumerate(exps):
                if not e:
                    continue
                name = space.vars[pos].name
                factors.append(name if e == 1 else f"{name}^{e}")
            mag = abs(c)
            if factors:
                body = "*".join(factors)
                if mag != 1:
                    body = f"{mag}*{body}"
            else:
                body = str(mag)
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    __str__ = to_str

    def __repr__(self):
        return f"MultiPoly({self.to_str()})"

    @classmethod
    def parse(cls, space: VarSpace, text: str) -> "MultiPoly":
        """Inverse of to_str (also accepts redundant whitespace)."""
        text = text.strip()
        if text == "0":
            return cls.zero(space)
        out = cls.zero(space)
        for sign, chunk in re.findall(r"\s*([+-]?)\s*([^+-]+)", text):
            coeff = -1 if sign == "-" else 1
            exps = {}
            for token in chunk.strip().split("*"):
                token = token.strip()
                if re.fullmatch(r"\d+", token):
                    coeff *= int(token)
                    continue
                m = re.fullmatch(r"([A-Za-z_0-9]+?)(?:\^(-?\d+))?", token)
                if not m or m.group(1) not in space._name_map:
                    raise ValueError(f"cannot parse monomial token {token!r}")
                v = space._name_map[m.group(1)]
                exps[v] = exps.get(v, 0) + int(m.group(2) or 1)
            out = out + cls.monomial(space, exps, coeff)
        return out


# ---------------------------------------------------------------------------
# exact division
# ---------------------------------------------------------------------------

def _divide_stripped(space: VarSpace, nterms: dict, fsorted):
    """Divide content-stripped term dicts; None when a remainder appears.

    Both operands must have non-negative digits, so plain integer comparison
    of packed keys is a valid (lex) monomial order and divisibility of
    monomials is the SWAR test against the digit top-bit guard.
    """
    (ltk, ltc), rest = fsorted[0], fsorted[1:]
    guard = space.guard
    unit_lc = ltc in (1, -1)
    r = dict(nterms)
    heap = [-k for k in r]
    heapq.heapify(heap)
    pop, push = heapq.heappop, heapq.heappush
    quot = {}
    while heap:
        k = -pop(heap)
        c = r.pop(k, 0)
        if not c:
            continue
        qk = k - ltk
        if (qk + guard) & guard != guard:
            return None
        if unit_lc:
            qc = c * ltc
        else:
            if c % ltc:
                return None
            qc = c // ltc
        quot[qk] = qc
        for fk, fc in rest:
            k2 = qk + fk
            prev = r.get(k2, 0)
            new = prev - qc * fc
            if new:
                if not prev:
                    push(heap, -k2)
                r[k2] = new
            else:
                r.pop(k2, None)
    return quot


def _factor_div_data(space: VarSpace, factor: MultiPoly):
    """(content, descending stripped terms) of a denominator factor."""
    cf = factor.monomial_content()
    fterms = {k - cf: c for k, c in factor.terms.items()}
    return cf, sorted(fterms.items(), key=lambda kv: kv[0], reverse=True)


def divide_exact(num: MultiPoly, factor: MultiPoly):
    """Exact quotient num/factor, or None when the division leaves a remainder.

    The quotient is a Laurent polynomial; monomial content of both operands
    is stripped first so the core division runs on true polynomials.
    """
    if factor.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    space = num.space
    if num.is_zero():
        return num
    cn = num.monomial_content()
    cf, fsorted = _factor_div_data(space, factor)
    shift = cn - cf
    nterms = {k - cn: c for k, c in num.terms.items()}
    if len(fsorted) == 1:
        c0 = fsorted[0][1]
        if c0 in (1, -1):
            return MultiPoly(space, {k + shift: c * c0 for k, c in nterms.items()},
                             _clean=True)
        if any(c % c0 for c in nterms.values()):
            return None
        return MultiPoly(space, {k + shift: c // c0 for k, c in nterms.items()},
                         _clean=True)
    quot = _divide_stripped(space, nterms, fsorted)
    if quot is None:
        return None
    return MultiPoly(space, {k + shift: c for k, c in quot.items()}, _clean=True)


# ---------------------------------------------------------------------------
# factored denominators
# ---------------------------------------------------------------------------

class DenomFactor:
    """A normalized irreducible denominator factor (at most three terms).

    Normalization strips monomial content and makes the graded-lex leading
    coefficient positive; the stripped sign and monomial are returned to the
    caller, who folds them into the numerator.  The stored polynomial is
    content-free with non-negative digits, so its descending term list feeds
    the stripped division loop directly.
    """

    __slots__ = ("poly", "key", "fsorted", "constant", "_hash")

    def __init__(self, poly: MultiPoly, key):
        self.poly = poly
        self.key = key
        self.fsorted = tuple(sorted(poly.terms.items(), key=lambda kv: kv[0],
                                    reverse=True))
        self.constant = poly.constant_value()
        self._hash = hash(key)

    @staticmethod
    def normalize(poly: MultiPoly):
        """Split poly as sign * monomial * primitive factor.

        Returns (sign, mono_key, factor_or_None); factor is None when poly is
        a pure (unit-coefficient) monomial.
        """
        if poly.is_zero():
            raise ZeroDivisionError("zero denominator factor")
        space = poly.space
        content = poly.monomial_content()
        terms = {k - content: c for k, c in poly.terms.items()}
        lead = max(terms, key=space.order_key)
        sign = 1 if terms[lead] > 0 else -1
        if sign < 0:
            terms = {k: -c for k, c in terms.items()}
        if len(terms) == 1:
            c0 = terms[0]
            if c0 == 1:
                return sign, content, None
            terms = {0: c0}
        if len(terms) > 3:
            raise ValueError("denominator factor outside the supported shapes")
        p = MultiPoly(space, terms, _clean=True)
        key = tuple(sorted(terms.items()))
        return sign, content, DenomFactor(p, key)

    def __eq__(self, other):
        return isinstance(other, DenomFactor) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"DenomFactor({self.poly.to_str()})"


def _cancel_factors_into(num: MultiPoly, facs: dict) -> MultiPoly:
    """Divide num by the non-constant factors of facs where exact, in place.

    facs maps DenomFactor -> multiplicity and is updated; constant factors
    are left for a final reduction (they are not prime, so they may divide
    only a later product).
    """
    if not facs or num.is_zero():
        return num
    space = num.space
    shift = num.monomial_content()
    cur = {k - shift: c for k, c in num.terms.items()}
    changed = False
    for fac in list(facs):
        if fac.constant is not None:
            continue
        mult = facs[fac]
        while mult:
            quot = _divide_stripped(space, cur, fac.fsorted)
            if quot is None:
                break
            cur = quot
            mult -= 1
            changed = True
        if mult:
            facs[fac] = mult
        else:
            del facs[fac]
    if not changed:
        return num
    return MultiPoly(space, {k + shift: c for k, c in cur.items()}, _clean=True)


# ---------------------------------------------------------------------------
# factored rational functions
# ---------------------------------------------------------------------------

class FactoredRational:
    """numerator / product of DenomFactor powers, gcd-reduced on construction."""

    __slots__ = ("space", "num", "den")

    def __init__(self, num: MultiPoly, den: dict | None = None, *, reduce: bool = True):
        self.space = num.space
        self.num = num
        self.den = {} if den is None else den
        if num.is_zero():
            self.den = {}
        elif reduce and self.den:
            self._reduce()

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "FactoredRational":
        return cls(p, None, reduce=False)

    @classmethod
    def from_int(cls, space: VarSpace, c: int) -> "FactoredRational":
        return cls(MultiPoly.const(space, c), None, reduce=False)

    @classmethod
    def from_ratio(cls, num: MultiPoly, den_polys, *, reduce: bool = True):
        """num / prod(den_polys); each denominator is normalized and factored."""
        den: dict[DenomFactor, int] = {}
        extra_key = 0
        sign = 1
        for p in den_polys:
            s, mono, fac = DenomFactor.normalize(p)
            sign *= s
            extra_key -= mono
            if fac is not None:
                den[fac] = den.get(fac, 0) + 1
        if extra_key or sign < 0:
            num = num * MultiPoly(num.space, {extra_key: sign}, _clean=True)
        return cls(num, den, reduce=reduce)

    def _reduce(self):
        num = self.num
        space = num.space
        shift = num.monomial_content()
        cur = {k - shift: c for k, c in num.terms.items()}
        changed = False
        for fac in list(self.den):
            mult = self.den[fac]
            while mult:
                if fac.constant is not None:
                    c0 = fac.constant
                    if any(c % c0 for c in cur.values()):
                        break
                    cur = {k: c // c0 for k, c in cur.items()}
                else:
                    quot = _divide_stripped(space, cur, fac.fsorted)
                    if quot is None:
                        break
                    cur = quot
                mult -= 1
                changed = True
            if mult:
                self.den[fac] = mult
            else:
                del self.den[fac]
        if changed:
            self.num = MultiPoly(space, {k + shift: c for k, c in cur.items()},
                                 _clean=True)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def as_poly(self) -> MultiPoly | None:
        """The numerator when fully reduced to a (Laurent) polynomial."""
        return self.num if not self.den else None

    def denominator_poly(self) -> MultiPoly:
        p = MultiPoly.const(self.space, 1)
        for fac, m in self.den.items():
            for _ in range(m):
                p = p * fac.poly
        return p

    def __eq__(self, other):
        if isinstance(other, int):
            other = FactoredRational.from_int(self.space, other)
        elif isinstance(other, MultiPoly):
            other = FactoredRational.from_poly(other)
        if not isinstance(other, FactoredRational):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.denominator_poly() == other.num * self.denominator_poly()

    def __hash__(self):
        raise TypeError("FactoredRational is not hashable")

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        return FactoredRational(-self.num, dict(self.den), reduce=False)

    def __add__(self, other):
        if isinstance(other, int):
            other = FactoredRational.from_int(self.space, other)
        elif isinstance(other, MultiPoly):
            other = FactoredRational.from_poly(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        den: dict[DenomFactor, int] = dict(self.den)
        for fac, m in other.den.items():
            if den.get(fac, 0) < m:
                den[fac] = m
        n1, n2 = self.num, other.num
        for fac, m in den.items():
            d1 = m - self.den.get(fac, 0)
            d2 = m - other.den.get(fac, 0)
            for _ in range(d1):
                n1 = n1 * fac.poly
            for _ in range(d2):
                n2 = n2 * fac.poly
        return FactoredRational(n1 + n2, den, reduce=True)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, MultiPoly)):
            other = (FactoredRational.from_int(self.space, other)
                     if isinstance(other, int) else FactoredRational.from_poly(other))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return FactoredRational(self.num * other, dict(self.den), reduce=False)
        if isinstance(other, MultiPoly):
            other = FactoredRational.from_poly(other)
        n1, d1 = self.num, dict(self.den)
        n2, d2 = other.num, dict(other.den)
        if n1.is_zero() or n2.is_zero():
            return FactoredRational(MultiPoly.zero(self.space), None, reduce=False)
        # cancel across the fraction before the big product; the polynomial
        # factors are irreducible, so per-numerator attempts are complete
        n2 = _cancel_factors_into(n2, d1)
        n1 = _cancel_factors_into(n1, d2)
        den = d1
        constants = False
        for fac, m in d2.items():
            den[fac] = den.get(fac, 0) + m
        for fac in den:
            if fac.constant is not None:
                constants = True
        return FactoredRational(n1 * n2, den, reduce=constants)

    __rmul__ = __mul__

    # -- substitution -------------------------------------------------------

    def substitute(self, assignment: dict) -> "FactoredRational":
        """Exact substitution; raises PoleError when a denominator factor dies."""
        num = self.num.substitute(assignment)
        den_polys = []
        for fac, m in self.den.items():
            p = fac.poly.substitute(assignment)
            if p.is_zero():
                raise PoleError(f"denominator factor {fac.poly.to_str()} vanished")
            den_polys.extend([p] * m)
        return FactoredRational.from_ratio(num, den_polys, reduce=True)

    # -- text --------------------------------------------------------------

    def to_str(self) -> str:
        if not self.den:
            return self.num.to_str()
        parts = []
        for fac, m in sorted(self.den.items(), key=lambda fm: fm[0].poly.to_str()):
            s = f"({fac.poly.to_str()})"
            parts.append(s if m == 1 else f"{s}^{m}")
        num = self.num.to_str()
        if len(self.num.terms) > 1:
            num = f"({num})"
        return f"{num} / {'*'.join(parts)}"

    __str__ = to_str

    def __repr__(self):
        return f"FactoredRational({self.to_str()})"
