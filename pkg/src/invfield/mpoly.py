"""Sparse exact multivariate polynomials over GF(q) in x[j,i] and y[k,i].

A variable is a triple (block, copy, coord) with block 0 for x and 1 for y;
a monomial is a sorted tuple of (variable, exponent) pairs; a polynomial is
a map from monomials to nonzero field elements. Everything is immutable in
practice and all arithmetic is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from invfield.gf import FieldCtx, FieldElem, field_matrix_rank

X_BLOCK = 0
Y_BLOCK = 1
_BLOCK_CHARS = {X_BLOCK: "x", Y_BLOCK: "y"}
_BLOCK_CODES = {"x": X_BLOCK, "y": Y_BLOCK}


class PolyError(ValueError):
    """Invalid polynomial construction or operation."""


@dataclass(frozen=True)
class Space:
    """Ambient variable set: m x-copies and d y-copies of n coordinates each."""

    n: int
    m: int
    d: int

    def variables(self):
        out = []
        for j in range(1, self.m + 1):
            for i in range(1, self.n + 1):
                out.append((X_BLOCK, j, i))
        for k in range(1, self.d + 1):
            for i in range(1, self.n + 1):
                out.append((Y_BLOCK, k, i))
        return out

    def __contains__(self, var):
        block, copy, coord = var
        if not 1 <= coord <= self.n:
            return False
        limit = self.m if block == X_BLOCK else self.d
        return 1 <= copy <= limit


def var_name(var) -> str:
    block, copy, coord = var
    return f"{_BLOCK_CHARS[block]}[{copy},{coord}]"


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            out.append((v1, e1 + e2))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_pow(mono, k):
    return tuple((v, e * k) for v, e in mono)


def _mono_key(mono):
    # flat tuple so shorter monomials compare against longer ones deterministically
    key = []
    for (block, copy, coord), e in mono:
        key.extend((block, copy, coord, e))
    return tuple(key)


class MPoly:
    """Sparse polynomial over a FieldCtx inside a declared Space."""

    __slots__ = ("ctx", "space", "terms")

    def __init__(self, ctx: FieldCtx, space: Space, terms: dict):
        self.ctx = ctx
        self.space = space
        self.terms = terms  # mono -> nonzero FieldElem; caller guarantees pruning

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, ctx, space):
        return cls(ctx, space, {})

    @classmethod
    def const(cls, ctx, space, c: FieldElem):
        if c.is_zero():
            return cls(ctx, space, {})
        return cls(ctx, space, {(): c})

    @classmethod
    def one(cls, ctx, space):
        return cls.const(ctx, space, ctx.one)

    @classmethod
    def var(cls, ctx, space, block, copy, coord, exp=1):
        v = (block, copy, coord)
        if v not in space:
            raise PolyError(f"variable {var_name(v)} outside space {space}")
        if exp < 0:
            raise PolyError("negative exponent")
        if exp == 0:
            return cls.one(ctx, space)
        return cls(ctx, space, {((v, exp),): ctx.one})

    # helpers ----------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, MPoly):
            raise TypeError(f"cannot combine MPoly with {type(other).__name__}")
        if other.ctx != self.ctx or other.space != self.space:
            raise PolyError("mismatched polynomial contexts")
        return other

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (isinstance(other, MPoly) and self.ctx == other.ctx
                and self.space == other.space and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ctx, self.space, frozenset((m, c.code) for m, c in self.terms.items())))

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            cur = out.get(mono)
            if cur is None:
                out[mono] = c
            else:
                s = cur + c
                if s.is_zero():
                    del out[mono]
                else:
                    out[mono] = s
        return MPoly(self.ctx, self.space, out)

    def __neg__(self):
        return MPoly(self.ctx, self.space, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FieldElem):
            return self.scale(other)
        other = self._check(other)
        if not self.terms or not other.terms:
            return MPoly.zero(self.ctx, self.space)
        ctx = self.ctx
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                code = ctx.mul_code(c1.code, c2.code)
                cur = out.get(mono)
                if cur is None:
                    out[mono] = code
                else:
                    code = ctx.add_code(cur, code)
                    if code:
                        out[mono] = code
                    else:
                        del out[mono]
        return MPoly(ctx, self.space, {m: FieldElem(ctx, c) for m, c in out.items()})

    def scale(self, c: FieldElem):
        if c.is_zero():
            return MPoly.zero(self.ctx, self.space)
        return MPoly(self.ctx, self.space, {m: v * c for m, v in self.terms.items()})

    def frobenius_p(self):
        """self**p, linear time in characteristic p."""
        p = self.ctx.p
        return MPoly(self.ctx, self.space,
                     {_mono_pow(m, p): c ** p for m, c in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise PolyError("negative exponent")
        result = MPoly.one(self.ctx, self.space)
        if k == 0:
            return result
        base = self
        p = self.ctx.p
        # base-p expansion: f**k = prod (f**(p^t))**digit, each frobenius step linear
        while k:
            digit = k % p
            for _ in range(digit):
                result = result * base
            k //= p
            if k:
                base = base.frobenius_p()
        return result

    # structure --------------------------------------------------------------

    def variables(self):
        vs = set()
        for mono in self.terms:
            for v, _ in mono:
                vs.add(v)
        return sorted(vs)

    def bidegree(self):
        """(x-degree, y-degree); (0, 0) for constants, None for the zero polynomial."""
        if not self.terms:
            return None
        degs = set()
        for mono in self.terms:
            dx = sum(e for (b, _, _), e in mono if b == X_BLOCK)
            dy = sum(e for (b, _, _), e in mono if b == Y_BLOCK)
            degs.add((dx, dy))
        if len(degs) != 1:
            raise PolyError("polynomial is not bihomogeneous")
        return degs.pop()

    def total_degree(self):
        if not self.terms:
            return 0
        return max(sum(e for _, e in mono) for mono in self.terms)

    def evaluate(self, point: dict) -> FieldElem:
        ctx = self.ctx
        acc = ctx.zero
        for mono, c in self.terms.items():
            val = c
            for v, e in mono:
                if v not in point:
                    raise PolyError(f"missing coordinate {var_name(v)} in evaluation point")
                val = val * point[v] ** e
            acc = acc + val
        return acc

    def derivative(self, var):
        """Formal partial derivative; exponents reduce mod p."""
        ctx = self.ctx
        out = {}
        for mono, c in self.terms.items():
            for idx, (v, e) in enumerate(mono):
                if v == var:
                    scalar = ctx.from_int(e)
                    if scalar.is_zero():
                        break
                    if e == 1:
                        new = mono[:idx] + mono[idx + 1:]
                    else:
                        new = mono[:idx] + ((v, e - 1),) + mono[idx + 1:]
                    coeff = c * scalar
                    cur = out.get(new)
                    if cur is None:
                        out[new] = coeff
                    else:
                        s = cur + coeff
                        if s.is_zero():
                            del out[new]
                        else:
                            out[new] = s
                    break
        return MPoly(ctx, self.space, out)

    # text format -------------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=_mono_key):
            c = self.terms[mono]
            factors = []
            for v, e in mono:
                factors.append(var_name(v) + (f"^{e}" if e > 1 else ""))
            if not factors:
                parts.append(self.ctx.format_elem(c))
            elif c == self.ctx.one:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([self.ctx.format_elem(c)] + factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"MPoly({self.to_text()})"


_VAR_RE = re.compile(r"^([xy])\[(\d+),(\d+)\](?:\^(\d+))?$")
_COEFF_RE = re.compile(r"^(-?\d+|\[[\d,\s-]*\])$")


def parse_poly(text: str, ctx: FieldCtx, space: Space) -> MPoly:
    """Parse the canonical polynomial text format (also accepts '-')."""
    text = text.strip()
    if text in ("", "0"):
        return MPoly.zero(ctx, space)
    # normalize leading sign and split on top-level +/-
    chunks = []
    sign = 1
    token = ""
    for ch in text:
        if ch in "+-":
            if token.strip():
                chunks.append((sign, token.strip()))
            token = ""
            sign = 1 if ch == "+" else -1
        else:
            token += ch
    if token.strip():
        chunks.append((sign, token.strip()))
    result = MPoly.zero(ctx, space)
    for sgn, chunk in chunks:
        coeff = ctx.one
        mono_factors = {}
        for raw in chunk.split("*"):
            factor = raw.strip()
            if not factor:
                raise PolyError(f"empty factor in term {chunk!r}")
            mv = _VAR_RE.match(factor)
            if mv:
                block = _BLOCK_CODES[mv.group(1)]
                v = (block, int(mv.group(2)), int(mv.group(3)))
                if v not in space:
                    raise PolyError(f"variable {factor} outside space {space}")
                e = int(mv.group(4)) if mv.group(4) else 1
                mono_factors[v] = mono_factors.get(v, 0) + e
            elif _COEFF_RE.match(factor):
                coeff = coeff * ctx.parse_elem(factor)
            else:
                raise PolyError(f"cannot parse factor {factor!r}")
        if sgn < 0:
            coeff = -coeff
        mono = tuple(sorted(mono_factors.items()))
        term = MPoly(ctx, space, {mono: coeff} if not coeff.is_zero() else {})
        result = result + term
    return result


# -- ring endomorphisms -------------------------------------------------------

class RingEndo:
    """Algebra endomorphism given by images of every variable of the space."""

    __slots__ = ("ctx", "space", "images", "_pow_cache")

    def __init__(self, ctx, space, images: dict):
        self.ctx = ctx
        self.space = space
        self.images = images
        self._pow_cache = {}

    @classmethod
    def identity(cls, ctx, space):
        return cls(ctx, space, {v: MPoly.var(ctx, space, *v) for v in space.variables()})

    def _image_pow(self, v, e):
        key = (v, e)
        cached = self._pow_cache.get(key)
        if cached is None:
            cached = self.images[v] ** e
            self._pow_cache[key] = cached
        return cached

    def apply(self, f: MPoly) -> MPoly:
        if f.ctx != self.ctx or f.space != self.space:
            raise PolyError("endomorphism and polynomial live in different rings")
        ctx = self.ctx
        acc: dict = {}
        for mono, c in f.terms.items():
            term = MPoly.const(ctx, self.space, c)
            for v, e in mono:
                if v not in self.images:
                    raise PolyError(f"no image for variable {var_name(v)}")
                term = term * self._image_pow(v, e)
            for tmono, tc in term.terms.items():
                cur = acc.get(tmono)
                if cur is None:
                    acc[tmono] = tc.code
                else:
                    code = ctx.add_code(cur, tc.code)
                    if code:
                        acc[tmono] = code
                    else:
                        del acc[tmono]
        return MPoly(ctx, self.space,
                     {m: FieldElem(ctx, code) for m, code in acc.items()})

    def compose(self, other: "RingEndo") -> "RingEndo":
        """self after other: (self.compose(other)).apply(f) == self.apply(other.apply(f))."""
        return RingEndo(self.ctx, self.space,
                        {v: self.apply(img) for v, img in other.images.items()})


def apply_endo(endo: RingEndo, f: MPoly) -> MPoly:
    return endo.apply(f)


def frobenius_endo(ctx, space, which: str = "F", power: int = 1) -> RingEndo:
    """F raises x-variables to the q^power; F* raises y-variables; power 0 is the identity."""
    if which not in ("F", "Fstar"):
        raise PolyError(f"unknown Frobenius kind {which!r}")
    if power < 0:
        raise PolyError("negative Frobenius power")
    qi = ctx.q ** power
    images = {}
    for v in space.variables():
        block = v[0]
        twisted = (which == "F" and block == X_BLOCK) or (which == "Fstar" and block == Y_BLOCK)
        images[v] = MPoly.var(ctx, space, *v, exp=qi if twisted else 1)
    return RingEndo(ctx, space, images)


def involution_endo(ctx, space, j: int, k: int) -> RingEndo:
    """The involution of F[W_j + W_k*]: x[j,i] <-> y[k,n+1-i]; other variables fixed."""
    if not 1 <= j <= space.m:
        raise PolyError(f"vector copy {j} out of range")
    if not 1 <= k <= space.d:
        raise PolyError(f"covector copy {k} out of range")
    n = space.n
    images = {}
    for v in space.variables():
        block, copy, coord = v
        if block == X_BLOCK and copy == j:
            images[v] = MPoly.var(ctx, space, Y_BLOCK, k, n + 1 - coord)
        elif block == Y_BLOCK and copy == k:
            images[v] = MPoly.var(ctx, space, X_BLOCK, j, n + 1 - coord)
        else:
            images[v] = MPoly.var(ctx, space, *v)
    return RingEndo(ctx, space, images)


# -- determinants and rational expressions ------------------------------------

def poly_det(matrix) -> MPoly:
    """Exact determinant of a square matrix of MPoly by cofactor expansion."""
    rows = [list(r) for r in matrix]
    size = len(rows)
    if size == 0 or any(len(r) != size for r in rows):
        raise PolyError("determinant needs a square matrix")
    f0 = rows[0][0]
    ctx, space = f0.ctx, f0.space

    def det(rs):
        if len(rs) == 1:
            return rs[0][0]
        acc = MPoly.zero(ctx, space)
        minus_one = -ctx.one
        sign = ctx.one
        for s in range(len(rs)):
            entry = rs[0][s]
            if entry:
                minor = [r[:s] + r[s + 1:] for r in rs[1:]]
                acc = acc + (entry * det(minor)).scale(sign)
            sign = sign * minus_one
        return acc

    return det(rows)


class RatExpr:
    """Quotient of polynomials; equality is by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly):
        if den.is_zero():
            raise PolyError("zero denominator")
        self.num = num
        self.den = den

    def normalized(self) -> "RatExpr":
        """Strip common monomial content and make the denominator's last canonical coefficient 1."""
        num, den = self.num, self.den
        if num.is_zero():
            return RatExpr(num, MPoly.one(den.ctx, den.space))
        common: dict = {}
        first = True
        for poly in (num, den):
            for mono in poly.terms:
                expd = dict(mono)
                if first:
                    common = expd
                    first = False
                else:
                    common = {v: min(e, expd.get(v, 0)) for v, e in common.items() if v in expd}
        if common:
            strip = tuple(sorted(common.items()))

            def divide(poly):
                out = {}
                for mono, c in poly.terms.items():
                    expd = dict(mono)
                    for v, e in strip:
                        expd[v] -= e
                    out[tuple(sorted((v, e) for v, e in expd.items() if e))] = c
                return MPoly(poly.ctx, poly.space, out)

            num, den = divide(num), divide(den)
        lead = den.terms[max(den.terms, key=_mono_key)]
        inv = lead.inverse()
        return RatExpr(num.scale(inv), den.scale(inv))

    def __repr__(self):
        return f"RatExpr(({self.num.to_text()}) / ({self.den.to_text()}))"


def rat_eq(a: RatExpr, b: RatExpr) -> bool:
    return a.num * b.den == b.num * a.den


# -- Jacobian rank -------------------------------------------------------------

def jacobian_rank(polys, point: dict) -> int:
    """Rank over GF(q) of the Jacobian of the polynomials at the point."""
    polys = list(polys)
    if not polys:
        return 0
    space = polys[0].space
    variables = space.variables()
    rows = []
    for f in polys:
        rows.append([f.derivative(v).evaluate(point) for v in variables])
    return field_matrix_rank(rows)
