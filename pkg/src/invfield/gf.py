"""Exact arithmetic in small finite fields GF(p^e), polynomial-basis representation.

Elements are held as integer codes sum(c_i * p^i) over their coefficient
vector (c_0, ..., c_{e-1}). A context owns the modulus and, for small q,
dense add/mul/inv tables, so element operations are table lookups.
"""

from __future__ import annotations

from functools import lru_cache


class FieldError(ValueError):
    """Invalid field construction or arithmetic (bad modulus, zero division, ...)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


# -- polynomial helpers over GF(p), little-endian coefficient lists ----------

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(a)


def _poly_divisible(a, b, p):
    # b monic; True iff b divides a exactly
    a = list(a)
    db = len(b) - 1
    inv_lead = 1  # monic
    while len(a) - 1 >= db and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - db
            q = (lead * inv_lead) % p
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - q * bi) % p
        a.pop()
    return not _poly_trim(a)


def _monic_polys(p, deg):
    # all monic polynomials of exact degree deg, little-endian
    out = []
    for code in range(p ** deg):
        coeffs = []
        c = code
        for _ in range(deg):
            coeffs.append(c % p)
            c //= p
        coeffs.append(1)
        out.append(coeffs)
    return out


def _is_irreducible(coeffs, p):
    deg = len(coeffs) - 1
    if deg < 1 or coeffs[-1] != 1:
        return False
    for t in range(1, deg // 2 + 1):
        for cand in _monic_polys(p, t):
            if _poly_divisible(coeffs, cand, p):
                return False
    return True


@lru_cache(maxsize=None)
def _default_modulus(p: int, e: int):
    """Lexicographically-least monic irreducible of degree e over GF(p)."""
    if e == 1:
        return (0, 1)
    if e > 6 or p > 23:
        raise FieldError(f"no built-in modulus for p={p}, e={e}; supply one explicitly")
    for cand in _monic_polys(p, e):
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise FieldError(f"no irreducible of degree {e} over GF({p})")  # pragma: no cover


_TABLE_LIMIT = 128  # dense op tables kept for q below this

_CTX_CACHE: dict = {}


class FieldCtx:
    """A finite field GF(p^e) with a fixed monic irreducible modulus."""

    def __init__(self, p, e, modulus):
        self.p = p
        self.e = e
        self.q = p ** e
        self.modulus = tuple(modulus)
        self._key = (p, e, self.modulus)
        self._build_tables()
        self.zero = FieldElem(self, 0)
        self.one = FieldElem(self, 1)
        self._elements = None

    # construction ----------------------------------------------------------

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        if q > _TABLE_LIMIT:
            self._add_t = self._mul_t = self._neg_t = self._inv_t = None
            return
        self._neg_t = [self._encode([(-c) % p for c in self._decode(a)]) for a in range(q)]
        self._add_t = [
            [self._encode([(x + y) % p for x, y in zip(self._decode(a), self._decode(b))])
             for b in range(q)]
            for a in range(q)
        ]
        mul = []
        for a in range(q):
            pa = _poly_trim(list(self._decode(a)))
            row = []
            for b in range(q):
                pb = _poly_trim(list(self._decode(b)))
                prod = _poly_mod(_poly_mul(pa, pb, p), list(self.modulus), p)
                row.append(self._encode(prod + [0] * (e - len(prod))))
            mul.append(row)
        self._mul_t = mul
        inv = [None] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self._inv_t = inv

    def _decode(self, code):
        out = []
        for _ in range(self.e):
            out.append(code % self.p)
            code //= self.p
        return out

    def _encode(self, coeffs):
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + (c % self.p)
        return code

    # raw code arithmetic ----------------------------------------------------

    def add_code(self, a, b):
        if self._add_t is not None:
            return self._add_t[a][b]
        return self._encode([(x + y) % self.p for x, y in zip(self._decode(a), self._decode(b))])

    def neg_code(self, a):
        if self._neg_t is not None:
            return self._neg_t[a]
        return self._encode([(-x) % self.p for x in self._decode(a)])

    def sub_code(self, a, b):
        return self.add_code(a, self.neg_code(b))

    def mul_code(self, a, b):
        if self._mul_t is not None:
            return self._mul_t[a][b]
        prod = _poly_mod(_poly_mul(_poly_trim(list(self._decode(a))),
                                   _poly_trim(list(self._decode(b))), self.p),
                         list(self.modulus), self.p)
        return self._encode(prod + [0] * (self.e - len(prod)))

    def inv_code(self, a):
        if a == 0:
            raise FieldError("division by zero")
        if self._inv_t is not None:
            return self._inv_t[a]
        return self.pow_code(a, self.q - 2)

    def pow_code(self, a, k):
        if k < 0:
            raise FieldError("negative exponent; invert explicitly")
        result, base = 1, a
        while k:
            if k & 1:
                result = self.mul_code(result, base)
            base = self.mul_code(base, base)
            k >>= 1
        return result

    # public surface ---------------------------------------------------------

    def elem(self, code: int) -> "FieldElem":
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} out of range for GF({self.q})")
        return FieldElem(self, code)

    def from_coeffs(self, coeffs) -> "FieldElem":
        coeffs = list(coeffs)
        if len(coeffs) != self.e:
            raise FieldError(f"expected {self.e} coefficients, got {len(coeffs)}")
        return FieldElem(self, self._encode(coeffs))

    def from_int(self, v: int) -> "FieldElem":
        return FieldElem(self, v % self.p)

    def elements(self):
        """All q elements, lexicographic on coefficient vectors, starting at 0."""
        if self._elements is None:
            codes = sorted(range(self.q), key=lambda c: tuple(self._decode(c)))
            self._elements = [FieldElem(self, c) for c in codes]
        return list(self._elements)

    def basis(self):
        """GF(p)-basis 1, X, X^2, ... as field elements."""
        return [FieldElem(self, self.p ** i) for i in range(self.e)]

    def format_elem(self, a: "FieldElem") -> str:
        if self.e == 1:
            return str(a.code)
        return "[" + ",".join(str(c) for c in self._decode(a.code)) + "]"

    def parse_elem(self, text: str) -> "FieldElem":
        text = text.strip()
        if text.startswith("["):
            if not text.endswith("]"):
                raise FieldError(f"bad element literal {text!r}")
            parts = [t for t in text[1:-1].split(",") if t.strip() != ""]
            coeffs = [int(t) % self.p for t in parts]
            if len(coeffs) != self.e:
                raise FieldError(f"element literal {text!r} has wrong length for GF({self.q})")
            return self.from_coeffs(coeffs)
        return self.from_int(int(text))

    def __repr__(self):
        return f"FieldCtx(GF({self.q}))"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self._key == other._key

    def __hash__(self):
        return hash(self._key)


class FieldElem:
    """Immutable element of a FieldCtx."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx, code):
        self.ctx = ctx
        self.code = code

    def _check(self, other):
        if not isinstance(other, FieldElem):
            raise TypeError(f"cannot combine FieldElem with {type(other).__name__}")
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise FieldError("mismatched field contexts")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElem(self.ctx, self.ctx.add_code(self.code, other.code))

    def __sub__(self, other):
        other = self._check(other)
        return FieldElem(self.ctx, self.ctx.sub_code(self.code, other.code))

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg_code(self.code))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElem(self.ctx, self.ctx.mul_code(self.code, other.code))

    def __truediv__(self, other):
        other = self._check(other)
        return FieldElem(self.ctx, self.ctx.mul_code(self.code, self.ctx.inv_code(other.code)))

    def __pow__(self, k):
        return FieldElem(self.ctx, self.ctx.pow_code(self.code, k))

    def inverse(self):
        return FieldElem(self.ctx, self.ctx.inv_code(self.code))

    def is_zero(self):
        return self.code == 0

    @property
    def coeffs(self):
        return tuple(self.ctx._decode(self.code))

    def sort_key(self):
        return self.coeffs

    def __eq__(self, other):
        return (isinstance(other, FieldElem) and self.code == other.code
                and (other.ctx is self.ctx or other.ctx == self.ctx))

    def __hash__(self):
        return hash((self.code, self.ctx._key))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"GF{self.ctx.q}({self.ctx.format_elem(self)})"

    def __str__(self):
        return self.ctx.format_elem(self)


def make_field(p: int, e: int = 1, modulus=None) -> FieldCtx:
    """Build (or fetch) GF(p^e); the modulus is verified irreducible."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if e < 1:
        raise FieldError("extension degree must be >= 1")
    if modulus is None:
        mod = _default_modulus(p, e)
    else:
        mod = tuple(c % p for c in modulus)
        if len(mod) != e + 1 or mod[-1] != 1:
            raise FieldError("modulus must be monic of degree e")
        if e > 1 and not _is_irreducible(list(mod), p):
            raise FieldError(f"modulus {list(mod)} is reducible over GF({p})")
    key = (p, e, mod)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        ctx = FieldCtx(p, e, mod)
        _CTX_CACHE[key] = ctx
    return ctx


def field_for_q(q: int) -> FieldCtx:
    """GF(q) for a prime power q, with the default modulus."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = 2
    while p <= q:
        if q % p == 0:
            e = 0
            n = q
            while n % p == 0:
                n //= p
                e += 1
            if n != 1:
                raise FieldError(f"{q} is not a prime power")
            return make_field(p, e)
        p += 1
    raise FieldError(f"{q} is not a prime power")  # pragma: no cover


def enumerate_field(ctx: FieldCtx):
    """All q elements in the canonical order (lex on coefficient vectors)."""
    return ctx.elements()


# -- exact linear algebra over a field ---------------------------------------

def field_matrix_rank(rows) -> int:
    """Rank of a matrix of FieldElem by Gaussian elimination."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(rows)):
            if not rows[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def field_solve(rows, rhs, ctx):
    """Solve A x = b exactly over the field.

    Returns (solution, nullity) with free variables set to zero, or
    (None, None) when the system is inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    rank = 0
    for col in range(n):
        pivot = None
        for i in range(rank, m):
            if not aug[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        inv = aug[rank][col].inverse()
        aug[rank] = [x * inv for x in aug[rank]]
        for i in range(m):
            if i != rank and not aug[i][col].is_zero():
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[rank])]
        pivots.append(col)
        rank += 1
    for i in range(rank, m):
        if not aug[i][n].is_zero():
            return None, None
    x = [ctx.zero] * n
    for r, col in enumerate(pivots):
        x[col] = aug[r][n]
    return x, n - rank
