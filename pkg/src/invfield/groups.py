"""GL(n,q), SL(n,q) and the unitriangular group U(n,q): orders, generators,
enumeration by closure, and the induced action on F[mW + dW*].

Action convention (fixed by the bootstrap tests): x-blocks transform as row
vectors times sigma, y-blocks by sigma^{-1} rows, so that sum_i x[j,i]*y[k,i]
is fixed for every (j,k) and x[j,1] is fixed by upper unitriangular matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

from invfield.gf import FieldCtx, FieldElem, FieldError
from invfield.mpoly import MPoly, RingEndo, Space, X_BLOCK

FAMILIES = ("GL", "SL", "U")


class GroupError(ValueError):
    """Invalid group specification or element."""


@dataclass(frozen=True)
class GroupSpec:
    family: str
    n: int
    ctx: FieldCtx

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GroupError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise GroupError("dimension must be >= 1")

    @property
    def q(self):
        return self.ctx.q

    def label(self):
        return f"{self.family}({self.n},{self.q})"


# -- exact matrix helpers ------------------------------------------------------

def identity_mat(ctx, n):
    return tuple(tuple(ctx.one if i == j else ctx.zero for j in range(n)) for i in range(n))


def mat_mul(a, b, ctx):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            code = 0
            for t in range(n):
                code = ctx.add_code(code, ctx.mul_code(a[i][t].code, b[t][j].code))
            row.append(FieldElem(ctx, code))
        out.append(tuple(row))
    return tuple(out)


def mat_det(mat, ctx):
    """Determinant by Gaussian elimination with explicit pivoting."""
    n = len(mat)
    rows = [list(r) for r in mat]
    det = ctx.one
    for col in range(n):
        pivot = None
        for i in range(col, n):
            if not rows[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            return ctx.zero
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det = det * rows[col][col]
        inv = rows[col][col].inverse()
        rows[col] = [x * inv for x in rows[col]]
        for i in range(col + 1, n):
            if not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return det


def mat_inv(mat, ctx):
    n = len(mat)
    aug = [list(mat[i]) + [ctx.one if j == i else ctx.zero for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = None
        for i in range(col, n):
            if not aug[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            raise GroupError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and not aug[i][col].is_zero():
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


class GroupElem:
    """An invertible n x n matrix over the field."""

    __slots__ = ("ctx", "mat")

    def __init__(self, ctx, mat):
        self.ctx = ctx
        self.mat = tuple(tuple(row) for row in mat)

    def key(self):
        return tuple(e.code for row in self.mat for e in row)

    def __mul__(self, other):
        return GroupElem(self.ctx, mat_mul(self.mat, other.mat, self.ctx))

    def inverse(self):
        return GroupElem(self.ctx, mat_inv(self.mat, self.ctx))

    def det(self):
        return mat_det(self.mat, self.ctx)

    def is_upper_unitriangular(self):
        n = len(self.mat)
        for i in range(n):
            if self.mat[i][i] != self.ctx.one:
                return False
            for j in range(i):
                if not self.mat[i][j].is_zero():
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, GroupElem) and self.ctx == other.ctx and self.mat == other.mat

    def __hash__(self):
        return hash(self.key())

    def to_text(self):
        return ";".join(",".join(self.ctx.format_elem(e) for e in row) for row in self.mat)

    def __repr__(self):
        return f"GroupElem({self.to_text()})"


def parse_mat(text, ctx, n):
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) != n:
        raise GroupError(f"expected {n} rows")
    mat = []
    for row in rows:
        entries = [ctx.parse_elem(t) for t in row.split(",")]
        if len(entries) != n:
            raise GroupError(f"expected {n} entries per row")
        mat.append(tuple(entries))
    return GroupElem(ctx, mat)


# -- orders, generators, enumeration -------------------------------------------

def group_order(spec: GroupSpec) -> int:
    n, q = spec.n, spec.q
    if spec.family == "U":
        return q ** (n * (n - 1) // 2)
    gl = 1
    for i in range(n):
        gl *= q ** n - q ** i
    if spec.family == "GL":
        return gl
    return gl // (q - 1)


def _transvection(ctx, n, i, j, t):
    mat = [[ctx.one if a == b else ctx.zero for b in range(n)] for a in range(n)]
    mat[i][j] = t
    return GroupElem(ctx, mat)


def multiplicative_generator(ctx) -> FieldElem:
    """First field element (canonical order) of multiplicative order q-1."""
    q = ctx.q
    for a in ctx.elements():
        if a.is_zero():
            continue
        order = 1
        acc = a
        while acc != ctx.one:
            acc = acc * a
            order += 1
        if order == q - 1:
            return a
    raise FieldError("no multiplicative generator found")  # pragma: no cover


def group_generators(spec: GroupSpec):
    ctx, n = spec.ctx, spec.n
    basis = ctx.basis()
    gens = []
    if spec.family == "U":
        for i in range(n - 1):
            for t in basis:
                gens.append(_transvection(ctx, n, i, i + 1, t))
        return gens
    for i in range(n):
        for j in range(n):
            if i != j:
                for t in basis:
                    gens.append(_transvection(ctx, n, i, j, t))
    if spec.family == "GL":
        g = multiplicative_generator(ctx)
        mat = [[ctx.one if a == b else ctx.zero for b in range(n)] for a in range(n)]
        mat[0][0] = g
        gens.append(GroupElem(ctx, mat))
    return gens


_ENUM_CACHE: dict = {}


def group_enumerate(spec: GroupSpec, cap: int = 10000):
    """All elements, by closure of the generators; certified against group_order."""
    order = group_order(spec)
    if order > cap:
        raise GroupError(f"{spec.label()} has order {order} > cap {cap}")
    key = (spec.family, spec.n, spec.ctx._key)
    cached = _ENUM_CACHE.get(key)
    if cached is None:
        ident = GroupElem(spec.ctx, identity_mat(spec.ctx, spec.n))
        gens = group_generators(spec)
        seen = {ident.key(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for el in frontier:
                for g in gens:
                    prod = el * g
                    k = prod.key()
                    if k not in seen:
                        seen[k] = prod
                        nxt.append(prod)
            frontier = nxt
        if len(seen) != order:
            raise GroupError(
                f"generator closure for {spec.label()} gives {len(seen)} elements, "
                f"expected {order}")
        cached = [seen[k] for k in sorted(seen)]
        _ENUM_CACHE[key] = cached
    return list(cached)


def certify_generators(spec: GroupSpec, cap: int = 10000) -> bool:
    """Closure of the generating set has exactly group_order elements."""
    return len(group_enumerate(spec, cap)) == group_order(spec)


# -- induced ring endomorphism ---------------------------------------------------

def action_endo(g: GroupElem, space: Space) -> RingEndo:
    """x[j,i] -> sum_t sigma[t][i] x[j,t]; y[k,i] -> sum_t inv(sigma)[i][t] y[k,t].

    Satisfies action_endo(g*h) == action_endo(g).compose(action_endo(h)).
    """
    ctx = g.ctx
    n = len(g.mat)
    if n != space.n:
        raise GroupError("matrix size does not match space dimension")
    inv = mat_inv(g.mat, ctx)
    images = {}
    for v in space.variables():
        block, copy, coord = v
        acc = MPoly.zero(ctx, space)
        for t in range(1, n + 1):
            c = g.mat[t - 1][coord - 1] if block == X_BLOCK else inv[coord - 1][t - 1]
            if not c.is_zero():
                acc = acc + MPoly.var(ctx, space, block, copy, t).scale(c)
        images[v] = acc
    return RingEndo(ctx, space, images)
