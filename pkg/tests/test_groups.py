import itertools

import pytest

from invfield.gf import make_field
from invfield.groups import (GroupElem, GroupError, GroupSpec, action_endo,
                             certify_generators, group_enumerate,
                             group_generators, group_order, parse_mat)
from invfield.mpoly import MPoly, Space, X_BLOCK, Y_BLOCK


def test_orders():
    assert group_order(GroupSpec("GL", 1, make_field(3))) == 2
    assert group_order(GroupSpec("U", 3, make_field(2))) == 8
    assert group_order(GroupSpec("GL", 2, make_field(2))) == 6
    assert group_order(GroupSpec("SL", 2, make_field(3))) == 24
    assert group_order(GroupSpec("GL", 3, make_field(3))) == 11232
    assert group_order(GroupSpec("SL", 3, make_field(3))) == 5616


def test_generators_u22():
    spec = GroupSpec("U", 2, make_field(2))
    gens = group_generators(spec)
    assert len(gens) == 1
    assert gens[0].to_text() == "1,1;0,1"


def test_generators_sl22():
    ctx = make_field(2)
    spec = GroupSpec("SL", 2, ctx)
    gens = group_generators(spec)
    texts = {g.to_text() for g in gens}
    assert "1,1;0,1" in texts and "1,0;1,1" in texts
    assert all(g.det() == ctx.one for g in gens)
    assert len(group_enumerate(spec)) == 6


def test_generators_gl13():
    spec = GroupSpec("GL", 1, make_field(3))
    gens = group_generators(spec)
    assert [g.to_text() for g in gens] == ["2"]


def test_enumeration_counts():
    assert len(group_enumerate(GroupSpec("U", 2, make_field(2)))) == 2
    assert len(group_enumerate(GroupSpec("GL", 2, make_field(2)))) == 6
    assert len(group_enumerate(GroupSpec("SL", 2, make_field(3)))) == 24


def test_enumeration_cap():
    with pytest.raises(GroupError):
        group_enumerate(GroupSpec("GL", 3, make_field(3)), cap=10000)


def test_generator_closure_desk_grid():
    for family in ("GL", "SL", "U"):
        for n in (1, 2, 3):
            for q in (2, 3):
                spec = GroupSpec(family, n, make_field(q))
                if group_order(spec) <= 12000:
                    assert certify_generators(spec, cap=12000)


def test_structural_element_properties():
    for q in (2, 3):
        ctx = make_field(q)
        for g in group_enumerate(GroupSpec("U", 3, ctx)):
            assert g.is_upper_unitriangular()
        for g in group_enumerate(GroupSpec("SL", 2, ctx)):
            assert g.det() == ctx.one


def test_action_identity():
    ctx = make_field(2)
    sp = Space(2, 1, 1)
    ident = GroupElem(ctx, ((ctx.one, ctx.zero), (ctx.zero, ctx.one)))
    endo = action_endo(ident, sp)
    for v in sp.variables():
        assert endo.images[v] == MPoly.var(ctx, sp, *v)


def test_action_fixes_pairing():
    ctx = make_field(2)
    sp = Space(2, 2, 2)
    pairings = {}
    for j in (1, 2):
        for k in (1, 2):
            acc = MPoly.zero(ctx, sp)
            for t in (1, 2):
                acc = acc + (MPoly.var(ctx, sp, X_BLOCK, j, t)
                             * MPoly.var(ctx, sp, Y_BLOCK, k, t))
            pairings[(j, k)] = acc
    for g in group_enumerate(GroupSpec("GL", 2, ctx)):
        endo = action_endo(g, sp)
        for poly in pairings.values():
            assert endo.apply(poly) == poly


def test_transvection_fixes_first_coordinate():
    ctx = make_field(2)
    sp = Space(2, 1, 1)
    t = parse_mat("1,1;0,1", ctx, 2)
    endo = action_endo(t, sp)
    x11 = MPoly.var(ctx, sp, X_BLOCK, 1, 1)
    assert endo.apply(x11) == x11


def test_action_composition_order():
    # action_endo(g*h) == action_endo(g) after action_endo(h), on all pairs of GL(2,2)
    ctx = make_field(2)
    sp = Space(2, 1, 1)
    els = group_enumerate(GroupSpec("GL", 2, ctx))
    for g, h in itertools.product(els, els):
        lhs = action_endo(g * h, sp)
        rhs = action_endo(g, sp).compose(action_endo(h, sp))
        for v in sp.variables():
            assert lhs.images[v] == rhs.images[v]


def test_singular_matrix_rejected():
    ctx = make_field(2)
    zero_mat = ((ctx.zero, ctx.zero), (ctx.zero, ctx.zero))
    with pytest.raises(GroupError):
        action_endo(GroupElem(ctx, zero_mat), Space(2, 1, 1))


def test_matrix_text_round_trip():
    ctx = make_field(3)
    g = parse_mat("1,2;0,1", ctx, 2)
    assert parse_mat(g.to_text(), ctx, 2) == g
