import itertools

import pytest

from invfield.gf import field_for_q, make_field
from invfield.invariants import dickson, dickson_star, mui, mui_star, pairing_u, pairing_v
from invfield.mpoly import MPoly, Space, X_BLOCK, Y_BLOCK, involution_endo, poly_det
from invfield.relations import (RelationError, check_T, check_T_star,
                                check_det_identity, check_hypersurface_n2,
                                check_t_mirror, hypersurface_residual,
                                make_r_template, mirror_of_solution,
                                solve_hypersurface_coeff, solve_relation_coeffs,
                                t_star_terms, u_matrix)

DESK = [(2, 2), (2, 3), (3, 2), (3, 3)]


def test_t_star_n2_q2_explicit():
    # c*_0 u_{j,1} + c*_1 u_{j,0}^2 + u_{j,-1}^2 == 0 (characteristic 2)
    ctx = make_field(2)
    sp = Space(2, 2, 1)
    cstars, _ = dickson_star(ctx, sp, 1)
    lhs = (cstars[0] * pairing_u(ctx, sp, 2, 1)
           + cstars[1] * pairing_u(ctx, sp, 2, 0) ** 2
           + pairing_u(ctx, sp, 2, -1) ** 2)
    assert lhs.is_zero()


def test_t_star_grid():
    for (n, q) in DESK:
        ctx = field_for_q(q)
        for m, d in ((1, 1), (2, 2)):
            sp = Space(n, m, d)
            for j in range(1, m + 1):
                for r in range(1, n):
                    assert check_T_star(ctx, sp, j, r), (n, q, j, r)


def test_t_grid():
    for (n, q) in DESK:
        ctx = field_for_q(q)
        for m, d in ((1, 1), (2, 2)):
            sp = Space(n, m, d)
            for k in range(1, d + 1):
                for r in range(1, n):
                    assert check_T(ctx, sp, k, r), (n, q, k, r)
                    assert check_t_mirror(ctx, sp, k, r), (n, q, k, r)


def test_t_star_image_is_t():
    # applying the pair involution to a verified T* instance gives the T instance
    for (n, q) in [(2, 2), (2, 3), (3, 2)]:
        ctx = field_for_q(q)
        sp = Space(n, 1, 1)
        star = involution_endo(ctx, sp, 1, 1)
        for r in range(1, n):
            acc = MPoly.zero(ctx, sp)
            for coeff, upow, positive in t_star_terms(ctx, sp, 1, r):
                term = coeff * upow
                acc = acc + (term if positive else term.scale(-ctx.one))
            image = star.apply(acc)
            assert image.is_zero()  # the involution of the zero combination


def test_t_negative_control():
    # perturbing one coefficient by +1 breaks the identity
    ctx = make_field(2)
    sp = Space(2, 2, 1)
    terms = t_star_terms(ctx, sp, 2, 1)
    acc = MPoly.zero(ctx, sp)
    one = MPoly.one(ctx, sp)
    for idx, (coeff, upow, positive) in enumerate(terms):
        if idx == 1:
            coeff = coeff + one
        term = coeff * upow
        acc = acc + (term if positive else term.scale(-ctx.one))
    assert not acc.is_zero()


def test_det_identity_n1():
    ctx = make_field(2)
    sp = Space(1, 1, 1)
    ok, sign = check_det_identity(ctx, sp, 1)
    assert ok and sign == 1
    # 1x1 case collapses to d*dstar = u0
    from invfield.invariants import moore
    assert moore(ctx, sp, 1) * dickson_star(ctx, sp, 1)[1] == pairing_u(ctx, sp, 1, 0)


def test_det_identity_n2_q2_explicit():
    ctx = make_field(2)
    sp = Space(2, 1, 1)
    from invfield.invariants import moore
    lhs = moore(ctx, sp, 1) * dickson_star(ctx, sp, 1)[1]
    u0 = pairing_u(ctx, sp, 1, 0)
    rhs = u0 * u0 ** 2 + pairing_u(ctx, sp, 1, 1) * pairing_u(ctx, sp, 1, -1)
    assert lhs == rhs


def test_det_identity_grid():
    for n in (1, 2, 3):
        for q in (2, 3):
            ctx = make_field(q)
            sp = Space(n, 2, 1)
            for j in (1, 2):
                ok, sign = check_det_identity(ctx, sp, j)
                assert ok, (n, q, j)
                if q % 2:  # sign only visible at odd characteristic
                    expected = -1 if (n * (n - 1) // 2) % 2 else 1
                    assert sign == expected


def test_u_matrix_layout():
    ctx = make_field(2)
    sp = Space(3, 1, 1)
    mat = u_matrix(ctx, sp, 1)
    assert mat[0][0] == pairing_u(ctx, sp, 1, 0)
    assert mat[0][2] == pairing_u(ctx, sp, 1, -2)
    assert mat[1][1] == pairing_u(ctx, sp, 1, 0) ** 2
    assert mat[2][0] == pairing_u(ctx, sp, 1, 2)


def test_hypersurface():
    for q in (2, 3, 4):
        ctx = field_for_q(q)
        sp = Space(2, 1, 1)
        assert check_hypersurface_n2(ctx, sp), q
    with pytest.raises(RelationError):
        check_hypersurface_n2(make_field(2), Space(3, 1, 1))


def test_hypersurface_pointwise_oracle():
    # independent route: evaluate the rearranged identity at every GF(2)^4 point
    ctx = make_field(2)
    sp = Space(2, 1, 1)
    star = involution_endo(ctx, sp, 1, 1)
    f1 = mui(ctx, sp, 1, 1)
    f2 = mui(ctx, sp, 1, 2)
    f1s, f2s = star.apply(f1), star.apply(f2)
    u0 = pairing_u(ctx, sp, 1, 0)
    variables = sp.variables()
    for codes in itertools.product(range(2), repeat=4):
        pt = {v: ctx.elem(c) for v, c in zip(variables, codes)}
        lhs = u0.evaluate(pt) ** 2
        rhs = ((f1.evaluate(pt) * f1s.evaluate(pt)) * u0.evaluate(pt)
               + f1.evaluate(pt) ** 2 * f2s.evaluate(pt)
               + f1s.evaluate(pt) ** 2 * f2.evaluate(pt))
        assert lhs == rhs


def test_hypersurface_other_pairs():
    ctx = make_field(3)
    sp = Space(2, 2, 2)
    for j in (1, 2):
        for k in (1, 2):
            assert hypersurface_residual(ctx, sp, j, k).is_zero()


def test_solve_r1plus_and_r2_n3_q2():
    ctx = make_field(2)
    sp = Space(3, 2, 1)
    for j in (1, 2):
        for name in ("R1+", "R2"):
            sol = solve_relation_coeffs(make_r_template(ctx, sp, name, j))
            assert sol.residual_zero, (name, j)
            assert sol.all_nonzero, (name, j)
            assert sol.nullity == 0, (name, j)


def test_solved_r2_slots_match_theory():
    # the recovered coefficients are the subspace-polynomial coefficients:
    # alpha_(0,0) = f1*f*1, alpha_(0,1) = f1 (char 2), beta_(1,0) = f*1
    ctx = make_field(2)
    sp = Space(3, 1, 1)
    sol = solve_relation_coeffs(make_r_template(ctx, sp, "R2", 1))
    f1 = mui(ctx, sp, 1, 1)
    f1s = mui_star(ctx, sp, 1, 1)
    assert sol.slots[(0, 0)] == f1 * f1s
    assert sol.slots[(0, 1)] == f1
    assert sol.slots[(1, 0)] == f1s


def test_solved_r1plus_alpha1_nonzero():
    # the u_{j,1} coefficient drives the derivation chains; it must not vanish
    for q in (2, 3):
        ctx = make_field(q)
        sp = Space(3, 2, 1)
        for j in (1, 2):
            sol = solve_relation_coeffs(make_r_template(ctx, sp, "R1+", j))
            assert not sol.slots[(1, 0)].is_zero()


def test_r3_families():
    ctx = make_field(2)
    sp = Space(3, 1, 1)
    sol = solve_relation_coeffs(make_r_template(ctx, sp, "R3-", 1))
    assert sol.residual_zero and sol.all_nonzero
    ctx3 = make_field(3)
    sp3 = Space(3, 1, 1)
    sol = solve_relation_coeffs(make_r_template(ctx3, sp3, "R3-", 1))
    assert sol.residual_zero and sol.all_nonzero
    # R4- and R4 only exist from n=4 up
    with pytest.raises(RelationError):
        make_r_template(ctx, sp, "R4-", 1)
    with pytest.raises(RelationError):
        make_r_template(ctx, sp, "R3", 1)  # needs c <= n-1


def test_solution_mirror_is_valid():
    ctx = make_field(2)
    sp = Space(3, 2, 2)
    for name in ("R1+", "R2", "R3-"):
        sol = solve_relation_coeffs(make_r_template(ctx, sp, name, 1))
        assert mirror_of_solution(sol).is_zero(), name


def test_mirrored_template_solves():
    ctx = make_field(2)
    sp = Space(3, 1, 2)
    for name in ("R1+", "R2", "R3-"):
        sol = solve_relation_coeffs(make_r_template(ctx, sp, name, 2, mirror=True))
        assert sol.residual_zero and sol.all_nonzero, name


def test_hypersurface_coefficient_recovery():
    for q in (2, 3):
        ctx = make_field(q)
        sp = Space(2, 1, 1)
        coeff = solve_hypersurface_coeff(ctx, sp)
        star = involution_endo(ctx, sp, 1, 1)
        f1 = mui(ctx, sp, 1, 1)
        assert coeff == (f1 * star.apply(f1)) ** (q - 1)


def test_template_validation():
    ctx = make_field(2)
    with pytest.raises(RelationError):
        make_r_template(ctx, Space(1, 1, 1), "R1+", 1)
    with pytest.raises(RelationError):
        make_r_template(ctx, Space(3, 1, 1), "bogus", 1)
    with pytest.raises(RelationError):
        check_T_star(ctx, Space(3, 1, 1), 1, 3)


def test_infeasible_template_detected():
    # a pairing with a positive twist is not a coefficient multiple of u0
    from invfield.relations import RelationTemplate, TemplateTerm
    from invfield.invariants import mui
    ctx = make_field(2)
    sp = Space(3, 1, 1)
    f1 = mui(ctx, sp, 1, 1)
    term = TemplateTerm(0, 0, (0, 0), poly=pairing_u(ctx, sp, 1, 0))
    tpl = RelationTemplate("test", 1, False, ctx, sp, pairing_u(ctx, sp, 1, 1),
                           "u[1,1]", [term], [("f[1,1]", f1, f1.bidegree())])
    with pytest.raises(RelationError):
        solve_relation_coeffs(tpl)


def test_t_star_solved_cross_multiplies():
    # u[2,1] equals the relation-solved rational expression over cstar[1,0]
    from invfield.mpoly import MPoly, RatExpr, rat_eq
    from invfield.relations import t_star_solved
    ctx = make_field(2)
    sp = Space(2, 2, 1)
    num, den, _ = t_star_solved(ctx, sp, 2, 1)
    target = RatExpr(pairing_u(ctx, sp, 2, 1), MPoly.one(ctx, sp))
    assert rat_eq(target, RatExpr(num, den))
