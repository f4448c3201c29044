import pytest

from invfield.gf import (FieldError, enumerate_field, field_for_q,
                         field_matrix_rank, field_solve, make_field)


def test_prime_fields():
    f2 = make_field(2, 1)
    assert f2.q == 2
    f3 = make_field(3, 1)
    assert f3.q == 3


def test_gf4_with_explicit_modulus():
    # X^2+X+1 has no root in GF(2): 0^2+0+1=1, 1^2+1+1=1
    f4 = make_field(2, 2, [1, 1, 1])
    assert f4.q == 4
    x = f4.from_coeffs([0, 1])
    assert x * x == f4.from_coeffs([1, 1])  # X^2 = X+1 mod X^2+X+1


def test_gf3_mul():
    f3 = make_field(3)
    two = f3.from_int(2)
    assert two * two == f3.one


def test_inverse_axiom_all_fields():
    for q in (2, 3, 4, 5, 8, 9):
        ctx = field_for_q(q)
        for a in ctx.elements():
            if not a.is_zero():
                assert a * a.inverse() == ctx.one


def test_identity_axioms():
    for q in (3, 4, 9):
        ctx = field_for_q(q)
        for a in ctx.elements():
            assert a + ctx.zero == a
            assert a * ctx.one == a
            assert (a * ctx.zero).is_zero()


def test_frobenius_additivity_all_pairs():
    for q in (4, 9):
        ctx = field_for_q(q)
        p = ctx.p
        for a in ctx.elements():
            for b in ctx.elements():
                assert (a + b) ** p == a ** p + b ** p


def test_fermat():
    for q in (2, 3, 4, 5, 9):
        ctx = field_for_q(q)
        for a in ctx.elements():
            if not a.is_zero():
                assert a ** (q - 1) == ctx.one


def test_enumeration():
    assert [e.code for e in enumerate_field(make_field(2))] == [0, 1]
    assert [e.code for e in enumerate_field(make_field(3))] == [0, 1, 2]
    els = enumerate_field(make_field(2, 2))
    assert len(els) == 4
    assert len({e.coeffs for e in els}) == 4
    assert els[0].is_zero()
    # lexicographic on coefficient vectors
    assert [e.coeffs for e in els] == sorted(e.coeffs for e in els)


def test_errors():
    with pytest.raises(FieldError):
        make_field(4)  # not prime
    with pytest.raises(FieldError):
        make_field(2, 2, [1, 0, 1])  # X^2+1 = (X+1)^2 is reducible over GF(2)
    with pytest.raises(FieldError):
        make_field(2, 9)  # beyond the built-in modulus range
    f3 = make_field(3)
    with pytest.raises(FieldError):
        f3.one / f3.zero
    with pytest.raises(FieldError):
        f3.one ** -1
    f5 = make_field(5)
    with pytest.raises(FieldError):
        f3.one + f5.one


def test_element_text_format():
    f3 = make_field(3)
    assert str(f3.from_int(2)) == "2"
    assert f3.parse_elem("2") == f3.from_int(2)
    f4 = make_field(2, 2)
    x = f4.from_coeffs([0, 1])
    assert str(x) == "[0,1]"
    assert f4.parse_elem("[0,1]") == x


def test_field_for_q():
    assert field_for_q(8).p == 2 and field_for_q(8).e == 3
    assert field_for_q(9).p == 3 and field_for_q(9).e == 2
    with pytest.raises(FieldError):
        field_for_q(6)


def test_linear_algebra_helpers():
    f3 = make_field(3)
    e = f3.from_int
    rows = [[e(1), e(2)], [e(2), e(4)]]  # second row = 2 * first
    assert field_matrix_rank(rows) == 1
    rows = [[e(1), e(0)], [e(1), e(1)]]
    assert field_matrix_rank(rows) == 2
    sol, nullity = field_solve([[e(1), e(1)], [e(0), e(1)]], [e(0), e(1)], f3)
    assert nullity == 0
    assert sol == [e(2), e(1)]
    sol, nullity = field_solve([[e(1), e(1)]], [e(1)], f3)
    assert nullity == 1  # underdetermined
    sol, nullity = field_solve([[e(0), e(0)]], [e(1)], f3)
    assert sol is None  # inconsistent
