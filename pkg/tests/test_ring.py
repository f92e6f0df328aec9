from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcbop import JQQ, JRR, QQ, RR, DivisionByZero, Jet2, exp_node
from mcbop.ring import backend_ring, parse_rational

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)
jets = st.builds(Jet2, rationals, rationals, rationals)
floats = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)


def test_rational_inverse():
    assert QQ.inv(Fraction(2, 3)) == Fraction(3, 2)


def test_jet_inverse_geometric_series():
    assert JQQ.inv(Jet2(1, 1, 0)) == Jet2(1, -1, 1)


@pytest.mark.parametrize("x, expected", [
    (0, Jet2(1, 0, 0)),
    (1, Jet2(1, 1, Fraction(1, 2))),
    (2, Jet2(1, 2, 2)),
    (3, Jet2(1, 3, Fraction(9, 2))),
])
def test_exp_node(x, expected):
    assert exp_node(Fraction(x)) == expected


def test_zero_value_jet_not_invertible():
    with pytest.raises(DivisionByZero):
        JQQ.inv(Jet2(Fraction(0), Fraction(1), Fraction(0)))
    with pytest.raises(DivisionByZero):
        QQ.inv(Fraction(0))


def test_float_floor():
    assert not RR.is_unit(1e-13)
    assert RR.is_unit(1e-11)
    with pytest.raises(DivisionByZero):
        RR.inv(1e-14)


def test_float_rejects_non_finite():
    with pytest.raises(ValueError):
        RR(float("nan"))
    with pytest.raises(ValueError):
        RR(float("inf"))


def test_rational_refuses_float():
    with pytest.raises(TypeError):
        QQ(0.5)


@pytest.mark.parametrize("text, value", [("3/4", Fraction(3, 4)), ("-2", Fraction(-2)), ("+6/4", Fraction(3, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1 /2", " 1", "1.5", "a/b", "1/", True])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_backend_ring():
    assert backend_ring("exact") is QQ
    assert backend_ring("f64") is RR
    with pytest.raises(ValueError):
        backend_ring("mpfr")


@given(jets, jets, jets)
def test_jet_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + JQQ.zero == a
    assert a * JQQ.one == a
    assert a - a == JQQ.zero


@given(jets, jets)
def test_jet_product_rule(a, b):
    prod = a * b
    assert prod.c1 == a.c0 * b.c1 + a.c1 * b.c0
    assert prod.c2 == a.c0 * b.c2 + a.c1 * b.c1 + a.c2 * b.c0


@given(jets)
def test_jet_inverse_is_exact(a):
    if a.c0 == 0:
        return
    assert a * JQQ.inv(a) == JQQ.one


@given(rationals, rationals)
def test_jet_matches_symbolic_square(a, b):
    # f(t) = (a + b t)^2: f(0) = a^2, f'(0) = 2ab, f''(0)/2 = b^2
    f = Jet2(a, b, Fraction(0)) * Jet2(a, b, Fraction(0))
    assert (f.c0, f.c1, f.c2) == (a * a, 2 * a * b, b * b)
    assert f.second_derivative == 2 * b * b


@given(rationals, rationals, rationals)
def test_rational_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    if a != 0:
        assert a * QQ.inv(a) == 1


@given(floats, floats, floats)
def test_float_ring_axioms_approximately(a, b, c):
    assert (a * b) * c == pytest.approx(a * (b * c), rel=1e-12, abs=1e-9)
    assert a * (b + c) == pytest.approx(a * b + a * c, rel=1e-9, abs=1e-6)
    if RR.is_unit(a):
        assert a * RR.inv(a) == pytest.approx(1.0)


def test_float_jets_use_float_base():
    j = JRR((2.0, 1.0))
    assert j.c2 == 0.0
    r = JRR.inv(j) * j
    assert (r.c0, r.c1, r.c2) == pytest.approx((1.0, 0.0, 0.0))
