"""Tests for sparse F_p polynomial arithmetic and monomial orders."""

import numpy as np
import pytest

from kunz_errors import AmbientMismatch
from polycore import (
    GREVLEX,
    LEX,
    MonomialOrder,
    PolyRing,
    PrimeField,
    elimination_order,
    module_order,
    mono_mul,
    partial_derivative,
    poly_arith,
)


def ring(p, names):
    return PolyRing(PrimeField(p), tuple(names))


def random_poly(rng, R, max_terms=4, max_degree=3):
    f = R.zero()
    for _ in range(int(rng.integers(0, max_terms + 1))):
        exps = [int(a) for a in rng.integers(0, max_degree + 1, size=R.nvars)]
        f = f + R.monomial(exps, int(rng.integers(0, R.p)))
    return f


@pytest.mark.parametrize("p", [4, 1, 0, 9, 65537, 2 ** 17])
def test_prime_field_rejects(p):
    with pytest.raises(ValueError):
        PrimeField(p)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 65521])
def test_prime_field_inverse(p):
    F = PrimeField(p)
    for c in range(1, min(p, 50)):
        assert (c * F.inv(c)) % p == 1
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_freshmans_dream_char_2():
    R = ring(2, "xy")
    x, y = R.gens()
    assert (x + y) ** 2 == x ** 2 + y ** 2
    assert poly_arith("pow_p", x + y, e=1) == x ** 2 + y ** 2


def test_cube_char_3():
    R = ring(3, "x")
    x = R.var(0)
    assert (x + 1) ** 3 == x ** 3 + 1


def test_zero_absorbs():
    R = ring(5, "xy")
    x, y = R.gens()
    assert (x * y + 3) * R.zero() == R.zero()
    assert poly_arith("mul", x + y, R.zero()).is_zero()


def test_coefficients_reduced():
    R = ring(3, "x")
    x = R.var("x")
    f = x * 4 + 6
    assert f == x
    assert dict(f.terms) == {(1,): 1}
    assert (x - x).is_zero()
    assert len(R.constant(3)) == 0


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        ring(2, "x").var(0) + ring(2, "y").var(0)
    with pytest.raises(AmbientMismatch):
        ring(2, "x").var(0) * ring(3, "x").var(0)
    with pytest.raises(AmbientMismatch):
        ring(2, "x").var(1)
    with pytest.raises(AmbientMismatch):
        ring(2, "x").var("z")


def test_partial_derivatives():
    F2 = ring(2, "x")
    assert partial_derivative(F2.var(0) ** 2, 0).is_zero()

    R = ring(3, ["t", "x"])
    t, x = R.gens()
    d = partial_derivative(x ** 3 - x - t, 1)
    assert d == R.constant(2)
    assert d == -1

    S = ring(3, "uv")
    u, v = S.gens()
    assert partial_derivative(u * v - 1, 0) == v
    with pytest.raises(AmbientMismatch):
        partial_derivative(u, 2)


def test_ring_axioms_random():
    rng = np.random.default_rng(11)
    for p in (2, 3, 5):
        R = ring(p, "xyz")
        for _ in range(60):
            a, b, c = (random_poly(rng, R) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a
            assert a - a == R.zero()


@pytest.mark.parametrize("p,e", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_pow_p_is_termwise(p, e):
    rng = np.random.default_rng(p * 10 + e)
    R = ring(p, "xy")
    for _ in range(20):
        f = random_poly(rng, R, max_terms=3, max_degree=2)
        twisted = f.pow_p(e)
        assert twisted == f ** (p ** e)
        assert twisted == f.frobenius_twist(e)
        assert dict(twisted.terms) == {tuple(p ** e * a for a in m): c for m, c in f.terms.items()}


def test_leibniz_random():
    rng = np.random.default_rng(3)
    for p in (2, 3, 7):
        R = ring(p, "xyz")
        for _ in range(40):
            f, g = random_poly(rng, R), random_poly(rng, R)
            for i in range(R.nvars):
                lhs = (f * g).partial_derivative(i)
                rhs = f * g.partial_derivative(i) + g * f.partial_derivative(i)
                assert lhs == rhs


ORDERS = [
    GREVLEX,
    LEX,
    elimination_order(4, [0, 2]),
    module_order(2, 2, position_first=True),
    module_order(2, 2, position_first=False),
]


@pytest.mark.parametrize("order", ORDERS)
def test_orders_are_monomial_orders(order):
    rng = np.random.default_rng(5)
    one = (0, 0, 0, 0)
    for _ in range(300):
        u, v, w = (tuple(int(a) for a in rng.integers(0, 4, size=4)) for _ in range(3))
        assert order.key(one) <= order.key(u)
        if order.key(u) <= order.key(v):
            assert order.key(mono_mul(u, w)) <= order.key(mono_mul(v, w))


def test_order_validation():
    with pytest.raises(ValueError):
        MonomialOrder("revlex")
    with pytest.raises(ValueError):
        MonomialOrder("block", ((0, 1), (1,)), ("grevlex", "lex"))
    assert not MonomialOrder("block", ((0,),), ("lex",)).covers(2)


def test_grevlex_vs_lex_leading_terms():
    R = ring(2, "xy")
    x, y = R.gens()
    f = x + y ** 2
    assert f.leading_term(GREVLEX)[0] == (0, 2)
    assert f.leading_term(LEX)[0] == (1, 0)
    with pytest.raises(ValueError):
        R.zero().leading_term()


def test_substitute_and_evaluate():
    R = ring(3, "uv")
    S = ring(3, "s")
    u, v = R.gens()
    s = S.var(0)
    f = u * v - 1
    g = f.substitute([s ** 3, s + 1], S)
    assert g == s ** 4 + s ** 3 - 1
    assert f.evaluate([2, 2]) == 0
    assert g.evaluate([1]) == (1 + 1 - 1) % 3


def test_embed_restrict():
    R = ring(5, "x")
    T = R.extend(["a", "b"])
    x = R.var(0)
    f = x ** 2 + 3
    g = f.embed(T, [2])
    assert g == T.var("b") ** 2 + 3
    assert g.restrict(R, [2]) == f
    with pytest.raises(AmbientMismatch):
        (g + T.var("a")).restrict(R, [2])


def test_printing_is_canonical():
    R = ring(3, "xy")
    x, y = R.gens()
    assert str(R.zero()) == "0"
    assert str(x ** 2 * y + 2 * y + 1) == "x^2*y + 2*y + 1"
