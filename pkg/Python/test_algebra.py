"""Tests for presented rings, algebra maps, ideals and subalgebra membership."""

import numpy as np
import pytest

from algebra import (
    AlgebraMap,
    IdealHandle,
    RingPresentation,
    SubalgebraOracle,
    base_change,
    check_map,
    compose,
    fp_dimension,
    fresh_names,
    frobenius_power,
    ideal_power,
    identity_map,
    ring_map_kernel,
    structure_map_from_prime_field,
    subalgebra_membership,
    tensor_over_base,
)
from groebner import INFINITE
from kunz_errors import AmbientMismatch, NotWellDefined


@pytest.fixture
def artin_schreier():
    """F_3[t] -> F_3[t,x]/(x^3 - x - t)."""
    R = RingPresentation.free(3, ["t"], "R")
    S = RingPresentation.free(3, ["t", "x"])
    t, x = S.ring.gens()
    A = RingPresentation(S.ring, [x ** 3 - x - t], "A")
    alpha = check_map([t], R, A, "alpha", fiber_vars=[1])
    return R, A, alpha


def test_fresh_names():
    assert fresh_names(["x", "y", "x"], ["x"]) == ["x_1", "y", "x_2"]


def test_check_map_examples(artin_schreier):
    U = RingPresentation.free(3, ["u"])
    identity = check_map([U.var(0)], U, U)
    assert identity(U.var(0)) == U.var(0)

    R, A, _ = artin_schreier
    phi = check_map([A.var("t")], U, A)
    assert phi.fiber_vars == (1,)

    D = RingPresentation.free(2, ["u"])
    D = D.quotient([D.var(0) ** 2])
    F2 = RingPresentation.prime_field(2)
    with pytest.raises(NotWellDefined) as info:
        check_map([F2.ring.one()], D, F2)
    assert info.value.relation_index == 0


def test_map_shape_errors():
    U = RingPresentation.free(3, ["u", "v"])
    V = RingPresentation.free(5, ["w"])
    with pytest.raises(AmbientMismatch):
        AlgebraMap(U, U, [U.var(0)])
    with pytest.raises(AmbientMismatch):
        AlgebraMap(V, U, [U.var(0)])


def test_frobenius_power_examples():
    P = RingPresentation.free(2, ["x", "y"])
    x, y = P.ring.gens()
    I = IdealHandle(P, [x, y])
    assert frobenius_power(I).equals(IdealHandle(P, [x ** 2, y ** 2]))
    assert frobenius_power(IdealHandle(P, [])).is_zero()

    S = RingPresentation.free(3, ["s"])
    s = S.var(0)
    a = IdealHandle(S, [s])
    ap = frobenius_power(a)
    assert ap.gens == (s ** 3,)
    assert not ap.equals(a)
    assert not ap.contains(s)
    assert ap.contained_in(a)
    with pytest.raises(ValueError):
        frobenius_power(a, 0)


def test_frobenius_power_iterates_and_containment():
    rng = np.random.default_rng(17)
    P = RingPresentation.free(3, ["x", "y"])
    x, y = P.ring.gens()
    for _ in range(10):
        gens = [P.ring.monomial([int(a) for a in rng.integers(0, 3, size=2)], int(rng.integers(1, 3)))
                + x * int(rng.integers(0, 3)) for _ in range(2)]
        I = IdealHandle(P, gens)
        assert frobenius_power(frobenius_power(I, 1), 1).equals(frobenius_power(I, 2))
        assert frobenius_power(I).contained_in(I)


def test_ideal_power():
    P = RingPresentation.free(2, ["u"])
    u = P.var(0)
    I = IdealHandle(P, [u])
    assert ideal_power(I, 3).equals(IdealHandle(P, [u ** 3]))
    with pytest.raises(ValueError):
        ideal_power(I, 0)


def test_tensor_with_prime_field_is_identity():
    P = RingPresentation.free(5, ["x"])
    A = P.quotient([P.var(0) ** 2 - 2], "A")
    alpha = structure_map_from_prime_field(A)
    Fp = alpha.source
    tp = tensor_over_base(alpha, identity_map(Fp))
    assert tp.ring.vars == A.vars
    assert tp.ring.relations == A.relations


def test_tensor_of_polynomial_rings():
    X = RingPresentation.free(3, ["x"])
    Y = RingPresentation.free(3, ["y"])
    tp = tensor_over_base(structure_map_from_prime_field(X), structure_map_from_prime_field(Y))
    assert tp.ring.vars == ("x", "y")
    assert tp.ring.relations == ()
    assert fp_dimension(tp.ring) is INFINITE


def test_tensor_with_residue_ring():
    R = RingPresentation.free(3, ["u"], "R")
    S = RingPresentation.free(3, ["u", "x"])
    u, x = S.ring.gens()
    A = RingPresentation(S.ring, [x ** 2 - u], "A")
    alpha = check_map([u], R, A, fiber_vars=[1])
    C = R.quotient([R.var(0)], "R/(u)")
    rho = check_map([C.var(0)], R, C)
    tp = tensor_over_base(alpha, rho)
    assert tp.ring.vars == ("u", "x", "u_1")
    assert tp.ring.fp_dimension() == 2
    assert tp.ring.is_zero(tp.ring.var("x") ** 2)
    assert not tp.ring.is_zero(tp.ring.var("x"))
    changed = base_change(alpha, rho)
    assert changed.source == C
    assert changed.target == tp.ring


def test_compose():
    U = RingPresentation.free(2, ["u"])
    V = RingPresentation.free(2, ["v"])
    W = RingPresentation.free(2, ["w"])
    f = check_map([V.var(0) ** 2], U, V, "f")
    g = check_map([W.var(0) + 1], V, W, "g")
    gf = compose(g, f)
    assert gf.images == (W.var(0) ** 2 + 1,)
    with pytest.raises(AmbientMismatch):
        compose(f, f)


def test_kernel_examples():
    W = RingPresentation.free(2, ["w"])
    X = RingPresentation.free(2, ["x"])
    assert ring_map_kernel(check_map([X.var(0) ** 2], W, X)).is_zero()

    P = RingPresentation.free(2, ["u"])
    u = P.var(0)
    D = P.quotient([u ** 2], "D")
    E = P.quotient([u], "E")
    ker = ring_map_kernel(check_map([E.var(0)], D, E))
    assert ker.equals(IdealHandle(D, [D.var(0)]))

    L = RingPresentation.free(3, ["u", "v"])
    L = L.quotient([L.var(0) * L.var(1) - 1])
    Wm = RingPresentation.free(3, ["w"])
    assert ring_map_kernel(check_map([L.var(0)], Wm, L)).is_zero()


def test_kernel_matches_dense_injectivity():
    P = RingPresentation.free(2, ["u"])
    D = P.quotient([P.var(0) ** 2], "D")
    injective = check_map([D.var(0)], D, D)
    collapsing = check_map([D.ring.zero()], D, D)
    assert ring_map_kernel(injective).is_zero()
    assert not ring_map_kernel(collapsing).is_zero()
    assert collapsing(D.var(0)).is_zero()


def test_subalgebra_membership_examples(artin_schreier):
    P = RingPresentation.free(2, ["x"])
    x = P.var(0)
    assert not subalgebra_membership(P, [x ** 2], x).member
    m = subalgebra_membership(P, [x ** 2], x ** 4 + x ** 2)
    assert m.member
    oracle = SubalgebraOracle(P, [x ** 2])
    w = oracle.tag_ring.var(0)
    assert m.certificate == w ** 2 + w
    assert oracle.replay(m.certificate) == x ** 4 + x ** 2

    _, A, _ = artin_schreier
    t, xa = A.ring.gens()
    oracle = SubalgebraOracle(A, [xa ** 3, t])
    got = oracle.membership(xa)
    w1, w2 = oracle.tag_ring.gens()
    assert got.member
    assert got.certificate == w1 - w2
    assert A.equal(oracle.replay(got.certificate), xa)


def test_fp_dimension_examples():
    P2 = RingPresentation.free(2, ["x"])
    assert fp_dimension(P2.quotient([P2.var(0) ** 2])) == 2
    assert RingPresentation.prime_field(2).fp_dimension() == 1
    P3 = RingPresentation.free(3, ["s"])
    assert P3.quotient([P3.var(0) ** 3]).fp_dimension() == 3
    assert P2.fp_dimension() is INFINITE


def test_zero_ring_and_gb_cache():
    L = RingPresentation.free(3, ["u", "v"])
    u, v = L.ring.gens()
    Z = L.quotient([u * v - 1, u])
    assert Z.is_zero_ring()
    assert Z.gb() is Z.gb()
    assert Z.fp_dimension() == 0
