"""Tests for module presentations, Fitting ideals and the restricted flatness test."""

import numpy as np
import pytest

from algebra import IdealHandle, RingPresentation, check_map, structure_map_from_prime_field
from fpmodule import (
    FLAT,
    NOT_DECIDED,
    NOT_FLAT,
    ModulePresentation,
    fitting_ideal,
    module_finite_presentation,
    module_is_projective,
    module_is_projective_of_rank,
    module_is_zero,
    restricted_flatness,
    submodule_membership,
)
from groebner import ModuleVector
from kunz_errors import AmbientMismatch, BudgetExceeded
from linalg_fp import FiniteAlgebra, FiniteModule


def vec(*comps):
    return ModuleVector(tuple(comps))


@pytest.fixture
def localized_root():
    """A = F_3[u,v,x]/(uv - 1, x^2 - u); x is a unit."""
    P = RingPresentation.free(3, ["u", "v", "x"])
    u, v, x = P.ring.gens()
    return P.quotient([u * v - 1, x ** 2 - u], "A")


def test_submodule_membership_examples(localized_root):
    P = RingPresentation.free(2, ["x"])
    x = P.var(0)
    one = P.ring.one()
    assert submodule_membership(vec(one), [vec(one)])
    assert not submodule_membership(vec(one), [vec(x)])

    A = localized_root
    two_x = A.var("x") * 2
    assert submodule_membership(vec(A.ring.one()), [vec(two_x)], A)


def test_module_is_zero_examples(localized_root):
    P = RingPresentation.free(2, ["x"])
    assert module_is_zero(ModulePresentation.cyclic(P, [P.ring.one()]))
    assert not module_is_zero(ModulePresentation.free(P, 1))
    A = localized_root
    assert module_is_zero(ModulePresentation.cyclic(A, [A.var("x") * 2]))
    assert module_is_zero(ModulePresentation.free(A, 0))


def test_presentation_shape_checks():
    P = RingPresentation.free(2, ["x"])
    with pytest.raises(AmbientMismatch):
        ModulePresentation(P, 2, [vec(P.var(0))])
    with pytest.raises(ValueError):
        ModulePresentation(P, -1)
    M = ModulePresentation(P, 2, [vec(P.var(0), P.ring.one())])
    assert M.matrix() == [[P.var(0)], [P.ring.one()]]


def test_fitting_examples():
    P = RingPresentation.free(2, ["u"])
    u = P.var(0)
    zero = P.ring.zero()
    assert fitting_ideal(ModulePresentation.cyclic(P, [u]), 0).equals(IdealHandle(P, [u]))

    free2 = ModulePresentation.free(P, 2)
    assert fitting_ideal(free2, 1).is_zero()
    assert fitting_ideal(free2, 2).is_unit()

    diag = ModulePresentation(P, 2, [vec(u, zero), vec(zero, u)])
    assert fitting_ideal(diag, 0).equals(IdealHandle(P, [u ** 2]))
    assert fitting_ideal(diag, 1).equals(IdealHandle(P, [u]))
    with pytest.raises(ValueError):
        fitting_ideal(diag, -1)


def test_fitting_monotone():
    P = RingPresentation.free(3, ["x", "y"])
    x, y = P.ring.gens()
    M = ModulePresentation(P, 3, [vec(x, y, P.ring.zero()), vec(y ** 2, x, x * y), vec(P.ring.one(), x, y)])
    fitts = [fitting_ideal(M, j) for j in range(4)]
    for lower, upper in zip(fitts, fitts[1:]):
        assert lower.contained_in(upper)


def test_fitting_minor_cap():
    P = RingPresentation.free(2, ["x"])
    x = P.var(0)
    M = ModulePresentation(P, 3, [vec(x, x, x)] * 1 + [vec(x ** k, x, P.ring.one()) for k in range(2, 6)])
    with pytest.raises(BudgetExceeded):
        fitting_ideal(M, 1, max_minors=2)


def test_projective_of_rank_examples():
    P = RingPresentation.free(2, ["u"])
    u = P.var(0)
    assert module_is_projective_of_rank(ModulePresentation.free(P, 2), 2)
    coker_u = ModulePresentation.cyclic(P, [u])
    assert not module_is_projective_of_rank(coker_u, 0)
    assert not module_is_projective_of_rank(coker_u, 1)

    L = RingPresentation.free(2, ["u", "v"])
    L = L.quotient([L.var(0) * L.var(1) - 1])
    assert module_is_projective_of_rank(ModulePresentation.cyclic(L, [L.var("u")]), 0)


def test_projectivity_invariant_under_column_operations():
    P = RingPresentation.free(2, ["u"])
    u = P.var(0)
    zero, one = P.ring.zero(), P.ring.one()
    M = ModulePresentation(P, 2, [vec(u, zero), vec(zero, one)])
    # add u times the second column to the first
    N = ModulePresentation(P, 2, [vec(u, u), vec(zero, one)])
    assert module_is_projective(M) == module_is_projective(N)
    assert module_is_projective(M)[0] is False


def test_module_is_zero_matches_dense_oracle():
    rng = np.random.default_rng(23)
    P = RingPresentation.free(2, ["x"])
    x = P.var(0)
    A = P.quotient([x ** 3], "A")
    alg = FiniteAlgebra(A.ring, A.gb())
    for _ in range(15):
        rels = []
        for _ in range(int(rng.integers(0, 3))):
            comps = [alg.element(rng.integers(0, 2, size=alg.dim)) for _ in range(2)]
            rels.append(vec(*comps))
        M = ModulePresentation(A, 2, rels)
        dense = FiniteModule(alg, 2, rels)
        assert module_is_zero(M) == (dense.dim == 0)


def test_module_finite_presentation_of_root_extension():
    R = RingPresentation.free(3, ["u"], "R")
    S = RingPresentation.free(3, ["u", "x"])
    u, x = S.ring.gens()
    A = S.quotient([x ** 2 - u], "A")
    alpha = check_map([u], R, A, fiber_vars=[1])
    mfp = module_finite_presentation(alpha)
    assert mfp.finite
    assert mfp.generators == [A.ring.one(), x]
    assert module_is_projective(mfp.presentation) == (True, 2)
    verdict = restricted_flatness(alpha)
    assert verdict.status == FLAT
    assert verdict.rank == 2
    assert verdict.as_dict()["generators"] == 2


def test_closed_immersion_not_flat():
    R = RingPresentation.free(3, ["u"], "R")
    C = R.quotient([R.var(0)], "C")
    alpha = check_map([C.var(0)], R, C)
    verdict = restricted_flatness(alpha)
    assert verdict.status == NOT_FLAT


def test_polynomial_extension_not_decided():
    P = RingPresentation.free(2, ["x"], "P")
    verdict = restricted_flatness(structure_map_from_prime_field(P))
    assert verdict.status == NOT_DECIDED
    assert "module-finite" in verdict.reason
