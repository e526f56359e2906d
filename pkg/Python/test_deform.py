"""Tests for infinitesimal extensions and lift enumeration."""

import pytest

from algebra import AlgebraMap, RingPresentation, check_map, structure_map_from_prime_field
from deform import (
    P_INFINITESIMAL,
    SQUARE_ZERO,
    bank,
    base_point_lifts,
    dual_numbers,
    enumerate_lifts,
    finite_points,
    make_extension,
    section_count_vs_derivations,
    trivial_extension,
    truncated_power,
    two_parameter,
    xi_uniqueness_check,
)
from fpmodule import ModulePresentation
from kunz_errors import AmbientMismatch, BudgetExceeded, IncompatibleBase, NotArtinian


@pytest.fixture
def artin_schreier():
    R = RingPresentation.free(3, ["t"], "R")
    S = RingPresentation.free(3, ["t", "x"])
    t, x = S.ring.gens()
    A = S.quotient([x ** 3 - x - t], "A")
    return check_map([t], R, A, "as", fiber_vars=[1])


@pytest.fixture
def cube_root():
    R = RingPresentation.free(3, ["u"], "R")
    S = RingPresentation.free(3, ["u", "x"])
    u, x = S.ring.gens()
    A = S.quotient([x ** 3 - u], "A")
    return check_map([u], R, A, "root", fiber_vars=[1])


def point_case(alpha, point, C, kind=SQUARE_ZERO, base_images=None):
    if base_images is None:
        base_images = [C.ring.constant(img.evaluate(point)) for img in alpha.images]
    ext = make_extension(C, C.ring.gens(), AlgebraMap(alpha.source, C, base_images), kind)
    theta = AlgebraMap(alpha.target, ext.quotient.target, [C.ring.constant(v) for v in point])
    return ext, theta


def test_finite_points(artin_schreier):
    assert finite_points(artin_schreier.target) == [(0, 0), (0, 1), (0, 2)]
    P = RingPresentation.free(2, ["x", "y"])
    x, y = P.ring.gens()
    cusp = P.quotient([y ** 2 - x ** 3])
    assert finite_points(cusp) == [(0, 0), (1, 1)]
    with pytest.raises(BudgetExceeded):
        finite_points(cusp, limit=3)


def test_extension_rings():
    assert dual_numbers(3).fp_dimension() == 2
    assert two_parameter(2).fp_dimension() == 3
    assert truncated_power(5).fp_dimension() == 5


def test_make_extension_validation(artin_schreier):
    C = truncated_power(3)
    base = AlgebraMap(artin_schreier.source, C, [C.ring.zero()])
    with pytest.raises(ValueError):
        make_extension(C, C.ring.gens(), base, SQUARE_ZERO)
    ext = make_extension(C, C.ring.gens(), base, P_INFINITESIMAL)
    assert ext.quotient.target.fp_dimension() == 1
    with pytest.raises(ValueError):
        make_extension(C, C.ring.gens(), base, "nilpotent")
    D = dual_numbers(3)
    with pytest.raises(AmbientMismatch):
        make_extension(D, D.ring.gens(), base)
    P = RingPresentation.free(3, ["s"])
    with pytest.raises(NotArtinian):
        make_extension(P, [P.var(0) ** 2], AlgebraMap(artin_schreier.source, P, [P.ring.zero()]))


@pytest.mark.parametrize("factory,kind", [
    (dual_numbers, SQUARE_ZERO),
    (two_parameter, SQUARE_ZERO),
    (truncated_power, P_INFINITESIMAL),
])
def test_etale_map_has_unique_lifts(artin_schreier, factory, kind):
    for point in finite_points(artin_schreier.target):
        ext, theta = point_case(artin_schreier, point, factory(3), kind)
        lifts = enumerate_lifts(artin_schreier, ext, theta)
        assert len(lifts) == 1


def test_unique_lift_over_moved_base(artin_schreier):
    C = dual_numbers(3)
    eps = C.var(0)
    ext, theta = point_case(artin_schreier, (0, 1), C, base_images=[eps])
    lifts = enumerate_lifts(artin_schreier, ext, theta)
    assert len(lifts) == 1
    # x^3 - x = t forces x -> 1 - eps
    assert C.equal(lifts[0].images[1], 1 - eps)


def test_inseparable_root_lifts(cube_root):
    C = dual_numbers(3)
    ext, theta = point_case(cube_root, (0, 0), C)
    assert len(enumerate_lifts(cube_root, ext, theta)) == 3
    ext, theta = point_case(cube_root, (0, 0), C, base_images=[C.var(0)])
    assert enumerate_lifts(cube_root, ext, theta) == []


def test_closed_immersion_lifts_forced():
    R = RingPresentation.free(3, ["u"], "R")
    W = RingPresentation.free(3, ["w"])
    Cw = W.quotient([W.var(0) ** 2], "C")
    f = check_map([Cw.var(0)], R, Cw, "f")
    ext, theta = point_case(f, (0,), dual_numbers(3))
    assert len(enumerate_lifts(f, ext, theta)) == 1


def test_lift_enumeration_errors(artin_schreier, cube_root):
    C = dual_numbers(3)
    ext, theta = point_case(artin_schreier, (0, 0), C, base_images=[C.ring.one()])
    with pytest.raises(IncompatibleBase):
        enumerate_lifts(artin_schreier, ext, theta)
    ext, theta = point_case(cube_root, (0, 0), C)
    with pytest.raises(BudgetExceeded):
        enumerate_lifts(cube_root, ext, theta, limit=2)
    with pytest.raises(AmbientMismatch):
        enumerate_lifts(artin_schreier, ext, theta)


def test_base_point_lifts(artin_schreier):
    C = dual_numbers(3)
    lifts = base_point_lifts(artin_schreier, (0, 1), C)
    eps = C.var(0)
    assert [l.images[0] for l in lifts] == [C.ring.zero(), eps, eps * 2]


def test_bank_names(artin_schreier):
    names = [case.name for case in bank(artin_schreier, max_points=2)]
    assert names == [
        "dual@(0,0)", "residue-xi@(0,0)", "dual-moved0@(0,0)", "dual-moved1@(0,0)",
        "two-param@(0,0)", "p-infinitesimal@(0,0)",
        "dual@(0,1)", "residue-xi@(0,1)", "dual-moved0@(0,1)", "dual-moved1@(0,1)",
        "two-param@(0,1)", "p-infinitesimal@(0,1)",
    ]


def test_bank_residue_trivial_extension(artin_schreier):
    case = next(c for c in bank(artin_schreier, max_points=1) if c.name.startswith("residue-xi@"))
    C = case.ext.C
    assert C.name == "Xi(F_3)"
    assert C.vars == ("eps1",)
    assert C.fp_dimension() == 2
    assert case.ext.kind == SQUARE_ZERO
    assert len(enumerate_lifts(artin_schreier, case.ext, case.theta)) == 1


def test_bank_cases_lift_uniquely_for_etale(artin_schreier):
    for case in bank(artin_schreier, max_points=1):
        assert len(enumerate_lifts(artin_schreier, case.ext, case.theta)) == 1


def test_xi_check_applies_to_etale(artin_schreier):
    ext, theta = point_case(artin_schreier, (0, 2), truncated_power(3), P_INFINITESIMAL)
    report = xi_uniqueness_check(artin_schreier, ext, theta)
    assert report["applicable"]
    assert report["lift_count"] == 1
    assert report["passed"] is True
    assert report["differences"] == []


def test_xi_check_not_applicable_without_surjectivity(cube_root):
    ext, theta = point_case(cube_root, (0, 0), dual_numbers(3))
    report = xi_uniqueness_check(cube_root, ext, theta)
    assert not report["applicable"]
    assert report["passed"] is None
    assert report["lift_count"] == 3
    assert len(report["differences"]) == 3


def test_trivial_extension_shape():
    P = RingPresentation.free(3, ["x"])
    A = P.quotient([P.var(0) ** 3], "A")
    xi = trivial_extension(A, ModulePresentation.cyclic(A, [A.var(0)]))
    assert xi.carrier.vars == ("x", "eps1")
    assert xi.eps_idx == [1]
    assert xi.carrier.fp_dimension() == 4
    other = RingPresentation.free(3, ["y"])
    with pytest.raises(AmbientMismatch):
        trivial_extension(A, ModulePresentation.free(other, 1))


@pytest.mark.parametrize("module,expected", [("free", 27), ("residue", 3)])
def test_sections_match_derivations(module, expected):
    P = RingPresentation.free(3, ["x"])
    A = P.quotient([P.var(0) ** 3], "A")
    M = ModulePresentation.free(A, 1) if module == "free" else ModulePresentation.cyclic(A, [A.var(0)])
    sections, derivations = section_count_vs_derivations(structure_map_from_prime_field(A), M)
    assert sections == derivations == expected
