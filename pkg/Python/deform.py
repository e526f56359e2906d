"""
Infinitesimal deformations and brute-force lifting.

An extension is a finite-dimensional C with an ideal I that is square-zero
or p-infinitesimal (I^[p] = 0), a base map R -> C and the quotient C -> C/I.
Given theta: A -> C/I, enumerate_lifts lists every R-algebra map A -> C over
theta by trying all coset representatives. Lift counts are the independent
oracle for unramified (at most one lift) and étale (exactly one lift).
"""

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from algebra import (
    AlgebraMap,
    IdealHandle,
    RingPresentation,
    compose,
    fresh_names,
    frobenius_power,
    ideal_product,
)
from differentials import derivation_space_dimension
from fpmodule import ModulePresentation
from frobenius import FrobeniusData, SurjectivityResult, build_frobenius, frobenius_surjective
from groebner import INFINITE
from kunz_errors import AmbientMismatch, BudgetExceeded, IncompatibleBase, NotArtinian
from linalg_fp import FiniteAlgebra, Subspace
from polycore import Poly, PolyRing, PrimeField

SQUARE_ZERO = "square-zero"
P_INFINITESIMAL = "p-infinitesimal"

DEFAULT_ENUMERATION_LIMIT = 10 ** 6


@dataclass
class SquareZeroExtension:
    """C ->> C/I with I square-zero or p-infinitesimal, over a base map R -> C."""
    C: RingPresentation
    I: IdealHandle
    kind: str
    quotient: AlgebraMap
    base_map: AlgebraMap
    name: str = ""


@dataclass
class TrivialExtension:
    """Ξ(A, M) = A ⊕ M with M·M = 0; eps_idx are the carrier variables of the M-generators."""
    A: RingPresentation
    M: ModulePresentation
    carrier: RingPresentation
    eps_idx: List[int]
    projection: AlgebraMap
    zero_section: AlgebraMap


@dataclass
class DeformationCase:
    name: str
    ext: SquareZeroExtension
    theta: AlgebraMap


def make_extension(C: RingPresentation, ideal_gens: Sequence[Poly], base_map: AlgebraMap,
                   kind: str = SQUARE_ZERO, name: str = "") -> SquareZeroExtension:
    """Validate and package an extension; C must be Artinian."""
    if kind not in (SQUARE_ZERO, P_INFINITESIMAL):
        raise ValueError(f"unknown extension kind {kind!r}")
    if base_map.target != C:
        raise AmbientMismatch("base map must land in the extension ring")
    if C.fp_dimension() is INFINITE:
        raise NotArtinian(f"extension ring {C} is not finite-dimensional")
    I = IdealHandle(C, ideal_gens)
    if kind == SQUARE_ZERO and not ideal_product(I, I).is_zero():
        raise ValueError(f"{name or 'extension'}: I^2 != 0")
    if kind == P_INFINITESIMAL and not frobenius_power(I, 1).is_zero():
        raise ValueError(f"{name or 'extension'}: I^[p] != 0")
    Q = C.quotient(I.gens, f"{C.name}/I")
    quotient = AlgebraMap(C, Q, C.ring.gens(), "quotient")
    return SquareZeroExtension(C, I, kind, quotient, base_map, name)


def trivial_extension(A: RingPresentation, M: ModulePresentation) -> TrivialExtension:
    """A-variables plus eps_1..eps_g; relations I_A, sum a_i eps_i per module relation, eps_i eps_j."""
    if M.ring != A:
        raise AmbientMismatch("module must live over A")
    g = M.free_rank
    names = fresh_names([f"eps{i + 1}" for i in range(g)], A.vars)
    ring = PolyRing(A.field, A.vars + tuple(names))
    a_idx = list(range(A.nvars))
    eps_idx = [A.nvars + i for i in range(g)]
    eps = [ring.var(i) for i in eps_idx]
    rels = [f.embed(ring, a_idx) for f in A.relations]
    for rel in M.relations:
        rels.append(sum((c.embed(ring, a_idx) * e for c, e in zip(rel.components, eps)), ring.zero()))
    for i, j in combinations(range(g), 2):
        rels.append(eps[i] * eps[j])
    rels += [e * e for e in eps]
    carrier = RingPresentation(ring, rels, f"Xi({A.name or 'A'})")
    projection = AlgebraMap(carrier, A, A.ring.gens() + [A.ring.zero()] * g, "projection")
    zero_section = AlgebraMap(A, carrier, [ring.var(i) for i in a_idx], "zero-section")
    return TrivialExtension(A, M, carrier, eps_idx, projection, zero_section)


def _ideal_basis(C_alg: FiniteAlgebra, I: IdealHandle) -> List[Poly]:
    """F_p-basis of I inside C."""
    rows = [C_alg.vector(g.mul_term(m, 1)) for g in I.gens for m in C_alg.basis]
    sub = Subspace(rows, C_alg.dim, C_alg.p)
    return [C_alg.element(r) for r in sub.basis]


def enumerate_lifts(alpha: AlgebraMap, ext: SquareZeroExtension, theta: AlgebraMap,
                    budget=None, limit: Optional[int] = None) -> List[AlgebraMap]:
    """
    Every R-algebra map A -> C lifting theta, in lexicographic order of the
    coefficient tuples over the F_p-basis of I.
    """
    A, C, R = alpha.target, ext.C, alpha.source
    Q = ext.quotient.target
    if theta.source != A or theta.target.ring != C.ring:
        raise AmbientMismatch("theta must map A into C/I")
    if ext.base_map.source != R:
        raise AmbientMismatch("extension base map has a different source than alpha")
    for j, img in enumerate(alpha.images):
        if not Q.equal(theta.apply(img), ext.base_map.images[j], budget):
            raise IncompatibleBase(
                f"theta∘alpha and the base map disagree on {R.vars[j]} modulo I")
    limit = DEFAULT_ENUMERATION_LIMIT if limit is None else limit
    p = C.p
    C_alg = FiniteAlgebra(C.ring, C.gb(budget=budget))
    basis_I = _ideal_basis(C_alg, ext.I)
    bare = alpha.base_image_vars()
    forced = {i: ext.base_map.images[j] for i, j in bare.items()}
    free = [i for i in range(A.nvars) if i not in forced]
    d = len(basis_I)
    count = p ** (d * len(free))
    if count > limit:
        raise BudgetExceeded("lift enumeration", limit, count)

    lifts = []
    for coeffs in product(range(p), repeat=d * len(free)):
        images: List[Optional[Poly]] = [None] * A.nvars
        for i, val in forced.items():
            images[i] = val
        for k, i in enumerate(free):
            img = theta.images[i]
            for c, b in zip(coeffs[k * d:(k + 1) * d], basis_I):
                if c:
                    img = img + b.scale(c)
            images[i] = img
        if not all(C.is_zero(f.substitute(images, C.ring), budget) for f in A.relations):
            continue
        if not all(C.equal(img.substitute(images, C.ring), ext.base_map.images[j], budget)
                   for j, img in enumerate(alpha.images)):
            continue
        lifts.append(AlgebraMap(A, C, [C.nf(x) for x in images], f"lift{len(lifts)}"))
    return lifts


def xi_uniqueness_check(alpha: AlgebraMap, ext: SquareZeroExtension, theta: AlgebraMap,
                        fd: Optional[FrobeniusData] = None,
                        surj: Optional[SurjectivityResult] = None,
                        budget=None, limit: Optional[int] = None) -> Dict:
    """
    When F_alpha is onto and I^[p] = 0, any lift is forced: x_i must go to the
    surjectivity preimage of x_i evaluated at (rep^p, base images). Compares
    the enumerated lifts with that prediction.
    """
    A, C = alpha.target, ext.C
    if fd is None:
        fd = build_frobenius(alpha, 1, budget)
    if surj is None:
        surj = frobenius_surjective(fd, budget)
    lifts = enumerate_lifts(alpha, ext, theta, budget, limit)
    p_nil = frobenius_power(ext.I, 1).is_zero()
    report = {
        "applicable": bool(surj.surjective and p_nil),
        "lift_count": len(lifts),
        "passed": None,
        "prediction": None,
        "differences": [],
    }
    for a, b in combinations(lifts, 2):
        report["differences"].append(
            [str(C.nf(x - y)) for x, y in zip(a.images, b.images)])
    if not report["applicable"]:
        return report
    subs = [theta.images[i].pow_p(1) for i in range(A.nvars)] + list(ext.base_map.images)
    prediction = [C.nf(surj.preimages[name].substitute(subs, C.ring)) for name in A.vars]
    report["prediction"] = [str(x) for x in prediction]
    agree = all(C.equal(lift.images[i], prediction[i]) for lift in lifts for i in range(A.nvars))
    report["passed"] = len(lifts) <= 1 and agree
    return report


def section_count_vs_derivations(alpha: AlgebraMap, M: ModulePresentation,
                                 budget=None, limit: Optional[int] = None) -> Tuple[int, int]:
    """(number of R-algebra sections of Ξ(A, M) -> A, p^dim Hom_A(Ω_{A/R}, M))."""
    A = alpha.target
    xi = trivial_extension(A, M)
    base = compose(xi.zero_section, alpha, "base")
    ext = make_extension(xi.carrier, [xi.carrier.var(i) for i in xi.eps_idx], base,
                         SQUARE_ZERO, "Xi")
    theta = AlgebraMap(A, ext.quotient.target, [xi.carrier.var(i) for i in range(A.nvars)], "id")
    sections = len(enumerate_lifts(alpha, ext, theta, budget, limit))
    dim = derivation_space_dimension(alpha, M)
    return sections, A.p ** dim


# -----------------------------------------------------------------------------
# Deformation bank
# -----------------------------------------------------------------------------

def finite_points(A: RingPresentation, limit: Optional[int] = None) -> List[Tuple[int, ...]]:
    """F_p-rational points of A, lexicographic."""
    p, n = A.p, A.nvars
    limit = DEFAULT_ENUMERATION_LIMIT if limit is None else limit
    if p ** n > limit:
        raise BudgetExceeded("point enumeration", limit, p ** n)
    return [pt for pt in product(range(p), repeat=n)
            if all(f.evaluate(pt) == 0 for f in A.relations)]


def _eps_ring(p: int, names: Sequence[str], rels_of) -> RingPresentation:
    ring = PolyRing(PrimeField(p), tuple(names))
    return RingPresentation(ring, rels_of(ring.gens()), "C")


def dual_numbers(p: int) -> RingPresentation:
    return _eps_ring(p, ("eps",), lambda g: [g[0] ** 2])


def two_parameter(p: int) -> RingPresentation:
    return _eps_ring(p, ("eps1", "eps2"), lambda g: [g[0] ** 2, g[0] * g[1], g[1] ** 2])


def truncated_power(p: int) -> RingPresentation:
    """F_p[eps]/(eps^p): (eps)^[p] = 0 but (eps)^2 != 0 for p > 2."""
    return _eps_ring(p, ("eps",), lambda g: [g[0] ** p])


def _point_case(alpha: AlgebraMap, point: Sequence[int], C: RingPresentation,
                kind: str, base_images: Optional[Sequence[Poly]], label: str) -> DeformationCase:
    A, R = alpha.target, alpha.source
    if base_images is None:
        base_images = [C.ring.constant(img.evaluate(point)) for img in alpha.images]
    base = AlgebraMap(R, C, base_images, "base")
    ext = make_extension(C, C.ring.gens(), base, kind, label)
    theta = AlgebraMap(A, ext.quotient.target, [C.ring.constant(v) for v in point], "theta")
    return DeformationCase(label, ext, theta)


def base_point_lifts(alpha: AlgebraMap, point: Sequence[int], C: RingPresentation,
                     budget=None) -> List[AlgebraMap]:
    """Lifts of the induced R-point to R -> C (including the constant one)."""
    R = alpha.source
    Fp = RingPresentation.prime_field(R.p)
    structure = AlgebraMap(Fp, R, (), "structure")
    ext = make_extension(C, C.ring.gens(), AlgebraMap(Fp, C, (), "base"), SQUARE_ZERO, "base")
    r_point = [img.evaluate(point) for img in alpha.images]
    theta0 = AlgebraMap(R, ext.quotient.target, [C.ring.constant(v) for v in r_point], "theta0")
    return enumerate_lifts(structure, ext, theta0, budget)


def bank(alpha: AlgebraMap, max_points: int = 2, max_base_lifts: int = 2,
         budget=None, limit: Optional[int] = None) -> List[DeformationCase]:
    """
    Generated extensions at the first rational points of A: dual numbers,
    dual numbers over deformed base points, two-parameter square-zero, and
    F_p[eps]/(eps^p) as a p-infinitesimal extension. residue-xi is the trivial
    extension of the residue field by itself, built through trivial_extension;
    as a ring it is the dual numbers again.
    """
    A = alpha.target
    p = A.p
    residue = RingPresentation.prime_field(p)
    xi = trivial_extension(residue, ModulePresentation.free(residue, 1)).carrier
    cases = []
    for point in finite_points(A, limit)[:max_points]:
        tag = "(" + ",".join(str(v) for v in point) + ")"
        cases.append(_point_case(alpha, point, dual_numbers(p), SQUARE_ZERO, None, f"dual@{tag}"))
        cases.append(_point_case(alpha, point, xi, SQUARE_ZERO, None, f"residue-xi@{tag}"))
        C = dual_numbers(p)
        const = [C.ring.constant(img.evaluate(point)) for img in alpha.images]
        deformed = [l for l in base_point_lifts(alpha, point, C, budget)
                    if any(not C.equal(a, b) for a, b in zip(l.images, const))]
        for k, lift in enumerate(deformed[:max_base_lifts]):
            cases.append(_point_case(alpha, point, C, SQUARE_ZERO, lift.images,
                                     f"dual-moved{k}@{tag}"))
        cases.append(_point_case(alpha, point, two_parameter(p), SQUARE_ZERO, None, f"two-param@{tag}"))
        cases.append(_point_case(alpha, point, truncated_power(p), P_INFINITESIMAL, None,
                                 f"p-infinitesimal@{tag}"))
    return cases
