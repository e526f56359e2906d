"""
Relative Frobenius of alpha: R -> A as presented-ring data.

B = A ⊗_R F^e_*R has variables z (a copy of A's) and r (a copy of R's) with
relations I_A(z), I_R(r) and phi_j(z) - r_j^q, which encode the twisted
action r . F_*r' = F_*(r^q r'). psi: B -> A sends z_i to x_i^q and r_j to
phi_j(x); F^e_*A is A itself, the twist lives in psi.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional

from algebra import (
    AlgebraMap,
    IdealHandle,
    RingPresentation,
    SubalgebraOracle,
    check_map,
    frobenius_power,
    ring_map_kernel,
)
from fpmodule import FlatnessVerdict, restricted_flatness
from polycore import Poly, PolyRing


@dataclass
class FrobeniusData:
    alpha: AlgebraMap
    e: int
    q: int
    B: RingPresentation
    psi: AlgebraMap
    z_idx: List[int]
    r_idx: List[int]


@dataclass
class SurjectivityResult:
    surjective: bool
    # per A-variable: B-polynomial b with psi(b) = x_i, or None
    preimages: Dict[str, Optional[Poly]] = field(default_factory=dict)
    missing: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.surjective


@dataclass
class InjectivityResult:
    injective: bool
    kernel: IdealHandle

    def __bool__(self) -> bool:
        return self.injective


def build_frobenius(alpha: AlgebraMap, e: int = 1, budget=None) -> FrobeniusData:
    """Construct B = A ⊗_R F^e_*R and psi: B -> F^e_*A."""
    if e < 1:
        raise ValueError("e must be at least 1")
    A, R = alpha.target, alpha.source
    p = A.p
    q = p ** e
    names = tuple(f"z_{v}" for v in A.vars) + tuple(f"r_{u}" for u in R.vars)
    Bring = PolyRing(A.field, names)
    nA, nR = A.nvars, R.nvars
    z_idx = list(range(nA))
    r_idx = [nA + j for j in range(nR)]
    rels = [f.embed(Bring, z_idx) for f in A.relations]
    rels += [f.embed(Bring, r_idx) for f in R.relations]
    for j, img in enumerate(alpha.images):
        rels.append(img.embed(Bring, z_idx) - Bring.var(r_idx[j]) ** q)
    B = RingPresentation(Bring, rels, f"{A.name or 'A'}_(F^{e}_*{R.name or 'R'})")

    images = [x.pow_p(e) for x in A.ring.gens()] + list(alpha.images)
    psi = check_map(images, B, A, name=f"F^{e}_{alpha.name or 'alpha'}", budget=budget)
    return FrobeniusData(alpha, e, q, B, psi, z_idx, r_idx)


def _image_oracle(fd: FrobeniusData, budget=None) -> SubalgebraOracle:
    # image of psi = F_p-subalgebra generated by the x_i^q and the phi_j
    return SubalgebraOracle(fd.psi.target, fd.psi.images, budget)


def _tag_to_B(cert: Poly, fd: FrobeniusData) -> Poly:
    # tag w_l stands for psi(B-variable l)
    return cert.substitute(fd.B.ring.gens(), fd.B.ring)


def frobenius_surjective(fd: FrobeniusData, budget=None) -> SurjectivityResult:
    """Every A-generator lies in alpha(R)[A^q]; certificates are psi-preimages in B."""
    A = fd.psi.target
    oracle = _image_oracle(fd, budget)
    preimages: Dict[str, Optional[Poly]] = {}
    missing = []
    for i, name in enumerate(A.vars):
        mem = oracle.membership(A.var(i), budget)
        if mem.member:
            preimages[name] = _tag_to_B(mem.certificate, fd)
        else:
            preimages[name] = None
            missing.append(name)
    return SurjectivityResult(not missing, preimages, missing)


def replay_surjectivity(fd: FrobeniusData, result: SurjectivityResult) -> bool:
    """psi(preimage_i) = x_i in A for every recorded preimage."""
    A = fd.psi.target
    for i, name in enumerate(A.vars):
        b = result.preimages.get(name)
        if b is None:
            continue
        if not A.equal(fd.psi.apply(b), A.var(i)):
            return False
    return True


def fstar_module_generators(fd: FrobeniusData) -> List[Poly]:
    """Monomials x^v with 0 <= v_i < q; they generate F^e_*A over B (unpruned)."""
    A = fd.psi.target
    return [A.ring.monomial(v) for v in product(range(fd.q), repeat=A.nvars)]


def frobenius_surjective_by_box(fd: FrobeniusData, budget=None, max_box: int = 4096) -> Optional[bool]:
    """
    Surjectivity through the module generators: psi is onto iff every box
    monomial is in its image. None when the box exceeds max_box.
    """
    A = fd.psi.target
    if fd.q ** A.nvars > max_box:
        return None
    oracle = _image_oracle(fd, budget)
    return all(oracle.membership(m, budget).member for m in fstar_module_generators(fd))


def frobenius_injective(fd: FrobeniusData, budget=None) -> InjectivityResult:
    kernel = ring_map_kernel(fd.psi, budget)
    return InjectivityResult(kernel.is_zero(), kernel)


def frobenius_iso(fd: FrobeniusData, budget=None) -> bool:
    return bool(frobenius_surjective(fd, budget)) and bool(frobenius_injective(fd, budget))


def frobenius_flatness(fd: FrobeniusData, budget=None, max_generators: int = 8,
                       max_minors: int = 20000) -> FlatnessVerdict:
    """Restricted flatness of psi (F^e_*A as a B-module)."""
    return restricted_flatness(fd.psi, budget, max_generators, max_minors)


def iterate_consistency(alpha: AlgebraMap, e_max: int = 2, budget=None) -> Dict:
    """
    Surjective / injective / iso verdicts for e = 1..e_max; coherent is False
    when the iso verdict depends on e.
    """
    per_e = {}
    for e in range(1, e_max + 1):
        fd = build_frobenius(alpha, e, budget)
        surj = frobenius_surjective(fd, budget)
        inj = frobenius_injective(fd, budget)
        per_e[e] = {
            "surjective": surj.surjective,
            "injective": inj.injective,
            "iso": surj.surjective and inj.injective,
        }
    isos = {v["iso"] for v in per_e.values()}
    return {"per_e": per_e, "coherent": len(isos) <= 1}


def is_quotient_map(alpha: AlgebraMap) -> bool:
    """alpha is R -> R/a with every variable sent to itself."""
    R, A = alpha.source, alpha.target
    if R.ring != A.ring:
        return False
    return all(img == R.var(i) for i, img in enumerate(alpha.images))


def quotient_frobenius_identity(alpha: AlgebraMap, e: int = 1, budget=None) -> Optional[bool]:
    """
    For a quotient map R -> R/a, B is R/(I_R + a^[q]): checks that the kernel
    of R -> B, u -> r_u equals that ideal. None for other maps.
    """
    if not is_quotient_map(alpha):
        return None
    R, A = alpha.source, alpha.target
    fd = build_frobenius(alpha, e, budget)
    to_B = check_map([fd.B.var(j) for j in fd.r_idx], R, fd.B, "R->B", budget=budget)
    kernel = ring_map_kernel(to_B, budget)
    a = IdealHandle(R, list(A.relations))
    expected = frobenius_power(a, e)
    return kernel.equals(expected, budget)
