"""
Corpus of maps and truncation families.

Map cases are .kz sources with an expected partial verdict; every expected
field carries a provenance tag. Families stand in for non-noetherian
colimit objects: each level is a finitely presented ring checked for its
finite-stage behavior, with the colimit claim printed next to it and never
machine-checked.

Families:
    SQRT-TOWER-trunc(N)   F_3[s_0..s_N]/(s_k^2 - s_{k-1}), a = (s_0..s_N)
    PROOT-TOWER-trunc(N)  F_p[s_0..s_N]/(s_k^p - s_{k-1}), a = (s_0..s_N)
    BG-trunc(i, N)        F_p[e_{j,k}]/(e_{j,0}, e_{j,k}^p - e_{j,k-1}), j <= 2^i, k <= N
    FIELD-pbasis(N)       F_p[t] -> F_p[s], t -> s^(p^N)
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from algebra import (
    IdealHandle,
    RingPresentation,
    SubalgebraOracle,
    check_map,
    frobenius_power,
    ideal_power,
)
from dsl import Elaborated, load
from frobenius import build_frobenius, frobenius_surjective
from groebner import eliminate, normal_form
from kunz_errors import NotWellDefined
from linalg_fp import FiniteAlgebra, rank

COLIMIT_LABEL = "colimit claim - not machine-checked"

TRIVIAL = "TRIVIAL"
DERIVED = "DERIVED"


@dataclass
class CorpusCase:
    """A map with an expected partial verdict."""
    name: str
    dsl_source: str
    target: str
    expected: Dict[str, Any]
    provenance: Dict[str, str]
    notes: str = ""
    family: Optional[str] = None
    level: Optional[int] = None

    def load(self) -> Elaborated:
        return load(self.dsl_source)

    def alpha(self):
        return self.load().resolve(self.target)


@dataclass
class FamilyCase:
    """One level of a truncation family; run() returns checks and witnesses."""
    name: str
    family: str
    level: Any
    run: Callable[[], Dict[str, Any]]
    colimit_claim: str
    dsl_source: str = ""


@dataclass
class BaseChangePair:
    name: str
    dsl_source: str
    alpha: str
    rho: str


@dataclass
class CompositionCase:
    name: str
    dsl_source: str
    first: str
    second: str


@dataclass
class AdjunctionCase:
    """Map given by target (map or ring name) and M = A/(module_ideal)."""
    name: str
    dsl_source: str
    target: str
    module_ideal: List[str] = field(default_factory=list)
    expected: Optional[int] = None


def _etale(why: str) -> Dict[str, str]:
    return {"omega_zero": why, "frob_surjective": why, "frob_injective": why,
            "frob_iso": why, "kind": why}


def _case(name, src, target, expected, provenance, notes=""):
    return CorpusCase(name, src.strip() + "\n", target, expected, provenance, notes)


ETALE = {"omega_zero": True, "frob_surjective": True, "frob_injective": True,
         "frob_iso": True, "kind": "etale"}
UNRAMIFIED = {"omega_zero": True, "frob_surjective": True, "frob_injective": False,
              "frob_iso": False, "kind": "unramified"}


def map_cases() -> List[CorpusCase]:
    cases = [
        _case("AS-3", """
prime 3
ring R = [t]
ring A = R[x] / (x^3 - x - t)
""", "A", dict(ETALE, flatness="flat"),
            dict(_etale(f"{DERIVED}: jacobian -1 is a unit; x = x^3 - t"),
                 flatness=f"{DERIVED}: A is free of rank 3 over R")),
        _case("AS-2", """
prime 2
ring R = [t]
ring A = R[x] / (x^2 + x + t)
""", "A", ETALE, _etale(f"{DERIVED}: jacobian 2x + 1 = 1; x = x^2 + t")),
        _case("CLOSED-IMM", """
prime 3
ring R = [u]
ring A = R[] / (u)
""", "A", dict(UNRAMIFIED, flatness="not-flat"),
            dict(_etale(f"{DERIVED}: no fiber variables; Frobenius kernel (r_u)"),
                 flatness=f"{DERIVED}: Fitt_0 = (u) is not idempotent")),
        _case("CLOSED-IMM-2", """
prime 2
ring R = [u, w]
ring A = R[] / (u^2 - w)
""", "A", UNRAMIFIED, _etale(f"{DERIVED}: quotient map; B = R/(u^4 - w^2) has nilpotent u^2 - w")),
        _case("POLY-EXT", """
prime 2
ring A = [x]
""", "A", {"omega_zero": False, "frob_surjective": False, "frob_injective": True,
                  "kind": "neither"},
            {"omega_zero": f"{TRIVIAL}: free differential dx",
             "frob_surjective": f"{TRIVIAL}: x is not in F_2[x^2] by degree",
             "frob_injective": f"{TRIVIAL}: z -> x^2 on a polynomial ring",
             "kind": f"{TRIVIAL}: free differential"}),
        _case("CUSP", """
prime 2
ring R = [u]
ring A = R[x] / (x^2 - u^3)
""", "A", {"omega_zero": False, "frob_surjective": False, "kind": "neither"},
            {"omega_zero": f"{DERIVED}: jacobian 2x = 0",
             "frob_surjective": f"{DERIVED}: x is not in F_2[u, x^2]",
             "kind": f"{DERIVED}: both engines"}),
        _case("ETALE-LOC", """
prime 3
ring R = [u, v] / (u*v - 1)
ring A = R[x] / (x^2 - u)
""", "A", ETALE, _etale(f"{DERIVED}: jacobian 2x with (2x)(2xv) = 1")),
        _case("FROB-TWIST", """
prime 3
ring R = [u]
ring S = [s]
map f : R -> S { u -> s^3 }
""", "f", {"omega_zero": False, "frob_surjective": False, "frob_injective": False,
                  "kind": "neither"},
            {"omega_zero": f"{TRIVIAL}: d(s^3) = 0",
             "frob_surjective": f"{DERIVED}: image is F_3[s^3]",
             "frob_injective": f"{DERIVED}: z_s - r_u is nilpotent and maps to 0",
             "kind": f"{TRIVIAL}: free differential"}),
        _case("LOC", """
prime 3
ring R = [u]
ring L = invert u in R
""", "L", ETALE, _etale(f"{DERIVED}: open immersion; d(u*u_inv - 1) = u")),
        _case("ID", """
prime 5
ring R = [u, w]
map f : R -> R { u -> u, w -> w }
""", "f", ETALE, _etale(f"{TRIVIAL}: identity")),
        _case("FIELD-EXT", """
prime 5
ring K = [x] / (x^2 - 2)
""", "K", ETALE, _etale(f"{DERIVED}: F_25 over F_5; 2x is a unit")),
        _case("SPLIT", """
prime 3
ring A = [x] / (x^2 - x)
""", "A", ETALE, _etale(f"{DERIVED}: (2x - 1)^2 = 1")),
        _case("DUAL", """
prime 2
ring A = [x] / (x^2)
""", "A", {"omega_zero": False, "frob_surjective": False, "frob_injective": False,
                  "kind": "neither"},
            {"omega_zero": f"{TRIVIAL}: zero jacobian",
             "frob_surjective": f"{TRIVIAL}: x is not in F_2",
             "frob_injective": f"{TRIVIAL}: z maps to x^2 = 0",
             "kind": f"{TRIVIAL}: zero jacobian"}),
        _case("FAT-POINT", """
prime 3
ring A = [x] / (x^3)
""", "A", {"omega_zero": False, "frob_surjective": False, "kind": "neither"},
            {"omega_zero": f"{TRIVIAL}: 3x^2 = 0",
             "frob_surjective": f"{TRIVIAL}: x is not in F_3",
             "kind": f"{TRIVIAL}: zero jacobian"}),
        _case("SQRT-RAMIFIED", """
prime 3
ring R = [u]
ring A = R[x] / (x^2 - u)
""", "A", {"omega_zero": False, "frob_surjective": False, "frob_injective": True,
                  "kind": "neither"},
            {"omega_zero": f"{DERIVED}: Omega = A/(2x)",
             "frob_surjective": f"{DERIVED}: x is not in F_3[x^2, x^3]",
             "frob_injective": f"{DERIVED}: B is the cusp, psi its normalization",
             "kind": f"{DERIVED}: ramified at x = 0"}),
        _case("GRAPH", """
prime 3
ring R = [u]
ring A = R[x] / (x - u^2)
""", "A", ETALE, _etale(f"{TRIVIAL}: A = R")),
    ]
    return cases


# -----------------------------------------------------------------------------
# Truncation families
# -----------------------------------------------------------------------------

def _root_tower_source(p: int, N: int, root: int) -> str:
    names = [f"s{k}" for k in range(N + 1)]
    rels = [f"s{k}^{root} - s{k - 1}" for k in range(1, N + 1)]
    src = f"prime {p}\nring R = [{', '.join(names)}]"
    if rels:
        src += " / (" + ", ".join(rels) + ")"
    src += f"\nring Ra = R[] / ({', '.join(names)})\n"
    return src


def sqrt_tower_level(N: int, p: int = 3) -> Dict[str, Any]:
    """R_N/a_N^[p] has dimension p, R_N/a_N dimension 1; a_N^2 != a_N."""
    elab = load(_root_tower_source(p, N, 2))
    R = elab.rings["R"].presentation
    a = IdealHandle(R, [R.var(k) for k in range(N + 1)])
    ap = frobenius_power(a, 1)
    big = ap.quotient("R/a^[p]")
    dim_big = big.fp_dimension()
    dim_small = a.quotient("R/a").fp_dimension()
    a2 = ideal_power(a, 2)
    # s_k = s_N^(2^(N-k)) survives modulo a^[p] iff 2^(N-k) < p
    fa = FiniteAlgebra(big.ring, big.gb())
    survivors = [k for k in range(N + 1) if not fa.is_zero(big.nf(R.var(k)))]
    vectors = [fa.vector(big.ring.one())] + [fa.vector(big.nf(R.var(k))) for k in survivors]
    independent = rank(np.array(vectors), p) == len(vectors)
    non_injective = any(not ap.contains(R.var(k)) for k in range(N + 1))
    checks = {
        "dim_quotient_frobenius_power": dim_big == p,
        "dim_quotient": dim_small == 1,
        "canonical_map_not_injective": non_injective,
        "square_differs": not a2.equals(a),
        "witnesses_independent": independent,
    }
    return {
        "checks": checks,
        "witnesses": {
            "dim_R/a^[p]": dim_big if isinstance(dim_big, int) else str(dim_big),
            "dim_R/a": dim_small if isinstance(dim_small, int) else str(dim_small),
            "independent_roots": [f"s{k}" for k in survivors],
        },
    }


def proot_tower_level(N: int, p: int = 3) -> Dict[str, Any]:
    """
    a_N^[p] != a_N at level N.

    a_N/a_N^[p] is spanned by s_N, so the normal-form witness is s_N itself
    and has degree 1 at every level. What grows with N is the root relation
    s_N^(p^N) - s_0 obtained by eliminating s_1..s_{N-1}; its degree is
    reported as root_relation_degree and checked against p^N.
    """
    elab = load(_root_tower_source(p, N, p))
    R = elab.rings["R"].presentation
    a = IdealHandle(R, [R.var(k) for k in range(N + 1)])
    ap = frobenius_power(a, 1)
    witness = normal_form(R.var(N), ap.gb())
    keep = [0, N]
    root = eliminate(R.relations, [k for k in range(N + 1) if k not in keep], ring=R.ring)
    degree = max((f.degree() for f in root), default=0)
    checks = {
        "frobenius_power_differs": not ap.equals(a),
        "witness_nonzero": not witness.is_zero(),
        "root_relation_degree_is_p_power": degree == p ** N,
    }
    return {
        "checks": checks,
        "witnesses": {
            "normal_form": str(witness),
            "root_relation": [str(f) for f in root],
            "root_relation_degree": degree,
        },
    }


def bg_source(p: int, i: int, N: int, name: str = "A") -> str:
    names, rels = [], []
    for j in range(1, 2 ** i + 1):
        names += [f"e{j}_{k}" for k in range(N + 1)]
        rels.append(f"e{j}_0")
        rels += [f"e{j}_{k}^{p} - e{j}_{k - 1}" for k in range(1, N + 1)]
    return f"ring {name} = [{', '.join(names)}] / ({', '.join(rels)})\n"


def bg_stage(i: int, N: int, p: int = 3) -> Dict[str, Any]:
    """
    Non-reducedness witness e_{1,1} (nonzero, p-th power zero), interior
    surjectivity of the p-th power subalgebra and the transition map
    e_{i,j,k} -> e_{i+1,2j-1,k} e_{i+1,2j,k}.
    """
    if N < 1:
        raise ValueError("BG stages need N >= 1")
    src = f"prime {p}\n" + bg_source(p, i, N, "A") + bg_source(p, i + 1, N, "An")
    elab = load(src)
    A = elab.rings["A"].presentation
    An = elab.rings["An"].presentation
    w = A.var("e1_1")
    pth_powers = SubalgebraOracle(A, [A.var(k) ** p for k in range(A.nvars)])
    interior, top = [], []
    for j in range(1, 2 ** i + 1):
        for k in range(N + 1):
            member = pth_powers.membership(A.var(f"e{j}_{k}")).member
            (interior if k < N else top).append(member)
    images = []
    for j in range(1, 2 ** i + 1):
        for k in range(N + 1):
            images.append(An.var(f"e{2 * j - 1}_{k}") * An.var(f"e{2 * j}_{k}"))
    try:
        check_map(images, A, An, f"theta_{i}")
        transition_ok = True
    except NotWellDefined:
        transition_ok = False
    checks = {
        "nilpotent_witness": not A.is_zero(w) and A.is_zero(w ** p),
        "interior_surjective": all(interior),
        "top_level_not_surjective": not any(top),
        "transition_well_defined": transition_ok,
    }
    return {
        "checks": checks,
        "witnesses": {"nilpotent": "e1_1", "p_th_power": str(A.nf(w ** p))},
    }


def pbasis_source(p: int, N: int) -> str:
    return f"prime {p}\nring K = [t]\nring L = [s]\nmap f : K -> L {{ t -> s^{p ** N} }}\n"


def pbasis_level(N: int, p: int = 3) -> Dict[str, Any]:
    """t -> s^(p^N): Frobenius not onto; its image is F_p[s^p], the previous level."""
    alpha = load(pbasis_source(p, N)).resolve("f")
    fd = build_frobenius(alpha, 1)
    S = alpha.target
    surj = frobenius_surjective(fd)
    image = SubalgebraOracle(S, fd.psi.images)
    checks = {
        "frobenius_not_surjective": not surj.surjective,
        "image_contains_previous_level": image.membership(S.var(0) ** p).member,
        "image_misses_top_root": not image.membership(S.var(0)).member,
    }
    return {"checks": checks, "witnesses": {"missing": surj.missing}}


def family_cases(config: Optional[Dict[str, Any]] = None) -> List[FamilyCase]:
    cfg = (config or {}).get("corpus", {})
    p = int(cfg.get("prime", 3))
    sqrt_levels = cfg.get("sqrt_tower_levels", [1, 2, 3])
    towers = cfg.get("proot_tower_levels", [1, 2, 3, 4, 5, 6])
    bg = cfg.get("bg_stages", [[0, 1], [0, 2], [1, 1], [1, 2], [2, 1], [2, 2]])
    pb = cfg.get("pbasis_levels", [1, 2, 3])
    out = []
    for N in sqrt_levels:
        out.append(FamilyCase(f"SQRT-TOWER-trunc({N})", "SQRT-TOWER-trunc", N,
                              lambda n=N: sqrt_tower_level(n, 3),
                              "R/a^[q] is infinite-dimensional and a^2 = a, so the colimit map is formally etale",
                              _root_tower_source(3, N, 2)))
    for N in towers:
        out.append(FamilyCase(f"PROOT-TOWER-trunc({N})", "PROOT-TOWER-trunc", N,
                              lambda n=N: proot_tower_level(n, p),
                              "a^[p] = a in the perfect colimit", _root_tower_source(p, N, p)))
    for i, N in bg:
        out.append(FamilyCase(f"BG-trunc({i},{N})", "BG-trunc", (i, N),
                              lambda a=i, b=N: bg_stage(a, b, p),
                              "the colimit is non-reduced with trivial cotangent complex: "
                              "formally etale but not pre-pristine",
                              f"prime {p}\n" + bg_source(p, i, N)))
    for N in pb:
        out.append(FamilyCase(f"FIELD-pbasis({N})", "FIELD-pbasis", N,
                              lambda n=N: pbasis_level(n, p),
                              "k in k(t^(1/p^inf)) is pristine: the empty set is a p-basis",
                              pbasis_source(p, N)))
    return out


def proot_degrees_monotone(results: Sequence[Dict[str, Any]]) -> bool:
    """Root-relation degrees, in level order, strictly increase."""
    degrees = [r["witnesses"]["root_relation_degree"] for r in results]
    return all(a < b for a, b in zip(degrees, degrees[1:]))


# -----------------------------------------------------------------------------
# Stability, composition and adjunction cases
# -----------------------------------------------------------------------------

def base_change_pairs() -> List[BaseChangePair]:
    return [
        BaseChangePair("AS-3 @ t=0", """prime 3
ring R = [t]
ring A = R[x] / (x^3 - x - t)
ring R0 = R[] / (t)
""", "A", "R0"),
        BaseChangePair("AS-3 @ t=w^2", """prime 3
ring R = [t]
ring A = R[x] / (x^3 - x - t)
ring W = [w]
map rho : R -> W { t -> w^2 }
""", "A", "rho"),
        BaseChangePair("ETALE-LOC @ u=1", """prime 3
ring R = [u, v] / (u*v - 1)
ring A = R[x] / (x^2 - u)
ring R1 = R[] / (u - 1)
""", "A", "R1"),
        BaseChangePair("LOC @ u=2", """prime 3
ring R = [u]
ring L = invert u in R
ring R2 = R[] / (u - 2)
""", "L", "R2"),
        BaseChangePair("SPLIT @ F_9", """prime 3
ring A = [x] / (x^2 - x)
ring C = [y] / (y^2 + 1)
""", "A", "C"),
        BaseChangePair("CLOSED-IMM @ u=w^2", """prime 3
ring R = [u]
ring A = R[] / (u)
ring W = [w]
map rho : R -> W { u -> w^2 }
""", "A", "rho"),
    ]


def composition_cases() -> List[CompositionCase]:
    return [
        CompositionCase("AS-3 then invert x", """prime 3
ring R = [t]
ring A = R[x] / (x^3 - x - t)
ring B = invert x in A
""", "A", "B"),
        CompositionCase("LOC then AS-3", """prime 3
ring R = [u]
ring L = invert u in R
ring M = L[y] / (y^3 - y - u)
""", "L", "M"),
        CompositionCase("SPLIT then SPLIT", """prime 3
ring A = [x] / (x^2 - x)
ring B = A[y] / (y^2 - y)
""", "A", "B"),
        CompositionCase("F_25 then square root", """prime 5
ring K = [x] / (x^2 - 2)
ring L = K[w] / (w^2 - x)
""", "K", "L"),
    ]


def adjunction_cases() -> List[AdjunctionCase]:
    return [
        AdjunctionCase("dual numbers, M = A/(x)", "prime 2\nring A = [x] / (x^2)\n", "A", ["x"], 2),
        AdjunctionCase("F_3, M = A", "prime 3\nring A = []\n", "A", [], 1),
        AdjunctionCase("F_3[x]/(x^3), M = A/(x)", "prime 3\nring A = [x] / (x^3)\n", "A", ["x"], 3),
        AdjunctionCase("split F_3, M = A", "prime 3\nring A = [x] / (x^2 - x)\n", "A", [], 1),
        AdjunctionCase("dual numbers, M = A", "prime 2\nring A = [x] / (x^2)\n", "A", [], 4),
        AdjunctionCase("F_3[u] -> F_3[u]/(u^2), M = A/(u)",
                       "prime 3\nring R = [u]\nring A = R[] / (u^2)\n", "A", ["u"], 1),
        AdjunctionCase("F_2[x,y]/(x^2,y^2), M = A/(x,y)",
                       "prime 2\nring A = [x, y] / (x^2, y^2)\n", "A", ["x", "y"], 4),
    ]


def corpus_rings() -> List[RingPresentation]:
    """Every ring named in the map cases (for the engine self-checks)."""
    seen, out = set(), []
    for case in map_cases():
        for flat in case.load().rings.values():
            A = flat.presentation
            key = (A.ring, tuple(A.relations))
            if key not in seen:
                seen.add(key)
                out.append(A)
    return out
