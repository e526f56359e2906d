"""
Finitely presented modules over presented rings.

A ModulePresentation is the cokernel of the matrix whose columns are the
relation vectors. Membership and vanishing go through module Gröbner bases
over the polynomial ring with the ring relations adjoined in every position.
Fitting ideals come from cofactor minors; they drive the projectivity test,
which is the only flatness test the engine makes (module-finite maps only).
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from algebra import AlgebraMap, IdealHandle, RingPresentation, fresh_names, ideal_product
from groebner import (
    GroebnerBasis,
    ModuleVector,
    groebner_basis,
    module_groebner_basis,
    normal_form,
    staircase,
    INFINITE,
)
from kunz_errors import AmbientMismatch, BudgetExceeded
from polycore import GREVLEX, MonomialOrder, Poly, PolyRing, elimination_order

FLAT = "flat"
NOT_FLAT = "not-flat"
NOT_DECIDED = "not-decided"


class ModulePresentation:
    """coker(ring^m -> ring^g), the map given by the relation columns."""

    def __init__(self, ring: RingPresentation, free_rank: int,
                 relations: Sequence[ModuleVector] = (), name: str = ""):
        if free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for rel in relations:
            if rel.rank != free_rank:
                raise AmbientMismatch(f"relation {rel} has {rel.rank} components, expected {free_rank}")
            if rel.components and rel.components[0].ring != ring.ring:
                raise AmbientMismatch("relation components outside the module's ring")
        self.ring = ring
        self.free_rank = free_rank
        self.relations = tuple(relations)
        self.name = name
        self._gb: Optional[GroebnerBasis] = None

    @classmethod
    def free(cls, ring: RingPresentation, rank: int) -> "ModulePresentation":
        return cls(ring, rank, ())

    @classmethod
    def cyclic(cls, ring: RingPresentation, ideal_gens: Sequence[Poly]) -> "ModulePresentation":
        """ring/(ideal_gens) as a rank-1 presentation."""
        return cls(ring, 1, [ModuleVector((g,)) for g in ideal_gens])

    def unit(self, i: int) -> ModuleVector:
        return ModuleVector.unit(self.ring.ring, self.free_rank, i)

    def gb(self, budget=None) -> GroebnerBasis:
        if self._gb is None:
            self._gb = module_groebner_basis(self.relations, self.ring.ring, self.free_rank,
                                             extra_ideal=self.ring.relations, budget=budget)
        return self._gb

    def contains(self, v: ModuleVector, budget=None) -> bool:
        """v lies in the relation submodule (v is zero in the cokernel)."""
        if v.rank != self.free_rank:
            raise AmbientMismatch("vector rank differs from the module's free rank")
        if self.free_rank == 0:
            return True
        return normal_form(v, self.gb(budget), budget).is_zero()

    def matrix(self) -> List[List[Poly]]:
        """Row i, column j: component i of relation j."""
        return [[rel.components[i] for rel in self.relations] for i in range(self.free_rank)]

    def __repr__(self) -> str:
        return f"ModulePresentation(rank={self.free_rank}, relations={len(self.relations)})"


def submodule_membership(v: ModuleVector, gens: Sequence[ModuleVector],
                         ring: Optional[RingPresentation] = None, budget=None) -> bool:
    """v ∈ ⟨gens⟩ over ring (the free polynomial ring of v when ring is omitted)."""
    if ring is None:
        if not v.components:
            return True
        ring = RingPresentation(v.components[0].ring)
    return ModulePresentation(ring, v.rank, gens).contains(v, budget)


def module_is_zero(M: ModulePresentation, budget=None) -> bool:
    return all(M.contains(M.unit(i), budget) for i in range(M.free_rank))


# -----------------------------------------------------------------------------
# Fitting ideals
# -----------------------------------------------------------------------------

def _determinant(mat: List[List[Poly]], rows: Tuple[int, ...], cols: Tuple[int, ...],
                 memo: Dict, ring: RingPresentation) -> Poly:
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if len(rows) == 1:
        val = mat[rows[0]][cols[0]]
    else:
        val = ring.ring.zero()
        r0, rest = rows[0], rows[1:]
        for k, c in enumerate(cols):
            entry = mat[r0][c]
            if entry.is_zero():
                continue
            minor = _determinant(mat, rest, cols[:k] + cols[k + 1:], memo, ring)
            term = entry * minor
            val = val - term if k % 2 else val + term
        val = ring.nf(val)
    memo[key] = val
    return val


def _reduced_columns(M: ModulePresentation) -> List[ModuleVector]:
    seen = []
    for rel in M.relations:
        red = ModuleVector(tuple(M.ring.nf(c) for c in rel.components))
        if red.is_zero() or red in seen:
            continue
        seen.append(red)
    return seen


def fitting_ideal(M: ModulePresentation, j: int, max_minors: Optional[int] = None) -> IdealHandle:
    """
    Fitt_j(M): the ideal of (g-j)-minors of the presentation matrix.
    Fitt_j = (1) when g - j <= 0; (0) when there are fewer than g - j columns.
    """
    if j < 0:
        raise ValueError("Fitting index must be non-negative")
    A = M.ring
    k = M.free_rank - j
    if k <= 0:
        return IdealHandle(A, [A.ring.one()])
    cols = _reduced_columns(M)
    if k > len(cols):
        return IdealHandle(A, [])
    mat = [[rel.components[i] for rel in cols] for i in range(M.free_rank)]
    row_sets = list(combinations(range(M.free_rank), k))
    col_sets = list(combinations(range(len(cols)), k))
    if max_minors is not None and len(row_sets) * len(col_sets) > max_minors:
        raise BudgetExceeded(f"Fitt_{j} minors", max_minors, len(row_sets) * len(col_sets))
    memo: Dict = {}
    minors = []
    for rs in row_sets:
        for cs in col_sets:
            d = _determinant(mat, rs, cs, memo, A)
            if not d.is_zero():
                minors.append(d)
    return IdealHandle(A, minors)


def module_is_projective_of_rank(M: ModulePresentation, r: int, budget=None,
                                 max_minors: Optional[int] = None) -> bool:
    """Fitt_{r-1} = (0) and Fitt_r = (1)."""
    if r < 0:
        raise ValueError("rank must be non-negative")
    if r > 0 and not fitting_ideal(M, r - 1, max_minors).is_zero():
        return False
    return fitting_ideal(M, r, max_minors).is_unit(budget)


def _idempotent(I: IdealHandle, budget=None) -> bool:
    if I.is_zero():
        return True
    if I.is_unit(budget):
        return True
    return I.contained_in(ideal_product(I, I), budget)


def module_is_projective(M: ModulePresentation, budget=None,
                         max_minors: Optional[int] = None) -> Tuple[bool, Optional[int]]:
    """
    Projectivity of a finitely presented module: every Fitting ideal is
    idempotent. Returns (projective, constant rank or None).
    """
    fitts = []
    for j in range(M.free_rank + 1):
        I = fitting_ideal(M, j, max_minors)
        fitts.append(I)
        if I.is_unit(budget):
            if j == 0 or fitts[j - 1].is_zero():
                return True, j
            break
    return all(_idempotent(I, budget) for I in fitts), None


# -----------------------------------------------------------------------------
# Module-finite ring maps
# -----------------------------------------------------------------------------

@dataclass
class ModuleFinitePresentation:
    """The target of phi: B -> A as a B-module, when it is module-finite."""
    finite: bool
    generators: List[Poly] = field(default_factory=list)
    presentation: Optional[ModulePresentation] = None


def module_finite_presentation(phi: AlgebraMap, budget=None,
                               max_generators: Optional[int] = None) -> ModuleFinitePresentation:
    """
    Decide module-finiteness of phi: B -> A and present A over B.

    Generators are the A-monomials outside the pure-x leading terms of
    I_A + (y - phi(y)) under a block order x >> y. The relation module is the
    syzygy module of the generators over F_p[y], computed by eliminating a
    helper position e_0 together with the x variables.
    """
    A, B = phi.target, phi.source
    nx, ny = A.nvars, B.nvars
    y_names = fresh_names(B.vars, A.vars)
    T = PolyRing(A.field, A.vars + tuple(y_names))
    x_idx = list(range(nx))
    y_idx = [nx + j for j in range(ny)]
    J = [f.embed(T, x_idx) for f in A.relations]
    J += [T.var(y_idx[j]) - img.embed(T, x_idx) for j, img in enumerate(phi.images)]
    gbJ = groebner_basis(J, elimination_order(nx + ny, x_idx), budget, ring=T)

    pure_x = [lm[:nx] for lm in gbJ.leading if not any(lm[nx:])]
    stairs = staircase(pure_x, nx, GREVLEX, limit=max_generators)
    if stairs is INFINITE:
        return ModuleFinitePresentation(False)
    gens_x = [A.ring.monomial(m) for m in stairs]
    N = len(gens_x)
    if N == 0:
        return ModuleFinitePresentation(True, [], ModulePresentation(B, 0, ()))

    # positions e_0, e_1..e_N over F_p[x, y]
    rank = N + 1
    n_ring = nx + ny
    blocks = [(n_ring,)]
    inner = ["lex"]
    if nx:
        blocks.append(tuple(x_idx))
        inner.append("grevlex")
    blocks.append(tuple(range(n_ring + 1, n_ring + rank)))
    inner.append("lex")
    if ny:
        blocks.append(tuple(y_idx))
        inner.append("grevlex")
    order = MonomialOrder("block", tuple(blocks), tuple(inner))

    zero = T.zero()
    vectors = []
    for g in gbJ.generators:
        vectors.append(ModuleVector((g,) + (zero,) * N))
    for k, s in enumerate(gens_x):
        comps = [zero] * rank
        comps[0] = s.embed(T, x_idx)
        comps[k + 1] = T.constant(-1)
        vectors.append(ModuleVector(tuple(comps)))
    mgb = module_groebner_basis(vectors, T, rank, budget=budget, order=order)

    relations = []
    for vec in mgb.decoded():
        comps = vec.components
        if not comps[0].is_zero():
            continue
        if any(exps[i] for c in comps[1:] for exps in c.terms for i in x_idx):
            continue
        relations.append(ModuleVector(tuple(c.restrict(B.ring, y_idx) for c in comps[1:])))
    pres = ModulePresentation(B, N, relations, name=f"{A.name or 'A'} over {B.name or 'B'}")
    return ModuleFinitePresentation(True, gens_x, pres)


@dataclass
class FlatnessVerdict:
    status: str
    reason: str = ""
    rank: Optional[int] = None
    generators: int = 0

    def as_dict(self) -> Dict:
        return {"status": self.status, "reason": self.reason, "rank": self.rank,
                "generators": self.generators}


def restricted_flatness(phi: AlgebraMap, budget=None, max_generators: int = 8,
                        max_minors: int = 20000) -> FlatnessVerdict:
    """
    Flatness of a module-finite map through projectivity of the target as a
    finitely presented module. Anything outside the module-finite case, or
    beyond the limits, is not-decided.
    """
    try:
        mfp = module_finite_presentation(phi, budget, max_generators=max_generators)
    except BudgetExceeded as exc:
        return FlatnessVerdict(NOT_DECIDED, f"budget: {exc}")
    if not mfp.finite:
        return FlatnessVerdict(NOT_DECIDED, "restricted: module-finite case only")
    N = len(mfp.generators)
    if N > max_generators:
        return FlatnessVerdict(NOT_DECIDED, f"{N} module generators exceed the limit {max_generators}",
                               generators=N)
    try:
        projective, r = module_is_projective(mfp.presentation, budget, max_minors)
    except BudgetExceeded as exc:
        return FlatnessVerdict(NOT_DECIDED, f"budget: {exc}", generators=N)
    if projective:
        reason = f"projective of constant rank {r}" if r is not None else "projective, rank not constant"
        return FlatnessVerdict(FLAT, reason, r, N)
    return FlatnessVerdict(NOT_FLAT, "some Fitting ideal is not idempotent", None, N)
