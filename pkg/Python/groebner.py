"""
Buchberger Gröbner engine over F_p.

Handles ideals of F_p[x] and submodules of free modules F_p[x]^g. Module
vectors are encoded as polynomials that are linear in g position variables
appended after the ring variables; a block order on the position block
realizes position-over-term (or term-over-position). S-pairs are formed only
between elements whose leading terms share a position.

Pair pruning uses the product criterion (coprime leading monomials) and the
chain criterion. A step budget bounds every reduction loop; running out
raises BudgetExceeded instead of returning a partial basis.
"""

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from kunz_errors import AmbientMismatch, BudgetExceeded
from polycore import (
    GREVLEX,
    Monomial,
    MonomialOrder,
    Poly,
    PolyRing,
    divides,
    elimination_order,
    module_order,
    mono_div,
    mono_lcm,
    mono_mul,
)

DEFAULT_BUDGET = 10 ** 6


class _Infinite:
    """Marker for an unbounded staircase."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Infinite"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


class StepBudget:
    """Counts reduction steps across one computation."""

    def __init__(self, limit: Optional[int] = None, what: str = "reduction"):
        self.limit = DEFAULT_BUDGET if limit is None else int(limit)
        if self.limit <= 0:
            raise ValueError("budget must be positive")
        self.used = 0
        self.what = what

    def tick(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(self.what, self.limit, self.used)


def _as_budget(budget: Union[None, int, StepBudget]) -> StepBudget:
    if isinstance(budget, StepBudget):
        return budget
    return StepBudget(budget)


@dataclass(frozen=True)
class ModuleVector:
    """Element of a free module of rank len(components) over a polynomial ring."""
    components: Tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.components:
            ring = self.components[0].ring
            if any(c.ring != ring for c in self.components):
                raise AmbientMismatch("module vector components live in different rings")

    @property
    def rank(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @classmethod
    def unit(cls, ring: PolyRing, rank: int, i: int) -> "ModuleVector":
        return cls(tuple(ring.one() if j == i else ring.zero() for j in range(rank)))

    def scale(self, f: Poly) -> "ModuleVector":
        return ModuleVector(tuple(f * c for c in self.components))

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        if self.rank != other.rank:
            raise AmbientMismatch("module vectors of different rank")
        return ModuleVector(tuple(a + b for a, b in zip(self.components, other.components)))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


@dataclass
class GroebnerBasis:
    """
    Reduced Gröbner basis. For module bases, ring is the position-extended
    ring and base_ring/rank describe the module.
    """
    ring: PolyRing
    order: MonomialOrder
    generators: Tuple[Poly, ...]
    reduced: bool = True
    rank: int = 0
    base_ring: Optional[PolyRing] = None
    leading: Tuple[Monomial, ...] = field(default=(), repr=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self.leading = tuple(g.leading_term(self.order)[0] for g in self.generators)
        if self.base_ring is None:
            self.base_ring = self.ring

    @property
    def is_module(self) -> bool:
        return self.rank > 0

    def is_unit(self) -> bool:
        """The ideal is the whole ring (only meaningful for ideals)."""
        return len(self.generators) == 1 and self.generators[0].is_constant()

    def is_zero(self) -> bool:
        return not self.generators

    def contains(self, f: Union[Poly, ModuleVector], budget=None) -> bool:
        nf = normal_form(f, self, budget)
        return nf.is_zero()

    def decoded(self) -> List[Union[Poly, ModuleVector]]:
        if not self.is_module:
            return list(self.generators)
        return [decode_vector(g, self.base_ring, self.rank) for g in self.generators]


# -----------------------------------------------------------------------------
# Module encoding
# -----------------------------------------------------------------------------

def position_ring(base: PolyRing, rank: int) -> PolyRing:
    return base.extend([f"_e{i + 1}" for i in range(rank)])


def encode_vector(v: ModuleVector, base: PolyRing) -> Poly:
    ext = position_ring(base, v.rank)
    n = base.nvars
    out: Dict[Monomial, int] = {}
    for i, comp in enumerate(v.components):
        if comp.ring != base:
            raise AmbientMismatch("module vector component outside the module's ring")
        pos = [0] * v.rank
        pos[i] = 1
        for exps, c in comp.terms.items():
            out[tuple(exps) + tuple(pos)] = c
    return Poly(ext, out)


def decode_vector(f: Poly, base: PolyRing, rank: int) -> ModuleVector:
    n = base.nvars
    comps: List[Dict[Monomial, int]] = [dict() for _ in range(rank)]
    for exps, c in f.terms.items():
        pos = exps[n:]
        if sum(pos) != 1:
            raise AmbientMismatch("encoded module element is not linear in the position variables")
        comps[pos.index(1)][exps[:n]] = c
    return ModuleVector(tuple(Poly(base, t) for t in comps))


def _position(exps: Monomial, n_ring: int) -> int:
    for i, e in enumerate(exps[n_ring:]):
        if e:
            return i
    return -1


# -----------------------------------------------------------------------------
# Reduction
# -----------------------------------------------------------------------------

def _reduce(f: Poly, basis: Sequence[Poly], leading: Sequence[Monomial],
            order: MonomialOrder, budget: StepBudget) -> Poly:
    """Full reduction of f by basis (monic elements with the given leading monomials)."""
    ring = f.ring
    p = ring.p
    work = dict(f.terms)
    rem: Dict[Monomial, int] = {}
    keys: Dict[Monomial, tuple] = {}

    def key(m):
        k = keys.get(m)
        if k is None:
            k = keys[m] = order.key(m)
        return k

    while work:
        lt = max(work, key=key)
        c = work[lt]
        for g, glm in zip(basis, leading):
            if divides(glm, lt):
                q = mono_div(lt, glm)
                for e, v in g.terms.items():
                    ee = mono_mul(e, q)
                    nv = (work.get(ee, 0) - c * v) % p
                    if nv:
                        work[ee] = nv
                    else:
                        work.pop(ee, None)
                budget.tick()
                break
        else:
            rem[lt] = c
            del work[lt]
    return Poly._raw(ring, rem)


def _spoly(f: Poly, flm: Monomial, g: Poly, glm: Monomial) -> Poly:
    lcm = mono_lcm(flm, glm)
    return f.mul_term(mono_div(lcm, flm), 1) - g.mul_term(mono_div(lcm, glm), 1)


def _coprime(a: Monomial, b: Monomial) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def _compatible(a: Monomial, b: Monomial, n_ring: int, rank: int) -> bool:
    if not rank:
        return True
    return _position(a, n_ring) == _position(b, n_ring)


def _buchberger(polys: List[Poly], ring: PolyRing, order: MonomialOrder,
                budget: StepBudget, rank: int) -> List[Poly]:
    n_ring = ring.nvars - rank
    G: List[Poly] = []
    LM: List[Monomial] = []
    pending = set()
    heap: List[tuple] = []

    def add(h: Poly) -> bool:
        h = h.monic(order)
        lm = h.leading_term(order)[0]
        if not rank and not any(lm):
            G.clear()
            LM.clear()
            G.append(ring.one())
            LM.append(lm)
            return True
        k = len(G)
        G.append(h)
        LM.append(lm)
        for i in range(k):
            if not _compatible(LM[i], lm, n_ring, rank):
                continue
            if _coprime(LM[i], lm):
                continue
            pending.add((i, k))
            heapq.heappush(heap, (order.key(mono_lcm(LM[i], lm)), i, k))
        return False

    for f in polys:
        if f.is_zero():
            continue
        h = _reduce(f, G, LM, order, budget)
        if h.is_zero():
            continue
        if add(h):
            return G

    while heap:
        _, i, j = heapq.heappop(heap)
        if (i, j) not in pending:
            continue
        pending.discard((i, j))
        lcm = mono_lcm(LM[i], LM[j])
        chained = False
        for k in range(len(G)):
            if k in (i, j) or not divides(LM[k], lcm):
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                chained = True
                break
        if chained:
            continue
        s = _spoly(G[i], LM[i], G[j], LM[j])
        h = _reduce(s, G, LM, order, budget)
        budget.tick()
        if not h.is_zero():
            if add(h):
                return G
    return G


def _interreduce(G: List[Poly], order: MonomialOrder, budget: StepBudget) -> List[Poly]:
    LM = [g.leading_term(order)[0] for g in G]
    keep = []
    for i, lm in enumerate(LM):
        redundant = False
        for j, other in enumerate(LM):
            if j == i or not divides(other, lm):
                continue
            if other != lm or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(i)
    minimal = [G[i] for i in keep]
    min_lm = [LM[i] for i in keep]
    out = []
    for idx, g in enumerate(minimal):
        others = [h for t, h in enumerate(minimal) if t != idx]
        others_lm = [m for t, m in enumerate(min_lm) if t != idx]
        out.append(_reduce(g, others, others_lm, order, budget).monic(order))
    out.sort(key=lambda g: order.key(g.leading_term(order)[0]), reverse=True)
    return out


def _common_ring(gens: Sequence[Poly]) -> PolyRing:
    rings = {g.ring for g in gens}
    if len(rings) != 1:
        raise AmbientMismatch("generators live in different rings")
    return rings.pop()


def is_groebner(gb: GroebnerBasis, budget=None) -> bool:
    """Buchberger criterion: every non-coprime compatible S-pair reduces to zero."""
    budget = _as_budget(budget)
    G = list(gb.generators)
    LM = list(gb.leading)
    n_ring = gb.ring.nvars - gb.rank
    for i, j in combinations(range(len(G)), 2):
        if not _compatible(LM[i], LM[j], n_ring, gb.rank) or _coprime(LM[i], LM[j]):
            continue
        s = _spoly(G[i], LM[i], G[j], LM[j])
        if not _reduce(s, G, LM, gb.order, budget).is_zero():
            return False
    return True


def _finish(G: List[Poly], ring: PolyRing, order: MonomialOrder, budget: StepBudget,
            rank: int, base: Optional[PolyRing], verify: bool) -> GroebnerBasis:
    reduced = _interreduce(G, order, budget) if G else []
    gb = GroebnerBasis(ring, order, tuple(reduced), True, rank, base)
    if verify and not is_groebner(gb, budget):
        raise AssertionError("Buchberger criterion failed on an emitted basis")
    return gb


def groebner_basis(gens: Sequence[Union[Poly, ModuleVector]],
                   order: MonomialOrder = GREVLEX,
                   budget=None,
                   ring: Optional[PolyRing] = None,
                   position_first: bool = True,
                   verify: bool = True) -> GroebnerBasis:
    """
    Reduced Gröbner basis of an ideal (Poly generators) or a submodule
    (ModuleVector generators). For modules pass ring (the coefficient ring)
    when gens may be empty; the order argument is replaced by the module
    order built from position_first.
    """
    budget = _as_budget(budget)
    gens = list(gens)
    if gens and isinstance(gens[0], ModuleVector):
        base = ring or gens[0].components[0].ring
        rank = gens[0].rank
        if any(v.rank != rank for v in gens):
            raise AmbientMismatch("module generators of different rank")
        return module_groebner_basis(gens, base, rank, budget=budget,
                                     position_first=position_first, verify=verify)
    if not gens:
        if ring is None:
            raise AmbientMismatch("empty generator list needs an explicit ring")
        return GroebnerBasis(ring, order, ())
    amb = _common_ring(gens)
    if ring is not None and ring != amb:
        raise AmbientMismatch("generators are not in the requested ring")
    if not order.covers(amb.nvars):
        raise AmbientMismatch("block order does not cover the ambient variables")
    G = _buchberger(gens, amb, order, budget, 0)
    return _finish(G, amb, order, budget, 0, None, verify)


def module_groebner_basis(vectors: Sequence[ModuleVector], base: PolyRing, rank: int,
                          extra_ideal: Sequence[Poly] = (),
                          budget=None,
                          position_first: bool = True,
                          order: Optional[MonomialOrder] = None,
                          verify: bool = True) -> GroebnerBasis:
    """
    Gröbner basis of the submodule generated by vectors plus extra_ideal * e_i
    for every position i (so membership is decided over F_p[x]/extra_ideal).
    """
    budget = _as_budget(budget)
    ext = position_ring(base, rank)
    if order is None:
        order = module_order(base.nvars, rank, position_first)
    polys = [encode_vector(v, base) for v in vectors]
    for f in extra_ideal:
        for i in range(rank):
            polys.append(encode_vector(ModuleVector(tuple(f if j == i else base.zero() for j in range(rank))), base))
    if rank == 0:
        return GroebnerBasis(ext, order, (), True, 0, base)
    G = _buchberger(polys, ext, order, budget, rank)
    return _finish(G, ext, order, budget, rank, base, verify)


def normal_form(f: Union[Poly, ModuleVector], gb: GroebnerBasis, budget=None) -> Union[Poly, ModuleVector]:
    """Fully reduced remainder of f modulo gb."""
    budget = _as_budget(budget)
    if isinstance(f, ModuleVector):
        if not gb.is_module or f.rank != gb.rank:
            raise AmbientMismatch("module vector reduced against a basis of another module")
        enc = encode_vector(f, gb.base_ring)
        rem = _reduce(enc, gb.generators, gb.leading, gb.order, budget)
        return decode_vector(rem, gb.base_ring, gb.rank)
    if gb.is_module:
        raise AmbientMismatch("polynomial reduced against a module basis")
    if f.ring != gb.ring:
        raise AmbientMismatch(f"ambient mismatch: {f.ring.names} vs {gb.ring.names}")
    return _reduce(f, gb.generators, gb.leading, gb.order, budget)


def eliminate(gens: Sequence[Poly], drop_vars: Iterable[int], budget=None,
              ring: Optional[PolyRing] = None) -> List[Poly]:
    """
    Generators of I ∩ F_p[kept variables], in the same ambient ring, via the
    block order with the dropped block dominant.
    """
    gens = list(gens)
    amb = ring or _common_ring(gens)
    drop = sorted(set(drop_vars))
    if any(not 0 <= i < amb.nvars for i in drop):
        raise AmbientMismatch("drop_vars outside the ambient ring")
    order = elimination_order(amb.nvars, drop)
    gb = groebner_basis(gens, order, budget, ring=amb)
    dropped = set(drop)
    return [g for g in gb.generators
            if not any(e and i in dropped for exps in g.terms for i, e in enumerate(exps))]


# -----------------------------------------------------------------------------
# Staircases
# -----------------------------------------------------------------------------

def staircase(leading: Sequence[Monomial], nvars: int, order: MonomialOrder = GREVLEX,
              limit: Optional[int] = None):
    """
    Monomials not divisible by any of the leading monomials, ascending in
    order, or INFINITE when some variable has no pure-power leading monomial.
    limit bounds the enumeration (BudgetExceeded beyond it).
    """
    if any(not any(m) for m in leading):
        return []
    for i in range(nvars):
        if not any(m[i] and not any(m[j] for j in range(nvars) if j != i) for m in leading):
            return INFINITE
    start = (0,) * nvars
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(nvars):
                cand = list(m)
                cand[i] += 1
                cand = tuple(cand)
                if cand in seen or any(divides(lm, cand) for lm in leading):
                    continue
                seen.add(cand)
                nxt.append(cand)
                if limit is not None and len(seen) > limit:
                    raise BudgetExceeded("staircase enumeration", limit, len(seen))
        frontier = nxt
    return sorted(seen, key=order.key)


def standard_monomials(gb: GroebnerBasis, limit: Optional[int] = None):
    """Standard monomials of an ideal basis, or INFINITE."""
    if gb.is_module:
        raise AmbientMismatch("use module_standard_monomials for module bases")
    return staircase(gb.leading, gb.ring.nvars, gb.order, limit)


def module_standard_monomials(gb: GroebnerBasis, limit: Optional[int] = None):
    """
    Standard (position, monomial) pairs of a module basis, position-major, or
    INFINITE if some position has an unbounded staircase.
    """
    n = gb.base_ring.nvars
    out = []
    for pos in range(gb.rank):
        lms = [m[:n] for m in gb.leading if _position(m, n) == pos]
        stairs = staircase(lms, n, GREVLEX, limit)
        if stairs is INFINITE:
            return INFINITE
        out.extend((pos, m) for m in stairs)
    return out
