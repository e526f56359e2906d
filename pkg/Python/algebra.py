"""
Finitely presented F_p-algebras and the maps between them.

Provides:
- RingPresentation: F_p[vars]/I with a per-order Gröbner basis cache
- AlgebraMap / check_map: ring maps given by generator images, checked for
  well-definedness
- IdealHandle: ideals of a presented ring (membership, equality, Frobenius
  powers, products)
- tensor_over_base, base_change, compose
- ring_map_kernel and subalgebra_membership by elimination
- fp_dimension via standard monomials
"""

import threading
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from groebner import (
    INFINITE,
    GroebnerBasis,
    eliminate,
    groebner_basis,
    normal_form,
    standard_monomials,
)
from kunz_errors import AmbientMismatch, NotWellDefined
from polycore import GREVLEX, MonomialOrder, Poly, PolyRing, PrimeField, elimination_order


def fresh_names(wanted: Sequence[str], taken: Sequence[str]) -> List[str]:
    """Rename wanted names that clash with taken (or each other) by suffixing _1, _2, ..."""
    used = set(taken)
    out = []
    for name in wanted:
        cand = name
        k = 1
        while cand in used:
            cand = f"{name}_{k}"
            k += 1
        used.add(cand)
        out.append(cand)
    return out


class RingPresentation:
    """F_p[vars]/(relations). Residue equality is decided by reduced GB normal forms."""

    def __init__(self, ring: PolyRing, relations: Sequence[Poly] = (), name: str = ""):
        relations = tuple(relations)
        for f in relations:
            if f.ring != ring:
                raise AmbientMismatch(f"relation {f} does not live in F_{ring.p}[{','.join(ring.names)}]")
        self.ring = ring
        self.relations = tuple(f for f in relations if not f.is_zero())
        self.name = name
        self._gb_cache: Dict[MonomialOrder, GroebnerBasis] = {}
        self._lock = threading.Lock()

    @classmethod
    def free(cls, p: int, names: Sequence[str], name: str = "") -> "RingPresentation":
        return cls(PolyRing(PrimeField(p), tuple(names)), (), name)

    @classmethod
    def prime_field(cls, p: int) -> "RingPresentation":
        return cls.free(p, (), f"F_{p}")

    @property
    def field(self) -> PrimeField:
        return self.ring.field

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def vars(self) -> Tuple[str, ...]:
        return self.ring.names

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    def var(self, which) -> Poly:
        return self.ring.var(which)

    def gb(self, order: MonomialOrder = GREVLEX, budget=None) -> GroebnerBasis:
        """Reduced GB of the relation ideal; computed once per order."""
        cached = self._gb_cache.get(order)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._gb_cache.get(order)
            if cached is None:
                cached = groebner_basis(self.relations, order, budget, ring=self.ring)
                self._gb_cache[order] = cached
        return cached

    def nf(self, f: Poly, budget=None) -> Poly:
        return normal_form(f, self.gb(budget=budget), budget)

    def is_zero(self, f: Poly, budget=None) -> bool:
        return self.nf(f, budget).is_zero()

    def equal(self, f: Poly, g: Poly, budget=None) -> bool:
        return self.is_zero(f - g, budget)

    def is_zero_ring(self, budget=None) -> bool:
        return self.gb(budget=budget).is_unit()

    def quotient(self, extra: Sequence[Poly], name: str = "") -> "RingPresentation":
        return RingPresentation(self.ring, self.relations + tuple(extra), name or f"{self.name}/I")

    def fp_dimension(self, budget=None, limit: Optional[int] = None):
        return fp_dimension(self, budget, limit)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingPresentation):
            return NotImplemented
        return self.ring == other.ring and self.relations == other.relations

    def __hash__(self) -> int:
        return hash((self.ring, self.relations))

    def __str__(self) -> str:
        base = f"F_{self.p}[{','.join(self.vars)}]"
        if not self.relations:
            return base
        return base + "/(" + ", ".join(str(f) for f in self.relations) + ")"

    def __repr__(self) -> str:
        return f"RingPresentation({self.name or str(self)})"


class AlgebraMap:
    """
    source -> target given by one target polynomial per source variable.

    fiber_vars optionally records which target variables are relative
    generators over the source (set when the map is a structure map built by
    flattening); otherwise it is derived from the images.
    """

    def __init__(self, source: RingPresentation, target: RingPresentation,
                 images: Sequence[Poly], name: str = "",
                 fiber_vars: Optional[Sequence[int]] = None):
        images = tuple(images)
        if len(images) != source.nvars:
            raise AmbientMismatch(f"map needs {source.nvars} images, got {len(images)}")
        for img in images:
            if img.ring != target.ring:
                raise AmbientMismatch(f"image {img} is not in the target ring")
        if source.p != target.p:
            raise AmbientMismatch("source and target have different characteristic")
        self.source = source
        self.target = target
        self.images = images
        self.name = name
        self.declared_fiber_vars = tuple(fiber_vars) if fiber_vars is not None else None

    def apply(self, f: Poly) -> Poly:
        """Raw substitution into the target polynomial ring."""
        if f.ring != self.source.ring:
            raise AmbientMismatch("polynomial is not in the map's source ring")
        return f.substitute(self.images, self.target.ring)

    def __call__(self, f: Poly, budget=None) -> Poly:
        return self.target.nf(self.apply(f), budget)

    def base_image_vars(self) -> Dict[int, int]:
        """Target variable index -> first source variable whose image is exactly that variable."""
        out: Dict[int, int] = {}
        for j, img in enumerate(self.images):
            if len(img.terms) == 1:
                (exps, c), = img.terms.items()
                if c == 1 and sum(exps) == 1:
                    out.setdefault(exps.index(1), j)
        return out

    @property
    def fiber_vars(self) -> Tuple[int, ...]:
        if self.declared_fiber_vars is not None:
            return self.declared_fiber_vars
        bare = self.base_image_vars()
        return tuple(i for i in range(self.target.nvars) if i not in bare)

    def describe(self) -> str:
        pairs = ", ".join(f"{u} -> {img}" for u, img in zip(self.source.vars, self.images))
        return f"{self.source} -> {self.target} {{ {pairs} }}"

    def __repr__(self) -> str:
        return f"AlgebraMap({self.name or self.describe()})"


def check_map(images: Sequence[Poly], source: RingPresentation, target: RingPresentation,
              name: str = "", fiber_vars: Optional[Sequence[int]] = None, budget=None) -> AlgebraMap:
    """Build a map and verify every source relation lands on 0 in the target."""
    phi = AlgebraMap(source, target, images, name, fiber_vars)
    for idx, rel in enumerate(source.relations):
        residue = phi(rel, budget)
        if not residue.is_zero():
            raise NotWellDefined(
                idx, f"relation #{idx} ({rel}) maps to {residue} != 0 in {target}")
    return phi


def identity_map(A: RingPresentation) -> AlgebraMap:
    return AlgebraMap(A, A, A.ring.gens(), name=f"id_{A.name}" if A.name else "id")


def structure_map_from_prime_field(A: RingPresentation) -> AlgebraMap:
    return AlgebraMap(RingPresentation.prime_field(A.p), A, (), name=f"F_{A.p}->{A.name}")


def compose(beta: AlgebraMap, alpha: AlgebraMap, name: str = "") -> AlgebraMap:
    """beta ∘ alpha."""
    if alpha.target != beta.source:
        raise AmbientMismatch("compose: target of the first map is not the source of the second")
    images = [beta.apply(img) for img in alpha.images]
    images = [beta.target.nf(f) for f in images]
    return AlgebraMap(alpha.source, beta.target, images,
                      name or f"{beta.name or 'g'}∘{alpha.name or 'f'}")


class IdealHandle:
    """Ideal of a presented ring; generators are kept in normal form, zeros dropped."""

    def __init__(self, ambient: RingPresentation, gens: Sequence[Poly], budget=None):
        reduced = []
        for g in gens:
            if g.ring != ambient.ring:
                raise AmbientMismatch("ideal generator outside the ambient ring")
            r = ambient.nf(g, budget)
            if not r.is_zero() and r not in reduced:
                reduced.append(r)
        self.ambient = ambient
        self.gens = tuple(reduced)
        self._gb: Optional[GroebnerBasis] = None
        self._lock = threading.Lock()

    def gb(self, budget=None) -> GroebnerBasis:
        """GB of the preimage ideal I_ambient + (gens) in the polynomial ring."""
        if self._gb is None:
            with self._lock:
                if self._gb is None:
                    self._gb = groebner_basis(self.ambient.relations + self.gens, GREVLEX, budget,
                                              ring=self.ambient.ring)
        return self._gb

    def contains(self, f: Poly, budget=None) -> bool:
        return normal_form(f, self.gb(budget), budget).is_zero()

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self, budget=None) -> bool:
        return self.gb(budget).is_unit()

    def contained_in(self, other: "IdealHandle", budget=None) -> bool:
        if other.ambient != self.ambient:
            raise AmbientMismatch("ideals of different rings")
        return all(other.contains(g, budget) for g in self.gens)

    def equals(self, other: "IdealHandle", budget=None) -> bool:
        return self.contained_in(other, budget) and other.contained_in(self, budget)

    def quotient(self, name: str = "") -> RingPresentation:
        return self.ambient.quotient(self.gens, name)

    def __str__(self) -> str:
        return "(" + ", ".join(str(g) for g in self.gens) + ")" if self.gens else "(0)"

    def __repr__(self) -> str:
        return f"IdealHandle{self}"


def frobenius_power(I: IdealHandle, e: int = 1) -> IdealHandle:
    """I^[q], q = p^e: generated by the q-th powers of the generators."""
    if e < 1:
        raise ValueError("e must be at least 1")
    return IdealHandle(I.ambient, [g.pow_p(e) for g in I.gens])


def ideal_product(I: IdealHandle, J: IdealHandle) -> IdealHandle:
    if I.ambient != J.ambient:
        raise AmbientMismatch("ideals of different rings")
    return IdealHandle(I.ambient, [a * b for a in I.gens for b in J.gens])


def ideal_power(I: IdealHandle, k: int) -> IdealHandle:
    if k < 1:
        raise ValueError("power must be at least 1")
    out = I
    for _ in range(k - 1):
        out = ideal_product(out, I)
    return out


@dataclass
class TensorProduct:
    ring: RingPresentation
    left: AlgebraMap
    right: AlgebraMap


def tensor_over_base(alpha: AlgebraMap, beta: AlgebraMap, name: str = "") -> TensorProduct:
    """
    A ⊗_R C for alpha: R -> A and beta: R -> C. A keeps its variable names;
    clashing C names are suffixed.
    """
    if alpha.source != beta.source:
        raise AmbientMismatch("tensor product needs maps with a shared source")
    A, C = alpha.target, beta.target
    c_names = fresh_names(C.vars, A.vars)
    T_ring = PolyRing(A.field, A.vars + tuple(c_names))
    a_idx = list(range(A.nvars))
    c_idx = [A.nvars + i for i in range(C.nvars)]
    rels = [f.embed(T_ring, a_idx) for f in A.relations]
    rels += [f.embed(T_ring, c_idx) for f in C.relations]
    for a_img, c_img in zip(alpha.images, beta.images):
        rels.append(a_img.embed(T_ring, a_idx) - c_img.embed(T_ring, c_idx))
    T = RingPresentation(T_ring, rels, name or f"{A.name or 'A'}⊗{C.name or 'C'}")
    left = AlgebraMap(A, T, [T_ring.var(i) for i in a_idx], "left")
    right = AlgebraMap(C, T, [T_ring.var(i) for i in c_idx], "right")
    return TensorProduct(T, left, right)


def base_change(alpha: AlgebraMap, rho: AlgebraMap, name: str = "") -> AlgebraMap:
    """R' -> A ⊗_R R' for alpha: R -> A and rho: R -> R'."""
    tp = tensor_over_base(alpha, rho)
    return AlgebraMap(rho.target, tp.ring, tp.right.images,
                      name or f"{alpha.name or 'f'}⊗{rho.name or 'g'}")


def ring_map_kernel(phi: AlgebraMap, budget=None) -> IdealHandle:
    """
    ker(phi: B -> A) by eliminating the A-variables from
    I_A + (b_j - phi(b_j)) in F_p[vars_A ⊔ vars_B], reduced mod I_B.
    """
    A, B = phi.target, phi.source
    b_names = fresh_names(B.vars, A.vars)
    T = PolyRing(A.field, A.vars + tuple(b_names))
    a_idx = list(range(A.nvars))
    b_idx = [A.nvars + i for i in range(B.nvars)]
    gens = [f.embed(T, a_idx) for f in A.relations]
    for j, img in enumerate(phi.images):
        gens.append(T.var(b_idx[j]) - img.embed(T, a_idx))
    if not gens:
        return IdealHandle(B, [])
    elim = eliminate(gens, a_idx, budget, ring=T)
    return IdealHandle(B, [g.restrict(B.ring, b_idx) for g in elim], budget)


@dataclass
class Membership:
    member: bool
    certificate: Optional[Poly]  # polynomial in the tag variables w_1..w_k
    normal_form: Poly


class SubalgebraOracle:
    """
    Decides membership in the F_p-subalgebra of target generated by gens.
    One elimination GB serves every membership query.
    """

    def __init__(self, target: RingPresentation, gens: Sequence[Poly], budget=None):
        for g in gens:
            if g.ring != target.ring:
                raise AmbientMismatch("subalgebra generator outside the target ring")
        self.target = target
        self.gens = tuple(gens)
        n, k = target.nvars, len(self.gens)
        w_names = fresh_names([f"w{l + 1}" for l in range(k)], target.vars)
        self.tag_ring = PolyRing(target.field, tuple(w_names))
        self.ring = PolyRing(target.field, target.vars + tuple(w_names))
        self._x_idx = list(range(n))
        self._w_idx = [n + l for l in range(k)]
        J = [f.embed(self.ring, self._x_idx) for f in target.relations]
        J += [self.ring.var(self._w_idx[l]) - g.embed(self.ring, self._x_idx)
              for l, g in enumerate(self.gens)]
        self.order = elimination_order(n + k, self._x_idx)
        self.gb = groebner_basis(J, self.order, budget, ring=self.ring)

    def membership(self, element: Poly, budget=None) -> Membership:
        if element.ring != self.target.ring:
            raise AmbientMismatch("element outside the target ring")
        nf = normal_form(element.embed(self.ring, self._x_idx), self.gb, budget)
        member = not any(exps[i] for exps in nf.terms for i in self._x_idx)
        cert = nf.restrict(self.tag_ring, self._w_idx) if member else None
        return Membership(member, cert, nf)

    def replay(self, certificate: Poly) -> Poly:
        """Evaluate a certificate at the generators, as a residue of target."""
        return self.target.nf(certificate.substitute(self.gens, self.target.ring))


def subalgebra_membership(target: RingPresentation, gens: Sequence[Poly], element: Poly,
                          budget=None) -> Membership:
    return SubalgebraOracle(target, gens, budget).membership(element, budget)


def fp_dimension(A: RingPresentation, budget=None, limit: Optional[int] = None):
    """Number of standard monomials of A, or INFINITE."""
    stairs = standard_monomials(A.gb(budget=budget), limit)
    if stairs is INFINITE:
        return INFINITE
    return len(stairs)
