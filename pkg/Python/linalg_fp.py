"""
Dense linear algebra over F_p with NumPy, and finite-dimensional algebras
and modules built on it.

This is the brute-force side of the engine: whenever a quotient ring is
Artinian, its standard monomials give an F_p-basis and every question about
kernels, module dimensions or Hom spaces becomes a rank computation. The
tests use it as an oracle against the Gröbner routes.
"""

from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from groebner import INFINITE, GroebnerBasis, ModuleVector, normal_form, standard_monomials
from kunz_errors import AmbientMismatch, NotArtinian
from polycore import Monomial, Poly, PolyRing


def _as_mod(M, p: int) -> np.ndarray:
    return np.asarray(M, dtype=np.int64) % p


def row_reduce(M, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form of M over F_p.

    Returns
    -------
    (R, pivots)
        R has the same shape as M; pivots lists the pivot column of each
        nonzero row, in order.
    """
    A = _as_mod(M, p).copy()
    if A.ndim != 2:
        raise ValueError("row_reduce expects a 2-D array")
    rows, cols = A.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        others = np.nonzero(A[:, c])[0]
        for i in others:
            if i != r:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M, p: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(row_reduce(M, p)[1])


def nullspace(M, p: int) -> np.ndarray:
    """Basis of {x : M x = 0} as the rows of the returned array."""
    M = _as_mod(M, p)
    if M.ndim != 2:
        raise ValueError("nullspace expects a 2-D array")
    cols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = row_reduce(M, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-R[i, f]) % p
    return basis


class Subspace:
    """Row space of a matrix over F_p, kept in reduced echelon form."""

    def __init__(self, rows, dim: int, p: int):
        self.p = p
        self.dim = dim
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, dim)
        if rows.shape[0]:
            R, piv = row_reduce(rows, p)
            self.basis = R[:len(piv)]
            self.pivots = piv
        else:
            self.basis = np.zeros((0, dim), dtype=np.int64)
            self.pivots = []
        self.complement = [c for c in range(dim) if c not in set(self.pivots)]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v) -> np.ndarray:
        """Representative of v modulo the subspace with zeros at every pivot column."""
        v = _as_mod(v, self.p).copy()
        for row, c in zip(self.basis, self.pivots):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return v

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def quotient_coords(self, v) -> np.ndarray:
        return self.reduce(v)[self.complement]

    def lift(self, coords) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.complement] = coords
        return v


class FiniteAlgebra:
    """
    F_p[x]/I with I Artinian, as an F_p-vector space on its standard
    monomials (ascending in the basis order).
    """

    def __init__(self, ring: PolyRing, gb: GroebnerBasis, limit: Optional[int] = None):
        if gb.ring != ring:
            raise AmbientMismatch("basis and ring disagree")
        stairs = standard_monomials(gb, limit)
        if stairs is INFINITE:
            raise NotArtinian(f"F_{ring.p}[{','.join(ring.names)}]/I is not finite-dimensional")
        self.ring = ring
        self.gb = gb
        self.p = ring.p
        self.basis: List[Monomial] = list(stairs)
        self.index: Dict[Monomial, int] = {m: i for i, m in enumerate(self.basis)}
        self._mult_cache: Dict[Poly, np.ndarray] = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vector(self, f: Poly) -> np.ndarray:
        nf = normal_form(f, self.gb)
        v = np.zeros(self.dim, dtype=np.int64)
        for exps, c in nf.terms.items():
            v[self.index[exps]] = c
        return v

    def element(self, v) -> Poly:
        terms = {m: int(c) for m, c in zip(self.basis, v) if int(c) % self.p}
        return Poly(self.ring, terms)

    def basis_elements(self) -> List[Poly]:
        return [self.ring.monomial(m) for m in self.basis]

    def mult_matrix(self, f: Poly) -> np.ndarray:
        """Matrix of x -> f*x; column j is the product with the j-th basis monomial."""
        if f not in self._mult_cache:
            cols = [self.vector(f.mul_term(m, 1)) for m in self.basis]
            mat = np.stack(cols, axis=1) if cols else np.zeros((0, 0), dtype=np.int64)
            self._mult_cache[f] = mat
        return self._mult_cache[f]

    def is_zero(self, f: Poly) -> bool:
        return normal_form(f, self.gb).is_zero()

    def elements(self):
        """All p^dim elements, lexicographic in the coordinate vector."""
        for coords in product(range(self.p), repeat=self.dim):
            yield self.element(coords)


class FiniteModule:
    """
    Cokernel of a relation list inside A^g for a finite-dimensional A, as an
    F_p-vector space. Coordinates of A^g are component-major.
    """

    def __init__(self, algebra: FiniteAlgebra, rank: int, relations: Sequence[ModuleVector]):
        self.algebra = algebra
        self.rank = rank
        self.p = algebra.p
        d = algebra.dim
        rows = []
        for rel in relations:
            if rel.rank != rank:
                raise AmbientMismatch("relation rank differs from the module rank")
            for m in algebra.basis:
                shifted = rel.scale(algebra.ring.monomial(m))
                rows.append(self.flatten(shifted))
        self.relations = Subspace(rows, rank * d, self.p)

    def flatten(self, v: ModuleVector) -> np.ndarray:
        if not v.components:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([self.algebra.vector(c) for c in v.components])

    @property
    def dim(self) -> int:
        return self.rank * self.algebra.dim - self.relations.rank

    def coords(self, v: ModuleVector) -> np.ndarray:
        return self.relations.quotient_coords(self.flatten(v))

    def action_matrix(self, a: Poly) -> np.ndarray:
        """Matrix of multiplication by a on the quotient coordinates."""
        L = self.algebra.mult_matrix(a)
        d = self.algebra.dim
        out = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j in range(self.dim):
            basis_vec = np.zeros(self.dim, dtype=np.int64)
            basis_vec[j] = 1
            lifted = self.relations.lift(basis_vec)
            image = np.concatenate([L @ lifted[k * d:(k + 1) * d] for k in range(self.rank)]) % self.p \
                if self.rank else lifted
            out[:, j] = self.relations.quotient_coords(image)
        return out
