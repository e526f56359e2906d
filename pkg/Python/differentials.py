"""
Kähler differentials of a map alpha: R -> A as a jacobian cokernel.

Generators are dx_i for the fiber variables of A (the variables that are not
the bare image of a base generator). Columns are the gradients of the
A-relations in those variables, plus d(alpha(u_j)) for base generators whose
image is not a bare variable.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from algebra import AlgebraMap, RingPresentation
from fpmodule import ModulePresentation, module_is_zero
from groebner import ModuleVector
from linalg_fp import FiniteAlgebra, FiniteModule, rank
from polycore import Poly


@dataclass
class OmegaPresentation:
    module: ModulePresentation
    jacobian: List[List[Poly]]
    fiber_vars: Tuple[int, ...]

    @property
    def free_rank(self) -> int:
        return self.module.free_rank

    def fiber_names(self) -> List[str]:
        names = self.module.ring.vars
        return [names[i] for i in self.fiber_vars]


def _gradient(f: Poly, fiber: Sequence[int], A: RingPresentation) -> ModuleVector:
    return ModuleVector(tuple(A.nf(f.partial_derivative(i)) for i in fiber))


def omega(alpha: AlgebraMap) -> OmegaPresentation:
    """Ω_{A/R} = A^{fiber} / (jacobian columns)."""
    A = alpha.target
    fiber = tuple(alpha.fiber_vars)
    columns = []
    for f in A.relations:
        col = _gradient(f, fiber, A)
        if not col.is_zero():
            columns.append(col)
    for img in alpha.images:
        col = _gradient(img, fiber, A)
        if not col.is_zero():
            columns.append(col)
    if not fiber:
        columns = []
    module = ModulePresentation(A, len(fiber), columns, name=f"Omega({alpha.name or 'alpha'})")
    jac = [[col.components[i] for col in columns] for i in range(len(fiber))]
    return OmegaPresentation(module, jac, fiber)


def omega_is_zero(alpha: AlgebraMap, budget=None) -> bool:
    return module_is_zero(omega(alpha).module, budget)


def derivation_space_dimension(alpha: AlgebraMap, M: ModulePresentation,
                               limit=None) -> int:
    """
    dim_{F_p} Hom_A(Ω_{A/R}, M) for Artinian A and M, as n*dim M minus the
    rank of (m_i) -> (sum_i c_ij m_i)_j.
    """
    A = alpha.target
    if M.ring != A:
        raise ValueError("module must live over the target of the map")
    om = omega(alpha)
    fa = FiniteAlgebra(A.ring, A.gb(), limit)
    fm = FiniteModule(fa, M.free_rank, M.relations)
    n = om.free_rank
    cols = om.module.relations
    dm = fm.dim
    if n == 0 or dm == 0:
        return 0
    if not cols:
        return n * dm
    p = A.p
    T = np.zeros((len(cols) * dm, n * dm), dtype=np.int64)
    for j, col in enumerate(cols):
        for i in range(n):
            T[j * dm:(j + 1) * dm, i * dm:(i + 1) * dm] = fm.action_matrix(col.components[i])
    return n * dm - rank(T % p, p)


def first_sequence_spot_check(alpha: AlgebraMap, extra: Sequence[Poly], budget=None) -> bool:
    """
    For R -> A -> A/(extra): Ω_{A/R} = 0 forces Ω_{(A/b)/R} = 0. Returns
    whether that implication holds on this instance.
    """
    A = alpha.target
    Ab = A.quotient(extra, f"{A.name}/b")
    composite = AlgebraMap(alpha.source, Ab, alpha.images, f"{alpha.name}/b", alpha.declared_fiber_vars)
    if not omega_is_zero(alpha, budget):
        return True
    return omega_is_zero(composite, budget)
