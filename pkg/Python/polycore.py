"""
Sparse multivariate polynomials over a prime field F_p.

Provides:
- PrimeField: canonical residues, Fermat inverses
- PolyRing: an ambient variable list over a PrimeField
- MonomialOrder family: grevlex, lex, block orders (elimination and module
  position orders are block orders)
- Poly: immutable sparse polynomial; arithmetic, p-power maps, derivatives,
  substitution along ring maps

Variables are identified by their index into the ambient name list; names
are only metadata. Poly stores terms unordered; every order-dependent query
(leading term, sorted view) takes the order explicitly.
"""

from dataclasses import dataclass
from operator import add
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from kunz_errors import AmbientMismatch

Monomial = Tuple[int, ...]

MAX_PRIME = 2 ** 16


def is_prime(n: int) -> bool:
    """Trial division; primes here never exceed 2^16."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p, 2 <= p <= 2^16."""
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not (2 <= self.p <= MAX_PRIME):
            raise ValueError(f"characteristic must be an integer in [2, {MAX_PRIME}], got {self.p!r}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def norm(self, c: int) -> int:
        return c % self.p

    def inv(self, c: int) -> int:
        c %= self.p
        if c == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return pow(c, self.p - 2, self.p)


# -----------------------------------------------------------------------------
# Monomial orders
# -----------------------------------------------------------------------------

def _grevlex_key(exps: Sequence[int]) -> tuple:
    return (sum(exps),) + tuple(-e for e in reversed(exps))


def _lex_key(exps: Sequence[int]) -> tuple:
    return tuple(exps)


_INNER_KEYS = {"grevlex": _grevlex_key, "lex": _lex_key}


@dataclass(frozen=True)
class MonomialOrder:
    """
    A monomial order given as a sort key on exponent tuples.

    kind is 'grevlex', 'lex' or 'block'. A block order compares the exponent
    vector restricted to blocks[0] first (with inner[0]), then blocks[1], and
    so on; every variable must belong to exactly one block. Elimination
    orders and module position-over-term orders are block orders.
    """
    kind: str = "grevlex"
    blocks: Tuple[Tuple[int, ...], ...] = ()
    inner: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order kind {self.kind!r}")
        if self.kind == "block":
            if len(self.blocks) != len(self.inner) or not self.blocks:
                raise ValueError("block order needs one inner order per block")
            flat = [i for b in self.blocks for i in b]
            if len(flat) != len(set(flat)):
                raise ValueError("block order blocks overlap")
            for name in self.inner:
                if name not in _INNER_KEYS:
                    raise ValueError(f"unknown inner order {name!r}")

    def key(self, exps: Sequence[int]) -> tuple:
        if self.kind == "grevlex":
            return _grevlex_key(exps)
        if self.kind == "lex":
            return _lex_key(exps)
        out: tuple = ()
        for block, name in zip(self.blocks, self.inner):
            out += _INNER_KEYS[name]([exps[i] for i in block])
        return out

    def covers(self, nvars: int) -> bool:
        if self.kind != "block":
            return True
        return sorted(i for b in self.blocks for i in b) == list(range(nvars))


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(nvars: int, drop: Iterable[int]) -> MonomialOrder:
    """Block order with the dropped variables dominant, grevlex inside each block."""
    drop_set = sorted(set(drop))
    keep = [i for i in range(nvars) if i not in set(drop_set)]
    if not drop_set:
        return GREVLEX
    if not keep:
        return GREVLEX
    return MonomialOrder("block", (tuple(drop_set), tuple(keep)), ("grevlex", "grevlex"))


def module_order(n_ring: int, n_pos: int, position_first: bool = True) -> MonomialOrder:
    """
    Order for module vectors encoded with position variables appended after
    the n_ring ring variables. position_first=True is position-over-term
    (e_1 > e_2 > ...), otherwise term-over-position.
    """
    ring_block = tuple(range(n_ring))
    pos_block = tuple(range(n_ring, n_ring + n_pos))
    if not ring_block:
        return MonomialOrder("block", (pos_block,), ("lex",))
    if position_first:
        return MonomialOrder("block", (pos_block, ring_block), ("lex", "grevlex"))
    return MonomialOrder("block", (ring_block, pos_block), ("grevlex", "lex"))


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(add, a, b))


# -----------------------------------------------------------------------------
# Rings and polynomials
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyRing:
    """F_p[names]; equality means same characteristic and same name list."""
    field: PrimeField
    names: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AmbientMismatch(f"no variable {name!r} in ring {self.names}") from None

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.constant(1)

    def constant(self, c: int) -> "Poly":
        return Poly(self, {(0,) * self.nvars: c})

    def var(self, which: Union[int, str]) -> "Poly":
        i = self.index(which) if isinstance(which, str) else which
        if not 0 <= i < self.nvars:
            raise AmbientMismatch(f"variable index {i} out of range for {self.nvars} variables")
        exps = [0] * self.nvars
        exps[i] = 1
        return Poly(self, {tuple(exps): 1})

    def gens(self) -> List["Poly"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Sequence[int], coef: int = 1) -> "Poly":
        return Poly(self, {tuple(exps): coef})

    def extend(self, extra: Sequence[str]) -> "PolyRing":
        return PolyRing(self.field, self.names + tuple(extra))


PolyLike = Union["Poly", int]


class Poly:
    """
    Immutable sparse polynomial. terms maps exponent tuples to nonzero
    residues in [0, p).
    """

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Optional[Mapping[Monomial, int]] = None):
        p = ring.p
        n = ring.nvars
        clean: Dict[Monomial, int] = {}
        for exps, c in (terms or {}).items():
            if len(exps) != n:
                raise AmbientMismatch(f"monomial {exps} has {len(exps)} exponents, ring has {n}")
            c %= p
            if c:
                clean[tuple(exps)] = c
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: PolyRing, terms: Dict[Monomial, int]) -> "Poly":
        # terms already reduced and free of zeros
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # -- basic views --------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> int:
        return self._terms.get((0,) * self.ring.nvars, 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def support(self) -> List[int]:
        """Indices of the variables that occur."""
        used = set()
        for exps in self._terms:
            used.update(i for i, e in enumerate(exps) if e)
        return sorted(used)

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> List[Tuple[Monomial, int]]:
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = GREVLEX) -> Tuple[Monomial, int]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self._terms, key=order.key)
        return exps, self._terms[exps]

    def monic(self, order: MonomialOrder = GREVLEX) -> "Poly":
        if not self._terms:
            return self
        _, lc = self.leading_term(order)
        return self.scale(self.ring.field.inv(lc))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: PolyLike) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise AmbientMismatch(f"ambient mismatch: {self.ring.names} vs {other.ring.names}")
            return other
        if isinstance(other, int):
            return self.ring.constant(other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other: PolyLike) -> "Poly":
        other = self._coerce(other)
        p = self.ring.p
        out = dict(self._terms)
        for exps, c in other._terms.items():
            v = (out.get(exps, 0) + c) % p
            if v:
                out[exps] = v
            else:
                out.pop(exps, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        p = self.ring.p
        return Poly._raw(self.ring, {e: p - c for e, c in self._terms.items()})

    def __sub__(self, other: PolyLike) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: PolyLike) -> "Poly":
        return self._coerce(other) - self

    def scale(self, c: int) -> "Poly":
        p = self.ring.p
        c %= p
        if c == 0:
            return self.ring.zero()
        return Poly._raw(self.ring, {e: (v * c) % p for e, v in self._terms.items()})

    def mul_term(self, exps: Monomial, c: int) -> "Poly":
        """Multiply by the single term c * x^exps."""
        p = self.ring.p
        c %= p
        if c == 0:
            return self.ring.zero()
        return Poly._raw(self.ring, {mono_mul(e, exps): (v * c) % p for e, v in self._terms.items()})

    def __mul__(self, other: PolyLike) -> "Poly":
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        p = self.ring.p
        out: Dict[Monomial, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(map(add, e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return Poly._raw(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius_twist(self, e: int = 1) -> "Poly":
        """Term-wise map x^a -> x^(q a), coefficients fixed; q = p^e."""
        q = self.ring.p ** e
        return Poly._raw(self.ring, {tuple(q * a for a in exps): c for exps, c in self._terms.items()})

    def pow_p(self, e: int = 1) -> "Poly":
        """self^(p^e). Over F_p the coefficients are Frobenius-fixed, so this is the twist."""
        if e < 0:
            raise ValueError("e must be non-negative")
        return self.frobenius_twist(e)

    def partial_derivative(self, var_index: int) -> "Poly":
        if not 0 <= var_index < self.ring.nvars:
            raise AmbientMismatch(f"variable index {var_index} out of range for {self.ring.nvars} variables")
        p = self.ring.p
        out: Dict[Monomial, int] = {}
        for exps, c in self._terms.items():
            a = exps[var_index]
            v = (a * c) % p
            if a and v:
                new = list(exps)
                new[var_index] -= 1
                out[tuple(new)] = v
        return Poly._raw(self.ring, out)

    # -- ring maps ----------------------------------------------------------

    def substitute(self, images: Sequence["Poly"], target: Optional[PolyRing] = None) -> "Poly":
        """Evaluate at images (one Poly per variable), all in the target ring."""
        if len(images) != self.ring.nvars:
            raise AmbientMismatch(f"need {self.ring.nvars} images, got {len(images)}")
        if target is None:
            if not images:
                raise AmbientMismatch("target ring required when substituting into a ring with no variables")
            target = images[0].ring
        for img in images:
            if img.ring != target:
                raise AmbientMismatch("substitution images live in different rings")
        cache: Dict[Tuple[int, int], Poly] = {}

        def power(i: int, a: int) -> Poly:
            key = (i, a)
            if key not in cache:
                cache[key] = images[i] ** a
            return cache[key]

        result = target.zero()
        for exps, c in self._terms.items():
            term = target.constant(c)
            for i, a in enumerate(exps):
                if a:
                    term = term * power(i, a)
            result = result + term
        return result

    def embed(self, target: PolyRing, index_map: Sequence[int]) -> "Poly":
        """Rename variables: variable i goes to target variable index_map[i]."""
        if target.field != self.ring.field:
            raise AmbientMismatch("cannot embed across characteristics")
        n = target.nvars
        out: Dict[Monomial, int] = {}
        for exps, c in self._terms.items():
            new = [0] * n
            for i, a in enumerate(exps):
                if a:
                    new[index_map[i]] += a
            out[tuple(new)] = c
        return Poly._raw(target, out)

    def restrict(self, target: PolyRing, index_map: Sequence[int]) -> "Poly":
        """
        Inverse of embed for polynomials supported on the mapped variables:
        target variable j takes the exponent of self variable index_map[j].
        """
        mapped = set(index_map)
        out: Dict[Monomial, int] = {}
        for exps, c in self._terms.items():
            if any(a and i not in mapped for i, a in enumerate(exps)):
                raise AmbientMismatch("polynomial involves variables outside the restriction")
            out[tuple(exps[i] for i in index_map)] = c
        return Poly._raw(target, out)

    def evaluate(self, point: Sequence[int]) -> int:
        p = self.ring.p
        total = 0
        for exps, c in self._terms.items():
            v = c
            for x, a in zip(point, exps):
                if a:
                    v = v * pow(x, a, p) % p
            total = (total + v) % p
        return total

    # -- printing -----------------------------------------------------------

    def to_str(self, order: MonomialOrder = GREVLEX) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms(order):
            factors = []
            for name, a in zip(self.ring.names, exps):
                if a == 1:
                    factors.append(name)
                elif a > 1:
                    factors.append(f"{name}^{a}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.to_str()!s} in F_{self.ring.p}[{','.join(self.ring.names)}])"


def poly_arith(op: str, a: Poly, b: Optional[Poly] = None, e: int = 1) -> Poly:
    """Dispatcher for add / mul / pow_p(e)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "pow_p":
        return a.pow_p(e)
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(f: Poly, var_index: int) -> Poly:
    return f.partial_derivative(var_index)
