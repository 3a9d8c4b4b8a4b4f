"""Exact classification of the multiplicative group generated by modular
eigenvalue ratios.

A faithful state whose density has rational eigenvalues is almost periodic;
its modular flow is trivial at time t iff r**(it) = 1 for every within-block
eigenvalue ratio r.  The group generated by all such ratios therefore decides
the flow's triviality set.  Multiplicative dependence between exact rationals
is decided on the lattice of prime-exponent vectors, never with floating
logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import UnsupportedMagnitude
from .model import AlgebraSpec, Cyclic, Dense, Tracial

__all__ = [
    "Trivial",
    "CyclicGroup",
    "DenseGroup",
    "RatioGroup",
    "AllReals",
    "Lattice",
    "ZeroOnly",
    "TSet",
    "TypeII1",
    "TypeIII",
    "TypeIII1",
    "FactorType",
    "factor_positive_rational",
    "exponent_vector",
    "ratio_generators",
    "classify_group",
    "t_set",
    "type_label",
    "combine",
]


# -- ratio groups ------------------------------------------------------------


@dataclass(frozen=True)
class Trivial:
    """Only the ratio 1 occurs; the modular flow is trivial for all t."""


@dataclass(frozen=True)
class CyclicGroup:
    """The ratio group is {generator**n | n in Z} with generator in (0, 1)."""

    generator: Fraction

    def __post_init__(self):
        assert 0 < self.generator < 1


@dataclass(frozen=True)
class DenseGroup:
    """The ratio group is dense in the positive reals."""


RatioGroup = Union[Trivial, CyclicGroup, DenseGroup]


# -- T-sets ------------------------------------------------------------------


@dataclass(frozen=True)
class AllReals:
    """The flow is trivial at every time."""


@dataclass(frozen=True)
class Lattice:
    """Triviality times form (2*pi/log(1/lam)) * Z; lam is kept exact and the
    period is only ever materialized on demand."""

    lam: Fraction

    def __post_init__(self):
        assert 0 < self.lam < 1

    @property
    def period(self) -> float:
        return 2.0 * math.pi / math.log(1.0 / float(self.lam))


@dataclass(frozen=True)
class ZeroOnly:
    """The flow is trivial only at time 0."""


TSet = Union[AllReals, Lattice, ZeroOnly]


# -- factor type labels ------------------------------------------------------
#
# There is deliberately no III_0 variant: the classification never produces
# one, and the type system enforces that.


@dataclass(frozen=True)
class TypeII1:
    pass


@dataclass(frozen=True)
class TypeIII:
    lam: Fraction

    def __post_init__(self):
        assert 0 < self.lam < 1


@dataclass(frozen=True)
class TypeIII1:
    pass


FactorType = Union[TypeII1, TypeIII, TypeIII1]


# -- exact factorization -----------------------------------------------------

_TRIAL_LIMIT = 1 << 20
_FACTOR_LIMIT = 1 << 64
# Deterministic Miller-Rabin witness set, valid below 3.317e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_VALID_BELOW = 3_317_044_064_679_887_385_961_981


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    if n >= _MR_VALID_BELOW:
        raise UnsupportedMagnitude(f"cannot certify primality of {n}")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent-cycle Pollard rho; returns a non-trivial factor of composite n."""
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise UnsupportedMagnitude(f"failed to split composite {n}")


def factor_integer(n: int) -> dict[int, int]:
    """Full prime factorization of a positive integer.

    Trial division handles small primes; any remaining cofactor is finished
    with deterministic Miller-Rabin plus Pollard rho.  A certified prime
    factor at or above 2**64 raises UnsupportedMagnitude rather than being
    trusted silently.
    """
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    factors: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n and p < _TRIAL_LIMIT:
        for q in (p, p + 2):
            while n % q == 0:
                factors[q] = factors.get(q, 0) + 1
                n //= q
        p += 6
    # n now has no prime factor below min(_TRIAL_LIMIT, sqrt(n)).
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_prime(m):
            if m >= _FACTOR_LIMIT:
                raise UnsupportedMagnitude(f"prime factor {m} exceeds the 64-bit support bound")
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return factors


def factor_positive_rational(x: Fraction) -> dict[int, int]:
    """Exponent vector of a positive rational: map prime -> exponent, with
    negative exponents for the denominator.  The empty map represents 1."""
    if x <= 0:
        raise ValueError(f"expected a positive rational, got {x}")
    vec = factor_integer(x.numerator)
    for p, e in factor_integer(x.denominator).items():
        vec[p] = vec.get(p, 0) - e
        if vec[p] == 0:
            del vec[p]
    return vec


exponent_vector = factor_positive_rational


def _rational_from_vector(vec: dict[int, int]) -> Fraction:
    num = den = 1
    for p, e in vec.items():
        if e > 0:
            num *= p**e
        else:
            den *= p ** (-e)
    return Fraction(num, den)


def _primitive_direction(vec: dict[int, int]) -> tuple[dict[int, int], int]:
    """Write vec = c * w with w primitive (content 1) and c > 0; the sign is
    absorbed into w.  Returns (w, c)."""
    g = math.gcd(*vec.values())
    primitive = {p: e // g for p, e in vec.items()}
    return primitive, g


def _is_multiple(vec: dict[int, int], primitive: dict[int, int]) -> Union[int, None]:
    """The integer c with vec = c * primitive, or None if not parallel."""
    if set(vec) != set(primitive):
        return None
    cs = set()
    for p, w in primitive.items():
        e = vec[p]
        if e % w != 0:
            return None
        cs.add(e // w)
    if len(cs) != 1:
        return None
    return cs.pop()


# -- operations --------------------------------------------------------------


def ratio_generators(a: AlgebraSpec) -> tuple[list[Fraction], bool]:
    """Generators of the modular ratio group of one algebra.

    Returns (generators, has_dense): the de-duplicated within-block weight
    ratios > 1 of every finite block, 1/ratio for every geometric block and
    1/lam for every cyclic diffuse summand; has_dense flags any diffuse
    summand declared dense.
    """
    gens: list[Fraction] = []
    seen: set[Fraction] = set()

    def add(r: Fraction):
        if r != 1 and r not in seen:
            seen.add(r)
            gens.append(r)

    for block in a.blocks:
        for i in range(block.dim):
            for j in range(i + 1, block.dim):
                hi, lo = block.weights[i], block.weights[j]
                if hi != lo:
                    add(hi / lo)
    for g in a.geometric_blocks:
        add(1 / g.ratio)
    has_dense = False
    for d in a.diffuse:
        if isinstance(d.modular, Cyclic):
            add(1 / d.modular.ratio)
        elif isinstance(d.modular, Dense):
            has_dense = True
        else:
            assert isinstance(d.modular, Tracial)
    return gens, has_dense


def classify_group(generators: Iterable[Fraction], has_dense: bool = False) -> RatioGroup:
    """Classify the multiplicative group generated by exact rationals.

    Trivial when there is nothing but 1; cyclic when the exponent-vector
    lattice has rank 1, with the canonical generator in (0, 1); dense when
    the rank is at least 2 or an explicitly dense component is present.
    """
    if has_dense:
        return DenseGroup()
    vectors = [factor_positive_rational(g) for g in generators if g != 1]
    vectors = [v for v in vectors if v]
    if not vectors:
        return Trivial()
    primitive, _ = _primitive_direction(vectors[0])
    coords = []
    for vec in vectors:
        c = _is_multiple(vec, primitive)
        if c is None:
            return DenseGroup()  # rank >= 2
        coords.append(c)
    base = _rational_from_vector(primitive)
    if base > 1:
        base = 1 / base
        coords = [-c for c in coords]
    # base < 1; generated subgroup of Z along the primitive direction:
    g = math.gcd(*coords)
    return CyclicGroup(base**g)


def t_set(g: RatioGroup) -> TSet:
    """Triviality set of the modular flow from its ratio group."""
    if isinstance(g, Trivial):
        return AllReals()
    if isinstance(g, CyclicGroup):
        return Lattice(g.generator)
    return ZeroOnly()


def type_label(g: RatioGroup) -> FactorType:
    """Murray-von Neumann-Connes label of a factor with this ratio group.

    The caller guarantees the algebra in question is a factor.  By
    construction no III_0 label can arise.
    """
    if isinstance(g, Trivial):
        return TypeII1()
    if isinstance(g, CyclicGroup):
        return TypeIII(g.generator)
    return TypeIII1()


def combine(groups: Iterable[RatioGroup]) -> RatioGroup:
    """Join of ratio groups: classify the union of their generating sets."""
    gens: list[Fraction] = []
    for g in groups:
        if isinstance(g, DenseGroup):
            return DenseGroup()
        if isinstance(g, CyclicGroup):
            gens.append(1 / g.generator)
    return classify_group(gens)
