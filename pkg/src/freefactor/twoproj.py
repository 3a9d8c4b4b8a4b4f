"""The pair-of-free-projections base case.

Two freely independent projections with masses alpha, beta generate an
algebra whose only possible scalar summands sit under the meet of the
projections and the meet of their complements, with exact masses
max(alpha+beta-1, 0) and max(1-alpha-beta, 0).  This module computes those
atoms, classifies the dimension-4 free product built on them, and evaluates
the spectral distribution of the word pqp used as the analytic reference by
the matrix-model verifier.

The continuous density is derived (and unit-tested against a symbolic moment
expansion), not quoted: only the atom masses are treated as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Union

import numpy as np

from .errors import OutOfRange, UnsupportedNonTracialDim4
from .model import AlgebraSpec, is_tracial, scalar_atoms
from .modular import AllReals, Trivial
from .report import (
    UNKNOWN,
    AnnotatedGroup,
    AtomBlock,
    ContinuousPart,
    NonFactorDim4,
    StructureReport,
    TraceStep,
)

__all__ = ["TwoProjAtoms", "two_proj_atoms", "dim4_structure", "SpectralLaw", "pqp_law"]


@dataclass(frozen=True)
class TwoProjAtoms:
    """Masses of p^q and (1-p)^(1-q) for free projections of masses
    alpha, beta."""

    meet_mass: Fraction
    co_meet_mass: Fraction

    def __post_init__(self):
        assert 0 <= self.meet_mass < 1 and 0 <= self.co_meet_mass < 1
        assert self.meet_mass == 0 or self.co_meet_mass == 0


def _check_open_unit(name: str, x) -> None:
    if not (0 < x < 1):
        raise OutOfRange(f"{name} = {x} not in the open interval (0, 1)")


def two_proj_atoms(alpha: Fraction, beta: Fraction) -> TwoProjAtoms:
    """Exact atom masses for a pair of free projections."""
    _check_open_unit("alpha", alpha)
    _check_open_unit("beta", beta)
    meet = max(alpha + beta - 1, Fraction(0))
    co_meet = max(1 - alpha - beta, Fraction(0))
    return TwoProjAtoms(meet, co_meet)


def dim4_structure(a: AlgebraSpec, b: AlgebraSpec) -> StructureReport:
    """Structure of the free product of two two-atom abelian algebras.

    With alpha, beta the dominant atom masses, the scalar summands are the
    meet (mass max(alpha+beta-1, 0)) and the co-meet (max(1-alpha-beta, 0));
    the remainder is a non-factor continuous part.  Factor-specific flags
    stay unknown here because the continuous part is not a factor.
    """
    for spec in (a, b):
        if not (len(spec.blocks) == 2 and all(bl.dim == 1 for bl in spec.blocks)
                and not spec.geometric_blocks and not spec.diffuse):
            raise ValueError(f"algebra {spec.name!r} is not a two-atom abelian presentation")
        if not is_tracial(spec):
            # unreachable for two-atom abelian presentations; kept for
            # interface stability
            raise UnsupportedNonTracialDim4(f"algebra {spec.name!r} declares a non-trace")

    alpha = scalar_atoms(a)[0][1]
    beta = scalar_atoms(b)[0][1]
    pair = two_proj_atoms(alpha, beta)

    atoms = []
    if pair.meet_mass > 0:
        atoms.append(AtomBlock((0, 0), 1, (pair.meet_mass,), pair.meet_mass))
    if pair.co_meet_mass > 0:
        atoms.append(AtomBlock((0, 1), 1, (pair.co_meet_mass,), pair.co_meet_mass))
    atom_total = pair.meet_mass + pair.co_meet_mass

    warnings = []
    cross = abs(alpha - beta)
    if cross > 0:
        warnings.append(
            "dimension-4 case: the continuous remainder contains a further "
            f"meet atom of mass {cross} (dominant atom against the opposite "
            "complement); only the meet/co-meet pair is reported as discrete"
        )

    trace = (
        TraceStep(
            "dimension(M1) + dimension(M2) = 4",
            "two-free-projections base case",
            "two-projections structure theorem",
        ),
        TraceStep(
            f"meet mass max({alpha}+{beta}-1, 0)",
            str(pair.meet_mass),
            "two-projections structure theorem",
        ),
        TraceStep(
            f"co-meet mass max(1-{alpha}-{beta}, 0)",
            str(pair.co_meet_mass),
            "two-projections structure theorem",
        ),
        TraceStep(
            "continuous part",
            "L^inf(0,1) x M_2 type remainder, not a factor",
            "two-projections structure theorem",
        ),
    )

    continuous = ContinuousPart(
        weight=1 - atom_total,
        kind=NonFactorDim4(),
        t_set=AllReals(),
        full=UNKNOWN,
        asymptotic_centralizer_trivial=UNKNOWN,
        prime=UNKNOWN,
        no_cartan_in_nonhyperfinite=UNKNOWN,
        state_centralizer_ergodic=UNKNOWN,
        sd_group=AnnotatedGroup(Trivial(), UNKNOWN),
    )
    return StructureReport(
        atoms=tuple(atoms),
        continuous=continuous,
        amenable=True,
        warnings=tuple(warnings),
        trace=trace,
    )


# -- spectral law of pqp -----------------------------------------------------

_QUAD_NODES, _QUAD_WEIGHTS = np.polynomial.legendre.leggauss(400)


@dataclass(frozen=True)
class SpectralLaw:
    """Distribution of pqp for free projections: point masses at 0 and 1
    plus a continuous density on [support_lo, support_hi] in (0, 1)."""

    atoms: tuple[tuple[int, Union[Fraction, float]], ...]
    support: tuple[float, float]
    density: Callable[[float], float]

    def atom_mass(self, location: int) -> Union[Fraction, float]:
        for loc, mass in self.atoms:
            if loc == location:
                return mass
        return Fraction(0)

    def continuous_mass(self) -> float:
        return self._integrate(lambda x: np.ones_like(x))

    def moment(self, k: int) -> float:
        """k-th moment of the full law (atoms included), k >= 1."""
        return self._integrate(lambda x: x**k) + float(self.atom_mass(1))

    def total_mass(self) -> float:
        return self.continuous_mass() + float(self.atom_mass(0)) + float(self.atom_mass(1))

    def _integrate(self, g, upper: float | None = None) -> float:
        """Integrate g(x) * density(x) over [support_lo, min(upper, hi)].

        Substituting x = m + h*sin(theta) removes the square-root endpoint
        singularities, so fixed-order Gauss-Legendre is accurate.
        """
        lo, hi = self.support
        if hi <= lo:
            return 0.0
        m, h = (lo + hi) / 2.0, (hi - lo) / 2.0
        top = math.pi / 2
        if upper is not None:
            if upper <= lo:
                return 0.0
            ratio = (min(upper, hi) - m) / h
            top = math.asin(max(-1.0, min(1.0, ratio)))
        theta = (_QUAD_NODES + 1.0) / 2.0 * (top + math.pi / 2) - math.pi / 2
        scale = (top + math.pi / 2) / 2.0
        x = m + h * np.sin(theta)
        jac = h * np.cos(theta)
        vals = np.asarray(self.density(x)) * np.asarray(g(x)) * jac
        return float(np.dot(vals, _QUAD_WEIGHTS) * scale)

    def cdf(self, x) -> np.ndarray:
        """Distribution function F(x), vectorized."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xs)
        a0, a1 = float(self.atom_mass(0)), float(self.atom_mass(1))
        for i, xi in enumerate(xs):
            v = 0.0
            if xi >= 0:
                v += a0
            v += self._integrate(lambda t: np.ones_like(t), upper=xi)
            if xi >= 1:
                v += a1
            out[i] = v
        return out if np.ndim(x) else out[0]

    def csv_rows(self, samples: int = 256) -> list[str]:
        """CSV export: an atoms header line, then (x, density(x)) samples."""
        rows = ["# atoms: " + "; ".join(f"{loc}:{mass}" for loc, mass in self.atoms)]
        rows.append("x,density")
        lo, hi = self.support
        for x in np.linspace(lo, hi, samples):
            rows.append(f"{x:.12g},{float(self.density(x)):.12g}")
        return rows


def pqp_law(alpha, beta) -> SpectralLaw:
    """Spectral distribution of pqp for free projections of masses alpha,
    beta, with respect to the global trace.

    Point mass at 1: max(alpha+beta-1, 0) (the meet).  Point mass at 0:
    1 - min(alpha, beta) (the complement of p plus the part of p meeting the
    complement of q).  In between, the density
    sqrt((x_hi - x)(x - x_lo)) / (2 pi x (1-x)) on
    x_{lo,hi} = alpha + beta - 2 alpha beta -/+ 2 sqrt(alpha beta (1-alpha)(1-beta)).
    """
    _check_open_unit("alpha", alpha)
    _check_open_unit("beta", beta)
    exact = isinstance(alpha, Rational) and isinstance(beta, Rational)
    if exact:
        alpha, beta = Fraction(alpha), Fraction(beta)
        atom1 = max(alpha + beta - 1, Fraction(0))
        atom0 = 1 - min(alpha, beta)
    else:
        atom1 = max(float(alpha) + float(beta) - 1.0, 0.0)
        atom0 = 1.0 - min(float(alpha), float(beta))

    af, bf = float(alpha), float(beta)
    center = af + bf - 2.0 * af * bf
    halfwidth = 2.0 * math.sqrt(af * bf * (1.0 - af) * (1.0 - bf))
    lo, hi = center - halfwidth, center + halfwidth
    lo, hi = max(lo, 0.0), min(hi, 1.0)

    def density(x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(arr)
        inside = (arr > lo) & (arr < hi)
        xs = arr[inside]
        out[inside] = np.sqrt((hi - xs) * (xs - lo)) / (2.0 * math.pi * xs * (1.0 - xs))
        return out if np.ndim(x) else float(out[0])

    atoms = []
    if atom0 > 0:
        atoms.append((0, atom0))
    if atom1 > 0:
        atoms.append((1, atom1))
    return SpectralLaw(tuple(atoms), (lo, hi), density)
