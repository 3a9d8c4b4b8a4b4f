"""Independent pairwise atom rule for purely abelian inputs.

For two finite tuples of scalar atoms (alpha_i) and (beta_j), every pair with
alpha_i + beta_j > 1 yields one scalar summand of mass alpha_i + beta_j - 1.
This is kept as a deliberately separate code path with no logic shared with
the closed form in ``structure``; its whole value is independence, so keep it
that way when editing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotAbelian
from .model import AlgebraSpec, dimension

__all__ = ["PairAtom", "CheckResult", "abelian_atoms", "cross_check"]


@dataclass(frozen=True)
class PairAtom:
    """Atom from the pair (i, j); positions are 1-based."""

    i: int
    j: int
    mass: Fraction

    def __post_init__(self):
        assert self.mass > 0


@dataclass(frozen=True)
class CheckResult:
    agree: bool
    oracle_masses: tuple[Fraction, ...]
    closed_form_masses: tuple[Fraction, ...]


def _atom_masses(a: AlgebraSpec) -> list[Fraction]:
    if a.geometric_blocks or a.diffuse or any(b.dim != 1 for b in a.blocks):
        raise NotAbelian(f"algebra {a.name!r} is not purely scalar atoms")
    return [b.weights[0] for b in a.blocks]


def abelian_atoms(a: AlgebraSpec, b: AlgebraSpec) -> list[PairAtom]:
    """All pair atoms, sorted by mass descending (ties by position)."""
    alphas = _atom_masses(a)
    betas = _atom_masses(b)
    out = [
        PairAtom(i + 1, j + 1, alpha + beta - 1)
        for i, alpha in enumerate(alphas)
        for j, beta in enumerate(betas)
        if alpha + beta > 1
    ]
    out.sort(key=lambda p: (-p.mass, p.i, p.j))
    return out


def cross_check(a: AlgebraSpec, b: AlgebraSpec) -> CheckResult:
    """Compare the pairwise rule against the closed form, as multisets of
    atom masses.  Any disagreement is a release-blocking defect."""
    from .structure import classify_free_product

    if dimension(a) + dimension(b) < 5:
        raise ValueError(
            "cross_check needs dimension(a) + dimension(b) >= 5; the "
            "dimension-4 base case uses the meet/co-meet convention instead"
        )
    oracle = sorted((p.mass for p in abelian_atoms(a, b)), reverse=True)
    closed = sorted(
        (blk.total_weight for blk in classify_free_product(a, b).atoms), reverse=True
    )
    return CheckResult(oracle == closed, tuple(oracle), tuple(closed))
