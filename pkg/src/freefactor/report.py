"""Report types for the structure computation, plus their JSON encoding.

Citation strings attached to flags and trace steps are opaque labels naming
the classification facts relied on; the human CLI format prints them next to
every structural claim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .modular import (
    AllReals,
    CyclicGroup,
    DenseGroup,
    FactorType,
    Lattice,
    RatioGroup,
    TSet,
    Trivial,
    TypeII1,
    TypeIII,
    TypeIII1,
    ZeroOnly,
)

__all__ = [
    "FlagStatus",
    "proven",
    "claimed_elsewhere",
    "UNKNOWN",
    "MaxAtomSelection",
    "AtomBlock",
    "FactorKind",
    "NonFactorDim4",
    "Absent",
    "ContinuousKind",
    "AnnotatedGroup",
    "ContinuousPart",
    "TraceStep",
    "StructureReport",
    "report_to_dict",
]


@dataclass(frozen=True)
class FlagStatus:
    """Epistemic status of a structural claim: proven by the classification
    theorems, claimed in follow-up work, or unknown."""

    status: str
    citation: str = ""

    def __post_init__(self):
        if self.status not in ("proven", "claimed_elsewhere", "unknown"):
            raise ValueError(f"bad flag status {self.status!r}")
        if self.status != "unknown" and not self.citation:
            raise ValueError("proven/claimed_elsewhere flags need a citation")


def proven(citation: str) -> FlagStatus:
    return FlagStatus("proven", citation)


def claimed_elsewhere(citation: str) -> FlagStatus:
    return FlagStatus("claimed_elsewhere", citation)


UNKNOWN = FlagStatus("unknown")


@dataclass(frozen=True)
class MaxAtomSelection:
    """The dominant scalar atom over both presentations.

    side/atom_index address the chosen atom in that side's sorted scalar-atom
    list; co_maximizers lists every other atom attaining the same value.
    """

    side: int
    atom_index: int
    value: Fraction
    co_maximizers: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class AtomBlock:
    """One matrix block of the discrete part: ``dim`` x ``dim``, with the
    exact state mass of each diagonal matrix unit and their total.

    source = (side, block index) names the originating block of the
    non-dominant presentation; side 0 marks the meet atoms of the
    dimension-4 base case.
    """

    source: tuple[int, int]
    dim: int
    per_entry_weights: tuple[Fraction, ...]
    total_weight: Fraction

    def __post_init__(self):
        assert self.dim >= 1 and len(self.per_entry_weights) == self.dim
        assert all(w > 0 for w in self.per_entry_weights)
        assert sum(self.per_entry_weights, Fraction(0)) == self.total_weight


@dataclass(frozen=True)
class FactorKind:
    factor_type: FactorType


@dataclass(frozen=True)
class NonFactorDim4:
    """Continuous part of the dimension-4 base case: not a factor."""


@dataclass(frozen=True)
class Absent:
    """No continuous part was produced (scalar passthrough only)."""


ContinuousKind = Union[FactorKind, NonFactorDim4, Absent]


@dataclass(frozen=True)
class AnnotatedGroup:
    """A ratio group together with the status of its use as the point
    spectrum invariant."""

    group: RatioGroup
    status: FlagStatus


@dataclass(frozen=True)
class ContinuousPart:
    weight: Fraction
    kind: ContinuousKind
    t_set: TSet
    full: FlagStatus
    asymptotic_centralizer_trivial: FlagStatus
    prime: FlagStatus
    no_cartan_in_nonhyperfinite: FlagStatus
    state_centralizer_ergodic: FlagStatus
    sd_group: AnnotatedGroup


@dataclass(frozen=True)
class TraceStep:
    condition: str
    outcome: str
    citation: str


@dataclass(frozen=True)
class StructureReport:
    atoms: tuple[AtomBlock, ...]
    continuous: ContinuousPart
    amenable: bool
    warnings: tuple[str, ...] = ()
    trace: tuple[TraceStep, ...] = ()

    def __post_init__(self):
        total = sum((a.total_weight for a in self.atoms), Fraction(0))
        assert total + self.continuous.weight == 1, "state mass must be conserved"

    @property
    def atom_total(self) -> Fraction:
        return sum((a.total_weight for a in self.atoms), Fraction(0))


# -- JSON encoding -----------------------------------------------------------


def _rat(x: Fraction) -> str:
    return str(x)


def group_to_json(g: RatioGroup):
    if isinstance(g, Trivial):
        return "trivial"
    if isinstance(g, CyclicGroup):
        return {"cyclic": _rat(g.generator)}
    return "dense"


def tset_to_json(t: TSet):
    if isinstance(t, AllReals):
        return "all_reals"
    if isinstance(t, Lattice):
        return {"lattice_lambda": _rat(t.lam)}
    return "zero_only"


def factor_type_to_json(ft: FactorType):
    if isinstance(ft, TypeII1):
        return {"type": "II1"}
    if isinstance(ft, TypeIII):
        return {"type": "III_lambda", "lambda": _rat(ft.lam)}
    return {"type": "III1"}


def kind_to_json(kind: ContinuousKind):
    if isinstance(kind, FactorKind):
        return {"factor": factor_type_to_json(kind.factor_type)}
    if isinstance(kind, NonFactorDim4):
        return "non_factor_dim4"
    return "absent"


def flag_to_json(f: FlagStatus):
    out = {"status": f.status}
    if f.citation:
        out["citation"] = f.citation
    return out


def report_to_dict(r: StructureReport) -> dict:
    """Stable JSON-ready encoding; all rationals as exact "p/q" strings."""
    return {
        "atoms": [
            {
                "source_side": a.source[0],
                "source_block": a.source[1],
                "dim": a.dim,
                "per_entry_weights": [_rat(w) for w in a.per_entry_weights],
                "total_weight": _rat(a.total_weight),
            }
            for a in r.atoms
        ],
        "continuous": {
            "weight": _rat(r.continuous.weight),
            "kind": kind_to_json(r.continuous.kind),
            "t_set": tset_to_json(r.continuous.t_set),
            "full": flag_to_json(r.continuous.full),
            "asymptotic_centralizer_trivial": flag_to_json(
                r.continuous.asymptotic_centralizer_trivial
            ),
            "prime": flag_to_json(r.continuous.prime),
            "no_cartan_in_nonhyperfinite": flag_to_json(
                r.continuous.no_cartan_in_nonhyperfinite
            ),
            "state_centralizer_ergodic": flag_to_json(
                r.continuous.state_centralizer_ergodic
            ),
            "sd_group": {
                "group": group_to_json(r.continuous.sd_group.group),
                "status": flag_to_json(r.continuous.sd_group.status),
            },
        },
        "amenable": r.amenable,
        "warnings": list(r.warnings),
        "trace": [
            {"condition": s.condition, "outcome": s.outcome, "citation": s.citation}
            for s in r.trace
        ],
    }
