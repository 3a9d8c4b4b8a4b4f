"""Exact data model for state-equipped algebra presentations.

An algebra is presented as a direct sum of finite matrix blocks (each with a
non-increasing vector of strictly positive rational weights, the eigenvalues
of the state's density matrix), optional infinite matrix blocks with a
geometric weight sequence, and declared diffuse summands that carry only
their modular behaviour and a hyperfiniteness flag.

All arithmetic is exact: weights are `fractions.Fraction` throughout and no
float ever enters the symbolic layer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import (
    MalformedDocument,
    MassMismatch,
    NonPositiveWeight,
    RatioOutOfRange,
)

__all__ = [
    "Tracial",
    "Cyclic",
    "Dense",
    "ModularDescriptor",
    "MatrixBlock",
    "GeometricBlock",
    "DiffuseSummand",
    "AlgebraSpec",
    "parse_rational",
    "parse_spec",
    "render_spec",
    "spec_from_dict",
    "spec_to_dict",
    "dimension",
    "is_tracial",
    "is_trivial",
    "scalar_atoms",
]


def parse_rational(value) -> Fraction:
    """Parse an exact rational from a "p/q" string or integer string.

    Plain ints are accepted; floats are rejected (no rounding anywhere in
    the symbolic layer).
    """
    if isinstance(value, bool):
        raise MalformedDocument(f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedDocument(f"bad rational literal {value!r}: {exc}") from None
    raise MalformedDocument(f"expected a rational string, got {type(value).__name__}")


def format_rational(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class Tracial:
    """Modular flow is trivial for all times."""


@dataclass(frozen=True)
class Cyclic:
    """Modular flow is periodic: trivial exactly on (2*pi/log(1/ratio)) * Z."""

    ratio: Fraction

    def __post_init__(self):
        if not (0 < self.ratio < 1):
            raise RatioOutOfRange(f"cyclic modular parameter {self.ratio} not in (0, 1)")


@dataclass(frozen=True)
class Dense:
    """Modular flow is trivial only at time 0."""


ModularDescriptor = Union[Tracial, Cyclic, Dense]


@dataclass(frozen=True)
class MatrixBlock:
    """A full matrix block of dimension ``dim`` whose state has density
    eigenvalues ``weights`` (sorted non-increasing, each > 0).

    The block's total state mass is ``sum(weights)``.
    """

    dim: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise MalformedDocument(f"block dimension {self.dim} must be >= 1")
        if len(self.weights) != self.dim:
            raise MalformedDocument(
                f"block of dimension {self.dim} carries {len(self.weights)} weights"
            )
        if any(w <= 0 for w in self.weights):
            raise NonPositiveWeight(f"block weights must be > 0, got {self.weights}")
        ordered = tuple(sorted(self.weights, reverse=True))
        if ordered != self.weights:
            object.__setattr__(self, "weights", ordered)

    @property
    def mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def is_tracial(self) -> bool:
        return all(w == self.weights[0] for w in self.weights)


@dataclass(frozen=True)
class GeometricBlock:
    """Infinite matrix block with weight sequence head*(1-ratio)*ratio**(s-1).

    The total mass is exactly ``head``; the within-block eigenvalue ratios
    generate the cyclic group of ``1/ratio``.
    """

    head: Fraction
    ratio: Fraction

    def __post_init__(self):
        if self.head <= 0:
            raise NonPositiveWeight(f"geometric head {self.head} must be > 0")
        if not (0 < self.ratio < 1):
            raise RatioOutOfRange(f"geometric ratio {self.ratio} not in (0, 1)")

    @property
    def mass(self) -> Fraction:
        return self.head


@dataclass(frozen=True)
class DiffuseSummand:
    """A diffuse direct summand, described only by its state mass, its
    modular behaviour and whether it is hyperfinite."""

    weight: Fraction
    modular: ModularDescriptor = field(default_factory=Tracial)
    hyperfinite: bool = False

    def __post_init__(self):
        if not (0 < self.weight <= 1):
            raise NonPositiveWeight(f"diffuse weight {self.weight} not in (0, 1]")


@dataclass(frozen=True)
class AlgebraSpec:
    """A sigma-finite algebra with faithful normal state, presented exactly.

    Invariant: the total state mass over all components is exactly 1.
    """

    name: str
    blocks: tuple[MatrixBlock, ...] = ()
    geometric_blocks: tuple[GeometricBlock, ...] = ()
    diffuse: tuple[DiffuseSummand, ...] = ()

    def __post_init__(self):
        if not (self.blocks or self.geometric_blocks or self.diffuse):
            raise MalformedDocument(f"algebra {self.name!r} has no components")
        total = self.total_mass
        if total != 1:
            raise MassMismatch(f"algebra {self.name!r} has total mass {total}, expected 1")

    @property
    def total_mass(self) -> Fraction:
        total = Fraction(0)
        for b in self.blocks:
            total += b.mass
        for g in self.geometric_blocks:
            total += g.mass
        for d in self.diffuse:
            total += d.weight
        return total


def dimension(a: AlgebraSpec) -> Union[int, float]:
    """Linear dimension: sum of dim**2 over finite blocks, or ``math.inf``
    when any geometric block or diffuse summand is present."""
    if a.geometric_blocks or a.diffuse:
        return math.inf
    return sum(b.dim * b.dim for b in a.blocks)


def is_tracial(a: AlgebraSpec) -> bool:
    """True iff the state is a trace: equal weights inside every finite
    block, no geometric block, and only tracial diffuse summands."""
    if a.geometric_blocks:
        return False
    if any(not isinstance(d.modular, Tracial) for d in a.diffuse):
        return False
    return all(b.is_tracial() for b in a.blocks)


def is_trivial(a: AlgebraSpec) -> bool:
    """True iff the algebra is the scalars: a single 1-dimensional block."""
    return (
        len(a.blocks) == 1
        and a.blocks[0].dim == 1
        and not a.geometric_blocks
        and not a.diffuse
    )


def scalar_atoms(a: AlgebraSpec) -> list[tuple[int, Fraction]]:
    """Masses of all 1-dimensional blocks as (block index, mass), sorted by
    mass non-increasing (ties by block index).

    These are the minimal central projections with scalar summand, i.e. the
    candidate set for the dominant-atom selection.
    """
    atoms = [(i, b.weights[0]) for i, b in enumerate(a.blocks) if b.dim == 1]
    atoms.sort(key=lambda item: (-item[1], item[0]))
    return atoms


# -- document format ---------------------------------------------------------
#
# {
#   "name": str,
#   "blocks": [{"dim": int, "weights": ["p/q", ...]}],
#   "geometric_blocks": [{"head": "p/q", "ratio": "p/q"}],
#   "diffuse": [{"weight": "p/q",
#                "modular": "tracial" | {"cyclic": "p/q"} | "dense",
#                "hyperfinite": bool}]
# }
#
# Missing arrays default to empty; rationals are "p/q" or integer strings.


def _parse_modular(value) -> ModularDescriptor:
    if value == "tracial":
        return Tracial()
    if value == "dense":
        return Dense()
    if isinstance(value, dict) and set(value) == {"cyclic"}:
        return Cyclic(parse_rational(value["cyclic"]))
    raise MalformedDocument(f"bad modular descriptor {value!r}")


def _render_modular(m: ModularDescriptor):
    if isinstance(m, Tracial):
        return "tracial"
    if isinstance(m, Dense):
        return "dense"
    return {"cyclic": format_rational(m.ratio)}


def spec_from_dict(doc: dict) -> AlgebraSpec:
    if not isinstance(doc, dict):
        raise MalformedDocument("spec document must be a JSON object")
    unknown = set(doc) - {"name", "blocks", "geometric_blocks", "diffuse"}
    if unknown:
        raise MalformedDocument(f"unknown fields in spec document: {sorted(unknown)}")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise MalformedDocument("'name' must be a string")

    blocks = []
    for entry in _as_list(doc, "blocks"):
        if not isinstance(entry, dict) or set(entry) - {"dim", "weights"}:
            raise MalformedDocument(f"bad block entry {entry!r}")
        dim = entry.get("dim")
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise MalformedDocument(f"block dim must be an integer, got {dim!r}")
        weights = entry.get("weights")
        if not isinstance(weights, list) or not weights:
            raise MalformedDocument(f"block weights must be a nonempty list, got {weights!r}")
        blocks.append(MatrixBlock(dim, tuple(parse_rational(w) for w in weights)))

    geometric = []
    for entry in _as_list(doc, "geometric_blocks"):
        if not isinstance(entry, dict) or set(entry) - {"head", "ratio"}:
            raise MalformedDocument(f"bad geometric block entry {entry!r}")
        geometric.append(
            GeometricBlock(parse_rational(entry.get("head")), parse_rational(entry.get("ratio")))
        )

    diffuse = []
    for entry in _as_list(doc, "diffuse"):
        if not isinstance(entry, dict) or set(entry) - {"weight", "modular", "hyperfinite"}:
            raise MalformedDocument(f"bad diffuse entry {entry!r}")
        hyper = entry.get("hyperfinite", False)
        if not isinstance(hyper, bool):
            raise MalformedDocument(f"diffuse hyperfinite flag must be a bool, got {hyper!r}")
        diffuse.append(
            DiffuseSummand(
                parse_rational(entry.get("weight")),
                _parse_modular(entry.get("modular", "tracial")),
                hyper,
            )
        )

    return AlgebraSpec(name, tuple(blocks), tuple(geometric), tuple(diffuse))


def _as_list(doc: dict, key: str) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise MalformedDocument(f"'{key}' must be an array")
    return value


def spec_to_dict(a: AlgebraSpec) -> dict:
    doc: dict = {"name": a.name}
    if a.blocks:
        doc["blocks"] = [
            {"dim": b.dim, "weights": [format_rational(w) for w in b.weights]}
            for b in a.blocks
        ]
    if a.geometric_blocks:
        doc["geometric_blocks"] = [
            {"head": format_rational(g.head), "ratio": format_rational(g.ratio)}
            for g in a.geometric_blocks
        ]
    if a.diffuse:
        doc["diffuse"] = [
            {
                "weight": format_rational(d.weight),
                "modular": _render_modular(d.modular),
                "hyperfinite": d.hyperfinite,
            }
            for d in a.diffuse
        ]
    return doc


def parse_spec(text: str) -> AlgebraSpec:
    """Parse and validate a spec document (UTF-8 JSON text)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from None
    return spec_from_dict(doc)


def render_spec(a: AlgebraSpec) -> str:
    """Inverse of :func:`parse_spec` (up to weight sorting, which parse
    re-applies): ``parse_spec(render_spec(a)) == a``."""
    return json.dumps(spec_to_dict(a), indent=2)
