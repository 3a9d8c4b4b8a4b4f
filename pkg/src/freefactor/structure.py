"""Closed-form structure of a free product of two presented algebras.

The result is always (discrete multi-matrix part) + (continuous part).  The
discrete part exists only when the largest scalar atom over both
presentations, of mass v > 1/2, dominates: a finite block with weights
(w_1, ..., w_d) of the other presentation contributes a d x d summand exactly
when sum(1/w_s) < 1/(1-v), and then each diagonal matrix unit has state mass
w_s * (1 - (1-v) * sum(1/w_r)).  Everything else merges into a single
continuous part: a full, prime factor whose type is decided by the combined
modular ratio group.

Every derivation step is recorded in an ordered trace with the label of the
classification fact it relies on.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from . import modular
from .errors import IdentityViolation, InternalInvariantViolation
from .model import AlgebraSpec, MatrixBlock, dimension, is_trivial, scalar_atoms
from .modular import classify_group, ratio_generators, t_set, type_label
from .report import (
    UNKNOWN,
    Absent,
    AnnotatedGroup,
    AtomBlock,
    ContinuousPart,
    FactorKind,
    FlagStatus,
    MaxAtomSelection,
    StructureReport,
    TraceStep,
    claimed_elsewhere,
    proven,
)
from .twoproj import dim4_structure

__all__ = [
    "select_max_atom",
    "discrete_part",
    "case2ii_identity_check",
    "continuous_part",
    "classify_free_product",
]

# Citation labels used in traces and flags (printed verbatim by the CLI).
CITE_MAIN = "Thm 4.1"
CITE_UNIQUE = "Thm 4.1 (attained by only one minimal)"
CITE_SCALAR_CANDIDATES = "Thm 4.1 (M_{i0,d} p = C p)"
CITE_THRESHOLD = "Eq. (4.1)"
CITE_STATE_VALUES = "Eq. (4.4)"
CITE_OTHERWISE = "Thm 4.1 (otherwise M_d = 0)"
CITE_HALF = "Remark 4.2(1)"
CITE_DIM_BOUND = "Remark 4.2(2)"
CITE_AMENABLE = "Remark 4.2(5)"
CITE_TSET = "Thm 3.4"
CITE_FULL = "Thm 4.1 (M_c' cap M_c^omega = C)"
CITE_ASYMPTOTIC = "Thm 4.1 ((M_c)_omega = C)"
CITE_PRIME = "Cor 4.3(1)"
CITE_NO_CARTAN = "Cor 4.3(2)"
CITE_ERGODIC = "Remark 4.2(4)"
CITE_SD = "§5.1"
CITE_MERGE_SPLIT = "Lemma 2.2"
CITE_R_MASS = "§4.2.3 case (2-ii)"


def select_max_atom(a: AlgebraSpec, b: AlgebraSpec) -> Optional[MaxAtomSelection]:
    """Pick the dominant scalar atom over both presentations.

    Candidates are the 1-dimensional blocks only (minimal central projections
    with scalar summand); full matrix blocks never compete.  Ties are
    recorded as co-maximizers, never fatal.
    """
    per_side = {1: scalar_atoms(a), 2: scalar_atoms(b)}
    tops = [(side, atoms[0][1]) for side, atoms in per_side.items() if atoms]
    if not tops:
        return None
    value = max(mass for _, mass in tops)

    hits: list[tuple[int, int]] = []
    for side in (1, 2):
        for pos, (_, mass) in enumerate(per_side[side]):
            if mass == value:
                hits.append((side, pos))
            else:
                break  # sorted non-increasing
    side, pos = hits[0]
    return MaxAtomSelection(side, pos, value, tuple(hits[1:]))


def discrete_part(sel: MaxAtomSelection, other: AlgebraSpec) -> list[AtomBlock]:
    """Blocks of ``other`` that survive next to the dominant atom.

    A finite block qualifies iff its reciprocal weight sum is strictly below
    1/(1 - value); geometric blocks never qualify (their reciprocal sums
    diverge).  Qualifying blocks keep their dimension, with the exact state
    masses of the new diagonal matrix units.
    """
    value = sel.value
    side = 3 - sel.side
    bound = 1 / (1 - value)
    atoms: list[AtomBlock] = []
    for j, block in enumerate(other.blocks):
        recip = sum((1 / w for w in block.weights), Fraction(0))
        if recip < bound:
            scale = 1 - (1 - value) * recip
            per_entry = tuple(w * scale for w in block.weights)
            atom = AtomBlock((side, j), block.dim, per_entry, sum(per_entry, Fraction(0)))
            if atom.dim > bound:
                raise InternalInvariantViolation(
                    f"emitted block dimension {atom.dim} exceeds 1/(1-value) = {bound}"
                )
            case2ii_identity_check(sel, block)
            atoms.append(atom)
    return atoms


def case2ii_identity_check(sel: MaxAtomSelection, block: MatrixBlock) -> bool:
    """Cross-check the per-block total mass through the independent corner
    route: the scalar corner r has mass
    w_min * max(1 - (1-value) * sum(1/w_i), 0) and each diagonal unit carries
    (w_i / w_min) times that.  Exact disagreement with the direct route
    signals an implementation bug, never a data error."""
    value = sel.value
    recip = sum((1 / w for w in block.weights), Fraction(0))
    if recip >= 1 / (1 - value):
        return True  # block not emitted; nothing to compare
    direct_total = block.mass * (1 - (1 - value) * recip)
    w_min = block.weights[-1]
    r_mass = w_min * max(1 - (1 - value) * recip, Fraction(0))
    corner_total = sum(((w / w_min) * r_mass for w in block.weights), Fraction(0))
    if direct_total != corner_total:
        raise IdentityViolation(
            f"corner-route mass {corner_total} != direct mass {direct_total} "
            f"for block {block} at value {value}"
        )
    return True


def _all_hyperfinite(a: AlgebraSpec) -> bool:
    return all(d.hyperfinite for d in a.diffuse)


def _has_dense_descriptor(a: AlgebraSpec) -> bool:
    return any(isinstance(d.modular, modular.Dense) for d in a.diffuse)


def continuous_part(a: AlgebraSpec, b: AlgebraSpec, atoms: list[AtomBlock]) -> ContinuousPart:
    """Classify the diffuse factor part left after removing the atoms."""
    weight = 1 - sum((x.total_weight for x in atoms), Fraction(0))
    gens_a, dense_a = ratio_generators(a)
    gens_b, dense_b = ratio_generators(b)
    group = classify_group(gens_a + gens_b, dense_a or dense_b)

    if not a.diffuse and not b.diffuse:
        ergodic = proven(CITE_ERGODIC)
    elif not (_has_dense_descriptor(a) or _has_dense_descriptor(b)):
        ergodic = claimed_elsewhere(CITE_SD)
    else:
        ergodic = UNKNOWN

    no_cartan: FlagStatus
    if _all_hyperfinite(a) and _all_hyperfinite(b):
        no_cartan = proven(CITE_NO_CARTAN)
    else:
        no_cartan = UNKNOWN

    return ContinuousPart(
        weight=weight,
        kind=FactorKind(type_label(group)),
        t_set=t_set(group),
        full=proven(CITE_FULL),
        asymptotic_centralizer_trivial=proven(CITE_ASYMPTOTIC),
        prime=proven(CITE_PRIME),
        no_cartan_in_nonhyperfinite=no_cartan,
        state_centralizer_ergodic=ergodic,
        sd_group=AnnotatedGroup(group, ergodic),
    )


def _passthrough(other: AlgebraSpec, other_side: int, trivial_name: str) -> StructureReport:
    """Free product with the scalars: the other algebra, unchanged."""
    atoms = tuple(
        AtomBlock((other_side, j), blk.dim, blk.weights, blk.mass)
        for j, blk in enumerate(other.blocks)
    )
    leftover = 1 - sum((x.total_weight for x in atoms), Fraction(0))
    gens, dense = ratio_generators(other)
    group = classify_group(gens, dense)
    warnings = [
        f"free product with the scalar algebra {trivial_name!r}: "
        f"result is {other.name!r} unchanged"
    ]
    if other.geometric_blocks:
        warnings.append(
            "passthrough: infinite matrix blocks are reported inside the "
            "unclassified remainder weight, not as discrete atom blocks"
        )
    continuous = ContinuousPart(
        weight=leftover,
        kind=Absent(),
        t_set=t_set(group),
        full=UNKNOWN,
        asymptotic_centralizer_trivial=UNKNOWN,
        prime=UNKNOWN,
        no_cartan_in_nonhyperfinite=UNKNOWN,
        state_centralizer_ergodic=UNKNOWN,
        sd_group=AnnotatedGroup(group, UNKNOWN),
    )
    trace = (
        TraceStep("one input is the scalar algebra C", "passthrough", CITE_MAIN),
    )
    return StructureReport(
        atoms=atoms,
        continuous=continuous,
        amenable=_all_hyperfinite(other),
        warnings=tuple(warnings),
        trace=trace,
    )


def _atom_shape(atoms: list[AtomBlock]) -> list[tuple[int, tuple[Fraction, ...]]]:
    return sorted((x.dim, x.per_entry_weights) for x in atoms)


def classify_free_product(a: AlgebraSpec, b: AlgebraSpec) -> StructureReport:
    """Full dispatch: scalar passthrough, the dimension-4 base case, or the
    general closed form."""
    if is_trivial(b):
        return _passthrough(a, 1, b.name)
    if is_trivial(a):
        return _passthrough(b, 2, a.name)
    if dimension(a) + dimension(b) == 4:
        return dim4_structure(a, b)

    trace: list[TraceStep] = [
        TraceStep(
            "dimension(M1) + dimension(M2) >= 5 and neither input is C",
            "general closed form applies",
            CITE_MAIN,
        ),
        TraceStep(
            "maximizer candidate set",
            "scalar atoms (1-dimensional blocks) only; full matrix blocks "
            "never compete (interpretation)",
            CITE_SCALAR_CANDIDATES,
        ),
    ]
    warnings: list[str] = []
    sel = select_max_atom(a, b)
    atoms: list[AtomBlock] = []

    if sel is None:
        trace.append(
            TraceStep("scalar atom candidates", "none; discrete part is 0", CITE_OTHERWISE)
        )
    else:
        trace.append(
            TraceStep(
                "dominant scalar atom",
                f"side {sel.side}, mass {sel.value}"
                + (f", {len(sel.co_maximizers)} tie(s)" if sel.co_maximizers else ""),
                CITE_UNIQUE,
            )
        )
        if sel.co_maximizers:
            warnings.append(
                f"maximum atom mass {sel.value} is attained by more than one "
                "minimal projection; the uniqueness hypothesis is read as "
                "non-blocking and atoms are computed from any maximizer "
                f"[{CITE_UNIQUE}; consistency via {CITE_MERGE_SPLIT}]"
            )
        if sel.value <= Fraction(1, 2):
            trace.append(
                TraceStep(
                    f"dominant atom mass {sel.value} <= 1/2",
                    "discrete part is 0; threshold scan skipped",
                    CITE_HALF,
                )
            )
        else:
            other = b if sel.side == 1 else a
            atoms = discrete_part(sel, other)
            for blk in atoms:
                trace.append(
                    TraceStep(
                        f"block {blk.source[1]} of side {blk.source[0]}: "
                        "reciprocal weight sum < 1/(1-value)",
                        f"emit {blk.dim}x{blk.dim} block, per-entry masses "
                        f"{[str(w) for w in blk.per_entry_weights]}",
                        f"{CITE_THRESHOLD}; {CITE_STATE_VALUES}",
                    )
                )
            if not atoms:
                trace.append(
                    TraceStep(
                        "no block passes the reciprocal-sum threshold",
                        "discrete part is 0",
                        CITE_THRESHOLD,
                    )
                )
            for co_side, co_pos in sel.co_maximizers:
                if co_side == sel.side:
                    raise InternalInvariantViolation(
                        "two scalar atoms above 1/2 on one side cannot happen"
                    )
                alt_sel = MaxAtomSelection(co_side, co_pos, sel.value)
                alt_other = b if co_side == 1 else a
                alt_atoms = discrete_part(alt_sel, alt_other)
                if _atom_shape(alt_atoms) != _atom_shape(atoms):
                    raise InternalInvariantViolation(
                        "tied maximizers disagree on the discrete part: "
                        f"{_atom_shape(atoms)} vs {_atom_shape(alt_atoms)}"
                    )
                trace.append(
                    TraceStep(
                        "tie consistency: atoms recomputed from the tied maximizer",
                        "identical atom multiset",
                        CITE_MERGE_SPLIT,
                    )
                )

    continuous = continuous_part(a, b, atoms)
    trace.append(
        TraceStep(
            "combined modular ratio group",
            _describe_group(continuous.sd_group.group),
            CITE_TSET,
        )
    )
    trace.append(
        TraceStep(
            "continuous part",
            f"weight {continuous.weight}, full prime factor",
            f"{CITE_MAIN}; {CITE_PRIME}",
        )
    )
    trace.append(
        TraceStep(
            "amenability",
            "non-amenable (inputs are not both 2-dimensional)",
            CITE_AMENABLE,
        )
    )
    return StructureReport(
        atoms=tuple(atoms),
        continuous=continuous,
        amenable=False,  # only the dimension-4 case is amenable
        warnings=tuple(warnings),
        trace=tuple(trace),
    )


def _describe_group(g: modular.RatioGroup) -> str:
    if isinstance(g, modular.Trivial):
        return "trivial (tracial): type II_1"
    if isinstance(g, modular.CyclicGroup):
        return f"cyclic with generator {g.generator}: type III_{g.generator}"
    return "dense: type III_1"
