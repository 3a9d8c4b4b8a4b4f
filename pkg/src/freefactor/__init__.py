"""Exact structure calculator and random-matrix verifier for free products
of state-equipped von Neumann algebras."""

from .abelian import CheckResult, PairAtom, abelian_atoms, cross_check
from .errors import (
    FreeFactorError,
    IdentityViolation,
    IllConditioned,
    MalformedDocument,
    MassMismatch,
    NonPositiveWeight,
    NotAbelian,
    NotTracial,
    OutOfRange,
    RatioOutOfRange,
    SizeTooSmall,
    UnsupportedMagnitude,
    UnsupportedNonTracialDim4,
    ValidationError,
)
from .model import (
    AlgebraSpec,
    Cyclic,
    Dense,
    DiffuseSummand,
    GeometricBlock,
    MatrixBlock,
    Tracial,
    dimension,
    is_tracial,
    is_trivial,
    parse_rational,
    parse_spec,
    render_spec,
    scalar_atoms,
    spec_from_dict,
    spec_to_dict,
)
from .modular import (
    AllReals,
    CyclicGroup,
    DenseGroup,
    Lattice,
    Trivial,
    TypeII1,
    TypeIII,
    TypeIII1,
    ZeroOnly,
    classify_group,
    combine,
    factor_positive_rational,
    ratio_generators,
    t_set,
    type_label,
)
from .report import (
    AtomBlock,
    ContinuousPart,
    FlagStatus,
    MaxAtomSelection,
    StructureReport,
    TraceStep,
    report_to_dict,
)
from .rmt import (
    Histogram,
    RmtConfig,
    RmtReport,
    haar_unitary,
    meet,
    nested_meet_f11,
    realize,
    verify,
)
from .structure import (
    case2ii_identity_check,
    classify_free_product,
    continuous_part,
    discrete_part,
    select_max_atom,
)
from .twoproj import SpectralLaw, TwoProjAtoms, dim4_structure, pqp_law, two_proj_atoms

__version__ = "0.1.0"
