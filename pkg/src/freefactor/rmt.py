"""Finite-dimensional random-matrix realization of tracial free products.

A tracial presentation is realized on C^n by diagonal matrix-unit families;
the second algebra's family is conjugated by a Haar unitary, which makes the
two families asymptotically free.  Meet projections (numerical subspace
intersections) then realize the discrete-part matrix units, and their
normalized ranks are compared against the exact symbolic predictions.

Everything is deterministic in (spec, config): one independent random stream
per seed, and a report merge that does not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import IllConditioned, NotTracial, SizeTooSmall
from .model import AlgebraSpec, is_tracial, scalar_atoms
from .report import StructureReport
from .structure import classify_free_product, select_max_atom
from .twoproj import pqp_law

__all__ = [
    "RmtConfig",
    "Realization",
    "MatrixUnitFamily",
    "RmtReport",
    "ReportRow",
    "Histogram",
    "haar_unitary",
    "realize",
    "meet",
    "nested_meet_f11",
    "verify",
]

GAP_MARGIN = 0.02  # empirical spectral gap is checked above x_hi + GAP_MARGIN
HIST_BINS = 80


@dataclass(frozen=True)
class RmtConfig:
    n: int = 1000
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    meet_cutoff: float = 1e-6
    atom_tolerance: float = 0.02

    def __post_init__(self):
        if self.n < 100:
            raise ValueError(f"matrix size n = {self.n} must be >= 100")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not (0 < self.meet_cutoff < 1):
            raise ValueError(f"meet cutoff {self.meet_cutoff} must be in (0, 1)")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed n x n unitary, deterministic in (n, seed).

    QR of a complex Ginibre matrix with the R-diagonal phases divided out;
    the phase correction makes the factorization unique, hence the
    distribution exactly invariant.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class MatrixUnitFamily:
    """Matrix units of one realized block: dim x dim units, each of rank
    ``multiplicity``, optionally conjugated by a global unitary."""

    n: int
    dim: int
    multiplicity: int
    row_indices: tuple[tuple[int, ...], ...]  # one index tuple per row
    unitary: Optional[np.ndarray] = None

    def unit(self, s: int, t: int) -> np.ndarray:
        """The matrix unit e_{st} as a dense n x n array."""
        e = np.zeros((self.n, self.n), dtype=complex)
        e[np.array(self.row_indices[s]), np.array(self.row_indices[t])] = 1.0
        if self.unitary is not None:
            e = self.unitary @ e @ self.unitary.conj().T
        return e

    def projection(self, s: int) -> np.ndarray:
        return self.unit(s, s)

    def unit_projection(self) -> np.ndarray:
        """Sum of the diagonal units: the block's unit."""
        e = np.zeros((self.n, self.n), dtype=complex)
        for rows in self.row_indices:
            e[np.array(rows), np.array(rows)] = 1.0
        if self.unitary is not None:
            e = self.unitary @ e @ self.unitary.conj().T
        return e


@dataclass(frozen=True)
class Realization:
    """One algebra realized on C^n.

    families[j] realizes spec.blocks[j]; diffuse summands only reserve
    diagonal mass (their index ranges are kept for completeness).
    """

    spec: AlgebraSpec
    n: int
    families: tuple[MatrixUnitFamily, ...]
    diffuse_indices: tuple[tuple[int, ...], ...]
    unitary: Optional[np.ndarray]

    def family(self, block_index: int) -> MatrixUnitFamily:
        return self.families[block_index]


def _allocate_ranks(units: Sequence[int], targets: Sequence[Fraction], n: int) -> list[int]:
    """Largest-remainder apportionment of n dimensions.

    units[k] is the granularity of component k (a d x d block moves in steps
    of d); targets[k] its exact dimension share.  Returns per-component unit
    counts with sum(count * unit) == n.
    """
    counts = [int(t // u) for t, u in zip(targets, units)]
    remainders = [t / u - c for t, u, c in zip(targets, units, counts)]
    leftover = n - sum(c * u for c, u in zip(counts, units))
    order = sorted(range(len(units)), key=lambda k: (-remainders[k], k))
    while leftover > 0:
        progress = False
        for k in order:
            if leftover == 0:
                break
            if units[k] <= leftover:
                counts[k] += 1
                leftover -= units[k]
                progress = True
        if not progress:
            break
    if leftover != 0:
        raise SizeTooSmall(
            f"matrix size n cannot be partitioned into block-compatible ranks "
            f"(left over: {leftover} of {n})"
        )
    if any(c == 0 for c in counts):
        raise SizeTooSmall(f"a component's rank rounds to 0 at n = {n}")
    return counts


def realize(a: AlgebraSpec, n: int, seed: int = 0, conjugate: bool = False) -> Realization:
    """Realize a tracial presentation on C^n.

    Each block of dimension d and mass m becomes d x d matrix units of
    multiplicity ~ m*n/d; tracial diffuse summands become reserved diagonal
    mass.  Ranks are balanced by largest remainder so the total is exactly n.
    When ``conjugate`` is set the whole family is rotated by
    haar_unitary(n, seed).
    """
    if not is_tracial(a):
        raise NotTracial(f"algebra {a.name!r} is not tracial; not realizable as traces")
    units = [b.dim for b in a.blocks] + [1] * len(a.diffuse)
    targets = [Fraction(b.mass) * n for b in a.blocks] + [d.weight * n for d in a.diffuse]
    counts = _allocate_ranks(units, targets, n)

    u = haar_unitary(n, seed) if conjugate else None
    families = []
    offset = 0
    for block, mult in zip(a.blocks, counts[: len(a.blocks)]):
        rows = tuple(
            tuple(range(offset + s * mult, offset + (s + 1) * mult))
            for s in range(block.dim)
        )
        families.append(MatrixUnitFamily(n, block.dim, mult, rows, u))
        offset += block.dim * mult
    diffuse_ranges = []
    for rank in counts[len(a.blocks):]:
        diffuse_ranges.append(tuple(range(offset, offset + rank)))
        offset += rank
    assert offset == n
    return Realization(a, n, tuple(families), tuple(diffuse_ranges), u)


def _eigh_product(p: np.ndarray, q: np.ndarray):
    m = p @ q @ p
    m = (m + m.conj().T) / 2.0
    return np.linalg.eigh(m)


def meet(p: np.ndarray, q: np.ndarray, delta: float = 1e-6) -> np.ndarray:
    """Numerical meet p ^ q: spectral projection of pqp above 1 - delta.

    For subspaces in generic position this is the exact intersection
    projection.  Eigenvalues inside the ambiguity band
    (1 - 1000*delta, 1 - delta] make the cutoff meaningless and raise
    IllConditioned instead of silently mis-ranking.
    """
    evals, evecs = _eigh_product(p, q)
    in_band = (evals > 1.0 - 1000.0 * delta) & (evals <= 1.0 - delta)
    if np.any(in_band):
        raise IllConditioned(
            f"{int(np.sum(in_band))} eigenvalue(s) inside the meet ambiguity band "
            f"(1 - {1000 * delta:g}, 1 - {delta:g}]"
        )
    keep = evecs[:, evals > 1.0 - delta]
    return keep @ keep.conj().T


def nested_meet_f11(p: np.ndarray, units: MatrixUnitFamily, delta: float = 1e-6) -> np.ndarray:
    """Realize the (1,1) matrix unit of the discrete-part block: conjugate
    every corner meet p ^ e_tt into the last diagonal corner, intersect them
    all, and rotate the result to the (1,1) corner."""
    d = units.dim
    last = d - 1
    result = None
    for t in range(d):
        m_t = units.unit(last, t) @ meet(p, units.projection(t), delta) @ units.unit(t, last)
        m_t = (m_t + m_t.conj().T) / 2.0
        result = m_t if result is None else meet(result, m_t, delta)
    return units.unit(0, last) @ result @ units.unit(last, 0)


# -- verification report -----------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    key: str
    description: str
    predicted: Optional[Fraction]
    per_seed: tuple[tuple[int, float], ...]
    mean: float
    spread: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "description": self.description,
            "predicted": None if self.predicted is None else str(self.predicted),
            "per_seed": [[s, v] for s, v in self.per_seed],
            "mean": self.mean,
            "spread": self.spread,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class Histogram:
    description: str
    edges: tuple[float, ...]
    counts: tuple[int, ...]

    def csv_rows(self) -> list[str]:
        rows = ["bin_left,bin_right,count"]
        for left, right, c in zip(self.edges[:-1], self.edges[1:], self.counts):
            rows.append(f"{left:.12g},{right:.12g},{c}")
        return rows

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "edges": list(self.edges),
            "counts": list(self.counts),
        }


@dataclass(frozen=True)
class RmtReport:
    config: RmtConfig
    rows: tuple[ReportRow, ...]
    histograms: tuple[Histogram, ...]
    seed_failures: tuple[tuple[int, str], ...]
    symbolic: StructureReport = field(repr=False)

    @property
    def ok(self) -> bool:
        return not self.seed_failures and all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "n": self.config.n,
            "seeds": list(self.config.seeds),
            "meet_cutoff": self.config.meet_cutoff,
            "atom_tolerance": self.config.atom_tolerance,
            "rows": [r.to_dict() for r in self.rows],
            "histograms": [h.to_dict() for h in self.histograms],
            "seed_failures": [[s, msg] for s, msg in self.seed_failures],
            "ok": self.ok,
        }


@dataclass
class _SeedResult:
    seed: int
    values: dict  # key -> (description, predicted, value, strict)
    spectra: dict  # description -> eigenvalue array
    failure: Optional[str] = None


def _top_atom_projection(real: Realization):
    atoms = scalar_atoms(real.spec)
    if not atoms:
        return None, None
    block_index, mass = atoms[0]
    return real.family(block_index).projection(0), mass


def _run_seed(a: AlgebraSpec, b: AlgebraSpec, symbolic: StructureReport,
              seed: int, config: RmtConfig) -> _SeedResult:
    n, delta = config.n, config.meet_cutoff
    result = _SeedResult(seed=seed, values={}, spectra={})
    try:
        ra = realize(a, n, seed, conjugate=False)
        rb = realize(b, n, seed, conjugate=True)
        reals = {1: ra, 2: rb}

        def record(key, description, predicted, value, strict=False):
            result.values[key] = (description, predicted, value, strict)

        pa, alpha = _top_atom_projection(ra)
        pb, beta = _top_atom_projection(rb)

        if symbolic.atoms and symbolic.atoms[0].source[0] == 0:
            # dimension-4 base case: meet and co-meet of the top atoms
            meet_pred = co_pred = Fraction(0)
            for blk in symbolic.atoms:
                if blk.source == (0, 0):
                    meet_pred = blk.total_weight
                elif blk.source == (0, 1):
                    co_pred = blk.total_weight
            inter = meet(pa, pb, delta)
            record("meet", "normalized rank of p ^ q", meet_pred,
                   float(np.trace(inter).real) / n)
            co = meet(np.eye(n) - pa, np.eye(n) - pb, delta)
            record("co_meet", "normalized rank of (1-p) ^ (1-q)", co_pred,
                   float(np.trace(co).real) / n)
        else:
            sel = select_max_atom(a, b)
            if symbolic.atoms:
                side = symbolic.atoms[0].source[0]
                p = pa if side == 2 else pb
                for blk in symbolic.atoms:
                    fam = reals[blk.source[0]].family(blk.source[1])
                    if blk.dim == 1:
                        emp = float(np.trace(meet(p, fam.projection(0), delta)).real) / n
                        record(f"atom[{blk.source[0]}.{blk.source[1]}]",
                               f"normalized rank of p ^ q (block {blk.source[1]}, "
                               f"side {blk.source[0]})",
                               blk.total_weight, emp)
                    else:
                        f11 = nested_meet_f11(p, fam, delta)
                        emp = float(np.trace(f11).real) / n
                        record(f"atom[{blk.source[0]}.{blk.source[1]}]",
                               f"normalized rank of f_11 ({blk.dim}x{blk.dim} block "
                               f"{blk.source[1]}, side {blk.source[0]})",
                               blk.per_entry_weights[0], emp)
            elif sel is not None:
                p = pa if sel.side == 1 else pb
                other_side = 3 - sel.side
                other = reals[other_side]
                for j, blk in enumerate(other.spec.blocks):
                    fam = other.family(j)
                    f11 = nested_meet_f11(p, fam, delta)
                    emp = float(np.trace(f11).real) / n
                    record(f"noatom[{other_side}.{j}]",
                           f"near-one fraction of the nested meet (block {j}, "
                           f"side {other_side})",
                           Fraction(0), emp)

        if pa is not None and pb is not None:
            evals, _ = _eigh_product(pa, pb)
            result.spectra["pqp"] = evals
            record("pqp_moment", "normalized trace of pqp vs alpha*beta",
                   alpha * beta, float(np.sum(evals)) / n)
            law = pqp_law(alpha, beta)
            gap_lo = law.support[1] + GAP_MARGIN
            gap_hi = 1.0 - delta
            if gap_lo < gap_hi:
                count = int(np.sum((evals > gap_lo) & (evals < gap_hi)))
                record("pqp_gap",
                       f"eigenvalues of pqp inside ({gap_lo:.6g}, {gap_hi:.6g})",
                       Fraction(0), float(count), strict=True)
    except IllConditioned as exc:
        result.failure = str(exc)
    return result


def _merge(results: list[_SeedResult], config: RmtConfig) -> tuple:
    """Order-independent aggregation of per-seed results."""
    results = sorted(results, key=lambda r: r.seed)
    completed = [r for r in results if r.failure is None]
    failures = tuple((r.seed, r.failure) for r in results if r.failure is not None)

    keys: dict[str, tuple] = {}
    for r in completed:
        for key, (desc, pred, _, strict) in r.values.items():
            keys.setdefault(key, (desc, pred, strict))

    rows = []
    for key in sorted(keys):
        desc, pred, strict = keys[key]
        per_seed = tuple(
            (r.seed, r.values[key][2]) for r in completed if key in r.values
        )
        vals = np.array([v for _, v in per_seed], dtype=float)
        mean = float(vals.mean()) if len(vals) else float("nan")
        spread = float(vals.max() - vals.min()) if len(vals) else float("nan")
        if strict:
            passed = bool(len(vals)) and bool(np.all(vals == 0.0))
            tolerance = 0.0
        else:
            tolerance = config.atom_tolerance
            passed = bool(len(vals)) and abs(mean - float(pred)) <= tolerance
        rows.append(ReportRow(key, desc, pred, per_seed, mean, spread, tolerance, passed))

    spectra: dict[str, np.ndarray] = {}
    for r in completed:
        for desc, evals in r.spectra.items():
            spectra[desc] = np.concatenate([spectra.get(desc, np.empty(0)), evals])
    histograms = []
    for desc in sorted(spectra):
        counts, edges = np.histogram(spectra[desc], bins=HIST_BINS, range=(-0.05, 1.05))
        histograms.append(Histogram(desc, tuple(edges.tolist()),
                                    tuple(int(c) for c in counts)))
    return tuple(rows), tuple(histograms), failures


def verify(a: AlgebraSpec, b: AlgebraSpec, config: RmtConfig = RmtConfig()) -> RmtReport:
    """Run the matrix-model check of the symbolic structure predictions.

    For every predicted atom block, the normalized rank of its realized
    (1,1) unit is compared with the exact state mass; when no atoms are
    predicted, the near-one spectral fraction of the corresponding nested
    meets must vanish.  Scalar-atom pairs additionally get pqp spectrum
    histograms, the first-moment check and a spectral-gap check above the
    law's support.
    """
    if not is_tracial(a):
        raise NotTracial(f"algebra {a.name!r} is not tracial")
    if not is_tracial(b):
        raise NotTracial(f"algebra {b.name!r} is not tracial")
    symbolic = classify_free_product(a, b)
    results = [_run_seed(a, b, symbolic, seed, config) for seed in config.seeds]
    rows, histograms, failures = _merge(results, config)
    return RmtReport(config, rows, histograms, failures, symbolic)
