"""Command-line front end.

Subcommands: ``compute`` (symbolic structure report), ``verify`` (symbolic
cross-check plus the matrix-model run), ``sweep`` (vary one rational
parameter and emit CSV), ``explain`` (print the derivation trace).

Exit codes: 0 success, 1 validation/parse error, 2 verification mismatch,
3 unsupported input, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .abelian import cross_check
from .errors import (
    IllConditioned,
    InternalInvariantViolation,
    UnsupportedInput,
    ValidationError,
)
from .model import (
    AlgebraSpec,
    dimension,
    parse_rational,
    parse_spec,
    spec_from_dict,
)
from .modular import CyclicGroup, DenseGroup, TypeII1, TypeIII, TypeIII1
from .report import (
    Absent,
    FactorKind,
    FlagStatus,
    NonFactorDim4,
    StructureReport,
    report_to_dict,
)
from .rmt import RmtConfig, verify as rmt_verify
from .structure import classify_free_product

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_MISMATCH = 2
EXIT_UNSUPPORTED = 3
EXIT_INTERNAL = 4


def _load_spec(path: str) -> AlgebraSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    return parse_spec(text)


def _type_string(report: StructureReport) -> str:
    kind = report.continuous.kind
    if isinstance(kind, FactorKind):
        ft = kind.factor_type
        if isinstance(ft, TypeII1):
            return "II1"
        if isinstance(ft, TypeIII):
            return f"III_{ft.lam}"
        return "III1"
    if isinstance(kind, NonFactorDim4):
        return "non_factor_dim4"
    return "absent"


def _flag_text(flag: FlagStatus) -> str:
    if flag.status == "unknown":
        return "unknown"
    word = "proven" if flag.status == "proven" else "claimed elsewhere"
    return f"{word} [{flag.citation}]"


def _human_report(report: StructureReport) -> str:
    lines = []
    if report.atoms:
        lines.append("M_d (discrete multi-matrix part):")
        for blk in report.atoms:
            weights = ", ".join(str(w) for w in blk.per_entry_weights)
            lines.append(
                f"  {blk.dim}x{blk.dim} block (source side {blk.source[0]}, "
                f"block {blk.source[1]}): per-entry weights [{weights}], "
                f"total {blk.total_weight}  [Eq. (4.2); Eq. (4.4)]"
            )
    else:
        lines.append("M_d = 0 (no discrete part)  [Thm 4.1 (otherwise M_d = 0)]")
    c = report.continuous
    lines.append(f"M_c (continuous part): weight {c.weight}")
    kind = c.kind
    if isinstance(kind, FactorKind):
        lines.append(f"  type: {_type_string(report)} factor  [Thm 3.4]")
        t = c.t_set
        from .modular import AllReals, Lattice

        if isinstance(t, AllReals):
            lines.append("  T-set: all of R  [Thm 3.4]")
        elif isinstance(t, Lattice):
            lines.append(f"  T-set: (2*pi/log(1/({t.lam}))) * Z  [Thm 3.4]")
        else:
            lines.append("  T-set: {0}  [Thm 3.4]")
        lines.append(f"  full (M_c' cap M_c^omega = C): {_flag_text(c.full)}")
        lines.append(
            f"  trivial asymptotic centralizer: {_flag_text(c.asymptotic_centralizer_trivial)}"
        )
        lines.append(f"  prime: {_flag_text(c.prime)}")
        lines.append(
            "  no Cartan subalgebra in non-hyperfinite subalgebras: "
            + _flag_text(c.no_cartan_in_nonhyperfinite)
        )
        lines.append(
            f"  state centralizer ergodic: {_flag_text(c.state_centralizer_ergodic)}"
        )
        g = c.sd_group.group
        if isinstance(g, CyclicGroup):
            gtext = f"cyclic, generated by {g.generator}"
        elif isinstance(g, DenseGroup):
            gtext = "dense"
        else:
            gtext = "trivial"
        lines.append(f"  Sd group: {gtext} ({_flag_text(c.sd_group.status)})")
    elif isinstance(kind, NonFactorDim4):
        lines.append(
            "  kind: non-factor continuous part of the dimension-4 base case "
            "[two-projections structure theorem]"
        )
    else:
        lines.append("  kind: absent (scalar passthrough)")
    lines.append(f"amenable: {'yes' if report.amenable else 'no'}  [Remark 4.2(5)]")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_compute(args) -> int:
    a = _load_spec(args.spec_a)
    b = _load_spec(args.spec_b)
    report = classify_free_product(a, b)
    if args.format == "json":
        _emit(json.dumps(report_to_dict(report), indent=2), args.out)
    else:
        _emit(_human_report(report), args.out)
    return EXIT_OK


def _cmd_explain(args) -> int:
    a = _load_spec(args.spec_a)
    b = _load_spec(args.spec_b)
    report = classify_free_product(a, b)
    lines = ["derivation trace:"]
    for step in report.trace:
        lines.append(f"  - {step.condition}")
        lines.append(f"      => {step.outcome}  [{step.citation}]")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    lines.append("")
    lines.append(_human_report(report))
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    a = _load_spec(args.spec_a)
    b = _load_spec(args.spec_b)
    out: dict = {}
    failed = False

    abelian_applicable = (
        not a.geometric_blocks
        and not a.diffuse
        and not b.geometric_blocks
        and not b.diffuse
        and all(blk.dim == 1 for blk in a.blocks)
        and all(blk.dim == 1 for blk in b.blocks)
        and dimension(a) + dimension(b) >= 5
    )
    if abelian_applicable:
        result = cross_check(a, b)
        out["symbolic_cross_check"] = {
            "agree": result.agree,
            "oracle_masses": [str(m) for m in result.oracle_masses],
            "closed_form_masses": [str(m) for m in result.closed_form_masses],
        }
        if not result.agree:
            failed = True
    else:
        out["symbolic_cross_check"] = {
            "skipped": "inputs are not purely abelian with dimension sum >= 5"
        }

    if not args.symbolic_only:
        seeds = tuple(int(s) for s in args.seeds.split(",")) if args.seeds else (1, 2, 3, 4, 5)
        config = RmtConfig(n=args.n, seeds=seeds, atom_tolerance=args.tol)
        rreport = rmt_verify(a, b, config)
        out["matrix_model"] = rreport.to_dict()
        if args.hist_dir:
            hist_dir = Path(args.hist_dir)
            hist_dir.mkdir(parents=True, exist_ok=True)
            for h in rreport.histograms:
                safe = "".join(ch if ch.isalnum() else "_" for ch in h.description)
                (hist_dir / f"{safe}.csv").write_text(
                    "\n".join(h.csv_rows()) + "\n", encoding="utf-8"
                )
        if not rreport.ok:
            failed = True

    _emit(json.dumps(out, indent=2), args.out)
    return EXIT_MISMATCH if failed else EXIT_OK


def _set_and_renormalize(doc: dict, expr: str, value: Fraction) -> dict:
    """Set one rational mass parameter and scale all other mass-carrying
    entries of the same algebra so the total stays exactly 1."""
    import copy
    import re

    m = re.fullmatch(
        r"(blocks\[(\d+)\]\.weights\[(\d+)\])|(geometric_blocks\[(\d+)\]\.head)"
        r"|(diffuse\[(\d+)\]\.weight)",
        expr.strip(),
    )
    if not m:
        raise ValidationError(
            f"bad --param expression {expr!r}; expected blocks[i].weights[j], "
            "geometric_blocks[i].head or diffuse[i].weight"
        )
    doc = copy.deepcopy(doc)

    def get_set(setter_value=None):
        try:
            if m.group(1):
                arr = doc["blocks"][int(m.group(2))]["weights"]
                idx = int(m.group(3))
                if setter_value is None:
                    return parse_rational(arr[idx])
                arr[idx] = str(setter_value)
            elif m.group(4):
                entry = doc["geometric_blocks"][int(m.group(5))]
                if setter_value is None:
                    return parse_rational(entry["head"])
                entry["head"] = str(setter_value)
            else:
                entry = doc["diffuse"][int(m.group(7))]
                if setter_value is None:
                    return parse_rational(entry["weight"])
                entry["weight"] = str(setter_value)
        except (KeyError, IndexError):
            raise ValidationError(f"--param {expr!r} does not address the template") from None

    old = get_set()
    if not (0 < value < 1):
        raise ValidationError(f"swept value {value} must be in (0, 1)")
    if old == 1:
        raise ValidationError("cannot renormalize: the varied weight carries all the mass")
    scale = (1 - value) / (1 - old)

    def rescale(x_str):
        return str(parse_rational(x_str) * scale)

    for i, blk in enumerate(doc.get("blocks", [])):
        for j in range(len(blk["weights"])):
            if not (m.group(1) and i == int(m.group(2)) and j == int(m.group(3))):
                blk["weights"][j] = rescale(blk["weights"][j])
    for i, geo in enumerate(doc.get("geometric_blocks", [])):
        if not (m.group(4) and i == int(m.group(5))):
            geo["head"] = rescale(geo["head"])
    for i, dif in enumerate(doc.get("diffuse", [])):
        if not (m.group(6) and i == int(m.group(7))):
            dif["weight"] = rescale(dif["weight"])
    get_set(setter_value=value)
    return doc


def _cmd_sweep(args) -> int:
    try:
        template = json.loads(Path(args.spec_a).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read template {args.spec_a}: {exc}") from None
    b = _load_spec(args.spec_b)
    start = parse_rational(args.from_)
    stop = parse_rational(args.to)
    step = parse_rational(args.step)
    if step <= 0:
        raise ValidationError(f"--step must be > 0, got {step}")

    rows = ["param,atom_total,atom_masses,type"]
    x = start
    while x <= stop:
        doc = _set_and_renormalize(template, args.param, x)
        a = spec_from_dict(doc)
        report = classify_free_product(a, b)
        masses = ";".join(str(blk.total_weight) for blk in report.atoms)
        rows.append(f"{x},{report.atom_total},{masses},{_type_string(report)}")
        x += step
    _emit("\n".join(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freefactor",
        description="Exact structure of free products of presented algebras, "
        "with a random-matrix verification harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_specs(p):
        p.add_argument("spec_a", help="path to the first algebra spec (JSON)")
        p.add_argument("spec_b", help="path to the second algebra spec (JSON)")
        p.add_argument("--out", default=None, help="write output to this path")

    p_compute = sub.add_parser("compute", help="symbolic structure report")
    add_specs(p_compute)
    p_compute.add_argument("--format", choices=["human", "json"], default="human")
    p_compute.set_defaults(func=_cmd_compute)

    p_verify = sub.add_parser("verify", help="cross-check and matrix-model run")
    add_specs(p_verify)
    p_verify.add_argument("--n", type=int, default=1000, help="matrix size")
    p_verify.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_verify.add_argument("--tol", type=float, default=0.02, help="atom tolerance")
    p_verify.add_argument(
        "--symbolic-only", action="store_true", help="skip the matrix-model run"
    )
    p_verify.add_argument(
        "--hist-dir", default=None, help="directory for histogram CSV export"
    )
    p_verify.set_defaults(func=_cmd_verify)

    p_sweep = sub.add_parser("sweep", help="vary one rational parameter, emit CSV")
    add_specs(p_sweep)
    p_sweep.add_argument("--param", required=True, help="e.g. blocks[0].weights[0]")
    p_sweep.add_argument("--from", dest="from_", required=True, help="start value p/q")
    p_sweep.add_argument("--to", required=True, help="end value p/q (inclusive)")
    p_sweep.add_argument("--step", required=True, help="step p/q (> 0)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_explain = sub.add_parser("explain", help="print the derivation trace")
    add_specs(p_explain)
    p_explain.set_defaults(func=_cmd_explain)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except UnsupportedInput as exc:
        print(f"unsupported input: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except IllConditioned as exc:
        print(f"verification aborted: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except InternalInvariantViolation as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
