"""Command-line surface of the sextic classifier.

Usage:
    sextic classify A18+A1
    sextic classify "2A9+A1" --json
    sextic discr E6
    sextic discr data/fixtures/M_4_2_5.gram
    sextic genus2 --det 8 --discr "<1/2>+<1/4>"
    sextic brown "<1/2>"
    sextic selftest --quick

Exit codes: 0 success, 1 invalid input, 2 bound exceeded, 3 internal inconsistency.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .classify import MAX_MU, rigid_isotopy_classes
from .config import Settings, load_settings
from .corpus import run_selftest
from .errors import DomainError, InternalInconsistency, SexticError
from .events import append_jsonl, run_record
from .fqf import brown_blocks, brown_gauss, direct_sum, format_form, parse_form
from .lattice import discriminant_form, read_gram
from .rank2 import enumerate_genus, has_disorienting_isometry, orthogonal_group, parse_reduced
from .report import ClassificationReport
from .rootdata import SingularitySet, component_discriminant
from .schema_validate import require_valid_report


def parse_singularities(text: str) -> SingularitySet:
    sigma = SingularitySet.parse(text)
    if sigma.mu > MAX_MU:
        raise DomainError(f"total Milnor number of {sigma} is {sigma.mu} > {MAX_MU}")
    return sigma


def banner(title: str) -> None:
    print(f"\n═══ {title} ═══", flush=True)


def emit_json(payload) -> None:
    print(json.dumps(payload, indent=2, ensure_ascii=False), flush=True)


# subcommands


def print_report(report: ClassificationReport) -> None:
    banner(f"{report.sigma}  (μ = {report.mu})")
    if not report.configurations:
        print("no realizable configuration", flush=True)
    for i, c in enumerate(report.configurations):
        print(f"\n[{i}] index {c.index}  kernel {c.kernel_invariants or '0'}  discr S̃ = {c.s_tilde_discr}", flush=True)
        g = c.complement.genus
        print(f"    complement genus ({g.signature[0]},{g.signature[1]}; {g.discriminant}), det {g.determinant}", flush=True)
        if c.complement.certificate is not None:
            cert = c.complement.certificate
            print(f"    uniqueness: {cert.unique_in_genus}, surjectivity: {cert.aut_onto}", flush=True)
        print(f"    {'N':<14} {'coset':>5}  {'symmetry':<12} reason", flush=True)
        print("    " + "─" * 56, flush=True)
        for t in c.types:
            print(f"    {t.N:<14} {t.coset_id:>5}  {t.symmetry:<12} {t.reason}", flush=True)
        flags = [f"reducible: {c.reducible}", f"abundant: {c.abundant}", f"classes: {c.class_count}"]
        if not c.types_certified:
            flags.append("type list not certified")
        print("    " + "  |  ".join(flags), flush=True)
    print(f"\nrigid isotopy classes: {report.class_count}  (irreducible: {report.irreducible_class_count})", flush=True)
    if report.zariski is not None:
        z = report.zariski
        print(f"virtual genus (floor convention): {z.virtual_genus}  [e={z.e}, a={z.a}, n={z.n}]", flush=True)


def cmd_classify(args: argparse.Namespace, settings: Settings) -> dict:
    sigma = parse_singularities(args.sigma)
    report = rigid_isotopy_classes(sigma, settings=settings)
    payload = require_valid_report(report.model_dump(mode="json"))
    if args.json:
        emit_json(payload)
    else:
        print_report(report)
    return {"class_count": payload["class_count"]}


def _discr_of(text: str):
    path = Path(text)
    if text.endswith(".gram") or path.is_file():
        return discriminant_form(read_gram(path)).form
    if text.strip().startswith("M"):
        return discriminant_form(parse_reduced(text).lattice).form
    sigma = SingularitySet.parse(text)
    return direct_sum(*(component_discriminant(s).form for s in sigma.components))


def cmd_discr(args: argparse.Namespace, settings: Settings) -> dict:
    text = format_form(_discr_of(args.target))
    if args.json:
        emit_json({"input": args.target, "discriminant": text})
    else:
        print(text, flush=True)
    return {}


def cmd_genus2(args: argparse.Namespace, settings: Settings) -> dict:
    target = parse_form(args.discr)
    if target.order != args.det:
        raise DomainError(f"|discr| = {target.order} does not match --det {args.det}")
    forms = enumerate_genus(target, max_order=settings.max_group_order)
    rows = []
    for m in forms:
        case = orthogonal_group(m)
        rows.append({"N": str(m), "case": case.tag, "order": case.order, "disorienting": has_disorienting_isometry(m)})
    if args.json:
        emit_json(rows)
    else:
        banner(f"genus (2,0; {format_form(target)})")
        if not rows:
            print("empty genus", flush=True)
        for row in rows:
            print(f"{row['N']:<14} O(N): {row['case']:<10} order {row['order']:>2}  disorienting: {row['disorienting']}", flush=True)
    return {}


def cmd_brown(args: argparse.Namespace, settings: Settings) -> dict:
    f = parse_form(args.form)
    gauss = brown_gauss(f, max_order=settings.max_group_order)
    blocks = brown_blocks(f, max_order=settings.max_group_order)
    if gauss != blocks:
        raise InternalInconsistency(f"Brown invariant of {args.form}: gauss {gauss} != blocks {blocks}")
    if args.json:
        emit_json({"gauss": gauss, "blocks": blocks})
    else:
        print(f"gauss: {gauss}, blocks: {blocks}", flush=True)
    return {}


def cmd_selftest(args: argparse.Namespace, settings: Settings) -> dict:
    results = run_selftest(settings, quick=args.quick)
    failed = [r for r in results if not r.passed]
    if args.json:
        emit_json([{"name": r.name, "passed": r.passed, "detail": r.detail, "asserted": r.asserted} for r in results])
    else:
        banner(f"selftest{' (quick)' if args.quick else ''}, seed {settings.seed}")
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            label = f"{r.name} [asserted]" if r.asserted else r.name
            print(f"{mark}  {label:<40} {r.detail}", flush=True)
        print(f"\n{len(results) - len(failed)}/{len(results)} checks passed", flush=True)
    if failed:
        raise InternalInconsistency(f"{len(failed)} selftest checks failed")
    return {}


COMMANDS = {
    "classify": cmd_classify,
    "discr": cmd_discr,
    "genus2": cmd_genus2,
    "brown": cmd_brown,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable output")
    common.add_argument("--max-group-order", type=int, default=None)
    common.add_argument("--max-work", type=int, default=None)
    common.add_argument("--debug-full-root-check", action="store_true", default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--config", type=Path, default=None, help="YAML settings file")
    common.add_argument("--no-log", action="store_true", help="Do not append to the event log")

    parser = argparse.ArgumentParser(prog="sextic", description="Rigid isotopy classification of simple plane sextics")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("classify", parents=[common], help="Classify a set of singularities")
    p.add_argument("sigma", help='Set of singularities, e.g. "2A9+A1"')
    p = sub.add_parser("discr", parents=[common], help="Discriminant form of a root system, M(a,b,c) or Gram file")
    p.add_argument("target")
    p = sub.add_parser("genus2", parents=[common], help="Positive definite rank-2 lattices with a given discriminant")
    p.add_argument("--det", type=int, required=True)
    p.add_argument("--discr", required=True)
    p = sub.add_parser("brown", parents=[common], help="Brown invariant, by Gauss sum and by blocks")
    p.add_argument("form")
    p = sub.add_parser("selftest", parents=[common], help="Run the acceptance corpus")
    p.add_argument("--quick", action="store_true")
    return parser


def _argument(args: argparse.Namespace) -> str:
    for name in ("sigma", "target", "form", "discr"):
        if getattr(args, name, None):
            return str(getattr(args, name))
    return ""


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    settings = None
    extra: dict = {}
    code = 0
    try:
        settings = load_settings(
            args.config,
            max_group_order=args.max_group_order,
            max_work=args.max_work,
            debug_full_root_check=args.debug_full_root_check,
            seed=args.seed,
            jobs=args.jobs,
        )
        extra = COMMANDS[args.command](args, settings)
    except SexticError as exc:
        print(f"error: {exc}", file=sys.stderr, flush=True)
        code = exc.exit_code
        extra = {"error": str(exc)}
    events = settings.events_file() if settings is not None and not args.no_log else None
    if events is not None:
        append_jsonl(events, run_record(args.command, _argument(args), started, code, **extra))
    return code
