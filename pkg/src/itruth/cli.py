"""Command-line driver.

Subcommands: validate, force, jump, lfp, embed, audit, transform,
search-discrepancy, enumerate.  Exit status 0 means the query was answered,
1 that an asserted property failed (witnesses are printed), 2 that the
input was unusable.  With --out DIR every subcommand writes a plain-text
table, a .jsonl machine mirror and, unless --no-figures, rendered figures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import compositional, fixedframe, report, s4, superval
from .engine import default_workers
from .kripke import (
    KripkeStructure,
    dump_structure,
    forces,
    forces_global,
    load_structure,
)
from .search import ClassSpec, enumerate_ei, enumerate_structures, search_discrepancy
from .syntax import Universe, code, decode, is_sentence, parse, pretty

PROPERTY_FAILED = 1
INPUT_ERROR = 2


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _load_formulas(path: str) -> list:
    out = []
    for lineno, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        f = parse(line)
        if not is_sentence(f):
            raise CliError(f"{path}:{lineno}: not a sentence: {line}")
        out.append(f)
    return out


def _load_structure(path: str) -> KripkeStructure:
    m, diags = load_structure(_read(path))
    if diags:
        raise CliError(f"{path}: invalid structure: {diags[0]}")
    return m


def _class_spec(args) -> ClassSpec:
    if not args.universe_file:
        raise CliError("this subcommand needs --universe-file")
    universe = Universe.from_formulas(_load_formulas(args.universe_file))
    return ClassSpec(args.max_worlds, universe, args.numeral_bound)


def _config(args) -> dict:
    # execution-only options (where to write, how many threads) do not shape
    # report content and stay out of the embedded configuration
    skip = ("func", "out", "no_figures", "workers")
    keep = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    keep["command"] = args.command
    return keep


def _emit(args, stem: str, rows, columns, figures=(), config_extra=None) -> None:
    """figures holds (name, builder) pairs; builders run only when writing."""
    for line in report.render_text(rows, columns).splitlines():
        print(line)
    if args.out:
        figs = [] if args.no_figures else [(name, build()) for name, build in figures]
        config = _config(args)
        if config_extra:
            config.update(config_extra)
        paths = report.write_report(args.out, stem, config, rows, columns, figs)
        print(f"wrote {', '.join(str(p) for p in paths)}")


def _spec_record(spec: ClassSpec) -> dict:
    return {
        "class_max_worlds": spec.max_worlds,
        "class_numeral_bound": spec.numeral_bound,
        "class_universe_codes": sorted(spec.universe.codes),
    }


# ---------------------------------------------------------------------------
# Subcommands


def cmd_validate(args) -> int:
    m, diags = load_structure(_read(args.structure))
    rows = [
        {"kind": d.kind, "detail": d.message, "witness": str(d.witness)} for d in diags
    ] or [{"kind": "ok", "detail": "structure is persistent", "witness": ""}]
    figures = [("structure", lambda: report.fig_structure(m, "validated structure"))]
    _emit(args, "validate", rows, ["kind", "detail", "witness"], figures)
    return PROPERTY_FAILED if diags else 0


def cmd_force(args) -> int:
    m = _load_structure(args.structure)
    f = parse(args.formula)
    if args.mode == "standard":
        v = forces(m, args.world, f)
        trace = ""
    elif args.mode == "global":
        v = forces_global(m, args.world, f)
        trace = ""
    elif args.mode == "csv":
        spec = _class_spec(args)
        cv = compositional.csv_forces(m, args.world, f, spec, args.workers)
        v, trace = cv.plain(), cv.trace
    elif args.mode == "scheme":
        spec = _class_spec(args)
        v = superval.scheme_forces(args.scheme, m, args.world, f, spec, args.workers)
        trace = args.scheme
    else:
        raise CliError(f"unknown mode {args.mode}")
    rows = [
        {
            "world": args.world,
            "formula": pretty(f),
            "verdict": "holds" if v.holds else "fails",
            "exactness": v.exactness,
            "clause": trace,
        }
    ]
    _emit(args, "force", rows, ["world", "formula", "verdict", "exactness", "clause"])
    return 0


def _jump_rows(rep, spec) -> list[dict]:
    rows = []
    for c in spec.universe.codes:
        row = {
            "code": c,
            "formula": pretty(spec.universe.formula(c)),
            "member": c in rep.output_codes,
            "exactness": "bounded-approximate" if c in rep.inexact_codes else "exact",
            "witness_world": "",
            "replay": "",
        }
        wit = rep.witnesses.get(c)
        if wit is not None:
            row["witness_world"] = wit.world
            row["replay"] = (
                f"itruth force --mode {wit.mode} --world {wit.world} "
                f"--formula '{pretty(wit.formula)}' --structure witness_{c}.struct"
            )
        rows.append(row)
    return rows


def _write_witnesses(args, rep) -> None:
    if not args.out:
        return
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for c, wit in sorted(rep.witnesses.items()):
        (outdir / f"witness_{c}.struct").write_text(dump_structure(wit.structure))


def cmd_jump(args) -> int:
    spec = _class_spec(args)
    x = frozenset(code(f) for f in _load_formulas(args.set_file)) if args.set_file else frozenset()
    scheme = args.scheme
    if scheme == "csv":
        rep = compositional.jump_csv(x, spec, args.workers)
    elif scheme == "svi2":
        rep = compositional.jump_svi2(x, spec, args.workers)
    elif scheme == "svi-prime":
        rep = superval.jump_prime(x, spec, args.workers)
    else:
        rep = superval.jump(scheme, x, spec, args.workers)
    rows = _jump_rows(rep, spec)
    member_rows = [
        {"check": "member" if r["member"] else "excluded", "ok": r["member"]}
        for r in rows
    ]
    figures = [("membership", lambda: report.fig_check_summary(
        member_rows, f"jump {rep.scheme}: membership"))]
    _emit(args, "jump", rows,
          ["code", "formula", "member", "exactness", "witness_world", "replay"],
          figures, config_extra=_spec_record(spec))
    _write_witnesses(args, rep)
    if rep.vacuous:
        print("note: no admissible extension pair exists for this input set")
    return 0


def cmd_lfp(args) -> int:
    spec = _class_spec(args)
    seed = frozenset(code(f) for f in _load_formulas(args.seed_file)) if args.seed_file else frozenset()
    if args.scheme == "csv":
        res = compositional.lfp_csv(spec, seed, args.workers)
    else:
        res = superval.lfp(args.scheme, spec, seed, args.workers)
    rows = []
    for c in spec.universe.codes:
        rows.append(
            {
                "code": c,
                "formula": pretty(spec.universe.formula(c)),
                "member": c in res.fixed,
                "exactness": "bounded-approximate"
                if c in res.final_report.inexact_codes
                else "exact",
            }
        )
    sizes = [len(s) for s in res.trace]
    figures = [("trace", lambda: report.fig_trace(sizes, f"lfp {res.scheme}"))]
    extra = _spec_record(spec)
    extra["fixed_point_codes"] = sorted(res.fixed)
    extra["steps"] = res.steps
    _emit(args, "lfp", rows, ["code", "formula", "member", "exactness"], figures,
          config_extra=extra)
    print(f"stabilised after {res.steps} steps; {len(res.fixed)} members")
    return 0


def cmd_embed(args) -> int:
    src = _load_structure(args.source)
    tgt = _load_structure(args.target)
    maps = enumerate_ei(src, tgt)
    rows = [
        {"index": i, "mapping": " ".join(f"{a}->{b}" for a, b in wm.mapping)}
        for i, wm in enumerate(maps)
    ] or [{"index": "-", "mapping": "(no embedding)"}]
    _emit(args, "embed", rows, ["index", "mapping"])
    print(f"{len(maps)} embedding(s)")
    return 0


def cmd_audit(args) -> int:
    spec = _class_spec(args)
    theory = args.theory
    if theory in superval.THEORY_SCHEME:
        if args.structure:
            m = _load_structure(args.structure)
        else:
            scheme = superval.THEORY_SCHEME[theory]
            res = superval.lfp(scheme, spec, (), args.workers)
            ctx_one = res.fixed
            m = KripkeStructure(
                ("w0",), frozenset({("w0", "w0")}), (ctx_one,), spec.numeral_bound
            )
        rep = superval.audit_axioms(theory, m, spec, workers=args.workers)
        rows = [
            {"check": r.check, "instance": r.subject, "ok": r.ok,
             "exactness": "exact" if r.exact else "bounded-approximate", "note": r.note}
            for r in rep.rows
        ]
        rows.insert(0, {"check": "precondition", "instance": "worlds carry fixed points",
                        "ok": rep.precondition_ok, "exactness": "exact", "note": ""})
        ok = rep.ok
        skipped = rep.skipped
    elif theory == "CSV":
        if args.set_file:
            x = frozenset(code(f) for f in _load_formulas(args.set_file))
        else:
            x = compositional.lfp_csv(spec, (), args.workers).fixed
        rep = compositional.diagnose_fixed_point_csv(x, spec, args.workers)
        rows = [
            {"check": r.check, "instance": r.subject, "ok": r.ok,
             "exactness": "exact" if r.exact else "bounded-approximate", "note": r.note}
            for r in rep.rows
        ]
        ok = rep.ok
        skipped = ()
    elif theory == "FF":
        if not args.structure:
            raise CliError("audit --theory FF needs --structure (the frame carrier)")
        m = _load_structure(args.structure)
        fi, _ = fixedframe.lfp_ff(fixedframe.FrameInterpretation.of(m), spec.universe)
        reports = [
            fixedframe.check_intersection_theorem(fi, spec),
            fixedframe.ff_transparency(fi, spec.universe),
            fixedframe.check_svi_m_matches_ff(fi.as_structure(), spec),
        ]
        for w in fi.worlds:
            print(f"fixed interpretation {w}: {sorted(fi.interp_of(w))}")
        isv, pre = fixedframe.audit_ff_fixed_point(fi, spec, args.workers)
        rows = [{"check": "precondition", "instance": "frame-jump fixed point",
                 "ok": pre, "exactness": "exact", "note": ""}]
        for r in reports:
            for row in r.rows:
                rows.append({"check": row.check, "instance": row.subject, "ok": row.ok,
                             "exactness": "exact" if row.exact else "bounded-approximate",
                             "note": row.note})
        for row in isv.rows:
            rows.append({"check": row.check, "instance": row.subject, "ok": row.ok,
                         "exactness": "exact" if row.exact else "bounded-approximate",
                         "note": row.note})
        ok = pre and all(r["ok"] for r in rows)
        skipped = isv.skipped
    else:
        raise CliError(f"unknown theory {theory}")
    figures = [("summary", lambda: report.fig_check_summary(rows, f"audit {theory}"))]
    _emit(args, "audit", rows, ["check", "instance", "ok", "exactness", "note"], figures)
    for s in skipped:
        print(f"skipped: {s}")
    return 0 if ok else PROPERTY_FAILED


def cmd_transform(args) -> int:
    kind = "s4" if args.to == "g" else "g"
    m, diags = s4.load_model(_read(args.model), kind)
    if diags:
        raise CliError(f"{args.model}: invalid model: {diags[0]}")
    out = s4.to_g_model(m) if args.to == "g" else s4.to_s4_model(m)
    text = s4.dump_model(out)
    print(text, end="")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"transform_{args.to}.model").write_text(text)
    return 0


def cmd_search_discrepancy(args) -> int:
    if args.domain == "constant":
        spec = _class_spec(args)
        found = search_discrepancy(spec)
        rows = [
            {"structure": dump_structure(m).replace("\n", "; "), "world": w,
             "formula": pretty(f), "standard": sv.holds, "global": gv.holds}
            for m, w, f, sv, gv in found
        ] or [{"structure": "(none)", "world": "", "formula": "",
               "standard": "", "global": ""}]
        _emit(args, "discrepancy", rows,
              ["structure", "world", "formula", "standard", "global"])
        print(f"{len(found)} disagreement(s) between standard and global forcing")
    else:
        forms = [f for f in s4.corpus() if "exists" in s4.format_modal(f)]
        signature: dict[str, int] = {}
        for f in forms:
            signature.update(s4.formula_signature(f))
        found = s4.search_exists_clause_discrepancy(
            signature, forms, args.max_worlds, args.max_domain
        )
        rows = [
            {"model": s4.dump_model(m).replace("\n", "; "), "world": w,
             "formula": s4.format_modal(f), "base": b, "upper": u}
            for m, w, f, b, u in found
        ] or [{"model": "(none)", "world": "", "formula": "", "base": "", "upper": ""}]
        _emit(args, "discrepancy", rows, ["model", "world", "formula", "base", "upper"])
        print(f"{len(found)} disagreement(s) between existential-clause readings")
    return 0


def cmd_enumerate(args) -> int:
    spec = _class_spec(args)
    rows = []
    count = 0
    for m in enumerate_structures(spec):
        count += 1
        if args.limit and count > args.limit:
            continue
        rows.append(
            {
                "index": count - 1,
                "worlds": len(m.worlds),
                "order": " ".join(f"{u}<={v}" for u, v in sorted(m.order) if u != v),
                "interpretation": " | ".join(
                    "{" + ",".join(pretty(decode(c)) for c in sorted(s)) + "}"
                    for s in m.interp
                ),
            }
        )
    _emit(args, "enumerate", rows, ["index", "worlds", "order", "interpretation"])
    print(f"{count} structure(s) in the class")
    return 0


# ---------------------------------------------------------------------------


def _add_class_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-worlds", type=int, default=2)
    p.add_argument("--universe-file")
    p.add_argument("--numeral-bound", type=int, default=4)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="directory for report files")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: ITRUTH_WORKERS or 1)")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="itruth",
        description="Workbench for supervaluational truth over intuitionistic Kripke structures",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a structure file")
    p.add_argument("--structure", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("force", help="evaluate a forcing query")
    p.add_argument("--mode", choices=("standard", "global", "csv", "scheme"),
                   default="standard")
    p.add_argument("--scheme", choices=superval.SCHEMES, default="svi")
    p.add_argument("--structure", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--formula", required=True)
    _add_class_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_force)

    p = sub.add_parser("jump", help="apply a jump operator to a sentence set")
    p.add_argument("--scheme",
                   choices=("svi", "svi-prime", "vbi", "vci", "mci", "csv", "svi2"),
                   required=True)
    p.add_argument("--set-file")
    _add_class_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_jump)

    p = sub.add_parser("lfp", help="iterate a jump to its least fixed point")
    p.add_argument("--scheme", choices=("svi", "vbi", "vci", "mci", "csv"),
                   required=True)
    p.add_argument("--seed-file")
    _add_class_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_lfp)

    p = sub.add_parser("embed", help="enumerate embeddings between two structures")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("audit", help="semantic audit of a theory at a fixed point")
    p.add_argument("--theory", choices=("ISV", "IVB", "IVF", "IMC", "CSV", "FF"),
                   required=True)
    p.add_argument("--structure")
    p.add_argument("--set-file")
    _add_class_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("transform", help="translate a model between the two semantics")
    p.add_argument("--to", choices=("g", "s4"), required=True)
    p.add_argument("--model", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("search-discrepancy",
                       help="compare forcing relations over a bounded class")
    p.add_argument("--domain", choices=("constant", "expanding"), default="constant")
    p.add_argument("--max-domain", type=int, default=2)
    _add_class_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_search_discrepancy)

    p = sub.add_parser("enumerate", help="stream the bounded structure class")
    p.add_argument("--limit", type=int, default=50)
    _add_class_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is None:
        args.workers = default_workers()
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except Exception as exc:  # syntax, structure, scheme errors carry context
        name = type(exc).__name__
        if name in ("ParseError", "StructureError", "SchemeError", "SeedError",
                    "UniverseError", "FrameError", "ModelError", "CodeError",
                    "DecodeError", "EvalTermError", "CliError"):
            print(f"error: {exc}", file=sys.stderr)
            return INPUT_ERROR
        raise


if __name__ == "__main__":
    sys.exit(main())
