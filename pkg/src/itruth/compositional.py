"""Compositional supervaluations over the global forcing relation.

csv-forcing is defined clause by clause: atoms are evaluated globally (which
for atoms is local), disjunction and the existential quantifier look at all
accessible worlds, conjunction is local, the universal quantifier runs over
numerals at the current world, and only the conditional is supervaluational:
it requires global forcing of the whole conditional at the image of the
world under every embedding into every class structure.

The jump built from csv-forcing coincides with the plain supervaluational
jump taken over global forcing (jump_svi2); both are computed here by
independent code paths and their pointwise equality is part of the
acceptance surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import ClassContext, context
from .kripke import ForcingVerdict, KripkeStructure, forces_all
from .search import ClassSpec, enumerate_ei
from .superval import (
    CheckReport,
    CheckRow,
    ExclusionWitness,
    JumpReport,
    LfpResult,
    SeedError,
    consistency_sentence,
    hat_axiom_candidates,
    transparency_pairs,
)
from .syntax import (
    BOT,
    And,
    Bottom,
    Eq,
    Exists,
    FnApp,
    Forall,
    Formula,
    Imp,
    Num,
    Or,
    Tr,
    Var,
    code_formula,
    code_term,
    decode,
    eval_term,
    free_vars,
    iff,
    neg,
    neg_code,
    pretty,
    substitute,
)


@dataclass(frozen=True)
class CsvVerdict:
    holds: bool
    exact: bool
    trace: str  # the clause that decided the verdict

    def __bool__(self) -> bool:
        return self.holds

    def plain(self) -> ForcingVerdict:
        return ForcingVerdict(self.holds, self.exact)


def _combine_and(parts: Sequence[CsvVerdict], trace: str) -> CsvVerdict:
    holds = all(p.holds for p in parts)
    if holds:
        return CsvVerdict(True, all(p.exact for p in parts), trace)
    return CsvVerdict(False, any(p.exact and not p.holds for p in parts), trace)


def _combine_or(parts: Sequence[CsvVerdict], trace: str) -> CsvVerdict:
    holds = any(p.holds for p in parts)
    if holds:
        return CsvVerdict(True, any(p.exact and p.holds for p in parts), trace)
    return CsvVerdict(False, all(p.exact for p in parts), trace)


class _CsvEval:
    """csv evaluation over all worlds of one structure, memoized.

    The conditional clause scans the class: for every embedding of the
    structure into a class member, global forcing of the conditional at the
    image world.  One-world sources short-circuit to an interpretation-mask
    scan.
    """

    def __init__(self, m: KripkeStructure, spec: ClassSpec):
        self.m = m
        self.spec = spec
        self.ctx = context(spec)
        self.n = len(m.worlds)
        idx = {w: i for i, w in enumerate(m.worlds)}
        self.above = tuple(
            tuple(idx[v] for v in m.worlds if m.le(w, v)) for w in m.worlds
        )
        self.memo: dict[Formula, tuple[CsvVerdict, ...]] = {}
        self._images: list[list[tuple[int, ...]]] | None = None

    def _image_tuples(self) -> list[list[tuple[int, ...]]]:
        """Per class structure: the image tuples of all embeddings of m."""
        if self._images is None:
            ctx = self.ctx
            si = ctx.index.get(self.m)
            out = []
            for ti, target in enumerate(ctx.structures):
                if si is not None:
                    out.append(list(ctx.ei_maps(si, ti)))
                else:
                    t_idx = {v: i for i, v in enumerate(target.worlds)}
                    out.append(
                        [
                            tuple(t_idx[b] for _, b in wm.mapping)
                            for wm in enumerate_ei(self.m, target)
                        ]
                    )
            self._images = out
        return self._images

    def eval(self, f: Formula) -> tuple[CsvVerdict, ...]:
        got = self.memo.get(f)
        if got is None:
            got = self._eval(f)
            self.memo[f] = got
        return got

    def _eval(self, f: Formula) -> tuple[CsvVerdict, ...]:
        if isinstance(f, (Bottom, Eq, Tr)):
            base = forces_all(self.m, f, "global")
            return tuple(CsvVerdict(v.holds, v.exact, "atom-global") for v in base)
        if isinstance(f, And):
            a, b = self.eval(f.left), self.eval(f.right)
            return tuple(_combine_and((a[i], b[i]), "and-local") for i in range(self.n))
        if isinstance(f, Or):
            a, b = self.eval(f.left), self.eval(f.right)
            return tuple(
                _combine_or(
                    (
                        _combine_and([a[j] for j in self.above[i]], "or-global"),
                        _combine_and([b[j] for j in self.above[i]], "or-global"),
                    ),
                    "or-global",
                )
                for i in range(self.n)
            )
        if isinstance(f, Imp):
            return self._eval_imp(f)
        if isinstance(f, Forall):
            insts, cut = self._instances(f)
            tail = (CsvVerdict(True, False, "forall-numeral"),) if cut else ()
            return tuple(
                _combine_and(tuple(row[i] for row in insts) + tail, "forall-numeral")
                for i in range(self.n)
            )
        if isinstance(f, Exists):
            insts, cut = self._instances(f)
            tail = (CsvVerdict(False, False, "exists-global"),) if cut else ()
            per_world = tuple(
                _combine_or(tuple(row[i] for row in insts) + tail, "exists-global")
                for i in range(self.n)
            )
            return tuple(
                _combine_and([per_world[j] for j in self.above[i]], "exists-global")
                for i in range(self.n)
            )
        raise TypeError(f"not a formula: {f!r}")

    def _instances(self, f: Forall | Exists) -> tuple[list[tuple[CsvVerdict, ...]], bool]:
        if f.var not in free_vars(f.body):
            return [self.eval(f.body)], False
        rows = [
            self.eval(substitute(f.body, f.var, Num(n)))
            for n in range(self.m.numeral_bound + 1)
        ]
        return rows, True

    def _eval_imp(self, f: Imp) -> tuple[CsvVerdict, ...]:
        ctx = self.ctx
        one_world = self.n == 1
        out = []
        if one_world:
            x_mask = ctx.mask_of(self.m.interp[0] & set(ctx.universe.codes))
            if self.m.interp[0] - set(ctx.universe.codes):
                # codes outside the universe can never be included in a class
                # interpretation, so no embedding exists and the clause is vacuous
                return (CsvVerdict(True, True, "imp-supervaluational"),)
            verdicts = []
            for si, wi in ctx.admissible_pairs(x_mask, "svi"):
                verdicts.append(
                    CsvVerdict(
                        *_as_pair(ctx.verdicts(si, f, "global").at(wi)),
                        "imp-supervaluational",
                    )
                )
            return (_combine_and(verdicts, "imp-supervaluational"),)
        images = self._image_tuples()
        for i in range(self.n):
            verdicts = []
            for ti, tuples in enumerate(images):
                for tup in tuples:
                    v = ctx.verdicts(ti, f, "global").at(tup[i])
                    verdicts.append(CsvVerdict(v.holds, v.exact, "imp-supervaluational"))
            out.append(_combine_and(verdicts, "imp-supervaluational"))
        return tuple(out)


def _as_pair(v: ForcingVerdict) -> tuple[bool, bool]:
    return v.holds, v.exact


def csv_forces(
    m: KripkeStructure, w: str, f: Formula, spec: ClassSpec, workers: int | None = None
) -> CsvVerdict:
    """csv-forcing of f at world w of m, relative to the class of spec."""
    wi = m.index(w)
    ctx = context(spec)
    si = ctx.index.get(m)
    if si is not None:
        return _csv_table(ctx, spec, si, f)[wi]
    return _CsvEval(m, spec).eval(f)[wi]


def _csv_table(ctx: ClassContext, spec: ClassSpec, si: int, f: Formula) -> tuple[CsvVerdict, ...]:
    cache = ctx.cache.setdefault("csv_eval", {})
    ev = cache.get(si)
    if ev is None:
        ev = _CsvEval(ctx.structures[si], spec)
        cache[si] = ev
    return ev.eval(f)


# ---------------------------------------------------------------------------
# Jumps over csv and over global forcing


def jump_csv(
    x: Iterable[int], spec: ClassSpec, workers: int | None = None
) -> JumpReport:
    """Universe sentences csv-forced at every pointed class structure whose
    distinguished interpretation is x; evaluated at the weakest pointed
    structure (the one-world one), which attains the intersection."""
    x = frozenset(x)
    ctx = context(spec)
    x_mask = ctx.mask_of(x)
    pointed = ctx.one_world(x)
    ev = _CsvEval(pointed, spec)
    out, witnesses, inexact = set(), {}, set()
    for c in spec.universe.codes:
        f = spec.universe.formula(c)
        v = ev.eval(f)[0]
        if not v.exact:
            inexact.add(c)
        if v.holds:
            out.add(c)
        else:
            witnesses[c] = ExclusionWitness(pointed, "w0", f, mode="csv", pointed=pointed)
    admissible = sum(1 for _ in ctx.admissible_pairs(x_mask, "svi"))
    return JumpReport(
        "csv", spec, x, frozenset(out), admissible, witnesses, frozenset(inexact)
    )


def jump_svi2(
    x: Iterable[int], spec: ClassSpec, workers: int | None = None
) -> JumpReport:
    """The supervaluational jump with global forcing as the base relation."""
    x = frozenset(x)
    ctx = context(spec)
    x_mask = ctx.mask_of(x)
    out, witnesses, inexact = set(), {}, set()
    pairs = list(ctx.admissible_pairs(x_mask, "svi"))
    for c in spec.universe.codes:
        f = spec.universe.formula(c)
        holds, exact, wit = True, True, None
        for si, wi in pairs:
            v = ctx.verdicts(si, f, "global").at(wi)
            exact = exact and v.exact
            if not v.holds:
                holds, wit = False, (si, wi)
                break
        if not exact:
            inexact.add(c)
        if holds:
            out.add(c)
        elif wit is not None:
            target = ctx.structures[wit[0]]
            witnesses[c] = ExclusionWitness(
                target, target.worlds[wit[1]], f, mode="global", pointed=ctx.one_world(x)
            )
    return JumpReport(
        "svi2", spec, x, frozenset(out), len(pairs), witnesses, frozenset(inexact)
    )


def lfp_csv(
    spec: ClassSpec, seed: Iterable[int] = (), workers: int | None = None
) -> LfpResult:
    """Least fixed point of the csv jump by monotone iteration."""
    current = frozenset(seed)
    if current - set(spec.universe.codes):
        raise SeedError("seed contains codes outside the universe")
    report = jump_csv(current, spec, workers)
    if not current <= report.output_codes:
        missing = sorted(current - report.output_codes)
        raise SeedError(f"seed is not inflationary; not recovered: {missing}")
    trace = [current]
    for _ in range((1 << len(spec.universe)) + 1):
        nxt = report.output_codes
        trace.append(nxt)
        if nxt == current:
            break
        current = nxt
        report = jump_csv(current, spec, workers)
    return LfpResult("csv", spec, current, tuple(trace), report)


# ---------------------------------------------------------------------------
# Fixed-point diagnostics


def diagnose_fixed_point_csv(
    x: Iterable[int], spec: ClassSpec, workers: int | None = None
) -> CheckReport:
    """Compositional health of a csv fixed point: disjunction and existence
    properties, truth transparency, modus-ponens closure, consistency, and
    the compositional axiom schemata evaluated globally at the one-world
    fixed-point model."""
    x = frozenset(x)
    present = set(spec.universe.codes)
    rows: list[CheckRow] = []

    fixed_ok = jump_csv(x, spec, workers).output_codes == x
    rows.append(CheckRow("fixed-point", "jump_csv(x) & universe == x", fixed_ok))

    for c in sorted(x):
        f = decode(c)
        if isinstance(f, Or):
            lc, rc = code_formula(f.left), code_formula(f.right)
            if lc not in present and rc not in present:
                rows.append(
                    CheckRow("disjunction-property", pretty(f), True, True,
                             "disjunct codes outside universe; not decidable here")
                )
            else:
                rows.append(CheckRow("disjunction-property", pretty(f), lc in x or rc in x))
        if isinstance(f, Exists):
            found = False
            for n in range(spec.numeral_bound + 1):
                inst = code_formula(substitute(f.body, f.var, Num(n)))
                if inst in x:
                    found = True
                    break
            rows.append(
                CheckRow(
                    "existence-property",
                    pretty(f),
                    found,
                    exact=found,
                    note="" if found else f"no witness below {spec.numeral_bound + 1}",
                )
            )
    for c in sorted(x):
        f = decode(c)
        if isinstance(f, Imp) and code_formula(f.left) in x:
            cons = code_formula(f.right)
            if cons in present:
                rows.append(CheckRow("modus-ponens-closure", pretty(f), cons in x))
            else:
                rows.append(
                    CheckRow("modus-ponens-closure", pretty(f), True, True,
                             "consequent code outside universe; not decidable here")
                )
    for c, t in transparency_pairs(spec):
        rows.append(
            CheckRow("truth-transparency", pretty(decode(c)), (c in x) == (t in x))
        )
    clash = sorted(c for c in x if neg_code(c) in x)
    rows.append(CheckRow("consistency", "no sentence together with its negation",
                         not clash, True, str(clash[:2])))
    rows.extend(_axiom_rows(x, spec))
    return CheckReport("csv fixed point diagnosis", tuple(rows))


def _g_everywhere(m: KripkeStructure, f: Formula) -> tuple[bool, bool]:
    vs = forces_all(m, f, "global")
    return all(v.holds for v in vs), all(v.exact for v in vs)


def _axiom_rows(x: frozenset[int], spec: ClassSpec) -> list[CheckRow]:
    """The compositional axiom schemata, globally forced at the one-world
    model over x, at bounded instantiation inside the universe."""
    ctx = context(spec)
    m = ctx.one_world(x)
    present = set(spec.universe.codes)
    rows: list[CheckRow] = []

    def row(name: str, desc: str, f: Formula) -> None:
        ok, exact = _g_everywhere(m, f)
        rows.append(CheckRow(name, desc, ok, exact))

    for s in (Num(0), Num(1), FnApp("S", (Num(0),))):
        for t in (Num(0), Num(1)):
            eq_true = eval_term(s) == eval_term(t)
            eq_c, neq_c = code_formula(Eq(s, t)), code_formula(neg(Eq(s, t)))
            if not eq_true or eq_c in present:
                row("axiom-equality", f"{s} = {t}",
                    iff(Tr(FnApp("dot_eq", (Num(code_term(s)), Num(code_term(t))))), Eq(s, t)))
            if eq_true or neq_c in present:
                row("axiom-inequality", f"{s} = {t}",
                    iff(Tr(FnApp("dot_neq", (Num(code_term(s)), Num(code_term(t))))), neg(Eq(s, t))))
    for c in spec.universe.codes:
        f = spec.universe.formula(c)
        if isinstance(f, Or):
            lc, rc = code_formula(f.left), code_formula(f.right)
            if lc in present and rc in present:
                row("axiom-disjunction", pretty(f),
                    iff(Tr(Num(c)), Or(Tr(Num(lc)), Tr(Num(rc)))))
        if isinstance(f, And):
            lc, rc = code_formula(f.left), code_formula(f.right)
            if lc in present and rc in present:
                row("axiom-conjunction", pretty(f),
                    iff(Tr(Num(c)), And(Tr(Num(lc)), Tr(Num(rc)))))
        if isinstance(f, Exists):
            ok_insts = all(
                code_formula(substitute(f.body, f.var, Num(n))) in present
                for n in range(spec.numeral_bound + 1)
            )
            if ok_insts:
                z = "z_0" if f.var == "z" else "z"
                body_code = code_formula(f.body)
                row("axiom-existential", pretty(f),
                    iff(Tr(Num(c)),
                        Exists(z, Tr(FnApp("subst", (Num(body_code), FnApp("num", (Var(z),)), Num(code_term(Var(f.var)))))))))
        if isinstance(f, Forall):
            z = "z_0" if f.var == "z" else "z"
            body_code = code_formula(f.body)
            row("axiom-universal", pretty(f),
                iff(Tr(Num(c)),
                    Forall(z, Tr(FnApp("subst", (Num(body_code), FnApp("num", (Var(z),)), Num(code_term(Var(f.var)))))))))
        if isinstance(f, Imp):
            ante, cons = code_formula(f.left), code_formula(f.right)
            if cons in present or f.right == BOT:
                row("axiom-conditional", pretty(f),
                    Imp(Tr(Num(c)), Imp(Tr(Num(ante)), Tr(Num(cons)))))
    for c, t in transparency_pairs(spec):
        row("axiom-truth-iteration", pretty(decode(c)),
            iff(Tr(Num(c)), Tr(FnApp("dot_tr", (Num(code_term(Num(c))),)))))
    for ax in hat_axiom_candidates():
        c = code_formula(ax)
        if c in present:
            row("axiom-arithmetic", pretty(ax), Tr(Num(c)))
    for c in spec.universe.codes:
        row("axiom-consistency", pretty(decode(c)), consistency_sentence(c))
    bad = [c for c in x if not _decodes(c)]
    rows.append(CheckRow("axiom-sentencehood", "members decode to sentences", not bad))
    for c in sorted(x):
        row("axiom-release", pretty(decode(c)), Imp(Tr(Num(c)), decode(c)))
    return rows


def _decodes(c: int) -> bool:
    try:
        decode(c)
    except Exception:
        return False
    return True


# ---------------------------------------------------------------------------
# Embedding stability of csv-forcing


def check_lemma_embedding_stability(
    spec: ClassSpec, workers: int | None = None, headroom: int = 0
) -> CheckReport:
    """csv-forcing at a world holds exactly when it holds at the world's
    image under every embedding into every class structure; exhaustive over
    the class.  With headroom > 0, only sources that leave that much
    world-count slack inside the class are tested."""
    ctx = context(spec)
    rows: list[CheckRow] = []
    mismatches = 0
    total = 0
    for si, m in enumerate(ctx.structures):
        if headroom and spec.headroom(m) < headroom:
            continue
        for wi, w in enumerate(m.worlds):
            for c in spec.universe.codes:
                f = spec.universe.formula(c)
                lhs = _csv_table(ctx, spec, si, f)[wi].holds
                rhs = True
                for ti in range(len(ctx.structures)):
                    for tup in ctx.ei_maps(si, ti):
                        if not _csv_table(ctx, spec, ti, f)[tup[wi]].holds:
                            rhs = False
                            break
                    if not rhs:
                        break
                total += 1
                if lhs != rhs:
                    mismatches += 1
                    rows.append(
                        CheckRow(
                            "embedding-stability",
                            f"structure {si} world {w} sentence {pretty(f)}",
                            False,
                            note=f"direct {lhs} vs embedded {rhs}",
                        )
                    )
    rows.insert(
        0,
        CheckRow(
            "embedding-stability",
            f"biconditional over {total} (structure, world, sentence) triples",
            mismatches == 0,
        ),
    )
    return CheckReport("embedding stability of csv-forcing", tuple(rows))


def check_shrinking_refutation(
    spec: ClassSpec, workers: int | None = None
) -> CheckReport:
    """If w refutes f under csv with distinguished interpretation X, then for
    every X' included in X some class structure interpreting X' at a world
    still refutes f.  (Read with the shrinking inclusion: growing X' admits
    direct counterexamples, e.g. a bare truth atom over the empty set.)"""
    ctx = context(spec)
    # refutation index: per (sentence, interp mask) does some refuting world exist
    refuted: dict[tuple[int, int], bool] = {}
    for si, m in enumerate(ctx.structures):
        masks = ctx.interp_masks[si]
        for c in spec.universe.codes:
            f = spec.universe.formula(c)
            table = _csv_table(ctx, spec, si, f)
            for wi in range(len(m.worlds)):
                if not table[wi].holds:
                    refuted[(c, masks[wi])] = True
    rows: list[CheckRow] = []
    bad = 0
    checked = 0
    for (c, mask) in sorted(refuted):
        sub = mask
        while True:
            checked += 1
            if (c, sub) not in refuted:
                bad += 1
                rows.append(
                    CheckRow(
                        "shrinking-refutation",
                        f"{pretty(spec.universe.formula(c))} at submask {sub:#x} of {mask:#x}",
                        False,
                    )
                )
            if sub == 0:
                break
            sub = (sub - 1) & mask
    rows.insert(
        0,
        CheckRow(
            "shrinking-refutation",
            f"{checked} (sentence, shrunken interpretation) pairs",
            bad == 0,
        ),
    )
    return CheckReport("refutations survive shrinking the distinguished set", tuple(rows))
