"""Frame-local supervaluation: interpretation extensions over one fixed frame.

Here the worlds and the order never change; only the per-world truth
interpretation grows.  ff-forcing quantifies over all hereditary pointwise
extensions of the interpretation (bounded to the universe), and the frame
jump maps an interpretation to the interpretation collecting, per world, the
ff-forced universe sentences.  The frame-restricted scheme svi_M ties this
back to the embedding-based machinery: it supervaluates only over class
structures order-isomorphic to the fixed frame whose interpretations
dominate it pointwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .engine import context
from .kripke import (
    ForcingVerdict,
    KripkeStructure,
    forces_all,
    validate,
    verdict_and,
)
from .search import ClassSpec, enumerate_ei
from .superval import CheckReport, CheckRow, audit_axioms
from .syntax import Formula, Tr, Universe, pretty, quote


class FrameError(Exception):
    pass


@dataclass(frozen=True)
class FrameInterpretation:
    """A fixed frame (worlds, order, numeral bound) carrying one hereditary
    per-world set of sentence codes."""

    worlds: tuple[str, ...]
    order: frozenset[tuple[str, str]]
    numeral_bound: int
    interp: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, m: KripkeStructure) -> "FrameInterpretation":
        return cls(m.worlds, m.order, m.numeral_bound, m.interp)

    @classmethod
    def empty(cls, m: KripkeStructure) -> "FrameInterpretation":
        return cls(m.worlds, m.order, m.numeral_bound, tuple(frozenset() for _ in m.worlds))

    def as_structure(self) -> KripkeStructure:
        return KripkeStructure(self.worlds, self.order, self.interp, self.numeral_bound)

    def interp_of(self, w: str) -> frozenset[int]:
        return self.interp[self.worlds.index(w)]

    def extends(self, other: "FrameInterpretation") -> bool:
        """Pointwise inclusion over the same frame."""
        if (self.worlds, self.order) != (other.worlds, other.order):
            return False
        return all(o <= s for o, s in zip(other.interp, self.interp))

    def intersection(self) -> frozenset[int]:
        out = self.interp[0]
        for s in self.interp[1:]:
            out = out & s
        return out


def _check_frame(fi: FrameInterpretation, universe: Universe) -> None:
    diags = validate(fi.as_structure())
    if diags:
        raise FrameError(f"invalid frame interpretation: {diags[0]}")
    stray = set().union(*fi.interp) - set(universe.codes)
    if stray:
        raise FrameError(f"interpretation uses codes outside the universe: {sorted(stray)[:3]}")


def extensions(fi: FrameInterpretation, universe: Universe) -> Iterator[FrameInterpretation]:
    """All hereditary pointwise extensions bounded to the universe, in a
    deterministic order (per code, ascending upward-closed world sets)."""
    _check_frame(fi, universe)
    n = len(fi.worlds)
    order_idx = {
        (fi.worlds.index(u), fi.worlds.index(v)) for u, v in fi.order
    }
    upsets = []
    for mask in range(1 << n):
        if all(
            not (mask >> i & 1) or (mask >> j & 1)
            for i, j in order_idx
        ):
            upsets.append(mask)
    per_code = []
    for c in universe.codes:
        base = sum(1 << i for i in range(n) if c in fi.interp[i])
        per_code.append([m for m in upsets if m & base == base])
    for choice in itertools.product(*per_code):
        interp = tuple(
            frozenset(
                c for ci, c in enumerate(universe.codes) if choice[ci] >> i & 1
            )
            for i in range(n)
        )
        yield FrameInterpretation(fi.worlds, fi.order, fi.numeral_bound, interp)


def ff_forces(
    fi: FrameInterpretation, w: str, f: Formula, universe: Universe
) -> ForcingVerdict:
    """f is ff-forced at w when every hereditary extension of the
    interpretation over the same frame plainly forces it at w."""
    wi = fi.worlds.index(w)
    verdicts = [
        forces_all(ext.as_structure(), f, "standard")[wi]
        for ext in extensions(fi, universe)
    ]
    return verdict_and(verdicts)


def jump_ff(fi: FrameInterpretation, universe: Universe) -> FrameInterpretation:
    """Per world, the universe sentences ff-forced there; monotone in the
    interpretation and hereditary by construction."""
    _check_frame(fi, universe)
    n = len(fi.worlds)
    collected: list[set[int]] = [set() for _ in range(n)]
    exts = [ext.as_structure() for ext in extensions(fi, universe)]
    for c in universe.codes:
        f = universe.formula(c)
        rows = [forces_all(ext, f, "standard") for ext in exts]
        for i in range(n):
            if all(row[i].holds for row in rows):
                collected[i].add(c)
    return FrameInterpretation(
        fi.worlds, fi.order, fi.numeral_bound, tuple(frozenset(s) for s in collected)
    )


def lfp_ff(
    fi: FrameInterpretation, universe: Universe
) -> tuple[FrameInterpretation, tuple[FrameInterpretation, ...]]:
    """Iterate the frame jump from the given interpretation to stability.

    The default entry point is the empty interpretation on the frame; any
    hereditary seed below its own jump works.
    """
    current = fi
    trace = [current]
    limit = (1 << len(universe)) * len(fi.worlds) + 1
    for _ in range(limit):
        nxt = jump_ff(current, universe)
        if not nxt.extends(current):
            raise FrameError("seed interpretation is not below its jump")
        trace.append(nxt)
        if nxt == current:
            break
        current = nxt
    return current, tuple(trace)


# ---------------------------------------------------------------------------
# The frame-restricted scheme


def _frame_isos(m: KripkeStructure, n: KripkeStructure) -> list[dict[str, str]]:
    """Order isomorphisms from n's frame onto m's frame."""
    if len(m.worlds) != len(n.worlds):
        return []
    out = []
    for perm in itertools.permutations(m.worlds):
        tau = dict(zip(n.worlds, perm))
        if all(
            n.le(u, v) == m.le(tau[u], tau[v]) for u in n.worlds for v in n.worlds
        ):
            out.append(tau)
    return out


def _admissible_frame(m: KripkeStructure, target: KripkeStructure) -> bool:
    """Some frame isomorphism onto m dominates m's interpretation pointwise."""
    for tau in _frame_isos(m, target):
        if all(target.interp_of(u) >= m.interp_of(tau[u]) for u in target.worlds):
            return True
    return False


def svi_m_forces(
    m: KripkeStructure,
    n: KripkeStructure,
    w: str,
    f: Formula,
    spec: ClassSpec,
) -> ForcingVerdict:
    """Supervaluation at (n, w) restricted to class structures that are
    order-isomorphic to m's frame and dominate m's interpretation."""
    ctx = context(spec)
    admissible = _admissible_targets(ctx, spec, m)
    wi = n.index(w)
    verdicts = []
    for ti in admissible:
        target = ctx.structures[ti]
        tgt_index = {v: i for i, v in enumerate(target.worlds)}
        for wm in enumerate_ei(n, target):
            image = tgt_index[wm.mapping[wi][1]]
            verdicts.append(ctx.verdicts(ti, f).at(image))
    return verdict_and(verdicts)


def _admissible_targets(ctx, spec: ClassSpec, m: KripkeStructure) -> tuple[int, ...]:
    key = ("ff_admissible", m)
    got = ctx.cache.get(key)
    if got is None:
        got = tuple(
            ti
            for ti, target in enumerate(ctx.structures)
            if _admissible_frame(m, target)
        )
        ctx.cache[key] = got
    return got


def frame_jump_svi(
    m: KripkeStructure, x: Iterable[int], spec: ClassSpec
) -> frozenset[int]:
    """The sentence-based jump of x under the frame-restricted scheme: what
    is svi_M-forced at every pointed class structure interpreting x.  The
    intersection is attained at the one-world pointed structure, so the scan
    ranges over admissible targets and their x-dominating worlds."""
    ctx = context(spec)
    x = frozenset(x)
    x_mask = ctx.mask_of(x)
    admissible = _admissible_targets(ctx, spec, m)
    out = set()
    for c in spec.universe.codes:
        f = spec.universe.formula(c)
        ok = True
        for ti in admissible:
            masks = ctx.interp_masks[ti]
            tab = ctx.verdicts(ti, f)
            for wi in range(len(masks)):
                if x_mask & ~masks[wi]:
                    continue
                if not tab.at(wi).holds:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.add(c)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Reports


def check_svi_m_matches_ff(
    m: KripkeStructure, spec: ClassSpec
) -> CheckReport:
    """On the carrier structure itself, the frame-restricted scheme and
    ff-forcing agree for every world and universe sentence."""
    fi = FrameInterpretation.of(m)
    rows = []
    for w in m.worlds:
        for c in spec.universe.codes:
            f = spec.universe.formula(c)
            lhs = svi_m_forces(m, m, w, f, spec)
            rhs = ff_forces(fi, w, f, spec.universe)
            rows.append(
                CheckRow(
                    "svi-frame-vs-ff",
                    f"world {w} sentence {pretty(f)}",
                    lhs.holds == rhs.holds,
                    lhs.exact and rhs.exact,
                )
            )
    return CheckReport("frame-restricted scheme matches ff-forcing", tuple(rows))


def check_intersection_theorem(
    fi: FrameInterpretation, spec: ClassSpec
) -> CheckReport:
    """For a frame-jump fixed point, the intersection of the per-world sets
    equals the frame-restricted jump of that intersection.  One-world frames
    additionally get the converse correspondence (fixing the intersection
    recovers the frame fixed point)."""
    m = fi.as_structure()
    rows = []
    fixed = jump_ff(fi, spec.universe) == fi
    rows.append(CheckRow("precondition", "interpretation is a frame-jump fixed point", fixed))
    x = fi.intersection()
    j = frame_jump_svi(m, x, spec)
    rows.append(
        CheckRow(
            "intersection-theorem",
            f"intersection of {len(fi.worlds)} worlds",
            j == x,
            note="" if j == x else f"jump gives {sorted(j)} vs {sorted(x)}",
        )
    )
    if len(fi.worlds) == 1:
        rows.append(CheckRow("one-world-corollary", "interp(w) is a fixed set", j == x))
        back = jump_ff(fi, spec.universe)
        rows.append(
            CheckRow("one-world-converse", "fixed set regenerates the frame fixed point",
                     back == fi)
        )
    return CheckReport("fixed-frame intersection correspondence", tuple(rows))


def ff_transparency(fi: FrameInterpretation, universe: Universe) -> CheckReport:
    """At frame-jump fixed points, ff-forcing of a sentence and of its truth
    ascription agree at every world."""
    rows = []
    for w in fi.worlds:
        for c in universe.codes:
            f = universe.formula(c)
            lhs = ff_forces(fi, w, f, universe)
            rhs = ff_forces(fi, w, Tr(quote(f)), universe)
            rows.append(
                CheckRow(
                    "ff-transparency",
                    f"world {w} sentence {pretty(f)}",
                    lhs.holds == rhs.holds,
                    lhs.exact and rhs.exact,
                )
            )
    return CheckReport("ff transparency at a fixed point", tuple(rows))


def audit_ff_fixed_point(
    fi: FrameInterpretation, spec: ClassSpec, workers: int | None = None
):
    """The basic-theory audit run against a frame-jump fixed point."""
    report = audit_axioms("ISV", fi.as_structure(), spec, check_precondition=False,
                          workers=workers)
    pre = jump_ff(fi, spec.universe) == fi
    return report, pre
