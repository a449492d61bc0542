"""Shared evaluation machinery for whole-class sweeps.

A ClassContext indexes the enumerated class of a ClassSpec once and caches
per-structure verdict tables.  Verdicts over the worlds of one structure are
packed into two bitmasks (holds, exact); universe interpretations are packed
into bitmasks over universe positions.  Everything here is deterministic and
order-insensitive under partitioning, so sweeps can be chunked across
worker threads without changing any result.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .kripke import ForcingVerdict, KripkeStructure
from .search import ClassSpec, enumerate_ei, enumerate_structures
from .syntax import (
    And,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Num,
    Or,
    Tr,
    eval_term_cached,
    free_vars,
    neg_code,
    substitute,
    unneg_code,
)

_CONTEXTS: dict[ClassSpec, "ClassContext"] = {}


def context(spec: ClassSpec) -> "ClassContext":
    ctx = _CONTEXTS.get(spec)
    if ctx is None:
        ctx = ClassContext(spec)
        _CONTEXTS[spec] = ctx
    return ctx


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ITRUTH_WORKERS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Packed per-structure evaluation


@dataclass(frozen=True)
class MaskVerdict:
    """Verdicts for every world of one structure: bit i is world i."""

    holds: int
    exact: int

    def at(self, i: int) -> ForcingVerdict:
        return ForcingVerdict(bool(self.holds >> i & 1), bool(self.exact >> i & 1))


class StructEval:
    """Bitmask evaluator for one structure (standard and global clauses)."""

    def __init__(self, m: KripkeStructure):
        self.m = m
        n = len(m.worlds)
        self.n = n
        self.full = (1 << n) - 1
        idx = {w: i for i, w in enumerate(m.worlds)}
        self.above = tuple(
            sum(1 << idx[v] for v in m.worlds if m.le(w, v)) for w in m.worlds
        )
        self.memo: dict[tuple[str, Formula], MaskVerdict] = {}

    # verdict algebra over world-bit masks
    def _and(self, a: MaskVerdict, b: MaskVerdict) -> MaskVerdict:
        v = a.holds & b.holds
        e = (v & a.exact & b.exact) | (~v & ((~a.holds & a.exact) | (~b.holds & b.exact)))
        return MaskVerdict(v & self.full, e & self.full)

    def _or(self, a: MaskVerdict, b: MaskVerdict) -> MaskVerdict:
        v = a.holds | b.holds
        e = (v & ((a.holds & a.exact) | (b.holds & b.exact))) | (~v & a.exact & b.exact)
        return MaskVerdict(v & self.full, e & self.full)

    def _not(self, a: MaskVerdict) -> MaskVerdict:
        return MaskVerdict(~a.holds & self.full, a.exact)

    def eval(self, f: Formula, mode: str) -> MaskVerdict:
        key = (mode, f)
        got = self.memo.get(key)
        if got is None:
            got = self._eval(f, mode)
            self.memo[key] = got
        return got

    def _blanket(self, a: MaskVerdict) -> MaskVerdict:
        """Per world w: the conjunction of a over all worlds above w."""
        v = e = 0
        for i in range(self.n):
            ab = self.above[i]
            if a.holds & ab == ab:
                v |= 1 << i
                if a.exact & ab == ab:
                    e |= 1 << i
            elif ~a.holds & a.exact & ab:
                e |= 1 << i
        return MaskVerdict(v, e)

    def _eval(self, f: Formula, mode: str) -> MaskVerdict:
        full = self.full
        if isinstance(f, Bottom):
            return MaskVerdict(0, full)
        if isinstance(f, Eq):
            v = full if eval_term_cached(f.left) == eval_term_cached(f.right) else 0
            return MaskVerdict(v, full)
        if isinstance(f, Tr):
            val = eval_term_cached(f.arg)
            v = 0
            for i in range(self.n):
                if val in self.m.interp[i]:
                    v |= 1 << i
            return MaskVerdict(v, full)
        if isinstance(f, And):
            return self._and(self.eval(f.left, mode), self.eval(f.right, mode))
        if isinstance(f, Or):
            a, b = self.eval(f.left, mode), self.eval(f.right, mode)
            if mode == "global":
                return self._or(self._blanket(a), self._blanket(b))
            return self._or(a, b)
        if isinstance(f, Imp):
            step = self._or(self._not(self.eval(f.left, mode)), self.eval(f.right, mode))
            return self._blanket(step)
        if isinstance(f, (Exists, Forall)):
            if f.var not in free_vars(f.body):
                rows = [self.eval(f.body, mode)]
                tail = None
            else:
                rows = [
                    self.eval(substitute(f.body, f.var, Num(n)), mode)
                    for n in range(self.m.numeral_bound + 1)
                ]
                tail = "cut"
            if isinstance(f, Exists):
                out = rows[0]
                for r in rows[1:]:
                    out = self._or(out, r)
                if tail:
                    out = self._or(out, MaskVerdict(0, 0))
                # the global existential clause checks its witness at the
                # current world, so it collapses to the local one here
                return out
            out = rows[0]
            for r in rows[1:]:
                out = self._and(out, r)
            out = self._blanket(out)
            if tail:
                out = self._and(out, MaskVerdict(full, 0))
            return out
        raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Class context


class ClassContext:
    def __init__(self, spec: ClassSpec):
        self.spec = spec
        self.universe = spec.universe
        self.structures: tuple[KripkeStructure, ...] = tuple(enumerate_structures(spec))
        self.index: dict[KripkeStructure, int] = {
            m: i for i, m in enumerate(self.structures)
        }
        k = len(self.universe)
        code_index = {c: i for i, c in enumerate(self.universe.codes)}
        # per structure: per world universe-bitmask interpretation
        self.interp_masks: list[tuple[int, ...]] = []
        for m in self.structures:
            self.interp_masks.append(
                tuple(sum(1 << code_index[c] for c in cs) for cs in m.interp)
            )
        self._evals: dict[int, StructEval] = {}
        # negation partners inside the universe
        self.partner_mask = [0] * k
        for i in range(k):
            j = self.universe.neg_partner(i)
            if j is not None:
                self.partner_mask[i] |= 1 << j
            j = self.universe.unneg_partner(i)
            if j is not None:
                self.partner_mask[i] |= 1 << j
        pairs = self.universe.negation_pairs()

        def consistent(mask: int) -> bool:
            return all(not (mask >> i & 1 and mask >> j & 1) for i, j in pairs)

        def mcx(mask: int) -> bool:
            return all((mask >> i ^ mask >> j) & 1 for i, j in pairs)

        # per (structure, world): cone facts used by admissibility conditions
        self.cone_union: list[tuple[int, ...]] = []
        self.cone_consistent: list[tuple[bool, ...]] = []
        self.cone_mcx: list[tuple[bool, ...]] = []
        for si, m in enumerate(self.structures):
            masks = self.interp_masks[si]
            ev = self.eval_of(si)
            union, cons, maxc = [], [], []
            for wi in range(len(m.worlds)):
                ab = ev.above[wi]
                u = 0
                okc = okm = True
                for j in range(len(m.worlds)):
                    if ab >> j & 1:
                        u |= masks[j]
                        okc = okc and consistent(masks[j])
                        okm = okm and mcx(masks[j])
                union.append(u)
                cons.append(okc)
                maxc.append(okm)
            self.cone_union.append(tuple(union))
            self.cone_consistent.append(tuple(cons))
            self.cone_mcx.append(tuple(maxc))
        self._ei_cache: dict[tuple[int, int], tuple[tuple[int, ...], ...]] = {}
        self.cache: dict = {}  # scratch space for dependent modules

    # -- basic access --------------------------------------------------------

    def eval_of(self, si: int) -> StructEval:
        ev = self._evals.get(si)
        if ev is None:
            ev = StructEval(self.structures[si])
            self._evals[si] = ev
        return ev

    def verdicts(self, si: int, f: Formula, mode: str = "standard") -> MaskVerdict:
        return self.eval_of(si).eval(f, mode)

    def mask_of(self, codes: Iterable[int]) -> int:
        return self.universe.mask_of(codes)

    def codes_of(self, mask: int) -> frozenset[int]:
        return self.universe.codes_of(mask)

    def xneg_mask(self, x_mask: int) -> int:
        out = 0
        for i in range(len(self.universe)):
            if x_mask >> i & 1:
                out |= self.partner_mask[i]
        return out

    def i_minus_codes(self, codes: Iterable[int]) -> frozenset[int]:
        """Negations of members plus members whose negations are present."""
        out = set()
        for c in codes:
            out.add(neg_code(c))
            u = unneg_code(c)
            if u is not None:
                out.add(u)
        return frozenset(out)

    def one_world(self, codes: Iterable[int]) -> KripkeStructure:
        return KripkeStructure(
            ("w0",),
            frozenset({("w0", "w0")}),
            (frozenset(codes),),
            self.spec.numeral_bound,
        )

    # -- admissible extension scan -------------------------------------------

    def admissible_pairs(self, x_mask: int, scheme: str) -> Iterable[tuple[int, int]]:
        """All (structure, world) pairs reachable from the distinguished
        interpretation via an admissible embedding, in canonical order."""
        xneg = self.xneg_mask(x_mask) if scheme == "vbi" else 0
        for si in range(len(self.structures)):
            masks = self.interp_masks[si]
            for wi in range(len(masks)):
                if x_mask & ~masks[wi]:
                    continue
                if scheme == "svi":
                    pass
                elif scheme == "vbi":
                    if self.cone_union[si][wi] & xneg:
                        continue
                elif scheme == "vci":
                    if not self.cone_consistent[si][wi]:
                        continue
                elif scheme == "mci":
                    if not self.cone_mcx[si][wi]:
                        continue
                else:
                    raise ValueError(f"unknown scheme {scheme!r}")
                yield si, wi

    def ei_maps(self, si: int, ti: int) -> tuple[tuple[int, ...], ...]:
        """Embeddings between class members as world-index tuples, cached."""
        key = (si, ti)
        got = self._ei_cache.get(key)
        if got is None:
            src, tgt = self.structures[si], self.structures[ti]
            tgt_index = {w: i for i, w in enumerate(tgt.worlds)}
            got = tuple(
                tuple(tgt_index[b] for _, b in wm.mapping)
                for wm in enumerate_ei(src, tgt)
            )
            self._ei_cache[key] = got
        return got


# ---------------------------------------------------------------------------
# Deterministic parallel conjunction


@dataclass(frozen=True)
class SweepResult:
    ok: bool
    exact: bool
    witness: object | None  # the least item (by list position) that failed


def sweep_all(
    items: Sequence,
    check: Callable[[object], ForcingVerdict],
    workers: int | None = None,
) -> SweepResult:
    """Conjunction of check over items; the witness is the positionally least
    failure, so the result does not depend on the worker count.

    Exactness follows the conjunction rule: a passing sweep is exact when
    every verdict was, a failing sweep when some verdict failed exactly.
    """
    workers = workers or default_workers()

    def run(chunk: Sequence[tuple[int, object]]) -> tuple[bool, bool, bool, tuple[int, object] | None]:
        all_exact, exact_failure, wit = True, False, None
        for pos, item in chunk:
            v = check(item)
            all_exact = all_exact and v.exact
            if not v.holds:
                if wit is None:
                    wit = (pos, item)
                exact_failure = exact_failure or v.exact
        return wit is None, all_exact, exact_failure, wit

    indexed = list(enumerate(items))
    if workers <= 1 or len(indexed) < 64:
        parts = [run(indexed)]
    else:
        size = (len(indexed) + workers - 1) // workers
        chunks = [indexed[i : i + size] for i in range(0, len(indexed), size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    ok = all(p[0] for p in parts)
    if ok:
        return SweepResult(True, all(p[1] for p in parts), None)
    exact = any(p[2] for p in parts)
    wits = [p[3] for p in parts if p[3] is not None]
    wit = min(wits, key=lambda t: t[0])
    return SweepResult(False, exact, wit[1])
