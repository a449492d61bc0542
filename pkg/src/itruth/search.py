"""Embedding enumeration and exhaustive enumeration of bounded structure classes.

An embedding-interpretation map between structures is an injective world map
that preserves and reflects the order and never shrinks the truth
interpretation.  The class induced by a ClassSpec is the set of persistent
structures with at most max_worlds worlds and interpretations drawn from the
universe, one canonical representative per isomorphism class, in a fixed
deterministic order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .kripke import ForcingVerdict, KripkeStructure, forces_all
from .syntax import Formula, Universe


@dataclass(frozen=True)
class WorldMap:
    """An embedding-interpretation map; mapping is aligned with source.worlds."""

    source: KripkeStructure
    target: KripkeStructure
    mapping: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    def image(self, w: str) -> str:
        for a, b in self.mapping:
            if a == w:
                return b
        raise KeyError(w)


def is_ei_map(m: KripkeStructure, n: KripkeStructure, mapping: dict[str, str]) -> bool:
    """The three conditions: injective, order-biconditional, interpretation-inclusive."""
    if set(mapping) != set(m.worlds):
        return False
    values = list(mapping.values())
    if len(set(values)) != len(values):
        return False
    if not all(v in n.worlds for v in values):
        return False
    for w0 in m.worlds:
        for w1 in m.worlds:
            if m.le(w0, w1) != n.le(mapping[w0], mapping[w1]):
                return False
    return all(m.interp_of(w) <= n.interp_of(mapping[w]) for w in m.worlds)


def enumerate_ei(m: KripkeStructure, n: KripkeStructure) -> list[WorldMap]:
    """All embedding-interpretation maps from m into n, lexicographically by
    target choice along m's world order."""
    out: list[WorldMap] = []
    src = m.worlds
    used: set[str] = set()
    chosen: list[str] = []

    def feasible(i: int, v: str) -> bool:
        if not m.interp_of(src[i]) <= n.interp_of(v):
            return False
        for j in range(i):
            if m.le(src[j], src[i]) != n.le(chosen[j], v):
                return False
            if m.le(src[i], src[j]) != n.le(v, chosen[j]):
                return False
        return True

    def walk(i: int) -> None:
        if i == len(src):
            out.append(WorldMap(m, n, tuple(zip(src, tuple(chosen)))))
            return
        for v in n.worlds:
            if v in used or not feasible(i, v):
                continue
            used.add(v)
            chosen.append(v)
            walk(i + 1)
            chosen.pop()
            used.discard(v)

    walk(0)
    return out


def is_embeddable(m: KripkeStructure, n: KripkeStructure) -> bool:
    return bool(enumerate_ei(m, n))


def naively_extends(m: KripkeStructure, n: KripkeStructure) -> bool:
    """m's worlds are a subset of n's, n's order restricted to them is m's,
    and every interpretation is included pointwise."""
    if not set(m.worlds) <= set(n.worlds):
        return False
    mset = set(m.worlds)
    if {p for p in n.order if p[0] in mset and p[1] in mset} != set(m.order):
        return False
    return all(m.interp_of(w) <= n.interp_of(w) for w in m.worlds)


# ---------------------------------------------------------------------------
# Bounded classes


@dataclass(frozen=True)
class ClassSpec:
    max_worlds: int
    universe: Universe
    numeral_bound: int = 4

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")

    def headroom(self, m: KripkeStructure) -> int:
        """World-count slack before add_root would leave the class."""
        return self.max_worlds - len(m.worlds)


def canonical_form(m: KripkeStructure) -> KripkeStructure:
    """The least isomorphic relabelling onto worlds w0..w{n-1}."""
    n = len(m.worlds)
    best = None
    for perm in itertools.permutations(range(n)):
        # world m.worlds[i] is renamed to w{perm[i]}
        order = tuple(
            sorted(
                (perm[m.worlds.index(u)], perm[m.worlds.index(v)])
                for u, v in m.order
            )
        )
        interp = [None] * n
        for i in range(n):
            interp[perm[i]] = tuple(sorted(m.interp[i]))
        key = (order, tuple(interp))
        if best is None or key < best:
            best = key
    order_key, interp_key = best
    worlds = tuple(f"w{i}" for i in range(n))
    return KripkeStructure(
        worlds,
        frozenset((f"w{u}", f"w{v}") for u, v in order_key),
        tuple(frozenset(cs) for cs in interp_key),
        m.numeral_bound,
    )


def _posets(n: int) -> list[tuple[tuple[tuple[int, int], ...], list[tuple[int, ...]]]]:
    """Canonical partial orders on 0..n-1 with their automorphism groups."""
    diag = {(i, i) for i in range(n)}
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    seen: set[tuple[tuple[int, int], ...]] = set()
    found: list[tuple[tuple[tuple[int, int], ...], list[tuple[int, ...]]]] = []
    for bits in range(1 << len(off)):
        rel = diag | {off[k] for k in range(len(off)) if bits >> k & 1}
        if any((i, j) in rel and (j, i) in rel for i, j in off):
            continue
        if any(
            (i, j) in rel and (j, k) in rel and (i, k) not in rel
            for i in range(n)
            for j in range(n)
            for k in range(n)
        ):
            continue
        keys = {}
        for perm in itertools.permutations(range(n)):
            key = tuple(sorted((perm[i], perm[j]) for i, j in rel))
            keys.setdefault(key, []).append(perm)
        canon = min(keys)
        if canon in seen:
            continue
        seen.add(canon)
        canon_rel = set(canon)
        autos = [
            perm
            for perm in itertools.permutations(range(n))
            if all((perm[i], perm[j]) in canon_rel for i, j in canon_rel)
        ]
        found.append((canon, autos))
    found.sort(key=lambda item: item[0])
    return found


def _upsets(n: int, rel: set[tuple[int, int]]) -> list[int]:
    """Upward-closed world subsets as bitmasks, ascending."""
    out = []
    for mask in range(1 << n):
        ok = True
        for i in range(n):
            if mask >> i & 1:
                for j in range(n):
                    if (i, j) in rel and not mask >> j & 1:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out.append(mask)
    return out


def enumerate_structures(spec: ClassSpec) -> Iterator[KripkeStructure]:
    """Every persistent structure of the class, canonical and exactly once.

    Emission order: world count, then order relation, then interpretation.
    """
    codes = spec.universe.codes
    k = len(codes)
    for n in range(1, spec.max_worlds + 1):
        for rel_key, autos in _posets(n):
            rel = set(rel_key)
            ups = _upsets(n, rel)
            nontrivial = [a for a in autos if a != tuple(range(n))]
            emitted = []
            for assign in itertools.product(ups, repeat=k):
                # interp[w] = codes whose upset contains w; rows are compared
                # as sorted code tuples, the same basis canonical_form uses
                key = tuple(
                    tuple(sorted(codes[ci] for ci in range(k) if assign[ci] >> w & 1))
                    for w in range(n)
                )
                keep = True
                for a in nontrivial:
                    moved = tuple(key[a.index(w)] for w in range(n))
                    if moved < key:
                        keep = False
                        break
                if keep:
                    emitted.append(key)
            emitted = sorted(set(emitted))
            worlds = tuple(f"w{i}" for i in range(n))
            order = frozenset((f"w{u}", f"w{v}") for u, v in rel_key)
            for key in emitted:
                interp = tuple(frozenset(row) for row in key)
                yield KripkeStructure(worlds, order, interp, spec.numeral_bound)


def enumerate_pointed(
    spec: ClassSpec, x: Iterable[int], superset: bool = False
) -> Iterator[tuple[KripkeStructure, str]]:
    """All (structure, world) pairs of the class whose distinguished
    interpretation equals x (or includes it, with superset=True)."""
    x = frozenset(x)
    if not x <= set(spec.universe.codes):
        return
    for m in enumerate_structures(spec):
        for i, w in enumerate(m.worlds):
            if m.interp[i] == x or (superset and m.interp[i] >= x):
                yield m, w


def search_discrepancy(
    spec: ClassSpec, formulas: Iterable[Formula] | None = None
) -> list[tuple[KripkeStructure, str, Formula, ForcingVerdict, ForcingVerdict]]:
    """Compare standard against global forcing over the whole class; returns
    every disagreement (none are asserted to exist)."""
    if formulas is None:
        formulas = [spec.universe.formula(c) for c in spec.universe.codes]
    formulas = list(formulas)
    out = []
    for m in enumerate_structures(spec):
        for f in formulas:
            std = forces_all(m, f, "standard")
            glob = forces_all(m, f, "global")
            for i, w in enumerate(m.worlds):
                if std[i].holds != glob[i].holds:
                    out.append((m, w, f, std[i], glob[i]))
    return out
