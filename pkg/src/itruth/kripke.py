"""Finitely presented intuitionistic Kripke structures and forcing.

A structure is a finite world set with a reflexive, transitive, antisymmetric
order and, per world, a set of sentence codes interpreting the truth
predicate.  The hereditary condition (interpretations grow along the order)
is what validate() checks.  Quantifiers range over an omega domain that is
cut off at the structure's numeral_bound; verdicts carry an exactness flag
that records whether a cutoff was actually engaged.

Two forcing relations live here: the standard intuitionistic one and the
global variant whose disjunction and existential clauses look at all
accessible worlds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .syntax import (
    And,
    Bottom,
    DecodeError,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Num,
    Or,
    Tr,
    code,
    decode,
    eval_term_cached,
    free_vars,
    is_sentence,
    parse,
    pretty,
    substitute,
)


class StructureError(Exception):
    pass


class RootInterpretationError(StructureError):
    """add_root would break heredity; carries the offending code."""

    def __init__(self, code: int, world: str):
        super().__init__(f"code {code} is not interpreted at minimal world {world}")
        self.code = code
        self.world = world


class OpenFormulaError(Exception):
    pass


@dataclass(frozen=True)
class ForcingVerdict:
    holds: bool
    exact: bool = True

    def __bool__(self) -> bool:
        return self.holds

    @property
    def exactness(self) -> str:
        return "exact" if self.exact else "bounded-approximate"


TRUE = ForcingVerdict(True, True)
FALSE = ForcingVerdict(False, True)


def verdict_not(v: ForcingVerdict) -> ForcingVerdict:
    return ForcingVerdict(not v.holds, v.exact)


def verdict_and(vs: Iterable[ForcingVerdict]) -> ForcingVerdict:
    vs = list(vs)
    if all(v.holds for v in vs):
        return ForcingVerdict(True, all(v.exact for v in vs))
    return ForcingVerdict(False, any(v.exact and not v.holds for v in vs))


def verdict_or(vs: Iterable[ForcingVerdict]) -> ForcingVerdict:
    vs = list(vs)
    if any(v.holds for v in vs):
        return ForcingVerdict(True, any(v.exact and v.holds for v in vs))
    return ForcingVerdict(False, all(v.exact for v in vs))


APPROX_FALSE = ForcingVerdict(False, False)
APPROX_TRUE = ForcingVerdict(True, False)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    witness: tuple = ()

    def __str__(self) -> str:
        if self.witness:
            return f"{self.kind}: {self.message} {self.witness}"
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class KripkeStructure:
    worlds: tuple[str, ...]
    order: frozenset[tuple[str, str]]
    interp: tuple[frozenset[int], ...]
    numeral_bound: int = 4

    @classmethod
    def build(
        cls,
        worlds: Sequence[str],
        le: Iterable[tuple[str, str]] = (),
        interp: Mapping[str, Iterable[int]] | None = None,
        numeral_bound: int = 4,
        close: bool = True,
    ) -> "KripkeStructure":
        """Assemble a structure; by default the order is closed reflexively
        and transitively (antisymmetry is checked by validate, not forced)."""
        worlds = tuple(worlds)
        pairs = set(tuple(p) for p in le)
        if close:
            pairs |= {(w, w) for w in worlds}
            changed = True
            while changed:
                changed = False
                for a, b in list(pairs):
                    for c, d in list(pairs):
                        if b == c and (a, d) not in pairs:
                            pairs.add((a, d))
                            changed = True
        interp = interp or {}
        sets = tuple(frozenset(interp.get(w, ())) for w in worlds)
        return cls(worlds, frozenset(pairs), sets, numeral_bound)

    # -- accessors ---------------------------------------------------------

    def index(self, w: str) -> int:
        try:
            return self.worlds.index(w)
        except ValueError:
            raise StructureError(f"unknown world {w!r}") from None

    def le(self, u: str, v: str) -> bool:
        return (u, v) in self.order

    def interp_of(self, w: str) -> frozenset[int]:
        return self.interp[self.index(w)]

    def above(self, w: str) -> tuple[str, ...]:
        return tuple(v for v in self.worlds if self.le(w, v))

    def minimal_worlds(self) -> tuple[str, ...]:
        return tuple(
            w for w in self.worlds if all(not self.le(v, w) or v == w for v in self.worlds)
        )

    def with_interp(self, interp: Mapping[str, Iterable[int]]) -> "KripkeStructure":
        sets = tuple(frozenset(interp.get(w, ())) for w in self.worlds)
        return KripkeStructure(self.worlds, self.order, sets, self.numeral_bound)

    def interp_map(self) -> dict[str, frozenset[int]]:
        return {w: self.interp[i] for i, w in enumerate(self.worlds)}


def validate(m: KripkeStructure) -> list[Diagnostic]:
    """Empty iff m is a persistent structure; otherwise one entry per violation."""
    out: list[Diagnostic] = []
    wset = set(m.worlds)
    if len(wset) != len(m.worlds):
        out.append(Diagnostic("worlds", "duplicate world ids"))
    for u, v in sorted(m.order):
        if u not in wset or v not in wset:
            out.append(Diagnostic("order", "order references unknown world", (u, v)))
    for w in m.worlds:
        if (w, w) not in m.order:
            out.append(Diagnostic("reflexivity", "missing reflexive pair", (w,)))
    for u, v in sorted(m.order):
        for x, y in sorted(m.order):
            if v == x and (u, y) not in m.order:
                out.append(Diagnostic("transitivity", "missing composite pair", (u, v, y)))
    for u, v in sorted(m.order):
        if u != v and (v, u) in m.order:
            out.append(Diagnostic("antisymmetry", "two-way pair between distinct worlds", (u, v)))
    for u in m.worlds:
        for v in m.worlds:
            if m.le(u, v):
                missing = m.interp_of(u) - m.interp_of(v)
                for c in sorted(missing):
                    out.append(Diagnostic("heredity", "interpretation shrinks along order", (u, v, c)))
    for i, w in enumerate(m.worlds):
        for c in sorted(m.interp[i]):
            try:
                decode(c)
            except DecodeError:
                out.append(Diagnostic("interpretation", "code is not a sentence code", (w, c)))
    if m.numeral_bound < 0:
        out.append(Diagnostic("numeral_bound", "negative bound"))
    return out


def truncate(m: KripkeStructure, w: str) -> KripkeStructure:
    """The substructure generated by w: worlds accessible from w."""
    m.index(w)
    keep = [v for v in m.worlds if m.le(w, v)]
    kset = set(keep)
    order = frozenset(p for p in m.order if p[0] in kset and p[1] in kset)
    interp = tuple(m.interp_of(v) for v in keep)
    return KripkeStructure(tuple(keep), order, interp, m.numeral_bound)


def add_root(m: KripkeStructure, x: Iterable[int], root: str | None = None) -> KripkeStructure:
    """A fresh world below all of m, interpreted by x.

    Heredity must survive: x has to be included in the interpretation of
    every minimal world of m.
    """
    x = frozenset(x)
    for w in m.minimal_worlds():
        extra = x - m.interp_of(w)
        if extra:
            raise RootInterpretationError(min(extra), w)
    if root is None:
        i = 0
        while f"r{i}" in m.worlds:
            i += 1
        root = f"r{i}"
    elif root in m.worlds:
        raise StructureError(f"world id {root!r} already used")
    worlds = (root,) + m.worlds
    order = set(m.order)
    order.add((root, root))
    for w in m.worlds:
        order.add((root, w))
    interp = (x,) + m.interp
    return KripkeStructure(worlds, frozenset(order), interp, m.numeral_bound)


# ---------------------------------------------------------------------------
# Forcing


class _Evaluator:
    """Evaluates a formula at every world at once, memoized per subformula."""

    def __init__(self, m: KripkeStructure, mode: str):
        self.m = m
        self.mode = mode  # "standard" | "global"
        self.n_worlds = len(m.worlds)
        idx = {w: i for i, w in enumerate(m.worlds)}
        self.above = tuple(
            tuple(idx[v] for v in m.worlds if m.le(w, v)) for w in m.worlds
        )
        self.memo: dict[Formula, tuple[ForcingVerdict, ...]] = {}

    def eval(self, f: Formula) -> tuple[ForcingVerdict, ...]:
        got = self.memo.get(f)
        if got is None:
            got = self._eval(f)
            self.memo[f] = got
        return got

    def _numerals(self) -> range:
        return range(self.m.numeral_bound + 1)

    def _eval(self, f: Formula) -> tuple[ForcingVerdict, ...]:
        m = self.m
        if isinstance(f, Bottom):
            return (FALSE,) * self.n_worlds
        if isinstance(f, Eq):
            v = TRUE if eval_term_cached(f.left) == eval_term_cached(f.right) else FALSE
            return (v,) * self.n_worlds
        if isinstance(f, Tr):
            val = eval_term_cached(f.arg)
            return tuple(TRUE if val in m.interp[i] else FALSE for i in range(self.n_worlds))
        if isinstance(f, And):
            a, b = self.eval(f.left), self.eval(f.right)
            return tuple(verdict_and((a[i], b[i])) for i in range(self.n_worlds))
        if isinstance(f, Or):
            a, b = self.eval(f.left), self.eval(f.right)
            if self.mode == "global":
                return tuple(
                    verdict_or(
                        (
                            verdict_and(a[j] for j in self.above[i]),
                            verdict_and(b[j] for j in self.above[i]),
                        )
                    )
                    for i in range(self.n_worlds)
                )
            return tuple(verdict_or((a[i], b[i])) for i in range(self.n_worlds))
        if isinstance(f, Imp):
            a, b = self.eval(f.left), self.eval(f.right)
            return tuple(
                verdict_and(verdict_or((verdict_not(a[j]), b[j])) for j in self.above[i])
                for i in range(self.n_worlds)
            )
        if isinstance(f, Exists):
            insts = self._instances(f)
            tail = () if insts.exact else (APPROX_FALSE,)
            if self.mode == "global":
                # the witness instance is checked at the current world, with the
                # witness drawn from each accessible world's (constant) domain
                return tuple(
                    verdict_and(
                        verdict_or(tuple(row[i] for row in insts.rows) + tail)
                        for _ in self.above[i]
                    )
                    for i in range(self.n_worlds)
                )
            return tuple(
                verdict_or(tuple(row[i] for row in insts.rows) + tail)
                for i in range(self.n_worlds)
            )
        if isinstance(f, Forall):
            insts = self._instances(f)
            tail = () if insts.exact else (APPROX_TRUE,)
            return tuple(
                verdict_and(
                    tuple(row[j] for j in self.above[i] for row in insts.rows)
                    + tail
                )
                for i in range(self.n_worlds)
            )
        raise TypeError(f"not a formula: {f!r}")

    def _instances(self, f: Exists | Forall) -> "_Instances":
        if f.var not in free_vars(f.body):
            # the bound variable does not occur: no cutoff is engaged
            return _Instances((self.eval(f.body),), exact=True)
        rows = tuple(
            self.eval(substitute(f.body, f.var, Num(n))) for n in self._numerals()
        )
        return _Instances(rows, exact=False)


@dataclass(frozen=True)
class _Instances:
    rows: tuple[tuple[ForcingVerdict, ...], ...]
    exact: bool


def _check_query(m: KripkeStructure, w: str, f: Formula) -> None:
    m.index(w)
    if not is_sentence(f):
        raise OpenFormulaError(f"cannot force an open formula: {f}")


def forces(m: KripkeStructure, w: str, f: Formula) -> ForcingVerdict:
    """Standard intuitionistic forcing at world w."""
    _check_query(m, w, f)
    return _Evaluator(m, "standard").eval(f)[m.index(w)]


def forces_global(m: KripkeStructure, w: str, f: Formula) -> ForcingVerdict:
    """Global forcing: disjunction and existential clauses range over all
    accessible worlds."""
    _check_query(m, w, f)
    return _Evaluator(m, "global").eval(f)[m.index(w)]


def forces_all(m: KripkeStructure, f: Formula, mode: str = "standard") -> tuple[ForcingVerdict, ...]:
    """Verdicts at every world, in world order; shared evaluation."""
    if not is_sentence(f):
        raise OpenFormulaError(f"cannot force an open formula: {f}")
    return _Evaluator(m, mode).eval(f)


def satisfies(m: KripkeStructure, f: Formula) -> ForcingVerdict:
    return verdict_and(forces_all(m, f, "standard"))


def satisfies_global(m: KripkeStructure, f: Formula) -> ForcingVerdict:
    return verdict_and(forces_all(m, f, "global"))


# ---------------------------------------------------------------------------
# Line-based structure files


def load_structure(text: str) -> tuple[KripkeStructure, list[Diagnostic]]:
    """Parse the line format; the order is closed reflexively/transitively on
    load and the loader returns the validation diagnostics."""
    worlds: list[str] = []
    le: list[tuple[str, str]] = []
    interp: dict[str, set[int]] = {}
    bound = 4
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "world":
            if not rest or " " in rest:
                raise StructureError(f"line {lineno}: world takes one id")
            worlds.append(rest)
        elif head == "le":
            parts = rest.split()
            if len(parts) != 2:
                raise StructureError(f"line {lineno}: le takes two ids")
            le.append((parts[0], parts[1]))
        elif head == "holds":
            wid, _, ftext = rest.partition(" ")
            f = parse(ftext.strip())
            if not is_sentence(f):
                raise StructureError(f"line {lineno}: holds needs a sentence")
            interp.setdefault(wid, set()).add(code(f))
        elif head == "numeral_bound":
            bound = int(rest)
        else:
            raise StructureError(f"line {lineno}: unknown directive {head!r}")
    m = KripkeStructure.build(worlds, le, interp, bound)
    return m, validate(m)


def dump_structure(m: KripkeStructure) -> str:
    lines = [f"numeral_bound {m.numeral_bound}"]
    for w in m.worlds:
        lines.append(f"world {w}")
    for u, v in sorted(m.order):
        if u != v:
            lines.append(f"le {u} {v}")
    for i, w in enumerate(m.worlds):
        for c in sorted(m.interp[i]):
            lines.append(f"holds {w} {pretty(decode(c))}")
    return "\n".join(lines) + "\n"
