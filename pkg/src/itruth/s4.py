"""Quantified S4 models, the box translation, and the bounded validity oracle.

This module works over a plain first-order fragment: predicate atoms applied
to variables and constants, the usual connectives, and (for modal formulas)
a box operator.  The box translation sends an intuitionistic formula to a
modal one by boxing atoms, conditionals and universal quantifiers.

Models have expanding domains.  G-models interpret atoms hereditarily and
are evaluated with the global forcing clauses; S4 models interpret atoms
freely and are evaluated with the usual possible-world clauses, box meaning
truth at every accessible world.  Countermodels transfer both ways, which
is what makes the bounded search an oracle for validity in the
intuitionistic predicate calculus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .syntax import (
    BOT,
    And,
    Bottom,
    Exists,
    Forall,
    Formula,
    Imp,
    Or,
    ParseError,
    neg,
)

# ---------------------------------------------------------------------------
# Terms and atoms of the predicate fragment


@dataclass(frozen=True)
class SVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SConst:
    """A named constant, interpreted by the model's constant table."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class DConst:
    """A rigid constant denoting a domain element directly."""

    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class SApp:
    symbol: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.symbol}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class PAtom(Formula):
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Box(Formula):
    body: Formula

    def __str__(self) -> str:
        return f"[]{format_modal(self.body, 4)}"


ModalFormula = Formula  # the connectives are shared; Box and PAtom extend them

from .syntax import register_extension_formatter as _register

_register(lambda f, prec: format_modal(f, prec))


def format_modal(f: Formula, prec: int = 0) -> str:
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, PAtom):
        return str(f)
    if isinstance(f, Box):
        return f"[]{format_modal(f.body, 4)}"
    if isinstance(f, Imp):
        if f.right == BOT:
            return f"~{format_modal(f.left, 4)}"
        s = f"{format_modal(f.left, 2)} -> {format_modal(f.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, Or):
        s = f"{format_modal(f.left, 2)} \\/ {format_modal(f.right, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(f, And):
        s = f"{format_modal(f.left, 3)} /\\ {format_modal(f.right, 4)}"
        return f"({s})" if prec > 3 else s
    if isinstance(f, (Forall, Exists)):
        kw = "forall" if isinstance(f, Forall) else "exists"
        s = f"{kw} {f.var}. {format_modal(f.body, 0)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f"not a modal/predicate formula: {f!r}")


def modal_size(f: Formula) -> int:
    """Node count, with atoms counting one."""
    if isinstance(f, (Bottom, PAtom)):
        return 1
    if isinstance(f, Box):
        return 1 + modal_size(f.body)
    if isinstance(f, (And, Or, Imp)):
        return 1 + modal_size(f.left) + modal_size(f.right)
    if isinstance(f, (Forall, Exists)):
        return 1 + modal_size(f.body)
    raise TypeError(f"not a modal/predicate formula: {f!r}")


def subst_modal(f: Formula, var: str, value: "DConst") -> Formula:
    if isinstance(f, Bottom):
        return f
    if isinstance(f, PAtom):
        return PAtom(
            f.name,
            tuple(
                value if isinstance(a, SVar) and a.name == var else _subst_term(a, var, value)
                for a in f.args
            ),
        )
    if isinstance(f, Box):
        return Box(subst_modal(f.body, var, value))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(subst_modal(f.left, var, value), subst_modal(f.right, var, value))
    if isinstance(f, (Forall, Exists)):
        if f.var == var:
            return f
        return type(f)(f.var, subst_modal(f.body, var, value))
    raise TypeError(f"not a modal/predicate formula: {f!r}")


def _subst_term(t, var: str, value: "DConst"):
    if isinstance(t, SVar):
        return value if t.name == var else t
    if isinstance(t, SApp):
        return SApp(t.symbol, tuple(_subst_term(a, var, value) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# The box translation


def translate_g(f: Formula) -> Formula:
    """Box atoms, conditionals and universal quantifiers; leave the rest."""
    if isinstance(f, Bottom):
        return f
    if isinstance(f, PAtom):
        return Box(f)
    if isinstance(f, And):
        return And(translate_g(f.left), translate_g(f.right))
    if isinstance(f, Or):
        return Or(translate_g(f.left), translate_g(f.right))
    if isinstance(f, Imp):
        return Box(Imp(translate_g(f.left), translate_g(f.right)))
    if isinstance(f, Forall):
        return Box(Forall(f.var, translate_g(f.body)))
    if isinstance(f, Exists):
        return Exists(f.var, translate_g(f.body))
    raise TypeError(f"not a predicate-fragment formula: {f!r}")


# ---------------------------------------------------------------------------
# Models


class ModelError(Exception):
    pass


class DomainError(ModelError):
    """A term denotes an object outside the evaluating world's domain."""


@dataclass
class FOModel:
    """Shared carrier: worlds, order, expanding domains, atom valuation,
    constant and function tables (all persistent along the order)."""

    worlds: tuple[str, ...]
    order: frozenset[tuple[str, str]]
    domains: dict[str, frozenset[int]]
    valuation: frozenset[tuple[str, str, tuple[int, ...]]]  # (pred, world, args)
    constants: dict[tuple[str, str], int] = field(default_factory=dict)
    functions: dict[tuple[str, str], dict[tuple[int, ...], int]] = field(default_factory=dict)

    def le(self, u: str, v: str) -> bool:
        return (u, v) in self.order

    def above(self, w: str) -> tuple[str, ...]:
        return tuple(v for v in self.worlds if self.le(w, v))

    def holds_atom(self, name: str, w: str, args: tuple[int, ...]) -> bool:
        return (name, w, args) in self.valuation


class S4Model(FOModel):
    pass


class GModel(FOModel):
    pass


def _validate_frame(m: FOModel) -> list[str]:
    out = []
    for w in m.worlds:
        if (w, w) not in m.order:
            out.append(f"missing reflexive pair at {w}")
    for u, v in m.order:
        for x, y in m.order:
            if v == x and (u, y) not in m.order:
                out.append(f"missing transitive pair {u} {y}")
    for u, v in m.order:
        if m.le(u, v) and not m.domains[u] <= m.domains[v]:
            out.append(f"domain shrinks from {u} to {v}")
    for name, w, args in m.valuation:
        if any(a not in m.domains[w] for a in args):
            out.append(f"valuation {name}{args} at {w} uses elements outside the domain")
    for (w, c), d in m.constants.items():
        if d not in m.domains[w]:
            out.append(f"constant {c} at {w} denotes outside the domain")
        for v in m.above(w):
            if m.constants.get((v, c), d) != d:
                out.append(f"constant {c} not persistent from {w} to {v}")
    return out


def validate_s4(m: S4Model) -> list[str]:
    return _validate_frame(m)


def validate_g(m: GModel) -> list[str]:
    out = _validate_frame(m)
    for name, w, args in m.valuation:
        for v in m.above(w):
            if (name, v, args) not in m.valuation:
                out.append(f"atom {name}{args} not hereditary from {w} to {v}")
    return out


def term_value(m: FOModel, w: str, t, strict: bool = True) -> int | None:
    """Value of a closed term at a world; strict mode raises when the value
    falls outside (or a table lacks an entry for) the world's domain."""
    if isinstance(t, SVar):
        raise ModelError(f"open term: variable {t.name}")
    if isinstance(t, DConst):
        val = t.value
    elif isinstance(t, SConst):
        val = m.constants.get((w, t.name))
        if val is None:
            if strict:
                raise DomainError(f"constant {t.name} undefined at {w}")
            return None
    elif isinstance(t, SApp):
        args = []
        for a in t.args:
            v = term_value(m, w, a, strict)
            if v is None:
                return None
            args.append(v)
        table = m.functions.get((w, t.symbol))
        if table is None or tuple(args) not in table:
            if strict:
                raise DomainError(f"function {t.symbol} undefined at {w} on {tuple(args)}")
            return None
        val = table[tuple(args)]
    else:
        raise ModelError(f"not a term: {t!r}")
    if val not in m.domains[w]:
        if strict:
            raise DomainError(f"value {val} outside the domain of {w}")
        return None
    return val


def _atom_truth(m: FOModel, w: str, f: PAtom, strict: bool) -> bool:
    vals = []
    for a in f.args:
        v = term_value(m, w, a, strict)
        if v is None:
            return False
        vals.append(v)
    return m.holds_atom(f.name, w, tuple(vals))


# ---------------------------------------------------------------------------
# Forcing


def s4_forces(m: S4Model, w: str, f: Formula) -> bool:
    """Possible-world evaluation: connectives local, box universal over the
    accessible worlds, quantifiers over the current world's domain."""
    if isinstance(f, Bottom):
        return False
    if isinstance(f, PAtom):
        return _atom_truth(m, w, f, strict=True)
    if isinstance(f, Box):
        return all(s4_forces(m, v, f.body) for v in m.above(w))
    if isinstance(f, And):
        return s4_forces(m, w, f.left) and s4_forces(m, w, f.right)
    if isinstance(f, Or):
        return s4_forces(m, w, f.left) or s4_forces(m, w, f.right)
    if isinstance(f, Imp):
        return (not s4_forces(m, w, f.left)) or s4_forces(m, w, f.right)
    if isinstance(f, Forall):
        return all(s4_forces(m, w, subst_modal(f.body, f.var, DConst(d))) for d in sorted(m.domains[w]))
    if isinstance(f, Exists):
        return any(s4_forces(m, w, subst_modal(f.body, f.var, DConst(d))) for d in sorted(m.domains[w]))
    raise TypeError(f"not a modal formula: {f!r}")


def g_forces(m: GModel, w: str, f: Formula, exists_at: str = "base") -> bool:
    """Global forcing over an expanding-domain model.

    The existential clause draws its witness from each accessible world's
    domain; exists_at selects where the witnessing instance is evaluated:
    "base" evaluates it at the current world (the reading the box
    translation matches), "upper" at the accessible world.  Atoms mentioning
    elements outside a world's domain are simply false there.
    """
    if isinstance(f, Bottom):
        return False
    if isinstance(f, PAtom):
        return _atom_truth(m, w, f, strict=False)
    if isinstance(f, And):
        return g_forces(m, w, f.left, exists_at) and g_forces(m, w, f.right, exists_at)
    if isinstance(f, Or):
        return all(g_forces(m, v, f.left, exists_at) for v in m.above(w)) or all(
            g_forces(m, v, f.right, exists_at) for v in m.above(w)
        )
    if isinstance(f, Imp):
        return all(
            (not g_forces(m, v, f.left, exists_at)) or g_forces(m, v, f.right, exists_at)
            for v in m.above(w)
        )
    if isinstance(f, Forall):
        return all(
            g_forces(m, v, subst_modal(f.body, f.var, DConst(d)), exists_at)
            for v in m.above(w)
            for d in sorted(m.domains[v])
        )
    if isinstance(f, Exists):
        where = {"base": lambda v: w, "upper": lambda v: v}[exists_at]
        return all(
            any(
                g_forces(m, where(v), subst_modal(f.body, f.var, DConst(d)), exists_at)
                for d in sorted(m.domains[v])
            )
            for v in m.above(w)
        )
    if isinstance(f, Box):
        raise TypeError("box does not belong to the intuitionistic fragment")
    raise TypeError(f"not a predicate-fragment formula: {f!r}")


def g_satisfies(m: GModel, f: Formula, exists_at: str = "base") -> bool:
    return all(g_forces(m, w, f, exists_at) for w in m.worlds)


def s4_satisfies(m: S4Model, f: Formula) -> bool:
    return all(s4_forces(m, w, f) for w in m.worlds)


# ---------------------------------------------------------------------------
# Countermodel transformations


def to_s4_model(m: GModel) -> S4Model:
    """Same frame, domains and tables; the atom valuation is copied, so an
    atom is S4-true exactly where it was globally forced."""
    return S4Model(
        m.worlds,
        m.order,
        dict(m.domains),
        frozenset(m.valuation),
        dict(m.constants),
        dict(m.functions),
    )


def to_g_model(m: S4Model) -> GModel:
    """Same frame, domains and tables; an atom becomes true where it is
    S4-necessary, which makes the valuation hereditary by construction."""
    val = set()
    preds: dict[str, int] = {}
    for name, _, args in m.valuation:
        preds.setdefault(name, len(args))
    for name, arity in sorted(preds.items()):
        for w in m.worlds:
            for args in itertools.product(sorted(m.domains[w]), repeat=arity):
                if all((name, v, args) in m.valuation for v in m.above(w)):
                    val.add((name, w, args))
    return GModel(
        m.worlds,
        m.order,
        dict(m.domains),
        frozenset(val),
        dict(m.constants),
        dict(m.functions),
    )


# ---------------------------------------------------------------------------
# Model enumeration and the bounded validity oracle


def formula_signature(f: Formula) -> dict[str, int]:
    """Predicate names with arities occurring in f."""
    out: dict[str, int] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, PAtom):
            prev = out.setdefault(g.name, len(g.args))
            if prev != len(g.args):
                raise ModelError(f"predicate {g.name} used with two arities")
        elif isinstance(g, Box):
            walk(g.body)
        elif isinstance(g, (And, Or, Imp)):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Forall, Exists)):
            walk(g.body)

    walk(f)
    return out


def _frames(max_worlds: int) -> Iterator[tuple[tuple[str, ...], frozenset[tuple[str, str]]]]:
    from .search import _posets

    for n in range(1, max_worlds + 1):
        for rel_key, _ in _posets(n):
            worlds = tuple(f"w{i}" for i in range(n))
            yield worlds, frozenset((f"w{u}", f"w{v}") for u, v in rel_key)


def _domain_assignments(
    worlds: Sequence[str], order, max_domain: int
) -> Iterator[dict[str, frozenset[int]]]:
    le = lambda u, v: (u, v) in order
    for sizes in itertools.product(range(1, max_domain + 1), repeat=len(worlds)):
        ok = all(
            sizes[i] <= sizes[j]
            for i in range(len(worlds))
            for j in range(len(worlds))
            if le(worlds[i], worlds[j])
        )
        if ok:
            yield {w: frozenset(range(sizes[i])) for i, w in enumerate(worlds)}


def _instances(worlds, domains, signature) -> list[tuple[str, tuple[int, ...], tuple[str, ...]]]:
    """Per (predicate, argument tuple): the worlds where it is available."""
    out = []
    union = sorted(set().union(*domains.values()))
    for name, arity in sorted(signature.items()):
        for args in itertools.product(union, repeat=arity):
            avail = tuple(w for w in worlds if all(a in domains[w] for a in args))
            if avail:
                out.append((name, args, avail))
    return out


def enumerate_g_models(
    signature: Mapping[str, int], max_worlds: int = 3, max_domain: int = 1
) -> Iterator[GModel]:
    """Every hereditary-valuation expanding-domain model over canonical
    frames, prefix domains, and the given predicate signature."""
    for worlds, order in _frames(max_worlds):
        le = lambda u, v: (u, v) in order
        for domains in _domain_assignments(worlds, order, max_domain):
            insts = _instances(worlds, domains, signature)
            choices = []
            for name, args, avail in insts:
                sets = []
                for mask in range(1 << len(avail)):
                    chosen = {avail[i] for i in range(len(avail)) if mask >> i & 1}
                    if all(
                        (v in chosen) for w in chosen for v in avail if le(w, v)
                    ):
                        sets.append(frozenset(chosen))
                choices.append((name, args, sorted(sets, key=sorted)))
            for combo in itertools.product(*(s for _, _, s in choices)):
                val = frozenset(
                    (name, w, args)
                    for (name, args, _), chosen in zip(choices, combo)
                    for w in chosen
                )
                yield GModel(worlds, order, dict(domains), val)


def enumerate_s4_models(
    signature: Mapping[str, int], max_worlds: int = 3, max_domain: int = 1
) -> Iterator[S4Model]:
    """As above but with free (not necessarily hereditary) valuations."""
    for worlds, order in _frames(max_worlds):
        for domains in _domain_assignments(worlds, order, max_domain):
            insts = _instances(worlds, domains, signature)
            slots = [(name, args, w) for name, args, avail in insts for w in avail]
            for bits in range(1 << len(slots)):
                val = frozenset(
                    (name, w, args)
                    for i, (name, args, w) in enumerate(slots)
                    if bits >> i & 1
                )
                yield S4Model(worlds, order, dict(domains), val)


@dataclass(frozen=True)
class BoundedVerdict:
    valid_at_bounds: bool
    countermodel: GModel | None = None
    world: str | None = None
    bounds: tuple[int, int] = (3, 1)

    def __bool__(self) -> bool:
        return self.valid_at_bounds


def ipc_valid_bounded(
    f: Formula, max_worlds: int = 3, max_domain: int = 1
) -> BoundedVerdict:
    """Exhaustive search for a global-forcing countermodel within bounds.

    A hit is a replayable countermodel; a miss certifies nothing beyond the
    bounds.
    """
    signature = formula_signature(f)
    for m in enumerate_g_models(signature, max_worlds, max_domain):
        for w in m.worlds:
            if not g_forces(m, w, f):
                return BoundedVerdict(False, m, w, (max_worlds, max_domain))
    return BoundedVerdict(True, None, None, (max_worlds, max_domain))


def s4_valid_bounded(
    f: Formula, max_worlds: int = 3, max_domain: int = 1
) -> BoundedVerdict:
    signature = formula_signature(f)
    for m in enumerate_s4_models(signature, max_worlds, max_domain):
        for w in m.worlds:
            if not s4_forces(m, w, f):
                return BoundedVerdict(False, to_g_model(m), w, (max_worlds, max_domain))
    return BoundedVerdict(True, None, None, (max_worlds, max_domain))


def search_exists_clause_discrepancy(
    signature: Mapping[str, int],
    formulas: Iterable[Formula],
    max_worlds: int = 3,
    max_domain: int = 2,
) -> list[tuple[GModel, str, Formula, bool, bool]]:
    """Where the two readings of the existential clause (witness instance
    evaluated at the base world versus at the accessible world) disagree.
    The search records findings and asserts nothing; on reflexive frames the
    base conjunct supplies a local witness under either reading, so expect
    an empty result."""
    out = []
    for m in enumerate_g_models(signature, max_worlds, max_domain):
        for f in formulas:
            for w in m.worlds:
                base = g_forces(m, w, f, "base")
                upper = g_forces(m, w, f, "upper")
                if base != upper:
                    out.append((m, w, f, base, upper))
    return out


# ---------------------------------------------------------------------------
# Formula corpus and parsing


def propositional_corpus(count: int = 48) -> list[Formula]:
    """Deterministic enumeration of formulas over two nullary atoms with at
    most three connectives, smallest first."""
    p, q = PAtom("p"), PAtom("q")
    levels: list[list[Formula]] = [[p, q, BOT]]
    seen = set(levels[0])
    out: list[Formula] = list(levels[0])
    for size in range(1, 4):
        layer: list[Formula] = []
        for lsize in range(size):
            rsize = size - 1 - lsize
            for a in levels[lsize]:
                for b in levels[rsize]:
                    for cls in (Imp, And, Or):
                        f = cls(a, b)
                        if f not in seen:
                            seen.add(f)
                            layer.append(f)
        levels.append(layer)
        out.extend(layer)
        if len(out) >= count:
            break
    return out[:count]


def quantified_corpus() -> list[Formula]:
    P = lambda v: PAtom("P", (SVar(v),))
    Q = lambda v: PAtom("Q", (SVar(v),))
    q0 = PAtom("q")
    return [
        Imp(Forall("x", P("x")), Exists("x", P("x"))),
        Imp(Exists("x", P("x")), Exists("x", P("x"))),
        Imp(Or(Forall("x", P("x")), Forall("x", Q("x"))), Forall("x", Or(P("x"), Q("x")))),
        Imp(Forall("x", Or(P("x"), Q("x"))), Or(Forall("x", P("x")), Forall("x", Q("x")))),
        Imp(Exists("x", And(P("x"), Q("x"))), And(Exists("x", P("x")), Exists("x", Q("x")))),
        Imp(And(Exists("x", P("x")), Exists("x", Q("x"))), Exists("x", And(P("x"), Q("x")))),
        Imp(neg(Exists("x", P("x"))), Forall("x", neg(P("x")))),
        Imp(Forall("x", neg(P("x"))), neg(Exists("x", P("x")))),
        Imp(neg(Forall("x", P("x"))), Exists("x", neg(P("x")))),
        Imp(Forall("x", neg(neg(P("x")))), neg(neg(Forall("x", P("x"))))),
        Imp(Exists("x", P("x")), Forall("x", P("x"))),
        Imp(Forall("x", Or(P("x"), q0)), Or(Forall("x", P("x")), q0)),
    ]


def corpus() -> list[Formula]:
    """The sixty-formula test corpus: forty-eight propositional, twelve
    quantified."""
    return propositional_corpus(48) + quantified_corpus()


# ---------------------------------------------------------------------------
# Modal/predicate formula parsing and model files


class _ModalParser:
    def __init__(self, text: str):
        from .syntax import _tokenize

        self.toks = _tokenize(text.replace("[]", " box "))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.pos)
        return tok

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek().text == "->":
            self.next()
            return Imp(left, self.formula())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek().text == "\\/":
            self.next()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unary()
        while self.peek().text == "/\\":
            self.next()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "~":
            self.next()
            return neg(self.unary())
        if tok.text == "box":
            self.next()
            return Box(self.unary())
        if tok.text in ("forall", "exists"):
            self.next()
            var = self.next()
            self.expect(".")
            body = self.formula()
            return (Forall if tok.text == "forall" else Exists)(var.text, body)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.next()
        if tok.text == "bot":
            return BOT
        if tok.text == "(":
            out = self.formula()
            self.expect(")")
            return out
        if tok.kind == "ident":
            if self.peek().text == "(":
                self.next()
                args = [self.term()]
                while self.peek().text == ",":
                    self.next()
                    args.append(self.term())
                self.expect(")")
                return PAtom(tok.text, tuple(args))
            return PAtom(tok.text)
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)

    def term(self):
        tok = self.next()
        if tok.kind == "number":
            return DConst(int(tok.text))
        if tok.kind == "ident":
            if tok.text[0].islower() and len(tok.text) == 1:
                return SVar(tok.text)
            return SConst(tok.text)
        raise ParseError(f"unexpected token {tok.text!r} in term", tok.pos)


def parse_modal(text: str) -> Formula:
    p = _ModalParser(text)
    out = p.formula()
    if p.peek().text != "<eof>":
        raise ParseError(f"trailing input {p.peek().text!r}", p.peek().pos)
    return out


def load_model(text: str, kind: str = "g") -> tuple[FOModel, list[str]]:
    """Model files extend the structure format with dom and val lines."""
    worlds: list[str] = []
    le: list[tuple[str, str]] = []
    domains: dict[str, set[int]] = {}
    val: set[tuple[str, str, tuple[int, ...]]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        parts = line.split()
        head = parts[0]
        if head == "world":
            worlds.append(parts[1])
        elif head == "le":
            le.append((parts[1], parts[2]))
        elif head == "dom":
            domains.setdefault(parts[1], set()).update(int(x) for x in parts[2:])
        elif head == "val":
            val.add((parts[2], parts[1], tuple(int(x) for x in parts[3:])))
        else:
            raise ModelError(f"line {lineno}: unknown directive {head!r}")
    pairs = set(le) | {(w, w) for w in worlds}
    changed = True
    while changed:
        changed = False
        for a, b in list(pairs):
            for c, d in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    doms = {w: frozenset(domains.get(w, {0})) for w in worlds}
    cls = GModel if kind == "g" else S4Model
    m = cls(tuple(worlds), frozenset(pairs), doms, frozenset(val))
    diags = validate_g(m) if kind == "g" else validate_s4(m)
    return m, diags


def dump_model(m: FOModel) -> str:
    lines = []
    for w in m.worlds:
        lines.append(f"world {w}")
    for u, v in sorted(m.order):
        if u != v:
            lines.append(f"le {u} {v}")
    for w in m.worlds:
        lines.append(f"dom {w} {' '.join(str(d) for d in sorted(m.domains[w]))}")
    for name, w, args in sorted(m.valuation):
        tail = (" " + " ".join(str(a) for a in args)) if args else ""
        lines.append(f"val {w} {name}{tail}")
    return "\n".join(lines) + "\n"
