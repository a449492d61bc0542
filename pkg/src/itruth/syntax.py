"""Formulas and terms of an arithmetical language with a truth predicate.

The language has the logical symbols bot, ->, \\/, /\\, forall, exists,
equality atoms between arithmetical terms, and a unary truth predicate Tr
applied to a term.  Negation is not primitive: ~f is sugar for f -> bot.

Terms are built from variables, canonical numerals and a small fixed
signature: successor/addition/multiplication plus total computable
operations on codes (building the code of a conditional from two codes,
substituting into a coded formula, the code of a numeral, and so on).

Every formula and term receives a stable numeric code via a tagged Cantor
pairing.  Codes do not depend on any enumeration context, so sets of codes
can be frozen into files and compared across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache as _lru_cache
from typing import Iterable, Iterator, Sequence


class ParseError(Exception):
    """Syntax error with a character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class EvalTermError(Exception):
    """Raised for open terms or bad code arguments."""


class EvalOverflowError(EvalTermError):
    """Raised when a term's value exceeds the configured numeral limit."""


class CodeError(Exception):
    """Raised when coding an open formula through the sentence-only API."""


class DecodeError(Exception):
    """Raised when a natural number is not the code of a formula or term."""


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Num(Term):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are naturals")

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class FnApp(Term):
    symbol: str
    args: tuple[Term, ...]

    def __post_init__(self):
        arity = SIGNATURE.get(self.symbol)
        if arity is None:
            raise ValueError(f"unknown function symbol {self.symbol!r}")
        if arity != len(self.args):
            raise ValueError(f"{self.symbol} expects {arity} arguments, got {len(self.args)}")

    def __str__(self) -> str:
        return _fmt_term(self, 0)


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return _fmt_formula(self, 0)


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Tr(Formula):
    arg: Term


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


BOT = Bottom()

SentenceCode = int

# Fixed signature: name -> arity.  The dot_* symbols act on codes.
SIGNATURE = {
    "S": 1,
    "add": 2,
    "mul": 2,
    "dot_imp": 2,
    "dot_or": 2,
    "dot_and": 2,
    "dot_forall": 2,
    "dot_exists": 2,
    "dot_neg": 1,
    "dot_eq": 2,
    "dot_neq": 2,
    "dot_tr": 1,
    "num": 1,
    "subst": 3,
}

_SYM_INDEX = {name: i for i, name in enumerate(SIGNATURE)}
_SYM_BY_INDEX = {i: name for name, i in _SYM_INDEX.items()}


def neg(f: Formula) -> Formula:
    """~f, which is always represented as f -> bot."""
    return Imp(f, BOT)


def iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def conj(parts: Sequence[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


# ---------------------------------------------------------------------------
# Variables and substitution


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Num):
        return frozenset()
    return frozenset().union(*(term_vars(a) for a in t.args)) if t.args else frozenset()


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Tr):
        return term_vars(f.arg)
    if isinstance(f, (And, Or, Imp)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def subst_term(t: Term, var: str, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.name == var else t
    if isinstance(t, Num):
        return t
    return FnApp(t.symbol, tuple(subst_term(a, var, repl) for a in t.args))


def _fresh(base: str, taken: frozenset[str]) -> str:
    i = 0
    while True:
        cand = f"{base}_{i}"
        if cand not in taken:
            return cand
        i += 1


def substitute(f: Formula, var: str, repl: Term) -> Formula:
    """Capture-avoiding substitution of repl for free occurrences of var."""
    if isinstance(f, Bottom):
        return f
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, var, repl), subst_term(f.right, var, repl))
    if isinstance(f, Tr):
        return Tr(subst_term(f.arg, var, repl))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(substitute(f.left, var, repl), substitute(f.right, var, repl))
    if isinstance(f, (Forall, Exists)):
        if f.var == var:
            return f
        if f.var in term_vars(repl) and var in free_vars(f.body):
            # rename the bound variable so repl is free for var
            fresh = _fresh(f.var, free_vars(f.body) | term_vars(repl) | {var})
            body = substitute(f.body, f.var, Var(fresh))
            return type(f)(fresh, substitute(body, var, repl))
        return type(f)(f.var, substitute(f.body, var, repl))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Goedel coding: tagged Cantor pairing, independent of any universe.


def pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    # invert the Cantor pairing by integer square root
    s = (_isqrt(8 * n + 1) - 1) // 2
    b = n - s * (s + 1) // 2
    return s - b, b


def _isqrt(n: int) -> int:
    import math

    return math.isqrt(n)


def _str_code(name: str) -> int:
    data = name.encode("ascii")
    if not data or data[0] == 0:
        raise CodeError(f"bad identifier {name!r}")
    return int.from_bytes(data, "big")


def _str_decode(code: int) -> str:
    if code <= 0:
        raise DecodeError("bad identifier code")
    length = (code.bit_length() + 7) // 8
    try:
        return code.to_bytes(length, "big").decode("ascii")
    except UnicodeDecodeError as exc:
        raise DecodeError("identifier code is not ascii") from exc


def _list_code(codes: Iterable[int]) -> int:
    codes = list(codes)
    out = 0
    for c in reversed(codes):
        out = pair(c, out) + 1
    return out


def _list_decode(code: int) -> list[int]:
    out = []
    while code:
        head, code = unpair(code - 1)
        out.append(head)
    return out


_T_VAR, _T_NUM, _T_FN = 0, 1, 2
_F_BOT, _F_EQ, _F_TR, _F_AND, _F_OR, _F_IMP, _F_ALL, _F_EX = range(8)


def code_term(t: Term) -> int:
    if isinstance(t, Var):
        return pair(_T_VAR, _str_code(t.name))
    if isinstance(t, Num):
        return pair(_T_NUM, t.value)
    if isinstance(t, FnApp):
        payload = pair(_SYM_INDEX[t.symbol], _list_code(code_term(a) for a in t.args))
        return pair(_T_FN, payload)
    raise TypeError(f"not a term: {t!r}")


def decode_term(code: int) -> Term:
    if code < 0:
        raise DecodeError("negative code")
    tag, payload = unpair(code)
    if tag == _T_VAR:
        return Var(_str_decode(payload))
    if tag == _T_NUM:
        return Num(payload)
    if tag == _T_FN:
        sym_idx, arglist = unpair(payload)
        if sym_idx not in _SYM_BY_INDEX:
            raise DecodeError(f"unknown function symbol index {sym_idx}")
        symbol = _SYM_BY_INDEX[sym_idx]
        args = tuple(decode_term(c) for c in _list_decode(arglist))
        if len(args) != SIGNATURE[symbol]:
            raise DecodeError(f"arity mismatch for {symbol}")
        return FnApp(symbol, args)
    raise DecodeError(f"bad term tag {tag}")


def code_formula(f: Formula) -> int:
    """Total coder, defined for open formulas as well."""
    if isinstance(f, Bottom):
        return pair(_F_BOT, 0)
    if isinstance(f, Eq):
        return pair(_F_EQ, pair(code_term(f.left), code_term(f.right)))
    if isinstance(f, Tr):
        return pair(_F_TR, code_term(f.arg))
    if isinstance(f, And):
        return pair(_F_AND, pair(code_formula(f.left), code_formula(f.right)))
    if isinstance(f, Or):
        return pair(_F_OR, pair(code_formula(f.left), code_formula(f.right)))
    if isinstance(f, Imp):
        return pair(_F_IMP, pair(code_formula(f.left), code_formula(f.right)))
    if isinstance(f, Forall):
        return pair(_F_ALL, pair(_str_code(f.var), code_formula(f.body)))
    if isinstance(f, Exists):
        return pair(_F_EX, pair(_str_code(f.var), code_formula(f.body)))
    raise TypeError(f"not a formula: {f!r}")


def decode_formula(code: int) -> Formula:
    if code < 0:
        raise DecodeError("negative code")
    tag, payload = unpair(code)
    if tag == _F_BOT:
        if payload != 0:
            raise DecodeError("bad bottom payload")
        return BOT
    if tag == _F_EQ:
        a, b = unpair(payload)
        return Eq(decode_term(a), decode_term(b))
    if tag == _F_TR:
        return Tr(decode_term(payload))
    if tag in (_F_AND, _F_OR, _F_IMP):
        a, b = unpair(payload)
        cls = {_F_AND: And, _F_OR: Or, _F_IMP: Imp}[tag]
        return cls(decode_formula(a), decode_formula(b))
    if tag in (_F_ALL, _F_EX):
        v, b = unpair(payload)
        cls = Forall if tag == _F_ALL else Exists
        return cls(_str_decode(v), decode_formula(b))
    raise DecodeError(f"bad formula tag {tag}")


def code(f: Formula) -> SentenceCode:
    """Code of a sentence; coding an open formula is an error here."""
    if not is_sentence(f):
        raise CodeError(f"formula has free variables {sorted(free_vars(f))}: {f}")
    return code_formula(f)


def decode(c: SentenceCode) -> Formula:
    f = decode_formula(c)
    if not is_sentence(f):
        raise DecodeError(f"code {c} decodes to an open formula")
    return f


def is_sentence_code(c: int) -> bool:
    try:
        decode(c)
    except DecodeError:
        return False
    return True


def quote(f: Formula) -> Term:
    """The numeral of the code of f, usable as a term."""
    return Num(code_formula(f))


def neg_code(c: int) -> int:
    """Code of the negation of the formula coded by c."""
    return code_formula(neg(decode_formula(c)))


def unneg_code(c: int) -> int | None:
    """If c codes f -> bot, the code of f; otherwise None."""
    try:
        f = decode_formula(c)
    except DecodeError:
        return None
    if isinstance(f, Imp) and f.right == BOT:
        return code_formula(f.left)
    return None


# ---------------------------------------------------------------------------
# Term evaluation in the standard model


def eval_term(t: Term, numeral_limit: int | None = None) -> int:
    """Value of a closed term; syntactic symbols are computed on codes."""

    def check(n: int) -> int:
        if numeral_limit is not None and n > numeral_limit:
            raise EvalOverflowError(f"value {n} exceeds the numeral limit {numeral_limit}")
        return n

    if isinstance(t, Var):
        raise EvalTermError(f"open term: variable {t.name}")
    if isinstance(t, Num):
        return check(t.value)
    vals = [eval_term(a, numeral_limit) for a in t.args]
    sym = t.symbol
    if sym == "S":
        return check(vals[0] + 1)
    if sym == "add":
        return check(vals[0] + vals[1])
    if sym == "mul":
        return check(vals[0] * vals[1])
    if sym in ("dot_imp", "dot_or", "dot_and"):
        cls = {"dot_imp": Imp, "dot_or": Or, "dot_and": And}[sym]
        try:
            return code_formula(cls(decode_formula(vals[0]), decode_formula(vals[1])))
        except DecodeError as exc:
            raise EvalTermError(f"{sym}: argument is not a formula code") from exc
    if sym in ("dot_forall", "dot_exists"):
        try:
            var = decode_term(vals[0])
        except DecodeError as exc:
            raise EvalTermError(f"{sym}: first argument is not a term code") from exc
        if not isinstance(var, Var):
            raise EvalTermError(f"{sym}: first argument must code a variable")
        try:
            body = decode_formula(vals[1])
        except DecodeError as exc:
            raise EvalTermError(f"{sym}: second argument is not a formula code") from exc
        cls = Forall if sym == "dot_forall" else Exists
        return code_formula(cls(var.name, body))
    if sym == "dot_neg":
        try:
            return code_formula(neg(decode_formula(vals[0])))
        except DecodeError as exc:
            raise EvalTermError("dot_neg: argument is not a formula code") from exc
    if sym in ("dot_eq", "dot_neq"):
        try:
            a, b = decode_term(vals[0]), decode_term(vals[1])
        except DecodeError as exc:
            raise EvalTermError(f"{sym}: argument is not a term code") from exc
        f: Formula = Eq(a, b)
        if sym == "dot_neq":
            f = neg(f)
        return code_formula(f)
    if sym == "dot_tr":
        try:
            arg = decode_term(vals[0])
        except DecodeError as exc:
            raise EvalTermError("dot_tr: argument is not a term code") from exc
        return code_formula(Tr(arg))
    if sym == "num":
        return code_term(Num(vals[0]))
    if sym == "subst":
        try:
            f = decode_formula(vals[0])
            repl = decode_term(vals[1])
            var = decode_term(vals[2])
        except DecodeError as exc:
            raise EvalTermError("subst: bad code argument") from exc
        if not isinstance(var, Var):
            raise EvalTermError("subst: third argument must code a variable")
        return code_formula(substitute(f, var.name, repl))
    raise EvalTermError(f"unknown symbol {sym}")


@_lru_cache(maxsize=None)
def eval_term_cached(t: Term) -> int:
    """eval_term without a limit, memoized; safe because terms are immutable."""
    return eval_term(t)


# ---------------------------------------------------------------------------
# Printer


def _fmt_term(t: Term, prec: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Num):
        return str(t.value)
    if t.symbol == "add":
        s = f"{_fmt_term(t.args[0], 1)} + {_fmt_term(t.args[1], 2)}"
        return f"({s})" if prec > 1 else s
    if t.symbol == "mul":
        s = f"{_fmt_term(t.args[0], 2)} * {_fmt_term(t.args[1], 3)}"
        return f"({s})" if prec > 2 else s
    return f"{t.symbol}({', '.join(_fmt_term(a, 0) for a in t.args)})"


def _fmt_formula(f: Formula, prec: int) -> str:
    # precedence: quantifier body lowest, then -> (1), \/ (2), /\ (3), ~ and atoms (4)
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, Eq):
        return f"{_fmt_term(f.left, 0)} = {_fmt_term(f.right, 0)}"
    if isinstance(f, Tr):
        return f"Tr({_fmt_term(f.arg, 0)})"
    if isinstance(f, Imp):
        if f.right == BOT:
            inner = _fmt_formula(f.left, 4)
            if isinstance(f.left, Eq):
                inner = f"({inner})"
            return f"~{inner}"
        s = f"{_fmt_formula(f.left, 2)} -> {_fmt_formula(f.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, Or):
        s = f"{_fmt_formula(f.left, 2)} \\/ {_fmt_formula(f.right, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(f, And):
        s = f"{_fmt_formula(f.left, 3)} /\\ {_fmt_formula(f.right, 4)}"
        return f"({s})" if prec > 3 else s
    if isinstance(f, (Forall, Exists)):
        kw = "forall" if isinstance(f, Forall) else "exists"
        s = f"{kw} {f.var}. {_fmt_formula(f.body, 0)}"
        return f"({s})" if prec > 0 else s
    if _extension_formatter is not None:
        return _extension_formatter(f, prec)
    raise TypeError(f"not a formula: {f!r}")


_extension_formatter = None


def register_extension_formatter(fn) -> None:
    """Hook for modules that extend the formula algebra with new leaves."""
    global _extension_formatter
    _extension_formatter = fn


def pretty(f: Formula) -> str:
    return _fmt_formula(f, 0)


# ---------------------------------------------------------------------------
# Parser: recursive descent over a small token stream


_TWO_CHAR = ("->", "/\\", "\\/", '#"')
_ONE_CHAR = "()=,.~+*\""
_KEYWORDS = {"bot", "Tr", "forall", "exists"}


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | number | op | quote
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith('#"', i):
            # quotation: scan to the matching quote, allowing nesting
            depth, j = 1, i + 2
            while j < n and depth:
                if text.startswith('#"', j):
                    depth += 1
                    j += 2
                elif text[j] == '"':
                    depth -= 1
                    j += 1
                else:
                    j += 1
            if depth:
                raise ParseError("unterminated quotation", i)
            toks.append(_Token("quote", text[i + 2 : j - 1], i))
            i = j
            continue
        two = text[i : i + 2]
        if two in _TWO_CHAR:
            toks.append(_Token("op", two, i))
            i += 2
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Token("number", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch in _ONE_CHAR:
            toks.append(_Token("op", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(_Token("op", "<eof>", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.pos)
        return tok

    # formulas -------------------------------------------------------------

    def formula(self) -> Formula:
        return self.imp()

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek().text == "->":
            self.next()
            return Imp(left, self.imp())
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
        if tok.text in ("forall", "exists"):
            self.next()
            var = self.next()
            if var.kind != "ident" or var.text in _KEYWORDS or var.text in SIGNATURE:
                raise ParseError("expected a variable name", var.pos)
            self.expect(".")
            body = self.formula()
            return (Forall if tok.text == "forall" else Exists)(var.text, body)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.text == "bot":
            self.next()
            return BOT
        if tok.text == "Tr":
            self.next()
            self.expect("(")
            arg = self.term()
            self.expect(")")
            return Tr(arg)
        if tok.text == "(":
            # could open a parenthesised formula or the left term of an equation
            save = self.i
            try:
                self.next()
                inner = self.formula()
                self.expect(")")
                if self.peek().text == "=":
                    raise ParseError("term expected", tok.pos)
                return inner
            except ParseError:
                self.i = save
        left = self.term()
        self.expect("=")
        right = self.term()
        return Eq(left, right)

    # terms ----------------------------------------------------------------

    def term(self) -> Term:
        out = self.mul_term()
        while self.peek().text == "+":
            self.next()
            out = FnApp("add", (out, self.mul_term()))
        return out

    def mul_term(self) -> Term:
        out = self.primary()
        while self.peek().text == "*":
            self.next()
            out = FnApp("mul", (out, self.primary()))
        return out

    def primary(self) -> Term:
        tok = self.next()
        if tok.kind == "number":
            return Num(int(tok.text))
        if tok.kind == "quote":
            inner = parse(tok.text)
            return Num(code_formula(inner))
        if tok.text == "(":
            out = self.term()
            self.expect(")")
            return out
        if tok.kind == "ident":
            if tok.text in SIGNATURE:
                self.expect("(")
                args = [self.term()]
                while self.peek().text == ",":
                    self.next()
                    args.append(self.term())
                self.expect(")")
                return FnApp(tok.text, tuple(args))
            if tok.text in _KEYWORDS:
                raise ParseError(f"{tok.text!r} cannot start a term", tok.pos)
            return Var(tok.text)
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)


def parse(text: str) -> Formula:
    """Parse the ASCII grammar; precedence ~ > /\\ > \\/ > ->, -> right-assoc."""
    p = _Parser(text)
    out = p.formula()
    tok = p.peek()
    if tok.text != "<eof>":
        raise ParseError(f"trailing input {tok.text!r}", tok.pos)
    return out


def parse_term(text: str) -> Term:
    p = _Parser(text)
    out = p.term()
    tok = p.peek()
    if tok.text != "<eof>":
        raise ParseError(f"trailing input {tok.text!r}", tok.pos)
    return out


# ---------------------------------------------------------------------------
# Bounded sentence universes


class UniverseError(Exception):
    pass


class Universe:
    """A finite, deterministically ordered set of sentence codes.

    Construction is either explicit (from_formulas) or generative: starting
    from seed atoms, each depth level closes the current members under the
    requested operations (negation, pairwise disjunction/conjunction of
    distinct members in enumeration order, truth ascription Tr of the quote).
    """

    def __init__(self, formulas: Sequence[Formula], params: dict | None = None):
        seen: dict[int, Formula] = {}
        for f in formulas:
            if not is_sentence(f):
                raise UniverseError(f"universe members must be sentences: {f}")
            c = code_formula(f)
            if c not in seen:
                seen[c] = f
        self._codes: tuple[int, ...] = tuple(seen)
        self._formulas: tuple[Formula, ...] = tuple(seen.values())
        self._index = {c: i for i, c in enumerate(self._codes)}
        self.params = dict(params or {})

    @classmethod
    def from_formulas(cls, formulas: Iterable[Formula]) -> "Universe":
        return cls(list(formulas), {"kind": "explicit"})

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "Universe":
        return cls([parse(t) for t in texts], {"kind": "explicit"})

    @classmethod
    def generate(
        cls,
        atoms: Sequence[Formula],
        depth: int = 1,
        ops: Iterable[str] = ("neg", "or", "and"),
    ) -> "Universe":
        ops = tuple(ops)
        bad = set(ops) - {"neg", "or", "and", "tr"}
        if bad:
            raise UniverseError(f"unknown closure ops {sorted(bad)}")
        members: list[Formula] = list(atoms)
        for _ in range(depth):
            layer = list(members)
            for op in ops:
                if op == "neg":
                    members.extend(neg(f) for f in layer)
                elif op == "or":
                    members.extend(Or(a, b) for i, a in enumerate(layer) for b in layer[i + 1 :])
                elif op == "and":
                    members.extend(And(a, b) for i, a in enumerate(layer) for b in layer[i + 1 :])
                elif op == "tr":
                    members.extend(Tr(quote(f)) for f in layer)
        return cls(members, {"kind": "generated", "depth": depth, "ops": list(ops)})

    def __eq__(self, other) -> bool:
        return isinstance(other, Universe) and self._codes == other._codes

    def __hash__(self) -> int:
        return hash(self._codes)

    @property
    def codes(self) -> tuple[int, ...]:
        return self._codes

    @property
    def formulas(self) -> tuple[Formula, ...]:
        return self._formulas

    def __len__(self) -> int:
        return len(self._codes)

    def __contains__(self, c: int) -> bool:
        return c in self._index

    def __iter__(self) -> Iterator[int]:
        return iter(self._codes)

    def index(self, c: int) -> int:
        return self._index[c]

    def formula(self, c: int) -> Formula:
        return self._formulas[self._index[c]]

    def mask_of(self, codes: Iterable[int]) -> int:
        m = 0
        for c in codes:
            i = self._index.get(c)
            if i is None:
                raise UniverseError(f"code {c} is not a universe member")
            m |= 1 << i
        return m

    def codes_of(self, mask: int) -> frozenset[int]:
        return frozenset(c for i, c in enumerate(self._codes) if mask >> i & 1)

    def neg_partner(self, i: int) -> int | None:
        """Index of the member that is the negation of member i, if present."""
        c = neg_code(self._codes[i])
        return self._index.get(c)

    def unneg_partner(self, i: int) -> int | None:
        """Index of the member f when member i is f -> bot, if present."""
        c = unneg_code(self._codes[i])
        return self._index.get(c) if c is not None else None

    def negation_pairs(self) -> tuple[tuple[int, int], ...]:
        """All index pairs (i, j) with member j the negation of member i."""
        out = []
        for i in range(len(self._codes)):
            j = self.neg_partner(i)
            if j is not None:
                out.append((i, j))
        return tuple(out)

    @property
    def mci_ready(self) -> bool:
        """Every member belongs to some negation pair inside the universe."""
        paired = set()
        for i, j in self.negation_pairs():
            paired.add(i)
            paired.add(j)
        return len(paired) == len(self._codes)

    def describe(self) -> list[str]:
        return [str(f) for f in self._formulas]
