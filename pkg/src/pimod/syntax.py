"""Concrete syntax: a lexer, parsers for the file formats, and printers.

One token language serves every format.  Identifiers are liberal — they
may start with a digit and may contain ``@``, ``%`` and ``'`` — because
generated constant names embed mangled sort names.  Declarations end
with a period; the same character separates a binder from its body, and
the two uses never clash because a binder's body is always a complete
term.

Terms print back out in the same grammar the parsers accept, with
binder hints freshened against everything in scope, so parse-print
round trips are identities on the underlying de Bruijn terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import ParseError, Span
from .terms import (
    KIND,
    TYPE,
    App,
    Cons,
    Declaration,
    DkContext,
    DkTerm,
    Kind,
    Lam,
    Meta,
    Pi,
    RewriteRule,
    Theory,
    Type,
    Var,
    arrow,
    shift,
)
from .epts import (
    EApp,
    ELam,
    EPi,
    ESort,
    EVar,
    EptsContext,
    EptsTerm,
    FiniteSortSpec,
    InternalizedSortSpec,
    PApp,
    PLam,
    PPi,
    PSort,
    PVar,
    PtsTerm,
    SortSpec,
    pts_shift,
)


KEYWORDS = frozenset({
    "TYPE", "KIND", "Pi", "lam",
    "constant", "rule", "assume", "check", "def", "map",
})


# --- lexer --------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "string" | "punct" | "eof"
    text: str
    line: int
    col: int


_IDENT = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_@%']*")
_PUNCT = ("-->", "->", ":=", "(", ")", "{", "}", "[", "]", ",", ":", ".")


def lex(text: str, source: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j == n or text[j] != '"':
                raise ParseError("unterminated string literal", Span(source, line, col))
            toks.append(Token("string", text[i + 1:j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        m = _IDENT.match(text, i)
        if m:
            toks.append(Token("ident", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", Span(source, line, col))
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks: list[Token], source: str):
        self.toks = toks
        self.i = 0
        self.source = source

    def peek(self) -> Token:
        return self.toks[self.i]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def eat(self, kind: str, text: str | None = None) -> bool:
        if self.at(kind, text):
            self.advance()
            return True
        return False

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            raise self.fail(f"expected {text or kind}")
        return self.advance()

    def fail(self, msg: str) -> ParseError:
        t = self.peek()
        found = f", found {t.text!r}" if t.text else " at end of input"
        return ParseError(msg + found, Span(self.source, t.line, t.col))

    def ident(self, what: str = "an identifier") -> str:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.fail(f"expected {what}")
        return self.advance().text


# --- framework terms ------------------------------------------------------------


@dataclass
class _DkEnv:
    """Scope for framework term parsing.

    ``known`` maps constants to their arities; when ``metas`` is set,
    identifiers that resolve to nothing become pattern variables instead
    of errors (rule mode).
    """

    known: dict[str, int]
    stack: list[str] = field(default_factory=list)
    metas: bool = False


def _dk_term(p: _Parser, env: _DkEnv) -> DkTerm:
    if p.at("ident", "Pi") or p.at("ident", "lam"):
        kw = p.advance().text
        name = p.ident("a binder name")
        p.expect("punct", ":")
        ann = _dk_term(p, env)
        p.expect("punct", ".")
        env.stack.append(name)
        try:
            body = _dk_term(p, env)
        finally:
            env.stack.pop()
        return Pi(name, ann, body) if kw == "Pi" else Lam(name, ann, body)
    left = _dk_app(p, env)
    if p.eat("punct", "->"):
        return arrow(left, _dk_term(p, env))
    return left


def _starts_atom(p: _Parser) -> bool:
    t = p.peek()
    if t.kind == "punct" and t.text == "(":
        return True
    return t.kind == "ident" and (t.text in ("TYPE", "KIND") or t.text not in KEYWORDS)


def _dk_app(p: _Parser, env: _DkEnv) -> DkTerm:
    t = _dk_atom(p, env)
    while _starts_atom(p):
        t = App(t, _dk_atom(p, env))
    return t


def _dk_atom(p: _Parser, env: _DkEnv) -> DkTerm:
    if p.eat("punct", "("):
        t = _dk_term(p, env)
        p.expect("punct", ")")
        return t
    tok = p.peek()
    if tok.kind != "ident":
        raise p.fail("expected a term")
    name = tok.text
    if name == "TYPE":
        p.advance()
        return TYPE
    if name == "KIND":
        p.advance()
        return KIND
    if name in KEYWORDS:
        raise p.fail("expected a term")
    p.advance()
    for depth, bound in enumerate(reversed(env.stack)):
        if bound == name:
            return Var(depth)
    if name in env.known:
        arity = env.known[name]
        if arity == 0:
            return Cons(name)
        p.expect("punct", "(")
        args = [_dk_term(p, env)]
        while p.eat("punct", ","):
            args.append(_dk_term(p, env))
        p.expect("punct", ")")
        if len(args) != arity:
            raise p.fail(f"constant '{name}' takes {arity} arguments, got {len(args)}")
        return Cons(name, tuple(args))
    if env.metas:
        return Meta(name)
    raise p.fail(f"unknown identifier '{name}'")


def parse_dk_term(text: str, theory: Theory, names: Sequence[str] = (),
                  metas: bool = False, source: str = "<term>") -> DkTerm:
    """Parse one framework term against a theory's signature."""
    p = _Parser(lex(text, source), source)
    env = _DkEnv({d.name: d.arity for d in theory.signature}, list(names), metas)
    t = _dk_term(p, env)
    p.expect("eof")
    return t


# --- theory files ----------------------------------------------------------------


@dataclass
class TheoryFile:
    """Payload of a theory file: the theory plus its test judgments."""

    theory: Theory
    assumes: DkContext
    checks: tuple[tuple[DkTerm, DkTerm], ...]


def parse_theory(text: str, source: str = "<theory>") -> TheoryFile:
    p = _Parser(lex(text, source), source)
    decls: list[Declaration] = []
    rules: list[RewriteRule] = []
    known: dict[str, int] = {}
    assumes = DkContext()
    anames: list[str] = []
    checks: list[tuple[DkTerm, DkTerm]] = []

    while not p.at("eof"):
        if p.eat("ident", "constant"):
            name = p.ident("a constant name")
            telescope: list[tuple[str, DkTerm]] = []
            tnames: list[str] = []
            if p.eat("punct", "("):
                while True:
                    h = p.ident("a telescope variable")
                    p.expect("punct", ":")
                    ty = _dk_term(p, _DkEnv(known, list(tnames)))
                    telescope.append((h, ty))
                    tnames.append(h)
                    if not p.eat("punct", ","):
                        break
                p.expect("punct", ")")
            p.expect("punct", ":")
            result = _dk_term(p, _DkEnv(known, list(tnames)))
            p.expect("punct", ".")
            decls.append(Declaration(name, tuple(telescope), result))
            known[name] = len(telescope)
        elif p.eat("ident", "rule"):
            label = p.advance().text if p.at("string") else f"rule-{len(rules)}"
            lhs = _dk_term(p, _DkEnv(known, [], metas=True))
            p.expect("punct", "-->")
            rhs = _dk_term(p, _DkEnv(known, [], metas=True))
            p.expect("punct", ".")
            match lhs:
                case Cons(head, args):
                    rules.append(RewriteRule(head, args, rhs, name=label))
                case _:
                    raise p.fail("a rule's left-hand side must be a constant application")
        elif p.eat("ident", "assume"):
            name = p.ident("a variable name")
            p.expect("punct", ":")
            ty = _dk_term(p, _DkEnv(known, list(anames)))
            p.expect("punct", ".")
            assumes = assumes.extend(name, ty)
            anames.append(name)
        elif p.eat("ident", "check"):
            m = _dk_term(p, _DkEnv(known, list(anames)))
            p.expect("punct", ":")
            a = _dk_term(p, _DkEnv(known, list(anames)))
            p.expect("punct", ".")
            checks.append((m, a))
        else:
            raise p.fail("expected 'constant', 'rule', 'assume' or 'check'")

    return TheoryFile(Theory(tuple(decls), tuple(rules)), assumes, tuple(checks))


# --- implicit PTS files ------------------------------------------------------------


@dataclass
class EptsJudgment:
    name: str
    term: PtsTerm
    type: PtsTerm


@dataclass
class EptsFile:
    """Assumptions, named abbreviations and the judgments they induce.

    Definitions are inlined at parse time (a ``def`` is an abbreviation,
    not a new binder), so every recorded term is expressed over the
    assumption context alone.  Typed definitions additionally contribute
    a judgment.
    """

    assumes: tuple[tuple[str, PtsTerm], ...]
    definitions: tuple[tuple[str, PtsTerm], ...]
    judgments: tuple[EptsJudgment, ...]


@dataclass
class _PtsEnv:
    spec: SortSpec
    stack: list[str] = field(default_factory=list)
    defs: dict[str, tuple[PtsTerm, int]] = field(default_factory=dict)


def _pts_term(p: _Parser, env: _PtsEnv) -> PtsTerm:
    if p.at("ident", "Pi") or p.at("ident", "lam"):
        kw = p.advance().text
        name = p.ident("a binder name")
        p.expect("punct", ":")
        ann = _pts_term(p, env)
        p.expect("punct", ".")
        env.stack.append(name)
        try:
            body = _pts_term(p, env)
        finally:
            env.stack.pop()
        return PPi(name, ann, body) if kw == "Pi" else PLam(name, ann, body)
    left = _pts_app(p, env)
    if p.eat("punct", "->"):
        right = _pts_term(p, env)
        return PPi("_", left, pts_shift(right, 1))
    return left


def _pts_app(p: _Parser, env: _PtsEnv) -> PtsTerm:
    t = _pts_atom(p, env)
    while _starts_atom(p):
        t = PApp(t, _pts_atom(p, env))
    return t


def _pts_atom(p: _Parser, env: _PtsEnv) -> PtsTerm:
    if p.eat("punct", "("):
        t = _pts_term(p, env)
        p.expect("punct", ")")
        return t
    tok = p.peek()
    if tok.kind != "ident" or tok.text in KEYWORDS:
        raise p.fail("expected a term")
    name = p.advance().text
    for depth, bound in enumerate(reversed(env.stack)):
        if bound == name:
            return PVar(depth)
    if name in env.defs:
        body, base = env.defs[name]
        return pts_shift(body, len(env.stack) - base)
    if env.spec.has_sort(name):
        return PSort(name)
    raise p.fail(f"unknown identifier '{name}'")


def parse_pts_term(text: str, spec: SortSpec, names: Sequence[str] = (),
                   defs: dict[str, PtsTerm] | None = None,
                   source: str = "<term>") -> PtsTerm:
    """Parse one implicit-syntax term; ``defs`` are inlined abbreviations.

    Definition bodies must be expressed over exactly the ``names`` context.
    """
    p = _Parser(lex(text, source), source)
    env = _PtsEnv(spec, list(names),
                  {n: (b, len(names)) for n, b in (defs or {}).items()})
    t = _pts_term(p, env)
    p.expect("eof")
    return t


def parse_epts_file(text: str, spec: SortSpec,
                    source: str = "<judgments>") -> EptsFile:
    p = _Parser(lex(text, source), source)
    env = _PtsEnv(spec)
    assumes: list[tuple[str, PtsTerm]] = []
    defs_in_order: list[tuple[str, PtsTerm, int]] = []
    pending: list[tuple[str, PtsTerm, PtsTerm, int]] = []

    while not p.at("eof"):
        if p.eat("ident", "assume"):
            name = p.ident("a variable name")
            if name in env.defs or spec.has_sort(name):
                raise p.fail(f"'{name}' is already a definition or a sort")
            p.expect("punct", ":")
            ty = _pts_term(p, env)
            p.expect("punct", ".")
            assumes.append((name, ty))
            env.stack.append(name)
        elif p.eat("ident", "def"):
            name = p.ident("a definition name")
            if name in env.defs or spec.has_sort(name) or name in env.stack:
                raise p.fail(f"'{name}' is already bound")
            ty: PtsTerm | None = None
            if p.eat("punct", ":"):
                ty = _pts_term(p, env)
            p.expect("punct", ":=")
            body = _pts_term(p, env)
            p.expect("punct", ".")
            env.defs[name] = (body, len(env.stack))
            defs_in_order.append((name, body, len(env.stack)))
            if ty is not None:
                pending.append((name, body, ty, len(env.stack)))
        else:
            raise p.fail("expected 'assume' or 'def'")

    total = len(env.stack)
    definitions = tuple((n, pts_shift(b, total - base))
                        for n, b, base in defs_in_order)
    judgments = tuple(
        EptsJudgment(n, pts_shift(b, total - base), pts_shift(ty, total - base))
        for n, b, ty, base in pending)
    return EptsFile(tuple(assumes), definitions, judgments)


def render_epts_file(f: EptsFile) -> str:
    """A judgments file equivalent to ``f`` (definitions stay inlined)."""
    avoid = set(n for n, _ in f.definitions) | {j.name for j in f.judgments}
    typed = {j.name: j.type for j in f.judgments}
    lines = []
    acc: list[str] = []
    for h, ty in f.assumes:
        name = _fresh(h, acc, avoid)
        lines.append(f"assume {name} : {_r_pts(ty, acc, 0, avoid)}.")
        acc.append(name)
    for n, body in f.definitions:
        ann = f" : {_r_pts(typed[n], acc, 0, avoid)}" if n in typed else ""
        lines.append(f"def {n}{ann} := {_r_pts(body, acc, 0, avoid)}.")
    return "\n".join(lines) + "\n"


# --- sort specification files ---------------------------------------------------


@dataclass
class SortSpecFile:
    finite: FiniteSortSpec | None
    internalized: InternalizedSortSpec | None


_SECTION = re.compile(r"^\[(sorts|axioms|rules|internalized)\]\s*$")
_AXIOM_LINE = re.compile(r"^(\S+)\s*:\s*(\S+)$")
_RULE_LINE = re.compile(r"^\(\s*(\S+?)\s*,\s*(\S+?)\s*\)\s*:\s*(\S+)$")


def _parse_internalized(text: str, source: str) -> InternalizedSortSpec:
    p = _Parser(lex(text, source), source)
    known: dict[str, int] = {"Sort": 0, "Ax": 1, "Ru": 2}
    constants: list[Declaration] = []
    rules: list[RewriteRule] = []
    named: dict[str, DkTerm] = {}
    while not p.at("eof"):
        if p.eat("ident", "constant"):
            name = p.ident("a sort former")
            telescope: list[tuple[str, DkTerm]] = []
            tnames: list[str] = []
            if p.eat("punct", "("):
                while True:
                    h = p.ident("a telescope variable")
                    p.expect("punct", ":")
                    telescope.append((h, _dk_term(p, _DkEnv(known, list(tnames)))))
                    tnames.append(h)
                    if not p.eat("punct", ","):
                        break
                p.expect("punct", ")")
            p.expect("punct", ":")
            result = _dk_term(p, _DkEnv(known, list(tnames)))
            p.expect("punct", ".")
            constants.append(Declaration(name, tuple(telescope), result))
            known[name] = len(telescope)
        elif p.eat("ident", "rule"):
            label = p.advance().text if p.at("string") else f"sort-rule-{len(rules)}"
            lhs = _dk_term(p, _DkEnv(known, [], metas=True))
            p.expect("punct", "-->")
            rhs = _dk_term(p, _DkEnv(known, [], metas=True))
            p.expect("punct", ".")
            match lhs:
                case Cons(head, args):
                    rules.append(RewriteRule(head, args, rhs, name=label))
                case _:
                    raise p.fail("a rule's left-hand side must be a constant application")
        else:
            name = p.ident("a sort name")
            p.expect("punct", ":=")
            named[name] = _dk_term(p, _DkEnv(known, []))
            p.expect("punct", ".")
    return InternalizedSortSpec(tuple(constants), tuple(rules), named)


def parse_sort_spec_file(text: str, source: str = "<sorts>") -> SortSpecFile:
    """Line-oriented tables, with an optional token-parsed internalization."""
    section = None
    sorts: list[str] = []
    axioms: list[tuple[str, str]] = []
    rules: list[tuple[str, str, str]] = []
    internal_lines: list[str] = []
    saw_finite = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if section == "internalized":
            internal_lines.append(raw)
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            if section != "internalized":
                saw_finite = True
            continue
        where = Span(source, lineno, 1)
        if section == "sorts":
            sorts.extend(line.split())
        elif section == "axioms":
            m = _AXIOM_LINE.match(line)
            if not m:
                raise ParseError("expected 'SORT : SORT'", where)
            axioms.append((m.group(1), m.group(2)))
        elif section == "rules":
            m = _RULE_LINE.match(line)
            if not m:
                raise ParseError("expected '(SORT, SORT) : SORT'", where)
            rules.append((m.group(1), m.group(2), m.group(3)))
        else:
            raise ParseError("content before the first section header", where)

    finite = FiniteSortSpec.build(sorts, axioms, rules) if saw_finite else None
    internalized = None
    if internal_lines:
        internalized = _parse_internalized("\n".join(internal_lines), source)
    return SortSpecFile(finite, internalized)


# --- morphism files ---------------------------------------------------------------


def parse_morphism(text: str, src: Theory, dst: Theory,
                   source: str = "<morphism>") -> "TheoryMorphism":
    from .morphism import TheoryMorphism

    p = _Parser(lex(text, source), source)
    known = {d.name: d.arity for d in dst.signature}
    body: dict[str, DkTerm] = {}
    while not p.at("eof"):
        p.expect("ident", "map")
        name = p.ident("a source constant")
        decl = src.decl(name)
        if decl is None:
            raise p.fail(f"'{name}' is not declared by the source theory")
        if name in body:
            raise p.fail(f"'{name}' is mapped twice")
        p.expect("punct", ":=")
        stack = [h for h, _ in decl.telescope]
        body[name] = _dk_term(p, _DkEnv(known, stack))
        p.expect("punct", ".")
    return TheoryMorphism(src, dst, body)


# --- printers ----------------------------------------------------------------------


def _fresh(base: str, env: list[str], avoid: set[str]) -> str:
    name = base if base and base != "_" else "x"
    while name in env or name in avoid or name in KEYWORDS:
        name += "'"
    return name


def _var_name(k: int, env: list[str]) -> str:
    if 0 <= k < len(env):
        return env[len(env) - 1 - k]
    return f"_v{k - len(env)}"


def _dk_uses(t: DkTerm, j: int) -> bool:
    match t:
        case Var(k):
            return k == j
        case Cons(_, args):
            return any(_dk_uses(a, j) for a in args)
        case App(f, a):
            return _dk_uses(f, j) or _dk_uses(a, j)
        case Lam(_, ann, body):
            return _dk_uses(ann, j) or _dk_uses(body, j + 1)
        case Pi(_, dom, cod):
            return _dk_uses(dom, j) or _dk_uses(cod, j + 1)
        case _:
            return False


def _r_dk(t: DkTerm, env: list[str], prec: int, avoid: set[str]) -> str:
    match t:
        case Type():
            return "TYPE"
        case Kind():
            return "KIND"
        case Var(k):
            return _var_name(k, env)
        case Meta(name):
            return name
        case Cons(c, ()):
            return c
        case Cons(c, args):
            inner = ", ".join(_r_dk(a, env, 0, avoid) for a in args)
            return f"{c}({inner})"
        case App(f, a):
            s = f"{_r_dk(f, env, 1, avoid)} {_r_dk(a, env, 2, avoid)}"
            return s if prec <= 1 else f"({s})"
        case Lam(h, ann, body):
            name = _fresh(h, env, avoid)
            s = (f"lam {name} : {_r_dk(ann, env, 0, avoid)}. "
                 f"{_r_dk(body, env + [name], 0, avoid)}")
            return s if prec == 0 else f"({s})"
        case Pi(h, dom, cod):
            if not _dk_uses(cod, 0):
                s = (f"{_r_dk(dom, env, 1, avoid)} -> "
                     f"{_r_dk(shift(cod, -1, 1), env, 0, avoid)}")
            else:
                name = _fresh(h, env, avoid)
                s = (f"Pi {name} : {_r_dk(dom, env, 0, avoid)}. "
                     f"{_r_dk(cod, env + [name], 0, avoid)}")
            return s if prec == 0 else f"({s})"
    raise TypeError(f"not a framework term: {t!r}")


def _pts_uses(t: PtsTerm, j: int) -> bool:
    match t:
        case PVar(k):
            return k == j
        case PApp(f, a):
            return _pts_uses(f, j) or _pts_uses(a, j)
        case PLam(_, dom, body):
            return _pts_uses(dom, j) or _pts_uses(body, j + 1)
        case PPi(_, dom, cod):
            return _pts_uses(dom, j) or _pts_uses(cod, j + 1)
        case _:
            return False


def _r_pts(t: PtsTerm, env: list[str], prec: int, avoid: set[str]) -> str:
    match t:
        case PSort(s):
            return s
        case PVar(k):
            return _var_name(k, env)
        case PApp(f, a):
            s = f"{_r_pts(f, env, 1, avoid)} {_r_pts(a, env, 2, avoid)}"
            return s if prec <= 1 else f"({s})"
        case PLam(h, dom, body):
            name = _fresh(h, env, avoid)
            s = (f"lam {name} : {_r_pts(dom, env, 0, avoid)}. "
                 f"{_r_pts(body, env + [name], 0, avoid)}")
            return s if prec == 0 else f"({s})"
        case PPi(h, dom, cod):
            if not _pts_uses(cod, 0):
                s = (f"{_r_pts(dom, env, 1, avoid)} -> "
                     f"{_r_pts(pts_shift(cod, -1, 1), env, 0, avoid)}")
            else:
                name = _fresh(h, env, avoid)
                s = (f"Pi {name} : {_r_pts(dom, env, 0, avoid)}. "
                     f"{_r_pts(cod, env + [name], 0, avoid)}")
            return s if prec == 0 else f"({s})"
    raise TypeError(f"not a PTS term: {t!r}")


def _r_epts(t: EptsTerm, env: list[str], avoid: set[str]) -> str:
    """Explicit syntax is printed (for reports), never parsed back."""
    match t:
        case ESort(s):
            return s
        case EVar(k):
            return _var_name(k, env)
        case EPi(s1, s2, dom, h, cod):
            name = _fresh(h, env, avoid)
            return (f"Pi{{{s1},{s2}}}({_r_epts(dom, env, avoid)}, "
                    f"{name}. {_r_epts(cod, env + [name], avoid)})")
        case ELam(s1, s2, dom, h, cod, body):
            name = _fresh(h, env, avoid)
            inner = env + [name]
            return (f"lam{{{s1},{s2}}}({_r_epts(dom, env, avoid)}, "
                    f"{name}. {_r_epts(cod, inner, avoid)}, "
                    f"{name}. {_r_epts(body, inner, avoid)})")
        case EApp(s1, s2, dom, h, cod, fn, arg):
            name = _fresh(h, env, avoid)
            return (f"app{{{s1},{s2}}}({_r_epts(dom, env, avoid)}, "
                    f"{name}. {_r_epts(cod, env + [name], avoid)}, "
                    f"{_r_epts(fn, env, avoid)}, {_r_epts(arg, env, avoid)})")
    raise TypeError(f"not an explicit term: {t!r}")


def render(x: Any, names: Sequence[str] = (), avoid: Iterable[str] = ()) -> str:
    """Human-readable form of any term-like value (see the module docstring)."""
    a = set(avoid)
    env = list(names)
    if isinstance(x, DkTerm):
        return _r_dk(x, env, 0, a)
    if isinstance(x, PtsTerm):
        return _r_pts(x, env, 0, a)
    if isinstance(x, EptsTerm):
        return _r_epts(x, env, a)
    if isinstance(x, DkContext):
        parts = []
        acc: list[str] = []
        for h, ty in x.entries:
            parts.append(f"{h} : {_r_dk(ty, acc, 0, a)}")
            acc.append(h)
        return ", ".join(parts)
    if isinstance(x, EptsContext):
        parts = []
        acc = []
        for h, ty in x.entries:
            parts.append(f"{h} : {_r_epts(ty, acc, a)}")
            acc.append(h)
        return ", ".join(parts)
    if isinstance(x, Theory):
        return render_theory(x)
    from .analysis import SimpleType, StlcTerm, render_simple

    if isinstance(x, SimpleType):
        return render_simple(x)
    if isinstance(x, StlcTerm):
        return _r_stlc(x, env, a)
    raise TypeError(f"cannot render {type(x).__name__}")


def _r_stlc(t: Any, env: list[str], avoid: set[str], prec: int = 0) -> str:
    from .analysis import SApp, SConst, SLam, SVar

    match t:
        case SVar(k):
            return _var_name(k, env)
        case SConst(name):
            return name
        case SApp(f, a):
            s = f"{_r_stlc(f, env, avoid, 1)} {_r_stlc(a, env, avoid, 2)}"
            return s if prec <= 1 else f"({s})"
        case SLam(h, body):
            name = _fresh(h, env, avoid)
            s = f"lam {name}. {_r_stlc(body, env + [name], avoid, 0)}"
            return s if prec == 0 else f"({s})"
    raise TypeError(f"not a simply typed term: {t!r}")


def render_theory(theory: Theory, assumes: DkContext | None = None,
                  checks: Iterable[tuple[DkTerm, DkTerm]] = ()) -> str:
    """A complete theory file, re-parseable by :func:`parse_theory`."""
    avoid = {d.name for d in theory.signature}
    lines: list[str] = []
    for d in theory.signature:
        if d.telescope:
            acc: list[str] = []
            parts = []
            for h, ty in d.telescope:
                name = _fresh(h, acc, avoid)
                parts.append(f"{name} : {_r_dk(ty, acc, 0, avoid)}")
                acc.append(name)
            tele = ", ".join(parts)
            lines.append(f"constant {d.name} ({tele}) : "
                         f"{_r_dk(d.result, acc, 0, avoid)}.")
        else:
            lines.append(f"constant {d.name} : {_r_dk(d.result, [], 0, avoid)}.")
    for r in theory.rules:
        lhs = _r_dk(Cons(r.head, r.lhs), [], 0, avoid)
        rhs = _r_dk(r.rhs, [], 0, avoid)
        lines.append(f'rule "{r.name}" {lhs} --> {rhs}.')
    acc = []
    if assumes is not None:
        for h, ty in assumes.entries:
            name = _fresh(h, acc, avoid)
            lines.append(f"assume {name} : {_r_dk(ty, acc, 0, avoid)}.")
            acc.append(name)
    for m, a in checks:
        lines.append(f"check {_r_dk(m, acc, 0, avoid)} : {_r_dk(a, acc, 0, avoid)}.")
    return "\n".join(lines) + "\n"


def render_morphism(mor: "TheoryMorphism") -> str:
    avoid = {d.name for d in mor.target.signature}
    lines = []
    for name, body in mor.body.items():
        decl = mor.source.decl(name)
        acc: list[str] = []
        if decl is not None:
            for h, _ in decl.telescope:
                acc.append(_fresh(h, acc, avoid))
        lines.append(f"map {name} := {_r_dk(body, acc, 0, avoid)}.")
    return "\n".join(lines) + "\n"


def render_sort_spec(f: SortSpecFile) -> str:
    lines: list[str] = []
    if f.finite is not None:
        lines.append("[sorts]")
        lines.extend(f.finite.sorts)
        lines.append("[axioms]")
        for s1 in f.finite.sorts:
            if s1 in f.finite.axioms:
                lines.append(f"{s1} : {f.finite.axioms[s1]}")
        lines.append("[rules]")
        for s1 in f.finite.sorts:
            for s2 in f.finite.sorts:
                if (s1, s2) in f.finite.rules:
                    lines.append(f"({s1}, {s2}) : {f.finite.rules[(s1, s2)]}")
    if f.internalized is not None:
        spec = f.internalized
        lines.append("[internalized]")
        avoid = {"Sort", "Ax", "Ru"} | {d.name for d in spec.constants}
        for d in spec.constants:
            if d.telescope:
                acc: list[str] = []
                parts = []
                for h, ty in d.telescope:
                    name = _fresh(h, acc, avoid)
                    parts.append(f"{name} : {_r_dk(ty, acc, 0, avoid)}")
                    acc.append(name)
                lines.append(f"constant {d.name} ({', '.join(parts)}) : "
                             f"{_r_dk(d.result, acc, 0, avoid)}.")
            else:
                lines.append(f"constant {d.name} : {_r_dk(d.result, [], 0, avoid)}.")
        for r in spec.rules:
            lhs = _r_dk(Cons(r.head, r.lhs), [], 0, avoid)
            lines.append(f'rule "{r.name}" {lhs} --> {_r_dk(r.rhs, [], 0, avoid)}.')
        for name, t in spec.named.items():
            lines.append(f"{name} := {_r_dk(t, [], 0, avoid)}.")
    return "\n".join(lines) + "\n"
