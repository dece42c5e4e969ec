"""Elm-flavoured surface syntax: lexer, parser, elaboration to core, printing.

A source file holds datatype declarations, annotated top-level definitions,
and assertions.  Definitions elaborate to nested lets (immediately applied
lambdas) ending in a tuple of all definitions, which becomes `main`.
Assertions refer to definitions through projections of `main`.
"""
from __future__ import annotations

import dataclasses
import os
import re
from importlib import resources
from typing import Optional

from .core import (
    E_UNIT,
    EApp,
    ECase,
    ECtor,
    EFix,
    EHole,
    EPair,
    EProj,
    EUnit,
    EVar,
    Branch,
    Datatypes,
    Example,
    Expr,
    Program,
    RApp,
    RCase,
    RCtor,
    RFix,
    RHole,
    RInverse,
    RPair,
    RProj,
    RUnit,
    TArr,
    TData,
    TPair,
    TUnit,
    Type,
    UNIT_T,
    XCtor,
    XInOut,
    XPair,
    XTop,
    XUnit,
    coerce,
    free_vars,
)
from .typecheck import IllTyped, check_program, hole_contexts


class ParseError(Exception):
    def __init__(self, msg, line=0, col=0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line = line
        self.col = col


class ElabError(Exception):
    pass


# --------------------------------------------------------------------------
# Lexing

KEYWORDS = {"type", "case", "of", "fix", "assert", "let", "in"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<hole>\?\?(?P<holenum>\d+)?)
  | (?P<proj>\#(?P<projnum>[12]))
  | (?P<int>\d+)
  | (?P<lident>[a-z_][A-Za-z0-9_']*)
  | (?P<uident>[A-Z][A-Za-z0-9_']*)
  | (?P<sym>->|=>|==|[()\[\],=:|\\;{}*])
    """,
    re.VERBOSE,
)


@dataclasses.dataclass
class Token:
    kind: str  # lident uident int hole proj sym kw eof
    text: str
    line: int
    col: int
    bol: bool  # first token on its line
    num: Optional[int] = None

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.line}:{self.col}"


def lex(src: str) -> list:
    out = []
    pos = 0
    line, col = 1, 1
    bol = True
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group(0)
        if kind in ("holenum", "projnum"):
            kind = "hole" if text.startswith("??") else "proj"
        if kind == "nl":
            line += 1
            col = 1
            bol = True
        elif kind in ("ws", "comment"):
            col += len(text)
        else:
            num = None
            if m.group("hole") is not None:
                kind = "hole"
                n = m.group("holenum")
                num = int(n) if n else None
            elif m.group("proj") is not None:
                kind = "proj"
                num = int(m.group("projnum"))
            elif kind == "int":
                num = int(text)
            elif kind == "lident" and text in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, text, line, col, bol, num))
            bol = False
            col += len(text)
        pos = m.end()
    out.append(Token("eof", "", line, col, True))
    return out


# --------------------------------------------------------------------------
# Surface AST


@dataclasses.dataclass
class SVar:
    name: str


@dataclasses.dataclass
class SCon:
    name: str


@dataclasses.dataclass
class SApp:
    fn: object
    args: list


@dataclasses.dataclass
class SProj:
    index: int
    arg: object


@dataclasses.dataclass
class STuple:
    items: list  # empty for unit


@dataclasses.dataclass
class SHole:
    num: Optional[int]


@dataclasses.dataclass
class SNat:
    value: int


@dataclasses.dataclass
class SList:
    items: list


@dataclasses.dataclass
class SAlt:
    ctor: Optional[str]  # None for a wildcard
    binders: list
    body: object


@dataclasses.dataclass
class SCase:
    scrutinee: object
    alts: list


@dataclasses.dataclass
class SLam:
    fname: Optional[str]
    param: str
    dom: Optional[Type]
    cod: Optional[Type]
    body: object


@dataclasses.dataclass
class SLet:
    name: str
    typ: Type
    value: object
    body: object


@dataclasses.dataclass
class SEq:
    lhs: object
    rhs: object


@dataclasses.dataclass
class TypeDecl:
    name: str
    ctors: list  # [(name, [Type])]


@dataclasses.dataclass
class Signature:
    name: str
    typ: Type


@dataclasses.dataclass
class Definition:
    name: str
    params: list
    body: object
    line: int = 0


@dataclasses.dataclass
class AssertDecl:
    lhs: object
    rhs: object
    line: int = 0


@dataclasses.dataclass
class SpecDecl:
    fn: str
    rows: list  # list of lists of expressions
    line: int = 0


# --------------------------------------------------------------------------
# Parsing


class Parser:
    def __init__(self, src: str):
        self.toks = lex(src)
        self.i = 0
        self.limits = [1]

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def blocked(self, t: Optional[Token] = None) -> bool:
        t = t or self.tok
        return t.kind == "eof" or (t.bol and t.col <= self.limits[-1])

    def error(self, msg):
        t = self.tok
        raise ParseError(f"{msg}, found {t.text or 'end of input'!r}", t.line, t.col)

    def at(self, kind, text=None) -> bool:
        t = self.tok
        if self.blocked():
            return False
        return t.kind == kind and (text is None or t.text == text)

    def at_sym(self, text):
        return self.at("sym", text)

    def eat(self, kind, text=None) -> Token:
        if not self.at(kind, text):
            self.error(f"expected {text or kind}")
        t = self.tok
        self.i += 1
        return t

    def eat_sym(self, text):
        return self.eat("sym", text)

    def advance(self):
        t = self.tok
        self.i += 1
        return t

    # declarations
    def parse_file(self) -> list:
        decls = []
        while self.tok.kind != "eof":
            t = self.tok
            if t.col != 1:
                self.error("declarations must start in the first column")
            self.limits = [1]
            # the first token of a declaration sits at the limit column
            self.limits.append(0)
            decl = self.parse_decl()
            self.limits.pop()
            decls.append(decl)
            if not self.blocked() and self.tok.kind != "eof":
                self.error("unexpected token after declaration")
        return decls

    def parse_decl(self):
        t = self.tok
        if t.kind == "kw" and t.text == "type":
            return self.parse_typedecl()
        if t.kind == "kw" and t.text == "assert":
            self.advance()
            self.limits[-1] = 1
            e = self.parse_expr(allow_eq=True)
            if not isinstance(e, SEq):
                raise ParseError("assert needs the form e1 == e2", t.line, t.col)
            return AssertDecl(e.lhs, e.rhs, t.line)
        if t.kind == "lident" and re.fullmatch(r"spec\d*", t.text) and self.peek().kind == "lident":
            self.advance()
            self.limits[-1] = 1
            fn = self.eat("lident").text
            lst = self.parse_atom()
            if not isinstance(lst, SList):
                raise ParseError("spec needs a list of tuples", t.line, t.col)
            rows = [it.items if isinstance(it, STuple) else [it] for it in lst.items]
            return SpecDecl(fn, rows, t.line)
        if t.kind == "lident":
            name = self.advance().text
            self.limits[-1] = 1
            if self.at_sym(":"):
                self.advance()
                return Signature(name, self.parse_type())
            params = []
            while self.at("lident"):
                params.append(self.advance().text)
            self.eat_sym("=")
            return Definition(name, params, self.parse_expr(), t.line)
        self.error("expected a declaration")

    def parse_typedecl(self):
        self.advance()
        self.limits[-1] = 1
        name = self.eat("uident").text
        self.eat_sym("=")
        ctors = []
        while True:
            c = self.eat("uident").text
            args = []
            while self.at("uident") or self.at_sym("("):
                args.append(self.parse_atype())
            ctors.append((c, args))
            if self.at_sym("|"):
                self.advance()
                continue
            break
        return TypeDecl(name, ctors)

    # types
    def parse_type(self) -> Type:
        t = self.parse_atype()
        if self.at_sym("->"):
            self.advance()
            return TArr(t, self.parse_type())
        return t

    def parse_atype(self) -> Type:
        if self.at("uident"):
            return TData(self.advance().text)
        if self.at_sym("("):
            self.advance()
            if self.at_sym(")"):
                self.advance()
                return UNIT_T
            items = [self.parse_type()]
            while self.at_sym(","):
                self.advance()
                items.append(self.parse_type())
            self.eat_sym(")")
            return tuple_type(items)
        self.error("expected a type")

    # expressions
    def parse_expr(self, allow_eq=False):
        e = self.parse_expr1()
        if self.at_sym("=="):
            if not allow_eq:
                self.error("'==' is only allowed in assertions")
            self.advance()
            return SEq(e, self.parse_expr1())
        return e

    def parse_expr1(self):
        if self.at("kw", "case"):
            return self.parse_case()
        if self.at_sym("\\"):
            self.advance()
            return self.parse_lambda(None)
        if self.at("kw", "fix"):
            self.advance()
            fname = self.eat("lident").text
            return self.parse_lambda(fname, need_paren=True)
        if self.at("kw", "let"):
            self.advance()
            name = self.eat("lident").text
            self.eat_sym(":")
            typ = self.parse_type()
            self.eat_sym("=")
            value = self.parse_expr1()
            self.eat("kw", "in")
            return SLet(name, typ, value, self.parse_expr1())
        return self.parse_app()

    def parse_lambda(self, fname, need_paren=False):
        # \x -> e | \(x : A) : B => e | fix f (x : A) : B => e
        if self.at_sym("("):
            self.advance()
            param = self.eat("lident").text
            self.eat_sym(":")
            dom = self.parse_type()
            self.eat_sym(")")
            cod = None
            if self.at_sym(":"):
                self.advance()
                cod = self.parse_type()
            if self.at_sym("=>"):
                self.advance()
            else:
                self.eat_sym("->")
            return SLam(fname, param, dom, cod, self.parse_expr1())
        if need_paren:
            self.error("fix needs an annotated parameter")
        param = self.eat("lident").text
        self.eat_sym("->")
        return SLam(fname, param, None, None, self.parse_expr1())

    def parse_case(self):
        self.advance()
        scrut = self.parse_expr1()
        self.eat("kw", "of")
        alts = []
        if self.at_sym("{"):
            self.advance()
            self.limits.append(0)
            while True:
                alts.append(self.parse_alt())
                if self.at_sym(";"):
                    self.advance()
                    if self.at_sym("}"):
                        break
                    continue
                break
            self.limits.pop()
            self.eat_sym("}")
            return SCase(scrut, alts)
        t = self.tok
        if t.kind == "eof" or (t.bol and t.col <= self.limits[-1]):
            self.error("expected case alternatives")
        col = t.col
        self.limits.append(col)
        while True:
            alts.append(self.parse_alt())
            if self.at_sym(";"):
                self.advance()
                continue
            nt = self.tok
            if nt.kind != "eof" and nt.bol and nt.col == col:
                continue
            break
        self.limits.pop()
        return SCase(scrut, alts)

    def parse_alt(self):
        # a pattern may start the line at the alternatives' column
        saved = self.limits[-1]
        self.limits[-1] = 0 if saved == 0 else saved - 1
        if self.at("lident", "_"):
            self.advance()
            ctor, binders = None, []
        else:
            ctor = self.eat("uident").text
            binders = []
            while self.at("lident"):
                binders.append(self.advance().text)
        self.eat_sym("->")
        self.limits[-1] = saved
        return SAlt(ctor, binders, self.parse_expr1())

    def starts_atom(self) -> bool:
        if self.blocked():
            return False
        t = self.tok
        if t.kind in ("lident", "uident", "int", "hole", "proj"):
            return True
        return t.kind == "sym" and t.text in ("(", "[")

    def parse_app(self):
        head = self.parse_prefix()
        args = []
        while self.starts_atom() or self.at_sym("\\") or self.at("kw", "case") or self.at("kw", "fix"):
            if self.at_sym("\\") or self.at("kw", "case") or self.at("kw", "fix"):
                args.append(self.parse_expr1())
                break
            args.append(self.parse_prefix())
        return SApp(head, args) if args else head

    def parse_prefix(self):
        if self.at("proj"):
            i = self.advance().num
            return SProj(i, self.parse_prefix())
        return self.parse_atom()

    def parse_atom(self):
        t = self.tok
        if self.blocked():
            self.error("expected an expression")
        if t.kind == "lident":
            self.advance()
            return SVar(t.text)
        if t.kind == "uident":
            self.advance()
            return SCon(t.text)
        if t.kind == "int":
            self.advance()
            return SNat(t.num)
        if t.kind == "hole":
            self.advance()
            return SHole(t.num)
        if t.kind == "sym" and t.text == "(":
            self.advance()
            self.limits.append(0)
            if self.at_sym(")"):
                self.advance()
                self.limits.pop()
                return STuple([])
            items = [self.parse_expr(allow_eq=True)]
            while self.at_sym(","):
                self.advance()
                items.append(self.parse_expr())
            self.limits.pop()
            self.eat_sym(")")
            if len(items) == 1:
                return items[0]
            return STuple(items)
        if t.kind == "sym" and t.text == "[":
            self.advance()
            self.limits.append(0)
            items = []
            if not self.at_sym("]"):
                items.append(self.parse_expr())
                while self.at_sym(","):
                    self.advance()
                    items.append(self.parse_expr())
            self.limits.pop()
            self.eat_sym("]")
            return SList(items)
        self.error("expected an expression")


def tuple_type(items) -> Type:
    if not items:
        return UNIT_T
    if len(items) == 1:
        return items[0]
    return TPair(items[0], tuple_type(items[1:]))


def parse_source(src: str) -> list:
    return Parser(src).parse_file()


def parse_type_text(src: str) -> Type:
    p = Parser(src)
    p.limits = [0]
    t = p.parse_type()
    if p.tok.kind != "eof":
        p.error("trailing input after type")
    return t


def parse_expr_text(src: str):
    p = Parser(src)
    p.limits = [0]
    e = p.parse_expr(allow_eq=True)
    if p.tok.kind != "eof":
        p.error("trailing input after expression")
    return e


# --------------------------------------------------------------------------
# Prelude


def prelude_source() -> str:
    path = os.environ.get("SMYTH_PRELUDE")
    if path:
        with open(path) as fh:
            return fh.read()
    return resources.files(__package__).joinpath("prelude.smy").read_text()


# --------------------------------------------------------------------------
# Elaboration


@dataclasses.dataclass
class DefInfo:
    name: str
    typ: Type
    holes: list


@dataclasses.dataclass
class Problem:
    """An elaborated source file, ready for evaluation and synthesis."""

    sigma: Datatypes
    program: Program
    delta: dict
    defs: list  # [DefInfo]
    holes: list  # hole names in source order
    main_type: Type

    def def_index(self, name: str) -> int:
        for i, d in enumerate(self.defs):
            if d.name == name:
                return i
        raise KeyError(name)

    def def_projection(self, name: str) -> Expr:
        return _main_projection(self.def_index(name), len(self.defs), EVar("main"))


def _main_projection(i: int, n: int, e: Expr) -> Expr:
    if n == 1:
        return e
    for _ in range(i):
        e = EProj(2, e)
    if i < n - 1:
        e = EProj(1, e)
    return e


def _tuple_expr(items) -> Expr:
    if not items:
        return E_UNIT
    if len(items) == 1:
        return items[0]
    return EPair(items[0], _tuple_expr(items[1:]))


def nat_expr(n: int) -> Expr:
    e = ECtor("Z", E_UNIT)
    for _ in range(n):
        e = ECtor("S", e)
    return e


class _Elab:
    def __init__(self, sigma: Datatypes, arities: dict, explicit: set):
        self.sigma = sigma
        self.arities = arities
        self.used_holes = set(explicit)
        self.next_hole = 0
        self.order = []
        # hole names to reuse while elaborating further copies of a wildcard body
        self.replay = None
        self.recorded = None

    def hole(self, num):
        if self.replay is not None:
            num = self.replay.pop(0)
        elif num is None:
            while self.next_hole in self.used_holes:
                self.next_hole += 1
            num = self.next_hole
            self.used_holes.add(num)
        if num not in self.order:
            self.order.append(num)
        if self.recorded is not None:
            self.recorded.append(num)
        return EHole(num)

    def fresh(self, scope, base):
        taken = set(scope) | {v.name for v in scope.values() if isinstance(v, EVar)}
        if base not in taken:
            return base
        i = 1
        while f"{base}{i}" in taken:
            i += 1
        return f"{base}{i}"

    def expr(self, s, scope: dict) -> Expr:
        if isinstance(s, SVar):
            if s.name not in scope:
                raise ElabError(f"unbound variable {s.name}")
            return scope[s.name]
        if isinstance(s, SCon):
            return self.ctor(s.name, [], scope)
        if isinstance(s, SApp):
            if isinstance(s.fn, SCon):
                return self.ctor(s.fn.name, s.args, scope)
            e = self.expr(s.fn, scope)
            for a in s.args:
                e = EApp(e, self.expr(a, scope))
            return e
        if isinstance(s, SProj):
            return EProj(s.index, self.expr(s.arg, scope))
        if isinstance(s, STuple):
            return _tuple_expr([self.expr(x, scope) for x in s.items])
        if isinstance(s, SHole):
            return self.hole(s.num)
        if isinstance(s, SNat):
            self.need("Nat", "Z", "S")
            return nat_expr(s.value)
        if isinstance(s, SList):
            self.need("NatList", "Nil", "Cons")
            e = ECtor("Nil", E_UNIT)
            for x in reversed(s.items):
                e = ECtor("Cons", EPair(self.expr(x, scope), e))
            return e
        if isinstance(s, SCase):
            return self.case(s, scope)
        if isinstance(s, SLam):
            if s.dom is None or s.cod is None:
                raise ElabError("functions outside definitions need annotations")
            inner = dict(scope)
            if s.fname is not None:
                inner[s.fname] = EVar(s.fname)
            inner[s.param] = EVar(s.param)
            return EFix(s.fname, s.param, TArr(s.dom, s.cod), self.expr(s.body, inner))
        if isinstance(s, SLet):
            raise ElabError("let needs a known result type; use a top-level definition")
        if isinstance(s, SEq):
            raise ElabError("'==' is only allowed in assertions")
        raise ElabError(f"cannot elaborate {s!r}")

    def need(self, d, *ctors):
        for c in ctors:
            if c not in self.sigma.ctors or self.sigma.ctor_data(c) != d:
                raise ElabError(f"literal needs datatype {d} with constructor {c}")

    def ctor(self, c, args, scope):
        if c not in self.arities:
            raise ElabError(f"unknown constructor {c}")
        arity = self.arities[c]
        if not args:
            if arity != 0:
                raise ElabError(f"constructor {c} expects {arity} arguments")
            return ECtor(c, E_UNIT)
        if len(args) == 1:
            return ECtor(c, self.expr(args[0], scope))
        if len(args) != arity:
            raise ElabError(f"constructor {c} expects {arity} arguments, got {len(args)}")
        return ECtor(c, _tuple_expr([self.expr(a, scope) for a in args]))

    def case(self, s: SCase, scope):
        scrut = self.expr(s.scrutinee, scope)
        named = [a.ctor for a in s.alts if a.ctor is not None]
        if not named:
            raise ElabError("case needs at least one constructor pattern")
        if named[0] not in self.sigma.ctors:
            raise ElabError(f"unknown constructor {named[0]}")
        d = self.sigma.ctor_data(named[0])
        ctors = [c for c, _ in self.sigma.constructors(d)]
        if len(set(named)) != len(named):
            raise ElabError("duplicate case alternative")
        for c in named:
            if c not in ctors:
                raise ElabError(f"constructor {c} does not belong to {d}")
        wild = [a for a in s.alts if a.ctor is None]
        if len(wild) > 1:
            raise ElabError("more than one wildcard alternative")
        missing = [c for c in ctors if c not in named]
        if missing and not wild:
            raise ElabError(f"case is missing {', '.join(missing)}")
        by_ctor = {a.ctor: a for a in s.alts if a.ctor is not None}
        branches = []
        shared = None
        for c in ctors:
            alt = by_ctor.get(c)
            if alt is not None:
                branches.append(self.branch(c, alt, scope))
                continue
            # every copy of a wildcard body shares the same holes
            alt = SAlt(c, [], wild[0].body)
            if shared is None:
                outer = self.recorded
                self.recorded = []
                branches.append(self.branch(c, alt, scope))
                shared = self.recorded
                self.recorded = outer
                if outer is not None:
                    outer.extend(shared)
            elif self.replay is not None:
                # already replaying an enclosing wildcard, whose queue covers this copy
                branches.append(self.branch(c, alt, scope))
            else:
                self.replay = list(shared)
                branches.append(self.branch(c, alt, scope))
                self.replay = None
        return ECase(scrut, tuple(branches))

    def branch(self, c, alt: SAlt, scope):
        arity = self.arities[c]
        names = alt.binders
        inner = dict(scope)
        if len(names) <= 1:
            x = names[0] if names else self.fresh(scope, "u")
            if x == "_":
                x = self.fresh(scope, "u")
            inner[x] = EVar(x)
            return Branch(c, x, self.expr(alt.body, inner))
        if len(names) != arity:
            raise ElabError(f"pattern {c} expects {arity} binders, got {len(names)}")
        p = self.fresh({**scope, **{n: None for n in names}}, "p")
        path = EVar(p)
        for i, n in enumerate(names):
            if i == len(names) - 1:
                inner[n] = path
            else:
                inner[n] = EProj(1, path)
                path = EProj(2, path)
        for n in names:
            if n == "_":
                inner.pop(n, None)
        inner[p] = EVar(p)
        return Branch(c, p, self.expr(alt.body, inner))


def _explicit_holes(decls) -> list:
    out = []

    def go(s):
        if isinstance(s, SHole):
            if s.num is not None:
                out.append(s.num)
        elif isinstance(s, list):
            for x in s:
                go(x)
        elif dataclasses.is_dataclass(s):
            for f in dataclasses.fields(s):
                go(getattr(s, f.name))

    for d in decls:
        go(d)
    return out


def _surface_free(s, bound=frozenset()) -> set:
    """Free variable names of a surface declaration body (over-approximate)."""
    out = set()

    def go(s, bound):
        if isinstance(s, SVar):
            if s.name not in bound:
                out.add(s.name)
        elif isinstance(s, SLam):
            b = bound | {s.param} | ({s.fname} if s.fname else set())
            go(s.body, b)
        elif isinstance(s, SCase):
            go(s.scrutinee, bound)
            for a in s.alts:
                go(a.body, bound | set(a.binders))
        elif isinstance(s, SLet):
            go(s.value, bound)
            go(s.body, bound | {s.name})
        elif isinstance(s, list):
            for x in s:
                go(x, bound)
        elif dataclasses.is_dataclass(s):
            for f in dataclasses.fields(s):
                go(getattr(s, f.name), bound)

    go(s, bound)
    return out


def _with_prelude(decls: list, use_prelude: bool) -> list:
    if not use_prelude:
        return decls
    pre = parse_source(prelude_source())
    user_types = {d.name for d in decls if isinstance(d, TypeDecl)}
    user_defs = {d.name for d in decls if isinstance(d, (Definition, Signature))}
    types = [d for d in pre if isinstance(d, TypeDecl) and d.name not in user_types]
    pre_defs = [d for d in pre if isinstance(d, (Definition, Signature)) and d.name not in user_defs]
    # only prelude functions the file actually uses, so search contexts stay small
    bodies = {d.name: d for d in pre_defs if isinstance(d, Definition)}
    wanted = set()
    frontier = set()
    for d in decls:
        if isinstance(d, Definition):
            frontier |= _surface_free(d.body, frozenset(d.params) | {d.name})
        elif isinstance(d, (AssertDecl, SpecDecl)):
            frontier |= _surface_free(d)
            if isinstance(d, SpecDecl):
                frontier.add(d.fn)
    while frontier:
        n = frontier.pop()
        if n in bodies and n not in wanted and n not in user_defs:
            wanted.add(n)
            frontier |= _surface_free(bodies[n].body, frozenset(bodies[n].params) | {n})
    kept = [d for d in pre_defs if d.name in wanted]
    return types + kept + decls


def elaborate(decls: list, use_prelude: bool = True) -> Problem:
    decls = _with_prelude(decls, use_prelude)
    sigma = Datatypes()
    arities = {}
    for d in decls:
        if isinstance(d, TypeDecl):
            if d.name in sigma:
                raise ElabError(f"datatype {d.name} declared twice")
            ctors = []
            for c, args in d.ctors:
                if c in arities:
                    raise ElabError(f"constructor {c} declared twice")
                arities[c] = len(args)
                ctors.append((c, tuple_type(args)))
            sigma.add(d.name, ctors)
    sigs = {}
    defs = []
    asserts = []
    for d in decls:
        if isinstance(d, Signature):
            if d.name in sigs:
                raise ElabError(f"duplicate signature for {d.name}")
            sigs[d.name] = d.typ
        elif isinstance(d, Definition):
            if d.name not in sigs:
                raise ElabError(f"definition {d.name} needs a type signature")
            if any(x.name == d.name for x in defs):
                raise ElabError(f"{d.name} defined twice")
            defs.append(d)
        elif isinstance(d, AssertDecl):
            asserts.append((d.lhs, d.rhs, d.line))
        elif isinstance(d, SpecDecl):
            for row in d.rows:
                if len(row) < 2:
                    raise ElabError("spec rows need at least one input and an output")
                asserts.append((SApp(SVar(d.fn), row[:-1]), row[-1], d.line))
    for name in sigs:
        if not any(x.name == name for x in defs):
            raise ElabError(f"signature for {name} has no definition")

    # a numbered hole may occur more than once; all its sites share one filling
    explicit = _explicit_holes([d for d in decls if not isinstance(d, TypeDecl)])
    el = _Elab(sigma, arities, set(explicit))

    # elaborate definitions
    infos = []
    values = []
    scope = {}
    for d in defs:
        t = sigs[d.name]
        start = len(el.order)
        values.append(_elab_def(el, d, t, scope))
        infos.append(DefInfo(d.name, t, el.order[start:]))
        scope = {**scope, d.name: EVar(d.name)}
    n = len(defs)
    main_type = tuple_type([i.typ for i in infos])
    main = _tuple_expr([EVar(i.name) for i in infos])
    for i in reversed(range(n)):
        main = EApp(EFix(None, infos[i].name, TArr(infos[i].typ, main_type), main), values[i])

    # assertions see definitions through projections of main
    ascope = {info.name: _main_projection(i, n, EVar("main")) for i, info in enumerate(infos)}
    core_asserts = []
    for lhs, rhs, _ in asserts:
        a = el.expr(lhs, ascope)
        b = el.expr(rhs, ascope)
        core_asserts.append((a, b))
    program = Program(main, tuple(core_asserts))
    try:
        delta = hole_contexts(sigma, program)
        check_program(delta, sigma, program)
    except IllTyped as exc:
        where = _locate_type_error(sigma, defs, infos, values, core_asserts, [a[2] for a in asserts])
        raise ElabError(f"{where}type error: {exc}") from None
    return Problem(sigma, program, delta, infos, list(el.order), main_type)


def _locate_type_error(sigma, defs, infos, values, core_asserts, assert_lines) -> str:
    """Recheck growing prefixes of the program to find the offending line."""

    def ok(k, asserts):
        t = tuple_type([i.typ for i in infos[:k]])
        main = _tuple_expr([EVar(i.name) for i in infos[:k]])
        for i in reversed(range(k)):
            main = EApp(EFix(None, infos[i].name, TArr(infos[i].typ, t), main), values[i])
        p = Program(main, tuple(asserts))
        try:
            check_program(hole_contexts(sigma, p), sigma, p)
        except IllTyped:
            return False
        return True

    n = len(infos)
    for k in range(1, n + 1):
        if not ok(k, ()):
            line = defs[k - 1].line
            return f"line {line}: in {defs[k - 1].name}: " if line else f"in {defs[k - 1].name}: "
    if n:
        for a, line in zip(core_asserts, assert_lines):
            if not ok(n, (a,)):
                return f"line {line}: in assert: "
    return ""


def _elab_def(el: _Elab, d: Definition, t: Type, scope: dict) -> Expr:
    if not d.params:
        return el.expr(d.body, scope)
    inner = dict(scope)
    inner[d.name] = EVar(d.name)
    types = []
    cur = t
    for p in d.params:
        if not isinstance(cur, TArr):
            raise ElabError(f"{d.name} has more parameters than its type allows")
        types.append(cur)
        inner[p] = EVar(p)
        cur = cur.cod
    body = el.expr(d.body, inner)
    for i in reversed(range(len(d.params))):
        body = EFix(d.name if i == 0 else None, d.params[i], types[i], body)
    return body


def load_problem(src: str, use_prelude: bool = True) -> Problem:
    return elaborate(parse_source(src), use_prelude)


def load_file(path: str, use_prelude: bool = True) -> Problem:
    with open(path) as fh:
        return load_problem(fh.read(), use_prelude)


def parse_expression(src: str, sigma: Datatypes, scope_names=()) -> Expr:
    """Parse and elaborate a standalone expression."""
    s = parse_expr_text(src)
    arities = {}
    for d in sigma:
        for c, t in sigma.constructors(d):
            arities[c] = _arity(t)
    explicit = _explicit_holes([s])
    el = _Elab(sigma, arities, set(explicit))
    return el.expr(s, {x: EVar(x) for x in scope_names})


def _arity(t: Type) -> int:
    if isinstance(t, TUnit):
        return 0
    n = 1
    while isinstance(t, TPair):
        n += 1
        t = t.snd
    return n


# --------------------------------------------------------------------------
# Printing


def nat_value(e) -> Optional[int]:
    n = 0
    while isinstance(e, (ECtor, XCtor)) and e.ctor == "S":
        n += 1
        e = e.arg
    if isinstance(e, (ECtor, XCtor)) and e.ctor == "Z" and isinstance(e.arg, (EUnit, XUnit)):
        return n
    return None


def list_items(e) -> Optional[list]:
    items = []
    pair = (EPair, XPair)
    while isinstance(e, (ECtor, XCtor)) and e.ctor == "Cons" and isinstance(e.arg, pair):
        items.append(e.arg.fst)
        e = e.arg.snd
    if isinstance(e, (ECtor, XCtor)) and e.ctor == "Nil" and isinstance(e.arg, (EUnit, XUnit)):
        return items
    return None


def _is_atomic(e) -> bool:
    if isinstance(e, (EVar, EUnit, EHole, EPair)):
        return True
    if isinstance(e, ECtor):
        return isinstance(e.arg, EUnit) or nat_value(e) is not None or list_items(e) is not None
    return False


def pretty(e: Expr) -> str:
    """Surface text that parses back to an alpha-equivalent core term."""
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, EUnit):
        return "()"
    if isinstance(e, EHole):
        return f"??{e.name}"
    if isinstance(e, EPair):
        return f"({pretty(e.fst)}, {pretty(e.snd)})"
    if isinstance(e, ECtor):
        n = nat_value(e)
        if n is not None:
            return str(n)
        items = list_items(e)
        if items is not None:
            return "[" + ", ".join(pretty(x) for x in items) + "]"
        if isinstance(e.arg, EUnit):
            return e.ctor
        return f"{e.ctor} {_arg(e.arg)}"
    if isinstance(e, EProj):
        return f"#{e.index} {_arg(e.arg)}"
    if isinstance(e, EApp):
        head = e
        args = []
        while isinstance(head, EApp):
            args.append(head.arg)
            head = head.fn
        args.reverse()
        h = pretty(head) if isinstance(head, EVar) else f"({pretty(head)})"
        return " ".join([h] + [_arg(a) for a in args])
    if isinstance(e, EFix):
        lead = f"fix {e.fname} " if e.fname is not None else "\\"
        return f"{lead}({e.param} : {e.annot.dom}) : {e.annot.cod} => {pretty(e.body)}"
    if isinstance(e, ECase):
        alts = []
        for b in e.branches:
            if b.binder in free_vars(b.body):
                pat = f"{b.ctor} {b.binder}"
            else:
                pat = b.ctor
            alts.append(f"{pat} -> {pretty(b.body)}")
        return f"case {pretty(e.scrutinee)} of {{ " + "; ".join(alts) + " }"
    raise TypeError(e)


def _arg(e) -> str:
    s = pretty(e)
    return s if _is_atomic(e) else f"({s})"


def pretty_example(x: Example) -> str:
    if isinstance(x, XTop):
        return "_"
    if isinstance(x, XUnit):
        return "()"
    if isinstance(x, XPair):
        return f"({pretty_example(x.fst)}, {pretty_example(x.snd)})"
    if isinstance(x, XCtor):
        n = nat_value(x)
        if n is not None:
            return str(n)
        items = list_items(x)
        if items is not None:
            return "[" + ", ".join(pretty_example(i) for i in items) + "]"
        if isinstance(x.arg, XUnit):
            return x.ctor
        inner = pretty_example(x.arg)
        simple = isinstance(x.arg, (XPair, XTop)) or nat_value(x.arg) is not None
        simple = simple or list_items(x.arg) is not None
        simple = simple or (isinstance(x.arg, XCtor) and isinstance(x.arg.arg, XUnit))
        return f"{x.ctor} {inner}" if simple else f"{x.ctor} ({inner})"
    if isinstance(x, XInOut):
        return f"{pretty_example(x.input)} -> {pretty_example(x.output)}"
    raise TypeError(x)


pretty_value = pretty_example


def pretty_result(r) -> str:
    """Values print as values; paused computations show their holes."""
    v = coerce(r)
    if v is not None:
        return pretty_value(v)
    if isinstance(r, RFix):
        return "<function>"
    if isinstance(r, RHole):
        return f"??{r.name}"
    if isinstance(r, RPair):
        return f"({pretty_result(r.fst)}, {pretty_result(r.snd)})"
    if isinstance(r, RCtor):
        return f"{r.ctor} ({pretty_result(r.arg)})"
    if isinstance(r, RApp):
        return f"({pretty_result(r.fn)} {pretty_result(r.arg)})"
    if isinstance(r, RProj):
        return f"#{r.index} ({pretty_result(r.arg)})"
    if isinstance(r, RCase):
        return f"(case {pretty_result(r.scrutinee)} of ...)"
    if isinstance(r, RInverse):
        return f"{r.ctor}^-1 ({pretty_result(r.arg)})"
    if isinstance(r, RUnit):
        return "()"
    raise TypeError(r)
