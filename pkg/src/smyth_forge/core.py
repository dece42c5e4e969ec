"""Abstract syntax for the core language: types, expressions, results, examples.

Every node is immutable, hashable, and compares structurally.  Hashes are
cached because results and environments are hashed repeatedly during search.
"""
from __future__ import annotations

import dataclasses
import enum
from typing import Iterable, Iterator, Optional


def node(cls):
    """Frozen dataclass with structural equality and a cached hash."""
    cls = dataclasses.dataclass(frozen=True, eq=False, repr=False)(cls)
    cls._fields = tuple(f.name for f in dataclasses.fields(cls))
    return cls


class Node:
    _fields: tuple = ()

    def _key(self):
        return tuple(getattr(self, f) for f in self._fields)

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_h", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        args = ", ".join(repr(getattr(self, f)) for f in self._fields)
        return f"{type(self).__name__}({args})"


# --------------------------------------------------------------------------
# Types


class Type(Node):
    pass


@node
class TArr(Type):
    dom: Type
    cod: Type

    def __str__(self):
        d = f"({self.dom})" if isinstance(self.dom, TArr) else str(self.dom)
        return f"{d} -> {self.cod}"


@node
class TUnit(Type):
    def __str__(self):
        return "()"


@node
class TPair(Type):
    fst: Type
    snd: Type

    def __str__(self):
        return f"({self.fst}, {self.snd})"


@node
class TData(Type):
    name: str

    def __str__(self):
        return self.name


UNIT_T = TUnit()


# --------------------------------------------------------------------------
# Expressions


class Expr(Node):
    pass


@node
class EFix(Expr):
    """`fix f (x : T1 -> T2). body`; `fname` is None for a plain lambda."""

    fname: Optional[str]
    param: str
    annot: Optional[TArr]
    body: Expr


@node
class EApp(Expr):
    fn: Expr
    arg: Expr


@node
class EVar(Expr):
    name: str


@node
class EUnit(Expr):
    pass


@node
class EPair(Expr):
    fst: Expr
    snd: Expr


@node
class EProj(Expr):
    index: int
    arg: Expr


@node
class ECtor(Expr):
    ctor: str
    arg: Expr


@node
class Branch(Node):
    ctor: str
    binder: str
    body: Expr


@node
class ECase(Expr):
    scrutinee: Expr
    branches: tuple  # tuple[Branch, ...]

    def branch(self, ctor: str) -> Optional[Branch]:
        for b in self.branches:
            if b.ctor == ctor:
                return b
        return None


@node
class EHole(Expr):
    name: int


E_UNIT = EUnit()


# --------------------------------------------------------------------------
# Results and environments


class Result(Node):
    pass


@node
class Env(Node):
    """Environment as an ordered tuple of bindings; later bindings shadow."""

    bindings: tuple = ()

    def lookup(self, x: str) -> Result:
        for name, r in reversed(self.bindings):
            if name == x:
                return r
        raise KeyError(x)

    def extend(self, x: str, r: Result) -> "Env":
        return Env(self.bindings + ((x, r),))

    def names(self) -> list:
        return [n for n, _ in self.bindings]

    def __len__(self):
        return len(self.bindings)


EMPTY_ENV = Env(())


@node
class RFix(Result):
    env: Env
    fix: EFix


@node
class RUnit(Result):
    pass


@node
class RPair(Result):
    fst: Result
    snd: Result


@node
class RCtor(Result):
    ctor: str
    arg: Result


@node
class RHole(Result):
    env: Env
    name: int


@node
class RApp(Result):
    fn: Result
    arg: Result


@node
class RProj(Result):
    index: int
    arg: Result


@node
class RCase(Result):
    env: Env
    scrutinee: Result
    branches: tuple  # tuple[Branch, ...]


@node
class RInverse(Result):
    """Inverse constructor application `C^-1 r`."""

    ctor: str
    arg: Result


R_UNIT = RUnit()


class Classification(enum.Enum):
    DETERMINATE = "determinate"
    INDETERMINATE = "indeterminate"


_DETERMINATE = (RFix, RUnit, RPair, RCtor)


def classify(r: Result) -> Classification:
    if isinstance(r, _DETERMINATE):
        return Classification.DETERMINATE
    return Classification.INDETERMINATE


def is_indeterminate(r: Result) -> bool:
    return not isinstance(r, _DETERMINATE)


# --------------------------------------------------------------------------
# Examples and simple values.  Simple values are the Unit/Pair/Ctor examples.


class Example(Node):
    pass


@node
class XUnit(Example):
    pass


@node
class XPair(Example):
    fst: Example
    snd: Example


@node
class XCtor(Example):
    ctor: str
    arg: Example


@node
class XInOut(Example):
    input: Example
    output: Example


@node
class XTop(Example):
    pass


X_UNIT = XUnit()
TOP = XTop()

Value = Example


class NotSimple(ValueError):
    pass


def is_value(ex: Example) -> bool:
    if isinstance(ex, XUnit):
        return True
    if isinstance(ex, XPair):
        return is_value(ex.fst) and is_value(ex.snd)
    if isinstance(ex, XCtor):
        return is_value(ex.arg)
    return False


def coerce(r: Result) -> Optional[Value]:
    """The simple value a result denotes, or None if it has closures."""
    if isinstance(r, RUnit):
        return X_UNIT
    if isinstance(r, RPair):
        a = coerce(r.fst)
        if a is None:
            return None
        b = coerce(r.snd)
        return None if b is None else XPair(a, b)
    if isinstance(r, RCtor):
        a = coerce(r.arg)
        return None if a is None else XCtor(r.ctor, a)
    return None


def result_to_value(r: Result) -> Value:
    v = coerce(r)
    if v is None:
        raise NotSimple(r)
    return v


def value_to_result(v: Value) -> Result:
    if isinstance(v, XUnit):
        return R_UNIT
    if isinstance(v, XPair):
        return RPair(value_to_result(v.fst), value_to_result(v.snd))
    if isinstance(v, XCtor):
        return RCtor(v.ctor, value_to_result(v.arg))
    raise NotSimple(v)


def value_to_expr(v: Value) -> Expr:
    if isinstance(v, XUnit):
        return E_UNIT
    if isinstance(v, XPair):
        return EPair(value_to_expr(v.fst), value_to_expr(v.snd))
    if isinstance(v, XCtor):
        return ECtor(v.ctor, value_to_expr(v.arg))
    raise NotSimple(v)


# --------------------------------------------------------------------------
# Worlds, constraints, hole contexts


@node
class World(Node):
    env: Env
    ex: Example


def filter_worlds(worlds: Iterable[World]) -> list:
    return [w for w in worlds if not isinstance(w.ex, XTop)]


class Constraints:
    """A pair (F, U): hole fillings plus unfilled example constraints.

    Both maps are treated as immutable once built.
    """

    __slots__ = ("filling", "unfilled")

    def __init__(self, filling=None, unfilled=None):
        self.filling: dict = filling if filling is not None else {}
        self.unfilled: dict = unfilled if unfilled is not None else {}

    def __eq__(self, other):
        return (
            isinstance(other, Constraints)
            and self.filling == other.filling
            and self.unfilled == other.unfilled
        )

    def __hash__(self):
        return hash((frozenset(self.filling.items()), frozenset(self.unfilled.items())))

    def __repr__(self):
        return f"Constraints({self.filling!r}, {self.unfilled!r})"

    def __iter__(self):
        yield self.filling
        yield self.unfilled


EMPTY_K = Constraints()


class BindKind(enum.Enum):
    PLAIN = "plain"
    REC = "rec"  # the name of a recursive function
    ARG = "arg"  # the formal parameter of a recursive function
    DEC = "dec"  # structurally smaller than the parameter of a recursive function


@node
class Binding(Node):
    name: str
    typ: Type
    kind: BindKind = BindKind.PLAIN
    fn: Optional[str] = None


@node
class TypeCtx(Node):
    bindings: tuple = ()

    def lookup(self, x: str) -> Optional[Binding]:
        for b in reversed(self.bindings):
            if b.name == x:
                return b
        return None

    def type_of(self, x: str) -> Optional[Type]:
        b = self.lookup(x)
        return None if b is None else b.typ

    def extend(self, x: str, t: Type, kind=BindKind.PLAIN, fn=None) -> "TypeCtx":
        return TypeCtx(self.bindings + (Binding(x, t, kind, fn),))

    def visible(self) -> list:
        """Bindings not shadowed by a later binding of the same name."""
        seen = set()
        out = []
        for b in reversed(self.bindings):
            if b.name not in seen:
                seen.add(b.name)
                out.append(b)
        out.reverse()
        return out

    def names(self) -> set:
        return {b.name for b in self.bindings}

    def __len__(self):
        return len(self.bindings)


EMPTY_CTX = TypeCtx(())


@node
class HoleInfo(Node):
    ctx: TypeCtx
    typ: Type
    match_depth: int = 0
    name_hint: Optional[str] = None
    # scrutinees of synthesized cases enclosing the hole
    scrutinized: tuple = ()


class Datatypes:
    """Datatype context: datatype name to its ordered constructors."""

    def __init__(self, decls=None):
        self.decls: dict = {}
        self.ctors: dict = {}
        for name, ctors in (decls or {}).items():
            self.add(name, ctors)

    def add(self, name: str, ctors):
        ctors = tuple(ctors)
        self.decls[name] = ctors
        for i, (c, t) in enumerate(ctors):
            self.ctors[c] = (name, t, i)

    def ctor_type(self, c: str) -> Type:
        return self.ctors[c][1]

    def ctor_data(self, c: str) -> str:
        return self.ctors[c][0]

    def constructors(self, name: str) -> tuple:
        return self.decls[name]

    def __contains__(self, name):
        return name in self.decls

    def __iter__(self) -> Iterator[str]:
        return iter(self.decls)


# --------------------------------------------------------------------------
# Programs and assertions


@node
class Program(Node):
    main: Expr
    asserts: tuple  # tuple[(Expr, Expr), ...]


@node
class Assertion(Node):
    result: Result
    value: Value


# --------------------------------------------------------------------------
# Helpers


def is_path(e: Expr) -> bool:
    """A variable under zero or more projections."""
    while isinstance(e, EProj):
        e = e.arg
    return isinstance(e, EVar)


def size(e: Expr) -> int:
    """Expression size used for guessing budgets and ranking.

    Application nodes are free, so `plus m' n` has size 3, and a projection
    path out of a variable counts as a single node.
    """
    if isinstance(e, (EVar, EUnit, EHole)) or is_path(e):
        return 1
    if isinstance(e, EApp):
        return size(e.fn) + size(e.arg)
    if isinstance(e, EPair):
        return 1 + size(e.fst) + size(e.snd)
    if isinstance(e, (EProj, ECtor)):
        return 1 + size(e.arg)
    if isinstance(e, EFix):
        return 1 + size(e.body)
    if isinstance(e, ECase):
        return 1 + size(e.scrutinee) + sum(1 + size(b.body) for b in e.branches)
    raise TypeError(e)


def holes_of(e: Expr) -> list:
    out = []

    def go(e):
        if isinstance(e, EHole):
            out.append(e.name)
        elif isinstance(e, EFix):
            go(e.body)
        elif isinstance(e, (EApp,)):
            go(e.fn)
            go(e.arg)
        elif isinstance(e, EPair):
            go(e.fst)
            go(e.snd)
        elif isinstance(e, (EProj, ECtor)):
            go(e.arg)
        elif isinstance(e, ECase):
            go(e.scrutinee)
            for b in e.branches:
                go(b.body)

    go(e)
    return out


def free_vars(e: Expr) -> set:
    if isinstance(e, EVar):
        return {e.name}
    if isinstance(e, (EUnit, EHole)):
        return set()
    if isinstance(e, EApp):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, EPair):
        return free_vars(e.fst) | free_vars(e.snd)
    if isinstance(e, (EProj, ECtor)):
        return free_vars(e.arg)
    if isinstance(e, EFix):
        return free_vars(e.body) - {e.fname, e.param}
    if isinstance(e, ECase):
        out = free_vars(e.scrutinee)
        for b in e.branches:
            out |= free_vars(b.body) - {b.binder}
        return out
    raise TypeError(e)


def substitute_holes(e: Expr, filling: dict, _seen=frozenset()) -> Expr:
    """Replace filled holes by their (recursively substituted) fillings."""
    if isinstance(e, EHole):
        f = filling.get(e.name)
        if f is None or f == e or e.name in _seen:
            return e
        return substitute_holes(f, filling, _seen | {e.name})
    if isinstance(e, (EVar, EUnit)):
        return e
    if isinstance(e, EApp):
        return EApp(substitute_holes(e.fn, filling, _seen), substitute_holes(e.arg, filling, _seen))
    if isinstance(e, EPair):
        return EPair(substitute_holes(e.fst, filling, _seen), substitute_holes(e.snd, filling, _seen))
    if isinstance(e, EProj):
        return EProj(e.index, substitute_holes(e.arg, filling, _seen))
    if isinstance(e, ECtor):
        return ECtor(e.ctor, substitute_holes(e.arg, filling, _seen))
    if isinstance(e, EFix):
        return EFix(e.fname, e.param, e.annot, substitute_holes(e.body, filling, _seen))
    if isinstance(e, ECase):
        return ECase(
            substitute_holes(e.scrutinee, filling, _seen),
            tuple(Branch(b.ctor, b.binder, substitute_holes(b.body, filling, _seen)) for b in e.branches),
        )
    raise TypeError(e)


def alpha_equal(a: Expr, b: Expr) -> bool:
    return _alpha(a, b, {}, {})


def _alpha(a, b, ma: dict, mb: dict) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, EVar):
        return ma.get(a.name, ("free", a.name)) == mb.get(b.name, ("free", b.name))
    if isinstance(a, (EUnit,)):
        return True
    if isinstance(a, EHole):
        return a.name == b.name
    if isinstance(a, EApp):
        return _alpha(a.fn, b.fn, ma, mb) and _alpha(a.arg, b.arg, ma, mb)
    if isinstance(a, EPair):
        return _alpha(a.fst, b.fst, ma, mb) and _alpha(a.snd, b.snd, ma, mb)
    if isinstance(a, EProj):
        return a.index == b.index and _alpha(a.arg, b.arg, ma, mb)
    if isinstance(a, ECtor):
        return a.ctor == b.ctor and _alpha(a.arg, b.arg, ma, mb)
    if isinstance(a, EFix):
        if a.annot != b.annot or (a.fname is None) != (b.fname is None):
            return False
        ma, mb = dict(ma), dict(mb)
        if a.fname is not None:
            ma[a.fname] = mb[b.fname] = object()
        ma[a.param] = mb[b.param] = object()
        return _alpha(a.body, b.body, ma, mb)
    if isinstance(a, ECase):
        if not _alpha(a.scrutinee, b.scrutinee, ma, mb):
            return False
        if [x.ctor for x in a.branches] != [y.ctor for y in b.branches]:
            return False
        for x, y in zip(a.branches, b.branches):
            k = object()
            if not _alpha(x.body, y.body, {**ma, x.binder: k}, {**mb, y.binder: k}):
                return False
        return True
    raise TypeError(a)
