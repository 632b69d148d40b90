"""Pure type systems with explicit sort and codomain annotations.

Two layers of syntax share one notion of sorts.  The implicit layer
(``PtsTerm``) is the usual PTS language; the explicit layer
(``EptsTerm``) additionally records, on every product, abstraction and
application, the sort pair of the product rule involved and the full
codomain family.  Beta reduction on the explicit layer is linearized:
it fires only when the application and abstraction agree on their sort
pair, and it never inspects the remaining annotations.  ``elaborate``
is the type-directed map from implicit to explicit syntax and
``erase_to_pts`` its left inverse.

Sorts come from a :data:`SortSpec`: either a finite enumeration with
explicit axiom/rule tables, or an internalized presentation where sorts
are closed first-order terms and the axiom and rule maps are computed
by rewriting the distinguished ``Ax``/``Ru`` symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import (
    Diagnostic,
    ElaborationFailed,
    NonFunctionalSpec,
    NotAProduct,
    PimodError,
    SideConditionFailed,
    TopSortHasNoType,
    TypeMismatch,
    UnboundVariable,
    UnknownSort,
)
from .rewrite import Fuel, nf as dk_nf
from .terms import (
    TYPE,
    Cons,
    Declaration,
    DkTerm,
    RewriteRule,
    Theory,
    max_free_index,
    metas_of,
    validate_theory,
)


# --- sort specifications ------------------------------------------------------


@dataclass(frozen=True)
class FiniteSortSpec:
    """A functional PTS specification given by finite tables.

    ``axioms[s1] == s2`` means ``s1 : s2`` and ``rules[(s1, s2)] == s3``
    licenses products over (s1, s2) living in s3.  Functionality is
    inherent in the table representation; :meth:`build` additionally
    rejects contradictory duplicates in raw input.
    """

    sorts: tuple[str, ...]
    axioms: Mapping[str, str]
    rules: Mapping[tuple[str, str], str]

    def __post_init__(self) -> None:
        seen = set(self.sorts)
        if len(seen) != len(self.sorts):
            raise NonFunctionalSpec("a sort is declared more than once",
                                    sorts=self.sorts)
        for s1, s2 in self.axioms.items():
            if s1 not in seen or s2 not in seen:
                raise UnknownSort(f"axiom ({s1} : {s2}) mentions an undeclared sort")
        for (s1, s2), s3 in self.rules.items():
            if not {s1, s2, s3} <= seen:
                raise UnknownSort(f"rule ({s1}, {s2}) : {s3} mentions an undeclared sort")

    @classmethod
    def build(cls, sorts: Iterable[str],
              axioms: Iterable[tuple[str, str]],
              rules: Iterable[tuple[str, str, str]]) -> "FiniteSortSpec":
        ax: dict[str, str] = {}
        for s1, s2 in axioms:
            if s1 in ax and ax[s1] != s2:
                raise NonFunctionalSpec(
                    f"two distinct axioms for sort '{s1}'", given=(ax[s1], s2))
            ax[s1] = s2
        ru: dict[tuple[str, str], str] = {}
        for s1, s2, s3 in rules:
            if (s1, s2) in ru and ru[(s1, s2)] != s3:
                raise NonFunctionalSpec(
                    f"two distinct rules for sorts ({s1}, {s2})",
                    given=(ru[(s1, s2)], s3))
            ru[(s1, s2)] = s3
        return cls(tuple(sorts), ax, ru)

    def has_sort(self, name: str) -> bool:
        return name in self.sorts

    def _require(self, name: str) -> None:
        if name not in self.sorts:
            raise UnknownSort(f"unknown sort '{name}'")

    def axiom_of(self, s: str) -> str | None:
        self._require(s)
        return self.axioms.get(s)

    def rule_of(self, s1: str, s2: str) -> str | None:
        self._require(s1)
        self._require(s2)
        return self.rules.get((s1, s2))

    def rule_defined(self, s1: str, s2: str) -> bool:
        return self.rule_of(s1, s2) is not None

    def axiom_defined(self, s: str) -> bool:
        return self.axiom_of(s) is not None


SORT = Cons("Sort")

CORE_SORT_SIGNATURE: tuple[Declaration, ...] = (
    Declaration("Sort", (), TYPE),
    Declaration("Ax", (("s", SORT),), SORT),
    Declaration("Ru", (("s1", SORT), ("s2", SORT)), SORT),
)

_CORE_NAMES = frozenset(d.name for d in CORE_SORT_SIGNATURE)


@dataclass
class InternalizedSortSpec:
    """Sorts as closed first-order terms, with computed axiom/rule maps.

    ``constants`` declare the sort formers (every telescope entry and
    every result must literally be ``Sort``); ``rules`` rewrite ``Ax``,
    ``Ru`` and any auxiliary formers; ``named`` gives surface names to
    the closed sort terms a user may write down.  Both maps may be
    partial: a stuck ``Ax``/``Ru`` application means "undefined", while
    a defined result that no name points to is reported as
    :class:`UnknownSort` when something forces us to print it.
    """

    constants: tuple[Declaration, ...]
    rules: tuple[RewriteRule, ...]
    named: Mapping[str, DkTerm]
    mini: Theory = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        for d in self.constants:
            if d.name in _CORE_NAMES:
                raise PimodError(f"sort former may not be called '{d.name}'")
            if d.result != SORT or any(a != SORT for _, a in d.telescope):
                raise PimodError(
                    f"sort former '{d.name}' must map Sorts to Sort")
        self.mini = Theory(CORE_SORT_SIGNATURE + tuple(self.constants),
                           tuple(self.rules))
        problems = [d for d in validate_theory(self.mini) if d.severity == "error"]
        if problems:
            raise PimodError("ill-formed sort internalization",
                             problems=[p.message for p in problems])
        self._defined_heads = frozenset(r.head for r in self.rules) | {"Ax", "Ru"}
        for name, t in self.named.items():
            if metas_of(t) or max_free_index(t) >= 0:
                raise PimodError(f"sort term for '{name}' must be closed")
            self._check_sort_term(name, t)

    def _check_sort_term(self, name: str, t: DkTerm) -> None:
        match t:
            case Cons(c, args):
                d = self.mini.decl(c)
                if d is None or c in _CORE_NAMES:
                    raise PimodError(
                        f"sort term for '{name}' uses '{c}', which is not a sort former")
                if len(args) != d.arity:
                    raise PimodError(
                        f"sort term for '{name}' applies '{c}' to {len(args)} "
                        f"arguments, expected {d.arity}")
                for a in args:
                    self._check_sort_term(name, a)
            case _:
                raise PimodError(f"sort term for '{name}' is not a constructor term")

    @property
    def sorts(self) -> tuple[str, ...]:
        return tuple(self.named)

    def has_sort(self, name: str) -> bool:
        return name in self.named

    def sort_term(self, name: str) -> DkTerm:
        if name not in self.named:
            raise UnknownSort(f"unknown sort '{name}'")
        return self.named[name]

    def name_of(self, t: DkTerm) -> str | None:
        for name, v in self.named.items():
            if v == t:
                return name
        return None

    def _is_value(self, t: DkTerm) -> bool:
        match t:
            case Cons(c, args):
                return c not in self._defined_heads and \
                    all(self._is_value(a) for a in args)
            case _:
                return False

    def _lookup(self, what: str, t: DkTerm) -> str | None:
        v = dk_nf(self.mini, t)
        name = self.name_of(v)
        if name is not None:
            return name
        if self._is_value(v):
            raise UnknownSort(f"{what} evaluates to a sort with no declared name",
                              value=v)
        return None

    def axiom_of(self, s: str) -> str | None:
        return self._lookup(f"the axiom of '{s}'",
                            Cons("Ax", (self.sort_term(s),)))

    def rule_of(self, s1: str, s2: str) -> str | None:
        return self._lookup(f"the product rule for ({s1}, {s2})",
                            Cons("Ru", (self.sort_term(s1), self.sort_term(s2))))

    def rule_defined(self, s1: str, s2: str) -> bool:
        try:
            return self.rule_of(s1, s2) is not None
        except UnknownSort:
            return True

    def axiom_defined(self, s: str) -> bool:
        try:
            return self.axiom_of(s) is not None
        except UnknownSort:
            return True

    def coverage_diagnostics(self) -> list[Diagnostic]:
        """Notes about named sorts whose axiom/rule images are missing a name."""
        out: list[Diagnostic] = []
        for s in self.named:
            try:
                self.axiom_of(s)
            except UnknownSort:
                out.append(Diagnostic(
                    "unnamed-axiom",
                    f"the axiom of '{s}' is defined but has no declared name",
                    s, severity="note"))
        for s1 in self.named:
            for s2 in self.named:
                try:
                    self.rule_of(s1, s2)
                except UnknownSort:
                    out.append(Diagnostic(
                        "unnamed-rule",
                        f"the product rule for ({s1}, {s2}) is defined "
                        "but has no declared name",
                        f"({s1}, {s2})", severity="note"))
        return out


SortSpec = Union[FiniteSortSpec, InternalizedSortSpec]


# --- syntax -------------------------------------------------------------------


class EptsTerm:
    """Explicitly annotated PTS terms (de Bruijn indices)."""

    __slots__ = ()


@dataclass(frozen=True)
class EVar(EptsTerm):
    index: int


@dataclass(frozen=True)
class ESort(EptsTerm):
    name: str


@dataclass(frozen=True)
class EPi(EptsTerm):
    s1: str
    s2: str
    dom: EptsTerm
    hint: str = field(compare=False)
    cod: EptsTerm = field()


@dataclass(frozen=True)
class ELam(EptsTerm):
    """Abstraction carrying its full product type alongside the body."""

    s1: str
    s2: str
    dom: EptsTerm
    hint: str = field(compare=False)
    cod: EptsTerm = field()
    body: EptsTerm = field()


@dataclass(frozen=True)
class EApp(EptsTerm):
    """Application annotated with the product type being eliminated."""

    s1: str
    s2: str
    dom: EptsTerm
    hint: str = field(compare=False)
    cod: EptsTerm = field()
    fn: EptsTerm = field()
    arg: EptsTerm = field()


class PtsTerm:
    """Ordinary PTS terms: only abstraction domains are annotated."""

    __slots__ = ()


@dataclass(frozen=True)
class PVar(PtsTerm):
    index: int


@dataclass(frozen=True)
class PSort(PtsTerm):
    name: str


@dataclass(frozen=True)
class PPi(PtsTerm):
    hint: str = field(compare=False)
    dom: PtsTerm = field()
    cod: PtsTerm = field()


@dataclass(frozen=True)
class PLam(PtsTerm):
    hint: str = field(compare=False)
    dom: PtsTerm = field()
    body: PtsTerm = field()


@dataclass(frozen=True)
class PApp(PtsTerm):
    fn: PtsTerm
    arg: PtsTerm


def epts_shift(t: EptsTerm, by: int, cutoff: int = 0) -> EptsTerm:
    match t:
        case EVar(k):
            return EVar(k + by) if k >= cutoff else t
        case ESort(_):
            return t
        case EPi(s1, s2, dom, h, cod):
            return EPi(s1, s2, epts_shift(dom, by, cutoff), h,
                       epts_shift(cod, by, cutoff + 1))
        case ELam(s1, s2, dom, h, cod, body):
            return ELam(s1, s2, epts_shift(dom, by, cutoff), h,
                        epts_shift(cod, by, cutoff + 1),
                        epts_shift(body, by, cutoff + 1))
        case EApp(s1, s2, dom, h, cod, fn, arg):
            return EApp(s1, s2, epts_shift(dom, by, cutoff), h,
                        epts_shift(cod, by, cutoff + 1),
                        epts_shift(fn, by, cutoff),
                        epts_shift(arg, by, cutoff))
    raise AssertionError(f"not an EPTS term: {t!r}")


def epts_subst(t: EptsTerm, j: int, value: EptsTerm) -> EptsTerm:
    match t:
        case EVar(k):
            if k == j:
                return value
            return EVar(k - 1) if k > j else t
        case ESort(_):
            return t
        case EPi(s1, s2, dom, h, cod):
            return EPi(s1, s2, epts_subst(dom, j, value), h,
                       epts_subst(cod, j + 1, epts_shift(value, 1)))
        case ELam(s1, s2, dom, h, cod, body):
            up = epts_shift(value, 1)
            return ELam(s1, s2, epts_subst(dom, j, value), h,
                        epts_subst(cod, j + 1, up),
                        epts_subst(body, j + 1, up))
        case EApp(s1, s2, dom, h, cod, fn, arg):
            return EApp(s1, s2, epts_subst(dom, j, value), h,
                        epts_subst(cod, j + 1, epts_shift(value, 1)),
                        epts_subst(fn, j, value),
                        epts_subst(arg, j, value))
    raise AssertionError(f"not an EPTS term: {t!r}")


def pts_shift(t: PtsTerm, by: int, cutoff: int = 0) -> PtsTerm:
    match t:
        case PVar(k):
            return PVar(k + by) if k >= cutoff else t
        case PSort(_):
            return t
        case PPi(h, dom, cod):
            return PPi(h, pts_shift(dom, by, cutoff), pts_shift(cod, by, cutoff + 1))
        case PLam(h, dom, body):
            return PLam(h, pts_shift(dom, by, cutoff), pts_shift(body, by, cutoff + 1))
        case PApp(fn, arg):
            return PApp(pts_shift(fn, by, cutoff), pts_shift(arg, by, cutoff))
    raise AssertionError(f"not a PTS term: {t!r}")


def erase_to_pts(t: EptsTerm) -> PtsTerm:
    """Drop the sort and codomain annotations."""
    match t:
        case EVar(k):
            return PVar(k)
        case ESort(s):
            return PSort(s)
        case EPi(_, _, dom, h, cod):
            return PPi(h, erase_to_pts(dom), erase_to_pts(cod))
        case ELam(_, _, dom, h, _, body):
            return PLam(h, erase_to_pts(dom), erase_to_pts(body))
        case EApp(_, _, _, _, _, fn, arg):
            return PApp(erase_to_pts(fn), erase_to_pts(arg))
    raise AssertionError(f"not an EPTS term: {t!r}")


# --- linearized beta reduction -------------------------------------------------


def _beta_root(spec: SortSpec, t: EptsTerm) -> EptsTerm | None:
    match t:
        case EApp(s1, s2, _, _, _, ELam(t1, t2, _, _, _, body), arg) \
                if s1 == t1 and s2 == t2 and spec.rule_defined(s1, s2):
            return epts_subst(body, 0, arg)
    return None


def _e_children(t: EptsTerm) -> tuple[EptsTerm, ...]:
    match t:
        case EPi(_, _, dom, _, cod):
            return (dom, cod)
        case ELam(_, _, dom, _, cod, body):
            return (dom, cod, body)
        case EApp(_, _, dom, _, cod, fn, arg):
            return (dom, cod, fn, arg)
        case _:
            return ()


def _e_rebuild(t: EptsTerm, i: int, child: EptsTerm) -> EptsTerm:
    match t:
        case EPi(s1, s2, dom, h, cod):
            parts = [dom, cod]
            parts[i] = child
            return EPi(s1, s2, parts[0], h, parts[1])
        case ELam(s1, s2, dom, h, cod, body):
            parts = [dom, cod, body]
            parts[i] = child
            return ELam(s1, s2, parts[0], h, parts[1], parts[2])
        case EApp(s1, s2, dom, h, cod, fn, arg):
            parts = [dom, cod, fn, arg]
            parts[i] = child
            return EApp(s1, s2, parts[0], h, parts[1], parts[2], parts[3])
    raise AssertionError


def epts_step(spec: SortSpec, t: EptsTerm) -> EptsTerm | None:
    """One leftmost-outermost linearized beta step, or None at a normal form.

    The redex search visits the root first and then the annotation and
    subject components in declaration order (domain, codomain, function
    part, argument); this must stay aligned with the argument order of
    the framework image of an application, because adequacy statements
    compare reduction traces position by position.
    """
    contracted = _beta_root(spec, t)
    if contracted is not None:
        return contracted
    kids = _e_children(t)
    for i, k in enumerate(kids):
        r = epts_step(spec, k)
        if r is not None:
            return _e_rebuild(t, i, r)
    return None


def epts_redex_sorts(spec: SortSpec, t: EptsTerm) -> tuple[str, str] | None:
    """Sort pair of the redex that :func:`epts_step` would contract."""
    match t:
        case EApp(s1, s2, _, _, _, ELam(t1, t2, _, _, _, _), _) \
                if s1 == t1 and s2 == t2 and spec.rule_defined(s1, s2):
            return (s1, s2)
    for k in _e_children(t):
        r = epts_redex_sorts(spec, k)
        if r is not None:
            return r
    return None


def epts_reduce(spec: SortSpec, t: EptsTerm,
                fuel: int | Fuel | None = None) -> tuple[EptsTerm, list[EptsTerm]]:
    """Normalize, returning the normal form and all intermediate terms."""
    f = Fuel.of(fuel)
    trail: list[EptsTerm] = []
    while True:
        s = epts_step(spec, t)
        if s is None:
            return t, trail
        f.tick()
        t = s
        trail.append(t)


def epts_nf(spec: SortSpec, t: EptsTerm, fuel: int | Fuel | None = None) -> EptsTerm:
    return epts_reduce(spec, t, fuel)[0]


def epts_whnf(spec: SortSpec, t: EptsTerm, fuel: int | Fuel | None = None) -> EptsTerm:
    """Weak head normal form; annotations are left untouched."""
    f = Fuel.of(fuel)
    while True:
        match t:
            case EApp(s1, s2, dom, h, cod, fn, arg):
                fn2 = epts_whnf(spec, fn, f)
                match fn2:
                    case ELam(t1, t2, _, _, _, body) \
                            if s1 == t1 and s2 == t2 and spec.rule_defined(s1, s2):
                        f.tick()
                        t = epts_subst(body, 0, arg)
                        continue
                return t if fn2 is fn else EApp(s1, s2, dom, h, cod, fn2, arg)
            case _:
                return t


def epts_convertible(spec: SortSpec, a: EptsTerm, b: EptsTerm,
                     fuel: int | Fuel | None = None) -> bool:
    f = Fuel.of(fuel)

    def go(x: EptsTerm, y: EptsTerm) -> bool:
        x = epts_whnf(spec, x, f)
        y = epts_whnf(spec, y, f)
        if x == y:
            return True
        match x, y:
            case (EPi(s1, s2, d1, _, c1), EPi(t1, t2, d2, _, c2)):
                return s1 == t1 and s2 == t2 and go(d1, d2) and go(c1, c2)
            case (ELam(s1, s2, d1, _, c1, b1), ELam(t1, t2, d2, _, c2, b2)):
                return (s1, s2) == (t1, t2) and go(d1, d2) and go(c1, c2) and go(b1, b2)
            case (EApp(s1, s2, d1, _, c1, f1, a1), EApp(t1, t2, d2, _, c2, f2, a2)):
                return ((s1, s2) == (t1, t2) and go(d1, d2) and go(c1, c2)
                        and go(f1, f2) and go(a1, a2))
            case _:
                return False

    return go(a, b)


# --- typing -------------------------------------------------------------------


@dataclass(frozen=True)
class EptsContext:
    entries: tuple[tuple[str, EptsTerm], ...] = ()

    def extend(self, hint: str, ty: EptsTerm) -> "EptsContext":
        return EptsContext(self.entries + ((hint, ty),))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> list[str]:
        return [h for h, _ in self.entries]

    def type_of(self, index: int) -> EptsTerm:
        if not 0 <= index < len(self.entries):
            raise UnboundVariable(f"de Bruijn index {index} out of range")
        return epts_shift(self.entries[len(self.entries) - 1 - index][1], index + 1)


def _known(spec: SortSpec, s: str) -> None:
    if not spec.has_sort(s):
        raise UnknownSort(f"unknown sort '{s}'")


def _e_check(spec: SortSpec, ctx: EptsContext, m: EptsTerm, ty: EptsTerm,
             f: Fuel) -> None:
    got = _e_infer(spec, ctx, m, f)
    if not epts_convertible(spec, got, ty, f):
        raise TypeMismatch("term does not have the required type",
                           expected=ty, actual=got,
                           subject=m, context=ctx.names)


def _e_infer(spec: SortSpec, ctx: EptsContext, m: EptsTerm, f: Fuel) -> EptsTerm:
    match m:
        case EVar(k):
            return ctx.type_of(k)
        case ESort(s):
            _known(spec, s)
            a = spec.axiom_of(s)
            if a is None:
                raise TopSortHasNoType(f"sort '{s}' has no axiom")
            return ESort(a)
        case EPi(s1, s2, dom, h, cod):
            _known(spec, s1)
            _known(spec, s2)
            _e_check(spec, ctx, dom, ESort(s1), f)
            _e_check(spec, ctx.extend(h, dom), cod, ESort(s2), f)
            s3 = spec.rule_of(s1, s2)
            if s3 is None:
                raise SideConditionFailed(
                    f"no product rule for the sort pair ({s1}, {s2})")
            return ESort(s3)
        case ELam(s1, s2, dom, h, cod, body):
            _known(spec, s1)
            _known(spec, s2)
            _e_check(spec, ctx, dom, ESort(s1), f)
            inner = ctx.extend(h, dom)
            _e_check(spec, inner, cod, ESort(s2), f)
            if not spec.rule_defined(s1, s2):
                raise SideConditionFailed(
                    f"no product rule for the sort pair ({s1}, {s2})")
            _e_check(spec, inner, body, cod, f)
            return EPi(s1, s2, dom, h, cod)
        case EApp(s1, s2, dom, h, cod, fn, arg):
            _known(spec, s1)
            _known(spec, s2)
            _e_check(spec, ctx, dom, ESort(s1), f)
            _e_check(spec, ctx.extend(h, dom), cod, ESort(s2), f)
            if not spec.rule_defined(s1, s2):
                raise SideConditionFailed(
                    f"no product rule for the sort pair ({s1}, {s2})")
            _e_check(spec, ctx, fn, EPi(s1, s2, dom, h, cod), f)
            _e_check(spec, ctx, arg, dom, f)
            return epts_subst(cod, 0, arg)
    raise PimodError(f"cannot type {m!r}")


def epts_infer(spec: SortSpec, ctx: EptsContext, m: EptsTerm,
               fuel: int | Fuel | None = None) -> EptsTerm:
    return _e_infer(spec, ctx, m, Fuel.of(fuel))


def epts_check(spec: SortSpec, ctx: EptsContext, m: EptsTerm, ty: EptsTerm,
               fuel: int | Fuel | None = None) -> None:
    _e_check(spec, ctx, m, ty, Fuel.of(fuel))


def sort_of_type(spec: SortSpec, ctx: EptsContext, a: EptsTerm,
                 fuel: int | Fuel | None = None) -> str:
    """The sort ``s`` with ``a : s``; fails if the type of ``a`` is not a sort."""
    f = Fuel.of(fuel)
    ty = epts_whnf(spec, _e_infer(spec, ctx, a, f), f)
    match ty:
        case ESort(s):
            return s
    raise ElaborationFailed("expected a type, but its type is not a sort",
                            subject=a, actual=ty)


def check_epts_context(spec: SortSpec, ctx: EptsContext,
                       fuel: int | Fuel | None = None) -> list[Diagnostic]:
    """Every context entry must denote a type (its type must be a sort)."""
    out: list[Diagnostic] = []
    partial = EptsContext()
    for hint, ty in ctx.entries:
        try:
            sort_of_type(spec, partial, ty, fuel)
        except PimodError as e:
            out.append(Diagnostic("bad-context-entry",
                                  f"context entry '{hint}' is not a type: {e}",
                                  hint))
        partial = partial.extend(hint, ty)
    return out


# --- elaboration ----------------------------------------------------------------


def _elab(spec: SortSpec, ctx: EptsContext, t: PtsTerm, f: Fuel) -> EptsTerm:
    match t:
        case PVar(k):
            if not 0 <= k < len(ctx):
                raise UnboundVariable(f"de Bruijn index {k} out of range")
            return EVar(k)
        case PSort(s):
            _known(spec, s)
            return ESort(s)
        case PPi(h, dom, cod):
            edom = _elab(spec, ctx, dom, f)
            s1 = sort_of_type(spec, ctx, edom, f)
            inner = ctx.extend(h, edom)
            ecod = _elab(spec, inner, cod, f)
            s2 = sort_of_type(spec, inner, ecod, f)
            if not spec.rule_defined(s1, s2):
                raise SideConditionFailed(
                    f"no product rule for the sort pair ({s1}, {s2})")
            return EPi(s1, s2, edom, h, ecod)
        case PLam(h, dom, body):
            edom = _elab(spec, ctx, dom, f)
            s1 = sort_of_type(spec, ctx, edom, f)
            inner = ctx.extend(h, edom)
            ebody = _elab(spec, inner, body, f)
            ecod = _e_infer(spec, inner, ebody, f)
            s2 = sort_of_type(spec, inner, ecod, f)
            return ELam(s1, s2, edom, h, ecod, ebody)
        case PApp(fn, arg):
            efn = _elab(spec, ctx, fn, f)
            fnty = epts_whnf(spec, _e_infer(spec, ctx, efn, f), f)
            match fnty:
                case EPi(s1, s2, dom, h, cod):
                    earg = _elab(spec, ctx, arg, f)
                    _e_check(spec, ctx, earg, dom, f)
                    return EApp(s1, s2, dom, h, cod, efn, earg)
            raise NotAProduct("the function part of an application is not "
                              "of product type", head=efn, head_type=fnty)
    raise PimodError(f"cannot elaborate {t!r}")


def elaborate(spec: SortSpec, ctx: EptsContext, t: PtsTerm,
              fuel: int | Fuel | None = None) -> EptsTerm:
    """Type-directed translation of implicit PTS syntax into explicit syntax.

    The result is well-typed whenever elaboration succeeds, and erasing
    its annotations gives back ``t`` exactly.
    """
    return _elab(spec, ctx, t, Fuel.of(fuel))


def elaborate_context(spec: SortSpec, entries: Iterable[tuple[str, PtsTerm]],
                      fuel: int | Fuel | None = None) -> EptsContext:
    f = Fuel.of(fuel)
    ctx = EptsContext()
    for hint, raw in entries:
        ety = _elab(spec, ctx, raw, f)
        sort_of_type(spec, ctx, ety, f)
        ctx = ctx.extend(hint, ety)
    return ctx
