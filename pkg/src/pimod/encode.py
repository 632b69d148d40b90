"""Generation of framework theories for PTS encodings, and the translation.

For a finite sort specification the generated signature has one
universe ``U@s`` and one decoding family ``El@s`` per sort, one
universe code ``u@s`` per axiom, and one ``Prod``/``abs``/``app``
triple per product rule; sort pairs are baked into constant names.
For an internalized specification there is a single family of each,
indexed by a first-order sort argument, together with the user's sort
formers and the rewrite rules defining ``Ax`` and ``Ru``.

``translate`` maps explicitly annotated PTS terms into the generated
theory; it is blind to types and contexts, commutes with substitution
on the nose, and sends well-typed terms to well-typed terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PimodError, UnknownSort
from .rewrite import BETA, Fuel, nf as dk_nf
from .terms import (
    TYPE,
    App,
    Cons,
    Declaration,
    DkContext,
    DkTerm,
    Lam,
    Meta,
    Pi,
    RewriteRule,
    Theory,
    Var,
)
from .epts import (
    CORE_SORT_SIGNATURE,
    EApp,
    ELam,
    EPi,
    ESort,
    EVar,
    EptsContext,
    EptsTerm,
    FiniteSortSpec,
    InternalizedSortSpec,
    SortSpec,
    sort_of_type,
)


def mangle(name: str) -> str:
    """Escape a sort name so it can be embedded into a constant name.

    Characters outside ``[A-Za-z0-9_]`` are replaced by the percent-hex
    encoding of their UTF-8 bytes, so distinct sort names always yield
    distinct constant names and ``@`` stays free as a separator.
    """
    out: list[str] = []
    for ch in name:
        if ch.isascii() and (ch.isalnum() or ch == "_"):
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8"))
    return "".join(out)


def U_name(s: str) -> str:
    return f"U@{mangle(s)}"


def El_name(s: str) -> str:
    return f"El@{mangle(s)}"


def u_name(s: str) -> str:
    return f"u@{mangle(s)}"


def prod_name(s1: str, s2: str) -> str:
    return f"Prod@{mangle(s1)}@{mangle(s2)}"


def abs_name(s1: str, s2: str) -> str:
    return f"abs@{mangle(s1)}@{mangle(s2)}"


def app_name(s1: str, s2: str) -> str:
    return f"app@{mangle(s1)}@{mangle(s2)}"


INTERNAL_CORE = ("U", "El", "u", "Prod", "abs", "app")


@dataclass
class EncodingTheory:
    """A generated theory together with the tables needed to read it back.

    ``roles`` maps each generated constant to its role and, in finite
    mode, the sort names baked into it, e.g. ``("app", "Type", "Type")``.
    """

    theory: Theory
    spec: SortSpec
    mode: str  # "finite" | "internalized"
    roles: dict[str, tuple[str, ...]] = field(default_factory=dict)
    beta_rules: tuple[str, ...] = ()
    u_red_rules: tuple[str, ...] = ()

    def role_of(self, name: str) -> tuple[str, ...] | None:
        return self.roles.get(name)

    def simulation_labels(self) -> frozenset[str]:
        """Labels of the steps that simulate one source beta step."""
        return frozenset(self.beta_rules) | {BETA}

    def _require(self, *sorts: str) -> None:
        for s in sorts:
            if not self.spec.has_sort(s):
                raise UnknownSort(f"unknown sort '{s}'")

    def _sort_args(self, *sorts: str) -> tuple[DkTerm, ...]:
        return tuple(self.spec.sort_term(s) for s in sorts)

    def sort_name(self, t: DkTerm) -> str | None:
        """Resolve a sort argument back to its surface name (internalized)."""
        if self.mode != "internalized":
            return None
        return self.spec.name_of(dk_nf(self.spec.mini, t))

    def mk_U(self, s: str) -> DkTerm:
        self._require(s)
        if self.mode == "finite":
            return Cons(U_name(s))
        return Cons("U", self._sort_args(s))

    def mk_El(self, s: str, a: DkTerm) -> DkTerm:
        self._require(s)
        if self.mode == "finite":
            return Cons(El_name(s), (a,))
        return Cons("El", self._sort_args(s) + (a,))

    def mk_u(self, s: str) -> DkTerm:
        self._require(s)
        if self.mode == "finite":
            return Cons(u_name(s))
        return Cons("u", self._sort_args(s))

    def mk_prod(self, s1: str, s2: str, a: DkTerm, b: DkTerm) -> DkTerm:
        self._require(s1, s2)
        if self.mode == "finite":
            return Cons(prod_name(s1, s2), (a, b))
        return Cons("Prod", self._sort_args(s1, s2) + (a, b))

    def mk_abs(self, s1: str, s2: str, a: DkTerm, b: DkTerm, m: DkTerm) -> DkTerm:
        self._require(s1, s2)
        if self.mode == "finite":
            return Cons(abs_name(s1, s2), (a, b, m))
        return Cons("abs", self._sort_args(s1, s2) + (a, b, m))

    def mk_app(self, s1: str, s2: str, a: DkTerm, b: DkTerm,
               m: DkTerm, n: DkTerm) -> DkTerm:
        self._require(s1, s2)
        if self.mode == "finite":
            return Cons(app_name(s1, s2), (a, b, m, n))
        return Cons("app", self._sort_args(s1, s2) + (a, b, m, n))

    def beta_label(self, s1: str, s2: str) -> str:
        """The rewrite-rule name that simulates beta at this sort pair."""
        if self.mode == "finite":
            return f"beta@{mangle(s1)}@{mangle(s2)}"
        return "beta"


def generate_finite(spec: FiniteSortSpec) -> EncodingTheory:
    """One constant per sort/axiom/rule; the theory is orthogonal."""
    sig: list[Declaration] = []
    rules: list[RewriteRule] = []
    roles: dict[str, tuple[str, ...]] = {}

    for s in spec.sorts:
        n = U_name(s)
        sig.append(Declaration(n, (), TYPE))
        roles[n] = ("U", s)
    for s in spec.sorts:
        n = El_name(s)
        sig.append(Declaration(n, (("A", Cons(U_name(s))),), TYPE))
        roles[n] = ("El", s)
    for s in spec.sorts:
        target = spec.axioms.get(s)
        if target is None:
            continue
        n = u_name(s)
        sig.append(Declaration(n, (), Cons(U_name(target))))
        roles[n] = ("u", s)
        rules.append(RewriteRule(El_name(target), (Cons(n),), Cons(U_name(s)),
                                 name=f"u-red@{mangle(s)}"))
    for a in spec.sorts:
        for b in spec.sorts:
            c = spec.rules.get((a, b))
            if c is None:
                continue
            el_a = lambda t: Cons(El_name(a), (t,))
            u_b = Cons(U_name(b))
            np, na, nf = prod_name(a, b), abs_name(a, b), app_name(a, b)
            sig.append(Declaration(np, (
                ("A", Cons(U_name(a))),
                ("B", Pi("x", el_a(Var(0)), u_b)),
            ), Cons(U_name(c))))
            sig.append(Declaration(na, (
                ("A", Cons(U_name(a))),
                ("B", Pi("x", el_a(Var(0)), u_b)),
                ("M", Pi("x", el_a(Var(1)),
                         Cons(El_name(b), (App(Var(1), Var(0)),)))),
            ), Cons(El_name(c), (Cons(np, (Var(2), Var(1))),))))
            sig.append(Declaration(nf, (
                ("A", Cons(U_name(a))),
                ("B", Pi("x", el_a(Var(0)), u_b)),
                ("M", Cons(El_name(c), (Cons(np, (Var(1), Var(0))),))),
                ("N", el_a(Var(2))),
            ), Cons(El_name(b), (App(Var(2), Var(0)),))))
            for n in (np, na, nf):
                roles[n] = (n.split("@", 1)[0], a, b)
            rules.append(RewriteRule(
                nf,
                (Meta("A"), Meta("B"),
                 Cons(na, (Meta("A'"), Meta("B'"), Meta("M"))), Meta("N")),
                App(Meta("M"), Meta("N")),
                name=f"beta@{mangle(a)}@{mangle(b)}"))

    theory = Theory(tuple(sig), tuple(rules))
    return EncodingTheory(
        theory, spec, "finite", roles,
        beta_rules=tuple(r.name for r in rules if r.name.startswith("beta@")),
        u_red_rules=tuple(r.name for r in rules if r.name.startswith("u-red@")))


def generate_internalized(spec: InternalizedSortSpec) -> EncodingTheory:
    """A single sort-indexed universe hierarchy plus the user's sort layer."""
    for d in spec.constants:
        if d.name in INTERNAL_CORE:
            raise PimodError(
                f"sort former '{d.name}' collides with a generated constant")

    S = Cons("Sort")
    el = lambda s, t: Cons("El", (s, t))
    sig: list[Declaration] = list(CORE_SORT_SIGNATURE) + list(spec.constants)
    sig.append(Declaration("U", (("s", S),), TYPE))
    sig.append(Declaration("El", (("s", S), ("A", Cons("U", (Var(0),)))), TYPE))
    sig.append(Declaration("u", (("s", S),),
                           Cons("U", (Cons("Ax", (Var(0),)),))))
    sig.append(Declaration("Prod", (
        ("s1", S), ("s2", S),
        ("A", Cons("U", (Var(1),))),
        ("B", Pi("x", el(Var(2), Var(0)), Cons("U", (Var(2),)))),
    ), Cons("U", (Cons("Ru", (Var(3), Var(2))),))))
    sig.append(Declaration("abs", (
        ("s1", S), ("s2", S),
        ("A", Cons("U", (Var(1),))),
        ("B", Pi("x", el(Var(2), Var(0)), Cons("U", (Var(2),)))),
        ("M", Pi("x", el(Var(3), Var(1)),
                 el(Var(3), App(Var(1), Var(0))))),
    ), Cons("El", (Cons("Ru", (Var(4), Var(3))),
                   Cons("Prod", (Var(4), Var(3), Var(2), Var(1)))))))
    sig.append(Declaration("app", (
        ("s1", S), ("s2", S),
        ("A", Cons("U", (Var(1),))),
        ("B", Pi("x", el(Var(2), Var(0)), Cons("U", (Var(2),)))),
        ("M", Cons("El", (Cons("Ru", (Var(3), Var(2))),
                          Cons("Prod", (Var(3), Var(2), Var(1), Var(0)))))),
        ("N", el(Var(4), Var(2))),
    ), Cons("El", (Var(4), App(Var(2), Var(0))))))

    used = {d.name for d in sig}

    def mv(base: str) -> Meta:
        # pattern-variable names must not shadow the user's sort formers
        while base in used:
            base += "_"
        return Meta(base)

    rules: list[RewriteRule] = [
        RewriteRule("El", (mv("t"), Cons("u", (mv("s"),))),
                    Cons("U", (mv("s"),)), name="u-red"),
        RewriteRule("app", (
            mv("s1"), mv("s2"), mv("A"), mv("B"),
            Cons("abs", (mv("t1"), mv("t2"), mv("A'"), mv("B'"), mv("M"))),
            mv("N"),
        ), App(mv("M"), mv("N")), name="beta"),
    ]
    rules.extend(spec.rules)

    theory = Theory(tuple(sig), tuple(rules))
    roles = {n: (n,) for n in INTERNAL_CORE}
    return EncodingTheory(theory, spec, "internalized", roles,
                          beta_rules=("beta",), u_red_rules=("u-red",))


def generate(spec: SortSpec) -> EncodingTheory:
    if isinstance(spec, FiniteSortSpec):
        return generate_finite(spec)
    return generate_internalized(spec)


# --- the translation ------------------------------------------------------------


def translate(enc: EncodingTheory, m: EptsTerm) -> DkTerm:
    """Image of an explicitly annotated term in the generated theory.

    Variables keep their indices, so the image of a judgment lives over
    the pointwise-translated context.  Substitution commutes with this
    map syntactically: translate(M)[translate(N)/x] == translate(M[N/x]).
    """
    match m:
        case EVar(k):
            return Var(k)
        case ESort(s):
            return enc.mk_u(s)
        case EPi(s1, s2, dom, h, cod):
            da = translate(enc, dom)
            return enc.mk_prod(s1, s2, da,
                               Lam(h, enc.mk_El(s1, da), translate(enc, cod)))
        case ELam(s1, s2, dom, h, cod, body):
            da = translate(enc, dom)
            ann = enc.mk_El(s1, da)
            return enc.mk_abs(s1, s2, da,
                              Lam(h, ann, translate(enc, cod)),
                              Lam(h, ann, translate(enc, body)))
        case EApp(s1, s2, dom, h, cod, fn, arg):
            da = translate(enc, dom)
            return enc.mk_app(s1, s2, da,
                              Lam(h, enc.mk_El(s1, da), translate(enc, cod)),
                              translate(enc, fn), translate(enc, arg))
    raise PimodError(f"cannot translate {m!r}")


def translate_ctx(enc: EncodingTheory, ctx: EptsContext,
                  fuel: int | Fuel | None = None) -> DkContext:
    """Pointwise image of a context; each entry lands in its decoding family."""
    f = Fuel.of(fuel)
    out = DkContext()
    prefix = EptsContext()
    for hint, a in ctx.entries:
        s = sort_of_type(enc.spec, prefix, a, f)
        out = out.extend(hint, enc.mk_El(s, translate(enc, a)))
        prefix = prefix.extend(hint, a)
    return out


def expected_dk_type(enc: EncodingTheory, ctx: EptsContext, a: EptsTerm,
                     fuel: int | Fuel | None = None) -> DkTerm:
    """The framework type over ``translate_ctx`` for terms of type ``a``.

    Top sorts land in their universe directly (they have no type, so no
    enclosing ``El``); every other type lands in the decoding of its own
    image, which for a non-top sort ``s`` is convertible to the universe
    of ``s`` by the u-red rule.
    """
    match a:
        case ESort(s) if not enc.spec.axiom_defined(s):
            return enc.mk_U(s)
    s = sort_of_type(enc.spec, ctx, a, fuel)
    return enc.mk_El(s, translate(enc, a))
