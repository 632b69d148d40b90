"""Reading framework terms back into explicitly annotated PTS syntax.

The image of the translation is a small fragment of the framework
language, and on that fragment the translation can be undone: ``invert``
is an exact left inverse.  ``conservative_invert`` extends this to any
well-typed inhabitant of an encoded type by beta-normalizing first;
the intermediate soundness facts this relies on are asserted along the
way and raise :class:`InternalSoundnessError` subclasses when violated,
because a failure there is a bug in the toolkit rather than bad input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    Diagnostic,
    EptsCheckFailed,
    FuelExhausted,
    InternalSoundnessError,
    NotInvertible,
    PimodError,
)
from .kernel import TypingConfig, check as dk_check
from .rewrite import BETA, Fuel, convertible, nf, step
from .terms import App, Cons, DkTerm, Lam, Pi, Var
from .epts import (
    EApp,
    ELam,
    EPi,
    ESort,
    EVar,
    EptsContext,
    EptsTerm,
    epts_check,
    epts_infer,
    epts_redex_sorts,
    epts_step,
    epts_subst,
)
from .encode import EncodingTheory, expected_dk_type, translate, translate_ctx


@dataclass(frozen=True)
class InvertibleForm:
    """A framework term seen through the grammar of translation images.

    ``tag`` is one of ``var``, ``sort``, ``prod``, ``abs``, ``app`` and
    ``redex``; ``parts`` holds the subject subterms of the form (binder
    annotations are not among them — they are derivable, hence hidden).
    """

    tag: str
    sorts: tuple[str, ...]
    parts: tuple


_SORT_PREFIX = {"u": 1, "U": 1, "El": 1, "Prod": 2, "abs": 2, "app": 2}


def _split_role(enc: EncodingTheory, name: str,
                args: tuple[DkTerm, ...]) -> tuple[str, tuple[str, ...], tuple[DkTerm, ...]] | None:
    role = enc.role_of(name)
    if role is None:
        return None
    if enc.mode == "finite":
        return role[0], role[1:], args
    k = _SORT_PREFIX[role[0]]
    sorts = []
    for a in args[:k]:
        s = enc.sort_name(a)
        if s is None:
            return None
        sorts.append(s)
    return role[0], tuple(sorts), args[k:]


def recognize(enc: EncodingTheory, t: DkTerm) -> InvertibleForm | None:
    """Match ``t`` against one production of the invertible grammar.

    Only the root is inspected (apart from resolving sort arguments),
    so a positive answer does not mean the whole term inverts.
    """
    match t:
        case Var(k):
            return InvertibleForm("var", (), (k,))
        case App(Lam(h, _, body), arg):
            return InvertibleForm("redex", (), (h, body, arg))
        case Cons(name, args):
            split = _split_role(enc, name, args)
            if split is None:
                return None
            role, sorts, payload = split
            match role, payload:
                case "u", ():
                    return InvertibleForm("sort", sorts, ())
                case "Prod", (a, Lam(h, _, b)):
                    return InvertibleForm("prod", sorts, (a, h, b))
                case "abs", (a, Lam(h, _, b), Lam(_, _, m)):
                    return InvertibleForm("abs", sorts, (a, h, b, m))
                case "app", (a, Lam(h, _, b), m, n):
                    return InvertibleForm("app", sorts, (a, h, b, m, n))
    return None


def invert(enc: EncodingTheory, t: DkTerm) -> EptsTerm:
    """Translate back, discarding binder annotations.

    Beta redexes are contracted on the fly, so this is defined on a
    slightly larger fragment than the literal image of the translation;
    on images it is the exact inverse.
    """
    form = recognize(enc, t)
    if form is None:
        raise NotInvertible("term is outside the invertible fragment", term=t)
    match form.tag:
        case "var":
            return EVar(form.parts[0])
        case "sort":
            return ESort(form.sorts[0])
        case "redex":
            _, body, arg = form.parts
            return epts_subst(invert(enc, body), 0, invert(enc, arg))
        case "prod":
            a, h, b = form.parts
            s1, s2 = form.sorts
            return EPi(s1, s2, invert(enc, a), h, invert(enc, b))
        case "abs":
            a, h, b, m = form.parts
            s1, s2 = form.sorts
            return ELam(s1, s2, invert(enc, a), h, invert(enc, b), invert(enc, m))
        case "app":
            a, h, b, m, n = form.parts
            s1, s2 = form.sorts
            return EApp(s1, s2, invert(enc, a), h, invert(enc, b),
                        invert(enc, m), invert(enc, n))
    raise AssertionError


def hidden_equiv(enc: EncodingTheory, a: DkTerm, b: DkTerm,
                 fuel: int | Fuel | None = None) -> bool:
    """Equality up to conversion inside abstraction annotations only.

    The plain skeletons must agree on the nose; the collected pairs of
    binder annotations merely have to be convertible.  This is the
    precise sense in which annotations are hidden: rewriting can change
    them, but it cannot change what the term says.
    """
    pairs: list[tuple[DkTerm, DkTerm]] = []

    def zip_(x: DkTerm, y: DkTerm) -> bool:
        match x, y:
            case (Lam(_, ann1, b1), Lam(_, ann2, b2)):
                pairs.append((ann1, ann2))
                return zip_(b1, b2)
            case (Cons(c, xs), Cons(d, ys)):
                return c == d and len(xs) == len(ys) and \
                    all(zip_(p, q) for p, q in zip(xs, ys))
            case (App(f1, a1), App(f2, a2)):
                return zip_(f1, f2) and zip_(a1, a2)
            case (Pi(_, d1, c1), Pi(_, d2, c2)):
                return zip_(d1, d2) and zip_(c1, c2)
            case _:
                return x == y

    if not zip_(a, b):
        return False
    f = Fuel.of(fuel)
    return all(convertible(enc.theory, p, q, f) for p, q in pairs)


def conservative_invert(enc: EncodingTheory, ctx: EptsContext, t: DkTerm,
                        a: EptsTerm, fuel: int | Fuel | None = None) -> EptsTerm:
    """Recover a source term from any framework inhabitant of an encoded type.

    ``t`` is first checked against the image of ``a`` over the image of
    ``ctx`` (failures here are ordinary user errors), then beta-normalized
    and inverted.  Everything after the kernel check is guaranteed by the
    encoding's metatheory, so any failure past that point raises an
    :class:`InternalSoundnessError`.
    """
    f = Fuel.of(fuel)
    cfg = TypingConfig(fuel=f.limit)
    dctx = translate_ctx(enc, ctx, f)
    want = expected_dk_type(enc, ctx, a, f)
    dk_check(enc.theory, dctx, t, want, cfg)

    try:
        normal = nf(enc.theory, t, labels={BETA}, fuel=f)
    except FuelExhausted as e:
        raise InternalSoundnessError(
            "beta-normalization of a kernel-accepted term did not terminate "
            "within the step budget", term=t) from e

    m = invert(enc, normal)

    try:
        epts_check(enc.spec, ctx, m, a, f)
    except PimodError as e:
        raise EptsCheckFailed(
            "the recovered source term fails to type-check",
            term=m, reason=str(e)) from e

    if not hidden_equiv(enc, translate(enc, m), normal, f):
        raise InternalSoundnessError(
            "re-translating the recovered term changes more than binder "
            "annotations", term=m)
    return m


def adequacy_roundtrip(enc: EncodingTheory, ctx: EptsContext, m: EptsTerm,
                       fuel: int | Fuel | None = None) -> list[Diagnostic]:
    """Check the adequacy properties of the encoding on one judgment.

    Four legs: the image is well-typed at the expected framework type;
    inversion recovers ``m`` on the nose; a normal ``m`` has a normal
    image (w.r.t. the simulation labels); and a reducible ``m`` is
    simulated by exactly one encoded-beta step followed by one
    framework-beta step, landing on the image of the reduct.
    """
    out: list[Diagnostic] = []
    f = Fuel.of(fuel)
    a = epts_infer(enc.spec, ctx, m, f)
    img = translate(enc, m)

    try:
        cfg = TypingConfig(fuel=f.limit)
        dk_check(enc.theory, translate_ctx(enc, ctx, f), img,
                 expected_dk_type(enc, ctx, a, f), cfg)
    except PimodError as e:
        out.append(Diagnostic("image-ill-typed",
                              f"the image fails kernel checking: {e}", data={"term": m}))

    try:
        back = invert(enc, img)
        if back != m:
            out.append(Diagnostic("not-left-inverse",
                                  "inverting the image does not give back the term",
                                  data={"term": m, "inverted": back}))
    except NotInvertible as e:
        out.append(Diagnostic("not-left-inverse",
                              f"the image is not invertible: {e}", data={"term": m}))

    m2 = epts_step(enc.spec, m)
    if m2 is None:
        if step(enc.theory, img, labels=enc.simulation_labels()) is not None:
            out.append(Diagnostic("image-not-normal",
                                  "the term is beta-normal but its image still "
                                  "has simulation redexes", data={"term": m}))
        return out

    sorts = epts_redex_sorts(enc.spec, m)
    assert sorts is not None
    expected_label = enc.beta_label(*sorts)
    if step(enc.theory, img, labels={BETA}) is not None:
        out.append(Diagnostic("trace-mismatch",
                              "the image has a raw beta redex before the "
                              "encoded one fires", data={"term": m}))
        return out
    r1 = step(enc.theory, img, labels=frozenset(enc.beta_rules))
    if r1 is None or r1[1] != expected_label:
        out.append(Diagnostic("trace-mismatch",
                              f"expected the encoded beta step '{expected_label}' "
                              f"first, got {r1[1] if r1 else 'nothing'}",
                              data={"term": m}))
        return out
    r2 = step(enc.theory, r1[0], labels={BETA})
    if r2 is None:
        out.append(Diagnostic("trace-mismatch",
                              "no framework beta step after the encoded one",
                              data={"term": m}))
        return out
    if r2[0] != translate(enc, m2):
        out.append(Diagnostic("trace-mismatch",
                              "the two simulation steps do not land on the "
                              "image of the reduct",
                              data={"term": m, "got": r2[0]}))
    return out
