"""Reduction engine: labeled rewriting, normalization, conversion, overlaps.

Reduction is beta plus the theory's rewrite rules.  Every contraction
carries a label: the framework beta steps are labeled ``BETA`` and rule
steps carry the rule's name, so normalization can be restricted to a
subset of labels and traces can be replayed and inspected.

``step``/``nf`` follow the leftmost-outermost strategy on the term as
written.  ``whnf`` additionally evaluates constant arguments on demand
while matching, which is what conversion checking needs: a rule whose
pattern inspects an argument position must see that argument's head.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Diagnostic, FuelExhausted
from .terms import (
    App, Cons, DkTerm, Lam, Meta, Pi, RewriteRule, Theory, Var,
    instantiate, metas_of, shift, subst,
)

BETA = "β"

DEFAULT_FUEL = 1_000_000


class Fuel:
    """A mutable step budget shared across one top-level operation."""

    __slots__ = ("remaining", "limit")

    def __init__(self, limit: int = DEFAULT_FUEL):
        if limit <= 0:
            raise ValueError("fuel budget must be positive")
        self.remaining = limit
        self.limit = limit

    def tick(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise FuelExhausted(f"reduction exceeded the budget of {self.limit} steps")

    @staticmethod
    def of(fuel: "int | Fuel | None") -> "Fuel":
        if fuel is None:
            return Fuel(DEFAULT_FUEL)
        if isinstance(fuel, Fuel):
            return fuel
        return Fuel(fuel)


def match_pattern(pattern: DkTerm, term: DkTerm, env: dict[str, DkTerm]) -> bool:
    """First-order syntactic matching; binds pattern variables in ``env``."""
    match pattern:
        case Meta(n):
            if n in env:
                return env[n] == term
            env[n] = term
            return True
        case Cons(c, ps):
            if isinstance(term, Cons) and term.name == c and len(term.args) == len(ps):
                return all(match_pattern(p, a, env) for p, a in zip(ps, term.args))
            return False
        case _:
            return False


def _match_rule(rule: RewriteRule, args: tuple[DkTerm, ...]) -> dict[str, DkTerm] | None:
    env: dict[str, DkTerm] = {}
    if len(args) != len(rule.lhs):
        return None
    for p, a in zip(rule.lhs, args):
        if not match_pattern(p, a, env):
            return None
    return env


def _root_step(theory: Theory, t: DkTerm, labels: frozenset[str] | None) -> tuple[DkTerm, str] | None:
    match t:
        case App(Lam(_, _, body), arg):
            if labels is None or BETA in labels:
                return subst(body, 0, arg), BETA
        case Cons(c, args):
            for rule in theory.rules_for(c):
                if labels is not None and rule.name not in labels:
                    continue
                env = _match_rule(rule, args)
                if env is not None:
                    return instantiate(rule.rhs, env), rule.name
    return None


_CHILDREN = {
    App: ("fn", "arg"),
    Cons: None,  # handled specially
    Lam: ("ann", "body"),
    Pi: ("dom", "cod"),
}


def step(theory: Theory, t: DkTerm, labels: frozenset[str] | set[str] | None = None) -> tuple[DkTerm, str] | None:
    """One leftmost-outermost step whose label lies in ``labels`` (all if None).

    Returns the contracted term and the step's label, or None when no
    such redex exists.
    """
    if labels is not None and not isinstance(labels, frozenset):
        labels = frozenset(labels)
    r = _root_step(theory, t, labels)
    if r is not None:
        return r
    match t:
        case App(f, a):
            s = step(theory, f, labels)
            if s is not None:
                return App(s[0], a), s[1]
            s = step(theory, a, labels)
            if s is not None:
                return App(f, s[0]), s[1]
        case Cons(c, args):
            for i, a in enumerate(args):
                s = step(theory, a, labels)
                if s is not None:
                    return Cons(c, args[:i] + (s[0],) + args[i + 1:]), s[1]
        case Lam(h, ann, body):
            s = step(theory, ann, labels)
            if s is not None:
                return Lam(h, s[0], body), s[1]
            s = step(theory, body, labels)
            if s is not None:
                return Lam(h, ann, s[0]), s[1]
        case Pi(h, dom, cod):
            s = step(theory, dom, labels)
            if s is not None:
                return Pi(h, s[0], cod), s[1]
            s = step(theory, cod, labels)
            if s is not None:
                return Pi(h, dom, s[0]), s[1]
    return None


def _children(u: DkTerm) -> list[DkTerm]:
    match u:
        case App(f, a):
            return [f, a]
        case Cons(_, args):
            return list(args)
        case Lam(_, ann, body):
            return [ann, body]
        case Pi(_, dom, cod):
            return [dom, cod]
        case _:
            return []


def _rebuild(u: DkTerm, i: int, child: DkTerm) -> DkTerm:
    match u:
        case App(f, a):
            return App(child, a) if i == 0 else App(f, child)
        case Cons(c, args):
            return Cons(c, args[:i] + (child,) + args[i + 1:])
        case Lam(h, ann, body):
            return Lam(h, child, body) if i == 0 else Lam(h, ann, child)
        case Pi(h, dom, cod):
            return Pi(h, child, cod) if i == 0 else Pi(h, dom, child)
    raise AssertionError(f"no children to rebuild in {u!r}")


def reducts(theory: Theory, t: DkTerm) -> list[tuple[tuple[int, ...], str, DkTerm]]:
    """All one-step reducts of ``t`` at every position, with labels.

    Positions are child-index paths; used for confluence sampling and
    trace tooling, not by the normalizer.
    """
    out: list[tuple[tuple[int, ...], str, DkTerm]] = []

    def walk(u: DkTerm, path: tuple[int, ...], wrap) -> None:
        match u:
            case App(Lam(_, _, body), arg):
                out.append((path, BETA, wrap(subst(body, 0, arg))))
            case Cons(c, args):
                for rule in theory.rules_for(c):
                    env = _match_rule(rule, args)
                    if env is not None:
                        out.append((path, rule.name, wrap(instantiate(rule.rhs, env))))
        for i, ch in enumerate(_children(u)):
            walk(ch, path + (i,), lambda red, u=u, i=i, wrap=wrap: wrap(_rebuild(u, i, red)))

    walk(t, (), lambda red: red)
    return out


def reduce_trace(
    theory: Theory,
    t: DkTerm,
    labels: frozenset[str] | set[str] | None = None,
    fuel: int | Fuel | None = None,
) -> tuple[DkTerm, list[tuple[str, DkTerm]]]:
    """Normalize under the label filter, returning the labeled trace."""
    f = Fuel.of(fuel)
    trace: list[tuple[str, DkTerm]] = []
    while True:
        s = step(theory, t, labels)
        if s is None:
            return t, trace
        f.tick()
        t = s[0]
        trace.append((s[1], t))


def nf(
    theory: Theory,
    t: DkTerm,
    labels: frozenset[str] | set[str] | None = None,
    fuel: int | Fuel | None = None,
) -> DkTerm:
    """Leftmost-outermost normal form w.r.t. the labeled sub-relation."""
    return reduce_trace(theory, t, labels, fuel)[0]


def _match_whnf(theory: Theory, pattern: DkTerm, holder: list[DkTerm], idx: int,
                env: dict[str, DkTerm], fuel: Fuel) -> bool:
    """Match with on-demand weak-head evaluation of inspected positions.

    Reductions performed while matching are kept in ``holder`` so later
    rule attempts (and the returned term on failure) reuse them.
    """
    match pattern:
        case Meta(n):
            if n in env:
                return env[n] == holder[idx]
            env[n] = holder[idx]
            return True
        case Cons(c, ps):
            t = whnf(theory, holder[idx], fuel)
            holder[idx] = t
            if not (isinstance(t, Cons) and t.name == c and len(t.args) == len(ps)):
                return False
            sub = list(t.args)
            ok = True
            for k, p in enumerate(ps):
                if not _match_whnf(theory, p, sub, k, env, fuel):
                    ok = False
                    break
            holder[idx] = Cons(c, tuple(sub))
            return ok
        case _:
            return False


def whnf(theory: Theory, t: DkTerm, fuel: int | Fuel | None = None) -> DkTerm:
    """Weak-head normal form under beta and the theory's rules.

    The result is root-stable: no further reduction anywhere can create
    a redex at its root (rules are matched after weak-head evaluating
    the argument positions their patterns inspect).
    """
    f = Fuel.of(fuel)
    while True:
        match t:
            case App(fn, arg):
                head = whnf(theory, fn, f)
                if isinstance(head, Lam):
                    f.tick()
                    t = subst(head.body, 0, arg)
                    continue
                return t if head is fn else App(head, arg)
            case Cons(c, args):
                rules = theory.rules_for(c)
                if not rules:
                    return t
                holder = list(args)
                fired = False
                for rule in rules:
                    env: dict[str, DkTerm] = {}
                    ok = True
                    for i, p in enumerate(rule.lhs):
                        if not _match_whnf(theory, p, holder, i, env, f):
                            ok = False
                            break
                    if ok:
                        f.tick()
                        t = instantiate(rule.rhs, env)
                        fired = True
                        break
                if not fired:
                    return Cons(c, tuple(holder))
            case _:
                return t


def convertible(theory: Theory, a: DkTerm, b: DkTerm, fuel: int | Fuel | None = None) -> bool:
    """Do ``a`` and ``b`` have a common reduct?

    Decided by weak-head reduction and congruence descent; complete for
    confluent theories, which is the setting the rest of the toolkit
    establishes before relying on it.
    """
    f = Fuel.of(fuel)

    def go(x: DkTerm, y: DkTerm) -> bool:
        x = whnf(theory, x, f)
        y = whnf(theory, y, f)
        if x == y:
            return True
        match (x, y):
            case (App(f1, a1), App(f2, a2)):
                return go(f1, f2) and go(a1, a2)
            case (Cons(c1, x1), Cons(c2, x2)):
                return c1 == c2 and len(x1) == len(x2) and all(go(p, q) for p, q in zip(x1, x2))
            case (Lam(_, t1, b1), Lam(_, t2, b2)):
                return go(t1, t2) and go(b1, b2)
            case (Pi(_, d1, c1), Pi(_, d2, c2)):
                return go(d1, d2) and go(c1, c2)
            case _:
                return False

    return go(a, b)


# --- overlap analysis -------------------------------------------------------


def _rename_metas(t: DkTerm, suffix: str) -> DkTerm:
    match t:
        case Meta(n):
            return Meta(n + suffix)
        case Cons(c, args):
            return Cons(c, tuple(_rename_metas(a, suffix) for a in args))
        case _:
            return t


def _apply_sub(t: DkTerm, sub: dict[str, DkTerm]) -> DkTerm:
    match t:
        case Meta(n):
            u = sub.get(n)
            return _apply_sub(u, sub) if u is not None else t
        case Cons(c, args):
            return Cons(c, tuple(_apply_sub(a, sub) for a in args))
        case _:
            return t


def _occurs(n: str, t: DkTerm, sub: dict[str, DkTerm]) -> bool:
    match t:
        case Meta(m):
            if m == n:
                return True
            return m in sub and _occurs(n, sub[m], sub)
        case Cons(_, args):
            return any(_occurs(n, a, sub) for a in args)
        case _:
            return False


def _unify(a: DkTerm, b: DkTerm, sub: dict[str, DkTerm]) -> bool:
    a = _apply_sub(a, sub)
    b = _apply_sub(b, sub)
    if a == b:
        return True
    match (a, b):
        case (Meta(n), _):
            if _occurs(n, b, sub):
                return False
            sub[n] = b
            return True
        case (_, Meta(n)):
            if _occurs(n, a, sub):
                return False
            sub[n] = a
            return True
        case (Cons(c1, x1), Cons(c2, x2)):
            return c1 == c2 and len(x1) == len(x2) and all(_unify(p, q, sub) for p, q in zip(x1, x2))
        case _:
            return False


def _pattern_positions(t: DkTerm, path: tuple[int, ...] = ()) -> list[tuple[tuple[int, ...], DkTerm]]:
    """Non-variable positions of a pattern term."""
    out: list[tuple[tuple[int, ...], DkTerm]] = []
    if isinstance(t, Cons):
        out.append((path, t))
        for i, a in enumerate(t.args):
            out.extend(_pattern_positions(a, path + (i,)))
    return out


def _replace_at(t: DkTerm, path: tuple[int, ...], new: DkTerm) -> DkTerm:
    if not path:
        return new
    assert isinstance(t, Cons)
    i = path[0]
    return Cons(t.name, t.args[:i] + (_replace_at(t.args[i], path[1:], new),) + t.args[i + 1:])


@dataclass
class OrthogonalityReport:
    """Outcome of the overlap analysis.

    ``problems`` are left-linearity violations and overlaps whose
    critical pair is not trivially equal; ``notes`` record overlaps both
    of whose one-step reducts coincide (harmless for confluence, but
    still overlaps).
    """

    problems: list[Diagnostic] = field(default_factory=list)
    notes: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    @property
    def orthogonal(self) -> bool:
        return not self.problems and not self.notes


def check_orthogonal(theory: Theory) -> OrthogonalityReport:
    """Left-linearity plus critical-pair analysis of the theory's rules.

    Self-overlaps are considered at proper subterm positions only; a
    rule trivially unifies with itself at the root.
    """
    report = OrthogonalityReport()
    for r in theory.rules:
        seen: set[str] = set()

        def walk(t: DkTerm) -> None:
            match t:
                case Meta(n):
                    if n in seen:
                        report.problems.append(Diagnostic(
                            "non-left-linear",
                            f"pattern variable '{n}' occurs twice on the left-hand side",
                            r.name))
                    seen.add(n)
                case Cons(_, args):
                    for a in args:
                        walk(a)
        for p in r.lhs:
            walk(p)

    rules = list(theory.rules)
    seen_root_pairs: set[tuple[str, str]] = set()
    for i, r1 in enumerate(rules):
        lhs1 = Cons(r1.head, tuple(_rename_metas(p, "#1") for p in r1.lhs))
        rhs1 = _rename_metas(r1.rhs, "#1")
        for j, r2 in enumerate(rules):
            lhs2 = Cons(r2.head, tuple(_rename_metas(p, "#2") for p in r2.lhs))
            rhs2 = _rename_metas(r2.rhs, "#2")
            for path, sub_t in _pattern_positions(lhs1):
                if i == j and path == ():
                    continue
                if path == ():
                    key = (min(r1.name, r2.name), max(r1.name, r2.name))
                    if key in seen_root_pairs:
                        continue
                sub: dict[str, DkTerm] = {}
                if not _unify(sub_t, lhs2, sub):
                    continue
                if path == ():
                    seen_root_pairs.add((min(r1.name, r2.name), max(r1.name, r2.name)))
                peak = _apply_sub(lhs1, sub)
                red_outer = _apply_sub(rhs1, sub)
                red_inner = _apply_sub(_replace_at(lhs1, path, rhs2), sub)
                diag = Diagnostic(
                    "overlap",
                    f"rule '{r2.name}' overlaps '{r1.name}' at position {list(path)}",
                    r1.name,
                    data={"peak": peak, "left": red_outer, "right": red_inner},
                )
                if red_outer == red_inner:
                    diag.severity = "note"
                    diag.message += " (critical pair is trivial)"
                    report.notes.append(diag)
                else:
                    report.problems.append(diag)
    return report
