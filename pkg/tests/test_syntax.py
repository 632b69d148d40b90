"""Concrete syntax: lexing, the four file formats, and print-parse identity."""

import pytest
from hypothesis import given

from pimod.epts import (EptsContext, PApp, PLam, PPi, PSort, PVar, elaborate,
                        erase_to_pts)
from pimod.errors import NonFunctionalSpec, ParseError
from pimod.syntax import (SortSpecFile, lex, parse_dk_term, parse_epts_file,
                          parse_morphism, parse_pts_term, parse_sort_spec_file,
                          parse_theory, render, render_epts_file,
                          render_morphism, render_sort_spec, render_theory)
from pimod.terms import (KIND, TYPE, App, Cons, Declaration, Lam, Meta, Pi,
                         RewriteRule, Theory, Var, arrow, validate_theory)
from strategies import FREE_NAMES, PARSE_THEORY, dk_terms, pts_terms
from systems import SYSTEM_F, SYSTEM_F_INT
from test_morphism import RENAME, SRC, _target


class TestLex:
    def test_identifiers_are_liberal(self):
        toks = lex("0 u@Type beta@%2A x' _v1")
        assert [t.text for t in toks[:-1]] == \
            ["0", "u@Type", "beta@%2A", "x'", "_v1"]
        assert all(t.kind == "ident" for t in toks[:-1])
        assert toks[-1].kind == "eof"

    def test_punctuation_longest_match(self):
        toks = lex("a --> b -> c := d")
        assert [(t.kind, t.text) for t in toks[:-1]] == [
            ("ident", "a"), ("punct", "-->"), ("ident", "b"), ("punct", "->"),
            ("ident", "c"), ("punct", ":="), ("ident", "d")]

    def test_strings_and_comments(self):
        toks = lex('rule "beta@Type@Type" x # trailing\ny')
        assert toks[1] == toks[1].__class__("string", "beta@Type@Type", 1, 6)
        assert (toks[3].text, toks[3].line, toks[3].col) == ("y", 2, 1)

    def test_spans(self):
        toks = lex("ab\n  cd")
        assert (toks[0].line, toks[0].col) == (1, 1)
        assert (toks[1].line, toks[1].col) == (2, 3)

    def test_lex_errors(self):
        with pytest.raises(ParseError) as e:
            lex('x "unterminated')
        assert e.value.span.col == 3
        with pytest.raises(ParseError) as e:
            lex("x\n $")
        assert (e.value.span.line, e.value.span.col) == (2, 2)


NAT = Theory(
    (Declaration("N", (), TYPE),
     Declaration("z", (), Cons("N")),
     Declaration("plus", (("m", Cons("N")), ("n", Cons("N"))), Cons("N"))),
    ())


class TestParseDkTerm:
    def test_binders_and_variables(self):
        assert parse_dk_term("lam x : N. x", NAT) == \
            Lam("x", Cons("N"), Var(0))
        assert parse_dk_term("lam x : N. lam x : N. x", NAT) == \
            Lam("x", Cons("N"), Lam("x", Cons("N"), Var(0)))
        assert parse_dk_term("Pi x : TYPE. KIND", NAT) == Pi("x", TYPE, KIND)

    def test_names_resolve_newest_last(self):
        assert parse_dk_term("a", NAT, names=("a", "b")) == Var(1)
        assert parse_dk_term("b", NAT, names=("a", "b")) == Var(0)

    def test_application_and_arrow(self):
        assert parse_dk_term("f x (f x x)", NAT, names=("f", "x")) == \
            App(App(Var(1), Var(0)), App(App(Var(1), Var(0)), Var(0)))
        assert parse_dk_term("N -> N", NAT) == arrow(Cons("N"), Cons("N"))
        assert parse_dk_term("N -> N -> N", NAT) == \
            arrow(Cons("N"), arrow(Cons("N"), Cons("N")))

    def test_constant_application(self):
        assert parse_dk_term("plus(z, z)", NAT) == \
            Cons("plus", (Cons("z"), Cons("z")))
        assert parse_dk_term("z", NAT) == Cons("z")
        with pytest.raises(ParseError, match="takes 2 arguments, got 1"):
            parse_dk_term("plus(z)", NAT)
        with pytest.raises(ParseError, match="unknown identifier"):
            parse_dk_term("mystery", NAT)

    def test_metas_only_in_rule_mode(self):
        assert parse_dk_term("plus(M, P)", NAT, metas=True) == \
            Cons("plus", (Meta("M"), Meta("P")))
        with pytest.raises(ParseError):
            parse_dk_term("plus(M, P)", NAT)

    def test_keywords_are_not_names(self):
        with pytest.raises(ParseError):
            parse_dk_term("lam rule : N. N", NAT)


THEORY_SRC = """\
# a universe with a decoding rule, in the generated-name style
constant U_Type : TYPE.
constant U_Kind : TYPE.
constant u_Type : U_Kind.
constant El_Kind (a : U_Kind) : TYPE.
rule "u-red" El_Kind (u_Type) --> U_Type.

assume A : El_Kind (u_Type).
check A : U_Type.
"""


class TestParseTheory:
    def test_full_file(self):
        f = parse_theory(THEORY_SRC)
        assert [d.name for d in f.theory.signature] == \
            ["U_Type", "U_Kind", "u_Type", "El_Kind"]
        assert f.theory.rules == (RewriteRule(
            "El_Kind", (Cons("u_Type"),), Cons("U_Type"), name="u-red"),)
        assert f.assumes.entries == (("A", Cons("El_Kind", (Cons("u_Type"),))),)
        assert f.checks == ((Var(0), Cons("U_Type")),)
        assert validate_theory(f.theory) == []

    def test_rules_get_default_names(self):
        f = parse_theory("constant c : TYPE.\nrule c --> c.\nrule c --> c.")
        assert [r.name for r in f.theory.rules] == ["rule-0", "rule-1"]

    def test_rule_lhs_must_be_a_constant(self):
        with pytest.raises(ParseError, match="left-hand side"):
            parse_theory("constant c : TYPE.\nrule X --> c.")

    def test_errors_carry_positions(self):
        with pytest.raises(ParseError) as e:
            parse_theory("constant c : TYPE\nconstant d : TYPE.")
        assert e.value.span.line == 2
        with pytest.raises(ParseError, match="expected 'constant'"):
            parse_theory("frobnicate.")


JUDGMENTS_SRC = """\
assume C : Type.
assume c : C.
def id : Pi A : Type. A -> A := lam A : Type. lam x : A. x.
def idC := id C.
"""


class TestParseEptsFile:
    def test_pts_terms(self):
        pid = parse_pts_term("lam A : Type. lam x : A. x", SYSTEM_F)
        assert pid == PLam("A", PSort("Type"), PLam("x", PVar(0), PVar(0)))
        assert parse_pts_term("A -> A", SYSTEM_F, names=("A",)) == \
            PPi("_", PVar(0), PVar(1))
        assert parse_pts_term("two", SYSTEM_F, names=("q",),
                              defs={"two": PVar(0)}) == PVar(0)
        with pytest.raises(ParseError, match="unknown identifier"):
            parse_pts_term("Prop", SYSTEM_F)

    def test_definitions_are_inlined_and_shifted(self):
        f = parse_epts_file(JUDGMENTS_SRC, SYSTEM_F)
        assert f.assumes == (("C", PSort("Type")), ("c", PVar(0)))
        pid = PLam("A", PSort("Type"), PLam("x", PVar(0), PVar(0)))
        assert f.definitions == (("id", pid), ("idC", PApp(pid, PVar(1))))
        assert [j.name for j in f.judgments] == ["id"]
        assert f.judgments[0].type == \
            PPi("A", PSort("Type"), PPi("_", PVar(0), PVar(1)))

    def test_definitions_shift_past_later_assumptions(self):
        f = parse_epts_file("assume C : Type.\ndef t := C.\nassume c : C.",
                            SYSTEM_F)
        assert f.definitions == (("t", PVar(1)),)

    def test_rebinding_is_rejected(self):
        with pytest.raises(ParseError, match="already"):
            parse_epts_file("def Type := Type.", SYSTEM_F)
        with pytest.raises(ParseError, match="already"):
            parse_epts_file("assume a : Type.\ndef a := a.", SYSTEM_F)

    def test_judgments_elaborate(self):
        f = parse_epts_file(JUDGMENTS_SRC, SYSTEM_F)
        ctx = EptsContext()
        for h, ty in f.assumes:
            ctx = ctx.extend(h, elaborate(SYSTEM_F, ctx, ty))
        j = f.judgments[0]
        m = elaborate(SYSTEM_F, ctx, j.term)
        assert erase_to_pts(m) == j.term

    def test_render_round_trip(self):
        f = parse_epts_file(JUDGMENTS_SRC, SYSTEM_F)
        g = parse_epts_file(render_epts_file(f), SYSTEM_F)
        assert (g.assumes, g.definitions) == (f.assumes, f.definitions)
        assert [(j.name, j.term, j.type) for j in g.judgments] == \
            [(j.name, j.term, j.type) for j in f.judgments]


SORTS_SRC = """\
[sorts]
Type Kind   # both fit on one line
[axioms]
Type : Kind
[rules]
(Type, Type) : Type
(Kind, Type) : Type
[internalized]
constant type : Sort.
constant kind : Sort.
rule "ax-type" Ax (type) --> kind.
rule "ru-tt" Ru (type, type) --> type.
rule "ru-kt" Ru (kind, type) --> type.
Type := type.
Kind := kind.
"""


class TestSortSpecFiles:
    def test_both_sections(self):
        f = parse_sort_spec_file(SORTS_SRC)
        assert f.finite == SYSTEM_F
        assert f.internalized == SYSTEM_F_INT

    def test_internalized_only(self):
        text = SORTS_SRC[SORTS_SRC.index("[internalized]"):]
        f = parse_sort_spec_file(text)
        assert f.finite is None and f.internalized == SYSTEM_F_INT

    def test_contradictory_axiom_is_rejected(self):
        with pytest.raises(NonFunctionalSpec):
            parse_sort_spec_file(
                "[sorts]\nA B\n[axioms]\nA : A\nA : B\n[rules]\n(A, A) : A")

    def test_malformed_lines_carry_positions(self):
        with pytest.raises(ParseError) as e:
            parse_sort_spec_file("[sorts]\nA\n[axioms]\nA A\n")
        assert e.value.span.line == 4
        with pytest.raises(ParseError, match="before the first section"):
            parse_sort_spec_file("A B\n[sorts]\nA B\n")

    def test_render_round_trip(self):
        f = SortSpecFile(SYSTEM_F, SYSTEM_F_INT)
        g = parse_sort_spec_file(render_sort_spec(f))
        assert (g.finite, g.internalized) == (SYSTEM_F, SYSTEM_F_INT)


class TestMorphismFiles:
    def test_parse_with_telescope_names(self):
        tgt = _target()
        mor = parse_morphism(
            "map N := M.\nmap z := o.\nmap s := succ(x).\n"
            "map f := fD(x).\nmap pair := mk(b, a).",
            SRC, tgt)
        assert mor.body == RENAME

    def test_parse_errors(self):
        tgt = _target()
        with pytest.raises(ParseError, match="not declared"):
            parse_morphism("map ghost := o.", SRC, tgt)
        with pytest.raises(ParseError, match="mapped twice"):
            parse_morphism("map z := o.\nmap z := o.", SRC, tgt)

    def test_render_round_trip(self):
        from pimod.morphism import TheoryMorphism
        mor = TheoryMorphism(SRC, _target(), dict(RENAME))
        back = parse_morphism(render_morphism(mor), SRC, _target())
        assert back.body == mor.body


class TestPrintParseIdentity:
    @given(dk_terms())
    def test_dk_terms(self, t):
        text = render(t, names=FREE_NAMES)
        assert parse_dk_term(text, PARSE_THEORY, FREE_NAMES) == t

    @given(dk_terms(metas=True))
    def test_dk_rule_terms(self, t):
        text = render(t, names=FREE_NAMES)
        assert parse_dk_term(text, PARSE_THEORY, FREE_NAMES, metas=True) == t

    @given(pts_terms())
    def test_pts_terms(self, t):
        text = render(t, names=FREE_NAMES)
        assert parse_pts_term(text, SYSTEM_F, FREE_NAMES) == t

    def test_theory_round_trip_on_generated_encodings(self):
        # telescope hints may be freshened against constant names (MLTT
        # declares a constant 's' that collides with a binder hint), so
        # the round trip is the identity up to hints, and printing the
        # reparsed theory reaches a fixpoint
        def shape(th):
            return ([(d.name, tuple(ty for _, ty in d.telescope), d.result)
                     for d in th.signature], th.rules)

        from test_encode import MLTT_ENC, SF_ENC
        for enc in (SF_ENC, MLTT_ENC):
            text = render_theory(enc.theory)
            f = parse_theory(text)
            assert shape(f.theory) == shape(enc.theory)
            assert render_theory(f.theory) == text

    def test_theory_round_trip_with_judgments(self):
        f = parse_theory(THEORY_SRC)
        text = render_theory(f.theory, f.assumes, f.checks)
        g = parse_theory(text)
        assert (g.theory, g.assumes.entries, g.checks) == \
            (f.theory, f.assumes.entries, f.checks)
