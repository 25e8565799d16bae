import pytest

from metalg import (App, BoundExceeded, ParseError, Signature, Var, depth,
                    format_term, parse_signature, parse_term, terms_up_to_depth,
                    vars_of)


def test_parse_signature_basic():
    sig = parse_signature("op xor/2; op zero/0")
    assert sig.symbols == (("xor", 2), ("zero", 0))
    assert sig.arity("xor") == 2
    assert sig.constants() == ("zero",)


def test_parse_signature_unary():
    assert parse_signature("op u/1").symbols == (("u", 1),)


def test_parse_signature_duplicate():
    with pytest.raises(ParseError, match="duplicate symbol"):
        parse_signature("op f/2; op f/1")


def test_parse_signature_negative_arity():
    with pytest.raises(ParseError, match="negative arity"):
        parse_signature("op f/-1")


def test_parse_signature_syntax_error_has_position():
    with pytest.raises(ParseError, match="position"):
        parse_signature("op f 2")


SIG = parse_signature("op xor/2; op u/1; op zero/0")


def test_parse_term_nested():
    t = parse_term(SIG, {"x", "y"}, "xor(x,xor(x,y))")
    assert t == App("xor", (Var("x"), App("xor", (Var("x"), Var("y")))))


def test_parse_term_unary_tower():
    assert parse_term(SIG, {"x"}, "u(u(x))") == App("u", (App("u", (Var("x"),)),))


def test_parse_term_arity_mismatch():
    with pytest.raises(ParseError, match="arity mismatch"):
        parse_term(SIG, {"x"}, "xor(x)")


def test_parse_term_unknown_symbol():
    with pytest.raises(ParseError, match="unknown symbol"):
        parse_term(SIG, {"x"}, "nand(x,x)")


def test_parse_term_undeclared_variable():
    with pytest.raises(ParseError, match="not declared"):
        parse_term(SIG, {"x"}, "xor(x,z)")


def test_constants_bare_or_with_parens():
    assert parse_term(SIG, set(), "zero") == App("zero", ())
    assert parse_term(SIG, set(), "zero()") == App("zero", ())
    # a variable may not shadow a nonconstant operation
    with pytest.raises(ParseError):
        parse_term(SIG, {"u"}, "u")


def test_format_term_examples():
    assert format_term(Var("x")) == "x"
    assert format_term(App("u", (Var("x"),))) == "u(x)"
    assert format_term(App("xor", (Var("x"), Var("y")))) == "xor(x,y)"
    assert format_term(App("zero", ())) == "zero"


def test_whitespace_insignificant():
    assert parse_term(SIG, {"x", "y"}, " xor ( x , y ) ") == \
        parse_term(SIG, {"x", "y"}, "xor(x,y)")


def test_vars_of():
    assert vars_of(Var("x")) == {"x"}
    assert vars_of(App("xor", (Var("x"), Var("y")))) == {"x", "y"}
    assert vars_of(App("zero", ())) == frozenset()


def test_depth_convention():
    assert depth(Var("x")) == 0
    assert depth(App("zero", ())) == 1
    assert depth(App("u", (Var("x"),))) == 1
    assert depth(App("xor", (Var("x"), App("u", (Var("x"),))))) == 2


def test_roundtrip_exhaustive_depth3():
    # every term of depth <= 3 over a 2-symbol signature survives
    # format -> parse unchanged
    sig = parse_signature("op xor/2; op u/1")
    variables = {"x", "y"}
    terms = terms_up_to_depth(sig, variables, 3)
    assert len(terms) == len(set(terms))
    for t in terms:
        assert parse_term(sig, variables, format_term(t)) == t
        assert vars_of(t) <= variables


def test_terms_up_to_depth_layering():
    sig = parse_signature("op u/1; op zero/0")
    terms = terms_up_to_depth(sig, {"x"}, 2)
    texts = [format_term(t) for t in terms]
    assert texts == ["x", "u(x)", "zero", "u(u(x))", "u(zero)"]
    assert [depth(t) for t in terms] == [0, 1, 1, 2, 2]


def test_terms_up_to_depth_bound():
    sig = parse_signature("op xor/2")
    with pytest.raises(BoundExceeded, match="term count"):
        terms_up_to_depth(sig, {"x", "y"}, 4, max_terms=100)


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature.make({"9bad": 1})
    with pytest.raises(ValueError):
        Signature.make([("f", -2)])
