"""Formula parsing, evaluation, and interval normalization."""

import pytest
from hypothesis import given, strategies as st

import costodds as co
from costodds import And, Atom, FormulaSyntaxError, IntervalSet, Not, Or


formulas = st.recursive(
    st.integers(min_value=0, max_value=12).map(Atom),
    lambda inner: st.one_of(
        inner.map(Not),
        st.tuples(inner, inner).map(lambda pair: And(*pair)),
        st.tuples(inner, inner).map(lambda pair: Or(*pair)),
    ),
    max_leaves=8,
)


@pytest.mark.parametrize(
    "text,spans",
    [
        ("x<=5", ((0, 5),)),
        ("x>=3", ((3, None),)),
        ("x=4", ((4, 4),)),
        ("x=0", ((0, 0),)),
        ("2<=x<=4", ((2, 4),)),
        ("!(x<=2)", ((3, None),)),
        ("x<=1 | x=3", ((0, 1), (3, 3),)),
        ("!x<=1 & x<=3 | x=5", ((2, 3), (5, 5),)),
        ("x<=2 & x>=2", ((2, 2),)),
        ("x>=0", ((0, None),)),
        ("x<=3 & x>=5", ()),
    ],
)
def test_parse_and_normalize(text, spans):
    assert co.normalize(co.parse(text)).spans == spans


@pytest.mark.parametrize(
    "text",
    ["", "x<5", "x>5", "y<=1", "x<=", "x<=1 &", "((x<=1)", "x<=1)", "x<=-1", "5<=x<=", "x"],
)
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        co.parse(text)


def test_atom_rejects_bad_bounds():
    with pytest.raises(FormulaSyntaxError):
        Atom(-1)
    with pytest.raises(FormulaSyntaxError):
        Atom(True)


def test_whitespace_is_insignificant():
    assert co.parse(" x <= 5 ") == co.parse("x<=5")


def test_precedence_not_binds_tightest():
    # !a & b parses as (!a) & b, and & binds before |.
    assert co.parse("!x<=1 & x<=3") == And(Not(Atom(1)), Atom(3))
    assert co.parse("x<=1 | x<=2 & x<=3") == Or(Atom(1), And(Atom(2), Atom(3)))


@given(formulas, st.integers(min_value=0, max_value=30))
def test_satisfies_matches_normalized_set(formula, value):
    assert co.satisfies(value, formula) == (value in co.normalize(formula))


@given(formulas, st.integers(min_value=0, max_value=20))
def test_verdict_constant_beyond_max_constant(formula, extra):
    edge = co.max_constant(formula) + 1
    assert co.satisfies(edge + extra, formula) == co.satisfies(edge, formula)


@given(formulas)
def test_complement_matches_negation(formula):
    assert co.normalize(Not(formula)) == co.normalize(formula).complement()


@given(formulas)
def test_to_text_round_trips_semantics(formula):
    assert co.normalize(co.parse(co.to_text(formula))) == co.normalize(formula)


@given(formulas)
def test_double_complement_is_identity(formula):
    spans = co.normalize(formula)
    assert spans.complement().complement() == spans


def test_is_constant_formula():
    assert co.is_constant_formula(co.parse("x>=0"))
    assert co.is_constant_formula(co.parse("x<=3 & x>=5"))
    assert co.is_constant_formula(co.parse("x<=3 | x>=2"))
    assert not co.is_constant_formula(co.parse("x<=3"))


def test_interval_set_membership_and_subset():
    spans = IntervalSet(((0, 2), (5, None)))
    assert 0 in spans and 2 in spans and 5 in spans and 100 in spans
    assert 3 not in spans and 4 not in spans
    assert IntervalSet(((6, 9),)).issubset(spans)
    assert not IntervalSet(((4, 6),)).issubset(spans)
    assert spans.issubset(IntervalSet(((0, None),)))


def test_max_constant_picks_largest_atom():
    assert co.max_constant(co.parse("x<=3 | x<=7 & !(x<=5)")) == 7
