import pytest
from hypothesis import given, strategies as st

from teamlogic.syntax import (
    And, App, DepAtom, EquiAtom, Equality, ExclAtom, Exists, Forall,
    InclAtom, IndepAtom, Name, Or, ParseError, RelAtom, Signature,
    conjoin, disjoin, exists_block, forall_block, free_names, free_variables,
    fresh_vars, is_first_order, negate_nnf, parse, parse_term, render,
    subformula_instances, substitute,
)


def test_parse_atoms():
    assert parse("dep(x, y)") == DepAtom((Name("x"), Name("y")))
    assert parse("incl(x ; y)") == InclAtom((Name("x"),), (Name("y"),))
    assert parse("excl(x,y ; z,w)") == ExclAtom(
        (Name("x"), Name("y")), (Name("z"), Name("w")))
    assert parse("equi(x ; y)") == EquiAtom((Name("x"),), (Name("y"),))
    assert parse("indep( ; x ; x)") == IndepAtom((), (Name("x"),), (Name("x"),))
    assert parse("x = y") == Equality(Name("x"), Name("y"))
    assert parse("x != y") == Equality(Name("x"), Name("y"), positive=False)
    assert parse("~R(x)") == RelAtom("R", (Name("x"),), positive=False)


def test_parse_precedence():
    phi = parse("x = y /\\ y = z \\/ z = x")
    assert isinstance(phi, Or)
    assert isinstance(phi.left, And)
    phi = parse("x = y \\/ y = z \\/ z = x")
    assert isinstance(phi.left, Or)


def test_parse_quantifiers():
    phi = parse("exists x y . x = y")
    assert phi == Exists("x", Exists("y", Equality(Name("x"), Name("y"))))
    phi = parse("forall x . exists y . S(x) = y")
    assert isinstance(phi, Forall) and isinstance(phi.body, Exists)


def test_parse_function_terms():
    assert parse_term("S(S(x))") == App("S", (App("S", (Name("x"),)),))
    phi = parse("S(x) = y")
    assert phi.left == App("S", (Name("x"),))


def test_parse_errors():
    for bad in ("", "x =", "dep()", "incl(x)", "indep(x ; y)",
                "exists . x = y", "~dep(x)", "(x = y", "x = y)"):
        with pytest.raises(ParseError):
            parse(bad)


def test_render_examples():
    for text in ("incl(x ; y) /\\ incl(y ; x)",
                 "indep( ; x ; x)",
                 "forall v . (v = y \\/ excl(x, v ; x, y))",
                 "exists v . (dep(v) /\\ (v = x /\\ R(x)))",
                 "forall a . exists b c . (a = b \\/ b != c)"):
        assert render(parse(text)) == text


def test_signature_check():
    sig = Signature(functions=(("S", 1),), relations=(("R", 2),))
    parse("R(x, y) /\\ S(x) = y", sig)
    with pytest.raises(ParseError):
        parse("R(x)", sig)
    with pytest.raises(ParseError):
        parse("S(x, y) = x", sig)


def test_free_variables():
    phi = parse("exists x . (incl(y ; x) /\\ incl(z ; x))")
    assert free_names(phi) == {"y", "z"}
    assert free_variables(phi, constants=("z",)) == {"y"}


def test_fresh_vars_sequential_and_avoiding():
    assert fresh_vars(3, set()) == ["_v0", "_v1", "_v2"]
    assert fresh_vars(2, {"_v0", "x"}) == ["_v1", "_v2"]


def test_substitute_capture_check():
    phi = Exists("x", Equality(Name("x"), Name("y")))
    assert substitute(phi, {"y": Name("z")}) == \
        Exists("x", Equality(Name("x"), Name("z")))
    with pytest.raises(ValueError):
        substitute(phi, {"y": Name("x")})


def test_negate_nnf():
    phi = parse("forall x . (R(x) \\/ x = y)")
    neg = negate_nnf(phi)
    assert render(neg) == "exists x . (~R(x) /\\ x != y)"
    with pytest.raises(ValueError):
        negate_nnf(parse("dep(x)"))


def test_blocks_and_combinators():
    parts = [parse("x = y"), parse("y = z"), parse("z = x")]
    assert render(conjoin(parts)) == "x = y /\\ y = z /\\ z = x"
    assert render(disjoin(parts)) == "x = y \\/ y = z \\/ z = x"
    assert render(exists_block(["a", "b"], parts[0])) == "exists a b . x = y"
    assert render(forall_block(["a"], conjoin(parts[:2]))) == \
        "forall a . (x = y /\\ y = z)"


def test_subformula_instances_paths_distinguish_occurrences():
    atom = parse("x = y")
    phi = And(atom, atom)
    paths = [path for path, sub in subformula_instances(phi) if sub == atom]
    assert paths == [(0,), (1,)]


def test_is_first_order():
    assert is_first_order(parse("exists x . (R(x) \\/ x != y)"))
    assert not is_first_order(parse("R(x) /\\ incl(x ; y)"))


# --- round trip property ---------------------------------------------------

_names = st.sampled_from(["x", "y", "z", "c0"])
_terms = st.recursive(
    _names.map(Name),
    lambda children: st.tuples(st.sampled_from(["f", "g"]),
                               st.lists(children, min_size=1, max_size=2))
    .map(lambda p: App(p[0], tuple(p[1]))),
    max_leaves=3)
_tuples = st.lists(_terms, min_size=1, max_size=2).map(tuple)


def _atoms():
    return st.one_of(
        st.tuples(_terms, _terms, st.booleans()).map(lambda p: Equality(*p)),
        st.tuples(st.sampled_from(["R", "Q"]), _tuples, st.booleans())
        .map(lambda p: RelAtom(*p)),
        _tuples.map(DepAtom),
        st.tuples(_tuples, _tuples).map(
            lambda p: InclAtom(p[0], p[0] if len(p[0]) != len(p[1]) else p[1])),
        st.tuples(_tuples, _tuples, _tuples).map(lambda p: IndepAtom(*p)),
    )


_formulas = st.recursive(
    _atoms(),
    lambda children: st.one_of(
        st.tuples(children, children).map(lambda p: And(*p)),
        st.tuples(children, children).map(lambda p: Or(*p)),
        st.tuples(_names, children).map(lambda p: Exists(*p)),
        st.tuples(_names, children).map(lambda p: Forall(*p)),
    ),
    max_leaves=6)


@given(_formulas)
def test_parse_render_round_trip(phi):
    assert parse(render(phi)) == phi
