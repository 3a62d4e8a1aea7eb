import pytest
from hypothesis import given, settings, strategies as st

from teamlogic.games import (
    PLAYER_I, PLAYER_II, Arena, ArenaError, Strategy, build_arena,
    find_uniform_winning, format_strategy, is_uniform, plays_following,
    reachable_under,
)
from teamlogic.model import Model, Team
from teamlogic.semantics import Mode, satisfies
from teamlogic.syntax import (
    And, Equality, ExclAtom, InclAtom, Name, Or, parse,
)

DOM = ("0", "1")
M2 = Model(DOM)


def team(pairs, variables=("x", "y")):
    return Team.from_tuples(variables, pairs)


def test_arena_rejects_untranslated_atoms():
    with pytest.raises(ArenaError):
        build_arena(M2, team([("0", "1")]), parse("dep(x, y)"))
    with pytest.raises(ArenaError):
        build_arena(M2, team([("0", "1")]), parse("indep( ; x ; y)"))


def test_arena_shape_for_connectives():
    x = team([("0", "1")])
    arena = build_arena(M2, x, parse("x = y \\/ exists z . z = x"))
    (start,) = arena.initial
    assert arena.turn[start] == PLAYER_II
    assert len(arena.successors[start]) == 2
    quant = arena.successors[start][1]
    assert len(arena.successors[quant]) == len(DOM)


def test_terminal_winners():
    x = team([("0", "1")])
    arena = build_arena(M2, x, parse("x = y"))
    (start,) = arena.initial
    assert arena.is_terminal(start)
    assert arena.terminal_winner(start) == PLAYER_I
    arena = build_arena(M2, x, parse("incl(x ; y)"))
    (start,) = arena.initial
    assert arena.terminal_winner(start) == PLAYER_II


def test_plays_following_counts():
    x = team([("0", "0")])
    arena = build_arena(M2, x, parse("exists z . z = x"))
    (start,) = arena.initial
    tau = Strategy({start: arena.successors[start]})
    assert len(plays_following(arena, tau)) == 2
    tau = Strategy({start: arena.successors[start][:1]})
    assert len(plays_following(arena, tau)) == 1


def test_uniformity_inclusion_needs_witness():
    x = team([("0", "1"), ("1", "0")])
    arena = build_arena(M2, x, parse("incl(x ; y)"))
    tau = Strategy({})
    assert arena.terminal_winner(arena.initial[0]) == PLAYER_II
    assert is_uniform(arena, tau)
    # x value 0 never appears as a y value: no witness position
    x2 = team([("0", "1")])
    arena2 = build_arena(M2, x2, parse("incl(x ; y)"))
    assert not is_uniform(arena2, Strategy({}))


def test_exclusion_uniformity():
    arena = build_arena(M2, team([("0", "1")]), parse("excl(x ; y)"))
    assert is_uniform(arena, Strategy({}))
    arena = build_arena(M2, team([("0", "0")]), parse("excl(x ; y)"))
    assert not is_uniform(arena, Strategy({}))


def test_find_uniform_winning_on_split_disjunction():
    m = Model([str(i) for i in range(5)])
    x = Team.from_tuples(("x", "y", "z"),
                         [("0", "1", "2"), ("1", "0", "3"), ("4", "3", "0")])
    phi = parse("incl(x ; y) \\/ incl(y ; z)")
    assert find_uniform_winning(build_arena(m, x, phi)) is not None
    assert find_uniform_winning(build_arena(m, x, phi),
                                deterministic=True) is None


def test_strategy_dump_is_stable():
    m = Model([str(i) for i in range(5)])
    x = Team.from_tuples(("x", "y", "z"),
                         [("0", "1", "2"), ("1", "0", "3"), ("4", "3", "0")])
    phi = parse("incl(x ; y) \\/ incl(y ; z)")
    arena = build_arena(m, x, phi)
    one = format_strategy(arena, find_uniform_winning(arena))
    two = format_strategy(arena, find_uniform_winning(arena))
    assert one == two and one


def test_reachable_under_requires_total_strategy():
    x = team([("0", "0")])
    arena = build_arena(M2, x, parse("x = y \\/ x != y"))
    with pytest.raises(ValueError):
        reachable_under(arena, Strategy({}))


def test_position_cap():
    m = Model([str(i) for i in range(10)])
    x = Team.from_tuples(("x",), [(d,) for d in m.domain])
    phi = parse("exists a b c d . (a = b /\\ c = d)")
    with pytest.raises(ArenaError):
        Arena(m, x, phi, position_cap=50)


# --- agreement with team semantics ----------------------------------------

_names = st.sampled_from(("x", "y"))
_tuple1 = _names.map(lambda v: (Name(v),))
_ie_atoms = st.one_of(
    st.tuples(_names, _names, st.booleans()).map(
        lambda p: Equality(Name(p[0]), Name(p[1]), p[2])),
    st.tuples(_tuple1, _tuple1).map(lambda p: InclAtom(*p)),
    st.tuples(_tuple1, _tuple1).map(lambda p: ExclAtom(*p)),
)
_ie_formulas = st.recursive(
    _ie_atoms,
    lambda children: st.one_of(
        st.tuples(children, children).map(lambda p: And(*p)),
        st.tuples(children, children).map(lambda p: Or(*p)),
    ),
    max_leaves=4)
_teams = st.lists(st.tuples(st.sampled_from(DOM), st.sampled_from(DOM)),
                  max_size=3).map(team)


@settings(max_examples=200, deadline=None)
@given(_ie_formulas, _teams, st.booleans())
def test_game_agrees_with_team_semantics(phi, x, deterministic):
    arena = build_arena(M2, x, phi)
    tau = find_uniform_winning(arena, deterministic=deterministic)
    mode = Mode.STRICT if deterministic else Mode.LAX
    assert (tau is not None) == satisfies(M2, x, phi, mode).is_sat
    if tau is not None:
        assert is_uniform(arena, tau)
        if deterministic:
            assert tau.is_deterministic()
