"""Tests for the machine model, membership and the .mhfa codec."""

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import machine_from
from multihead.automata import (
    Configuration,
    Move,
    OneWayNFA,
    Status,
    Verdict,
    accepts,
    afa_accepts,
    always_halts_on,
    determinize,
    explore,
    format_machine,
    max_run_steps,
    parse_machine,
    replay,
    split_input,
    successors,
    words,
)
from multihead.errors import BudgetExceeded, InvalidInput, InvalidMachine, InvalidPath, ParseError
from multihead.transforms import as_existential_afa, halting_wrapper

INSTANT = """\
    automaton instant
    heads 1
    alphabet 0
    states q0 qacc qrej
    initial q0
    accept qacc
    reject qrej
    trans q0 ^ -> qacc S
"""

EMPTY = """\
    automaton empty
    heads 2
    alphabet 0 1
    states q0 qacc qrej
    initial q0
    accept qacc
    reject qrej
"""


def w(text):
    return tuple(text)


# Parsing

def test_parse_fixture(anbn):
    assert anbn.heads == 2
    assert anbn.alphabet == ("0", "1")
    assert anbn.states == ("q0", "q1", "q2", "qacc", "qrej")
    assert len(anbn.transitions) == 6
    assert anbn.transitions[0].moves == (Move.R, Move.R)
    assert anbn.tape_alphabet == ("^", "0", "1", "$")


def test_format_then_parse_keeps_machine(anbn):
    assert parse_machine(format_machine(anbn)) == anbn
    assert parse_machine(format_machine(anbn, canonical=True)) == anbn.canonical()


def test_duplicate_transitions_collapse():
    m = machine_from(INSTANT + "    trans q0 ^ -> qacc S\n")
    assert len(m.transitions) == 1


def test_arity_mismatch_reports_line():
    with pytest.raises(ParseError) as e:
        machine_from(EMPTY + "    trans q0 ^ -> qacc S S\n")
    assert e.value.line == 8
    assert "arity" in str(e.value)


def test_transition_out_of_terminal_state_rejected():
    with pytest.raises(ParseError):
        machine_from(EMPTY + "    trans qacc ^ ^ -> q0 S S\n")


@pytest.mark.parametrize("line", [
    "    trans q0 ^ ^ -> q9 S S\n",
    "    trans q0 ^ x -> qacc S S\n",
    "    trans q0 ^ ^ -> qacc S U\n",
    "    trans q0 ^ ^ qacc S S\n",
    "    frobnicate\n",
])
def test_malformed_lines(line):
    with pytest.raises(ParseError):
        machine_from(EMPTY + line)


def test_missing_header():
    with pytest.raises(ParseError, match="missing 'reject'"):
        machine_from(EMPTY.replace("    reject qrej\n", ""))


def test_reserved_symbol_rejected():
    with pytest.raises(ParseError):
        machine_from(EMPTY.replace("alphabet 0 1", "alphabet 0 $"))


def test_accept_equal_reject_rejected(anbn):
    with pytest.raises(InvalidMachine):
        replace(anbn, reject="qacc")


# Inputs

def test_split_input():
    assert split_input("0011", ("0", "1")) == w("0011")
    assert split_input("ab cd", ("ab", "cd")) == ("ab", "cd")
    with pytest.raises(InvalidInput):
        split_input("012", ("0", "1"))


def test_words_are_shortest_then_lexicographic():
    assert list(words(("1", "0"), 2)) == [(), ("0",), ("1",), ("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]


# Steps

def test_successors(anbn):
    assert successors(anbn, w("0011"), Configuration("q1", (1, 3))) == [(Configuration("q2", (2, 4)), 2)]
    assert successors(anbn, w("0011"), Configuration("q1", (1, 1))) == [(Configuration("q1", (1, 2)), 1)]
    assert successors(anbn, w("0011"), Configuration("qacc", (5, 5))) == []


def test_moves_past_end_markers_are_clamped():
    m = machine_from("""\
        automaton clamp
        heads 1
        alphabet 0
        states q0 q1 qacc qrej
        initial q0
        accept qacc
        reject qrej
        trans q0 ^ -> q1 L
        trans q1 ^ -> q1 R
        trans q1 $ -> qacc R
    """)
    assert successors(m, (), Configuration("q0", (0,))) == [(Configuration("q1", (0,)), 0)]
    assert successors(m, (), Configuration("q1", (1,))) == [(Configuration("qacc", (1,)), 2)]


# Membership

def test_anbn_member(anbn):
    result = accepts(anbn, w("0011"))
    assert result.verdict is Verdict.MEMBER
    assert len(result.path) == 6
    assert result.halting
    assert replay(anbn, w("0011"), result.choices).status is Status.ACCEPT


def test_anbn_empty_word(anbn):
    result = accepts(anbn, ())
    assert result.member
    assert len(result.path) == 2


def test_anbn_nonmember_gets_stuck(anbn):
    result = accepts(anbn, w("001"))
    assert not result.member
    assert result.path is None
    assert result.halting


@pytest.mark.parametrize("i", range(5))
def test_anbn_language(anbn, i):
    assert accepts(anbn, ("0",) * i + ("1",) * i).member
    assert not accepts(anbn, ("0",) * i + ("1",) * (i + 1)).member


def test_machine_without_transitions_accepts_nothing():
    m = machine_from(EMPTY)
    for word in words(m.alphabet, 3):
        assert not accepts(m, word).member
        assert always_halts_on(m, word) == (True, None)


def test_all_positions_stay_on_tape(anbn):
    word = w("000111")
    g = explore(anbn, word)
    assert all(0 <= p <= len(word) + 1 for c in g.order for p in c.positions)


def test_budget_exceeded(anbn):
    with pytest.raises(BudgetExceeded) as e:
        accepts(anbn, w("0011"), budget=3)
    assert e.value.budget_name == "nodes"


# Halting and run length

def test_loop_witness(anbn_1):
    halts, lasso = always_halts_on(anbn_1, w("0"))
    assert not halts
    assert Configuration("q1", (1,)) in lasso.cycle
    assert accepts(anbn_1, w("0")).loop_witness is not None


def test_head_two_always_halts(anbn_2):
    for word in words(anbn_2.alphabet, 5):
        assert always_halts_on(anbn_2, word)[0]


def test_max_run_steps(anbn, anbn_1):
    assert max_run_steps(anbn, w("0011")) == 6
    assert max_run_steps(anbn_1, w("0")) == math.inf
    assert max_run_steps(machine_from(INSTANT), ()) == 1


def test_anbn_always_halts(anbn):
    for word in words(anbn.alphabet, 6):
        assert always_halts_on(anbn, word)[0]


# Replay

def test_replay_rejects_inapplicable_choice(anbn):
    with pytest.raises(InvalidPath):
        replay(anbn, w("0011"), [1])
    with pytest.raises(InvalidPath):
        replay(anbn, w("0011"), [0, 99])


def test_replay_stops_at_halting_configuration(anbn):
    choices = accepts(anbn, ()).choices
    with pytest.raises(InvalidPath):
        replay(anbn, (), (*choices, 0))


def test_replay_statuses(anbn):
    assert replay(anbn, w("001"), []).status is Status.RUNNING
    stuck = replay(anbn, w("001"), [0, 1, 1, 2])
    assert stuck.final == Configuration("q2", (2, 4))
    assert stuck.status is Status.STUCK


# Alternating and one-way automata

def test_existential_afa_matches_membership(anbn_1):
    afa = as_existential_afa(anbn_1)
    for word in words(anbn_1.alphabet, 5):
        assert afa_accepts(afa, word) == accepts(anbn_1, word).member


def test_halting_wrapper_matches_always_halts(anbn_1):
    afa = halting_wrapper(anbn_1)
    assert not afa_accepts(afa, w("0"))
    assert afa_accepts(afa, w("1"))
    assert afa_accepts(afa, ())


def test_determinize():
    nfa = OneWayNFA(
        alphabet=("a", "b"),
        states=("s", "t"),
        initial=frozenset({"s"}),
        accepting=frozenset({"t"}),
        transitions={("s", "a"): frozenset({"s", "t"}), ("s", "b"): frozenset({"s"})},
    )
    dfa = determinize(nfa)
    for word in words(nfa.alphabet, 4):
        assert dfa.accepts(word) == nfa.accepts(word) == (word[-1:] == ("a",))


# Properties

transition_orders = st.permutations(list(range(6)))


@settings(max_examples=30, deadline=None)
@given(order=transition_orders, word=st.lists(st.sampled_from("01"), max_size=5))
def test_verdict_ignores_transition_order(anbn, order, word):
    shuffled = replace(anbn, transitions=tuple(anbn.transitions[i] for i in order))
    assert accepts(shuffled, word).member == accepts(anbn, word).member
    assert always_halts_on(shuffled, word)[0] == always_halts_on(anbn, word)[0]


@settings(max_examples=30, deadline=None)
@given(word=st.lists(st.sampled_from("01"), max_size=6))
def test_halting_iff_finite_run_length(anbn_1, word):
    assert always_halts_on(anbn_1, word)[0] == (max_run_steps(anbn_1, word) != math.inf)
