"""Tests for the always-halting decision procedure and head classification.

The pipeline (2AFA wrapper, one-way conversion, universality) is checked
against a bounded configuration-graph search on small machine corpora:
every deterministic machine with one working state over a unary alphabet,
and random machines with up to two working states.

The two-state corpus is sampled rather than enumerated on purpose: each
working state of a unary machine already has 36 candidate transitions (three
tape symbols, four targets, three moves), and every subset of them is a
machine.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multihead.automata import (
    Move,
    MultiHeadNFA,
    OneWayNFA,
    Transition,
    TwoWayAFA,
    afa_accepts,
    always_halts_on,
    max_run_steps,
    words,
)
from multihead.errors import ArityError, BudgetExceeded
from multihead.halting import (
    Method,
    afa_to_onfa,
    analyze_heads,
    counterexample_loops,
    decide_always_halting,
    find_loop_witness,
    head_is_safe,
    onfa_universal,
)
from multihead.transforms import halting_wrapper

TERMINAL = ("qacc", "qrej")


def one_head(alphabet, live, transitions):
    return MultiHeadNFA(
        name="random",
        heads=1,
        alphabet=alphabet,
        states=(*live, *TERMINAL),
        initial=live[0],
        accept="qacc",
        reject="qrej",
        transitions=tuple(transitions),
    )


def random_machines(alphabet, max_live):
    def build(live_count):
        live = tuple(f"q{i}" for i in range(live_count))
        options = [
            Transition(s, (symbol,), t, (m,))
            for s in live
            for symbol in ("^", *alphabet, "$")
            for t in (*live, *TERMINAL)
            for m in Move
        ]
        return st.lists(st.sampled_from(options), max_size=10).map(
            lambda ts: one_head(alphabet, live, ts)
        )

    return st.integers(1, max_live).flatmap(build)


def check_against_bounded_search(machine, max_len):
    safe, witness = decide_always_halting(machine)
    assert decide_always_halting(machine, explicit=True) == (safe, witness)
    found = find_loop_witness(machine, max_len)
    if found is not None:
        assert not safe
        assert witness == found[0]
    if not safe:
        halts, lasso = always_halts_on(machine, witness)
        assert not halts
        assert lasso.cycle
        assert counterexample_loops(machine, witness) == lasso
    else:
        assert witness is None


# Fixtures

def test_pipeline_on_projections(anbn_1, anbn_2):
    assert decide_always_halting(anbn_1) == (False, ("0",))
    assert decide_always_halting(anbn_2) == (True, None)


def test_head_safety(anbn):
    assert not head_is_safe(anbn, 1)
    assert head_is_safe(anbn, 2)


def test_analyze_heads(anbn):
    report = analyze_heads(anbn)
    assert report.method is Method.PIPELINE
    assert report.safe == (2,)
    assert report.risky == (1,)
    assert report.heads[0].witness == ("0",)


def test_safe_head_bounds_run_length(anbn):
    # head 2 is safe, so no run outlasts |Q| steps per tape cell
    for word in words(anbn.alphabet, 6):
        assert max_run_steps(anbn, word) <= len(anbn.states) * (len(word) + 2)


def test_bounded_method_agrees(anbn):
    report = analyze_heads(anbn, Method.BOUNDED, max_len=4)
    assert report.safe == (2,)
    assert report.risky == (1,)


def test_find_loop_witness(anbn_1, anbn_2):
    word, lasso = find_loop_witness(anbn_1, 3)
    assert word == ("0",)
    assert lasso.cycle
    assert find_loop_witness(anbn_2, 6) is None


def test_loop_on_empty_input():
    m = one_head(("a",), ("q0",), [Transition("q0", ("^",), "q0", (Move.S,))])
    assert decide_always_halting(m) == (False, ())
    assert find_loop_witness(m, 2)[0] == ()


def test_stuck_machine_halts():
    m = one_head(("a",), ("q0",), [])
    assert decide_always_halting(m) == (True, None)


def test_one_head_required(anbn):
    with pytest.raises(ArityError):
        decide_always_halting(anbn)
    with pytest.raises(ArityError):
        find_loop_witness(anbn, 2)


# One-way conversion

def test_wrapper_conversion_language(anbn_1):
    nfa = afa_to_onfa(halting_wrapper(anbn_1))
    for word in words(anbn_1.alphabet, 5):
        assert nfa.accepts(word) == always_halts_on(anbn_1, word)[0], word


def test_afa_state_cap():
    live = tuple(f"q{i}" for i in range(7))
    m = one_head(("a",), live, [])
    with pytest.raises(BudgetExceeded) as e:
        afa_to_onfa(halting_wrapper(m))
    assert e.value.budget_name == "afa_states"
    assert afa_to_onfa(halting_wrapper(m), state_cap=7).accepts(("a",))


def test_accept_everything_afa():
    afa = TwoWayAFA(
        name="all",
        alphabet=("a",),
        states=("acc",),
        universal=frozenset(),
        initial="acc",
        accepting=frozenset({"acc"}),
        transitions={},
    )
    assert onfa_universal(afa_to_onfa(afa)) == (True, None)


def test_onfa_universal_counterexample():
    # rejects exactly the words starting with 0
    nfa = OneWayNFA(
        alphabet=("0", "1"),
        states=("s", "ok"),
        initial=frozenset({"s"}),
        accepting=frozenset({"s", "ok"}),
        transitions={
            ("s", "1"): frozenset({"ok"}),
            ("ok", "0"): frozenset({"ok"}),
            ("ok", "1"): frozenset({"ok"}),
        },
    )
    assert onfa_universal(nfa) == (False, ("0",))


def test_onfa_universal_rejecting_start():
    nfa = OneWayNFA(("a",), ("s",), frozenset({"s"}), frozenset(), {})
    assert onfa_universal(nfa) == (False, ())


afa_states = ("a", "b", "c", "acc")


@st.composite
def random_afas(draw):
    moves = st.tuples(
        st.sampled_from(afa_states[:3]),
        st.sampled_from(("^", "0", "1", "$")),
        st.sampled_from(afa_states),
        st.sampled_from(list(Move)),
    )
    table = {}
    for q, symbol, r, m in draw(st.lists(moves, max_size=12)):
        table.setdefault((q, symbol), set()).add((r, m))
    universal = draw(st.sets(st.sampled_from(afa_states[:3])))
    return TwoWayAFA(
        name="random",
        alphabet=("0", "1"),
        states=afa_states,
        universal=frozenset(universal),
        initial="a",
        accepting=frozenset({"acc"}),
        transitions={key: frozenset(value) for key, value in table.items()},
    )


@settings(max_examples=150, deadline=None)
@given(afa=random_afas())
def test_one_way_conversion_matches_afa(afa):
    nfa = afa_to_onfa(afa)
    for word in words(afa.alphabet, 5):
        assert nfa.accepts(word) == afa_accepts(afa, word), word


# Corpora

def _deterministic_one_state_machines():
    options = [None] + [(t, m) for t in ("q0", *TERMINAL) for m in Move]
    for choice in itertools.product(options, repeat=3):
        transitions = [
            Transition("q0", (symbol,), target, (move,))
            for symbol, picked in zip(("^", "a", "$"), choice)
            if picked is not None
            for target, move in [picked]
        ]
        yield one_head(("a",), ("q0",), transitions)


@pytest.mark.slow
def test_exhaustive_one_state_unary_corpus():
    machines = list(_deterministic_one_state_machines())
    assert len(machines) == 1000
    for machine in machines:
        check_against_bounded_search(machine, 4)


@settings(max_examples=100, deadline=None)
@given(machine=random_machines(("a",), 2))
def test_random_unary_machines(machine):
    check_against_bounded_search(machine, 6)


@settings(max_examples=100, deadline=None)
@given(machine=random_machines(("0", "1"), 2))
def test_random_binary_machines(machine):
    check_against_bounded_search(machine, 4)
