"""Deciding whether a one-head machine always halts.

The pipeline wraps the machine into an all-universal 2AFA that accepts exactly
where every path halts, converts the 2AFA to a one-way automaton and checks
that automaton for universality. A bounded configuration-graph sweep
(`find_loop_witness`) serves as an independent oracle.

The one-way automaton reads the input left to right and keeps, for the prefix
read so far, a summary of the 2AFA game played inside that prefix: for every
live (non-accepting) state q, the truth table of "q wins from the current
rightmost cell" as a function of the set of states that win when stepping
right out of the prefix, plus the same table for the initial configuration.
Summaries compose under least fixed points, so the automaton is deterministic
and accepts exactly the language of the 2AFA.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Sequence

from . import config
from .automata import (
    LEFT_END,
    RIGHT_END,
    Lasso,
    Move,
    MultiHeadNFA,
    OneWayDFA,
    OneWayNFA,
    TwoWayAFA,
    always_halts_on,
    determinize,
    words,
)
from .errors import ArityError, BudgetExceeded
from .transforms import halting_wrapper, project_head

log = logging.getLogger(__name__)

# A summary: one truth table per live state, then the table of the initial
# configuration. Bit S of a table is the value under exit set S.
Summary = tuple[tuple[int, ...], int]


@dataclass(frozen=True)
class _Game:
    afa: TwoWayAFA
    live: tuple[str, ...]

    @property
    def bit(self) -> dict[str, int]:
        return {q: j for j, q in enumerate(self.live)}

    @property
    def valuations(self) -> range:
        return range(1 << len(self.live))


def _column(game: _Game, bit: dict[str, int], symbol: str, exits: int, left: tuple[int, ...] | None) -> int:
    """Least set of live states winning in one column.

    ``exits`` values right-moves out of the column, ``left`` summarises the
    region to its left; moves that would cross an end marker stay in place.
    """
    afa = game.afa
    won = 0
    while True:
        grown = 0
        for j, q in enumerate(game.live):
            values = []
            for r, m in afa.moves(q, symbol):
                if r not in bit:
                    values.append(True)
                elif m == Move.R and symbol != RIGHT_END:
                    values.append(bool(exits >> bit[r] & 1))
                elif m == Move.L and symbol != LEFT_END:
                    values.append(bool(left[bit[r]] >> won & 1))
                else:
                    values.append(bool(won >> bit[r] & 1))
            if all(values) if q in afa.universal else any(values):
                grown |= 1 << j
        if grown == won:
            return won
        won = grown


def _first_summary(game: _Game, bit: dict[str, int]) -> Summary:
    tables = [0] * len(game.live)
    start = 0
    for exits in game.valuations:
        won = _column(game, bit, LEFT_END, exits, None)
        for j in range(len(game.live)):
            if won >> j & 1:
                tables[j] |= 1 << exits
        if game.afa.initial not in bit or won >> bit[game.afa.initial] & 1:
            start |= 1 << exits
    return tuple(tables), start


def _advance(game: _Game, bit: dict[str, int], summary: Summary, symbol: str) -> Summary:
    left, start = summary
    tables = [0] * len(game.live)
    initial = 0
    for exits in game.valuations:
        won = _column(game, bit, symbol, exits, left)
        for j in range(len(game.live)):
            if won >> j & 1:
                tables[j] |= 1 << exits
        if start >> won & 1:
            initial |= 1 << exits
    return tuple(tables), initial


def _closes(game: _Game, bit: dict[str, int], summary: Summary) -> bool:
    left, start = summary
    won = _column(game, bit, RIGHT_END, 0, left)
    return bool(start >> won & 1)


def afa_to_onfa(afa: TwoWayAFA, budget: int | None = None, state_cap: int | None = None) -> OneWayNFA:
    """A one-way automaton for L(afa), built over the reachable prefix summaries."""
    budget = config.SUBSET_BUDGET if budget is None else budget
    state_cap = config.AFA_STATE_CAP if state_cap is None else state_cap
    live = tuple(q for q in afa.states if q not in afa.accepting)
    if len(live) > state_cap:
        log.warning(f"{afa.name}: {len(live)} live states exceed the cap of {state_cap}")
        raise BudgetExceeded("afa_states", state_cap)
    game = _Game(afa, live)
    bit = game.bit
    alphabet = sorted(afa.alphabet)

    start = _first_summary(game, bit)
    order = [start]
    seen = {start}
    transitions: dict[tuple[Hashable, str], frozenset] = {}
    queue = deque([start])
    while queue:
        summary = queue.popleft()
        for symbol in alphabet:
            nxt = _advance(game, bit, summary, symbol)
            transitions[summary, symbol] = frozenset({nxt})
            if nxt not in seen:
                if len(seen) >= budget:
                    log.warning(f"{afa.name}: one-way state budget {budget} exhausted")
                    raise BudgetExceeded("subsets", budget)
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    accepting = frozenset(s for s in order if _closes(game, bit, s))
    log.info(f"{afa.name}: one-way automaton with {len(order)} states, {len(accepting)} accepting")
    return OneWayNFA(
        alphabet=afa.alphabet,
        states=tuple(order),
        initial=frozenset({start}),
        accepting=accepting,
        transitions=transitions,
    )


def _witness(parents: dict, node) -> tuple[str, ...]:
    symbols = []
    while parents[node] is not None:
        node, symbol = parents[node]
        symbols.append(symbol)
    return tuple(reversed(symbols))


def onfa_universal(nfa: OneWayNFA, budget: int | None = None) -> tuple[bool, tuple[str, ...] | None]:
    """Universality by on-the-fly subset exploration.

    Returns the shortest, then lexicographically least, rejected word when the
    automaton is not universal.
    """
    budget = config.SUBSET_BUDGET if budget is None else budget
    alphabet = sorted(nfa.alphabet)
    start = nfa.initial
    parents: dict[frozenset, tuple[frozenset, str] | None] = {start: None}
    queue = deque([start])
    if not start & nfa.accepting:
        return False, ()
    while queue:
        subset = queue.popleft()
        for symbol in alphabet:
            nxt = nfa.step(subset, symbol)
            if nxt in parents:
                continue
            if len(parents) >= budget:
                raise BudgetExceeded("subsets", budget)
            parents[nxt] = (subset, symbol)
            if not nxt & nfa.accepting:
                return False, _witness(parents, nxt)
            queue.append(nxt)
    log.debug(f"universal after {len(parents)} subsets")
    return True, None


def dfa_universal(dfa: OneWayDFA) -> tuple[bool, tuple[str, ...] | None]:
    """Universality of a complete DFA: no rejecting state is reachable."""
    alphabet = sorted(dfa.alphabet)
    parents: dict[Hashable, tuple[Hashable, str] | None] = {dfa.initial: None}
    if dfa.initial not in dfa.accepting:
        return False, ()
    queue = deque([dfa.initial])
    while queue:
        q = queue.popleft()
        for symbol in alphabet:
            nxt = dfa.transitions[q, symbol]
            if nxt in parents:
                continue
            parents[nxt] = (q, symbol)
            if nxt not in dfa.accepting:
                return False, _witness(parents, nxt)
            queue.append(nxt)
    return True, None


def decide_always_halting(
    machine: MultiHeadNFA,
    explicit: bool = False,
    budget: int | None = None,
) -> tuple[bool, tuple[str, ...] | None]:
    """Whether a one-head machine halts on every path of every input.

    On ``False`` the second element is the shortest input with a looping path.
    ``explicit`` materialises the deterministic automaton before the
    universality check instead of exploring subsets on the fly.
    """
    if machine.heads != 1:
        raise ArityError(f"expected a one-head machine, got {machine.heads} heads")
    nfa = afa_to_onfa(halting_wrapper(machine), budget)
    if explicit:
        return dfa_universal(determinize(nfa, budget))
    return onfa_universal(nfa, budget)


def head_is_safe(machine: MultiHeadNFA, head: int, budget: int | None = None) -> bool:
    """Decide whether one head of a multi-head machine is safe.

    A head is safe when its one-head projection halts on every path of every
    input.

    Args:
        machine: The multi-head machine
        head: 1-based head index
        budget: Cap on one-way automaton states (defaults to config.SUBSET_BUDGET)

    Returns:
        True if the head is safe, False if it is risky
    """
    safe, witness = decide_always_halting(project_head(machine, head), budget=budget)
    log.debug(f"{machine.name} head {head}: {'safe' if safe else 'risky'} (witness {witness})")
    return safe


def find_loop_witness(
    machine: MultiHeadNFA,
    max_len: int,
    budget: int | None = None,
) -> tuple[tuple[str, ...], Lasso] | None:
    """Search inputs in order for one with a reachable loop.

    Args:
        machine: A one-head machine
        max_len: Longest input to try
        budget: Node cap per input (defaults to config.NODE_BUDGET)

    Returns:
        The first looping input (shortest, then lexicographic) with its lasso,
        or None if every input up to ``max_len`` halts on all paths
    """
    if machine.heads != 1:
        raise ArityError(f"expected a one-head machine, got {machine.heads} heads")
    for word in words(machine.alphabet, max_len):
        halts, lasso = always_halts_on(machine, word, budget)
        if not halts:
            return word, lasso
    return None


class Method(enum.Enum):
    """How `analyze_heads` decides safety."""

    PIPELINE = "pipeline"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class HeadSafety:
    """Verdict for one head, with the shortest looping input of a risky head."""

    head: int
    safe: bool
    witness: tuple[str, ...] | None = None


@dataclass(frozen=True)
class SafetyReport:
    """Per-head safety verdicts for one machine."""

    machine: str
    method: Method
    heads: tuple[HeadSafety, ...]

    @property
    def safe(self) -> tuple[int, ...]:
        """Indices of the safe heads, ascending."""
        return tuple(h.head for h in self.heads if h.safe)

    @property
    def risky(self) -> tuple[int, ...]:
        """Indices of the risky heads, ascending."""
        return tuple(h.head for h in self.heads if not h.safe)


def analyze_heads(
    machine: MultiHeadNFA,
    method: Method = Method.PIPELINE,
    max_len: int = 6,
    budget: int | None = None,
) -> SafetyReport:
    """Classify every head of ``machine`` as safe or risky.

    Args:
        machine: The multi-head machine
        method: ``PIPELINE`` decides exactly; ``BOUNDED`` only searches inputs
            up to ``max_len`` and may call a risky head safe
        max_len: Input length bound for ``BOUNDED``
        budget: Cap passed to the chosen method

    Returns:
        SafetyReport with one verdict per head
    """
    verdicts = []
    for head in range(1, machine.heads + 1):
        projected = project_head(machine, head)
        if method is Method.PIPELINE:
            safe, witness = decide_always_halting(projected, budget=budget)
        else:
            found = find_loop_witness(projected, max_len, budget)
            safe, witness = found is None, None if found is None else found[0]
        verdicts.append(HeadSafety(head, safe, witness))
    return SafetyReport(machine.name, method, tuple(verdicts))


def counterexample_loops(machine: MultiHeadNFA, word: Sequence[str], budget: int | None = None) -> Lasso | None:
    """The lasso behind a pipeline counterexample, for replay."""
    halts, lasso = always_halts_on(machine, word, budget)
    return None if halts else lasso
