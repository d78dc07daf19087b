"""Machine-to-machine constructions: head projection, timer and counter heads,
and the all-universal halting wrapper."""

from __future__ import annotations

import itertools
import logging

from .automata import (
    LEFT_END,
    RIGHT_END,
    Move,
    MultiHeadNFA,
    Transition,
    TwoWayAFA,
)
from .errors import ArityError

log = logging.getLogger(__name__)


def _tag(state: str, tag: str) -> str:
    return f"{state}@{tag}"


def project_head(machine: MultiHeadNFA, head: int) -> MultiHeadNFA:
    """The one-head machine that sees only head ``head`` (1-based) of ``machine``.

    Every transition survives with its other readings dropped, so the result
    can follow any step ``machine`` could take while its own reading agrees.
    """
    if not 1 <= head <= machine.heads:
        raise ArityError(f"head {head} out of range 1..{machine.heads}")
    if machine.heads == 1:
        return machine
    i = head - 1
    transitions = tuple(
        Transition(t.source, (t.symbols[i],), t.target, (t.moves[i],))
        for t in machine.transitions
    )
    return MultiHeadNFA(
        name=f"{machine.name}_{head}",
        heads=1,
        alphabet=machine.alphabet,
        states=machine.states,
        initial=machine.initial,
        accept=machine.accept,
        reject=machine.reject,
        transitions=transitions,
    )


def add_timer_head(machine: MultiHeadNFA, slope: int) -> MultiHeadNFA:
    """Add a last head that moves right on the first of every ``slope`` steps.

    The step residue lives in the state (``q@t0`` .. ``q@t{slope-1}``). When the
    timer must move while scanning the right marker the machine rejects, which
    happens once ``slope * (n+1)`` simulated steps have elapsed.
    """
    if slope < 1:
        raise ValueError(f"timer slope must be positive, got {slope}")

    def lift(state: str, phase: int) -> str:
        return state if machine.is_terminal(state) else _tag(state, f"t{phase}")

    states = []
    for q in machine.states:
        states.extend([q] if machine.is_terminal(q) else [lift(q, p) for p in range(slope)])

    halt = (Move.S,) * (machine.heads + 1)
    transitions = []
    for t in machine.transitions:
        for phase in range(slope):
            following = (phase + 1) % slope
            for symbol in machine.tape_alphabet:
                symbols = (*t.symbols, symbol)
                source = lift(t.source, phase)
                if phase > 0:
                    transitions.append(
                        Transition(source, symbols, lift(t.target, following), (*t.moves, Move.S))
                    )
                elif symbol == RIGHT_END:
                    transitions.append(Transition(source, symbols, machine.reject, halt))
                else:
                    transitions.append(
                        Transition(source, symbols, lift(t.target, following), (*t.moves, Move.R))
                    )
    result = MultiHeadNFA(
        name=f"{machine.name}_timer{slope}",
        heads=machine.heads + 1,
        alphabet=machine.alphabet,
        states=tuple(states),
        initial=lift(machine.initial, 0),
        accept=machine.accept,
        reject=machine.reject,
        transitions=tuple(transitions),
    )
    log.info(f"{result.name}: {len(result.states)} states, {len(result.transitions)} transitions")
    return result


def add_counter_heads(machine: MultiHeadNFA) -> MultiHeadNFA:
    """Add k counter heads forming a base-(n+2) odometer that bounds the run.

    Counter 1 advances on every ``|Q|``-th simulated step. A counter that must
    advance while on the right marker rewinds to the left marker with the
    simulation frozen (state ``q@w{i}``) and carries into the next counter;
    a carry out of the last counter rejects.
    """
    k = machine.heads
    modulus = len(machine.states)
    tape = machine.tape_alphabet
    stay = (Move.S,) * k

    def sim(state: str, residue: int) -> str:
        return state if machine.is_terminal(state) else _tag(state, f"c{residue}")

    def rewinding(state: str, counter: int) -> str:
        return _tag(state, f"w{counter}")

    def bump(counter: int) -> tuple[Move, ...]:
        moves = [Move.S] * k
        moves[counter - 1] = Move.R
        return tuple(moves)

    def carry_into(state: str, counter: int, counters: tuple[str, ...]) -> tuple[str, tuple[Move, ...]]:
        """Target and counter moves for advancing ``counter`` (1-based)."""
        if counters[counter - 1] != RIGHT_END:
            return sim(state, 0), bump(counter)
        if counter == k:
            return machine.reject, stay
        return rewinding(state, counter), stay

    states = []
    for q in machine.states:
        if machine.is_terminal(q):
            states.append(q)
        else:
            states.extend(sim(q, r) for r in range(modulus))
            states.extend(rewinding(q, i) for i in range(1, k))

    transitions = []
    for t in machine.transitions:
        for residue in range(modulus):
            for counters in itertools.product(tape, repeat=k):
                symbols = (*t.symbols, *counters)
                source = sim(t.source, residue)
                if machine.is_terminal(t.target):
                    target, extra = t.target, stay
                elif residue < modulus - 1:
                    target, extra = sim(t.target, residue + 1), stay
                else:
                    target, extra = carry_into(t.target, 1, counters)
                transitions.append(Transition(source, symbols, target, (*t.moves, *extra)))

    for q in machine.nonterminal_states:
        for counter in range(1, k):
            for readings in itertools.product(tape, repeat=k):
                for counters in itertools.product(tape, repeat=k):
                    symbols = (*readings, *counters)
                    if counters[counter - 1] != LEFT_END:
                        moves = [Move.S] * k
                        moves[counter - 1] = Move.L
                        target, extra = rewinding(q, counter), tuple(moves)
                    else:
                        target, extra = carry_into(q, counter + 1, counters)
                    transitions.append(
                        Transition(rewinding(q, counter), symbols, target, (*stay, *extra))
                    )

    result = MultiHeadNFA(
        name=f"{machine.name}_counters",
        heads=2 * k,
        alphabet=machine.alphabet,
        states=tuple(states),
        initial=sim(machine.initial, 0),
        accept=machine.accept,
        reject=machine.reject,
        transitions=tuple(transitions),
    )
    log.info(f"{result.name}: {len(result.states)} states, {len(result.transitions)} transitions")
    return result


def halting_wrapper(machine: MultiHeadNFA) -> TwoWayAFA:
    """All-universal 2AFA accepting exactly the inputs on which ``machine`` always halts."""
    if machine.heads != 1:
        raise ArityError(f"halting wrapper needs a one-head machine, got {machine.heads} heads")
    table: dict[tuple[str, str], set[tuple[str, Move]]] = {}
    for t in machine.transitions:
        table.setdefault((t.source, t.symbols[0]), set()).add((t.target, t.moves[0]))
    return TwoWayAFA(
        name=f"{machine.name}_halts",
        alphabet=machine.alphabet,
        states=machine.states,
        universal=frozenset(machine.states),
        initial=machine.initial,
        accepting=frozenset(machine.terminal_states),
        transitions={key: frozenset(moves) for key, moves in table.items()},
    )


def as_existential_afa(machine: MultiHeadNFA) -> TwoWayAFA:
    """A one-head machine read as a 2AFA with only existential states."""
    if machine.heads != 1:
        raise ArityError(f"expected a one-head machine, got {machine.heads} heads")
    wrapper = halting_wrapper(machine)
    return TwoWayAFA(
        name=machine.name,
        alphabet=machine.alphabet,
        states=machine.states,
        universal=frozenset(),
        initial=machine.initial,
        accepting=frozenset({machine.accept}),
        transitions=wrapper.transitions,
    )
