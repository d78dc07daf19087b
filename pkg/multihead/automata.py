"""Two-way multi-head automata: machines, configurations and runs.

A k-head machine reads ``^ x $`` with all heads starting on the left marker.
Head moves past an end marker are clamped, so positions always stay in
``[0, n+1]``. Entering the accept or reject state ends a path, and a
configuration without applicable transitions is stuck (halted, not accepting).
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

import networkx as nx

from . import config
from .errors import BudgetExceeded, InvalidInput, InvalidMachine, InvalidPath, ParseError

log = logging.getLogger(__name__)

LEFT_END = "^"
RIGHT_END = "$"
END_MARKERS = (LEFT_END, RIGHT_END)
RESERVED_TOKENS = frozenset({LEFT_END, RIGHT_END, "->"})


class Move(enum.IntEnum):
    """Head movement; the integer value is the position delta."""

    L = -1
    S = 0
    R = 1

    @classmethod
    def parse(cls, token: str) -> Move:
        """Read ``L``, ``S`` or ``R``; raises ValueError otherwise."""
        try:
            return cls[token]
        except KeyError:
            raise ValueError(f"unknown move {token!r} (expected L, S or R)") from None


def _check_token(token: str, what: str) -> None:
    if not token or any(ch.isspace() for ch in token) or "#" in token:
        raise InvalidMachine(f"{what} {token!r} must be nonempty without whitespace or '#'")


@dataclass(frozen=True, order=True)
class Transition:
    """One entry of the transition relation: (source, scanned symbols) to (target, moves)."""

    source: str
    symbols: tuple[str, ...]
    target: str
    moves: tuple[Move, ...]

    def __str__(self) -> str:
        moves = " ".join(m.name for m in self.moves)
        return f"{self.source} {' '.join(self.symbols)} -> {self.target} {moves}"


@dataclass(frozen=True)
class MultiHeadNFA:
    """A k-head two-way nondeterministic finite automaton."""

    name: str
    heads: int
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    accept: str
    reject: str
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        if self.heads < 1:
            raise InvalidMachine(f"head count must be positive, got {self.heads}")
        for symbol in self.alphabet:
            _check_token(symbol, "symbol")
            if symbol in RESERVED_TOKENS:
                raise InvalidMachine(f"symbol {symbol!r} is reserved")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidMachine("alphabet lists a symbol twice")
        for state in self.states:
            _check_token(state, "state")
        if len(set(self.states)) != len(self.states):
            raise InvalidMachine("state list names a state twice")
        for role in ("initial", "accept", "reject"):
            if getattr(self, role) not in self.states:
                raise InvalidMachine(f"{role} state {getattr(self, role)!r} is not declared")
        if self.accept == self.reject:
            raise InvalidMachine("accept and reject states must differ")
        # the relation is a set: keep the first occurrence of each transition
        object.__setattr__(self, "transitions", tuple(dict.fromkeys(self.transitions)))
        states = set(self.states)
        tape_symbols = set(self.tape_alphabet)
        for t in self.transitions:
            validate_transition(t, self.heads, states, tape_symbols, (self.accept, self.reject))

    @cached_property
    def tape_alphabet(self) -> tuple[str, ...]:
        """Input symbols framed by the two end markers."""
        return (LEFT_END, *self.alphabet, RIGHT_END)

    @cached_property
    def index(self) -> Mapping[tuple[str, tuple[str, ...]], tuple[int, ...]]:
        """Transition ids grouped by (state, scanned symbols)."""
        table: dict[tuple[str, tuple[str, ...]], list[int]] = {}
        for tid, t in enumerate(self.transitions):
            table.setdefault((t.source, t.symbols), []).append(tid)
        return {key: tuple(ids) for key, ids in table.items()}

    @property
    def terminal_states(self) -> tuple[str, str]:
        """The accept and reject states."""
        return (self.accept, self.reject)

    @property
    def nonterminal_states(self) -> tuple[str, ...]:
        """Declared states other than accept and reject, in declaration order."""
        return tuple(q for q in self.states if q not in self.terminal_states)

    def is_terminal(self, state: str) -> bool:
        """Whether ``state`` halts the machine."""
        return state == self.accept or state == self.reject

    def tape(self, word: Sequence[str]) -> tuple[str, ...]:
        """The input tape ``^ word $``; raises InvalidInput for undeclared symbols."""
        check_word(self.alphabet, word)
        return (LEFT_END, *word, RIGHT_END)

    def initial_configuration(self) -> Configuration:
        """Initial state with every head on the left end marker."""
        return Configuration(self.initial, (0,) * self.heads)

    def canonical(self) -> MultiHeadNFA:
        """The same machine with transitions sorted lexicographically."""
        return MultiHeadNFA(
            name=self.name,
            heads=self.heads,
            alphabet=self.alphabet,
            states=self.states,
            initial=self.initial,
            accept=self.accept,
            reject=self.reject,
            transitions=tuple(sorted(self.transitions)),
        )


def validate_transition(t: Transition, heads: int, states, tape_symbols, terminal) -> None:
    """Check one transition against the machine's declarations.

    Args:
        t: The transition to check
        heads: Number of heads of the machine
        states: Declared states
        tape_symbols: Input symbols plus both end markers
        terminal: The accept and reject states, which must have no outgoing transitions

    Raises:
        InvalidMachine: If the arity, a state or a symbol does not match
    """
    if len(t.symbols) != heads or len(t.moves) != heads:
        raise InvalidMachine(f"arity mismatch in '{t}': expected {heads} symbols and moves")
    for state in (t.source, t.target):
        if state not in states:
            raise InvalidMachine(f"undeclared state {state!r} in '{t}'")
    for symbol in t.symbols:
        if symbol not in tape_symbols:
            raise InvalidMachine(f"undeclared symbol {symbol!r} in '{t}'")
    if t.source in terminal:
        raise InvalidMachine(f"transition out of halting state {t.source!r}")


def check_word(alphabet: Sequence[str], word: Sequence[str]) -> None:
    """Raise InvalidInput if ``word`` uses a symbol outside ``alphabet``."""
    allowed = set(alphabet)
    for symbol in word:
        if symbol not in allowed:
            raise InvalidInput(f"symbol {symbol!r} is not in the alphabet {' '.join(alphabet)}")


def split_input(text: str, alphabet: Sequence[str]) -> tuple[str, ...]:
    """Tokenise an input string: per character for one-character alphabets."""
    if all(len(symbol) == 1 for symbol in alphabet):
        word = tuple(text.replace(" ", ""))
    else:
        word = tuple(text.split())
    check_word(alphabet, word)
    return word


def words(alphabet: Sequence[str], max_len: int) -> Iterable[tuple[str, ...]]:
    """All words up to ``max_len``, shortest first, lexicographic within a length."""
    ordered = sorted(alphabet)
    for length in range(max_len + 1):
        yield from itertools.product(ordered, repeat=length)


# Configurations and steps

class Configuration(NamedTuple):
    """Machine state plus the position of every head (0 is the left end marker)."""

    state: str
    positions: tuple[int, ...]

    def __str__(self) -> str:
        return f"({self.state}, {','.join(map(str, self.positions))})"


class PathStep(NamedTuple):
    """A configuration and the id of the transition taken from it."""

    configuration: Configuration
    transition: int


class Lasso(NamedTuple):
    """A reachable cycle: ``stem`` leads from the start to ``cycle[0]``."""

    stem: tuple[Hashable, ...]
    cycle: tuple[Hashable, ...]


def clamp(position: int, move: int, last: int) -> int:
    """Move one cell, never past either end marker."""
    return min(max(position + move, 0), last)


def apply_transition(t: Transition, c: Configuration, last: int) -> Configuration:
    """The configuration reached from ``c`` by ``t`` on a tape whose last cell is ``last``."""
    return Configuration(
        t.target, tuple(clamp(p, m, last) for p, m in zip(c.positions, t.moves))
    )


def scanned(tape: Sequence[str], c: Configuration) -> tuple[str, ...]:
    """Symbols under the heads of ``c``."""
    return tuple(tape[p] for p in c.positions)


def _successors(machine: MultiHeadNFA, tape: Sequence[str], c: Configuration):
    if machine.is_terminal(c.state):
        return []
    last = len(tape) - 1
    ids = machine.index.get((c.state, scanned(tape, c)), ())
    found = [(apply_transition(machine.transitions[tid], c, last), tid) for tid in ids]
    found.sort(key=lambda pair: (pair[1], pair[0]))
    return found


def successors(machine: MultiHeadNFA, word: Sequence[str], c: Configuration):
    """Successor configurations of ``c`` with the id of the transition taken."""
    return _successors(machine, machine.tape(word), c)


# Configuration graph

@dataclass
class ConfigurationGraph:
    """The configurations reachable from the initial one, in BFS order."""

    machine: MultiHeadNFA
    word: tuple[str, ...]
    graph: nx.DiGraph
    initial: Configuration
    order: list[Configuration]
    parents: dict[Configuration, PathStep | None] = field(repr=False)

    def path_to(self, target: Configuration) -> tuple[PathStep, ...]:
        """BFS-tree path from the initial configuration to ``target``."""
        steps = []
        node = target
        while (step := self.parents[node]) is not None:
            steps.append(step)
            node = step.configuration
        return tuple(reversed(steps))

    def find_lasso(self) -> Lasso | None:
        """A reachable cycle with the path leading to it, or None if the graph is acyclic."""
        try:
            edges = nx.find_cycle(self.graph, source=self.initial)
        except nx.NetworkXNoCycle:
            return None
        cycle = tuple(u for u, _v in edges)
        stem = tuple(step.configuration for step in self.path_to(cycle[0]))
        return Lasso(stem, cycle)


def explore(machine: MultiHeadNFA, word: Sequence[str], budget: int | None = None) -> ConfigurationGraph:
    """Build the configuration graph reachable on ``word`` breadth first.

    Args:
        machine: The automaton to run
        word: Input word, without end markers
        budget: Node cap (defaults to config.NODE_BUDGET)

    Returns:
        ConfigurationGraph with nodes in BFS order and a parent for each

    Raises:
        BudgetExceeded: If more than ``budget`` configurations are reachable
    """
    budget = config.NODE_BUDGET if budget is None else budget
    word = tuple(word)
    tape = machine.tape(word)
    start = machine.initial_configuration()
    graph = nx.DiGraph()
    graph.add_node(start)
    parents: dict[Configuration, PathStep | None] = {start: None}
    order = [start]
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for nxt, tid in _successors(machine, tape, c):
            if nxt not in parents:
                if len(parents) >= budget:
                    log.warning(f"{machine.name}: configuration budget {budget} exhausted")
                    raise BudgetExceeded("nodes", budget)
                parents[nxt] = PathStep(c, tid)
                order.append(nxt)
                queue.append(nxt)
            if not graph.has_edge(c, nxt):
                graph.add_edge(c, nxt, transition=tid)
    log.debug(f"{machine.name}: {len(order)} configurations reachable on {''.join(word)!r}")
    return ConfigurationGraph(machine, word, graph, start, order, parents)


class Verdict(enum.Enum):
    """Outcome of a membership query."""

    MEMBER = "member"
    NONMEMBER = "nonmember"


@dataclass(frozen=True)
class RunResult:
    """Result of deciding membership of one word."""

    verdict: Verdict
    path: tuple[PathStep, ...] | None
    halting: bool
    loop_witness: Lasso | None
    explored: int

    @property
    def member(self) -> bool:
        """Whether the word is accepted."""
        return self.verdict is Verdict.MEMBER

    @property
    def choices(self) -> tuple[int, ...]:
        """Transition ids of the accepting path, empty for nonmembers."""
        return tuple(step.transition for step in self.path or ())


def accepts(machine: MultiHeadNFA, word: Sequence[str], budget: int | None = None) -> RunResult:
    """Decide membership by reachability of an accepting configuration."""
    g = explore(machine, word, budget)
    target = next((c for c in g.order if c.state == machine.accept), None)
    lasso = g.find_lasso()
    return RunResult(
        verdict=Verdict.MEMBER if target is not None else Verdict.NONMEMBER,
        path=g.path_to(target) if target is not None else None,
        halting=lasso is None,
        loop_witness=lasso,
        explored=len(g.order),
    )


def always_halts_on(machine: MultiHeadNFA, word: Sequence[str], budget: int | None = None):
    """Whether every computational path on ``word`` halts, with a loop witness if not."""
    lasso = explore(machine, word, budget).find_lasso()
    return lasso is None, lasso


def max_run_steps(machine: MultiHeadNFA, word: Sequence[str], budget: int | None = None) -> int | float:
    """Length of the longest computational path; ``math.inf`` when one loops."""
    g = explore(machine, word, budget)
    if g.find_lasso() is not None:
        return math.inf
    return nx.dag_longest_path_length(g.graph)


class Status(enum.Enum):
    """Where a replayed path ends up."""

    ACCEPT = "accept"
    REJECT = "reject"
    STUCK = "stuck"
    RUNNING = "running"


@dataclass(frozen=True)
class Replay:
    """Configurations visited by a replayed choice sequence and where it ended."""

    configurations: tuple[Configuration, ...]
    status: Status

    @property
    def final(self) -> Configuration:
        """The last configuration reached."""
        return self.configurations[-1]


def status_of(machine: MultiHeadNFA, tape: Sequence[str], c: Configuration) -> Status:
    """Classify ``c`` as accepting, rejecting, stuck (no applicable transition) or running."""
    if c.state == machine.accept:
        return Status.ACCEPT
    if c.state == machine.reject:
        return Status.REJECT
    if (c.state, scanned(tape, c)) not in machine.index:
        return Status.STUCK
    return Status.RUNNING


def replay(machine: MultiHeadNFA, word: Sequence[str], choices: Iterable[int]) -> Replay:
    """Follow an explicit sequence of transition ids from the initial configuration."""
    tape = machine.tape(word)
    last = len(tape) - 1
    c = machine.initial_configuration()
    visited = [c]
    for step, tid in enumerate(choices):
        if machine.is_terminal(c.state):
            raise InvalidPath(f"choice {step} follows a halting configuration")
        if not 0 <= tid < len(machine.transitions):
            raise InvalidPath(f"choice {step}: no transition {tid}")
        t = machine.transitions[tid]
        if t.source != c.state or t.symbols != scanned(tape, c):
            raise InvalidPath(f"choice {step}: transition '{t}' does not apply at {c}")
        c = apply_transition(t, c, last)
        visited.append(c)
    return Replay(tuple(visited), status_of(machine, tape, c))


# Alternating and one-way automata

@dataclass(frozen=True)
class TwoWayAFA:
    """One-head two-way alternating automaton over ``^ x $``."""

    name: str
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    universal: frozenset[str]
    initial: str
    accepting: frozenset[str]
    transitions: Mapping[tuple[str, str], frozenset[tuple[str, Move]]]

    def __post_init__(self):
        states = set(self.states)
        if not self.universal <= states:
            raise InvalidMachine("universal states must be declared")
        if self.initial not in states or not self.accepting <= states:
            raise InvalidMachine("initial and accepting states must be declared")
        symbols = {LEFT_END, *self.alphabet, RIGHT_END}
        for (q, symbol), moves in self.transitions.items():
            if q not in states or symbol not in symbols:
                raise InvalidMachine(f"transition on undeclared ({q}, {symbol})")
            for r, _m in moves:
                if r not in states:
                    raise InvalidMachine(f"transition into undeclared state {r!r}")

    @property
    def existential(self) -> frozenset[str]:
        """States that are not universal."""
        return frozenset(self.states) - self.universal

    def moves(self, state: str, symbol: str) -> frozenset[tuple[str, Move]]:
        """Successor (state, move) pairs; empty when undefined."""
        return self.transitions.get((state, symbol), frozenset())


def afa_accepts(afa: TwoWayAFA, word: Sequence[str], budget: int | None = None) -> bool:
    """Least-fixed-point acceptance over the AND-OR configuration graph."""
    budget = config.NODE_BUDGET if budget is None else budget
    check_word(afa.alphabet, word)
    tape = (LEFT_END, *word, RIGHT_END)
    last = len(tape) - 1
    start = (afa.initial, 0)
    succs: dict[tuple[str, int], set[tuple[str, int]]] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        node = queue.popleft()
        q, pos = node
        nexts = set()
        if q not in afa.accepting:
            nexts = {(r, clamp(pos, m, last)) for r, m in afa.moves(q, tape[pos])}
        succs[node] = nexts
        for nxt in nexts:
            if nxt not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded("nodes", budget)
                seen.add(nxt)
                queue.append(nxt)

    preds: dict[tuple[str, int], list[tuple[str, int]]] = {node: [] for node in succs}
    for node, nexts in succs.items():
        for nxt in nexts:
            preds[nxt].append(node)
    missing = {node: len(nexts) for node, nexts in succs.items()}
    winning = set()
    frontier = deque(
        node for node, nexts in succs.items()
        if node[0] in afa.accepting or (node[0] in afa.universal and not nexts)
    )
    winning.update(frontier)
    while frontier:
        node = frontier.popleft()
        for pred in preds[node]:
            if pred in winning:
                continue
            missing[pred] -= 1
            if pred[0] not in afa.universal or missing[pred] == 0:
                winning.add(pred)
                frontier.append(pred)
    return start in winning


@dataclass(frozen=True)
class OneWayNFA:
    """One-way nondeterministic automaton; states may be any hashable value."""

    alphabet: tuple[str, ...]
    states: tuple[Hashable, ...]
    initial: frozenset
    accepting: frozenset
    transitions: Mapping[tuple[Hashable, str], frozenset]

    def __post_init__(self):
        states = set(self.states)
        if not self.initial <= states or not self.accepting <= states:
            raise InvalidMachine("initial and accepting states must be declared")
        for (q, _symbol), targets in self.transitions.items():
            if q not in states or not targets <= states:
                raise InvalidMachine(f"transition from {q!r} references undeclared states")

    def step(self, current: frozenset, symbol: str) -> frozenset:
        """The set of states reachable from ``current`` on ``symbol``."""
        return frozenset().union(*(self.transitions.get((q, symbol), frozenset()) for q in current))

    def accepts(self, word: Sequence[str]) -> bool:
        """Whether some run on ``word`` ends in an accepting state."""
        check_word(self.alphabet, word)
        current = self.initial
        for symbol in word:
            current = self.step(current, symbol)
        return bool(current & self.accepting)


@dataclass(frozen=True)
class OneWayDFA:
    """Complete one-way deterministic automaton."""

    alphabet: tuple[str, ...]
    states: tuple[Hashable, ...]
    initial: Hashable
    accepting: frozenset
    transitions: Mapping[tuple[Hashable, str], Hashable]

    def __post_init__(self):
        for q in self.states:
            for symbol in self.alphabet:
                if (q, symbol) not in self.transitions:
                    raise InvalidMachine(f"DFA transition function undefined on ({q!r}, {symbol})")

    def accepts(self, word: Sequence[str]) -> bool:
        """Whether the run on ``word`` ends in an accepting state."""
        check_word(self.alphabet, word)
        q = self.initial
        for symbol in word:
            q = self.transitions[q, symbol]
        return q in self.accepting


def determinize(nfa: OneWayNFA, budget: int | None = None) -> OneWayDFA:
    """Subset construction over the reachable subsets (the empty set is the sink)."""
    budget = config.SUBSET_BUDGET if budget is None else budget
    alphabet = tuple(sorted(nfa.alphabet))
    start = nfa.initial
    order = [start]
    seen = {start}
    transitions = {}
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        for symbol in alphabet:
            nxt = nfa.step(subset, symbol)
            transitions[subset, symbol] = nxt
            if nxt not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded("subsets", budget)
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)
    accepting = frozenset(s for s in order if s & nfa.accepting)
    return OneWayDFA(nfa.alphabet, tuple(order), start, accepting, transitions)


# .mhfa text format

_HEADER_KEYS = ("automaton", "heads", "alphabet", "states", "initial", "accept", "reject")


def parse_machine(text: str) -> MultiHeadNFA:
    """Parse a machine in the line-oriented ``.mhfa`` format."""
    header: dict[str, tuple[list[str], int]] = {}
    raw_transitions: list[tuple[list[str], int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        key, args = tokens[0], tokens[1:]
        if key == "trans":
            raw_transitions.append((args, lineno))
        elif key in _HEADER_KEYS:
            if key in header:
                raise ParseError(f"duplicate '{key}' directive", lineno)
            header[key] = (args, lineno)
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    def single(key: str) -> str:
        if key not in header:
            raise ParseError(f"missing '{key}' directive")
        args, lineno = header[key]
        if len(args) != 1:
            raise ParseError(f"'{key}' takes exactly one argument", lineno)
        return args[0]

    def many(key: str) -> tuple[str, ...]:
        if key not in header:
            raise ParseError(f"missing '{key}' directive")
        return tuple(header[key][0])

    heads_token = single("heads")
    try:
        heads = int(heads_token)
    except ValueError:
        raise ParseError(f"head count {heads_token!r} is not an integer", header["heads"][1]) from None
    try:
        machine = MultiHeadNFA(
            name=single("automaton"),
            heads=heads,
            alphabet=many("alphabet"),
            states=many("states"),
            initial=single("initial"),
            accept=single("accept"),
            reject=single("reject"),
        )
    except InvalidMachine as e:
        raise ParseError(str(e)) from None

    states = set(machine.states)
    tape_symbols = set(machine.tape_alphabet)
    transitions = []
    for args, lineno in raw_transitions:
        try:
            t = _parse_transition(args, heads)
            validate_transition(t, heads, states, tape_symbols, machine.terminal_states)
        except (ValueError, InvalidMachine) as e:
            raise ParseError(str(e), lineno) from None
        transitions.append(t)
    return MultiHeadNFA(
        name=machine.name,
        heads=heads,
        alphabet=machine.alphabet,
        states=machine.states,
        initial=machine.initial,
        accept=machine.accept,
        reject=machine.reject,
        transitions=tuple(transitions),
    )


def _parse_transition(args: list[str], heads: int) -> Transition:
    if "->" not in args:
        raise ValueError("transition needs '->'")
    arrow = args.index("->")
    left, right = args[:arrow], args[arrow + 1:]
    if not left or not right:
        raise ValueError("transition needs a source and a target state")
    if len(left) - 1 != heads or len(right) - 1 != heads:
        raise ValueError(
            f"arity mismatch: expected {heads} symbols and {heads} moves, "
            f"got {len(left) - 1} and {len(right) - 1}"
        )
    return Transition(
        source=left[0],
        symbols=tuple(left[1:]),
        target=right[0],
        moves=tuple(Move.parse(m) for m in right[1:]),
    )


def format_machine(machine: MultiHeadNFA, canonical: bool = False) -> str:
    """Serialise to ``.mhfa``; transitions in source order unless ``canonical``."""
    if canonical:
        machine = machine.canonical()
    lines = [
        f"automaton {machine.name}",
        f"heads {machine.heads}",
        f"alphabet {' '.join(machine.alphabet)}".rstrip(),
        f"states {' '.join(machine.states)}",
        f"initial {machine.initial}",
        f"accept {machine.accept}",
        f"reject {machine.reject}",
    ]
    lines.extend(f"trans {t}" for t in machine.transitions)
    return "\n".join(lines) + "\n"
