"""Constant-randomness verifiers for multi-head machines.

A verifier reads a certificate: a stream of records (claimed readings of all
heads, next state, head moves). Each round it privately picks one head, tracks
only that head on the real input, and checks every record against the
machine's transition relation. A round ends at a record entering the accept
state; after ``rounds`` passed rounds the verifier accepts.

Head selection comes in three flavours:

- GB picks a risky head with total probability ``w`` and a safe head otherwise,
- SYW picks uniformly among all heads,
- SYS does the same after rejecting up front with probability (k-1)/2k.

All probabilities are exact ``Fraction`` values.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
import logging
import multiprocessing
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import networkx as nx

from . import config
from .automata import (
    Lasso,
    Move,
    MultiHeadNFA,
    Transition,
    accepts,
    clamp,
    scanned,
    words,
)
from .errors import ArityError, BudgetExceeded, CoinUnderflow, ParseError, VerifierError
from .halting import Method, analyze_heads

log = logging.getLogger(__name__)


class Mode(enum.Enum):
    """Head-selection scheme of a verifier.

    ``GB`` weighs risky heads by ``w``; ``SYW`` picks any head uniformly; ``SYS``
    does the same after rejecting up front with probability (k-1)/2k.
    """

    GB = "GB"
    SYW = "SYW"
    SYS = "SYS"


@dataclass(frozen=True)
class HeadClassification:
    """Safe and risky head indices (1-based, ascending)."""

    safe: tuple[int, ...]
    risky: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "safe", tuple(sorted(self.safe)))
        object.__setattr__(self, "risky", tuple(sorted(self.risky)))
        if set(self.safe) & set(self.risky):
            raise VerifierError("a head cannot be both safe and risky")
        if sorted((*self.safe, *self.risky)) != list(range(1, self.heads + 1)):
            raise VerifierError("safe and risky heads must cover 1..k exactly once")

    @property
    def heads(self) -> int:
        """Total head count k."""
        return len(self.safe) + len(self.risky)

    @property
    def k_safe(self) -> int:
        """Number of safe heads."""
        return len(self.safe)

    @property
    def k_risky(self) -> int:
        """Number of risky heads."""
        return len(self.risky)

    def __str__(self) -> str:
        return f"safe:{','.join(map(str, self.safe))};risky:{','.join(map(str, self.risky))}"


def classify_heads(machine: MultiHeadNFA, budget: int | None = None) -> HeadClassification:
    """Classify the heads of ``machine`` with the exact halting pipeline.

    Args:
        machine: The multi-head machine
        budget: Cap on one-way automaton states

    Returns:
        HeadClassification usable by `build_verifier`
    """
    report = analyze_heads(machine, Method.PIPELINE, budget=budget)
    return HeadClassification(report.safe, report.risky)


@dataclass(frozen=True)
class VerifierSpec:
    """A constant-randomness verifier for one machine.

    ``weight_bits`` (B) and ``select_bits`` (SB) are the coins drawn per round
    for the risky/safe choice and the head index. ``hardwired`` fixes the whole
    coin string.
    """

    machine: MultiHeadNFA
    classification: HeadClassification
    mode: Mode
    rounds: int
    weight: Fraction
    weight_bits: int
    select_bits: int
    reject_threshold: int = 0
    approximated: bool = False
    hardwired: tuple[int, ...] | None = None

    @property
    def coins_per_round(self) -> int:
        """Coins flipped at the start of each round."""
        if self.mode is Mode.GB:
            return self.weight_bits + self.select_bits
        return self.select_bits

    @property
    def upfront_coins(self) -> int:
        """Coins flipped before the first round (SYS only)."""
        return self.select_bits + 1 if self.mode is Mode.SYS else 0

    @property
    def coin_budget(self) -> int:
        """Worst-case number of coins over a whole run."""
        return self.upfront_coins + self.rounds * self.coins_per_round

    @property
    def upfront_reject(self) -> Fraction:
        """Probability of rejecting before reading the certificate."""
        if self.mode is not Mode.SYS:
            return Fraction(0)
        return Fraction(self.reject_threshold, 2 ** self.upfront_coins)


def dyadic_bits(value: Fraction) -> int:
    """Least B with value * 2**B integral; raises for non-dyadic values."""
    value = Fraction(value)
    denominator = value.denominator
    if denominator & (denominator - 1):
        raise VerifierError(f"{value} is not a dyadic rational")
    return denominator.bit_length() - 1


def build_verifier(
    machine: MultiHeadNFA,
    classification: HeadClassification,
    mode: Mode,
    rounds: int,
    weight: Fraction | int | str = 0,
    approximate: bool = False,
) -> VerifierSpec:
    """Build a verifier for ``machine``.

    Args:
        machine: The machine whose language is verified
        classification: Safe and risky heads of ``machine``
        mode: Head-selection scheme
        rounds: Number of rounds C
        weight: Total probability of picking a risky head (GB only), dyadic
        approximate: Allow SYS head counts whose rejection probability is not
            dyadic, rounding to the nearest realisable threshold

    Returns:
        The VerifierSpec with its coin accounting

    Raises:
        ArityError: If the classification does not cover the machine's heads
        VerifierError: If the parameters cannot be realised with fair coins
    """
    k = machine.heads
    if classification.heads != k:
        raise ArityError(f"classification covers {classification.heads} heads, machine has {k}")
    if rounds < 1:
        raise VerifierError(f"round count must be positive, got {rounds}")
    select_bits = (k - 1).bit_length()
    weight = Fraction(weight)
    weight_bits = 0
    threshold = 0
    approximated = False

    if mode is Mode.GB:
        if classification.k_safe == 0:
            raise VerifierError("GB verifiers need at least one safe head")
        if not 0 <= weight < 1:
            raise VerifierError(f"risky weight {weight} must lie in [0, 1)")
        weight_bits = dyadic_bits(weight)
        if (weight == 0) != (classification.k_risky == 0):
            raise VerifierError("risky weight must be zero exactly when no head is risky")
    else:
        weight = Fraction(0)

    if mode is Mode.SYS:
        exact = Fraction(k - 1, 2 * k) * 2 ** (select_bits + 1)
        if exact.denominator != 1:
            if not approximate:
                raise VerifierError(
                    f"up-front rejection (k-1)/2k = {Fraction(k - 1, 2 * k)} needs more than "
                    f"{select_bits + 1} coins for k={k}; pass approximate=True"
                )
            approximated = True
            log.info(f"SYS with k={k}: approximating up-front rejection by {round(exact)}/{2 ** (select_bits + 1)}")
        threshold = round(exact)

    spec = VerifierSpec(
        machine=machine,
        classification=classification,
        mode=mode,
        rounds=rounds,
        weight=weight,
        weight_bits=weight_bits,
        select_bits=select_bits,
        reject_threshold=threshold,
        approximated=approximated,
    )
    log.debug(f"{mode.value} verifier for {machine.name}: {spec.coin_budget} coins in the worst case")
    return spec


class HeadDistribution(NamedTuple):
    """Per-head selection probabilities and their minimum p."""

    weights: tuple[Fraction, ...]
    minimum: Fraction


def selection_weights(classification: HeadClassification, mode: Mode, weight: Fraction) -> HeadDistribution:
    """Per-round head probabilities, keeping the non-uniform residues of ``u mod m``."""
    k = classification.heads
    values = 2 ** (k - 1).bit_length()
    weights = [Fraction(0)] * k
    for u in range(values):
        if mode is Mode.GB:
            if classification.risky:
                weights[classification.risky[u % classification.k_risky] - 1] += weight / values
            weights[classification.safe[u % classification.k_safe] - 1] += (1 - weight) / values
        else:
            weights[u % k] += Fraction(1, values)
    return HeadDistribution(tuple(weights), min(weights))


def head_distribution(verifier: VerifierSpec) -> HeadDistribution:
    """Exact probability that each head is tracked in a round."""
    return selection_weights(verifier.classification, verifier.mode, verifier.weight)


# Certificates

class Record(NamedTuple):
    """One certificate entry: claimed scanned symbols, next state and moves."""

    symbols: tuple[str, ...]
    state: str
    moves: tuple[Move, ...]

    def __str__(self) -> str:
        return f"{' '.join(self.symbols)} {self.state} {' '.join(m.name for m in self.moves)}"


@dataclass(frozen=True)
class Certificate:
    """The stream ``prefix · cycle^∞``, or just ``prefix`` when the cycle is empty."""

    prefix: tuple[Record, ...]
    cycle: tuple[Record, ...] = ()

    @property
    def infinite(self) -> bool:
        """Whether the stream has a repeating cycle."""
        return bool(self.cycle)

    def record(self, index: int) -> Record | None:
        """The record at stream position ``index``, or None past a finite end."""
        if index < len(self.prefix):
            return self.prefix[index]
        if not self.cycle:
            return None
        return self.cycle[(index - len(self.prefix)) % len(self.cycle)]

    def cycle_index(self, index: int) -> int | None:
        """Offset of ``index`` inside the cycle; None within the prefix."""
        if not self.cycle or index < len(self.prefix):
            return None
        return (index - len(self.prefix)) % len(self.cycle)


class Segment(NamedTuple):
    """Records ``start..end`` of one round; ``end`` is None for the last open round."""

    start: int
    end: int | None


def segment_rounds(cert: Certificate, accept: str, rounds: int) -> tuple[Segment, ...]:
    """Split the stream into at most ``rounds`` rounds at accept-state records."""
    segments = []
    start = 0
    while len(segments) < rounds:
        end = next(
            (i for i in range(start, max(start, len(cert.prefix)) + len(cert.cycle) + 1)
             if (r := cert.record(i)) is not None and r.state == accept),
            None,
        )
        segments.append(Segment(start, end))
        if end is None:
            break
        start = end + 1
    return tuple(segments)


def check_certificate(machine: MultiHeadNFA, cert: Certificate) -> None:
    """Raise ArityError unless every record has one symbol and one move per head."""
    for record in (*cert.prefix, *cert.cycle):
        if len(record.symbols) != machine.heads or len(record.moves) != machine.heads:
            raise ArityError(f"record '{record}' does not have {machine.heads} symbols and moves")


# Replay

class Verdict(enum.Enum):
    """Result of tracking one head through a round, or of a whole run."""

    PASS = "pass"
    ACCEPT = "accept"
    REJECT = "reject"
    LOOP = "loop"


@dataclass(frozen=True)
class HeadRun:
    """How one tracked head fared in one round; ``position`` is the last record read."""

    verdict: Verdict
    position: int | None = None
    witness: Lasso | None = None


def _allowed(machine: MultiHeadNFA, state: str, record: Record) -> bool:
    if record.state == machine.reject:
        return False
    step = Transition(state, record.symbols, record.state, record.moves)
    return any(machine.transitions[tid] == step for tid in machine.index.get((state, record.symbols), ()))


def replay_round(
    machine: MultiHeadNFA,
    tape: Sequence[str],
    cert: Certificate,
    segment: Segment,
    head: int,
) -> HeadRun:
    """Track one head through one round of records."""
    last = len(tape) - 1
    i = head - 1
    state, position = machine.initial, 0
    seen: dict[tuple[str, int, int], int] = {}
    trail: list[tuple[str, int, int]] = []
    index = segment.start
    while True:
        record = cert.record(index)
        if record is None:
            return HeadRun(Verdict.REJECT, index)
        cycle_index = cert.cycle_index(index)
        if segment.end is None and cycle_index is not None:
            key = (state, position, cycle_index)
            if key in seen:
                first = seen[key]
                return HeadRun(Verdict.LOOP, index, Lasso(tuple(trail[:first]), tuple(trail[first:])))
            seen[key] = len(trail)
            trail.append(key)
        if record.symbols[i] != tape[position] or not _allowed(machine, state, record):
            return HeadRun(Verdict.REJECT, index)
        state = record.state
        position = clamp(position, record.moves[i], last)
        if state == machine.accept:
            return HeadRun(Verdict.PASS, index)
        index += 1


@dataclass(frozen=True)
class RoundOutcomeTable:
    """``rows[j][i-1]`` is the result of tracking head i through round j+1."""

    segments: tuple[Segment, ...]
    rows: tuple[tuple[HeadRun, ...], ...]


def round_outcome_table(verifier: VerifierSpec, word: Sequence[str], cert: Certificate) -> RoundOutcomeTable:
    """Replay every head through every round of ``cert``.

    Round boundaries come from the records alone, so every head sees the same
    segments.

    Args:
        verifier: Supplies the machine and the round count
        word: Input word
        cert: Certificate to check

    Returns:
        RoundOutcomeTable with one row per started round
    """
    machine = verifier.machine
    check_certificate(machine, cert)
    tape = machine.tape(word)
    segments = segment_rounds(cert, machine.accept, verifier.rounds)
    rows = tuple(
        tuple(replay_round(machine, tape, cert, seg, head) for head in range(1, machine.heads + 1))
        for seg in segments
    )
    return RoundOutcomeTable(segments, rows)


@dataclass(frozen=True)
class Outcome:
    """Result of one verifier run; ``round`` 0 is the SYS up-front rejection."""

    verdict: Verdict
    round: int | None = None
    head: int | None = None
    position: int | None = None
    coins_used: int = 0
    witness: Lasso | None = None


class _Coins:
    def __init__(self, bits: Sequence[int]):
        self.bits = tuple(bits)
        self.used = 0

    def take(self, count: int) -> int:
        """Read ``count`` coins as a binary number, most significant first."""
        if self.used + count > len(self.bits):
            raise CoinUnderflow(f"needed {self.used + count} coins, got {len(self.bits)}")
        value = 0
        for bit in self.bits[self.used:self.used + count]:
            value = value << 1 | bit
        self.used += count
        return value


def _pick_head(verifier: VerifierSpec, coins: _Coins) -> int:
    cls = verifier.classification
    if verifier.mode is Mode.GB:
        t = coins.take(verifier.weight_bits)
        u = coins.take(verifier.select_bits)
        if t < verifier.weight * 2 ** verifier.weight_bits:
            return cls.risky[u % cls.k_risky]
        return cls.safe[u % cls.k_safe]
    return coins.take(verifier.select_bits) % verifier.machine.heads + 1


def parse_coins(text: str) -> tuple[int, ...]:
    """Parse a coin string such as ``0110``."""
    if set(text) - {"0", "1"}:
        raise VerifierError(f"coin string {text!r} must consist of 0 and 1")
    return tuple(int(c) for c in text)


def run_verifier(
    verifier: VerifierSpec,
    word: Sequence[str],
    cert: Certificate,
    coins: Iterable[int] = (),
) -> Outcome:
    """One deterministic run of the verifier.

    Args:
        verifier: The verifier
        word: Input word
        cert: Certificate to read
        coins: Coin flips, most significant bit of each draw first; must be
            empty for a verifier with hard-wired coins

    Returns:
        Outcome naming the round, head and record where the run ended

    Raises:
        CoinUnderflow: If the run needs more coins than given
    """
    coins = tuple(coins)
    if verifier.hardwired is not None:
        if coins:
            raise VerifierError("verifier has hard-wired coins")
        coins = verifier.hardwired
    if set(coins) - {0, 1}:
        raise VerifierError("coins must be 0 or 1")
    machine = verifier.machine
    check_certificate(machine, cert)
    tape = machine.tape(word)
    flips = _Coins(coins)

    if verifier.mode is Mode.SYS and flips.take(verifier.upfront_coins) < verifier.reject_threshold:
        return Outcome(Verdict.REJECT, round=0, position=0, coins_used=flips.used)
    for j, seg in enumerate(segment_rounds(cert, machine.accept, verifier.rounds), start=1):
        head = _pick_head(verifier, flips)
        run = replay_round(machine, tape, cert, seg, head)
        log.debug(f"round {j}: head {head} -> {run.verdict.value}")
        if run.verdict is not Verdict.PASS:
            return Outcome(run.verdict, j, head, run.position, flips.used, run.witness)
    return Outcome(Verdict.ACCEPT, verifier.rounds, coins_used=flips.used)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact accept, reject and loop probabilities of a verifier on one certificate."""

    accept: Fraction
    reject: Fraction
    loop: Fraction

    def __post_init__(self):
        if self.accept + self.reject + self.loop != 1:
            raise ValueError(f"probabilities sum to {self.accept + self.reject + self.loop}")

    @property
    def weak_error(self) -> Fraction:
        """Accept probability, counted as error on nonmembers."""
        return self.accept

    @property
    def strong_error(self) -> Fraction:
        """Accept plus loop probability."""
        return self.accept + self.loop


def outcome_distribution(verifier: VerifierSpec, word: Sequence[str], cert: Certificate) -> OutcomeDistribution:
    """Exact outcome probabilities over the verifier's coins.

    Heads are drawn independently in each round, so a round passes with the
    total weight of the heads that pass it.

    Args:
        verifier: The verifier
        word: Input word
        cert: Certificate, finite or lasso-shaped

    Returns:
        OutcomeDistribution summing to exactly 1
    """
    weights = head_distribution(verifier).weights
    table = round_outcome_table(verifier, word, cert)
    alive = Fraction(1)
    loop = Fraction(0)
    for row in table.rows:
        passed = sum((w for w, run in zip(weights, row) if run.verdict is Verdict.PASS), Fraction(0))
        looped = sum((w for w, run in zip(weights, row) if run.verdict is Verdict.LOOP), Fraction(0))
        loop += alive * looped
        alive *= passed
    # fewer rows than rounds only happens after an open round, whose pass mass is 0
    keep = 1 - verifier.upfront_reject
    accept, loop = alive * keep, loop * keep
    return OutcomeDistribution(accept, 1 - accept - loop, loop)


def hardwire_coins(verifier: VerifierSpec, coins: Sequence[int]) -> VerifierSpec:
    """Fix the verifier's coin string.

    Args:
        verifier: A verifier without hard-wired coins
        coins: Exactly ``verifier.coin_budget`` bits

    Returns:
        A coin-free verifier; ``verifier`` itself when it flips no coins

    Raises:
        VerifierError: If ``coins`` has the wrong length
    """
    coins = tuple(coins)
    if len(coins) != verifier.coin_budget:
        raise VerifierError(f"expected {verifier.coin_budget} coins, got {len(coins)}")
    if not coins:
        return verifier
    return dataclasses.replace(verifier, hardwired=coins)


def coin_average_distribution(verifier: VerifierSpec, word: Sequence[str], cert: Certificate) -> OutcomeDistribution:
    """Average of the hard-wired verifiers over every coin string."""
    if verifier.hardwired is not None:
        raise VerifierError("verifier already has hard-wired coins")
    totals = dict.fromkeys(Verdict, 0)
    strings = list(itertools.product((0, 1), repeat=verifier.coin_budget))
    for z in strings:
        totals[run_verifier(hardwire_coins(verifier, z), word, cert).verdict] += 1
    n = len(strings)
    return OutcomeDistribution(
        Fraction(totals[Verdict.ACCEPT], n),
        Fraction(totals[Verdict.REJECT], n),
        Fraction(totals[Verdict.LOOP], n),
    )


# Provers

def honest_certificate(machine: MultiHeadNFA, word: Sequence[str], rounds: int) -> Certificate | None:
    """Log the shortest accepting path once per round.

    Args:
        machine: The machine
        word: Input word
        rounds: Number of copies of the path

    Returns:
        A finite Certificate with true scanned symbols, or None if ``word``
        is not accepted
    """
    result = accepts(machine, word)
    if not result.member:
        return None
    tape = machine.tape(word)
    path = tuple(
        Record(scanned(tape, step.configuration), machine.transitions[step.transition].target,
               machine.transitions[step.transition].moves)
        for step in result.path
    )
    return Certificate(path * rounds)


# Product node: (state, positions, alive bitmask); dead heads sit at position 0.
_Node = tuple[str, tuple[int, ...], int]


@dataclass
class _Product:
    graph: nx.DiGraph
    parents: dict[_Node, tuple[_Node, Record] | None]
    best_accept: _Node | None
    best_loop: _Node | None
    accept_mass: Fraction
    loop_mass: Fraction

    def records_to(self, node: _Node) -> tuple[Record, ...]:
        records = []
        while (step := self.parents[node]) is not None:
            node, record = step
            records.append(record)
        return tuple(reversed(records))

    def cycle_through(self, node: _Node) -> tuple[Record, ...]:
        component = next(c for c in nx.strongly_connected_components(self.graph) if node in c)
        if self.graph.has_edge(node, node):
            return (self.graph.edges[node, node]["record"],)
        following = next(v for v in self.graph.successors(node) if v in component)
        path = nx.shortest_path(self.graph.subgraph(component), following, node)
        records = [self.graph.edges[node, following]["record"]]
        records.extend(self.graph.edges[u, v]["record"] for u, v in itertools.pairwise(path))
        return tuple(records)


def _explore_product(verifier: VerifierSpec, word: Sequence[str], budget: int | None = None) -> _Product:
    budget = config.PRODUCT_BUDGET if budget is None else budget
    machine = verifier.machine
    tape = machine.tape(word)
    last = len(tape) - 1
    k = machine.heads
    weights = head_distribution(verifier).weights

    def mass(alive: int) -> Fraction:
        return sum((weights[i] for i in range(k) if alive >> i & 1), Fraction(0))

    by_source: dict[str, list[Transition]] = {}
    for t in machine.transitions:
        if t.target != machine.reject:
            by_source.setdefault(t.source, []).append(t)

    start: _Node = (machine.initial, (0,) * k, (1 << k) - 1)
    graph = nx.DiGraph()
    graph.add_node(start)
    parents: dict[_Node, tuple[_Node, Record] | None] = {start: None}
    order = [start]
    queue = deque([start])
    while queue:
        node = queue.popleft()
        state, positions, alive = node
        if machine.is_terminal(state):
            continue
        for t in by_source.get(state, ()):
            survivors = alive
            moved = list(positions)
            for i in range(k):
                if not alive >> i & 1:
                    continue
                if t.symbols[i] == tape[positions[i]]:
                    moved[i] = clamp(positions[i], t.moves[i], last)
                else:
                    survivors &= ~(1 << i)
                    moved[i] = 0
            if not survivors:
                continue
            nxt: _Node = (t.target, tuple(moved), survivors)
            record = Record(t.symbols, t.target, t.moves)
            if nxt not in parents:
                if len(parents) >= budget:
                    log.warning(f"{machine.name}: product budget {budget} exhausted")
                    raise BudgetExceeded("product_nodes", budget)
                parents[nxt] = (node, record)
                order.append(nxt)
                queue.append(nxt)
            if not graph.has_edge(node, nxt):
                graph.add_edge(node, nxt, record=record)

    rank = {node: i for i, node in enumerate(order)}
    best_accept, accept_mass = None, Fraction(0)
    for node in order:
        if node[0] == machine.accept and mass(node[2]) > accept_mass:
            best_accept, accept_mass = node, mass(node[2])
    best_loop, loop_mass = None, Fraction(0)
    for component in nx.strongly_connected_components(graph):
        first = min(component, key=rank.__getitem__)
        if len(component) == 1 and not graph.has_edge(first, first):
            continue
        # alive flags only shrink along edges, so they are constant on a cycle
        value = mass(first[2])
        if value > loop_mass or (value == loop_mass and best_loop is not None and rank[first] < rank[best_loop]):
            best_loop, loop_mass = first, value
    log.info(f"{machine.name} on {''.join(word)!r}: {len(order)} product nodes")
    return _Product(graph, parents, best_accept, best_loop, accept_mass, loop_mass)


class Attack(NamedTuple):
    """An adversarial certificate and what it achieves."""

    certificate: Certificate
    distribution: OutcomeDistribution


def best_adversarial_certificate(verifier: VerifierSpec, word: Sequence[str], budget: int | None = None) -> Attack:
    """A certificate maximising accept plus loop probability.

    Rounds are independent, so the best stream either repeats the best single
    round ``rounds`` times or loops in the very first round; looping wins ties.
    """
    product = _explore_product(verifier, word, budget)
    finite = product.accept_mass ** verifier.rounds
    if product.best_loop is not None and product.loop_mass >= finite:
        cert = Certificate(product.records_to(product.best_loop), product.cycle_through(product.best_loop))
    elif product.best_accept is not None:
        cert = Certificate(product.records_to(product.best_accept) * verifier.rounds)
    else:
        cert = Certificate(())
    return Attack(cert, outcome_distribution(verifier, word, cert))


# Error sweeps

@dataclass(frozen=True)
class ErrorRow:
    """Best strong and weak error against one nonmember."""

    word: tuple[str, ...]
    strong: Fraction
    weak: Fraction


@dataclass(frozen=True)
class ErrorReport:
    """Worst-case errors over the nonmembers up to ``max_len``."""

    verifier: VerifierSpec
    max_len: int
    rows: tuple[ErrorRow, ...]
    detection: Fraction

    @property
    def strong(self) -> Fraction:
        """Largest strong error over the sweep."""
        return max((r.strong for r in self.rows), default=Fraction(0))

    @property
    def weak(self) -> Fraction:
        """Largest weak error over the sweep."""
        return max((r.weak for r in self.rows), default=Fraction(0))

    @property
    def weak_bound(self) -> Fraction:
        """(1-p)^C, the bound on false acceptance."""
        return (1 - self.detection) ** self.verifier.rounds

    @property
    def strong_bound(self) -> Fraction | None:
        """max((1-p)^C, w) for GB verifiers; None for the others."""
        if self.verifier.mode is not Mode.GB:
            return None
        return max(self.weak_bound, self.verifier.weight)

    @property
    def within_bounds(self) -> bool:
        """Whether the measured errors respect the bounds."""
        if self.weak > self.weak_bound:
            return False
        return self.strong_bound is None or self.strong <= self.strong_bound


def _error_row(args: tuple[VerifierSpec, tuple[str, ...], int, int]) -> ErrorRow | None:
    verifier, word, node_budget, product_budget = args
    if accepts(verifier.machine, word, node_budget).member:
        return None
    product = _explore_product(verifier, word, product_budget)
    keep = 1 - verifier.upfront_reject
    finite = product.accept_mass ** verifier.rounds
    return ErrorRow(word, keep * max(finite, product.loop_mass), keep * finite)


def strong_error(
    verifier: VerifierSpec,
    max_len: int,
    workers: int | None = None,
    node_budget: int | None = None,
    product_budget: int | None = None,
) -> ErrorReport:
    """Sweep every nonmember up to ``max_len`` against its best adversary.

    Args:
        verifier: The verifier under attack.
        max_len: Longest input word in the sweep.
        workers: Worker processes; defaults to ``config.SWEEP_WORKERS``.
        node_budget: Configuration cap for the membership checks.
        product_budget: Node cap for each adversary product graph.

    Returns:
        An ErrorReport with one row per nonmember.
    """
    workers = config.SWEEP_WORKERS if workers is None else workers
    # spawned workers see only the config file defaults
    node_budget = config.NODE_BUDGET if node_budget is None else node_budget
    product_budget = config.PRODUCT_BUDGET if product_budget is None else product_budget
    tasks = [
        (verifier, word, node_budget, product_budget)
        for word in words(verifier.machine.alphabet, max_len)
    ]
    if workers > 1:
        with multiprocessing.get_context("spawn").Pool(workers) as pool:
            rows = pool.map(_error_row, tasks)
    else:
        rows = [_error_row(task) for task in tasks]
    report = ErrorReport(
        verifier=verifier,
        max_len=max_len,
        rows=tuple(r for r in rows if r is not None),
        detection=head_distribution(verifier).minimum,
    )
    if not report.within_bounds:
        log.warning(f"{verifier.machine.name}: measured errors exceed the analytic bounds")
    return report


class Parameters(NamedTuple):
    """Rounds, risky weight and weight digits chosen for a target error."""

    rounds: int
    weight: Fraction
    bits: int


def choose_parameters(classification: HeadClassification, epsilon: Fraction | str) -> Parameters:
    """Pick GB parameters whose strong error is at most ``epsilon``.

    Args:
        classification: Safe and risky heads; at least one head must be safe
        epsilon: Dyadic target error in (0, 1/2)

    Returns:
        Parameters with w = epsilon (0 without risky heads) and the least C
        with (1-p)^C <= epsilon
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < Fraction(1, 2):
        raise VerifierError(f"target error {epsilon} must lie in (0, 1/2)")
    dyadic_bits(epsilon)
    if classification.k_safe == 0:
        raise VerifierError("GB verifiers need at least one safe head")
    weight = epsilon if classification.k_risky else Fraction(0)
    detection = selection_weights(classification, Mode.GB, weight).minimum
    rounds = 1
    while (1 - detection) ** rounds > epsilon:
        rounds += 1
    return Parameters(rounds, weight, dyadic_bits(weight))


# Text codecs

def format_certificate(cert: Certificate) -> str:
    """Render ``cert`` in the ``.cert`` text format."""
    lines = ["certificate", "prefix"]
    lines.extend(f"rec {r}" for r in cert.prefix)
    if cert.cycle:
        lines.append("cycle")
        lines.extend(f"rec {r}" for r in cert.cycle)
    return "\n".join(lines) + "\n"


def parse_certificate(text: str, heads: int | None = None) -> Certificate:
    """Parse the ``.cert`` text format.

    Args:
        text: File contents; ``#`` starts a comment
        heads: Expected head count, or None to take it from the first record

    Returns:
        The parsed Certificate

    Raises:
        ParseError: With the line number of the first malformed line
    """
    sections: dict[str, list[Record]] = {"prefix": [], "cycle": []}
    current = None
    started = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        key, args = tokens[0], tokens[1:]
        if not started:
            if key != "certificate" or args:
                raise ParseError("expected 'certificate' header", lineno)
            started = True
        elif key in sections and not args:
            if current == "cycle" or (current == key):
                raise ParseError(f"unexpected '{key}' section", lineno)
            current = key
        elif key == "rec":
            if current is None:
                raise ParseError("record outside a prefix or cycle section", lineno)
            if len(args) % 2 == 0 or len(args) < 3:
                raise ParseError("record needs k symbols, a state and k moves", lineno)
            k = len(args) // 2
            if heads is None:
                heads = k
            if k != heads:
                raise ParseError(f"record has {k} heads, expected {heads}", lineno)
            try:
                moves = tuple(Move.parse(m) for m in args[k + 1:])
            except ValueError as e:
                raise ParseError(str(e), lineno) from None
            sections[current].append(Record(tuple(args[:k]), args[k], moves))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if not started:
        raise ParseError("missing 'certificate' header")
    return Certificate(tuple(sections["prefix"]), tuple(sections["cycle"]))


def format_verifier(verifier: VerifierSpec) -> str:
    """The one-line ``verifier mode=... rounds=... w=a/2^B heads=...`` form."""
    w = verifier.weight * 2 ** verifier.weight_bits
    line = (
        f"verifier mode={verifier.mode.value} rounds={verifier.rounds} "
        f"w={w}/2^{verifier.weight_bits} heads={verifier.classification}"
    )
    if verifier.approximated:
        line += " approx=1"
    return line


def _parse_indices(text: str) -> tuple[int, ...]:
    return tuple(int(i) for i in text.split(",") if i)


def parse_classification(text: str) -> HeadClassification:
    """Parse ``safe:2;risky:1`` (either part may be empty or missing)."""
    parts = {}
    for part in text.split(";"):
        key, sep, value = part.partition(":")
        if not sep or key not in ("safe", "risky"):
            raise ValueError(f"malformed head list {text!r}")
        parts[key] = value
    return HeadClassification(_parse_indices(parts.get("safe", "")), _parse_indices(parts.get("risky", "")))


def parse_weight(text: str) -> Fraction:
    """Parse ``a/2^B``, ``a/b`` or a plain number."""
    numerator, _, denominator = text.partition("/")
    if denominator.startswith("2^"):
        return Fraction(int(numerator), 2 ** int(denominator[2:]))
    return Fraction(text)


def parse_verifier(line: str, machine: MultiHeadNFA) -> VerifierSpec:
    """Rebuild a verifier for ``machine`` from its one-line form.

    Raises:
        ParseError: If the line is malformed or names invalid parameters
    """
    tokens = line.split()
    if not tokens or tokens[0] != "verifier":
        raise ParseError("expected 'verifier' line", 1)
    fields = {}
    for token in tokens[1:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise ParseError(f"malformed field {token!r}", 1)
        fields[key] = value
    try:
        return build_verifier(
            machine,
            parse_classification(fields["heads"]),
            Mode(fields["mode"]),
            int(fields["rounds"]),
            parse_weight(fields.get("w", "0")),
            approximate=fields.get("approx") == "1",
        )
    except KeyError as e:
        raise ParseError(f"missing field {e.args[0]}", 1) from None
    except ValueError as e:
        raise ParseError(str(e), 1) from None
