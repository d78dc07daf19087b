"""Simulating a multi-head machine on a single-tape machine with small caches.

The work tape carries 2k+1 tracks between two ``#`` delimiters: per head a
binary position counter (least significant digit first) and a cache of ``W+2``
consecutive input cells with one marked cell, plus a track holding the middle
marker. A simulated step reads the marked cells, applies one transition and
moves the counters and marks. When a mark would step onto a delimiter the
cache is refilled around the head, which leaves the mark in the middle again.

Costs are counted in work-head motions of the simulating machine; input-head
motions made while the work head waits are counted as well.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from . import config
from .automata import (
    LEFT_END,
    RIGHT_END,
    Configuration,
    MultiHeadNFA,
    Status,
    accepts,
    apply_transition,
    replay,
    scanned,
    status_of,
)
from .errors import AuditFailure, BudgetExceeded, InvalidInput, InvalidPath

log = logging.getLogger(__name__)

PHASES = ("init", "read", "move", "recache")


def window_width(n: int, minimum: int | None = None) -> int:
    """Cache width W: at least ``log2(n+2)`` and ``minimum``, rounded up to even."""
    minimum = config.MIN_WINDOW if minimum is None else minimum
    width = max(minimum, math.ceil(math.log2(n + 2)))
    return width + width % 2


def _increment(bits: list[int]) -> int:
    j = 0
    while bits[j]:
        bits[j] = 0
        j += 1
    bits[j] = 1
    return j + 1


def _decrement(bits: list[int]) -> int:
    j = 0
    while not bits[j]:
        bits[j] = 1
        j += 1
    bits[j] = 0
    return j + 1


def _value(bits: Sequence[int]) -> int:
    return sum(bit << j for j, bit in enumerate(bits))


@dataclass
class TrackedTape:
    """The work tape. Content offset ``o`` lives in cell ``o + 1``."""

    heads: int
    width: int
    counters: list[list[int]]
    caches: list[list[str]]
    marks: list[list[bool]]
    middle: list[bool]

    @classmethod
    def blank(cls, heads: int, width: int) -> TrackedTape:
        """A tape with zeroed counters and unfilled caches for window ``width``."""
        cells = width + 2
        return cls(
            heads=heads,
            width=width,
            counters=[[0] * cells for _ in range(heads)],
            caches=[[RIGHT_END] * cells for _ in range(heads)],
            marks=[[False] * cells for _ in range(heads)],
            middle=[False] * cells,
        )

    @property
    def content_cells(self) -> int:
        """Cells between the two delimiters: the window plus one on each side."""
        return self.width + 2

    @property
    def cells(self) -> int:
        """Cells in use, delimiters included."""
        return self.content_cells + 2

    @property
    def right_delimiter(self) -> int:
        """Cell of the right ``#``."""
        return self.content_cells + 1

    def mark(self, head: int) -> int:
        """Cell of the marked symbol on cache track ``head`` (0-based)."""
        return self.marks[head].index(True)

    def counter(self, head: int) -> int:
        """Value of counter track ``head`` (0-based)."""
        return _value(self.counters[head])

    def marked_symbol(self, head: int) -> str:
        """The cached input symbol under the mark of ``head`` (0-based)."""
        return self.caches[head][self.mark(head)]


@dataclass
class SimStats:
    """Cost of one simulation: work-head motions by phase plus re-caches per head."""

    width: int
    cells: int
    simulated_steps: int = 0
    phases: Counter = field(default_factory=Counter)
    recaches: list[int] = field(default_factory=list)

    @property
    def steps(self) -> int:
        """Total work-head motions over all phases."""
        return sum(self.phases[p] for p in PHASES)


class TraceLine(NamedTuple):
    """One simulated step; ``recached`` lists the 1-based heads re-cached after it."""

    step: int
    state: str
    positions: tuple[int, ...]
    recached: tuple[int, ...]


@dataclass(frozen=True)
class Simulation:
    """Outcome, costs and choices of one tracked-tape run."""

    outcome: Status
    stats: SimStats
    choices: tuple[int, ...]
    final: Configuration
    trace: tuple[TraceLine, ...] | None = None


class _Simulator:
    def __init__(self, machine: MultiHeadNFA, word: Sequence[str], budget: int, keep_trace: bool):
        self.machine = machine
        self.tape_input = machine.tape(word)
        self.last = len(self.tape_input) - 1
        self.k = machine.heads
        width = window_width(len(word))
        self.work = TrackedTape.blank(self.k, width)
        self.stats = SimStats(width=width, cells=self.work.cells, recaches=[0] * self.k)
        self.budget = budget
        self.cursor = 0
        self.phase = "init"
        self.last_recache: list[int | None] = [None] * self.k
        self.trace: list[TraceLine] | None = [] if keep_trace else None

    # cost accounting

    def _tick(self, count: int = 1) -> None:
        self.stats.phases[self.phase] += count

    def _goto(self, cell: int) -> None:
        self._tick(abs(cell - self.cursor))
        self.cursor = cell

    def _symbol(self, position: int) -> str:
        if position < 0:
            return LEFT_END
        if position > self.last:
            return RIGHT_END
        return self.tape_input[position]

    # phases

    def initialise(self) -> None:
        """Zero the counters, fill the caches with the first W symbols and place the middle mark."""
        work = self.work
        cells = work.content_cells
        # one sweep writes delimiters, zero counters and the first W+2 input cells
        for offset in range(cells):
            for i in range(self.k):
                work.caches[i][offset] = self._symbol(offset)
        self._goto(work.right_delimiter)
        # work head and input head return together
        self._goto(0)
        self._goto(1)
        for i in range(self.k):
            work.marks[i][0] = True
        # converge two pebbles from both ends onto the middle cell
        left, right = 0, cells - 1
        while right - left > 1:
            self._goto(right + 1)
            right -= 1
            self._goto(left + 1)
            left += 1
        work.middle[left] = True
        self._goto(0)

    def read(self) -> tuple[str, ...]:
        """Sweep the tape once and collect the marked symbols."""
        self.phase = "read"
        self._goto(self.work.right_delimiter)
        self._goto(0)
        return tuple(self.work.marked_symbol(i) for i in range(self.k))

    def _adjust_counter(self, head: int, delta: int) -> None:
        bits = self.work.counters[head]
        extent = _increment(bits) if delta > 0 else _decrement(bits)
        self._goto(extent)
        self._goto(0)

    def move(self, positions: tuple[int, ...], moved: tuple[int, ...], step: int) -> tuple[int, ...]:
        """Move counters and marks from ``positions`` to ``moved``; returns re-cached heads."""
        work = self.work
        recached = []
        for i, (old, new) in enumerate(zip(positions, moved)):
            if old == new:
                continue
            self.phase = "move"
            self._adjust_counter(i, new - old)
            mark = work.mark(i)
            offset = mark + new - old
            if 0 <= offset < work.content_cells:
                self._goto(mark + 1)
                work.marks[i][mark] = False
                self._goto(offset + 1)
                work.marks[i][offset] = True
                self._goto(0)
            else:
                self._recache(i, new, step)
                recached.append(i + 1)
        return tuple(recached)

    def _recache(self, head: int, position: int, step: int) -> None:
        self.phase = "recache"
        work = self.work
        half = work.width // 2
        previous = self.last_recache[head]
        if previous is not None and step - previous < half:
            raise AuditFailure(
                f"head {head + 1} re-cached after {step - previous} steps, expected at least {half}"
            )
        self.last_recache[head] = step
        self.stats.recaches[head] += 1

        mark = work.mark(head)
        self._goto(mark + 1)
        work.marks[head][mark] = False
        # input head back to the left marker, then forward by counting down
        self._tick(position)
        bits = work.counters[head]
        for _ in range(position):
            self._goto(_decrement(bits))
            self._goto(0)
            self._tick()
        middle = work.middle.index(True)
        self._goto(middle + 1)
        self._goto(1)
        start = position - half
        for offset in range(work.content_cells):
            work.caches[head][offset] = self._symbol(start + offset)
        self._goto(work.content_cells)
        self._goto(middle + 1)
        work.marks[head][middle] = True
        # restore the counter while the input head walks back
        for _ in range(position):
            self._goto(_increment(bits))
            self._goto(0)
            self._tick()
        log.debug(f"step {step}: re-cached head {head + 1} around position {position}")

    def audit(self, positions: tuple[int, ...]) -> None:
        """Check the tape against the true head positions; raises AuditFailure."""
        work = self.work
        if work.middle.index(True) != work.width // 2 or sum(work.middle) != 1:
            raise AuditFailure("middle marker moved")
        for i, position in enumerate(positions):
            if sum(work.marks[i]) != 1:
                raise AuditFailure(f"cache {i + 1} has {sum(work.marks[i])} marked cells")
            if work.counter(i) != position or not 0 <= position <= self.last:
                raise AuditFailure(f"counter {i + 1} reads {work.counter(i)}, head is at {position}")
            if work.marked_symbol(i) != self.tape_input[position]:
                raise AuditFailure(f"cache {i + 1} marks {work.marked_symbol(i)!r} at position {position}")

    def run(self, path: Sequence[int]) -> Simulation:
        """Simulate until a halting state, a stuck configuration or the end of the path."""
        machine = self.machine
        self.initialise()
        c = machine.initial_configuration()
        self.audit(c.positions)
        choices = []
        pending = iter(path)
        while not machine.is_terminal(c.state):
            readings = self.read()
            ids = machine.index.get((c.state, readings), ())
            tid = next(pending, None)
            if tid is None:
                if not ids:
                    break
                tid = ids[0]
            elif tid not in ids:
                raise InvalidPath(f"choice {len(choices)}: transition {tid} does not apply at {c}")
            if self.stats.simulated_steps >= self.budget:
                raise BudgetExceeded("sim_steps", self.budget)
            choices.append(tid)
            nxt = apply_transition(machine.transitions[tid], c, self.last)
            self.stats.simulated_steps += 1
            recached = self.move(c.positions, nxt.positions, self.stats.simulated_steps)
            c = nxt
            self.audit(c.positions)
            if self.trace is not None:
                self.trace.append(TraceLine(self.stats.simulated_steps, c.state, c.positions, recached))
        if next(pending, None) is not None:
            raise InvalidPath(f"choices continue past the halting configuration {c}")
        limit = 2 * self.stats.simulated_steps // max(1, self.work.width // 2) + 1
        for i, count in enumerate(self.stats.recaches):
            if count > limit:
                raise AuditFailure(f"head {i + 1} re-cached {count} times, limit {limit}")
        return Simulation(
            outcome=status_of(machine, self.tape_input, c),
            stats=self.stats,
            choices=tuple(choices),
            final=c,
            trace=tuple(self.trace) if self.trace is not None else None,
        )


def simulate(
    machine: MultiHeadNFA,
    word: Sequence[str],
    path: Sequence[int] = (),
    budget: int | None = None,
    trace: bool = False,
) -> Simulation:
    """Run the tracked-tape simulation along ``path``.

    Once ``path`` is used up the first applicable transition is taken. The
    result is checked against a direct replay of the same choices.

    Args:
        machine: The machine to simulate
        word: Input word
        path: Transition ids resolving each nondeterministic choice
        budget: Step cap (defaults to config.SIM_STEP_BUDGET)
        trace: Keep one TraceLine per simulated step

    Returns:
        Simulation with the outcome, costs and the choices actually taken

    Raises:
        InvalidPath: If a choice does not apply
        BudgetExceeded: If the step cap is reached
    """
    budget = config.SIM_STEP_BUDGET if budget is None else budget
    result = _Simulator(machine, word, budget, trace).run(path)
    direct = replay(machine, word, result.choices)
    if direct.status is not result.outcome or direct.final != result.final:
        raise AuditFailure(f"simulation ended in {result.final}, direct replay in {direct.final}")
    stats = result.stats
    log.info(
        f"{machine.name} on {len(word)} symbols: {stats.simulated_steps} simulated steps, "
        f"{stats.steps} machine steps, re-caches {stats.recaches}"
    )
    return result


@dataclass(frozen=True)
class ExhaustiveResult:
    """Outcome of `simulate_exhaustive`; ``tried`` counts the maximal paths replayed."""

    member: bool
    accepting: Simulation | None
    tried: int


def simulate_exhaustive(machine: MultiHeadNFA, word: Sequence[str], budget: int | None = None) -> ExhaustiveResult:
    """Try maximal choice sequences (no configuration repeated) until one accepts."""
    if len(word) > config.EXHAUSTIVE_MAX_LEN:
        raise InvalidInput(f"exhaustive simulation is limited to {config.EXHAUSTIVE_MAX_LEN} symbols")
    tape = machine.tape(word)
    last = len(tape) - 1

    def options(c: Configuration):
        if machine.is_terminal(c.state):
            return iter(())
        return iter(machine.index.get((c.state, scanned(tape, c)), ()))

    def maximal():
        start = machine.initial_configuration()
        configs, tids = [start], []
        on_path = {start}
        pending, extended = [options(start)], [False]
        while pending:
            c = configs[-1]
            for tid in pending[-1]:
                nxt = apply_transition(machine.transitions[tid], c, last)
                if nxt in on_path:
                    continue
                extended[-1] = True
                configs.append(nxt)
                tids.append(tid)
                on_path.add(nxt)
                pending.append(options(nxt))
                extended.append(False)
                break
            else:
                if not extended[-1]:
                    yield tuple(tids)
                pending.pop()
                extended.pop()
                on_path.discard(configs.pop())
                if tids:
                    tids.pop()

    tried = 0
    for choices in maximal():
        tried += 1
        direct = replay(machine, word, choices)
        if direct.status is Status.ACCEPT:
            return ExhaustiveResult(True, simulate(machine, word, choices, budget), tried)
    return ExhaustiveResult(False, None, tried)


def render_trace(simulation: Simulation) -> str:
    """Render the trace one line per step as ``step t state q heads p1..pk recache i|-``.

    Returns:
        The rendered lines, or an empty string when no trace was kept
    """
    lines = []
    for line in simulation.trace or ():
        recached = ",".join(map(str, line.recached)) or "-"
        positions = " ".join(map(str, line.positions))
        lines.append(f"step {line.step} state {line.state} heads {positions} recache {recached}")
    return "\n".join(lines) + ("\n" if lines else "")


def balanced(alphabet: Sequence[str]) -> Callable[[int], tuple[str, ...]]:
    """Inputs ``a^(n/2) b^(n/2)`` over the first two symbols (``a^n`` when unary)."""
    first, second = (alphabet[0], alphabet[1]) if len(alphabet) > 1 else (alphabet[0], alphabet[0])

    def generate(n: int) -> tuple[str, ...]:
        return (first,) * (n - n // 2) + (second,) * (n // 2)

    return generate


class ScalingRow(NamedTuple):
    """Costs at one input length; ``ratio`` is steps * log2(n) / n^2."""

    n: int
    width: int
    simulated_steps: int
    steps: int
    recaches: int
    ratio: float


@dataclass(frozen=True)
class ScalingReport:
    """Scaling rows for one machine, in the order the lengths were given."""

    machine: str
    rows: tuple[ScalingRow, ...]

    @property
    def spread(self) -> float:
        """Largest over smallest normalised ratio (1.0 for fewer than two rows)."""
        ratios = [r.ratio for r in self.rows if r.ratio > 0]
        if len(ratios) < 2:
            return 1.0
        return max(ratios) / min(ratios)


def scaling_report(
    machine: MultiHeadNFA,
    lengths: Sequence[int],
    generate: Callable[[int], Sequence[str]] | None = None,
    budget: int | None = None,
) -> ScalingReport:
    """Measure simulation cost against input length.

    Args:
        machine: A linear-time machine
        lengths: Input lengths to run
        generate: Builds the input of length n (default `balanced`)
        budget: Step cap per simulation

    Returns:
        ScalingReport with one row per length
    """
    generate = generate or balanced(machine.alphabet)
    rows = []
    for n in lengths:
        word = tuple(generate(n))
        result = accepts(machine, word)
        if not result.member:
            log.warning(f"{machine.name} rejects the generated input of length {n}")
        sim = simulate(machine, word, result.choices, budget)
        ratio = sim.stats.steps * math.log2(n) / n**2 if n > 1 else 0.0
        rows.append(ScalingRow(n, sim.stats.width, sim.stats.simulated_steps, sim.stats.steps,
                               sum(sim.stats.recaches), ratio))
    return ScalingReport(machine.name, tuple(rows))
