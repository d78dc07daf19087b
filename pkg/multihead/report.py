"""Text reports for every result type.

Reports are deterministic: no timestamps, fixed ordering, exact rationals
printed as ``a/b``. ``machine_readable`` switches to one ``key=value`` per line.
"""

from __future__ import annotations

import functools
from fractions import Fraction

from .automata import MultiHeadNFA, RunResult, format_machine
from .halting import SafetyReport
from .ips import (
    Attack,
    Certificate,
    ErrorReport,
    Outcome,
    OutcomeDistribution,
    Parameters,
    RoundOutcomeTable,
    Verdict,
    VerifierSpec,
    format_certificate,
    format_verifier,
    head_distribution,
)
from .ntmsim import PHASES, ScalingReport, Simulation


def rational(value: Fraction, approx: bool = False) -> str:
    """Exact ``a/b`` form, with a six-digit decimal when ``approx`` is set."""
    text = f"{value.numerator}/{value.denominator}"
    if approx:
        text += f" (~{float(value):.6f})"
    return text


def _pairs(pairs: list[tuple[str, object]]) -> str:
    return "".join(f"{key}={value}\n" for key, value in pairs)


def _table(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(cell) for cell in column) for column in zip(header, *rows)]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip() for row in (header, *rows)]
    return "\n".join(lines) + "\n"


def _word(word) -> str:
    return "".join(word) if all(len(s) == 1 for s in word) else " ".join(word)


@functools.singledispatch
def write_report(result, *, machine_readable: bool = False, approx: bool = False) -> str:
    """Render a result of any multihead operation.

    Args:
        result: The value returned by a library operation
        machine_readable: Emit ``key=value`` lines instead of prose
        approx: Add decimal approximations next to exact rationals

    Returns:
        The report text, ending in a newline unless empty
    """
    raise TypeError(f"no report for {type(result).__name__}")


@write_report.register
def _(result: RunResult, *, machine_readable: bool = False, approx: bool = False) -> str:
    verdict = result.verdict.value
    halting = "yes" if result.halting else "no"
    if machine_readable:
        pairs = [("verdict", verdict), ("halting", halting), ("explored", result.explored)]
        if result.path is not None:
            pairs.append(("choices", ",".join(map(str, result.choices))))
        return _pairs(pairs)
    lines = [verdict, f"always halts: {halting}", f"configurations explored: {result.explored}"]
    for step in result.path or ():
        lines.append(f"  {step.configuration} via transition {step.transition}")
    if result.loop_witness is not None:
        lines.append("loop: " + " -> ".join(map(str, result.loop_witness.cycle)))
    return "\n".join(lines) + "\n"


@write_report.register
def _(result: SafetyReport, *, machine_readable: bool = False, approx: bool = False) -> str:
    if not machine_readable:
        return "".join(f"head {h.head}: {'safe' if h.safe else 'risky'}\n" for h in result.heads)
    pairs = []
    for h in result.heads:
        pairs.append((f"head{h.head}", "safe" if h.safe else "risky"))
        if h.witness is not None:
            pairs.append((f"head{h.head}.loops_on", _word(h.witness)))
    return _pairs(pairs)


@write_report.register
def _(result: MultiHeadNFA, *, machine_readable: bool = False, approx: bool = False) -> str:
    return format_machine(result)


@write_report.register
def _(result: VerifierSpec, *, machine_readable: bool = False, approx: bool = False) -> str:
    dist = head_distribution(result)
    pairs = [
        ("verifier", format_verifier(result)),
        ("coins_per_round", result.coins_per_round),
        ("upfront_coins", result.upfront_coins),
        ("coin_budget", result.coin_budget),
    ]
    pairs.extend((f"head{i}", rational(p, approx)) for i, p in enumerate(dist.weights, start=1))
    pairs.append(("p", rational(dist.minimum, approx)))
    if machine_readable:
        return _pairs(pairs)
    lines = [format_verifier(result)]
    lines.append(f"coins: {result.coins_per_round} per round, {result.upfront_coins} up front, "
                 f"{result.coin_budget} at most")
    lines.extend(f"head {i}: {rational(p, approx)}" for i, p in enumerate(dist.weights, start=1))
    lines.append(f"p = {rational(dist.minimum, approx)}")
    return "\n".join(lines) + "\n"


@write_report.register
def _(result: Outcome, *, machine_readable: bool = False, approx: bool = False) -> str:
    if machine_readable:
        pairs = [("outcome", result.verdict.value), ("coins_used", result.coins_used)]
        pairs.extend((key, getattr(result, key)) for key in ("round", "head", "position")
                     if getattr(result, key) is not None)
        return _pairs(pairs)
    if result.verdict is Verdict.ACCEPT:
        text = f"accept after {result.round} rounds"
    elif result.verdict is Verdict.REJECT and result.round == 0:
        text = "reject up front"
    elif result.verdict is Verdict.REJECT:
        text = f"reject at record {result.position} (round {result.round}, head {result.head})"
    else:
        text = f"loop in round {result.round} (head {result.head}, from record {result.position})"
    return f"{text}\ncoins used: {result.coins_used}\n"


@write_report.register
def _(result: OutcomeDistribution, *, machine_readable: bool = False, approx: bool = False) -> str:
    pairs = [
        ("accept", rational(result.accept, approx)),
        ("reject", rational(result.reject, approx)),
        ("loop", rational(result.loop, approx)),
    ]
    if machine_readable:
        return _pairs(pairs)
    return " ".join(f"{key}={value}" for key, value in pairs) + "\n"


@write_report.register
def _(result: RoundOutcomeTable, *, machine_readable: bool = False, approx: bool = False) -> str:
    def cell(run) -> str:
        return run.verdict.value if run.position is None else f"{run.verdict.value}@{run.position}"

    if machine_readable:
        return _pairs([
            (f"round{j}.head{i}", cell(run))
            for j, row in enumerate(result.rows, start=1)
            for i, run in enumerate(row, start=1)
        ])
    heads = len(result.rows[0]) if result.rows else 0
    header = ("round", "records", *(f"head {i}" for i in range(1, heads + 1)))
    rows = [
        (str(j), f"{seg.start}..{'' if seg.end is None else seg.end}", *map(cell, row))
        for j, (seg, row) in enumerate(zip(result.segments, result.rows), start=1)
    ]
    return _table(header, rows)


@write_report.register
def _(result: Certificate, *, machine_readable: bool = False, approx: bool = False) -> str:
    return format_certificate(result)


@write_report.register
def _(result: Attack, *, machine_readable: bool = False, approx: bool = False) -> str:
    distribution = write_report(result.distribution, machine_readable=machine_readable, approx=approx)
    return distribution + format_certificate(result.certificate)


@write_report.register
def _(result: ErrorReport, *, machine_readable: bool = False, approx: bool = False) -> str:
    strong_bound = result.strong_bound
    pairs = [
        ("strong_error", rational(result.strong, approx)),
        ("weak_error", rational(result.weak, approx)),
        ("weak_bound", rational(result.weak_bound, approx)),
        ("strong_bound", "-" if strong_bound is None else rational(strong_bound, approx)),
        ("within_bounds", "yes" if result.within_bounds else "no"),
        ("nonmembers", len(result.rows)),
    ]
    if machine_readable:
        return _pairs(pairs)
    rows = [(_word(r.word) or "(empty)", rational(r.strong, approx), rational(r.weak, approx))
            for r in result.rows]
    table = _table(("input", "strong", "weak"), rows)
    return table + "".join(f"{key} = {value}\n" for key, value in pairs)


@write_report.register
def _(result: Parameters, *, machine_readable: bool = False, approx: bool = False) -> str:
    pairs = [("rounds", result.rounds), ("w", rational(result.weight, approx)), ("B", result.bits)]
    if machine_readable:
        return _pairs(pairs)
    return " ".join(f"{key}={value}" for key, value in pairs) + "\n"


@write_report.register
def _(result: Simulation, *, machine_readable: bool = False, approx: bool = False) -> str:
    stats = result.stats
    pairs = [
        ("outcome", result.outcome.value),
        ("simulated_steps", stats.simulated_steps),
        ("steps", stats.steps),
        *((f"steps.{phase}", stats.phases[phase]) for phase in PHASES),
        ("recaches", ",".join(map(str, stats.recaches))),
        ("window", stats.width),
        ("cells", stats.cells),
    ]
    if machine_readable:
        return _pairs(pairs)
    return "".join(f"{key}: {value}\n" for key, value in pairs)


@write_report.register
def _(result: ScalingReport, *, machine_readable: bool = False, approx: bool = False) -> str:
    if machine_readable:
        return _pairs([
            (f"n{r.n}", f"steps={r.steps},simulated={r.simulated_steps},recaches={r.recaches},ratio={r.ratio:.6f}")
            for r in result.rows
        ])
    rows = [(str(r.n), str(r.width), str(r.simulated_steps), str(r.steps), str(r.recaches), f"{r.ratio:.6f}")
            for r in result.rows]
    return _table(("n", "W", "simulated", "steps", "recaches", "steps*log2(n)/n^2"), rows)
