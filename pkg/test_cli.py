"""End-to-end tests of the command-line interface."""

from fractions import Fraction

import pytest

from multihead import config
from multihead.automata import parse_machine
from multihead.cli import run_command
from multihead.ips import OutcomeDistribution
from multihead.report import rational, write_report

LIE = """\
certificate
prefix
rec ^ ^ q1 R R
rec 0 0 q1 S R
rec 0 0 q1 S R
rec $ $ qacc S S
rec ^ ^ q1 R R
rec 0 0 q1 S R
rec 0 0 q1 S R
rec $ $ qacc S S
"""


@pytest.fixture
def machine(fixtures_dir):
    return str(fixtures_dir / "anbn.mhfa")


@pytest.fixture
def lie(tmp_path):
    path = tmp_path / "lie.cert"
    path.write_text(LIE)
    return str(path)


def run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_member(capsys, machine):
    code, out, _ = run(capsys, "run", machine, "--input", "0011", "--steps")
    assert code == 0
    assert out.splitlines()[0] == "member"
    assert out.endswith("max_run_steps=6\n")


def test_run_machine_readable(capsys, machine):
    code, out, _ = run(capsys, "--machine-readable", "run", machine, "--input", "001")
    assert code == 0
    assert out.splitlines()[0] == "verdict=nonmember"
    assert "halting=yes" in out


def test_run_reports_infinite_steps(capsys, fixtures_dir):
    code, out, _ = run(capsys, "run", str(fixtures_dir / "anbn_1.mhfa"), "--input", "0", "--steps")
    assert code == 0
    assert "always halts: no" in out
    assert out.endswith("max_run_steps=inf\n")


def test_analyze(capsys, machine):
    code, out, _ = run(capsys, "analyze", machine)
    assert code == 0
    assert out == "head 1: risky\nhead 2: safe\n"


def test_analyze_bounded(capsys, machine):
    code, out, _ = run(capsys, "--machine-readable", "analyze", machine, "--method", "bounded", "--max-len", "3")
    assert code == 0
    assert out == "head1=risky\nhead1.loops_on=0\nhead2=safe\n"


def test_project(capsys, machine, fixtures_dir, tmp_path):
    target = tmp_path / "head1.mhfa"
    code, _, _ = run(capsys, "project", machine, "--head", "1", "-o", str(target))
    assert code == 0
    expected = parse_machine((fixtures_dir / "anbn_1.mhfa").read_text())
    assert parse_machine(target.read_text()) == expected


def test_transform_timer(capsys, fixtures_dir):
    code, out, _ = run(capsys, "transform", "timer", str(fixtures_dir / "stay_loop.mhfa"), "--slope", "1")
    assert code == 0
    timed = parse_machine(out)
    assert timed.name == "stay_loop_timer1"
    assert timed.heads == 2


def test_transform_counters_canonical(capsys, fixtures_dir):
    code, out, _ = run(capsys, "transform", "counters", str(fixtures_dir / "anbn_1.mhfa"), "--canonical")
    assert code == 0
    counted = parse_machine(out)
    assert list(counted.transitions) == sorted(counted.transitions)


def test_verifier_build(capsys, machine):
    code, out, _ = run(capsys, "verifier", "build", "--machine", machine, "--rounds", "2", "--w", "1/4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "verifier mode=GB rounds=2 w=1/2^2 heads=safe:2;risky:1"
    assert "head 1: 1/4" in lines
    assert "p = 1/4" in lines


def test_verifier_distribution(capsys, machine, lie):
    code, out, _ = run(
        capsys, "verifier", "distribution", "--machine", machine, "--rounds", "2", "--w", "1/4",
        "--heads", "safe:2;risky:1", "--input", "00", "--cert", lie,
    )
    assert code == 0
    assert out == "accept=9/16 reject=7/16 loop=0/1\n"


def test_verifier_distribution_enumerated(capsys, machine, lie):
    code, out, _ = run(
        capsys, "verifier", "distribution", "--machine", machine, "--rounds", "2", "--w", "1/4",
        "--input", "00", "--cert", lie, "--enumerate",
    )
    assert code == 0
    assert out == "accept=9/16 reject=7/16 loop=0/1\n"


def test_verifier_table(capsys, machine, lie):
    code, out, _ = run(
        capsys, "--machine-readable", "verifier", "distribution", "--machine", machine, "--rounds", "2",
        "--w", "1/4", "--input", "00", "--cert", lie, "--table",
    )
    assert code == 0
    assert "round1.head1=reject@3" in out
    assert "round2.head2=pass@7" in out
    assert out.endswith("accept=9/16\nreject=7/16\nloop=0/1\n")


def test_verifier_run(capsys, machine, lie):
    code, out, _ = run(
        capsys, "verifier", "run", "--machine", machine, "--rounds", "2", "--w", "1/4",
        "--input", "00", "--cert", lie, "--coins", "000",
    )
    assert code == 0
    assert out == "reject at record 3 (round 1, head 1)\ncoins used: 3\n"


def test_verifier_run_short_coins(capsys, machine, lie):
    code, _, err = run(
        capsys, "verifier", "run", "--machine", machine, "--rounds", "2", "--w", "1/4",
        "--input", "00", "--cert", lie, "--coins", "1",
    )
    assert code == 1
    assert "coins" in err


def test_verifier_needs_certificate(capsys, machine):
    code, _, err = run(capsys, "verifier", "run", "--machine", machine, "--w", "1/4", "--input", "00")
    assert code == 1
    assert "--cert" in err


def test_prove_then_check(capsys, machine, tmp_path):
    code, out, _ = run(capsys, "prove", machine, "--input", "0011", "--rounds", "2")
    assert code == 0
    assert out.count("rec ") == 12
    cert = tmp_path / "honest.cert"
    cert.write_text(out)
    code, out, _ = run(
        capsys, "verifier", "distribution", "--machine", machine, "--rounds", "2", "--w", "1/4",
        "--input", "0011", "--cert", str(cert),
    )
    assert out == "accept=1/1 reject=0/1 loop=0/1\n"


def test_prove_nonmember(capsys, machine):
    code, _, err = run(capsys, "prove", machine, "--input", "001")
    assert code == 1
    assert "not accepted" in err


def test_attack(capsys, machine):
    code, out, _ = run(capsys, "attack", "--machine", machine, "--rounds", "5", "--w", "1/4", "--input", "00")
    assert code == 0
    assert out.splitlines()[0] == "accept=0/1 reject=3/4 loop=1/4"
    assert "cycle" in out


def test_error(capsys, machine):
    code, out, _ = run(capsys, "error", "--machine", machine, "--rounds", "5", "--w", "1/4", "--maxlen", "4")
    assert code == 0
    assert "strong_error = 1/4\n" in out
    assert "within_bounds = yes\n" in out


def test_params(capsys, machine):
    code, out, _ = run(capsys, "params", "--epsilon", "1/4", "--machine", machine)
    assert code == 0
    assert out == "rounds=5 w=1/4 B=2\n"
    code, out, _ = run(capsys, "params", "--epsilon", "1/8", "--heads", "safe:2;risky:1")
    assert out == "rounds=16 w=1/8 B=3\n"


def test_params_needs_heads(capsys):
    code, _, err = run(capsys, "params", "--epsilon", "1/4")
    assert code == 1
    assert "--heads" in err


def test_ntmsim_run(capsys, machine):
    code, out, _ = run(capsys, "--machine-readable", "ntmsim", "run", machine, "--input", "0011", "--trace")
    assert code == 0
    assert "outcome=accept\n" in out
    assert "recaches=0,0\n" in out
    assert out.endswith("recache -\n")


def test_ntmsim_exhaustive_nonmember(capsys, machine):
    code, out, _ = run(capsys, "ntmsim", "run", machine, "--input", "001", "--exhaustive")
    assert code == 0
    assert out.startswith("nonmember after ")


def test_ntmsim_scaling(capsys, machine):
    code, out, _ = run(capsys, "ntmsim", "scaling", machine, "--lengths", "8,16")
    assert code == 0
    assert len(out.splitlines()) == 3


def test_config_show(capsys):
    code, out, _ = run(capsys, "config", "show")
    assert code == 0
    assert f"node_budget={config.NODE_BUDGET}\n" in out


# Failures

def test_budget_exit_code(capsys, machine):
    code, _, err = run(capsys, "--node-budget", "2", "run", machine, "--input", "0011")
    assert code == 2
    assert "nodes budget of 2 exceeded" in err
    assert config.NODE_BUDGET != 2


def test_budget_reaches_sweep_workers(capsys, machine):
    code, _, err = run(
        capsys, "--node-budget", "2", "error", "--machine", machine, "--heads", "safe:2;risky:1",
        "--rounds", "2", "--w", "1/4", "--maxlen", "2", "--workers", "2",
    )
    assert code == 2
    assert "nodes budget of 2 exceeded" in err


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "run", str(tmp_path / "missing.mhfa"))
    assert code == 1


def test_parse_error_names_file_and_line(capsys, tmp_path):
    bad = tmp_path / "bad.mhfa"
    bad.write_text("automaton bad\nheads 1\nalphabet 0\nstates q0 qa qr\ninitial q0\naccept qa\nreject qr\n"
                   "trans q0 ^ -> qa S S\n")
    code, _, err = run(capsys, "run", str(bad))
    assert code == 1
    assert "bad.mhfa" in err
    assert "line 8" in err


def test_bad_input_symbol(capsys, machine):
    code, _, err = run(capsys, "run", machine, "--input", "012")
    assert code == 1
    assert "'2'" in err


def test_unknown_command(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 1
    assert "error:" in err


def test_output_is_deterministic(capsys, machine):
    argv = ("--machine-readable", "analyze", machine)
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


# Reports

def test_rational_formatting():
    assert rational(Fraction(9, 16)) == "9/16"
    assert rational(Fraction(0)) == "0/1"
    assert rational(Fraction(1, 4), approx=True) == "1/4 (~0.250000)"


def test_distribution_report():
    dist = OutcomeDistribution(Fraction(9, 16), Fraction(7, 16), Fraction(0))
    assert write_report(dist) == "accept=9/16 reject=7/16 loop=0/1\n"
    assert write_report(dist, machine_readable=True) == "accept=9/16\nreject=7/16\nloop=0/1\n"


def test_report_unknown_type():
    with pytest.raises(TypeError):
        write_report(object())
