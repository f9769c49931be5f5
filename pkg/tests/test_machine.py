import random

import pytest

from subturing import machine as M
from subturing.machine import (
    Budget,
    CertifiedDivergent,
    DialogueOutcome,
    HaltPair,
    Instr,
    Program,
    certify_divergence,
    format_program,
    parse_program,
    run_dialogue,
    step_functional,
)
from subturing.partialfn import FiniteTable

import naive

B = Budget(step_fuel=4000, round_cap=16, oracle_fuel=200)


def via_naive(p: Program):
    return naive.parse_text(format_program(p))


def test_constant_halt_pair():
    # halt with <1,7> = 15: build 15 then halt
    p = parse_program("\n".join(["INC r20"] * 15 + ["HALT r20"]))
    res = step_functional(p, 0, (), 100)
    assert res == HaltPair(1, 7)
    res = step_functional(p, 9, (1, 2), 100)
    assert res == HaltPair(1, 7)


def test_self_loop_certified():
    p = Program([Instr(M.JMP, 0)])
    assert isinstance(step_functional(p, 0, (), 10), CertifiedDivergent)
    assert certify_divergence(p, 0, (), 100) == "CertifiedDivergent"


def test_empty_program_diverges():
    p = Program([])
    assert isinstance(step_functional(p, 3, (), 10), CertifiedDivergent)


def test_counting_up_unknown():
    p = parse_program("INC r0\nJMP 0")
    assert certify_divergence(p, 0, (), 100) == "Unknown"


def test_query_or_echo_convention():
    # the one-instruction form: r1 holds <0,n> before any answer, <1,a0> after
    p = parse_program("HALT r1")
    assert step_functional(p, 5, (), 100) == HaltPair(0, 5)
    assert step_functional(p, 5, (3,), 100) == HaltPair(1, 3)


def test_query_or_echo_hand_compiled():
    # the same behaviour built from scratch: emit <0,n> = 2n if no answers,
    # else <1,a0> = 2*a0+1
    prog = parse_program(
        "\n".join(
            [
                "DECJ r0 7",  # s=0 -> query branch at 7
                "DECJ r10 5",  # double a0 into r20
                "INC r20",
                "INC r20",
                "JMP 1",
                "INC r20",  # +1: halt value <1, a0>
                "HALT r20",
                "DECJ r2 11",  # query branch: double n into r21
                "INC r21",
                "INC r21",
                "JMP 7",
                "HALT r21",
            ]
        )
    )
    assert step_functional(prog, 5, (), 500) == HaltPair(0, 5)
    assert step_functional(prog, 5, (4,), 500) == HaltPair(1, 4)


def test_dialogue_trivial_constant():
    p = parse_program("\n".join(["INC r20"] * 15 + ["HALT r20"]))
    out = run_dialogue(p, FiniteTable({}), 0, B)
    assert out.outcome == "halted" and out.value == 7 and out.trace == ()


def test_dialogue_query_then_echo():
    p = parse_program("HALT r1")
    out = run_dialogue(p, FiniteTable({5: 3}), 5, B)
    assert (out.outcome, out.value, out.trace) == ("halted", 3, ((5, 3),))
    out = run_dialogue(p, FiniteTable({4: 9}), 5, B)
    assert (out.outcome, out.query, out.trace) == ("frozen", 5, ())


def test_dialogue_round_cap():
    # always re-queries the same point: infinitely many queries
    p = parse_program("HALT r3")  # w = 2n every round
    out = run_dialogue(p, FiniteTable({4: 0}), 4, Budget(10**6, 8, 10))
    assert out.outcome == "exhausted" and out.reason == "round cap"
    assert len(out.trace) == 8


def test_dialogue_divergence_certified_flag():
    p = Program([Instr(M.JMP, 0)])
    out = run_dialogue(p, FiniteTable({}), 0, B)
    assert out.outcome == "exhausted" and out.divergence_certified


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(0, 1, 1)


def test_outcome_json_roundtrip():
    p = parse_program("HALT r1")
    out = run_dialogue(p, FiniteTable({5: 3}), 5, B)
    again = DialogueOutcome.from_json(out.to_json())
    assert again == out


def test_text_format_roundtrip():
    text = "INC r3\nDECJ r0 4\nJMP 2\nHALT r1\nNOP\n"
    assert format_program(parse_program(text)) == text
    with pytest.raises(ValueError):
        parse_program("FLY r1")


def random_program(rng, max_len=20):
    n = rng.randrange(1, max_len + 1)
    out = []
    for _ in range(n):
        op = rng.randrange(5)
        if op == 0:
            out.append(Instr(M.DECJ, rng.randrange(14), rng.randrange(n + 2)))
        elif op == 1:
            out.append(Instr(M.HALT, rng.randrange(14)))
        elif op == 2:
            out.append(Instr(M.INC, rng.randrange(14)))
        elif op == 3:
            out.append(Instr(M.JMP, rng.randrange(n + 2)))
        else:
            out.append(Instr(M.NOP))
    return Program(out)


def test_agrees_with_naive_on_random_programs():
    rng = random.Random(20260809)
    oracle = {0: 3, 1: 0, 5: 5, 6: 1}
    table = FiniteTable(oracle)
    for _ in range(400):
        p = random_program(rng)
        n = rng.randrange(8)
        mine = run_dialogue(p, table, n, Budget(300, 8, 100))
        ref, ref_trace = naive.run_dialogue(
            via_naive(p), oracle, n, step_fuel=300, round_cap=8
        )
        assert mine.classification()[:2] == ref[:2] or (
            mine.outcome == "exhausted"
            and ref[0] == "exhausted"
            and (mine.reason, mine.divergence_certified) == (ref[1], ref[2])
        ), (p.text, n, mine, ref)
        assert tuple(ref_trace) == mine.trace


def test_determinism_and_budget_monotonicity_random():
    rng = random.Random(7)
    oracle = FiniteTable({0: 3, 2: 2, 5: 5, 6: 1})
    for _ in range(200):
        p = random_program(rng)
        n = rng.randrange(8)
        small = Budget(120, 4, 50)
        big = Budget(2400, 12, 500)
        o1 = run_dialogue(p, oracle, n, small)
        o2 = run_dialogue(p, oracle, n, small)
        assert o1 == o2
        o3 = run_dialogue(p, oracle, n, big)
        if o1.outcome in ("halted", "frozen"):
            assert o3.classification() == o1.classification()
            assert o3.trace == o1.trace
