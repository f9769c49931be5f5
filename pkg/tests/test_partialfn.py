import json
import random

import pytest

from subturing import codegen as C
from subturing import numbering as N
from subturing.coding import pair
from subturing.machine import Budget, Program, Instr, HALT, run_dialogue
from subturing.partialfn import (
    DEFINED,
    EMPTY,
    UNDEFINED,
    UNKNOWN,
    DialogueOf,
    FiniteTable,
    GraphOf,
    Join,
    JumpOf,
    Meet,
    Restriction,
    TotalByProgram,
    canonical_witnesses,
    from_json,
    graph_encode,
    join,
    k0,
    k0_oracle,
    k_jump,
    k_oracle,
    meet,
    meet_point,
    meet_universality,
    program_for_table,
    restrict,
)
from subturing.search import ReductionWitness, VerificationFailure, verify_reduction

B = Budget(300_000, 16, 60_000)


def kinds(f, points, fuel=1000):
    return [f.eval(n, fuel).kind for n in points]


def test_restrict_examples():
    f = FiniteTable({1: 2, 3: 4})
    r = restrict(f, {3})
    assert r.eval(1, 10).kind == UNDEFINED
    assert r.eval(3, 10) == (DEFINED, 4)
    empty_r = restrict(f, set())
    assert kinds(empty_r, range(6)) == [UNDEFINED] * 6
    full = restrict(f, {1, 3})
    for n in range(6):
        assert full.eval(n, 10) == f.eval(n, 10)


def test_restrict_by_predicate_program():
    f = FiniteTable({n: n * n for n in range(8)})
    # predicate: 0 -> halt 0 (out), nonzero -> halt 1 (in)
    from subturing.asm import Asm

    a2 = Asm()
    nz = a2.new_label()
    a2.if_nonzero(2, nz)
    a2.inc(16)
    a2.halt(16)  # w=1: value 0
    a2.mark(nz)
    a2.build_const(17, 3, 18)
    a2.halt(17)  # w=3: value 1
    pred = a2.build()
    r = Restriction(f, N.encode(pred), predicate_fuel=1000)
    assert r.eval(0, 10).kind == UNDEFINED
    assert r.eval(3, 10) == (DEFINED, 9)


def test_join_examples():
    j = join(FiniteTable({0: 4}), FiniteTable({1: 7}))
    assert j.eval(0, 10) == (DEFINED, 4)
    assert j.eval(3, 10) == (DEFINED, 7)
    assert j.eval(1, 10).kind == UNDEFINED


def test_meet_examples():
    echo = N.encode(C.echo_program())
    f = FiniteTable({0: 1, 5: 2})
    m = meet(f, f, B)
    for n, v in f.table.items():
        assert m.eval(meet_point(echo, echo, n), 10) == (DEFINED, v)
    assert m.eval(meet_point(echo, echo, 3), 10).kind == UNDEFINED
    m2 = meet(FiniteTable({0: 1}), FiniteTable({0: 2}), B)
    assert m2.eval(meet_point(echo, echo, 0), 10).kind == UNDEFINED


def test_graph_examples():
    f = FiniteTable({3: 5})
    g = graph_encode(f)
    assert g.eval(pair(3, 5), 10) == (DEFINED, 1)
    assert g.eval(pair(3, 4), 10) == (DEFINED, 0)
    assert g.eval(pair(2, 0), 10).kind == UNDEFINED
    ge = graph_encode(EMPTY)
    assert kinds(ge, range(10)) == [UNDEFINED] * 10


def test_graph_witnesses_verify_both_directions():
    rng = random.Random(3)
    for _ in range(5):
        f = FiniteTable({n: rng.randrange(6) for n in rng.sample(range(12), 5)})
        gf = graph_encode(f)
        w = canonical_witnesses()
        fwd_dom = [pair(n, m) for n in f.domain() for m in range(7)]
        assert isinstance(
            verify_reduction(w["graph_fwd"], gf, f, fwd_dom, B), ReductionWitness
        )
        assert isinstance(
            verify_reduction(w["graph_bwd"], f, gf, range(12), B), ReductionWitness
        )


def test_join_witnesses_verify():
    f = FiniteTable({0: 4, 2: 8})
    g = FiniteTable({1: 7, 2: 0})
    j = join(f, g)
    w = canonical_witnesses()
    assert isinstance(verify_reduction(w["join_left"], f, j, range(4), B), ReductionWitness)
    assert isinstance(verify_reduction(w["join_right"], g, j, range(4), B), ReductionWitness)


def test_meet_lower_bound_witnesses():
    f = FiniteTable({0: 4, 3: 7, 5: 2})
    g = FiniteTable({0: 4, 3: 5, 5: 2, 6: 1})
    echo = N.encode(C.echo_program())
    m = meet(f, g, B)
    w = canonical_witnesses()
    points = [meet_point(echo, echo, n) for n in range(8)]
    assert isinstance(verify_reduction(w["meet_left"], m, f, points, B), ReductionWitness)
    assert isinstance(verify_reduction(w["meet_right"], m, g, points, B), ReductionWitness)


def test_meet_universality_and_discrepancy():
    d = 12  # [HALT r0]: the constant-0 reduction, needs 0 in dom
    f = FiniteTable({0: 0, 2: 5})
    g = FiniteTable({0: 0, 1: 1})
    h = FiniteTable({n: 0 for n in range(3)})
    m = meet(f, g, B)
    prog = meet_universality(d, d)
    big = Budget(2_000_000, 16, 500_000)
    assert isinstance(verify_reduction(prog, h, m, range(3), big), ReductionWitness)
    # a counterexample triple: h claims value 1 somewhere the meet gives 0
    h_bad = FiniteTable({0: 1})
    fail = verify_reduction(prog, h_bad, m, {0}, big)
    assert isinstance(fail, VerificationFailure)
    assert fail.kind == "refuted"
    assert fail.outcome.trace[0][0] == meet_point(d, d, 0)


def test_jump_examples():
    f = FiniteTable({5: 8, 9: 1})
    const_halt = N.encode(Program([Instr(HALT, 4)]))  # halts with n immediately
    assert k_jump(f, const_halt, B).kind == "One"
    assert k_jump(EMPTY, const_halt, B).kind == "One"
    q9 = N.encode(C.query_const_program(9))
    assert k_jump(f, q9, B).kind == "One"
    f2 = FiniteTable({5: 8})
    ans = k_jump(f2, q9, B)
    assert ans.kind == "UndefinedFrozen" and ans.query == 9
    loop = N.encode(C.self_loop_program())
    for oracle in (f, EMPTY):
        assert k_jump(oracle, loop, B).kind == "ZeroCertified"


def test_k0_collapses_frozen():
    f = FiniteTable({5: 8})
    q9 = N.encode(C.query_const_program(9))
    a_k = k_jump(f, q9, B)
    a_k0 = k0(f, q9, B)
    assert a_k.kind == a_k0.kind == "UndefinedFrozen"
    assert a_k.value() is None and a_k0.value() == 0
    assert k0_oracle(f, B).eval(q9, 10) == (DEFINED, 0)
    assert k_oracle(f, B).eval(q9, 10).kind == UNDEFINED


def test_jump_oracle_probe_pattern_is_graph():
    f = FiniteTable({2: 3, 4: 0})
    K = k_oracle(f, B)
    for n in (2, 4):
        for m in range(5):
            expect = 1 if f.table[n] == m else 0
            assert K.eval(N.probe_index(n, m), 10) == (DEFINED, expect)
    assert K.eval(N.probe_index(7, 0), 10).kind == UNDEFINED


def test_inflation_index_reduction_to_jump():
    rng = random.Random(9)
    f = FiniteTable({n: rng.randrange(8) for n in rng.sample(range(20), 6)})
    K = k_oracle(f, B)
    witness = C.value_via_jump_witness()
    w = verify_reduction(witness, f, K, range(20), Budget(2_000_000, 32, 10))
    assert isinstance(w, ReductionWitness)
    # per-point: the inflation index itself classifies One exactly on dom(f)
    for n in range(12):
        ans = k_jump(f, N.inflation_index(n), B)
        if n in f.table:
            assert ans.kind == "One"
        else:
            assert ans.kind == "UndefinedFrozen" and ans.query == n


def test_domain_reduction_to_k0():
    f = FiniteTable({1: 5, 6: 0})
    K0 = k0_oracle(f, B)
    witness = C.domain_via_jump_witness()
    chi = FiniteTable({n: (1 if n in f.table else 0) for n in range(10)})
    w = verify_reduction(witness, chi, K0, range(10), Budget(2_000_000, 16, 10))
    assert isinstance(w, ReductionWitness)


def test_k_agrees_with_k0_on_total_range():
    # oracle total on the queried range: certified rows classify identically
    f = FiniteTable({n: n % 3 for n in range(30)})
    idxs = [
        N.encode(Program([Instr(HALT, 4)])),
        N.encode(C.self_loop_program()),
        N.inflation_index(3),
        N.probe_index(4, 1),
        N.probe_index(4, 2),
    ]
    for e in idxs:
        a = k_jump(f, e, B)
        b = k0(f, e, B)
        assert a.stable() and b.stable()
        assert a.kind == b.kind
        assert a.value() == b.value()


def test_monotone_transfer_classifications():
    echo = N.encode(C.echo_program())
    h_r4 = N.encode(Program([Instr(HALT, 4)]))
    h_r3 = N.encode(Program([Instr(HALT, 3)]))
    loop = N.encode(C.self_loop_program())
    g = FiniteTable({5: 8, 36: 2})
    big = Budget(2_000_000, 16, 200_000)
    assert k_jump(g, N.monotone_transfer(echo, h_r4), big).kind == "One"
    assert k_jump(g, N.monotone_transfer(echo, echo), big).kind == "One"
    ans = k_jump(g, N.monotone_transfer(echo, h_r3), big)
    assert ans.kind == "UndefinedFrozen"
    assert k_jump(g, N.monotone_transfer(echo, loop), big, memo_cap=2048).kind == "ZeroCertified"
    # agreement with the nested lazy evaluation on a halting instance
    lazy = DialogueOf(echo, g, big)
    nested = run_dialogue(N.decode(echo), lazy, echo, big)
    composite = run_dialogue(N.decode(N.monotone_transfer(echo, echo)), g, 0, big)
    assert nested.classification() == composite.classification()


def test_total_by_program_certification():
    idx = N.encode(C.const_program(6))
    t = TotalByProgram.certify(idx, range(5), 10_000)
    assert t.eval(3, 10) == (DEFINED, 6)
    assert t.eval(9, 10).kind == UNKNOWN
    with pytest.raises(ValueError):
        TotalByProgram.certify(N.encode(C.self_loop_program()), [0], 1000)


def test_least_degree_extension():
    f = FiniteTable({2: 7, 5: 0})
    p = program_for_table(f)
    w = verify_reduction(p, f, EMPTY, range(8), B)
    assert isinstance(w, ReductionWitness)


def test_total_degree_scenario():
    # a finite f with decidable domain is equivalent to a total function:
    # h(n) = f(n)+1 on dom(f), 0 elsewhere; both directions witnessed
    f = FiniteTable({1: 4, 3: 0})
    h = FiniteTable({n: (f.table[n] + 1 if n in f.table else 0) for n in range(6)})
    assert isinstance(
        verify_reduction(program_for_table(h), h, f, range(6), B), ReductionWitness
    )
    # f <= h: query n; answer v > 0 -> output v - 1; v = 0 -> spin
    from subturing.asm import Asm

    a = Asm()
    t, tmp = 16, 17
    ask = a.new_label()
    spin = a.new_label()
    a.if_zero(0, ask)
    a.if_zero(5, spin)
    a.copy(5, t, tmp)
    a.decj(t, spin)
    a.dbl(t, tmp)
    a.inc(t)
    a.halt(t)  # value a0 - 1
    a.mark(spin)
    a.jmp(spin)
    a.mark(ask)
    a.halt(3)  # query n
    assert isinstance(
        verify_reduction(a.build(), f, h, range(6), B), ReductionWitness
    )


def test_oracle_json_roundtrips():
    echo = N.encode(C.echo_program())
    f = FiniteTable({0: 1, 9: 4})
    oracles = [
        f,
        restrict(f, {0}),
        join(f, EMPTY),
        meet(f, f, B),
        graph_encode(f),
        k_oracle(f, B),
        k0_oracle(f, B),
        DialogueOf(echo, f, B),
        TotalByProgram(echo, 500, {0: 1}),
    ]
    for o in oracles:
        blob = o.dumps()
        again = from_json(json.loads(blob))
        assert again == o
        assert again.dumps() == blob
