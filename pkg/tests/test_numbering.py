import random

from subturing import codegen
from subturing import machine as M
from subturing import numbering as N
from subturing.machine import Budget, Instr, Program, run_dialogue
from subturing.partialfn import EMPTY, FiniteTable

B = Budget(100_000, 16, 10_000)


def test_bijection_exhaustive_small():
    seen = set()
    for nu in range(10_000):
        p = N.decode(nu)
        assert N.encode(p) == nu
        key = p.instructions
        assert key not in seen
        seen.add(key)


def test_bijection_random_large():
    rng = random.Random(13)
    for _ in range(40):
        nu = rng.randrange(10**4, 10**12)
        assert N.encode(N.decode(nu)) == nu
    for _ in range(20):
        nu = rng.randrange(10**12, 10**18)
        assert N.encode(N.decode(nu)) == nu


def test_decode_zero_is_empty_and_diverges():
    p = N.decode(0)
    assert len(p) == 0
    out = run_dialogue(p, EMPTY, 5, B)
    assert out.is_exhausted and out.divergence_certified


def test_encode_roundtrip_on_programs():
    rng = random.Random(5)
    for _ in range(150):
        n = rng.randrange(0, 12)
        ins = []
        for _ in range(n):
            op = rng.randrange(5)
            if op == 0:
                ins.append(Instr(M.DECJ, rng.randrange(30), rng.randrange(15)))
            elif op == 1:
                ins.append(Instr(M.HALT, rng.randrange(30)))
            elif op == 2:
                ins.append(Instr(M.INC, rng.randrange(30)))
            elif op == 3:
                ins.append(Instr(M.JMP, rng.randrange(15)))
            else:
                ins.append(Instr(M.NOP))
        p = Program(ins)
        assert N.decode(N.encode(p)) == p


def test_family_residues_and_chain():
    assert N.inflation_index(7) == 30
    assert N.decode(30) == codegen.inflation_program(7)
    assert N.encode(codegen.probe_program(11)) == 4 * 11 + 1
    # the general class shifts special programs one step along the NOP chain
    p0 = codegen.inflation_program(0)
    p1 = Program(list(p0.instructions) + [Instr(M.NOP)])
    p2 = Program(list(p0.instructions) + [Instr(M.NOP)] * 2)
    i1 = N.encode(p1)
    i2 = N.encode(p2)
    assert i1 % 4 == 0 and i2 % 4 == 0 and i1 != i2
    assert N.decode(i1) == p1
    assert N.decode(i2) == p2


def test_special_stream_values_out_of_desk_range():
    # the simulator decodes general indices directly; valid because no
    # special program has a small base code
    vals = [
        N.stream_value(N._family_program(tag, k))
        for tag in range(3)
        for k in range(0, 30, 5)
    ]
    assert min(vals) > 10**12


def test_inflation_behavior():
    f = FiniteTable({2: 9})
    p = N.decode(N.inflation_index(2))
    for x in (0, 5, 40):
        out = run_dialogue(p, f, x, B)
        assert out.is_halted and out.value == 9
    out = run_dialogue(N.decode(N.inflation_index(3)), f, 0, B)
    assert out.is_frozen and out.query == 3


def test_inflation_injective_small_range():
    programs = {N.decode(N.inflation_index(n)).instructions for n in range(101)}
    assert len(programs) == 101


def grid_behavior(p, oracle, points, budget=B):
    return [run_dialogue(p, oracle, n, budget).classification() for n in points]


def test_pad_examples():
    e = N.encode(codegen.echo_program())
    assert N.pad(e, 0) == e
    d = N.pad(e, e + 1)
    assert d > e
    assert len(N.decode(d)) >= len(N.decode(e))
    f = FiniteTable({0: 3, 4: 1})
    assert grid_behavior(N.decode(d), f, range(6)) == grid_behavior(
        N.decode(e), f, range(6)
    )


def test_pad_special_chain():
    e = N.inflation_index(4)
    d = N.pad(e, e + 1)
    assert d > e
    f = FiniteTable({4: 8})
    assert grid_behavior(N.decode(d), f, range(3)) == grid_behavior(
        N.decode(e), f, range(3)
    )


def test_enumerate_programs_matches_decode():
    gen = N.enumerate_programs()
    for expect in range(120):
        nu, p = next(gen)
        assert nu == expect
        assert p == N.decode(nu)


def test_apply_pca_examples():
    const_idx = N.encode(Program([Instr(M.INC, 20), Instr(M.HALT, 20)]))
    out = N.apply_pca(const_idx, 9, EMPTY, B)
    assert out.is_halted and out.value == 0
    echo_idx = N.encode(codegen.echo_program())
    out = N.apply_pca(echo_idx, 5, FiniteTable({5: 3}), B)
    assert out.is_halted and out.value == 3
    loop_idx = N.encode(codegen.self_loop_program())
    out = N.apply_pca(loop_idx, 0, EMPTY, B)
    assert out.is_exhausted and out.divergence_certified
