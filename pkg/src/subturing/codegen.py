"""Generators for the machine programs the workbench hands out as witnesses.

Three layers:

* small canonical witnesses (echo, constants, join projections, graph
  codecs, finite-table programs, jump-index bodies);
* the replay harness: inlines a program p and drives its dialogue over a
  *virtual* oracle realized as generated code — used for composition
  (virtual oracle = a second dialogue q over the real oracle), for the
  query-hardcoding step of the anti-cupping mechanism (virtual oracle =
  baked finite table on one side of a join), and for the nested-
  simulation jump-transfer indices (same as composition with the input
  pinned to a constant);
* a bounded universal dialogue simulator that decodes a general-class
  program index found in its input and replays that program's dialogue
  query-for-query (the meet lower-bound witnesses).

Caps are static because a register machine cannot address registers
dynamically: the harness supports ANSWER_CAP dialogue answers, the
simulator SIM_INSTR_CAP instructions and SIM_REG_CAP registers.  Beyond
a cap the generated code jumps into a self-loop: honest divergence,
never a wrong value.
"""

from __future__ import annotations

from .coding import pair, unpair
from .machine import DECJ, HALT, INC, JMP, NOP, Instr, Program
from .asm import Asm

ANSWER_CAP = 16
SIM_INSTR_CAP = 24
SIM_REG_CAP = 16

# Dialogue answers are preloaded at r10+i, so any program that can emit an
# unbounded query stream keeps its private registers above the region the
# default budgets can ever fill (round_cap <= 64).
MAX_DIALOGUE_ANSWERS = 64
SAFE_BASE = 10 + MAX_DIALOGUE_ANSWERS


# ---------------------------------------------------------------------------
# small canonical witnesses

def echo_program() -> Program:
    """Identity reduction: query the input, halt with the answer."""
    return Program([Instr(HALT, 1)])


def const_program(v: int) -> Program:
    """Halt with v on every input, no queries."""
    a = Asm()
    t, tmp = 16, 17
    a.build_const(t, 2 * v + 1, tmp)
    a.halt(t)
    return a.build()


def self_loop_program() -> Program:
    return Program([Instr(JMP, 0)])


def query_const_program(q: int) -> Program:
    """Query the constant q, halt with the answer."""
    a = Asm()
    t, tmp = 16, 17
    skip = a.new_label()
    a.if_zero(0, skip)
    a.halt(1)  # an answer exists: return it
    a.mark(skip)
    a.build_const(t, 2 * q, tmp)
    a.halt(t)
    return a.build()


def join_left_witness() -> Program:
    """f <= f (+) g: on input n query 2n, halt with the answer."""
    a = Asm()
    tmp = 16
    skip = a.new_label()
    a.if_zero(0, skip)
    a.halt(1)
    a.mark(skip)
    a.dbl(3, tmp)  # r3 = 2n -> 4n, the encoded query for point 2n
    a.halt(3)
    return a.build()


def join_right_witness() -> Program:
    """g <= f (+) g: on input n query 2n+1, halt with the answer."""
    a = Asm()
    tmp = 16
    skip = a.new_label()
    a.if_zero(0, skip)
    a.halt(1)
    a.mark(skip)
    a.dbl(4, tmp)  # r4 = 2n+1 -> 4n+2
    a.halt(4)
    return a.build()


def graph_forward_witness() -> Program:
    """G_f <= f: input pair(n, m); query n, answer 1 iff f(n) = m else 0."""
    a = Asm()
    tmp, t = 16, 17
    dead = None
    round0 = a.new_label()
    eq = a.new_label()
    neq = a.new_label()
    a.if_zero(0, round0)
    # an answer a = f(n) exists in r5; compare with m = r7
    a.compare_eq(5, 7, eq, neq)
    a.mark(eq)
    a.build_const(t, 3, tmp)  # <1,1>: halt with value 1
    a.halt(t)
    a.mark(neq)
    a.inc(t)  # <1,0>: halt with value 0
    a.halt(t)
    a.mark(round0)
    a.dbl(6, tmp)  # query pi1(input) = n
    a.halt(6)
    return a.build()


def graph_backward_witness(scan_cap: int = ANSWER_CAP) -> Program:
    """f <= G_f: on input n query pair(n,0), pair(n,1), ... until answer 1."""
    a = Asm()
    b = SAFE_BASE
    tmp, t2, x, y, p, cnt = b, b + 1, b + 2, b + 3, b + 4, b + 5
    found = [a.new_label(f"hit{t}") for t in range(scan_cap)]
    ask = a.new_label("ask")
    a.copy(0, cnt, tmp)
    # scan answers a_0 .. a_{s-1} (all 0/1) for a 1; halt with its position
    for t in range(scan_cap):
        a.decj(cnt, ask)  # cnt == 0: fewer than t+1 answers, ask the next point
        a.if_nonzero(10 + t, found[t])
    a.jmp(ask)
    for t in range(scan_cap):
        a.mark(found[t])
        a.build_const(x, 2 * t + 1, tmp)  # halt with value t
        a.halt(x)
    a.mark(ask)
    a.copy(2, x, tmp)
    a.copy(0, y, tmp)
    a.pair_into(x, y, p, tmp, t2)
    a.dbl(p, tmp)
    a.halt(p)
    return a.build()


def finite_table_program(table: dict[int, int]) -> Program:
    """Compute the finite function `table` with no oracle; diverge off-domain."""
    a = Asm()
    t, tmp = 16, 17
    dead = a.new_label("dead")
    for k in sorted(table):
        hit = a.new_label()
        miss = a.new_label()
        a.zero(t)
        a.copy(2, t, tmp)
        a.equal_const(t, k, hit, miss)
        a.mark(hit)
        a.zero(t)
        a.build_const(t, 2 * table[k] + 1, tmp)
        a.halt(t)
        a.mark(miss)
    a.mark(dead)
    a.jmp(dead)
    return a.build()


def meet_universality_program(d: int, e: int) -> Program:
    """h <= meet(f, g) given h <= f via d and h <= g via e:
    map n to the meet point <d, e, n> and echo the answer."""
    a = Asm()
    c = pair(d, e)
    x, y, p, tmp, t2 = 16, 17, 18, 19, 20
    skip = a.new_label()
    a.if_zero(0, skip)
    a.halt(1)
    a.mark(skip)
    a.build_const(x, c, tmp)
    a.copy(2, y, tmp)
    a.pair_into(x, y, p, tmp, t2)
    a.dbl(p, tmp)
    a.halt(p)
    return a.build()


def domain_via_jump_witness() -> Program:
    """chi_dom(f) <= K0(f): on input n query the index 4n+2 ("ask n and
    halt regardless"); the K0 answer 0/1 is the membership bit."""
    a = Asm()
    t, tmp = 16, 17
    skip = a.new_label()
    a.if_zero(0, skip)
    a.halt(1)
    a.mark(skip)
    a.copy(2, t, tmp)
    a.dbl(t, tmp)
    a.dbl(t, tmp)
    a.dbl(t, tmp)
    a.add_const(t, 4)  # w = 2*(4n+2) = 8n+4
    a.halt(t)
    return a.build()


def value_via_jump_witness(scan_cap: int = ANSWER_CAP) -> Program:
    """f <= K(f): walk the probe indices 4*pair(n,m)+1 for m = 0, 1, ...;
    the first answer 1 pins f(n) = m."""
    a = Asm()
    base = SAFE_BASE
    tmp, t2, x, y, p, cnt = base, base + 1, base + 2, base + 3, base + 4, base + 5
    found = [a.new_label(f"hit{t}") for t in range(scan_cap)]
    ask = a.new_label("ask")
    a.copy(0, cnt, tmp)
    for t in range(scan_cap):
        a.decj(cnt, ask)
        a.if_nonzero(10 + t, found[t])
    a.jmp(ask)
    for t in range(scan_cap):
        a.mark(found[t])
        a.build_const(x, 2 * t + 1, tmp)
        a.halt(x)
    a.mark(ask)
    a.copy(2, x, tmp)
    a.copy(0, y, tmp)
    a.pair_into(x, y, p, tmp, t2)
    a.dbl(p, tmp)  # 2*pair(n,s)
    a.dbl(p, tmp)  # 4*pair(n,s)
    a.inc(p)       # probe index 4*pair(n,s)+1
    a.dbl(p, tmp)  # encoded query
    a.halt(p)
    return a.build()


def level_functional_program(n: int, third: int) -> Program:
    """The auxiliary functional over a join f (+) u: on any input, ask
    u(n), then ask f at the triple <n, u(n), third>, and return that."""
    a = Asm()
    t, tmp, x, y, u, fc = 16, 17, 18, 19, 20, 21
    r0_cases = [a.new_label("rnd0"), a.new_label("rnd1")]
    a.decj(0, r0_cases[0])
    a.decj(0, r0_cases[1])
    a.halt(1)  # round 2: relay the f-value
    a.mark(r0_cases[0])  # round 0: query the right side at n
    a.build_const(t, 4 * n + 2, tmp)
    a.halt(t)
    a.mark(r0_cases[1])  # round 1: r5 holds i = u(n)
    a.build_const(x, n, tmp)
    a.copy(5, y, tmp)
    a.pair_into(x, y, u, tmp, t)
    a.build_const(y, third, tmp)
    a.pair_into(u, y, fc, tmp, t)
    a.dbl(fc, tmp)  # point code on the f side of the join
    a.dbl(fc, tmp)  # encoded query
    a.halt(fc)
    return a.build()


# ---------------------------------------------------------------------------
# special index families (bodies; the numbering adds nothing else)

PROBE_TAG, INFLATION_TAG, TRANSFER_TAG = 0, 1, 2


def _emit_family_header(a: Asm, tag: int, k: int):
    """Dead-code parameter header: JMP over a NOP/INC-r0 bit field
    spelling c = 3k + tag + 1 in binary (MSB first, leading INC)."""
    over = a.new_label("over")
    a.jmp(over)
    for bit in bin(3 * k + tag + 1)[2:]:
        if bit == "1":
            a.inc(0)
        else:
            a.nop()
    a.mark(over)


def parse_family_header(p: Program) -> tuple[int, int] | None:
    """Recover (tag, k) from a special program's header, or None."""
    ins = p.instructions
    if not ins or ins[0].op != JMP:
        return None
    over = ins[0].a
    if over < 2 or over > len(ins):
        return None
    bits = []
    for i in ins[1:over]:
        if i.op == INC and i.a == 0:
            bits.append("1")
        elif i.op == NOP:
            bits.append("0")
        else:
            return None
    if bits[0] != "1":
        return None
    c = int("".join(bits), 2)
    x = c - 1
    return x % 3, x // 3


def probe_program(k: int) -> Program:
    """Ask n, halt iff the answer equals m, else spin (k = pair(n, m))."""
    n, m = unpair(k)
    a = Asm()
    _emit_family_header(a, PROBE_TAG, k)
    t, tmp = 16, 17
    query = a.new_label("query")
    eq = a.new_label()
    neq = a.new_label()
    a.if_zero(0, query)
    a.build_const(t, m, tmp)
    a.compare_eq(5, t, eq, neq)
    a.mark(eq)
    a.zero(t)
    a.inc(t)
    a.halt(t)  # <1, 0>
    a.mark(neq)
    a.jmp(neq)
    a.mark(query)
    a.build_const(t, 2 * n, tmp)
    a.halt(t)
    return a.build()


def inflation_program(n: int) -> Program:
    """Ask n and halt with the answer, whatever the input is."""
    a = Asm()
    _emit_family_header(a, INFLATION_TAG, n)
    t, tmp = 16, 17
    query = a.new_label("query")
    a.if_zero(0, query)
    a.halt(1)
    a.mark(query)
    a.build_const(t, 2 * n, tmp)
    a.halt(t)
    return a.build()


HARNESS_LEN_CAP = 2000
HARNESS_REG_CAP = 512


def _harness_hosts(p: Program, q: Program) -> bool:
    return (
        len(p) <= HARNESS_LEN_CAP
        and len(q) <= HARNESS_LEN_CAP
        and p.max_register <= HARNESS_REG_CAP
        and q.max_register <= HARNESS_REG_CAP
    )


def transfer_program(k: int, decode_fn) -> Program:
    """Nested-simulation index body: runs decode(e) over the virtual
    oracle m -> dialogue of decode(d) at m, with the input pinned to the
    constant e (k = pair(d, e)).

    Components beyond the harness's static hosting limits get a divergent
    body; the parameter header keeps such programs pairwise distinct.
    """
    d, e = unpair(k)
    p = decode_fn(e)
    q = decode_fn(d)
    a = Asm()
    _emit_family_header(a, TRANSFER_TAG, k)
    if _harness_hosts(p, q):
        _emit_harness(a, p, ("compose", q), input_const=e, answer_cap=ANSWER_CAP)
    else:
        a.dead_loop()
    return a.build()


# ---------------------------------------------------------------------------
# the replay harness

def _operand_registers(p: Program) -> set[int]:
    return {i.a for i in p.instructions if i.op in (INC, DECJ, HALT)}


def compose_programs(p: Program, q: Program, answer_cap: int = ANSWER_CAP) -> Program:
    """A program r with dialogue(r, h) extending dialogue(p, lazy-q-over-h):
    inner queries run q's dialogue against the real oracle; freezes and
    divergence propagate."""
    a = Asm()
    _emit_harness(a, p, ("compose", q), input_const=None, answer_cap=answer_cap)
    return a.build()


def hardcode_join_left(p: Program, table: dict[int, int], answer_cap: int = ANSWER_CAP) -> Program:
    """Rewrite p (a witness over table (+) beta) into a beta-only witness:
    left-side queries are answered from the baked table, right-side
    queries pass through as plain queries."""
    a = Asm()
    _emit_harness(a, p, ("hardcode", dict(table)), input_const=None, answer_cap=answer_cap)
    return a.build()


def _emit_harness(a: Asm, p: Program, inner, input_const: int | None, answer_cap: int):
    A = answer_cap
    W = SAFE_BASE
    CUR, WREG, T1, T2, T3, T4, T5, T6, RCNT, JJ, QV, AV, LASTB = range(W, W + 13)
    WIN = W + 13
    CB = WIN + A
    PB = CB + A
    pb = max(p.max_register + 1, 10 + A)
    mode, payload = inner
    if mode == "compose":
        q: Program = payload
        QB = PB + pb
        qb = max(q.max_register + 1, 10 + A)
        q_need = _operand_registers(q)
    p_need = _operand_registers(p)

    dead = a.new_label("dead")
    ploop = a.new_label("ploop")
    phalt = a.new_label("phalt")
    inner_l = a.new_label("inner")
    feed = a.new_label("feed")

    # INIT: refuse runs that already hold more answers than the window
    guard_ok = a.new_label()
    a.copy(0, T1, T2)
    for _ in range(A + 1):
        a.decj(T1, guard_ok)
    a.jmp(dead)
    a.mark(guard_ok)
    a.zero(T1)
    # window := own answers, RCNT := own answer count
    for t in range(A):
        a.copy(10 + t, WIN + t, T1)
    a.copy(0, RCNT, T1)

    # PLOOP: run p on the c-bank answers collected so far
    a.mark(ploop)
    for r in (WREG, T1, T2, T3, T4, T5, T6, JJ, QV, AV, LASTB):
        a.zero(r)
    for i in range(pb):
        a.zero(PB + i)
    if 0 in p_need:
        a.copy(CUR, PB + 0, T1)
    if input_const is None:
        for r in (2, 3, 4, 6, 7, 8, 9):
            if r in p_need:
                a.copy(r, PB + r, T1)
    else:
        consts = {2: input_const, 3: 2 * input_const, 4: 2 * input_const + 1}
        c1, c2 = unpair(input_const)
        consts[6], consts[7] = c1, c2
        consts[8], consts[9] = unpair(c1)
        for r, v in consts.items():
            if r in p_need:
                a.build_const(PB + r, v, T1)
    if 1 in p_need or 5 in p_need:
        lc_zero = a.new_label()
        lc_done = a.new_label()
        a.if_zero(CUR, lc_zero)
        a.copy(CUR, T3, T1)
        a.decj(T3, dead)
        a.read_indexed(CB, A, T3, LASTB, T1, dead)
        if 5 in p_need:
            a.copy(LASTB, PB + 5, T1)
        if 1 in p_need:
            a.copy(LASTB, T4, T1)
            a.dbl(T4, T1)
            a.inc(T4)
            a.move(T4, PB + 1)
        a.jmp(lc_done)
        a.mark(lc_zero)
        if 1 in p_need:
            if input_const is None:
                a.copy(3, PB + 1, T1)
            else:
                a.build_const(PB + 1, 2 * input_const, T1)
        a.mark(lc_done)
    for t in range(A):
        if (10 + t) in p_need:
            a.copy(CB + t, PB + 10 + t, T1)  # c-bank is 0 beyond CUR

    _emit_translated(a, p, PB, WREG, phalt, dead)

    # PHALT: p produced w; odd = final value, even = inner query
    a.mark(phalt)
    evenq = a.new_label()
    a.copy(WREG, T3, T1)
    a.halve(T3, T4, T2)
    a.if_zero(T2, evenq)
    a.halt(WREG)
    a.mark(evenq)
    a.move(T4, QV)
    a.jmp(inner_l)

    if mode == "compose":
        # INNER: drive q's dialogue on input QV over the real oracle
        qloop = a.new_label("qloop")
        qhalt = a.new_label("qhalt")
        a.mark(inner_l)
        a.mark(qloop)
        for r in (WREG, T1, T2, T3, T4, T5, T6, AV, LASTB):
            a.zero(r)
        for i in range(qb):
            a.zero(QB + i)
        if 0 in q_need:
            a.copy(JJ, QB + 0, T1)
        if 2 in q_need:
            a.copy(QV, QB + 2, T1)
        if 3 in q_need:
            a.copy(QV, T3, T1)
            a.dbl(T3, T1)
            a.move(T3, QB + 3)
        if 4 in q_need:
            a.copy(QV, T3, T1)
            a.dbl(T3, T1)
            a.inc(T3)
            a.move(T3, QB + 4)
        if q_need & {6, 7, 8, 9}:
            a.copy(QV, T3, T1)
            a.unpair_into(T3, T4, T5, T1, T2)
            if 6 in q_need:
                a.copy(T4, QB + 6, T1)
            if 7 in q_need:
                a.copy(T5, QB + 7, T1)
            a.zero(T5)
            if q_need & {8, 9}:
                a.unpair_into(T4, T3, T5, T1, T2)
                if 8 in q_need:
                    a.copy(T3, QB + 8, T1)
                if 9 in q_need:
                    a.copy(T5, QB + 9, T1)
                a.zero(T3)
                a.zero(T5)
            a.zero(T4)
        if 1 in q_need or 5 in q_need:
            qj_zero = a.new_label()
            qj_done = a.new_label()
            a.if_zero(JJ, qj_zero)
            a.copy(JJ, T3, T1)
            a.decj(T3, dead)
            a.read_indexed(WIN, A, T3, LASTB, T1, dead)
            if 5 in q_need:
                a.copy(LASTB, QB + 5, T1)
            if 1 in q_need:
                a.copy(LASTB, T4, T1)
                a.dbl(T4, T1)
                a.inc(T4)
                a.move(T4, QB + 1)
            a.jmp(qj_done)
            a.mark(qj_zero)
            if 1 in q_need:
                a.copy(QV, T3, T1)
                a.dbl(T3, T1)
                a.move(T3, QB + 1)
            a.mark(qj_done)
        for t in range(A):
            if (10 + t) in q_need:
                skip = a.new_label()
                a.copy(JJ, T3, T1)
                for _ in range(t + 1):
                    a.decj(T3, skip)
                a.zero(T3)
                a.copy(WIN + t, QB + 10 + t, T1)
                a.mark(skip)
                a.zero(T3)

        _emit_translated(a, q, QB, WREG, qhalt, dead)

        a.mark(qhalt)
        qquery = a.new_label()
        a.copy(WREG, T3, T1)
        a.halve(T3, T4, T2)
        a.if_zero(T2, qquery)
        # inner halted with value T4: append to the c-bank, slide the window
        a.copy(CUR, T3, T1)
        a.write_indexed(CB, A, T3, T4, dead)
        sh = a.new_label("shift")
        shdone = a.new_label()
        a.mark(sh)
        a.decj(JJ, shdone)
        a.decj(RCNT, dead)
        for t in range(A - 1):
            a.zero(WIN + t)
            a.move(WIN + t + 1, WIN + t)
        a.zero(WIN + A - 1)
        a.jmp(sh)
        a.mark(shdone)
        a.inc(CUR)
        a.jmp(ploop)
        a.mark(qquery)
        # inner emitted a query; feed it the next answer or pass it up
        have = a.new_label()
        passup = a.new_label()
        a.copy(JJ, T3, T1)
        a.copy(RCNT, T5, T1)
        a.less_than(T3, T5, have, passup)
        a.mark(have)
        a.zero(T3)
        a.zero(T5)
        a.inc(JJ)
        a.jmp(qloop)
        a.mark(passup)
        a.halt(WREG)
    else:
        table: dict[int, int] = payload
        # INNER: QV is a join-level query; even side is baked, odd passes up
        fside = a.new_label("fside")
        a.mark(inner_l)
        a.zero(T3)
        a.zero(T4)
        a.zero(T2)
        a.copy(QV, T3, T1)
        a.halve(T3, T4, T2)
        a.if_zero(T2, fside)
        # odd: right-side point T4; consume one real answer or ask for it
        haveb = a.new_label()
        a.if_nonzero(RCNT, haveb)
        a.zero(WREG)
        a.move(T4, WREG)
        a.dbl(WREG, T1)
        a.halt(WREG)
        a.mark(haveb)
        a.copy(WIN + 0, AV, T1)
        for t in range(A - 1):
            a.zero(WIN + t)
            a.move(WIN + t + 1, WIN + t)
        a.zero(WIN + A - 1)
        a.decj(RCNT, dead)
        a.jmp(feed)
        a.mark(fside)
        for key in sorted(table):
            hit = a.new_label()
            miss = a.new_label()
            a.zero(T5)
            a.copy(T4, T5, T1)
            a.equal_const(T5, key, hit, miss)
            a.mark(hit)
            a.build_const(AV, table[key], T1)
            a.jmp(feed)
            a.mark(miss)
            a.zero(T5)
        a.jmp(dead)
        a.mark(feed)
        a.copy(CUR, T3, T1)
        a.write_indexed(CB, A, T3, AV, dead)
        a.inc(CUR)
        a.jmp(ploop)

    a.mark(dead)
    a.jmp(dead)


def _emit_translated(a: Asm, p: Program, bank: int, wreg: int, on_halt, dead):
    """Inline p with registers shifted into its bank; HALT stages the
    output into wreg and jumps to on_halt; out-of-range targets diverge."""
    blocks = [a.new_label(f"i{j}") for j in range(len(p))]

    def target(j: int):
        return blocks[j] if j < len(p) else dead

    for j, ins in enumerate(p.instructions):
        a.mark(blocks[j])
        if ins.op == INC:
            a.inc(bank + ins.a)
        elif ins.op == DECJ:
            a.decj(bank + ins.a, target(ins.b))
        elif ins.op == JMP:
            a.jmp(target(ins.a))
        elif ins.op == NOP:
            a.nop()
        else:  # HALT
            a.zero(wreg)
            a.move(bank + ins.a, wreg)
            a.jmp(on_halt)
    a.jmp(dead)  # falling off the end of p diverges


# ---------------------------------------------------------------------------
# bounded universal dialogue simulator

def universal_sim(side: str) -> Program:
    """The meet lower-bound witness for one side.

    Input: a meet point <d, e, n> = pair(pair(d, e), n).  The program
    reads the side's index (d for "left", e for "right") from its
    preloaded projection register, decodes it as a general-class program
    of at most SIM_INSTR_CAP instructions over registers < SIM_REG_CAP,
    and replays that program's dialogue on input n query-for-query: its
    own oracle answers are handed to the simulated run unchanged, and
    the simulated round output (halt or query) is emitted verbatim.
    Anything outside the supported regime diverges; no wrong values.
    """
    if side not in ("left", "right"):
        raise ValueError(side)
    src_reg = 8 if side == "left" else 9
    IC, RC = SIM_INSTR_CAP, SIM_REG_CAP
    W = SAFE_BASE
    V, M, R4, CODE, P2, ICOUNT, PC, OPR, AR, BR, FLAG = range(W, W + 11)
    T1, T2, T3, T4, T5 = range(W + 11, W + 16)
    OPB = W + 16
    AB = OPB + IC
    BB = AB + IC
    SR = BB + IC

    a = Asm()
    dead = a.new_label("dead")
    parse = a.new_label("parse")
    pdone = a.new_label("pdone")
    final = a.new_label("final")
    store = a.new_label("store")
    setup = a.new_label("setup")
    fetch = a.new_label("fetch")
    pcinc = a.new_label("pcinc")
    djump = a.new_label("djump")

    # only own dialogues short enough to hand to the simulated bank
    guard_ok = a.new_label()
    a.copy(0, T1, T2)
    for _ in range(RC - 10 + 1):
        a.decj(T1, guard_ok)
    a.jmp(dead)
    a.mark(guard_ok)
    a.zero(T1)

    # decode the side's index: general class only (residue 0 mod 4)
    a.copy(src_reg, V, T1)
    a.divmod_const(V, 4, M, R4)
    a.if_nonzero(R4, dead)
    a.if_zero(M, dead)  # index 0: the empty program diverges
    a.decj(M, dead)  # never taken: M >= 1

    a.inc(P2)
    a.mark(parse)
    a.if_zero(M, pdone)
    a.decj(M, dead)  # never taken
    dig1 = a.new_label()
    dig2 = a.new_label()
    a.divmod_const(M, 3, T1, T2)
    a.move(T1, M)
    a.decj(T2, dig1)
    a.decj(T2, dig2)
    a.zero(FLAG)  # digit 3: instruction separator
    a.jmp(final)
    a.mark(dig1)
    a.copy(P2, CODE, T1)
    a.dbl(P2, T1)
    a.jmp(parse)
    a.mark(dig2)
    a.copy(P2, CODE, T1)
    a.copy(P2, CODE, T1)
    a.dbl(P2, T1)
    a.jmp(parse)
    a.mark(pdone)
    a.inc(FLAG)

    a.mark(final)  # CODE holds one instruction code; split into op/a/b
    f_nop = a.new_label()
    f_decj = a.new_label()
    f_halt = a.new_label()
    f_inc = a.new_label()
    a.if_zero(CODE, f_nop)
    a.decj(CODE, dead)  # never taken
    a.divmod_const(CODE, 4, T3, T4)  # payload, tag
    a.decj(T4, f_decj)
    a.decj(T4, f_halt)
    a.decj(T4, f_inc)
    a.add_const(OPR, 3)  # JMP
    a.move(T3, AR)
    a.jmp(store)
    a.mark(f_decj)  # op 0
    a.unpair_into(T3, AR, BR, T1, T2)
    a.jmp(store)
    a.mark(f_halt)
    a.inc(OPR)
    a.move(T3, AR)
    a.jmp(store)
    a.mark(f_inc)
    a.add_const(OPR, 2)
    a.move(T3, AR)
    a.jmp(store)
    a.mark(f_nop)
    a.add_const(OPR, 4)

    a.mark(store)
    a.copy(ICOUNT, T3, T1)
    a.write_indexed(OPB, IC, T3, OPR, dead)
    a.copy(ICOUNT, T3, T1)
    a.write_indexed(AB, IC, T3, AR, dead)
    a.copy(ICOUNT, T3, T1)
    a.write_indexed(BB, IC, T3, BR, dead)
    a.inc(ICOUNT)
    a.zero(P2)
    a.inc(P2)
    a.if_zero(FLAG, parse)

    a.mark(setup)  # simulated input presentation for (n', own answers)
    a.copy(0, SR + 0, T1)
    a.copy(7, SR + 2, T1)
    a.copy(7, SR + 3, T1)
    a.dbl(SR + 3, T1)
    a.copy(7, SR + 4, T1)
    a.dbl(SR + 4, T1)
    a.inc(SR + 4)
    a.copy(5, SR + 5, T1)
    s1z = a.new_label()
    s1d = a.new_label()
    a.if_zero(0, s1z)
    a.copy(5, T3, T1)
    a.dbl(T3, T1)
    a.inc(T3)
    a.move(T3, SR + 1)
    a.jmp(s1d)
    a.mark(s1z)
    a.copy(7, T3, T1)
    a.dbl(T3, T1)
    a.move(T3, SR + 1)
    a.mark(s1d)
    a.copy(7, T3, T1)
    a.unpair_into(T3, T4, T5, T1, T2)
    a.copy(T4, SR + 6, T1)
    a.move(T5, SR + 7)
    a.unpair_into(T4, T3, T5, T1, T2)
    a.move(T3, SR + 8)
    a.move(T5, SR + 9)
    for t in range(RC - 10):
        skip = a.new_label()
        a.copy(0, T3, T1)
        for _ in range(t + 1):
            a.decj(T3, skip)
        a.zero(T3)
        a.copy(10 + t, SR + 10 + t, T1)
        a.mark(skip)
        a.zero(T3)

    a.mark(fetch)
    for r in (T3, T4, T5, OPR, AR, BR):
        a.zero(r)
    fok = a.new_label()
    a.copy(PC, T3, T1)
    a.copy(ICOUNT, T5, T1)
    a.less_than(T3, T5, fok, dead)  # falling off the end diverges
    a.mark(fok)
    a.zero(T3)
    a.zero(T5)
    a.copy(PC, T3, T1)
    a.read_indexed(OPB, IC, T3, OPR, T1, dead)
    a.copy(PC, T3, T1)
    a.read_indexed(AB, IC, T3, AR, T1, dead)
    a.copy(PC, T3, T1)
    a.read_indexed(BB, IC, T3, BR, T1, dead)
    e_decj = a.new_label()
    e_halt = a.new_label()
    e_inc = a.new_label()
    e_jmp = a.new_label()
    a.decj(OPR, e_decj)
    a.decj(OPR, e_halt)
    a.decj(OPR, e_inc)
    a.decj(OPR, e_jmp)
    a.jmp(pcinc)  # NOP

    a.mark(e_decj)
    darms = [a.new_label(f"d{j}") for j in range(RC)]
    for j in range(RC):
        a.decj(AR, darms[j])
    a.jmp(dead)
    for j in range(RC):
        a.mark(darms[j])
        a.if_zero(SR + j, djump)
        a.decj(SR + j, dead)  # never taken
        a.jmp(pcinc)
    a.mark(djump)
    a.zero(PC)
    a.move(BR, PC)
    a.jmp(fetch)

    a.mark(e_halt)
    harms = [a.new_label(f"h{j}") for j in range(RC)]
    for j in range(RC):
        a.decj(AR, harms[j])
    a.jmp(dead)
    for j in range(RC):
        a.mark(harms[j])
        a.move(SR + j, T4)
        a.halt(T4)  # the simulated round output passes through verbatim

    a.mark(e_inc)
    iarms = [a.new_label(f"n{j}") for j in range(RC)]
    for j in range(RC):
        a.decj(AR, iarms[j])
    a.jmp(dead)
    for j in range(RC):
        a.mark(iarms[j])
        a.inc(SR + j)
        a.jmp(pcinc)

    a.mark(e_jmp)
    a.zero(PC)
    a.move(AR, PC)
    a.jmp(fetch)

    a.mark(pcinc)
    a.inc(PC)
    a.jmp(fetch)

    a.mark(dead)
    a.jmp(dead)
    return a.build()
