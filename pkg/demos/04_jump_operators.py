#!/usr/bin/env python3
"""The two relative halting operators and their index families.

K distinguishes three ways a dialogue can fail to produce a value:
halting (1), certified divergence with every query answered (0), and
freezing at an out-of-domain query (undefined).  K0 collapses freezing
into 0.  Reserved index families make the operators usable by machine
programs: inflation indices 4n+2 ask n and halt, probe indices
4*pair(n,m)+1 halt exactly when f(n) = m, transfer indices 4*pair(d,e)+3
replay an index over a lazy dialogue oracle.
"""

from subturing import (
    Budget,
    FiniteTable,
    Program,
    ReductionWitness,
    inflation_index,
    k0,
    k0_oracle,
    k_jump,
    k_oracle,
    monotone_transfer,
    parse_program,
    probe_index,
    verify_reduction,
)
from subturing import codegen, encode

budget = Budget(500_000, 16, 100_000)
f = FiniteTable({2: 3, 4: 0, 9: 6})

print("== four-way classification at single indices ==")
rows = [
    ("halts immediately", encode(parse_program("HALT r4"))),
    ("self-loop", encode(codegen.self_loop_program())),
    ("asks 2 (in the domain)", inflation_index(2)),
    ("asks 7 (out of the domain)", inflation_index(7)),
]
for label, e in rows:
    a = k_jump(f, e, budget, memo_cap=2048)
    b = k0(f, e, budget, memo_cap=2048)
    print(f"  {label:28s} K: {a.kind:17s} K0 value: {b.value()}")

print()
print("== probe indices re-create the graph inside the jump ==")
K = k_oracle(f, budget)
for m in range(5):
    ans = K.eval(probe_index(2, m), 10)
    print(f"  K(f) at probe(2,{m}) = {ans.kind}:{ans.value}  "
          f"(f(2) = 3, so 1 exactly at m = 3)")

print()
print("== f reduces to its own jump, by walking the probes ==")
witness = codegen.value_via_jump_witness()
res = verify_reduction(witness, f, K, range(10), Budget(2_000_000, 32, 64))
print("verified:", isinstance(res, ReductionWitness))

print("== and the domain of f reduces to K0(f) via inflation indices ==")
chi = FiniteTable({n: (1 if n in f.table else 0) for n in range(10)})
res = verify_reduction(
    codegen.domain_via_jump_witness(), chi, k0_oracle(f, budget),
    range(10), Budget(2_000_000, 16, 64),
)
print("verified:", isinstance(res, ReductionWitness))

print()
print("== transfer indices: the jump is monotone, uniformly ==")
echo = encode(codegen.echo_program())
g = FiniteTable({5: 8, 36: 2})
for label, e in (("halting index", 180), ("self-loop", 24), ("echo at its own index", echo)):
    b_idx = monotone_transfer(echo, e)
    ans = k_jump(g, b_idx, Budget(2_000_000, 16, 200_000), memo_cap=2048)
    print(f"  b(echo, {label}) -> {ans.kind}")
