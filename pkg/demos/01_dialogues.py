#!/usr/bin/env python3
"""A tour of the machine and the dialogue protocol.

Programs are lists over five instructions (INC r / DECJ r L / JMP L /
HALT r / NOP).  A dialogue re-runs the program on the growing answer
sequence; halting with an even value 2q emits the query q, an odd value
2v+1 ends the dialogue with v.  Queries outside the oracle's domain
freeze the computation forever.
"""

from subturing import (
    Budget,
    FiniteTable,
    decode,
    encode,
    parse_program,
    run_dialogue,
    step_functional,
)

budget = Budget(step_fuel=10_000, round_cap=16, oracle_fuel=1000)

print("== the identity reduction is one instruction ==")
echo = parse_program("HALT r1")
print(echo.text.strip(), "   (r1 holds <query n> before any answer, <return a> after)")
print("index:", encode(echo))

f = FiniteTable({5: 3, 7: 0})
out = run_dialogue(echo, f, 5, budget)
print(f"over {{5:3, 7:0}} at 5 -> {out.outcome}({out.value}), trace {list(out.trace)}")
out = run_dialogue(echo, f, 6, budget)
print(f"over {{5:3, 7:0}} at 6 -> {out.outcome} at query {out.query}  (6 is out of the domain)")

print()
print("== divergence is certified by configuration cycling ==")
loop = parse_program("JMP 0")
out = run_dialogue(loop, f, 0, budget)
print(f"self-loop -> {out.outcome}, divergence certified: {out.divergence_certified}")

count_up = parse_program("INC r20\nJMP 0")
out = run_dialogue(count_up, f, 0, budget)
print(f"counting up -> {out.outcome}, certified: {out.divergence_certified} "
      "(no configuration ever repeats)")

print()
print("== every natural number is a program ==")
for index in (0, 2, 12, 24, 36):
    p = decode(index)
    text = " ; ".join(p.text.split("\n")).strip(" ;") or "(empty)"
    print(f"decode({index}) = {text}")
print("encode is the exact inverse:", all(encode(decode(i)) == i for i in range(500)))

print()
print("== budgets make everything finite ==")
tiny = Budget(step_fuel=3, round_cap=2, oracle_fuel=10)
out = run_dialogue(count_up, f, 0, tiny)
print(f"3 machine steps -> {out.outcome} ({out.reason})")
out = run_dialogue(parse_program("HALT r3"), FiniteTable({4: 0}), 4, budget)
print(f"re-querying forever -> {out.outcome} ({out.reason}), "
      f"{len(out.trace)} answered rounds")
