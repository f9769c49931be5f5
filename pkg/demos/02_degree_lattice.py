#!/usr/bin/env python3
"""Join, meet and graph coding, with their canonical witness programs.

The join interleaves two functions; the meet is defined on coded
triples <d, e, n> where the two indexed dialogues against the sides
halt with a common value.  Every law is witnessed by a concrete machine
program and checked by running it.
"""

from subturing import (
    Budget,
    FiniteTable,
    Join,
    Meet,
    ReductionWitness,
    canonical_witnesses,
    encode,
    graph_encode,
    meet_point,
    meet_universality,
    verify_reduction,
)
from subturing.coding import pair

budget = Budget(200_000, 16, 50_000)
w = canonical_witnesses()

f = FiniteTable({0: 4, 3: 7, 5: 2})
g = FiniteTable({0: 4, 1: 1, 3: 5, 5: 2})

print("== join: both components project out ==")
j = Join(f, g)
for name, target in (("join_left", f), ("join_right", g)):
    res = verify_reduction(w[name], target, j, range(8), budget)
    print(f"{name}: verified = {isinstance(res, ReductionWitness)}")

print()
print("== graph coding: a function and its 0/1 graph are interreducible ==")
gf = graph_encode(f)
res = verify_reduction(w["graph_bwd"], f, gf, range(8), budget)
print("f from its graph:", isinstance(res, ReductionWitness))
points = [pair(n, m) for n in f.domain() for m in range(9)]
res = verify_reduction(w["graph_fwd"], gf, f, points, budget)
print("graph from f:    ", isinstance(res, ReductionWitness))

print()
print("== meet: defined where two dialogues agree ==")
echo = 36  # index of [HALT r1]
m = Meet(f, g, budget)
for n in (0, 3, 5, 6):
    x = meet_point(echo, echo, n)
    ans = m.eval(x, 100)
    print(f"  meet at <echo, echo, {n}> -> {ans.kind}"
          + (f"({ans.value})" if ans.kind == "defined" else ""))

print()
print("== the meet is a lower bound, by universal simulation ==")
pts = [meet_point(echo, echo, n) for n in (0, 5)]
for name, side in (("meet_left", f), ("meet_right", g)):
    res = verify_reduction(w[name], m, side, pts, budget)
    print(f"{name}: verified = {isinstance(res, ReductionWitness)} "
          f"({len(w[name])} instructions of bounded universal interpreter)")

print()
print("== and greatest among witnessed lower bounds ==")
# h = the constant-0 function reduces to both sides via index 12
# ([HALT r0]: ask 0, halt with 0); the mapped points witness h <= meet
const0 = 12
f0 = FiniteTable({**f.table, 0: 0})
g0 = FiniteTable({**g.table, 0: 0})
h = FiniteTable({0: 0, 1: 0})
mu = Meet(f0, g0, budget)
prog = meet_universality(const0, const0)
res = verify_reduction(prog, h, mu, h.domain(), Budget(2_000_000, 16, 50_000))
print("h <= meet(f, g) via the mapped points:", isinstance(res, ReductionWitness))
