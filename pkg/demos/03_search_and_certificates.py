#!/usr/bin/env python3
"""Bounded verification and search, query traces, and the anti-cupping replay.

A reduction claim is always checked on a finite domain at a budget.  A
search either returns the least verified witness index or a certificate
refuting every index below the bound, with budget-limited rows flagged
rather than counted as refuted.
"""

import json

from subturing import (
    Budget,
    FiniteTable,
    Join,
    NonReductionCertificate,
    ReductionWitness,
    anti_cupping_replay,
    canonical_witnesses,
    ce_enumerate,
    check_equivalence,
    search_reduction,
    trace_queries,
)
from subturing import codegen, encode

budget = Budget(100_000, 16, 10_000)
small = Budget(400, 8, 100)

f = FiniteTable({0: 5, 3: 1})

print("== searching for a witness of f <= f ==")
res = search_reduction(f, f, 40, f.domain(), small)
print("found witness index:", res.program_index)
print("its program:", " ; ".join(res.program().text.split("\n")).strip(" ;"))

print()
print("== refuting f <= (empty) below an index bound ==")
res = search_reduction(f, FiniteTable({}), 60, f.domain(), small)
assert isinstance(res, NonReductionCertificate)
print(f"all {res.index_bound} indices refuted; "
      f"{res.unknown_count} budget-limited rows flagged")

print()
print("== both directions at once ==")
rep = check_equivalence(f, f, 40, f.domain(), small)
print("f == f at the bound:", rep.equivalent_at_bound)

print()
print("== query traces drive the localization argument ==")
big_f = FiniteTable({n: (3 * n) % 7 for n in range(12)})
beta = FiniteTable({0: 9})
target = FiniteTable({n: big_f.table[n] for n in (1, 4, 6)})
j = Join(big_f, beta)
p = canonical_witnesses()["join_left"]
per_input, union = trace_queries(p, j, range(12), budget, side="left")
print("left-side queries per input:", {n: q for n, q in per_input.items() if q})
union, step1, step2 = anti_cupping_replay(p, target, big_f, beta, range(12), budget)
print(f"traced union Q = {union}")
print("re-verified against the Q-restricted join:", isinstance(step1, ReductionWitness))
print("hard-coded beta-only witness verified:    ", isinstance(step2, ReductionWitness))

print()
print("== bounded relative enumeration ==")
e = encode(codegen.echo_program())
print(f"W_{e} over f, inputs <= 12:", ce_enumerate(e, big_f, 12, small))
