"""Finite-stage executions of the degree constructions.

Every stage emits a certificate whose evidence is a list of dialogue
citations (program index, oracle snapshot, input, budget, outcome); an
independent replay re-runs each citation and must reproduce the outcome
bit for bit.  Undecidable side questions are answered by a bounded
halting oracle whose every consultation is logged.  All claims are about
the bounded world only: index bounds, input bounds and budgets are part
of the transcript header.

Conventions shared by the builders:

* points a construction leaves undecided are out of the built set;
* searches pick the least candidate (pairs lexicographically);
* a stage blocked by budget-limited answers emits an explicit
  "inconclusive" certificate instead of silently skipping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .coding import pair, triple, unpair, untriple
from .machine import Budget, DEFAULT_MEMO_CAP, DialogueOutcome, run_dialogue
from .numbering import decode, encode
from .partialfn import (
    DEFINED,
    EMPTY,
    FiniteTable,
    Join,
    Meet,
    PartialFn,
    Restriction,
    budget_from_json,
    budget_to_json,
    from_json as oracle_from_json,
)
from .search import (
    NonReductionCertificate,
    ReductionWitness,
    ce_enumerate,
    search_reduction,
    verify_reduction,
)
from . import codegen


class ConstructionRefused(Exception):
    """A construction's recorded precondition failed; no stages were run."""


# ---------------------------------------------------------------------------
# evidence

def cite(program_index: int, oracle: PartialFn, n: int, budget: Budget,
         memo_cap: int = DEFAULT_MEMO_CAP) -> dict:
    """Run one dialogue and record everything needed to re-run it."""
    out = run_dialogue(decode(program_index), oracle, n, budget, memo_cap)
    return {
        "program": program_index,
        "oracle": oracle.to_json(),
        "input": n,
        "budget": budget_to_json(budget),
        "memoCap": memo_cap,
        "outcome": out.to_json(),
    }


def replay_citation(item: dict) -> bool:
    out = run_dialogue(
        decode(item["program"]),
        oracle_from_json(item["oracle"]),
        item["input"],
        budget_from_json(item["budget"]),
        item["memoCap"],
    )
    return out.to_json() == item["outcome"]


def _outcome(item: dict) -> DialogueOutcome:
    return DialogueOutcome.from_json(item["outcome"])


@dataclass
class StageCertificate:
    stage: int
    action: dict
    evidence: list = field(default_factory=list)
    oracle_answers: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "action": self.action,
            "evidence": self.evidence,
            "boundedOracleAnswers": self.oracle_answers,
        }

    @classmethod
    def from_json(cls, obj) -> "StageCertificate":
        return cls(
            obj["stage"], obj["action"], obj["evidence"], obj["boundedOracleAnswers"]
        )


class BoundedHaltingOracle:
    """Answers stage questions by bounded execution; logs every consultation.

    Answers are monotone in the budget; "certified-divergent" is final,
    "no-halt-by-budget" is an honest bounded answer, never a claim about
    the unbounded question.
    """

    def __init__(self, budget: Budget, memo_cap: int = 1024):
        self.budget = budget
        self.memo_cap = memo_cap
        self.log: list[dict] = []

    def _run(self, e: int, oracle: PartialFn, n: int) -> dict:
        return cite(e, oracle, n, self.budget, self.memo_cap)

    def classify(self, e: int, oracle: PartialFn, n: int) -> tuple[str, dict]:
        item = self._run(e, oracle, n)
        out = _outcome(item)
        if out.is_halted:
            answer = "halts"
        elif out.is_frozen:
            answer = f"frozen:{out.query}"
        elif out.divergence_certified:
            answer = "certified-divergent"
        else:
            answer = "no-halt-by-budget"
        entry = {
            "question": {"kind": "classify", "program": e, "input": n},
            "answer": answer,
            "budget": budget_to_json(self.budget),
            "citation": item,
        }
        self.log.append(entry)
        return answer, item

    def first_big_query(self, e: int, oracle: PartialFn, n: int, threshold: int):
        """The frozen query above threshold, if the dialogue hits one."""
        item = self._run(e, oracle, n)
        out = _outcome(item)
        big = out.query if out.is_frozen and out.query > threshold else None
        unknown = out.is_exhausted and not out.divergence_certified
        self.log.append(
            {
                "question": {
                    "kind": "big-query",
                    "program": e,
                    "input": n,
                    "threshold": threshold,
                },
                "answer": "none" if big is None else big,
                "flaggedUnknown": unknown,
                "budget": budget_to_json(self.budget),
                "citation": item,
            }
        )
        return big, unknown, item


# ---------------------------------------------------------------------------
# quasiminimal bound (immune restriction below a given function)

def build_quasiminimal(f: FiniteTable, stages: int, budget: Budget, *,
                       precondition_bound: int = 120, input_bound: int = 63):
    """Diagonalize a restriction of f against every oracle-free program and
    exclude one enumerated point per live relative enumerator.

    Returns (A, certificates) with A the chosen diagonalization points;
    points never acted on stay out of A.
    """
    domain = [n for n in f.domain() if n <= input_bound]
    pre = search_reduction(f, EMPTY, precondition_bound, domain, budget)
    if isinstance(pre, ReductionWitness):
        raise ConstructionRefused(
            f"f is computable at the bound: index {pre.program_index} extends it"
        )
    certificates = [
        StageCertificate(
            -1,
            {
                "kind": "precondition",
                "claim": "no-oracle-free-extension-at-bound",
                "indexBound": precondition_bound,
                "unknownCount": pre.unknown_count,
            },
        )
    ]
    A: list[int] = []
    excluded: list[int] = []
    r_e = -1
    for e in range(stages + 1):
        # action 1: a point of dom(f) above the restraint where program e
        # fails to compute f over the empty oracle
        diag = None
        for n in domain:
            if n <= r_e:
                continue
            item = cite(e, EMPTY, n, budget)
            out = _outcome(item)
            if out.is_halted and out.value != f.table[n]:
                diag = (n, "wrong-value", item)
                break
            if out.is_frozen or out.divergence_certified:
                diag = (n, "undefined", item)
                break
        if diag is None:
            certificates.append(
                StageCertificate(
                    e,
                    {
                        "kind": "unknown-blocked",
                        "action": 1,
                        "restraint": r_e,
                        "detail": "no diagonalization point settled within bounds",
                    },
                )
            )
            continue
        n1, why, item1 = diag
        A.append(n1)
        u_e = n1 + 1
        # action 2: keep one point of the e-th enumeration relative to f out
        enumerated = ce_enumerate(e, f, input_bound, budget)
        hit = next((n for n in enumerated if n > u_e), None)
        action: dict = {
            "kind": "stage",
            "diagonalPoint": n1,
            "diagonalReason": why,
            "restraintBefore": r_e,
            "use": u_e,
        }
        evidence = [item1]
        if hit is None:
            action["enumeratorFinite"] = True
            r_e = u_e
        else:
            excluded.append(hit)
            action["excludedPoint"] = hit
            evidence.append(cite(e, f, hit, budget))
            r_e = hit + 1
        action["restraintAfter"] = r_e
        certificates.append(StageCertificate(e, action, evidence))
    result = {
        "A": sorted(A),
        "excluded": sorted(excluded),
        "restricted": Restriction(f, set(A)).to_json(),
    }
    return result, certificates


# ---------------------------------------------------------------------------
# density (a degree strictly between two comparable ones)

def _domain_char(g: PartialFn, input_bound: int, fuel: int) -> FiniteTable:
    return FiniteTable(
        {
            n: (1 if g.eval(n, fuel).kind == DEFINED else 0)
            for n in range(input_bound + 1)
        }
    )


def build_density(f: FiniteTable, g: PartialFn, stages: int, budget: Budget, *,
                  precondition_bound: int = 120, input_bound: int = 63):
    """Between g < f: h = (f restricted to a diagonal set) joined with g.

    Stage e finds a point of dom(f) where program e over g goes wrong
    (so the restriction stays above g) and excludes one enumerated point
    of the e-th enumerator relative to dom(g)-char (+) f (the immunity
    half of the anti-cupping argument).
    """
    domain = [n for n in f.domain() if n <= input_bound]
    down = search_reduction(g, f, precondition_bound, list(range(input_bound + 1)), budget)
    if not isinstance(down, ReductionWitness):
        raise ConstructionRefused("g <= f is not witnessed at the bound")
    up = search_reduction(f, g, precondition_bound, domain, budget)
    if isinstance(up, ReductionWitness):
        raise ConstructionRefused(
            f"f <= g witnessed at the bound by index {up.program_index}"
        )
    certificates = [
        StageCertificate(
            -1,
            {
                "kind": "precondition",
                "gBelowFIndex": down.program_index,
                "fAboveGRefutedBound": precondition_bound,
                "unknownCount": up.unknown_count,
            },
        )
    ]
    alpha = _domain_char(g, input_bound, budget.oracle_fuel)
    side = Join(alpha, f)
    A: list[int] = []
    excluded: list[int] = []
    r_e = -1
    for e in range(stages + 1):
        diag = None
        for n in domain:
            if n <= r_e:
                continue
            item = cite(e, g, n, budget)
            out = _outcome(item)
            if out.is_halted and out.value != f.table[n]:
                diag = (n, "wrong-value", item)
                break
            if out.is_frozen or out.divergence_certified:
                diag = (n, "undefined", item)
                break
        if diag is None:
            certificates.append(
                StageCertificate(
                    e, {"kind": "unknown-blocked", "action": 1, "restraint": r_e}
                )
            )
            continue
        n1, why, item1 = diag
        A.append(n1)
        u_e = n1 + 1
        enumerated = ce_enumerate(e, side, input_bound, budget)
        hit = next((n for n in enumerated if n > u_e), None)
        action = {
            "kind": "stage",
            "diagonalPoint": n1,
            "diagonalReason": why,
            "restraintBefore": r_e,
            "use": u_e,
        }
        evidence = [item1]
        if hit is None:
            action["enumeratorFinite"] = True
            r_e = u_e
        else:
            excluded.append(hit)
            action["excludedPoint"] = hit
            evidence.append(cite(e, side, hit, budget))
            r_e = hit + 1
        action["restraintAfter"] = r_e
        certificates.append(StageCertificate(e, action, evidence))
    h = Join(Restriction(f, set(A)), g)
    result = {"A": sorted(A), "excluded": sorted(excluded), "h": h.to_json()}
    return result, certificates


# ---------------------------------------------------------------------------
# antichain family (finite binary strings in place of the full tree)

def build_antichain(f: FiniteTable, g: PartialFn, width: int, stages: int,
                    budget: Budget, *, precondition_bound: int = 120,
                    input_bound: int = 63, rho_length_bound: int = 6):
    """A family {A_sigma : sigma in 2^width} with mutual-immunity
    exclusions: an enumerated point of the e-th enumerator relative to
    (dom-char (+) A_sigma-extension (+) f) is kept out of every other
    member.  The extension search tries, at each length, the all-0 and
    all-1 completions of the member's decided bits (a recorded desk-scale
    candidate set), least (length, completion, point) first.
    """
    domain = [n for n in f.domain() if n <= input_bound]
    down = search_reduction(g, f, precondition_bound, list(range(input_bound + 1)), budget)
    if not isinstance(down, ReductionWitness):
        raise ConstructionRefused("g <= f is not witnessed at the bound")
    up = search_reduction(f, g, precondition_bound, domain, budget)
    if isinstance(up, ReductionWitness):
        raise ConstructionRefused("f <= g witnessed at the bound")
    certificates = [
        StageCertificate(
            -1,
            {
                "kind": "precondition",
                "gBelowFIndex": down.program_index,
                "unknownCount": up.unknown_count,
            },
        )
    ]
    alpha = _domain_char(g, input_bound, budget.oracle_fuel)

    def all_sigmas(level):
        return [
            tuple((s >> i) & 1 for i in range(level)) for s in range(2 ** level)
        ]

    # bits[sigma] maps position -> 0/1 for every decided position
    level = min(1, width)
    bits: dict[tuple, dict[int, int]] = {s: {} for s in all_sigmas(level)}
    r_e = -1
    for e in range(stages + 1):
        new_level = min(e + 1, width)
        if new_level > level:
            bits = {
                sigma: dict(bits[sigma[:level]]) for sigma in all_sigmas(new_level)
            }
            level = new_level
        # action 1: one common diagonalization point against programs over g
        diag = None
        for n in domain:
            if n <= r_e:
                continue
            item = cite(e, g, n, budget)
            out = _outcome(item)
            if out.is_halted and out.value != f.table[n]:
                diag = (n, "wrong-value", item)
                break
            if out.is_frozen or out.divergence_certified:
                diag = (n, "undefined", item)
                break
        if diag is None:
            certificates.append(
                StageCertificate(e, {"kind": "unknown-blocked", "action": 1})
            )
            continue
        n1, why, item1 = diag
        for sigma in bits:
            bits[sigma][n1] = 1
        u = n1 + 1
        action = {
            "kind": "stage",
            "level": level,
            "diagonalPoint": n1,
            "diagonalReason": why,
            "substages": [],
        }
        evidence = [item1]
        # action 2: one substage per member, in lexicographic order
        for sigma in sorted(bits):
            found = None
            for rho_len in range(u, u + rho_length_bound + 1):
                for fill in (1, 0):
                    rho = [bits[sigma].get(i, fill) for i in range(rho_len)]
                    rho_table = FiniteTable({i: rho[i] for i in range(rho_len)})
                    side = Join(alpha, Join(rho_table, f))
                    enumerated = ce_enumerate(e, side, input_bound, budget)
                    hit = next((n for n in enumerated if n > u), None)
                    if hit is not None:
                        found = (rho, hit, side)
                        break
                if found:
                    break
            sub = {"sigma": "".join(map(str, sigma))}
            if found is None:
                sub["enumeratorFinite"] = True
            else:
                rho, hit, side = found
                for i, b in enumerate(rho):
                    bits[sigma].setdefault(i, b)
                for tau in bits:
                    if tau != sigma:
                        bits[tau][hit] = 0
                sub["rho"] = "".join(map(str, rho))
                sub["excludedPoint"] = hit
                evidence.append(cite(e, side, hit, budget))
                u = max(len(rho), hit) + 1
            action["substages"].append(sub)
        r_e = u
        action["restraintAfter"] = r_e
        certificates.append(StageCertificate(e, action, evidence))
    family = {}
    for sigma in sorted(bits):
        name = "".join(map(str, sigma)) if sigma else ""
        family[name] = sorted(n for n, b in bits[sigma].items() if b == 1)
    result = {"family": family, "width": width}
    return result, certificates


# ---------------------------------------------------------------------------
# quasiminimal jump inversion

def _sigma_family(locations: list[int], value_bound: int):
    """All partial maps with domain inside `locations` and values <= bound,
    in a canonical order."""
    from itertools import combinations, product

    out = []
    for r in range(len(locations) + 1):
        for dom in combinations(locations, r):
            for vals in product(range(value_bound + 1), repeat=r):
                out.append(dict(zip(dom, vals)))
    return out


def build_jump_inversion(h: dict[int, int], stages: int, budget: Budget, *,
                         value_bound: int | None = None, input_bound: int = 4):
    """Code h at locations spread far enough apart that each index's
    behaviour at its own diagonal is settled by a finite truncation; then
    decide the jump at every index by the three-way bounded procedure.
    """
    if value_bound is None:
        value_bound = max(h.values(), default=0)
    if h and max(h.values()) > value_bound:
        raise ConstructionRefused("value bound below a coded value")
    oracle = BoundedHaltingOracle(budget)
    certificates: list[StageCertificate] = []
    a: list[int] = []
    for e in range(stages + 1):
        threshold = a[e - 1] if e else -1
        best = threshold + 1
        consulted = 0
        for sigma in _sigma_family(a, value_bound):
            table = FiniteTable(sigma)
            big, _, _ = oracle.first_big_query(e, table, e, threshold)
            if big is not None:
                best = max(best, big + 1)
            consulted += 1
            for n in range(input_bound + 1):
                big, _, _ = oracle.first_big_query(e, table, n, threshold)
                if big is not None:
                    best = max(best, big + 1)
        a.append(best)
        certificates.append(
            StageCertificate(
                e,
                {
                    "kind": "coding-location",
                    "location": best,
                    "threshold": threshold,
                    "sigmaFamilySize": consulted,
                },
                oracle_answers=oracle.log[-consulted * (input_bound + 2):],
            )
        )
    f_table = {a[k]: v for k, v in h.items() if k < len(a)}
    f = FiniteTable(f_table)
    decisions = []
    for e in range(stages + 1):
        cut = a[e - 1] + 1 if e else 0
        decision, items = jump_decision(e, f_table, cut, budget)
        decisions.append(decision)
        certificates.append(
            StageCertificate(
                e,
                {
                    "kind": "jump-decision",
                    "truncationCut": cut,
                    **decision,
                },
                evidence=items,
            )
        )
    result = {
        "codingLocations": a,
        "f": sorted(f_table.items()),
        "decisions": decisions,
    }
    return result, certificates


# ---------------------------------------------------------------------------
# spoilers for increasing suprema and decreasing infima

def jump_decision(e: int, f_table: dict[int, int], cut: int, budget: Budget):
    """The three-way classification of the jump at index e, decided on the
    truncation of f below the cut and replayed against the full f.

    Case 1: the truncated dialogue freezes (jump undefined); case 2: it
    halts (jump = 1); case 3: certified divergence inside the coded part
    (jump = 0); case 0: budget-limited, flagged, never a claim.
    """
    f = FiniteTable(f_table)
    sigma_star = FiniteTable({p: v for p, v in f_table.items() if p < cut})
    item_trunc = cite(e, sigma_star, e, budget, memo_cap=2048)
    item_full = cite(e, f, e, budget, memo_cap=2048)
    out_t = _outcome(item_trunc)
    out_f = _outcome(item_full)
    if out_t.is_frozen:
        case, value = 1, None
    elif out_t.is_halted:
        case, value = 2, 1
    elif out_t.divergence_certified:
        case, value = 3, 0
    else:
        case, value = 0, None
    claim_ok = (
        out_t.classification() == out_f.classification()
        and out_t.trace == out_f.trace
    )
    decision = {
        "index": e,
        "case": case,
        "jumpValue": value,
        "truncationAgrees": claim_ok,
    }
    return decision, [item_trunc, item_full]


def coding_location_witness(location: int) -> "Program":
    """The reduction g_i <= f for f coding g_i at pair(location, .)."""
    from .asm import Asm

    a = Asm()
    x, y, p, tmp, t2 = 16, 17, 18, 19, 20
    skip = a.new_label()
    a.if_zero(0, skip)
    a.halt(1)
    a.mark(skip)
    a.build_const(x, location, tmp)
    a.copy(2, y, tmp)
    a.pair_into(x, y, p, tmp, t2)
    a.dbl(p, tmp)
    a.halt(p)
    return a.build()


def _paired_coding(gs: list[FiniteTable], locations: list[int]) -> FiniteTable:
    table = {}
    for i, g in enumerate(gs[: len(locations)]):
        for x, v in g.table.items():
            table[pair(locations[i], x)] = v
    return FiniteTable(table)


def spoil_supremum(gs: list[FiniteTable], h: FiniteTable, stages: int,
                   budget: Budget, *, input_bound: int = 63):
    """Build f coding the family at spread-out locations so that every
    index either freezes beyond the current restraint (a point declared
    undefined forever) or only ever computes below it.
    """
    if len(gs) != stages + 1:
        raise ConstructionRefused(
            f"need exactly {stages + 1} coded functions for {stages + 1} stages"
        )
    a = [0]
    banned: list[int] = []
    certificates = []
    domain = [n for n in h.domain() if n <= input_bound]
    for e in range(stages + 1):
        f_cur = _paired_coding(gs, a)
        found = None
        unknowns = 0
        runs = []
        for n in domain:
            item = cite(e, f_cur, n, budget)
            runs.append(item)
            out = _outcome(item)
            if out.is_frozen:
                b, x = unpair(out.query)
                if b > a[e]:
                    found = (n, out.query, b, x, item)
                    break
            elif out.is_exhausted and not out.divergence_certified:
                unknowns += 1
        if found is not None:
            n, q, b, x, item = found
            banned.append(q)
            a.append(b + 1)
            certificates.append(
                StageCertificate(
                    e,
                    {
                        "kind": "big-query",
                        "case": 1,
                        "input": n,
                        "declaredUndefined": [b, x],
                        "newLocation": b + 1,
                        "flaggedUnknowns": unknowns,
                    },
                    evidence=[item],
                )
            )
        else:
            a.append(a[e] + 1)
            max_first = -1
            for item in runs:
                out = _outcome(item)
                for q, _ in out.trace:
                    max_first = max(max_first, unpair(q)[0])
            certificates.append(
                StageCertificate(
                    e,
                    {
                        "kind": "locality",
                        "case": 2,
                        "restraint": a[e],
                        "maxQueriedLocation": max_first,
                        "flaggedUnknowns": unknowns,
                    },
                    evidence=runs,
                )
            )
    f_final = _paired_coding(gs, a)
    assert not (set(banned) & set(f_final.table)), "restraint violated"
    result = {
        "locations": a,
        "banned": sorted(banned),
        "f": sorted(f_final.table.items()),
    }
    return result, certificates


def proj2_query_program() -> "Program":
    """Ask the second projection of the input, halt with the answer."""
    from .asm import Asm

    a = Asm()
    tmp = 16
    skip = a.new_label()
    a.if_zero(0, skip)
    a.halt(1)
    a.mark(skip)
    a.dbl(7, tmp)
    a.halt(7)
    return a.build()


def fold_meet(gs: list[PartialFn], budget: Budget):
    """Left meet-fold of the family with the canonical point map.

    Returns (levels, point_fn) where levels[l] is the fold up to index l
    and point_fn(l, n) the canonical point of levels[l] sitting over the
    base input n (echo on the left, second-projection query on the right).
    """
    echo_idx = encode(codegen.echo_program())
    p2q_idx = encode(proj2_query_program())
    levels: list[PartialFn] = [gs[0]]
    for l in range(1, len(gs)):
        levels.append(Meet(levels[l - 1], gs[l], budget))

    def point(l: int, n: int) -> int:
        # level 1 pairs two plain components via echo/echo; deeper levels
        # wrap with echo on the fold side and the projection query on the
        # new component (the wrapped point carries n in its second slot)
        if l == 0:
            return n
        x = triple(echo_idx, echo_idx, n)
        for _ in range(2, l + 1):
            x = pair(pair(echo_idx, p2q_idx), x)
        return x

    return levels, point, {"echo": echo_idx, "proj2": p2q_idx}


def spoil_infimum(gs: list[FiniteTable], h: PartialFn, stages: int,
                  budget: Budget, *, input_bound: int = 63):
    """Pick one canonical meet-fold point per index where the index's
    dialogue over h disagrees with the fold's value; code the fold there.
    """
    if len(gs) != stages + 1:
        raise ConstructionRefused(
            f"need exactly {stages + 1} functions for {stages + 1} stages"
        )
    if stages > 2:
        # the canonical point map rides on the depth-2 projection preload;
        # deeper folds would need in-language iterated unpairing
        raise ConstructionRefused("meet-fold points support at most 3 functions")
    levels, point, idxs = fold_meet(list(gs), budget)
    echo_idx = idxs["echo"]
    certificates = []
    chosen: dict[int, int] = {}
    prev = -1
    for e in range(stages + 1):
        found = None
        for n in range(input_bound + 1):
            x = point(e, n)
            if x <= prev:
                continue
            ans = levels[e].eval(x, budget.oracle_fuel)
            if ans.kind != DEFINED:
                continue
            item = cite(e, h, x, budget)
            out = _outcome(item)
            if out.is_halted and out.value == ans.value:
                continue
            if out.is_exhausted and not out.divergence_certified:
                continue
            value_item = cite(echo_idx, levels[e], x, budget)
            found = (n, x, ans.value, item, value_item, out)
            break
        if found is None:
            certificates.append(
                StageCertificate(e, {"kind": "unknown-blocked", "level": e})
            )
            continue
        n, x, v, item, value_item, out = found
        chosen[x] = v
        prev = x
        certificates.append(
            StageCertificate(
                e,
                {
                    "kind": "diagonal",
                    "level": e,
                    "baseInput": n,
                    "point": x,
                    "value": v,
                    "mismatch": out.classification()[0],
                },
                evidence=[item, value_item],
            )
        )
    result = {
        "points": sorted(chosen.items()),
        "componentIndices": idxs,
        "f": sorted(chosen.items()),
    }
    return result, certificates


# ---------------------------------------------------------------------------
# non-distributivity requirement strategy

def _nd_oracles(state: dict, budget: Budget):
    F = FiniteTable(state["f"])
    G = FiniteTable(state["g"])
    H = FiniteTable(state["h"])
    return F, G, H, Join(F, Meet(G, H, budget))


def _nd_fresh_value(avoid):
    return (avoid + 1) if isinstance(avoid, int) else 1


def nondistributive_stage(e: int, state: dict, budget: Budget, *,
                          round_cap: int = 12, memo_cap: int = 2048):
    """One requirement stage of the non-distributivity construction.

    Drives the adversary index e over f (+) (g meet h) at the triple
    point built from this level's two auxiliary functionals, resolving
    the case tree; always writes the level values so the functionals
    halt with a common value, and advances the level.
    """
    n_e = state["level"]
    psi = codegen.level_functional_program(n_e, 0)
    gamma = codegen.level_functional_program(n_e, 1)
    c, d = encode(psi), encode(gamma)
    x_in = triple(c, d, 0)
    F, G, H, oracle = _nd_oracles(state, budget)
    adversary = decode(e)
    answers: list[int] = []
    evidence = [cite(e, oracle, x_in, budget, memo_cap)]
    action: dict = {
        "kind": "requirement",
        "index": e,
        "level": n_e,
        "psiIndex": c,
        "gammaIndex": d,
        "input": x_in,
        "queriesTakenUp": [],
    }
    case = None
    avoid = None
    g_bit = h_bit = 0
    banned_note = None
    next_level = n_e + 1
    from .machine import CertifiedDivergent, Exhausted, HaltPair, step_functional

    for _round in range(round_cap):
        res = step_functional(adversary, x_in, answers, budget.step_fuel, memo_cap)
        if isinstance(res, CertifiedDivergent):
            case = "1a-divergent"
            break
        if isinstance(res, Exhausted):
            case = "inconclusive-adversary-budget"
            break
        if res.i == 1:
            case, avoid = "1a", res.q
            break
        q = res.q
        action["queriesTakenUp"].append(q)
        if q % 2 == 0:  # query to the f side
            z = q // 2
            t, i, j = untriple(z)
            if t >= n_e:
                case = "1b"
                state["bannedF"].append(z)
                banned_note = {"bannedPoint": [t, i, j]}
                g_bit = h_bit = 1 - i
                next_level = max(n_e, t) + 1
                break
            ans = F.eval(z, budget.oracle_fuel)
            if ans.kind == DEFINED:
                answers.append(ans.value)
                continue
            case = "1a-frozen"  # a small point an earlier stage left undefined
            break
        # query to the meet side
        y3 = q // 2
        a_i, b_i, y = untriple(y3)
        item_a = cite(a_i, G, y, budget, memo_cap)
        item_b = cite(b_i, H, y, budget, memo_cap)
        evidence += [item_a, item_b]
        out_a, out_b = _outcome(item_a), _outcome(item_b)
        if any(
            o.is_exhausted and not o.divergence_certified for o in (out_a, out_b)
        ):
            case = "inconclusive-inner-budget"
            break
        bigs = [
            (side, o.query)
            for side, o in (("g", out_a), ("h", out_b))
            if o.is_frozen and o.query > n_e
        ]
        if bigs:
            case = "2c"
            for side, m in bigs:
                state["bannedG" if side == "g" else "bannedH"].append(m)
            banned_note = {"bannedQueries": bigs}
            next_level = max([n_e] + [m for _, m in bigs]) + 1
            break
        if any(o.is_frozen and o.query < n_e for o in (out_a, out_b)):
            case = "2a-frozen"
            break
        if any(o.divergence_certified for o in (out_a, out_b)):
            case = "2a"
            break
        if out_a.is_halted and out_b.is_halted:
            if out_a.value == out_b.value:
                answers.append(out_a.value)  # case 2b: the round continues
                continue
            case = "2b-unequal"
            break
        # at least one side frozen exactly at this level: four settings
        outs_a, outs_b = {}, {}
        for bit in (0, 1):
            ga = FiniteTable({**state["g"], n_e: bit})
            ha = FiniteTable({**state["h"], n_e: bit})
            ia = cite(a_i, ga, y, budget, memo_cap)
            ib = cite(b_i, ha, y, budget, memo_cap)
            evidence += [ia, ib]
            outs_a[bit] = _outcome(ia)
            outs_b[bit] = _outcome(ib)
        alls = list(outs_a.values()) + list(outs_b.values())
        if any(o.is_exhausted and not o.divergence_certified for o in alls):
            case = "inconclusive-inner-budget"
            break
        diverging = [
            (side, bit)
            for side, outs in (("g", outs_a), ("h", outs_b))
            for bit in (0, 1)
            if outs[bit].divergence_certified
            or (outs[bit].is_frozen and outs[bit].query < n_e)
        ]
        if diverging:
            case = "3a"
            side, bit = diverging[0]
            if side == "g":
                g_bit, h_bit = bit, 0
            else:
                g_bit, h_bit = 0, bit
            break
        freezing_big = [
            (side, bit, outs[bit].query)
            for side, outs in (("g", outs_a), ("h", outs_b))
            for bit in (0, 1)
            if outs[bit].is_frozen and outs[bit].query > n_e
        ]
        if freezing_big:
            case = "3b"
            side, bit, m = freezing_big[0]
            if side == "g":
                g_bit, h_bit = bit, 0
                state["bannedG"].append(m)
            else:
                g_bit, h_bit = 0, bit
                state["bannedH"].append(m)
            banned_note = {"bannedQueries": [[side, m]]}
            next_level = max(n_e, m) + 1
            break
        unequal = [
            (ib, jb)
            for ib in (0, 1)
            for jb in (0, 1)
            if outs_a[ib].value != outs_b[jb].value
        ]
        if unequal:
            case = "3c"
            g_bit, h_bit = unequal[0]
            break
        answers.append(outs_a[0].value)  # case 3d: value settled either way
    else:
        case = "round-cap"
    # write the level so both functionals halt with one fresh value
    state["g"][n_e] = g_bit
    state["h"][n_e] = h_bit
    value = _nd_fresh_value(avoid)
    state["f"][triple(n_e, g_bit, 0)] = value
    state["f"][triple(n_e, h_bit, 1)] = value
    writes = {
        "g": [[n_e, g_bit]],
        "h": [[n_e, h_bit]],
        "f": sorted(
            {triple(n_e, g_bit, 0): value, triple(n_e, h_bit, 1): value}.items()
        ),
    }
    state["level"] = max(next_level, n_e + 1)
    action.update(
        {
            "case": case,
            "levelValue": value,
            "writes": writes,
            "nextLevel": state["level"],
        }
    )
    if banned_note:
        action["constraints"] = banned_note
    return StageCertificate(e, action, evidence)


def nondistributive_check(e: int, cert_action: dict, state: dict, budget: Budget, *,
                          round_cap: int = 12, memo_cap: int = 2048) -> dict:
    """Re-verify one requirement against the final functions.

    Satisfied means: the two functionals halt with a common value while
    the adversary's dialogue at the triple point is frozen, wrong-valued,
    certifiably divergent, or presumed non-halting at the round cap.
    """
    n_e = cert_action["level"]
    psi = codegen.level_functional_program(n_e, 0)
    gamma = codegen.level_functional_program(n_e, 1)
    F, G, H, oracle = _nd_oracles(state, budget)
    psi_out = run_dialogue(psi, Join(F, G), 0, budget, memo_cap)
    gamma_out = run_dialogue(gamma, Join(F, H), 0, budget, memo_cap)
    cap_budget = Budget(budget.step_fuel, round_cap, budget.oracle_fuel)
    adv = cite(e, oracle, cert_action["input"], cap_budget, memo_cap)
    adv_out = _outcome(adv)
    common = (
        psi_out.is_halted
        and gamma_out.is_halted
        and psi_out.value == gamma_out.value
    )
    if not common:
        status = "failed"
    elif adv_out.is_frozen:
        status = "satisfied"
    elif adv_out.is_halted:
        status = "satisfied" if adv_out.value != psi_out.value else "failed"
    elif adv_out.divergence_certified:
        status = "satisfied"
    elif adv_out.reason == "round cap":
        status = "satisfied-presumed"
    else:
        status = "inconclusive"
    return {
        "index": e,
        "status": status,
        "functionalValue": psi_out.value if common else None,
        "adversaryOutcome": adv_out.classification()[0],
        "citations": [adv],
    }


def nondistributive_suite(indices: int, budget: Budget, *, round_cap: int = 12):
    """Run the requirement strategy for e = 0..indices and re-verify each
    stage against the final functions."""
    state = {
        "f": {},
        "g": {},
        "h": {},
        "level": 0,
        "bannedF": [],
        "bannedG": [],
        "bannedH": [],
    }
    certificates = []
    for e in range(indices + 1):
        certificates.append(
            nondistributive_stage(e, state, budget, round_cap=round_cap)
        )
    checks = [
        nondistributive_check(c.stage, c.action, state, budget, round_cap=round_cap)
        for c in certificates
    ]
    satisfied = sum(1 for c in checks if c["status"].startswith("satisfied"))
    result = {
        "state": {
            "f": sorted(state["f"].items()),
            "g": sorted(state["g"].items()),
            "h": sorted(state["h"].items()),
            "level": state["level"],
            "bannedF": sorted(state["bannedF"]),
            "bannedG": sorted(state["bannedG"]),
            "bannedH": sorted(state["bannedH"]),
        },
        "checks": checks,
        "satisfied": satisfied,
        "inconclusive": sum(1 for c in checks if c["status"] == "inconclusive"),
        "failed": sum(1 for c in checks if c["status"] == "failed"),
    }
    return result, certificates


# ---------------------------------------------------------------------------
# transcripts

SCHEMA = "subturing-transcript/1"

_DEF_BUDGET = {"stepFuel": 200_000, "roundCap": 16, "oracleFuel": 50_000}


def _sample_total(bound: int) -> FiniteTable:
    return FiniteTable({n: (3 * n + 5) % 17 for n in range(bound + 1)})


def _scenario_quasiminimal(p):
    f = _sample_total(p["inputBound"])
    return (f, p["stages"], budget_from_json(p["budget"])), {
        "precondition_bound": p["preconditionBound"],
        "input_bound": p["inputBound"],
    }


def _scenario_density(p):
    f = _sample_total(p["inputBound"])
    g = Restriction(f, set(range(0, p["inputBound"] + 1, 2)))
    return (f, g, p["stages"], budget_from_json(p["budget"])), {
        "precondition_bound": p["preconditionBound"],
        "input_bound": p["inputBound"],
    }


def _scenario_antichain(p):
    f = _sample_total(p["inputBound"])
    g = Restriction(f, set(range(0, p["inputBound"] + 1, 2)))
    return (f, g, p["width"], p["stages"], budget_from_json(p["budget"])), {
        "precondition_bound": p["preconditionBound"],
        "input_bound": p["inputBound"],
        "rho_length_bound": p["rhoLengthBound"],
    }


def _scenario_jump_inversion(p):
    h = {int(k): v for k, v in p["h"].items()}
    return (h, p["stages"], budget_from_json(p["budget"])), {
        "value_bound": p["valueBound"],
        "input_bound": p["inputBound"],
    }


def _nested_family(bound: int, count: int):
    f0 = _sample_total(bound)
    gs = []
    for i in range(count):
        dom = set(range(0, bound + 1, 2 ** i))
        gs.append(FiniteTable({n: f0.table[n] for n in sorted(dom)}))
    return gs


def _scenario_sup(p):
    gs = _nested_family(p["inputBound"], p["stages"] + 1)
    h = Join(gs[0], gs[-1])
    # h stands in for an upper bound; only its domain drives the search
    h_table = FiniteTable(
        {n: (h.eval(n, 1000).value if h.eval(n, 1000).kind == DEFINED else 0)
         for n in range(p["inputBound"] + 1)}
    )
    return (gs, h_table, p["stages"], budget_from_json(p["budget"])), {
        "input_bound": p["inputBound"],
    }


def _scenario_inf(p):
    gs = _nested_family(p["inputBound"], p["stages"] + 1)
    h = Restriction(gs[-1], set(range(1, p["inputBound"] + 1, 4)))
    return (gs, h, p["stages"], budget_from_json(p["budget"])), {
        "input_bound": p["inputBound"],
    }


def _scenario_nondistributive(p):
    return (p["indices"], budget_from_json(p["budget"])), {
        "round_cap": p["roundCap"],
    }


CONSTRUCTIONS = {
    "quasiminimal": {
        "builder": build_quasiminimal,
        "scenario": _scenario_quasiminimal,
        "defaults": {
            "stages": 4,
            "budget": _DEF_BUDGET,
            "preconditionBound": 120,
            "inputBound": 63,
        },
    },
    "density": {
        "builder": build_density,
        "scenario": _scenario_density,
        "defaults": {
            "stages": 4,
            "budget": _DEF_BUDGET,
            "preconditionBound": 120,
            "inputBound": 63,
        },
    },
    "antichain": {
        "builder": build_antichain,
        "scenario": _scenario_antichain,
        "defaults": {
            "width": 2,
            "stages": 2,
            "budget": _DEF_BUDGET,
            "preconditionBound": 120,
            "inputBound": 63,
            "rhoLengthBound": 6,
        },
    },
    "jump-inversion": {
        "builder": build_jump_inversion,
        "scenario": _scenario_jump_inversion,
        "defaults": {
            "stages": 4,
            "budget": _DEF_BUDGET,
            "h": {"0": 3, "1": 1, "2": 0, "3": 2, "4": 1},
            "valueBound": 3,
            "inputBound": 4,
        },
    },
    "sup-spoiler": {
        "builder": spoil_supremum,
        "scenario": _scenario_sup,
        "defaults": {"stages": 2, "budget": _DEF_BUDGET, "inputBound": 31},
    },
    "inf-spoiler": {
        "builder": spoil_infimum,
        "scenario": _scenario_inf,
        "defaults": {"stages": 2, "budget": _DEF_BUDGET, "inputBound": 31},
    },
    "nondistributive": {
        "builder": nondistributive_suite,
        "scenario": _scenario_nondistributive,
        "defaults": {"indices": 8, "budget": _DEF_BUDGET, "roundCap": 12},
    },
}


def run_construction(name: str, overrides: dict | None = None) -> dict:
    """Execute a named construction scenario; returns the transcript object."""
    from . import __version__

    if name not in CONSTRUCTIONS:
        raise KeyError(name)
    spec = CONSTRUCTIONS[name]
    params = json.loads(json.dumps(spec["defaults"]))
    if overrides:
        params.update(overrides)
    args, kwargs = spec["scenario"](params)
    result, certificates = spec["builder"](*args, **kwargs)
    return {
        "schema": SCHEMA,
        "construction": name,
        "parameters": params,
        "version": __version__,
        "certificates": [c.to_json() for c in certificates],
        "result": result,
    }


def dumps_transcript(t: dict) -> str:
    return json.dumps(t, sort_keys=True, separators=(",", ":")) + "\n"


def replay_transcript(t: dict) -> tuple[bool, list[str]]:
    """Re-execute a transcript and validate it.

    Two independent checks: the construction is re-run from the header
    parameters and must reproduce the transcript byte for byte, and every
    evidence citation is re-executed on its own and must reproduce its
    recorded outcome.
    """
    messages = []
    try:
        fresh = run_construction(t["construction"], t.get("parameters"))
    except Exception as exc:  # refused or malformed parameters
        return False, [f"re-run failed: {exc}"]
    if dumps_transcript(fresh) != dumps_transcript(t):
        for i, (a, b) in enumerate(zip(t.get("certificates", []), fresh["certificates"])):
            if a != b:
                messages.append(f"certificate {i} differs on re-run")
                break
        else:
            messages.append("transcript differs on re-run")
        return False, messages
    bad = 0
    for i, cert in enumerate(t["certificates"]):
        for item in cert.get("evidence", []):
            if not replay_citation(item):
                messages.append(f"stage {cert.get('stage')} evidence mismatch")
                bad += 1
        for entry in cert.get("boundedOracleAnswers", []):
            item = entry.get("citation")
            if item is not None and not replay_citation(item):
                messages.append(f"stage {cert.get('stage')} oracle answer mismatch")
                bad += 1
    if bad:
        return False, messages
    return True, [f"replayed {len(t['certificates'])} certificates"]
