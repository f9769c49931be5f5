"""Bounded verification and search for reductions between partial functions.

A reduction claim "f reduces to g via p" is only ever checked on a
finite input set at a budget; a refutation therefore quantifies over
program indices below an explicit bound at that budget and never claims
more.  Reports carry the full dialogue evidence so they can be re-run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .machine import Budget, DEFAULT_MEMO_CAP, DialogueOutcome, Program, run_dialogue
from .numbering import decode, encode, enumerate_programs
from .partialfn import (
    DEFINED,
    UNDEFINED,
    UNKNOWN,
    Join,
    PartialFn,
    Restriction,
    budget_from_json,
    budget_to_json,
    from_json as oracle_from_json,
)
from . import codegen


@dataclass(frozen=True)
class ReductionWitness:
    """A program index verified to compute f over g on a tested domain."""

    program_index: int
    tested_domain: tuple[int, ...]
    budget: Budget
    per_input: tuple[tuple[int, DialogueOutcome], ...]  # n -> outcome, sorted

    def program(self) -> Program:
        return decode(self.program_index)

    def to_json(self) -> dict:
        return {
            "schema": "reduction_witness/1",
            "programIndex": self.program_index,
            "testedDomain": list(self.tested_domain),
            "budget": budget_to_json(self.budget),
            "perInput": [[n, out.to_json()] for n, out in self.per_input],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ReductionWitness":
        return cls(
            obj["programIndex"],
            tuple(obj["testedDomain"]),
            budget_from_json(obj["budget"]),
            tuple(
                (n, DialogueOutcome.from_json(o)) for n, o in obj["perInput"]
            ),
        )


@dataclass(frozen=True)
class VerificationFailure:
    """Why a candidate program is not a witness on the tested domain.

    kind "refuted" pinpoints a counterexample input; "inconclusive" means
    a budget ran out before the input settled (distinct from refutation).
    """

    kind: str  # "refuted" | "inconclusive"
    input: int
    expected: int | None
    outcome: DialogueOutcome | None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "input": self.input,
            "expected": self.expected,
            "outcome": None if self.outcome is None else self.outcome.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "VerificationFailure":
        out = obj["outcome"]
        return cls(
            obj["kind"],
            obj["input"],
            obj["expected"],
            None if out is None else DialogueOutcome.from_json(out),
        )


@dataclass(frozen=True)
class NonReductionCertificate:
    """Per-index refutations for every index below the bound at the budget.

    Indices whose failure was merely inconclusive are flagged and counted;
    a certificate with zero unknowns is an exact statement about all
    programs of index < index_bound at this budget on this domain.
    """

    index_bound: int
    tested_domain: tuple[int, ...]
    budget: Budget
    per_index: tuple[tuple[int, VerificationFailure], ...]

    @property
    def unknown_count(self) -> int:
        return sum(1 for _, fl in self.per_index if fl.kind == "inconclusive")

    def to_json(self) -> dict:
        return {
            "schema": "non_reduction_certificate/1",
            "indexBound": self.index_bound,
            "testedDomain": list(self.tested_domain),
            "budget": budget_to_json(self.budget),
            "perIndex": [[e, fl.to_json()] for e, fl in self.per_index],
            "unknownCount": self.unknown_count,
        }

    @classmethod
    def from_json(cls, obj) -> "NonReductionCertificate":
        return cls(
            obj["indexBound"],
            tuple(obj["testedDomain"]),
            budget_from_json(obj["budget"]),
            tuple(
                (e, VerificationFailure.from_json(fl)) for e, fl in obj["perIndex"]
            ),
        )


def _target_values(f: PartialFn, domain, budget: Budget):
    """f's Defined values on the domain; Unknown is a precondition breach."""
    values = {}
    for n in sorted(domain):
        ans = f.eval(n, budget.oracle_fuel)
        if ans.kind == UNKNOWN:
            return None, n
        if ans.kind == DEFINED:
            values[n] = ans.value
    return values, None


def verify_reduction(
    p: Program,
    f: PartialFn,
    g: PartialFn,
    domain,
    budget: Budget,
    memo_cap: int = DEFAULT_MEMO_CAP,
):
    """Check that p's dialogue over g computes f on domain & dom(f).

    Returns a ReductionWitness, or the first VerificationFailure in
    ascending input order.
    """
    values, stuck = _target_values(f, domain, budget)
    if values is None:
        return VerificationFailure("inconclusive", stuck, None, None)
    per_input = []
    for n in sorted(values):
        expected = values[n]
        out = run_dialogue(p, g, n, budget, memo_cap)
        if out.is_halted and out.value == expected:
            per_input.append((n, out))
        elif out.is_exhausted and not out.divergence_certified:
            return VerificationFailure("inconclusive", n, expected, out)
        else:
            return VerificationFailure("refuted", n, expected, out)
    return ReductionWitness(encode(p), tuple(sorted(domain)), budget, tuple(per_input))


def search_reduction(
    f: PartialFn,
    g: PartialFn,
    index_bound: int,
    domain,
    budget: Budget,
    memo_cap: int = DEFAULT_MEMO_CAP,
    jobs: int = 1,
):
    """Least-index verified witness for f <= g, else a refutation
    certificate covering every index below the bound.

    Deterministic: ascending index, ascending input, fail-fast per index.
    With jobs > 1 the per-index checks run in a thread pool in chunks,
    merged in index order, so the report bytes never depend on jobs.
    """
    values, stuck = _target_values(f, domain, budget)
    if values is None:
        raise ValueError(f"f is Unknown at {stuck} on the tested domain")
    inputs = sorted(values)

    def check(e_p):
        e, p = e_p
        per_input = []
        for n in inputs:
            out = run_dialogue(p, g, n, budget, memo_cap)
            if out.is_halted and out.value == values[n]:
                per_input.append((n, out))
                continue
            kind = (
                "inconclusive"
                if out.is_exhausted and not out.divergence_certified
                else "refuted"
            )
            return e, VerificationFailure(kind, n, values[n], out), None
        return e, None, ReductionWitness(e, tuple(inputs), budget, tuple(per_input))

    gen = enumerate_programs()
    failures = []

    def finish(results):
        for e, failure, witness in results:
            if witness is not None:
                return witness
            failures.append((e, failure))
        return None

    if jobs <= 1:
        for e in range(index_bound):
            res = finish([check(next(gen))])
            if res is not None:
                return res
    else:
        from concurrent.futures import ThreadPoolExecutor

        chunk = max(jobs * 4, 16)
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            done = 0
            while done < index_bound:
                batch = [next(gen) for _ in range(min(chunk, index_bound - done))]
                done += len(batch)
                res = finish(list(ex.map(check, batch)))
                if res is not None:
                    return res
    return NonReductionCertificate(
        index_bound, tuple(inputs), budget, tuple(failures)
    )


@dataclass(frozen=True)
class EquivalenceReport:
    forward: ReductionWitness | NonReductionCertificate
    backward: ReductionWitness | NonReductionCertificate

    @property
    def equivalent_at_bound(self) -> bool:
        return isinstance(self.forward, ReductionWitness) and isinstance(
            self.backward, ReductionWitness
        )

    def to_json(self) -> dict:
        return {
            "schema": "equivalence_report/1",
            "forward": self.forward.to_json(),
            "backward": self.backward.to_json(),
            "equivalentAtBound": self.equivalent_at_bound,
        }


def check_equivalence(
    f: PartialFn, g: PartialFn, index_bound: int, domain, budget: Budget
) -> EquivalenceReport:
    """Both directions of the reducibility check at one bound."""
    return EquivalenceReport(
        forward=search_reduction(f, g, index_bound, domain, budget),
        backward=search_reduction(g, f, index_bound, domain, budget),
    )


def trace_queries(
    p: Program,
    g: PartialFn,
    domain,
    budget: Budget,
    side: str | None = None,
    memo_cap: int = DEFAULT_MEMO_CAP,
):
    """Answered query sets of p's dialogues over g, per input and unioned.

    side "left" keeps even queries (halved), side "right" odd queries
    (halved): the two components of a join oracle.  The union covers the
    inputs whose dialogue halted (the ones a reduction claim is about).
    """
    per_input = {}
    union = set()
    for n in sorted(domain):
        out = run_dialogue(p, g, n, budget, memo_cap)
        qs = set()
        for q, _ in out.trace:
            if side is None:
                qs.add(q)
            elif side == "left" and q % 2 == 0:
                qs.add(q // 2)
            elif side == "right" and q % 2 == 1:
                qs.add(q // 2)
        per_input[n] = tuple(sorted(qs))
        if out.is_halted:
            union |= qs
    return per_input, tuple(sorted(union))


def anti_cupping_replay(
    p: Program,
    g: PartialFn,
    f: PartialFn,
    beta: PartialFn,
    domain,
    budget: Budget,
):
    """The two-step localization behind the anti-cupping mechanism.

    Given a verified witness p for g <= f (+) beta on the domain:
      1. restrict the left side to the traced query union Q and re-verify;
      2. bake f|Q into p, producing a beta-only program, and verify that.

    Returns (Q, step1, step2); each step is a witness or a failure.
    """
    relevant = [
        n for n in sorted(domain) if g.eval(n, budget.oracle_fuel).kind == DEFINED
    ]
    _, union = trace_queries(p, Join(f, beta), relevant, budget, side="left")
    restricted = Join(Restriction(f, set(union)), beta)
    step1 = verify_reduction(p, g, restricted, domain, budget)
    table = {}
    for q in union:
        ans = f.eval(q, budget.oracle_fuel)
        if ans.kind == DEFINED:
            table[q] = ans.value
    localized = codegen.hardcode_join_left(p, table)
    step2 = verify_reduction(localized, g, beta, domain, budget)
    return union, step1, step2


def ce_enumerate(e: int, f: PartialFn, input_bound: int, budget: Budget) -> tuple[int, ...]:
    """Bounded enumeration of the e-th relatively enumerable set over f:
    the inputs <= input_bound whose dialogue halts within the budget.

    Dovetailed round-robin with doubling fuel slices, so early inputs
    cannot starve later ones; by budget stability of halting the result
    equals independent full-budget runs.
    """
    p = decode(e)
    found = set()
    pending = set(range(input_bound + 1))
    slice_fuel = 64
    while True:
        slice_fuel = min(slice_fuel, budget.step_fuel)
        b = Budget(slice_fuel, budget.round_cap, budget.oracle_fuel)
        for n in sorted(pending):
            out = run_dialogue(p, f, n, b)
            if out.is_halted:
                found.add(n)
        pending -= found
        if slice_fuel == budget.step_fuel or not pending:
            break
        slice_fuel *= 2
    return tuple(sorted(found))


def witness_or_certificate_from_json(obj: dict):
    schema = obj.get("schema", "")
    if schema.startswith("reduction_witness"):
        return ReductionWitness.from_json(obj)
    if schema.startswith("non_reduction_certificate"):
        return NonReductionCertificate.from_json(obj)
    raise ValueError(f"unknown schema {schema!r}")
