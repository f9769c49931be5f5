"""Partial functions on the naturals and the degree algebra over them.

Oracles answer three ways: Defined(v), Undefined, or Unknown when a
budget ran out before the question settled.  Undefined is semantic (the
dialogue executor freezes on it); Unknown is a desk-scale artifact and
is mapped to budget exhaustion, never to a freeze.

Representation variants:

  FiniteTable      explicit finite map; never Unknown
  TotalByProgram   a program run over the empty oracle, with a certified
                   input range established by pre-running
  Restriction      base restricted to a finite set or a 0/1 predicate
                   program (run over the empty oracle)
  Join             (f+g)(2n) = f(n), (f+g)(2n+1) = g(n)
  Meet             defined at <d,e,n> = pair(pair(d,e),n) where the two
                   dialogues against the sides halt with a common value
  GraphOf          the 0/1 graph oracle of the base function
  JumpOf           the relative halting oracle of the base (K, or K0
                   when frozen queries count as 0)
  DialogueOf       the lazy oracle x -> dialogue of decode(index) at x
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .coding import pair, unpair
from .machine import (
    Budget,
    DEFAULT_BUDGET,
    DEFAULT_MEMO_CAP,
    DialogueOutcome,
    OracleAnswer,
    Program,
    run_dialogue,
)
from . import codegen, numbering
from .numbering import decode, encode, inflation_index, monotone_transfer

DEFINED = "defined"
UNDEFINED = "undefined"
UNKNOWN = "unknown"

_DEF = OracleAnswer(DEFINED, 0)
_UNDEF = OracleAnswer(UNDEFINED)
_UNK = OracleAnswer(UNKNOWN)


def budget_to_json(b: Budget) -> dict:
    return {"stepFuel": b.step_fuel, "roundCap": b.round_cap, "oracleFuel": b.oracle_fuel}


def budget_from_json(obj: dict) -> Budget:
    return Budget(obj["stepFuel"], obj["roundCap"], obj["oracleFuel"])


class PartialFn:
    """Base class; subclasses implement eval(n, fuel) -> OracleAnswer."""

    def eval(self, n: int, fuel: int) -> OracleAnswer:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other):
        return type(self) is type(other) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.dumps())

    def __repr__(self):
        return f"{type(self).__name__}({self.dumps()})"


class FiniteTable(PartialFn):
    def __init__(self, table: dict[int, int]):
        self.table = {int(k): int(v) for k, v in table.items()}

    def eval(self, n, fuel):
        v = self.table.get(n)
        return OracleAnswer(DEFINED, v) if v is not None else _UNDEF

    def domain(self) -> list[int]:
        return sorted(self.table)

    def to_json(self):
        return {"kind": "finite_table", "pairs": [[n, self.table[n]] for n in sorted(self.table)]}


EMPTY = FiniteTable({})


class TotalByProgram(PartialFn):
    """A program evaluated over the empty oracle on a certified range."""

    def __init__(self, index: int, per_input_fuel: int, certified: dict[int, int]):
        self.index = index
        self.per_input_fuel = per_input_fuel
        self.certified = dict(certified)

    @classmethod
    def certify(cls, index: int, inputs, per_input_fuel: int) -> "TotalByProgram":
        """Pre-run the program on each input; every run must halt."""
        prog = decode(index)
        budget = Budget(per_input_fuel, 1, 1)
        table = {}
        for n in inputs:
            out = run_dialogue(prog, EMPTY, n, budget)
            if not out.is_halted:
                raise ValueError(f"input {n} did not halt within {per_input_fuel} steps")
            table[n] = out.value
        return cls(index, per_input_fuel, table)

    def eval(self, n, fuel):
        v = self.certified.get(n)
        return OracleAnswer(DEFINED, v) if v is not None else _UNK

    def to_json(self):
        return {
            "kind": "total_by_program",
            "index": self.index,
            "fuel": self.per_input_fuel,
            "certified": [[n, self.certified[n]] for n in sorted(self.certified)],
        }


class Restriction(PartialFn):
    def __init__(self, base: PartialFn, domain, predicate_fuel: int | None = None):
        self.base = base
        if isinstance(domain, (set, frozenset, list, tuple)):
            self.domain_set: frozenset | None = frozenset(domain)
            self.predicate_index = None
            self.predicate_fuel = None
        else:
            self.domain_set = None
            self.predicate_index = int(domain)
            self.predicate_fuel = predicate_fuel or DEFAULT_BUDGET.step_fuel
            self._predicate = decode(self.predicate_index)

    def _member(self, n, fuel) -> OracleAnswer:
        if self.domain_set is not None:
            return OracleAnswer(DEFINED, 1 if n in self.domain_set else 0)
        out = run_dialogue(
            self._predicate, EMPTY, n, Budget(self.predicate_fuel, 1, 1)
        )
        if out.is_halted:
            return OracleAnswer(DEFINED, 0 if out.value == 0 else 1)
        return _UNK

    def eval(self, n, fuel):
        m = self._member(n, fuel)
        if m.kind == UNKNOWN:
            return _UNK
        if m.value == 0:
            return _UNDEF
        return self.base.eval(n, fuel)

    def to_json(self):
        if self.domain_set is not None:
            dom = {"set": sorted(self.domain_set)}
        else:
            dom = {"predicate": self.predicate_index, "fuel": self.predicate_fuel}
        return {"kind": "restriction", "base": self.base.to_json(), "domain": dom}


class Join(PartialFn):
    def __init__(self, left: PartialFn, right: PartialFn):
        self.left = left
        self.right = right

    def eval(self, n, fuel):
        side, m = n & 1, n >> 1
        return (self.right if side else self.left).eval(m, fuel)

    def to_json(self):
        return {"kind": "join", "left": self.left.to_json(), "right": self.right.to_json()}


class Meet(PartialFn):
    """Defined at <d,e,n> with value v iff both side dialogues halt at v.

    One step-fuel pool is shared across the two inner dialogues (left
    runs first); unequal halts, freezes and certified divergence make
    the point Undefined, budget exhaustion makes it Unknown.
    """

    def __init__(self, left: PartialFn, right: PartialFn, budget: Budget = DEFAULT_BUDGET):
        self.left = left
        self.right = right
        self.budget = budget
        self._memo: dict[int, OracleAnswer] = {}

    def eval(self, n, fuel):
        hit = self._memo.get(n)
        if hit is not None:
            return hit
        de, x = unpair(n)
        d, e = unpair(de)
        b = self.budget
        out_l = run_dialogue(decode(d), self.left, x, b)
        if out_l.is_exhausted and not out_l.divergence_certified:
            ans = _UNK
        elif not out_l.is_halted:
            ans = _UNDEF  # frozen or certified divergence settles the point
        else:
            remaining = b.step_fuel - out_l.steps
            if remaining <= 0:
                ans = _UNK
            else:
                out_r = run_dialogue(
                    decode(e),
                    self.right,
                    x,
                    Budget(remaining, b.round_cap, b.oracle_fuel),
                )
                if out_r.is_exhausted and not out_r.divergence_certified:
                    ans = _UNK
                elif out_r.is_halted and out_r.value == out_l.value:
                    ans = OracleAnswer(DEFINED, out_l.value)
                else:
                    ans = _UNDEF
        self._memo[n] = ans
        return ans

    def to_json(self):
        return {
            "kind": "meet",
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "budget": budget_to_json(self.budget),
        }


class GraphOf(PartialFn):
    """g(pair(n, m)) = 1 if base(n) = m, 0 if base(n) defined and != m."""

    def __init__(self, base: PartialFn):
        self.base = base

    def eval(self, z, fuel):
        n, m = unpair(z)
        ans = self.base.eval(n, fuel)
        if ans.kind != DEFINED:
            return ans
        return OracleAnswer(DEFINED, 1 if ans.value == m else 0)

    def to_json(self):
        return {"kind": "graph", "base": self.base.to_json()}


class JumpOf(PartialFn):
    """The relative halting oracle of the base function.

    eval(e) = 1 when the dialogue of decode(e) at input e halts, 0 when
    it certifiably diverges with every query answered; a frozen dialogue
    is Undefined for K and 0 for K0; anything budget-limited is Unknown.
    """

    def __init__(self, base: PartialFn, budget: Budget = DEFAULT_BUDGET, zero_on_frozen: bool = False):
        self.base = base
        self.budget = budget
        self.zero_on_frozen = zero_on_frozen
        self._memo: dict[int, OracleAnswer] = {}

    def eval(self, e, fuel):
        hit = self._memo.get(e)
        if hit is None:
            ans = k_jump(self.base, e, self.budget)
            if ans.kind == "One":
                hit = OracleAnswer(DEFINED, 1)
            elif ans.kind == "ZeroCertified":
                hit = OracleAnswer(DEFINED, 0)
            elif ans.kind == "UndefinedFrozen":
                hit = OracleAnswer(DEFINED, 0) if self.zero_on_frozen else _UNDEF
            else:
                hit = _UNK
            self._memo[e] = hit
        return hit

    def to_json(self):
        return {
            "kind": "jump",
            "base": self.base.to_json(),
            "budget": budget_to_json(self.budget),
            "operator": "K0" if self.zero_on_frozen else "K",
        }


class DialogueOf(PartialFn):
    """Lazy oracle x -> dialogue of decode(index) over base at x."""

    def __init__(self, index: int, base: PartialFn, budget: Budget = DEFAULT_BUDGET):
        self.index = index
        self.base = base
        self.budget = budget
        self._program = decode(index)
        self._memo: dict[int, OracleAnswer] = {}

    def eval(self, n, fuel):
        hit = self._memo.get(n)
        if hit is None:
            out = run_dialogue(self._program, self.base, n, self.budget)
            if out.is_halted:
                hit = OracleAnswer(DEFINED, out.value)
            elif out.is_frozen or out.divergence_certified:
                hit = _UNDEF
            else:
                hit = _UNK
            self._memo[n] = hit
        return hit

    def to_json(self):
        return {
            "kind": "dialogue",
            "index": self.index,
            "base": self.base.to_json(),
            "budget": budget_to_json(self.budget),
        }


_KINDS = {}


def from_json(obj: dict) -> PartialFn:
    kind = obj["kind"]
    if kind == "finite_table":
        return FiniteTable(dict(map(tuple, obj["pairs"])))
    if kind == "total_by_program":
        return TotalByProgram(obj["index"], obj["fuel"], dict(map(tuple, obj["certified"])))
    if kind == "restriction":
        dom = obj["domain"]
        if "set" in dom:
            return Restriction(from_json(obj["base"]), set(dom["set"]))
        return Restriction(from_json(obj["base"]), dom["predicate"], dom["fuel"])
    if kind == "join":
        return Join(from_json(obj["left"]), from_json(obj["right"]))
    if kind == "meet":
        return Meet(from_json(obj["left"]), from_json(obj["right"]), budget_from_json(obj["budget"]))
    if kind == "graph":
        return GraphOf(from_json(obj["base"]))
    if kind == "jump":
        return JumpOf(from_json(obj["base"]), budget_from_json(obj["budget"]), obj["operator"] == "K0")
    if kind == "dialogue":
        return DialogueOf(obj["index"], from_json(obj["base"]), budget_from_json(obj["budget"]))
    raise ValueError(f"unknown oracle kind {kind!r}")


# ---------------------------------------------------------------------------
# operations

def restrict(f: PartialFn, domain, predicate_fuel: int | None = None) -> Restriction:
    return Restriction(f, domain, predicate_fuel)


def join(f: PartialFn, g: PartialFn) -> Join:
    return Join(f, g)


def meet(f: PartialFn, g: PartialFn, budget: Budget = DEFAULT_BUDGET) -> Meet:
    return Meet(f, g, budget)


def graph_encode(f: PartialFn) -> GraphOf:
    return GraphOf(f)


def meet_point(d: int, e: int, n: int) -> int:
    return pair(pair(d, e), n)


_WITNESSES: dict[str, Program] | None = None


def canonical_witnesses() -> dict[str, Program]:
    """The named reduction programs the lattice laws are verified with."""
    global _WITNESSES
    if _WITNESSES is None:
        _WITNESSES = {
            "echo": codegen.echo_program(),
            "graph_fwd": codegen.graph_forward_witness(),
            "graph_bwd": codegen.graph_backward_witness(),
            "join_left": codegen.join_left_witness(),
            "join_right": codegen.join_right_witness(),
            "meet_left": codegen.universal_sim("left"),
            "meet_right": codegen.universal_sim("right"),
        }
    return _WITNESSES


def meet_universality(d: int, e: int) -> Program:
    """Given h <= f via d and h <= g via e, a program reducing h to meet(f, g)."""
    return codegen.meet_universality_program(d, e)


def program_for_table(f: FiniteTable) -> Program:
    """An oracle-free program computing the finite function f."""
    return codegen.finite_table_program(f.table)


# ---------------------------------------------------------------------------
# jump operators

@dataclass(frozen=True)
class JumpAnswer:
    """Four-way halting classification of decode(e) over f at input e."""

    kind: str  # "One" | "ZeroCertified" | "UndefinedFrozen" | "Unknown"
    operator: str  # "K" | "K0"
    query: int | None = None  # the frozen query, when UndefinedFrozen
    reason: str | None = None  # the budget reason, when Unknown
    evidence: DialogueOutcome | None = None

    def value(self) -> int | None:
        """The oracle value this answer denotes (None = undefined/unknown)."""
        if self.kind == "One":
            return 1
        if self.kind == "ZeroCertified":
            return 0
        if self.kind == "UndefinedFrozen" and self.operator == "K0":
            return 0
        return None

    def stable(self) -> bool:
        return self.kind in ("One", "ZeroCertified", "UndefinedFrozen")


def _jump(f: PartialFn, e: int, budget: Budget, operator: str, memo_cap: int) -> JumpAnswer:
    out = run_dialogue(decode(e), f, e, budget, memo_cap)
    if out.is_halted:
        return JumpAnswer("One", operator, evidence=out)
    if out.is_frozen:
        return JumpAnswer("UndefinedFrozen", operator, query=out.query, evidence=out)
    if out.divergence_certified:
        # every trace query was answered, so the dialogue never left dom(f)
        return JumpAnswer("ZeroCertified", operator, evidence=out)
    return JumpAnswer("Unknown", operator, reason=out.reason, evidence=out)


def k_jump(f: PartialFn, e: int, budget: Budget = DEFAULT_BUDGET, memo_cap: int = DEFAULT_MEMO_CAP) -> JumpAnswer:
    """The freeze-respecting relative halting problem."""
    return _jump(f, e, budget, "K", memo_cap)


def k0(f: PartialFn, e: int, budget: Budget = DEFAULT_BUDGET, memo_cap: int = DEFAULT_MEMO_CAP) -> JumpAnswer:
    """The plain relative halting problem: frozen counts as not halting."""
    return _jump(f, e, budget, "K0", memo_cap)


def k_oracle(f: PartialFn, budget: Budget = DEFAULT_BUDGET) -> JumpOf:
    return JumpOf(f, budget, zero_on_frozen=False)


def k0_oracle(f: PartialFn, budget: Budget = DEFAULT_BUDGET) -> JumpOf:
    return JumpOf(f, budget, zero_on_frozen=True)
