"""The five-instruction register machine and the sequential dialogue executor.

Machine model
-------------
Instructions: INC r | DECJ r L | JMP L | HALT r | NOP.  Registers hold
naturals and are addressed statically; execution starts at instruction 0.
Falling off the end of the program (or jumping past it) is divergence,
never an implicit halt.

Dialogue protocol
-----------------
A program is re-run from scratch on (n, a_0..a_{s-1}) each round.  When
the machine halts with output w, the bit pair w = <i, q> is decoded:
i = 1 halts the dialogue with value q; i = 0 emits the query q, which
the oracle must answer before the next round.  A query outside the
oracle's domain freezes the dialogue forever.

Input presentation
------------------
The tuple (n, answers) is presented in the register file as:

    r0 = s                  number of answers so far
    r1 = 2n if s = 0        the "ready reply": encoded query-the-input,
         else 2*a_last + 1  or encoded return-the-last-answer
    r2 = n
    r3 = 2n
    r4 = 2n + 1
    r5 = a_last (0 if s = 0)
    r6 = pi1(n)   r7 = pi2(n)          Cantor projections of the input
    r8 = pi1(pi1(n))   r9 = pi2(pi1(n))
    r10+i = a_i for i < s

All other registers start at 0.  The projections make nested pair
inputs unpackable at unit cost; unary Cantor unpairing would otherwise
dominate every structured witness program.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .coding import unpair

# opcodes (internal representation; the numbering tags live in numbering.py)
DECJ, HALT, INC, JMP, NOP = 0, 1, 2, 3, 4

_NAMES = {DECJ: "DECJ", HALT: "HALT", INC: "INC", JMP: "JMP", NOP: "NOP"}

DEFAULT_MEMO_CAP = 256


class Instr(NamedTuple):
    op: int
    a: int = 0
    b: int = 0


def inc(r: int) -> Instr:
    return Instr(INC, r)


def decj(r: int, target: int) -> Instr:
    return Instr(DECJ, r, target)


def jmp(target: int) -> Instr:
    return Instr(JMP, target)


def halt(r: int) -> Instr:
    return Instr(HALT, r)


def nop() -> Instr:
    return Instr(NOP)


class Program:
    """An immutable instruction list with cached static metadata."""

    __slots__ = ("instructions", "max_register")

    def __init__(self, instructions: Iterable[Instr]):
        ins = tuple(instructions)
        if any(type(i) is not Instr for i in ins):
            ins = tuple(i if isinstance(i, Instr) else Instr(*i) for i in ins)
        max_reg = 0
        for op, a, b in ins:
            if op not in _NAMES or a < 0 or b < 0:
                raise ValueError(f"bad instruction ({op}, {a}, {b})")
            if op != JMP and op != NOP and a > max_reg:
                max_reg = a
        object.__setattr__(self, "instructions", ins)
        object.__setattr__(self, "max_register", max_reg)

    def __setattr__(self, *_):
        raise AttributeError("Program is immutable")

    def __len__(self):
        return len(self.instructions)

    def __eq__(self, other):
        return isinstance(other, Program) and self.instructions == other.instructions

    def __hash__(self):
        return hash(self.instructions)

    def __repr__(self):
        return f"Program({len(self.instructions)} instrs)"

    @property
    def text(self) -> str:
        return format_program(self)


def format_program(p: Program) -> str:
    lines = []
    for i in p.instructions:
        if i.op == INC:
            lines.append(f"INC r{i.a}")
        elif i.op == DECJ:
            lines.append(f"DECJ r{i.a} {i.b}")
        elif i.op == JMP:
            lines.append(f"JMP {i.a}")
        elif i.op == HALT:
            lines.append(f"HALT r{i.a}")
        else:
            lines.append("NOP")
    return "\n".join(lines) + "\n"


def _reg(tok: str) -> int:
    if not tok.startswith("r"):
        raise ValueError(f"expected register, got {tok!r}")
    return int(tok[1:])


def parse_program(text: str) -> Program:
    """Parse the text format: `INC r`, `DECJ r L`, `JMP L`, `HALT r`, `NOP`;
    `#` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        name = parts[0].upper()
        try:
            if name == "INC":
                out.append(inc(_reg(parts[1])))
            elif name == "DECJ":
                out.append(decj(_reg(parts[1]), int(parts[2])))
            elif name == "JMP":
                out.append(jmp(int(parts[1])))
            elif name == "HALT":
                out.append(halt(_reg(parts[1])))
            elif name == "NOP":
                out.append(nop())
            else:
                raise ValueError(f"unknown instruction {name!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return Program(out)


# ---------------------------------------------------------------------------
# results

@dataclass(frozen=True)
class HaltPair:
    i: int
    q: int


@dataclass(frozen=True)
class Exhausted:
    steps: int


@dataclass(frozen=True)
class CertifiedDivergent:
    pass


class OracleAnswer(NamedTuple):
    """Three-way oracle verdict: 'defined' (with value), 'undefined', 'unknown'."""

    kind: str
    value: int = 0


DEFINED = "defined"
UNDEFINED = "undefined"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Budget:
    step_fuel: int
    round_cap: int
    oracle_fuel: int

    def __post_init__(self):
        if self.step_fuel <= 0 or self.round_cap <= 0 or self.oracle_fuel <= 0:
            raise ValueError("budget fields must be strictly positive")


DEFAULT_BUDGET = Budget(step_fuel=200_000, round_cap=64, oracle_fuel=50_000)


@dataclass(frozen=True)
class DialogueOutcome:
    """Result of a dialogue run plus the full answered-query trace."""

    outcome: str  # "halted" | "frozen" | "exhausted"
    value: int | None = None
    query: int | None = None
    reason: str | None = None  # "step budget" | "round cap" | "oracle budget"
    divergence_certified: bool = False
    trace: tuple[tuple[int, int], ...] = ()
    steps: int = 0

    @property
    def is_halted(self) -> bool:
        return self.outcome == "halted"

    @property
    def is_frozen(self) -> bool:
        return self.outcome == "frozen"

    @property
    def is_exhausted(self) -> bool:
        return self.outcome == "exhausted"

    def classification(self) -> tuple:
        """Outcome kind with its payload; budget-stable for halted/frozen."""
        if self.outcome == "halted":
            return ("halted", self.value)
        if self.outcome == "frozen":
            return ("frozen", self.query)
        return ("exhausted", self.reason, self.divergence_certified)

    def to_json(self) -> dict:
        out: dict = {"outcome": self.outcome}
        if self.outcome == "halted":
            out["value"] = self.value
        elif self.outcome == "frozen":
            out["query"] = self.query
        else:
            out["reason"] = self.reason
            out["divergenceCertified"] = self.divergence_certified
        out["trace"] = [[q, a] for q, a in self.trace]
        out["steps"] = self.steps
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "DialogueOutcome":
        return cls(
            outcome=obj["outcome"],
            value=obj.get("value"),
            query=obj.get("query"),
            reason=obj.get("reason"),
            divergence_certified=obj.get("divergenceCertified", False),
            trace=tuple((q, a) for q, a in obj["trace"]),
            steps=obj["steps"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# execution

def input_registers(program: Program, n: int, answers) -> list[int]:
    s = len(answers)
    size = max(program.max_register + 1, 10 + s)
    regs = [0] * size
    regs[0] = s
    regs[1] = 2 * n if s == 0 else 2 * answers[-1] + 1
    regs[2] = n
    regs[3] = 2 * n
    regs[4] = 2 * n + 1
    if s:
        regs[5] = answers[-1]
    p1, p2 = unpair(n)
    regs[6] = p1
    regs[7] = p2
    regs[8], regs[9] = unpair(p1)
    for i, a in enumerate(answers):
        regs[10 + i] = a
    return regs


def _execute(program: Program, n: int, answers, fuel: int, memo_cap: int):
    """Machine run returning (HaltPair | Exhausted | CertifiedDivergent, used)."""
    instrs = program.instructions
    nins = len(instrs)
    regs = input_registers(program, n, answers)
    pc = 0
    used = 0
    seen: set = set()
    checking = memo_cap > 0
    while True:
        if pc >= nins:
            return CertifiedDivergent(), used
        if checking:
            snap = (pc, tuple(regs))
            if snap in seen:
                return CertifiedDivergent(), used
            if len(seen) >= memo_cap:
                checking = False
            else:
                seen.add(snap)
        if used >= fuel:
            return Exhausted(used), used
        used += 1
        op, a, b = instrs[pc]
        if op == 0:  # DECJ
            v = regs[a]
            if v:
                regs[a] = v - 1
                pc += 1
            else:
                pc = b
        elif op == 2:  # INC
            regs[a] += 1
            pc += 1
        elif op == 1:  # HALT
            w = regs[a]
            return HaltPair(w & 1, w >> 1), used
        elif op == 3:  # JMP
            pc = a
        else:  # NOP
            pc += 1


def step_functional(
    program: Program,
    n: int,
    answers,
    fuel: int,
    memo_cap: int = DEFAULT_MEMO_CAP,
):
    """One machine execution on the encoded tuple (n, answers).

    Returns HaltPair | Exhausted | CertifiedDivergent.  Divergence is
    certified only by a configuration repeat among the first `memo_cap`
    stored configurations (sound, incomplete); past the cap the detector
    shuts off.  Malformed halt output cannot occur: every natural decodes
    as a bit pair.
    """
    res, _ = _execute(program, n, answers, fuel, memo_cap)
    return res


def certify_divergence(
    program: Program, n: int, answers, memo_cap: int
) -> str:
    """'CertifiedDivergent' if a configuration repeats within memo_cap
    stored configurations, else 'Unknown' (sound, incomplete)."""
    res, _ = _execute(program, n, answers, memo_cap, memo_cap)
    if isinstance(res, CertifiedDivergent):
        return "CertifiedDivergent"
    return "Unknown"


def run_dialogue(
    program: Program,
    oracle,
    n: int,
    budget: Budget = DEFAULT_BUDGET,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> DialogueOutcome:
    """Run the sequential dialogue of `program` over `oracle` on input n.

    The literal protocol: each round re-runs the machine on the growing
    answer sequence, drawing from one shared step pool.  `oracle` is any
    object with eval(query, fuel) -> OracleAnswer.
    """
    answers: list[int] = []
    trace: list[tuple[int, int]] = []
    steps = 0
    while True:
        res, used = _execute(
            program, n, answers, budget.step_fuel - steps, memo_cap
        )
        steps += used
        if isinstance(res, CertifiedDivergent):
            return DialogueOutcome(
                "exhausted",
                reason="step budget",
                divergence_certified=True,
                trace=tuple(trace),
                steps=steps,
            )
        if isinstance(res, Exhausted):
            return DialogueOutcome(
                "exhausted", reason="step budget", trace=tuple(trace), steps=steps
            )
        if res.i == 1:
            return DialogueOutcome(
                "halted", value=res.q, trace=tuple(trace), steps=steps
            )
        q = res.q
        if len(answers) >= budget.round_cap:
            return DialogueOutcome(
                "exhausted", reason="round cap", trace=tuple(trace), steps=steps
            )
        ans = oracle.eval(q, budget.oracle_fuel)
        if ans.kind == UNDEFINED:
            return DialogueOutcome(
                "frozen", query=q, trace=tuple(trace), steps=steps
            )
        if ans.kind == UNKNOWN:
            return DialogueOutcome(
                "exhausted", reason="oracle budget", trace=tuple(trace), steps=steps
            )
        answers.append(ans.value)
        trace.append((q, ans.value))
