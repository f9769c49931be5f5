"""A tiny macro assembler for the five-instruction machine.

Every generated witness program (canonical reductions, composition
harnesses, the universal dialogue simulator, the jump index families)
is emitted through this module.  Labels are symbolic and resolved at
build time.  Macros document their register contract; "destroys r"
means r is left at 0 unless stated otherwise.

Register arithmetic is unary: move/copy/pair/unpair cost O(value).
"""

from __future__ import annotations

from .machine import DECJ, HALT, INC, JMP, NOP, Instr, Program


class Label:
    __slots__ = ("hint", "index")

    def __init__(self, hint: str = ""):
        self.hint = hint
        self.index: int | None = None

    def __repr__(self):
        return f"<label {self.hint}@{self.index}>"


class Asm:
    def __init__(self):
        self._items: list[tuple] = []  # (op, a, b) with Label allowed as target

    # -- raw emission -------------------------------------------------------

    def new_label(self, hint: str = "") -> Label:
        return Label(hint)

    def mark(self, label: Label) -> Label:
        if label.index is not None:
            raise ValueError(f"label {label!r} marked twice")
        label.index = len(self._items)
        return label

    def inc(self, r: int):
        self._items.append((INC, r, 0))

    def decj(self, r: int, target):
        self._items.append((DECJ, r, target))

    def jmp(self, target):
        self._items.append((JMP, target, 0))

    def halt(self, r: int):
        self._items.append((HALT, r, 0))

    def nop(self):
        self._items.append((NOP, 0, 0))

    def build(self) -> Program:
        def resolve(t):
            if isinstance(t, Label):
                if t.index is None:
                    raise ValueError(f"unmarked label {t!r}")
                return t.index
            return t

        return Program(
            Instr(op, resolve(a), resolve(b)) for op, a, b in self._items
        )

    def __len__(self):
        return len(self._items)

    # -- control macros -----------------------------------------------------

    def dead_loop(self) -> Label:
        """A self-loop; jumping here is honest divergence."""
        here = self.new_label("dead")
        self.mark(here)
        self.jmp(here)
        return here

    def if_zero(self, r: int, target):
        """Jump to target when r == 0; fall through (r unchanged) otherwise."""
        self.decj(r, target)
        self.inc(r)

    def if_nonzero(self, r: int, target):
        skip = self.new_label("ifnz")
        self.decj(r, skip)
        self.inc(r)
        self.jmp(target)
        self.mark(skip)

    # -- data macros --------------------------------------------------------

    def zero(self, r: int):
        loop = self.new_label("zero")
        done = self.new_label()
        self.mark(loop)
        self.decj(r, done)
        self.jmp(loop)
        self.mark(done)

    def move(self, src: int, *dsts: int):
        """Add src into each dst; src ends at 0."""
        loop = self.new_label("move")
        done = self.new_label()
        self.mark(loop)
        self.decj(src, done)
        for d in dsts:
            self.inc(d)
        self.jmp(loop)
        self.mark(done)

    def copy(self, src: int, dst: int, tmp: int):
        """dst += src, preserving src.  tmp must be 0 and ends 0."""
        self.move(src, tmp)
        self.move(tmp, src, dst)

    def dbl(self, r: int, tmp: int):
        """r := 2r.  tmp must be 0 and ends 0."""
        self.move(r, tmp)
        loop = self.new_label("dbl")
        done = self.new_label()
        self.mark(loop)
        self.decj(tmp, done)
        self.inc(r)
        self.inc(r)
        self.jmp(loop)
        self.mark(done)

    def add_const(self, r: int, c: int):
        for _ in range(c):
            self.inc(r)

    def build_const(self, r: int, c: int, tmp: int):
        """r := c by binary doubling.  r and tmp must be 0; tmp ends 0."""
        if c == 0:
            return
        bits = bin(c)[2:]
        self.inc(r)
        for bit in bits[1:]:
            self.dbl(r, tmp)
            if bit == "1":
                self.inc(r)

    def halve(self, src: int, q: int, rem: int):
        """q += src // 2, rem += src % 2; src destroyed."""
        loop = self.new_label("halve")
        odd = self.new_label()
        done = self.new_label()
        self.mark(loop)
        self.decj(src, done)
        self.decj(src, odd)
        self.inc(q)
        self.jmp(loop)
        self.mark(odd)
        self.inc(rem)
        self.mark(done)

    def divmod_const(self, src: int, c: int, q: int, rem: int):
        """q += src // c, rem += src % c; src destroyed.  c >= 2."""
        loop = self.new_label("divmod")
        done = self.new_label()
        arms = [self.new_label(f"rem{j}") for j in range(c)]
        self.mark(loop)
        for j in range(c):
            self.decj(src, arms[j])
        self.inc(q)
        self.jmp(loop)
        for j in range(c):
            self.mark(arms[j])
            self.add_const(rem, j)
            if j < c - 1:
                self.jmp(done)
        self.mark(done)

    def equal_const(self, r: int, c: int, eq, neq):
        """Jump to eq if r == c else neq; r destroyed."""
        for _ in range(c):
            self.decj(r, neq)
        self.decj(r, eq)
        self.jmp(neq)

    def compare_eq(self, a: int, b: int, eq, neq):
        """Jump to eq if a == b else neq; both destroyed."""
        loop = self.new_label("cmp")
        a_zero = self.new_label()
        self.mark(loop)
        self.decj(a, a_zero)
        self.decj(b, neq)
        self.jmp(loop)
        self.mark(a_zero)
        self.decj(b, eq)
        self.jmp(neq)

    def less_than(self, a: int, b: int, lt, ge):
        """Jump to lt if a < b else ge; both destroyed."""
        loop = self.new_label("lt")
        a_zero = self.new_label()
        self.mark(loop)
        self.decj(a, a_zero)
        self.decj(b, ge)  # b exhausted while a > 0: a > b-ish => not less
        self.jmp(loop)
        self.mark(a_zero)
        self.decj(b, ge)  # both zero: equal
        self.inc(b)
        self.jmp(lt)

    def pair_into(self, x: int, y: int, out: int, t1: int, t2: int):
        """out += pair(x, y) = T(x+y) + x; x, y destroyed; t1, t2 must be 0."""
        self.move(x, t1, out)  # out += x, t1 gets x
        self.move(y, t1)  # t1 = x + y
        loop = self.new_label("tri")
        done = self.new_label()
        self.mark(loop)
        self.decj(t1, done)
        self.inc(t2)
        self.copy(t2, out, x)  # x is free (0) here; used as scratch
        self.jmp(loop)
        self.mark(done)
        self.zero(t2)

    def unpair_into(self, z: int, x_out: int, y_out: int, t1: int, t2: int):
        """(x_out, y_out) := cantor unpair of z; z destroyed.

        x_out, y_out, t1, t2 must be 0; t1, t2 end 0.
        """
        dead = self.new_label("unpair_dead")
        loop = self.new_label("unpair")
        sub_ok = self.new_label()
        too_far = self.new_label()
        out = self.new_label()
        self.inc(y_out)  # y_out doubles as k, starting at 1
        self.mark(loop)
        self.copy(y_out, t1, t2)  # t1 := k
        inner = self.new_label()
        self.mark(inner)
        self.decj(t1, sub_ok)
        self.decj(z, too_far)
        self.inc(t2)
        self.jmp(inner)
        self.mark(sub_ok)  # z >= k held; z reduced by k
        self.zero(t2)
        self.inc(y_out)
        self.jmp(loop)
        self.mark(too_far)  # z was < k; t2 holds the consumed part
        self.zero(t1)
        self.move(t2, z)  # restore remainder
        self.move(z, x_out, t1)  # x := remainder, keep a copy in t1
        self.decj(y_out, dead)  # k := k - 1 = s  (k >= 1 always)
        sub2 = self.new_label()
        self.mark(sub2)
        self.decj(t1, out)
        self.decj(y_out, dead)  # cannot underflow: s >= x
        self.jmp(sub2)
        self.mark(dead)
        self.jmp(dead)
        self.mark(out)

    # -- indexed access (static dispatch chains) ----------------------------

    def read_indexed(self, base: int, cap: int, idx: int, out: int, tmp: int, miss):
        """out += reg[base + idx]; idx destroyed; jumps to miss if idx >= cap."""
        arms = [self.new_label(f"rd{j}") for j in range(cap)]
        done = self.new_label()
        for j in range(cap):
            self.decj(idx, arms[j])
        self.jmp(miss)
        for j in range(cap):
            self.mark(arms[j])
            self.copy(base + j, out, tmp)
            if j < cap - 1:
                self.jmp(done)
        self.mark(done)

    def write_indexed(self, base: int, cap: int, idx: int, src: int, miss):
        """reg[base + idx] := src; src and idx destroyed; miss on idx >= cap."""
        arms = [self.new_label(f"wr{j}") for j in range(cap)]
        done = self.new_label()
        for j in range(cap):
            self.decj(idx, arms[j])
        self.jmp(miss)
        for j in range(cap):
            self.mark(arms[j])
            self.zero(base + j)
            self.move(src, base + j)
            if j < cap - 1:
                self.jmp(done)
        self.mark(done)
