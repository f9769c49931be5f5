"""Pairing and digit-stream codings shared by the whole workbench.

Every convention here is load-bearing: witness programs rebuild these
codings in unary register arithmetic, so the exact formulas are frozen
and documented byte-for-byte.

  bit pair      <i, q>    = 2*q + i           (i in {0,1})
  cantor pair   pair(x,y) = (x+y)(x+y+1)/2 + x
  triple        <d, e, n> = pair(pair(d, e), n)

Bijective digit streams (used by the program numbering):

  bij2(c) = digits of c in bijective base 2, digit set {1, 2}, least
            significant first; c = 0 is the empty stream.
  A digit stream over {1, 2, 3} is read as a bijective base-3 value
  (LSB first); 0 is the empty stream.
"""

from math import isqrt


def bit_pair(i: int, q: int) -> int:
    return 2 * q + i


def bit_unpair(w: int) -> tuple[int, int]:
    return w & 1, w >> 1


def pair(x: int, y: int) -> int:
    s = x + y
    return s * (s + 1) // 2 + x


def unpair(z: int) -> tuple[int, int]:
    # s = largest s with s(s+1)/2 <= z
    s = (isqrt(8 * z + 1) - 1) // 2
    t = s * (s + 1) // 2
    x = z - t
    return x, s - x


def triple(d: int, e: int, n: int) -> int:
    return pair(pair(d, e), n)


def untriple(z: int) -> tuple[int, int, int]:
    de, n = unpair(z)
    d, e = unpair(de)
    return d, e, n


def to_bij_digits(n: int, base: int) -> list[int]:
    """Bijective base-`base` digits of n, digit set 1..base, LSB first."""
    digits = []
    while n > 0:
        n, r = divmod(n - 1, base)
        digits.append(r + 1)
    return digits


def from_bij_digits(digits: list[int], base: int) -> int:
    n = 0
    for d in reversed(digits):
        n = n * base + d
    return n
