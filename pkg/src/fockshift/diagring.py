"""The commutative ring of diagonal operators ``D z^n = d_n z^n``.

Entries are produced lazily from a callable and cached, so backward shifts can
look past any truncation as long as the underlying sequence is defined there.
Index convention: entry ``n`` is the monomial degree (0-based); a matrix index
``i`` written 1-based corresponds to ``n = i - 1``.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Callable, Sequence


class MissingEntry(IndexError):
    pass


class DiagonalOp:
    """Lazily evaluated diagonal operator.

    ``entries`` is either a callable ``n -> scalar`` or a finite sequence.
    Negative indices read as zero (the ``d_{-1} = 0`` convention).
    """

    def __init__(self, entries: Callable[[int], object] | Sequence, name: str | None = None,
                 length: int | None = None):
        if callable(entries):
            self._fn = entries
            self.length = length
        else:
            values = list(entries)
            self._fn = values.__getitem__
            self.length = len(values) if length is None else min(length, len(values))
        self.name = name
        self._cache: dict[int, object] = {}

    def __repr__(self):
        return f"DiagonalOp({self.name or '?'})"

    def __getitem__(self, n: int):
        if n < 0:
            return 0
        try:
            return self._cache[n]
        except KeyError:
            pass
        if self.length is not None and n >= self.length:
            raise MissingEntry(f"{self.name or 'diagonal'}: entry {n} beyond length {self.length}")
        value = self._fn(n)
        self._cache.setdefault(n, value)
        return value

    def materialize(self, N: int) -> list:
        return [self[n] for n in range(N)]

    def shift(self, m: int) -> "DiagonalOp":
        return diag_shift(self, m)

    # ring operations ----------------------------------------------------------

    def _combine(self, other, op, symbol):
        if isinstance(other, DiagonalOp):
            length = _min_length(self.length, other.length)
            return DiagonalOp(lambda n: op(self[n], other[n]),
                              f"({self.name}{symbol}{other.name})", length)
        if not isinstance(other, Number):
            return NotImplemented
        return DiagonalOp(lambda n: op(self[n], other), f"({self.name}{symbol}{other})",
                          self.length)

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y, "+")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y, "-")

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._combine(other, lambda x, y: x * y, "*")

    __rmul__ = __mul__

    def __neg__(self):
        return DiagonalOp(lambda n: -self[n], f"-{self.name}", self.length)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers of diagonal operators are not supported")
        return DiagonalOp(lambda n: self[n] ** k, f"{self.name}^{k}", self.length)

    def equals(self, other: "DiagonalOp", N: int) -> bool:
        return all(self[n] == other[n] for n in range(N))


def _min_length(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def constant(value, name: str | None = None) -> DiagonalOp:
    return DiagonalOp(lambda n: value, name or str(value))


def identity(one=1) -> DiagonalOp:
    return DiagonalOp(lambda n: one, "id")


def zero(nil=0) -> DiagonalOp:
    return DiagonalOp(lambda n: nil, "0")


def diag_shift(D: DiagonalOp, m: int) -> DiagonalOp:
    """m > 0: entry n -> d_{n-m} (zero below m); m < 0: entry n -> d_{n+|m|}."""
    if m == 0:
        return D
    name = f"{D.name}^({m:+d})"
    if m > 0:
        length = None if D.length is None else D.length + m
        return DiagonalOp(lambda n: D[n - m] if n >= m else 0, name, length)
    length = None if D.length is None else max(D.length + m, 0)
    return DiagonalOp(lambda n: D[n - m], name, length)


def projection(m: int = 1) -> DiagonalOp:
    """diag(0, ..., 0, 1, 1, ...) with m leading zeros."""
    return DiagonalOp(lambda n: 1 if n >= m else 0, f"P{m}")


def d_zero(N: int | None = None, one=Fraction(1)) -> DiagonalOp:
    """diag(1, -1/2, -1/6, ..., -1/(n(n+1)), ...); ``N`` caps the length."""
    if N is not None and N < 1:
        raise ValueError("N must be at least 1")
    return DiagonalOp(lambda n: one if n == 0 else -one / (n * (n + 1)), "D0", N)


def partial_trace(D: DiagonalOp, N: int):
    if N < 1:
        raise ValueError("N must be at least 1")
    total = 0
    for n in range(N):
        total += D[n]
    return total


def c_sum(D: DiagonalOp, t: int, variant: str = "lambda", direction: int = 1) -> DiagonalOp:
    """Sum of shifted copies of D.

    ``lambda``: sum_{l=1}^t D^(l);  ``gamma``: sum_{l=0}^{t-1} D^(l).
    ``direction=-1`` uses backward shifts D^(-l) instead.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if variant == "lambda":
        ls = range(1, t + 1)
    elif variant == "gamma":
        ls = range(0, t)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    shifted = [diag_shift(D, direction * l) for l in ls]

    def entry(n):
        total = 0
        for S in shifted:
            total += S[n]
        return total

    tag = "C" if variant == "lambda" else "Chat"
    return DiagonalOp(entry, f"{tag}{t}[{D.name}]", _fold_length(shifted))


def _fold_length(ops):
    length = None
    for op in ops:
        length = _min_length(length, op.length)
    return length
