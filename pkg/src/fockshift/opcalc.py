"""Weighted shift operators, operator words and their truncated matrices.

Operators act on ``span{z^0, ..., z^{N-1}}``. A lowering shift sends
``z^n -> a_n z^{n-1}`` (and kills constants), a raising shift sends
``z^n -> b_n z^{n+1}``. Words are written left to right and applied right
to left, so ``I * R0`` means "apply R0, then I".

The matrices built here are the brute-force oracle every identity is checked
against. A raising step that leaves the window loses mass, so each matrix
carries a mask of columns on which it agrees with the untruncated operator.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .diagring import DiagonalOp, d_zero
from .weights import WeightSequence


class TruncationOverflow(ValueError):
    pass


class WordSyntaxError(ValueError):
    pass


LOWER, RAISE = "lower", "raise"


class ShiftOp:
    """Weighted shift; ``coeffs[n]`` is a_n (lowering, n >= 1) or b_n (raising, n >= 0)."""

    def __init__(self, kind: str, coeffs: Callable[[int], object] | Sequence | DiagonalOp,
                 name: str):
        if kind not in (LOWER, RAISE):
            raise ValueError(f"unknown shift kind {kind!r}")
        self.kind = kind
        self.coeffs = coeffs if isinstance(coeffs, DiagonalOp) else DiagonalOp(coeffs, name)
        self.name = name

    @classmethod
    def lowering(cls, a, name="A"):
        return cls(LOWER, a, name)

    @classmethod
    def raising(cls, b, name="B"):
        return cls(RAISE, b, name)

    def __repr__(self):
        return f"ShiftOp({self.kind}, {self.name})"

    def __getitem__(self, n):
        return self.coeffs[n]

    @property
    def step(self) -> int:
        return 1 if self.kind == RAISE else -1

    def adjoint(self, w: WeightSequence) -> "ShiftOp":
        """Adjoint with respect to the phi-weighted inner product."""
        if self.kind == LOWER:
            return ShiftOp.raising(lambda n: self[n + 1] * w.phi(n) / w.phi(n + 1),
                                   f"{self.name}*")
        return ShiftOp.lowering(lambda n: self[n - 1] * w.phi(n) / w.phi(n - 1) if n >= 1 else 0,
                                f"{self.name}*")

    def __mul__(self, other):
        return OperatorWord((self,)) * other

    def __rmul__(self, other):
        return OperatorWord.of(other) * self

    def __pow__(self, k: int):
        return OperatorWord((self,)) ** k


@dataclass(frozen=True)
class OperatorWord:
    factors: tuple = ()

    @classmethod
    def of(cls, x) -> "OperatorWord":
        if isinstance(x, OperatorWord):
            return x
        if isinstance(x, (ShiftOp, DiagonalOp)):
            return cls((x,))
        raise TypeError(f"cannot make an operator word from {x!r}")

    def __mul__(self, other):
        return OperatorWord(self.factors + OperatorWord.of(other).factors)

    def __rmul__(self, other):
        return OperatorWord(OperatorWord.of(other).factors + self.factors)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative word powers are undefined")
        return OperatorWord(self.factors * k)

    @property
    def name(self) -> str:
        return " ".join(f.name or "?" for f in self.factors) or "1"

    @property
    def raising_count(self) -> int:
        return sum(1 for f in self.factors if isinstance(f, ShiftOp) and f.kind == RAISE)

    @property
    def lowering_count(self) -> int:
        return sum(1 for f in self.factors if isinstance(f, ShiftOp) and f.kind == LOWER)

    @property
    def degree_shift(self) -> int:
        return self.raising_count - self.lowering_count

    @property
    def max_raise(self) -> int:
        """Largest degree gain over any application prefix (never negative)."""
        level = best = 0
        for f in reversed(self.factors):
            if isinstance(f, ShiftOp):
                level += f.step
                best = max(best, level)
        return best

    def adjoint(self, w: WeightSequence) -> "OperatorWord":
        return OperatorWord(tuple(f.adjoint(w) if isinstance(f, ShiftOp) else f
                                  for f in reversed(self.factors)))

    def act_monomial(self, j: int, N: int | None = None, one=1):
        """Image of z^j as ``(degree, coeff)``; ``None`` if it vanishes or leaves the window."""
        deg, coeff = j, one
        for f in reversed(self.factors):
            if isinstance(f, DiagonalOp):
                coeff = coeff * f[deg]
            elif f.kind == LOWER:
                if deg == 0:
                    return None
                coeff = coeff * f[deg]
                deg -= 1
            else:
                if N is not None and deg + 1 > N - 1:
                    return None
                coeff = coeff * f[deg]
                deg += 1
        return deg, coeff


def _degree(f: Sequence) -> int:
    for n in range(len(f) - 1, -1, -1):
        if f[n]:
            return n
    return -1


def apply(word, f: Sequence, N: int) -> list:
    """Apply a word to coefficients ``f`` (f[n] multiplies z^n), result of length N.

    Raises :class:`TruncationOverflow` instead of silently losing mass.
    """
    word = OperatorWord.of(word)
    if len(f) > N and _degree(f) > N - 1:
        raise TruncationOverflow(f"input of degree {_degree(f)} does not fit in N={N}")
    deg = _degree(f)
    if deg >= 0 and deg + word.max_raise > N - 1:
        raise TruncationOverflow(
            f"degree {deg} + intermediate raise {word.max_raise} exceeds N-1={N - 1}")
    vec = list(f[:N]) + [0] * (N - len(f))
    for fac in reversed(word.factors):
        out = [0] * N
        for n, c in enumerate(vec):
            if not c:
                continue
            if isinstance(fac, DiagonalOp):
                out[n] += c * fac[n]
            elif fac.kind == LOWER:
                if n >= 1:
                    out[n - 1] += c * fac[n]
            else:
                out[n + 1] += c * fac[n]
        vec = out
    return vec


@dataclass
class TruncMatrix:
    """Dense N x N matrix; ``rows[i][j]`` is the z^i coefficient of the image of z^j."""

    rows: list
    trusted: list
    shift: int | None = None

    @property
    def N(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def zeros(cls, N: int, shift: int | None = 0):
        return cls([[0] * N for _ in range(N)], [True] * N, shift)

    @classmethod
    def from_diagonal(cls, D: DiagonalOp, N: int):
        M = cls.zeros(N, 0)
        for n in range(N):
            M.rows[n][n] = D[n]
        return M

    def column(self, j: int) -> list:
        return [row[j] for row in self.rows]

    def diagonal(self) -> list:
        return [self.rows[n][n] for n in range(self.N)]

    def trusted_columns(self) -> list[int]:
        return [j for j, ok in enumerate(self.trusted) if ok]

    def _check(self, other):
        if other.N != self.N:
            raise ValueError(f"size mismatch {self.N} vs {other.N}")

    def _elementwise(self, other, op):
        self._check(other)
        rows = [[op(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        trusted = [a and b for a, b in zip(self.trusted, other.trusted)]
        shift = self.shift if self.shift == other.shift else None
        return TruncMatrix(rows, trusted, shift)

    def __add__(self, other):
        return self._elementwise(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._elementwise(other, lambda x, y: x - y)

    def __neg__(self):
        return TruncMatrix([[-x for x in r] for r in self.rows], list(self.trusted), self.shift)

    def scale(self, c):
        return TruncMatrix([[c * x for x in r] for r in self.rows], list(self.trusted), self.shift)

    def __matmul__(self, other):
        self._check(other)
        N = self.N
        rows = [[0] * N for _ in range(N)]
        trusted = []
        for j in range(N):
            ok = other.trusted[j]
            for k in range(N):
                y = other.rows[k][j]
                if not y:
                    continue
                ok = ok and self.trusted[k]
                for i in range(N):
                    x = self.rows[i][k]
                    if x:
                        rows[i][j] += x * y
            trusted.append(ok)
        shift = None if self.shift is None or other.shift is None else self.shift + other.shift
        return TruncMatrix(rows, trusted, shift)


def to_matrix(word, N: int, one=1) -> TruncMatrix:
    """Truncated matrix of a word; columns j <= N-1-max_raise are trusted."""
    word = OperatorWord.of(word)
    M = TruncMatrix.zeros(N, word.degree_shift)
    for j in range(N):
        image = word.act_monomial(j, N, one)
        if image is not None:
            deg, coeff = image
            M.rows[deg][j] = coeff
    limit = N - 1 - word.max_raise
    M.trusted = [j <= limit for j in range(N)]
    return M


def commutator(X, Y, N: int, one=1) -> TruncMatrix:
    """Matrix of XY - YX with the two trust masks intersected."""
    X, Y = OperatorWord.of(X), OperatorWord.of(Y)
    return to_matrix(X * Y, N, one) - to_matrix(Y * X, N, one)


def matrix_commutator(X: TruncMatrix, Y: TruncMatrix) -> TruncMatrix:
    return X @ Y - Y @ X


def weighted_adjoint(M: TruncMatrix, w: WeightSequence) -> TruncMatrix:
    """W^{-1} M^T W with W = diag(phi_0, ..., phi_{N-1})."""
    N = M.N
    phi = w.values(N)
    rows = [[phi[j] / phi[i] * M.rows[j][i] if M.rows[j][i] else 0 for j in range(N)]
            for i in range(N)]
    if M.shift is None:
        trusted = [False] * N
        shift = None
    else:
        s = M.shift
        # column j of the adjoint reads row j of M, i.e. column j - s
        trusted = [(j - s < 0) or (j - s <= N - 1 and M.trusted[j - s]) for j in range(N)]
        shift = -s
    return TruncMatrix(rows, trusted, shift)


def shift_commutator(A: ShiftOp, B: ShiftOp) -> DiagonalOp:
    """The diagonal [A, B] for lowering A and raising B, from the coefficient formula."""
    if A.kind != LOWER or B.kind != RAISE:
        raise ValueError("shift_commutator needs (lowering, raising)")

    def entry(n):
        if n == 0:
            return A[1] * B[0]
        return A[n + 1] * B[n] - A[n] * B[n - 1]

    return DiagonalOp(entry, f"[{A.name},{B.name}]")


class StandardOps(NamedTuple):
    R0: ShiftOp
    I: ShiftOp
    Iphi: ShiftOp
    dphi: ShiftOp
    Mz: ShiftOp
    D0: DiagonalOp


def standard_ops(w: WeightSequence) -> StandardOps:
    one = w.mode.coerce(1)
    return StandardOps(
        R0=ShiftOp.lowering(lambda n: one, "R0"),
        I=ShiftOp.raising(lambda n: one / (n + 1), "I"),
        Iphi=ShiftOp.raising(lambda n: w.phi(n) / w.phi(n + 1), "Iphi"),
        dphi=ShiftOp.lowering(lambda n: w.phi(n) / w.phi(n - 1), "dphi"),
        Mz=ShiftOp.raising(lambda n: one, "Mz"),
        D0=d_zero(one=one),
    )


_TOKEN = re.compile(r"^([A-Za-z][A-Za-z0-9]*)(?:\^(\d+))?$")


def parse_word(expr: str, w: WeightSequence) -> OperatorWord:
    """Parse e.g. ``"I^2 R0^2"``; factors from R0, I, Iphi, dphi, Mz, D0."""
    ops = standard_ops(w)._asdict()
    factors: list = []
    tokens = expr.split()
    if not tokens:
        raise WordSyntaxError("empty operator expression")
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m or m.group(1) not in ops:
            raise WordSyntaxError(f"bad factor {tok!r}; expected one of {', '.join(ops)}")
        factors.extend([ops[m.group(1)]] * int(m.group(2) or 1))
    return OperatorWord(tuple(factors))


def dunkl_apply(f: Sequence, kappa, N: int) -> list:
    """Rank-one Dunkl operator on coefficients: f_{2n+1} -> (2n+2k+1) z^{2n}, f_{2n} -> 2n z^{2n-1}."""
    if _degree(f) > N - 1:
        raise TruncationOverflow(f"input of degree {_degree(f)} does not fit in N={N}")
    out = [0] * N
    for n, c in enumerate(f[:N]):
        if not c or n == 0:
            continue
        j, odd = divmod(n, 2)
        factor = (2 * j + 2 * kappa + 1) if odd else 2 * j
        out[n - 1] += factor * c
    return out
