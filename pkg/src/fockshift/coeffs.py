"""Diagonal coefficients of the normal-ordered expansion (BA)^n = sum_k L_{k,n} B^k A^k.

Three independent routes compute the coefficient diagonals:

* the recurrence ``L_{k,n} = L_{k-1,n-1} + C_k L_{k,n-1}`` (normative),
* the closed form summing ``prod_t C_t^{alpha_t}`` over compositions alpha,
* explicit per-entry formulas (seed D0, or D = [R0, I^phi] for weights phi).

``C_t`` is ``sum_{l=1}^t D^(l)`` for the Lambda tables and
``sum_{l=0}^{t-1} D^(l)`` for the Gamma tables. ``direction=-1`` swaps
forward shifts for backward ones, which is what the mirrored expansion of
(AB)^n in A^k B^k needs.
"""
from __future__ import annotations

import weakref
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .diagring import DiagonalOp, c_sum

LAMBDA, GAMMA = "lambda", "gamma"


def compositions(total: int, parts: int):
    """All alpha in N_0^parts with |alpha| = total, in lexicographic order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        alpha = []
        for b in bars:
            alpha.append(b - prev - 1)
            prev = b
        alpha.append(total + parts - 1 - prev - 1)
        yield tuple(alpha)


def binomial(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


class CoeffTable:
    """Recurrence-route table for one seed diagonal D, memoized per (k, n)."""

    def __init__(self, D: DiagonalOp, kind: str = LAMBDA, direction: int = 1):
        if kind not in (LAMBDA, GAMMA):
            raise ValueError(f"unknown table kind {kind!r}")
        self.D = D
        self.kind = kind
        self.direction = direction
        self._table: dict[tuple[int, int], DiagonalOp] = {}
        self._c: dict[int, DiagonalOp] = {}
        self._id = DiagonalOp(lambda n: 1, "id")
        self._zero = DiagonalOp(lambda n: 0, "0")

    def C(self, t: int) -> DiagonalOp:
        if t not in self._c:
            self._c[t] = c_sum(self.D, t, self.kind, self.direction)
        return self._c[t]

    def get(self, k: int, n: int) -> DiagonalOp:
        if k == n and n >= 0:
            return self._id
        if k <= 0 or k > n:
            return self._zero
        key = (k, n)
        if key not in self._table:
            prev_diag = self.get(k - 1, n - 1)
            prev_row = self.get(k, n - 1)
            Ck = self.C(k)
            sym = "L" if self.kind == LAMBDA else "G"
            self._table[key] = DiagonalOp(lambda m: prev_diag[m] + Ck[m] * prev_row[m],
                                          f"{sym}{k},{n}")
        return self._table[key]

    __call__ = get


_TABLES: "weakref.WeakKeyDictionary[DiagonalOp, dict]" = weakref.WeakKeyDictionary()


def table(D: DiagonalOp, kind: str = LAMBDA, direction: int = 1) -> CoeffTable:
    per_seed = _TABLES.setdefault(D, {})
    key = (kind, direction)
    if key not in per_seed:
        per_seed[key] = CoeffTable(D, kind, direction)
    return per_seed[key]


def lambda_recurrence(D: DiagonalOp, k: int, n: int, N: int | None = None,
                      direction: int = 1) -> DiagonalOp:
    return _checked(table(D, LAMBDA, direction).get(k, n), N)


def gamma_recurrence(D: DiagonalOp, k: int, n: int, N: int | None = None,
                     direction: int = 1) -> DiagonalOp:
    return _checked(table(D, GAMMA, direction).get(k, n), N)


def _checked(op: DiagonalOp, N):
    if N is not None:
        op.materialize(N)
    return op


def closed_form(D: DiagonalOp, k: int, n: int, kind: str = LAMBDA,
                direction: int = 1) -> DiagonalOp:
    """Sum over compositions alpha of n-k into k parts of prod_t C_t^{alpha_t}."""
    if k > n or k < 0 or (k == 0 and n > 0):
        return DiagonalOp(lambda m: 0, "0")
    Cs = [c_sum(D, t, kind, direction) for t in range(1, k + 1)]
    alphas = list(compositions(n - k, k))

    def entry(m):
        vals = [C[m] for C in Cs]
        total = 0
        for alpha in alphas:
            term = 1
            for v, e in zip(vals, alpha):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    sym = "L" if kind == LAMBDA else "G"
    return DiagonalOp(entry, f"{sym}closed{k},{n}")


def lambda_closed(D: DiagonalOp, k: int, n: int, N: int | None = None,
                  direction: int = 1) -> DiagonalOp:
    return _checked(closed_form(D, k, n, LAMBDA, direction), N)


def gamma_closed(D: DiagonalOp, k: int, n: int, N: int | None = None,
                 direction: int = 1) -> DiagonalOp:
    return _checked(closed_form(D, k, n, GAMMA, direction), N)


@lru_cache(maxsize=None)
def stirling(n: int, k: int) -> int:
    """Stirling numbers of the second kind, S(n+1, k+1) = S(n, k) + (k+1) S(n, k+1)."""
    if n < 0 or k < 0:
        raise ValueError("stirling needs n, k >= 0")
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return stirling(n - 1, k - 1) + k * stirling(n - 1, k)


# Explicit entry formulas ---------------------------------------------------------
#
# ``variant`` selects the reading of the boundary binomial: "printed" uses
# C(n-k+1, k-1), "count" uses C(n-1, k-1) (the number of compositions of n-k
# into k parts). The oracle decides which is right.

PRINTED, COUNT = "printed", "count"


def _boundary_binomial(k, n, variant):
    if variant == PRINTED:
        return binomial(n - k + 1, k - 1)
    if variant == COUNT:
        return binomial(n - 1, k - 1)
    raise ValueError(f"unknown variant {variant!r}")


def _sum_products(k, total, factor_of_index, indices):
    """sum_{|alpha|=total} prod_{s in indices} factor(s)^{alpha_s}, alpha in N_0^k."""
    out = 0
    for alpha in compositions(total, k):
        term = 1
        for s in indices:
            e = alpha[s - 1]
            if e:
                term = term * factor_of_index(s) ** e
        out = out + term
    return out


def entry_formula(kind: str, seed, k: int, n: int, degree: int, variant: str = PRINTED):
    """Closed-form diagonal entry of Lambda_{k,n} / Gamma_{k,n} at a given degree.

    ``seed`` is ``"D0"`` (the [R0, I] commutator) or a WeightSequence, in which case
    D = [R0, I^phi]. Requires 0 < k < n.
    """
    if not 0 < k < n:
        raise ValueError("entry formulas need 0 < k < n")
    i = degree + 1
    if seed == "D0":
        return _entry_d0(kind, k, n, i, variant)
    return _entry_general(kind, seed, k, n, i, variant)


def _entry_d0(kind, k, n, i, variant):
    if kind == LAMBDA:
        if i == 1:
            return Fraction(0)
        if i == 2:
            return Fraction(_boundary_binomial(k, n, variant))
        top = i - 2 if i <= k + 1 else k
        pre = Fraction(1, i - 1) ** (n - k)
        return pre * _sum_products(k, n - k, lambda s: Fraction(-s, i - 1 - s), range(1, top + 1))
    if kind == GAMMA:
        if i == 1:
            return Fraction(_boundary_binomial(k, n, variant))
        top = i - 1 if i <= k else k
        pre = Fraction(1, i) ** (n - k)
        return pre * _sum_products(k, n - k, lambda s: Fraction(-s, i - s), range(1, top + 1))
    raise ValueError(f"unknown kind {kind!r}")


def _entry_general(kind, w, k, n, i, variant):
    r = w.ratio  # r(j) = phi_j / phi_{j+1}

    def weighted_sum(base, diff_of_t, top):
        # sum_alpha base^(alpha_{top+1} + ... + alpha_k) prod_{t<=top} diff(t)^alpha_t
        out = 0
        for alpha in compositions(n - k, k):
            term = 1
            tail = sum(alpha[top:])
            if tail:
                term = term * base ** tail
            for t in range(1, top + 1):
                if alpha[t - 1]:
                    term = term * diff_of_t(t) ** alpha[t - 1]
            out = out + term
        return out

    if kind == LAMBDA:
        if i == 1:
            return w.mode.coerce(0)
        if i == 2:
            return _boundary_binomial(k, n, variant) * r(0) ** (n - k)
        base = r(i - 2)
        top = i - 2 if i <= k + 1 else k
        return weighted_sum(base, lambda t: base - r(i - t - 2), top)
    if kind == GAMMA:
        if i == 1:
            return _boundary_binomial(k, n, variant) * r(0) ** (n - k)
        base = r(i - 1)
        top = i - 1 if i <= k else k
        return weighted_sum(base, lambda t: base - r(i - t - 1), top)
    raise ValueError(f"unknown kind {kind!r}")


# Closing Dunkl example ----------------------------------------------------------
#
# Entries of Lambda_{k,n} for Dunkl weights written directly in kappa.
#   "expanded"  - the product of differences before factoring,
#   "printed"   - the factored form read literally: the prefactor exponent
#                 alpha_{n-k} (taken inside the sum, zero when n-k is not an
#                 index of alpha), the printed binomial, and the printed
#                 constants of the odd-i / odd-k branch,
#   "corrected" - the factored form with exponent n-k, the composition count
#                 binomial, and prefactor 1/(i-1), numerator 2m-2kappa+1 in
#                 the odd-i / odd-k branch.

EXPANDED, CORRECTED = "expanded", "corrected"
DUNKL_VARIANTS = (EXPANDED, PRINTED, CORRECTED)


def dunkl_example_entry(kappa, k: int, n: int, degree: int, variant: str = CORRECTED):
    if not 0 < k < n:
        raise ValueError("entry formulas need 0 < k < n")
    if variant not in DUNKL_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    i = degree + 1
    one = 1.0 if isinstance(kappa, float) else Fraction(1)
    K2 = 2 * kappa
    if i == 1:
        return 0 * kappa
    if i == 2:
        binom_variant = PRINTED if variant == PRINTED else COUNT
        return _boundary_binomial(k, n, binom_variant) * (one / (1 + K2)) ** (n - k)

    alphas = list(compositions(n - k, k))

    def a(alpha, idx):
        # 1-based index into alpha; out-of-range entries read as zero
        return alpha[idx - 1] if 1 <= idx <= len(alpha) else 0

    def total(term_of_alpha):
        out = 0
        for alpha in alphas:
            out = out + term_of_alpha(alpha)
        return out

    def pw(base, e):
        return base ** e if e else 1

    even = i % 2 == 0
    if i <= k + 1:
        x = one / (i - 1 + K2) if even else one / (i - 1)
        if variant == EXPANDED:
            def term(alpha):
                out = pw(x, sum(alpha[i - 2:]))
                if even:
                    for l in range(1, i // 2):
                        out *= pw(x - one / (i - 2 * l), a(alpha, 2 * l - 1))
                        out *= pw(x - one / (i - 1 - 2 * l + K2), a(alpha, 2 * l))
                else:
                    for l in range(1, (i - 1) // 2 + 1):
                        out *= pw(x - one / (i - 2 * l + K2), a(alpha, 2 * l - 1))
                    for l in range(1, (i - 1) // 2):
                        out *= pw(x - one / (i - 1 - 2 * l), a(alpha, 2 * l))
                return out
            return total(term)

        def inner(alpha):
            out = 1
            if even:
                for l in range(1, i // 2):
                    out *= pw((1 - 2 * l - K2) / (i - 2 * l), a(alpha, 2 * l - 1))
                    out *= pw(-2 * l * one / (i - 1 - 2 * l + K2), a(alpha, 2 * l))
            else:
                out *= pw((2 - i + K2) / (1 + K2), a(alpha, i - 2))
                for l in range(1, (i - 1) // 2):
                    out *= pw((1 - 2 * l + K2) / (i - 2 * l + K2), a(alpha, 2 * l - 1))
                    out *= pw(-2 * l * one / (i - 1 - 2 * l), a(alpha, 2 * l))
            return out

        if variant == PRINTED:
            return total(lambda alpha: pw(x, a(alpha, n - k)) * inner(alpha))
        return pw(x, n - k) * total(inner)

    # i > k + 1
    m, k_odd = divmod(k, 2)
    # kappa enters the even-slot denominators for even i, the odd-slot ones for odd i
    x = one / (i - 1 + K2) if even else one / (i - 1)
    kap_even, kap_odd = (K2, 0) if even else (0, K2)
    sign = 1 if even else -1

    def den_even(l):
        return i - 1 - 2 * l + kap_even

    def den_odd(l):
        return i - 2 * l + kap_odd

    def lower_even(l):
        return one / den_even(l)

    def lower_odd(l):
        return one / den_odd(l)

    def ratio_even(l):
        return 2 * l * one / den_even(l)

    def ratio_odd(l):
        return (2 * l + sign * K2 - 1) / den_odd(l)

    if variant == EXPANDED:
        def term(alpha):
            out = 1
            for l in range(1, m + 1):
                out *= pw(x - lower_even(l), a(alpha, 2 * l))
            for l in range(1, m + k_odd + 1):
                out *= pw(x - lower_odd(l), a(alpha, 2 * l - 1))
            return out
        return total(term)

    pre = -x
    last_ratio = ratio_odd(m + 1) if k_odd else None
    if variant == PRINTED and k_odd and not even:
        pre = -one / (i - 1 + K2)
        last_ratio = (2 * m - K2 + 3) / (i - 2 * m - 2 + K2)

    def inner(alpha):
        out = 1
        if k_odd:
            out *= pw(last_ratio, a(alpha, 2 * m + 1))
        for l in range(1, m + 1):
            out *= pw(ratio_even(l), a(alpha, 2 * l))
            out *= pw(ratio_odd(l), a(alpha, 2 * l - 1))
        return out

    return pw(pre, n - k) * total(inner)
