"""Named, machine-checkable identities evaluated against the truncated-matrix oracle.

Each ``verify_*`` function builds both sides of one identity on
``span{z^0..z^{N-1}}``, compares them on trusted columns and returns a
:class:`VerifyReport`. Where a printed formula admits several readings, every
candidate right-hand side is built and the report records which ones the
oracle confirms (``details["matched"]``).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from sympy import integer_nthroot

from . import coeffs
from .diagring import DiagonalOp, d_zero, diag_shift, identity, partial_trace, projection
from .opcalc import (OperatorWord, ShiftOp, TruncMatrix, apply, commutator, dunkl_apply,
                     shift_commutator, standard_ops, to_matrix, weighted_adjoint)
from .scalar import EXACT, EngineMode, format_scalar
from .weights import WeightSequence, norm_sq

MAX_WITNESSES = 20
ASTAR, BSTAR = "AStar", "BStar"


class ConfigError(ValueError):
    pass


class NoRationalRoot(ArithmeticError):
    pass


@dataclass
class VerifyReport:
    identity: str
    family: str
    params: dict
    N: int
    mode: str
    status: str
    max_abs_err: str | None = None
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "tol_pass")

    def to_dict(self, full: bool = False) -> dict:
        wit = self.witnesses if full else self.witnesses[:MAX_WITNESSES]
        return {
            "identity": self.identity,
            "family": self.family,
            "params": _jsonable(self.params),
            "N": self.N,
            "mode": self.mode,
            "status": self.status,
            "max_abs_err": self.max_abs_err,
            "witnesses": [{"row": r, "col": c, "lhs": format_scalar(x), "rhs": format_scalar(y)}
                          for r, c, x, y in wit],
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return format_scalar(x)
    return x


class Checker:
    """Accumulates entry comparisons for one report."""

    def __init__(self, mode: EngineMode):
        self.mode = mode
        self.witnesses: list = []
        self.failed: list[str] = []
        self.max_err = 0.0

    def entry(self, label: str, row: int, col: int, lhs, rhs) -> bool:
        if self.mode.exact:
            ok = lhs == rhs
        else:
            err = abs(lhs - rhs)
            self.max_err = max(self.max_err, err)
            ok = err <= self.mode.tolerance
        if not ok:
            self.witnesses.append((row, col, lhs, rhs))
            if label not in self.failed:
                self.failed.append(label)
        return ok

    def matrices(self, label: str, lhs: TruncMatrix, rhs: TruncMatrix, cols=None) -> bool:
        if cols is None:
            cols = [j for j in range(lhs.N) if lhs.trusted[j] and rhs.trusted[j]]
        ok = True
        for j in cols:
            for i in range(lhs.N):
                ok = self.entry(label, i, j, lhs.rows[i][j], rhs.rows[i][j]) and ok
        return ok

    def diagonals(self, label: str, lhs: DiagonalOp, rhs: DiagonalOp, N: int) -> bool:
        ok = True
        for n in range(N):
            ok = self.entry(label, n, n, lhs[n], rhs[n]) and ok
        return ok

    def flag(self, label: str, ok: bool) -> bool:
        if not ok and label not in self.failed:
            self.failed.append(label)
        return ok

    @property
    def ok(self) -> bool:
        return not self.failed

    def report(self, identity, family, params, N, details=None) -> VerifyReport:
        details = dict(details or {})
        if self.failed:
            details["failed_checks"] = list(self.failed)
            status = "fail"
        else:
            status = "pass" if self.mode.exact else "tol_pass"
        return VerifyReport(identity, family, dict(params), N, self.mode.name, status,
                            None if self.mode.exact else repr(self.max_err),
                            self.witnesses, details)


def _matches(mode, lhs, rhs, cols=None) -> bool:
    probe = Checker(mode)
    return probe.matrices("probe", lhs, rhs, cols)


def _one(mode):
    return mode.coerce(1)


def random_rational(rng: random.Random, lo=-9, hi=9, nonzero=False):
    while True:
        x = Fraction(rng.randint(lo, hi), rng.randint(1, 9))
        if x or not nonzero:
            return x


def random_diagonal(seed, length: int, positive=False) -> DiagonalOp:
    rng = random.Random(f"diag:{seed}")
    if positive:
        vals = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(length)]
    else:
        vals = [random_rational(rng) for _ in range(length)]
    return DiagonalOp(vals, f"rand{seed}")


def random_pair(seed, length: int) -> tuple[ShiftOp, ShiftOp]:
    rng = random.Random(f"pair:{seed}")
    a = [Fraction(0)] + [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(length)]
    b = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(length)]
    return ShiftOp.lowering(a, "A"), ShiftOp.raising(b, "B")


def _word(*parts) -> OperatorWord:
    out = OperatorWord()
    for p in parts:
        out = out * p
    return out


def _diag_word_sum(terms, N, one):
    """Matrix of sum_k coef_k * word_k."""
    total = None
    for coef, word in terms:
        M = to_matrix(OperatorWord((coef,)) * word, N, one)
        total = M if total is None else total + M
    return total


def named_pair(w: WeightSequence, name: str) -> tuple[ShiftOp, ShiftOp]:
    ops = standard_ops(w)
    table = {"R0,I": (ops.R0, ops.I), "dphi,Mz": (ops.dphi, ops.Mz),
             "R0,Iphi": (ops.R0, ops.Iphi)}
    try:
        return table[name.replace(" ", "")]
    except KeyError:
        raise ConfigError(f"unknown pair {name!r}; expected one of {sorted(table)}") from None


# the seed commutator ---------------------------------------------------------

def verify_commutator_seed(N: int, w: WeightSequence | None = None) -> VerifyReport:
    w = w or WeightSequence.classic()
    ops = standard_ops(w)
    one = _one(w.mode)
    chk = Checker(w.mode)
    lhs = commutator(ops.R0, ops.I, N, one)
    rhs = TruncMatrix.from_diagonal(d_zero(N, one), N)
    chk.matrices("[R0,I] = D0", lhs, rhs)
    D = shift_commutator(ops.R0, ops.I)
    chk.diagonals("D(a,b) formula = D0", D, d_zero(N, one), N)
    for M in range(1, N + 1):
        chk.entry("partial trace = 1/N", M, M, partial_trace(d_zero(M, one), M), one / M)
    return chk.report("commutator_seed", w.label, {}, N)


# diagonal/shift intertwining lemmas -----------------------------------------

def verify_shift_lemmas(N: int, seed=0, w: WeightSequence | None = None) -> VerifyReport:
    w = w or WeightSequence.classic()
    ops = standard_ops(w)
    chk = Checker(EXACT)
    L = N + 8
    D = random_diagonal(seed, L)
    Dp, Dm = diag_shift(D, 1), diag_shift(D, -1)

    def same(label, left, right):
        chk.matrices(label, to_matrix(left, N), to_matrix(right, N))

    same("D I = I D(-1)", _word(D, ops.I), _word(ops.I, Dm))
    same("I D = D(1) I", _word(ops.I, D), _word(Dp, ops.I))
    same("D R0 = R0 D(1)", _word(D, ops.R0), _word(ops.R0, Dp))
    same("D(-1) R0 = R0 D", _word(Dm, ops.R0), _word(ops.R0, D))
    for n, k in product(range(1, 5), range(1, 5)):
        same(f"D^{n} R0^{k} = R0^{k} (D({k}))^{n}", _word(D ** n, ops.R0 ** k),
             _word(ops.R0 ** k, diag_shift(D, k) ** n))
    A, B = random_pair(seed, L)
    same("D B = B D(-1)", _word(D, B), _word(B, Dm))
    same("B D = D(1) B", _word(B, D), _word(Dp, B))
    same("D A = A D(1)", _word(D, A), _word(A, Dp))
    same("D(-1) A = A D", _word(Dm, A), _word(A, D))
    # shift algebra of the ring itself
    chk.diagonals("(D(1))(-1) = D", diag_shift(Dp, -1), D, N)
    chk.diagonals("(D(-1))(1) = P D", diag_shift(Dm, 1), projection(1) * D, N)
    chk.matrices("[A,B] = D(a,b)", commutator(A, B, N),
                 TruncMatrix.from_diagonal(shift_commutator(A, B), N))
    return chk.report("shift_lemmas", w.label, {"seed": seed}, N)


# expansion theorem -----------------------------------------------------------

def verify_expansion(w: WeightSequence, A: ShiftOp, B: ShiftOp, n: int, N: int,
                     pair_name: str | None = None) -> VerifyReport:
    if n < 1:
        raise ConfigError("expansion needs n >= 1")
    one = _one(w.mode)
    D = shift_commutator(A, B)
    chk = Checker(w.mode)
    lhs = to_matrix((B * A) ** n, N, one)
    rhs = _diag_word_sum([(coeffs.lambda_recurrence(D, k, n), B ** k * A ** k)
                          for k in range(1, n + 1)], N, one)
    chk.matrices("(BA)^n = sum L_{k,n} B^k A^k", lhs, rhs)
    chk.matrices("[A,B] = D(a,b)", commutator(A, B, N, one), TruncMatrix.from_diagonal(D, N))
    params = {"n": n, "pair": pair_name or f"{A.name},{B.name}"}
    return chk.report("expansion", w.label, params, N)


# coefficient routes ----------------------------------------------------------

def seed_diagonal(seed, N: int) -> DiagonalOp:
    if seed in ("D0", None):
        return d_zero()
    return random_diagonal(seed, N + 16)


def verify_coeff_routes(seed="D0", N: int = 32, nmax: int = 6) -> VerifyReport:
    D = seed_diagonal(seed, N)
    R0 = standard_ops(WeightSequence.classic()).R0
    chk = Checker(EXACT)
    for n in range(1, nmax + 1):
        for k in range(1, n + 1):
            L = coeffs.lambda_recurrence(D, k, n)
            G = coeffs.gamma_recurrence(D, k, n)
            chk.diagonals("Lambda recurrence = closed form", L, coeffs.lambda_closed(D, k, n), N)
            chk.diagonals("Gamma recurrence = closed form", G, coeffs.gamma_closed(D, k, n), N)
            chk.diagonals("Gamma = Lambda(-1)", G, diag_shift(L, -1), N)
            chk.matrices("R0 Lambda = Gamma R0", to_matrix(_word(R0, L), N),
                         to_matrix(_word(G, R0), N))
    # boundary conditions
    for n in range(0, nmax + 1):
        chk.diagonals("Lambda_{n,n} = id", coeffs.lambda_recurrence(D, n, n), identity(), N)
        if n:
            chk.diagonals("Lambda_{0,n} = 0", coeffs.lambda_recurrence(D, 0, n),
                          DiagonalOp(lambda m: 0), N)
    return chk.report("coeff_routes", "-", {"seed": str(seed), "nmax": nmax}, N)


def verify_reference_values(N: int = 32) -> VerifyReport:
    D = d_zero()
    D1, D2 = diag_shift(D, 1), diag_shift(D, 2)
    chk = Checker(EXACT)
    chk.diagonals("Lambda_{1,2} = D0(1)", coeffs.lambda_recurrence(D, 1, 2), D1, N)
    chk.diagonals("Lambda_{2,3} = 2 D0(1) + D0(2)", coeffs.lambda_recurrence(D, 2, 3),
                  2 * D1 + D2, N)
    chk.diagonals("Lambda_{1,3} = (D0(1))^2", coeffs.lambda_recurrence(D, 1, 3), D1 ** 2, N)
    ops = standard_ops(WeightSequence.classic())
    I, R0 = ops.I, ops.R0
    chk.matrices("(I R0)^2 = I^2 R0^2 + D0(1) I R0", to_matrix((I * R0) ** 2, N),
                 to_matrix(I ** 2 * R0 ** 2, N) + to_matrix(_word(D1, I, R0), N))
    return chk.report("reference_values", "classic", {}, N)


# p-Fock adjoint and commutator ----------------------------------------------

def _pfock(p: int, w):
    if w is None:
        return WeightSequence.pfock(p)
    return w


def verify_fp_adjoint(p: int, N: int, w: WeightSequence | None = None) -> VerifyReport:
    if p < 1:
        raise ConfigError("fp_adjoint needs p >= 1")
    w = _pfock(p, w)
    ops = standard_ops(w)
    one = _one(w.mode)
    chk = Checker(w.mode)
    star = weighted_adjoint(to_matrix(ops.R0, N, one), w)
    word = (ops.I * ops.R0) ** (p - 1) * ops.I
    chk.matrices("R0* = (I R0)^(p-1) I", star, to_matrix(word, N, one))
    # column action z^n -> z^{n+1}/(n+1)^p
    for n in range(N - 1):
        if star.trusted[n]:
            chk.entry("column action 1/(n+1)^p", n + 1, n, star.rows[n + 1][n],
                      one / (n + 1) ** p)
    return chk.report("fp_adjoint", w.label, {"p": p}, N)


FP_CANDIDATES = ("gamma_minus_lambda", "lambda_minus_lambda", "lambda_minus_lambda_swapped",
                 "lambda_minus_gamma")


def _fp_coefficient(name, D, k, p):
    L = coeffs.lambda_recurrence
    G = coeffs.gamma_recurrence
    if name == "gamma_minus_lambda":
        return G(D, k + 1, p + 1) - L(D, k, p)
    if name == "lambda_minus_lambda":
        return L(D, k + 1, p + 1) - L(D, k, p)
    if name == "lambda_minus_lambda_swapped":
        return L(D, k, p) - L(D, k + 1, p + 1)
    if name == "lambda_minus_gamma":
        return L(D, k, p) - G(D, k + 1, p + 1)
    raise ValueError(name)


def verify_fp_commutator(p: int, N: int, w: WeightSequence | None = None) -> VerifyReport:
    """[R0, R0*] against D0^p + sum_k c_k I^k R0^k for each candidate coefficient c_k."""
    if p < 1:
        raise ConfigError("fp_commutator needs p >= 1")
    w = _pfock(p, w)
    ops = standard_ops(w)
    one = _one(w.mode)
    R0m = to_matrix(ops.R0, N, one)
    star = weighted_adjoint(R0m, w)
    lhs = R0m @ star - star @ R0m
    D = d_zero(one=one)
    matched = []
    rhs_by_name = {}
    for name in FP_CANDIDATES:
        terms = [(D ** p, OperatorWord())]
        terms += [(_fp_coefficient(name, D, k, p), ops.I ** k * ops.R0 ** k)
                  for k in range(1, p + 1)]
        rhs = _diag_word_sum(terms, N, one)
        rhs_by_name[name] = rhs
        if _matches(w.mode, lhs, rhs):
            matched.append(name)
    chk = Checker(w.mode)
    chk.flag("some candidate matches", bool(matched))
    if not matched:
        chk.matrices(FP_CANDIDATES[0], lhs, rhs_by_name[FP_CANDIDATES[0]])
    # the oracle's own diagonal: 1/(n+1)^p - [n>=1]/n^p
    for n in range(N):
        if lhs.trusted[n]:
            expect = one / (n + 1) ** p - (one / n ** p if n else 0)
            chk.entry("LHS diagonal", n, n, lhs.rows[n][n], expect)
    details = {"candidates": list(FP_CANDIDATES), "matched": matched,
               "unique": len(matched) == 1}
    return chk.report("fp_commutator", w.label, {"p": p}, N, details)


# adjointness conditions --------------------------------------------------------

def _star_word(A, B, p, which):
    if which == ASTAR:
        return (B * A) ** (p - 1) * B
    if which == BSTAR:
        return (A * B) ** (p - 1) * A
    raise ConfigError(f"which must be {ASTAR} or {BSTAR}, got {which!r}")


def _condition_indices(which, N):
    return range(0, N - 1) if which == ASTAR else range(1, N)


def _condition_sides(A, B, w, p, which, n):
    # both sides divided by phi_n, so float comparisons are scale-free
    if which == ASTAR:
        return A[n + 1], B[n] ** p * A[n + 1] ** (p - 1) * (w.phi(n + 1) / w.phi(n))
    return B[n - 1], A[n] ** p * B[n - 1] ** (p - 1) * (w.phi(n - 1) / w.phi(n))


def power_adjoint_scan(A, B, w, p, N, which):
    """Per-index results: (condition violations, matrix-identity failing columns, matrices)."""
    one = _one(w.mode)
    base = A if which == ASTAR else B
    star = weighted_adjoint(to_matrix(base, N, one), w)
    word = to_matrix(_star_word(A, B, p, which), N, one)
    cond_bad = []
    for n in _condition_indices(which, N):
        lhs, rhs = _condition_sides(A, B, w, p, which, n)
        if not w.mode.close(lhs, rhs):
            cond_bad.append(n)
    cols = [j for j in range(N) if star.trusted[j] and word.trusted[j]]
    mat_bad = [j for j in cols
               if not all(w.mode.close(star.rows[i][j], word.rows[i][j]) for i in range(N))]
    return cond_bad, mat_bad, star, word, cols


def verify_power_adjoint_conditions(A: ShiftOp, B: ShiftOp, w: WeightSequence, p: int, N: int,
                                    which: str = ASTAR, pair_name: str | None = None
                                    ) -> VerifyReport:
    """A* = (BA)^{p-1}B (AStar) or B* = (AB)^{p-1}A (BStar) versus the scalar condition.

    p = 1 is the plain A* = B theorem. Both directions are recorded: the
    indices where the scalar condition fails must be exactly the columns where
    the matrix identity fails.
    """
    if p < 1:
        raise ConfigError("power adjoint conditions need p >= 1")
    cond_bad, mat_bad, star, word, cols = power_adjoint_scan(A, B, w, p, N, which)
    chk = Checker(w.mode)
    for n in cond_bad:
        lhs, rhs = _condition_sides(A, B, w, p, which, n)
        chk.entry("scalar condition", n, n, lhs, rhs)
    chk.matrices("matrix identity", star, word, cols)
    iff = cond_bad == mat_bad
    chk.flag("condition iff identity", iff)
    details = {"which": which, "condition_holds": not cond_bad, "matrix_holds": not mat_bad,
               "iff_consistent": iff, "condition_violations": cond_bad[:MAX_WITNESSES],
               "matrix_violations": mat_bad[:MAX_WITNESSES]}
    params = {"p": p, "which": which}
    if pair_name:
        params["pair"] = pair_name
    name = "adjoint_condition" if p == 1 else "power_adjoint"
    return chk.report(name, w.label, params, N, details)


def verify_adjoint_condition(A: ShiftOp, B: ShiftOp, w: WeightSequence, N: int,
                             pair_name: str | None = None) -> VerifyReport:
    return verify_power_adjoint_conditions(A, B, w, 1, N, ASTAR, pair_name)


def _exact_root(x: Fraction, m: int) -> Fraction:
    if m == 1:
        return x
    num, ok_n = integer_nthroot(x.numerator, m)
    den, ok_d = integer_nthroot(x.denominator, m)
    if not (ok_n and ok_d):
        raise NoRationalRoot(f"{x} has no rational {m}-th root")
    return Fraction(int(num), int(den))


def _float_view(w: WeightSequence, tolerance: float = 1e-9) -> WeightSequence:
    if not w.mode.exact:
        return w
    mode = EngineMode(exact=False, tolerance=tolerance)
    return WeightSequence(w.family, w.params, lambda n: float(w.phi(n)), mode, w.label,
                          w.length)


def solve_pair(w: WeightSequence, m: int, which: str, length: int,
               tolerance: float = 1e-9) -> tuple[ShiftOp, ShiftOp, WeightSequence, str]:
    """Find shifts (A, B) meeting the m-th power adjoint condition for weights w.

    Tries, in order: unit A-weights (AStar) / unit B-weights (BStar) with an exact
    m-th root; the other sequence set to one with an exact (m-2)-th root; and
    finally the first choice in float mode. Returns (A, B, weights, route).
    """
    if which not in (ASTAR, BSTAR):
        raise ConfigError(f"which must be {ASTAR} or {BSTAR}, got {which!r}")

    def ratio(n):  # phi_n / phi_{n+1}
        return w.phi(n) / w.phi(n + 1)

    if w.mode.exact:
        one = Fraction(1)
        try:
            if which == ASTAR:
                b = [_exact_root(ratio(n), m) for n in range(length)]
                return (ShiftOp.lowering(lambda n: one, "A"), ShiftOp.raising(b, "B"), w,
                        "unit_a")
            a = [Fraction(0)] + [_exact_root(1 / ratio(n - 1), m) for n in range(1, length)]
            return ShiftOp.lowering(a, "A"), ShiftOp.raising(lambda n: one, "B"), w, "unit_b"
        except NoRationalRoot:
            pass
        if m != 2:
            try:
                if which == ASTAR:
                    # a_{n+1}^{m-2} = phi_n / phi_{n+1}
                    a = [Fraction(0)] + [_exact_root(ratio(n - 1) ** (1 if m > 2 else -1),
                                                     max(m - 2, 1)) for n in range(1, length)]
                    return (ShiftOp.lowering(a, "A"), ShiftOp.raising(lambda n: one, "B"), w,
                            "unit_b")
                # b_{n-1}^{m-2} = phi_n / phi_{n-1}
                b = [_exact_root((1 / ratio(n)) ** (1 if m > 2 else -1), max(m - 2, 1))
                     for n in range(length)]
                return (ShiftOp.lowering(lambda n: one, "A"), ShiftOp.raising(b, "B"), w,
                        "unit_a")
            except NoRationalRoot:
                pass
    wf = _float_view(w, tolerance)
    if which == ASTAR:
        b = [(wf.phi(n) / wf.phi(n + 1)) ** (1.0 / m) for n in range(length)]
        return ShiftOp.lowering(lambda n: 1.0, "A"), ShiftOp.raising(b, "B"), wf, "float_root"
    a = [0.0] + [(wf.phi(n) / wf.phi(n - 1)) ** (1.0 / m) for n in range(1, length)]
    return ShiftOp.lowering(a, "A"), ShiftOp.raising(lambda n: 1.0, "B"), wf, "float_root"


def verify_adjoint_iff(w: WeightSequence, p: int, N: int, which: str = ASTAR,
                       trials: int = 10, seed: int = 0) -> VerifyReport:
    """Both directions of an adjointness theorem.

    A pair solved from the condition must satisfy the matrix identity, and
    each of ``trials`` random pairs must violate condition and identity at
    exactly the same indices.
    """
    A, B, wu, route = solve_pair(w, p, which, N + 4)
    pos = verify_power_adjoint_conditions(A, B, wu, p, N, which)
    chk = Checker(wu.mode)
    chk.witnesses.extend(pos.witnesses)
    chk.max_err = float(pos.max_abs_err) if pos.max_abs_err else 0.0
    chk.flag("solved pair satisfies identity", pos.passed)
    negatives = []
    for t in range(trials):
        An, Bn = random_pair(f"{seed}:{t}:{which}:{p}", N + 4)
        cond_bad, mat_bad, *_ = power_adjoint_scan(An, Bn, w, p, N, which)
        negatives.append({"condition_violations": len(cond_bad),
                          "matrix_violations": len(mat_bad),
                          "consistent": cond_bad == mat_bad})
        chk.flag("negative control violates condition", bool(cond_bad))
        chk.flag("negative control violates identity at the same indices", cond_bad == mat_bad)
    details = {"which": which, "route": route, "trials": trials, "negatives": negatives}
    return chk.report("adjoint_iff", w.label, {"p": p, "which": which, "seed": seed}, N,
                      details)


# general commutators [A*,A], [B*,B] -------------------------------------------------

def general_candidates():
    """(direction, D-term sign, second table) combinations for the commutator expansion."""
    out = []
    for direction, sign, second in product(("fwd", "bwd"), ("+", "-"), ("lambda", "gamma")):
        out.append(f"{direction},{sign}D,{second}")
    return out


PRINTED_GENERAL = "fwd,+D,lambda"


def _general_rhs(name, D, m, A, B, which, N, one):
    direction, dsign, second = name.split(",")
    dirn = 1 if direction == "fwd" else -1
    L = coeffs.table(D, coeffs.LAMBDA, dirn)
    S = coeffs.table(D, coeffs.LAMBDA if second == "lambda" else coeffs.GAMMA, dirn)
    lead = D ** m if dsign == "+D" else -(D ** m)
    terms = [(lead, OperatorWord())]
    for k in range(1, m + 1):
        word = B ** k * A ** k if which == ASTAR else A ** k * B ** k
        terms.append((L(k, m) - S(k + 1, m + 1), word))
    return _diag_word_sum(terms, N, one)


def verify_general_commutator(A: ShiftOp, B: ShiftOp, w: WeightSequence, m: int, N: int,
                              which: str = ASTAR, route: str | None = None) -> VerifyReport:
    """[A*, A] (D = [A,B], words B^k A^k) or [B*, B] (D = [B,A], words A^k B^k).

    The adjoint on the left is the oracle's weighted matrix adjoint; every
    candidate right-hand side from :func:`general_candidates` is compared.
    """
    if m < 1:
        raise ConfigError("general commutator needs m >= 1")
    one = _one(w.mode)
    if which == ASTAR:
        D = shift_commutator(A, B)
        base = to_matrix(A, N, one)
    elif which == BSTAR:
        D = -shift_commutator(A, B)
        base = to_matrix(B, N, one)
    else:
        raise ConfigError(f"which must be {ASTAR} or {BSTAR}, got {which!r}")
    star = weighted_adjoint(base, w)
    lhs = star @ base - base @ star
    chk = Checker(w.mode)
    pre = verify_power_adjoint_conditions(A, B, w, m, N, which)
    chk.flag("adjoint hypothesis", pre.details["matrix_holds"])
    rhs_by_name = {name: _general_rhs(name, D, m, A, B, which, N, one)
                   for name in general_candidates()}
    matched = [name for name, rhs in rhs_by_name.items() if _matches(w.mode, lhs, rhs)]
    chk.flag("some candidate matches", bool(matched))
    # witnesses (or the float error) come from the first match, else the printed form
    shown = matched[0] if matched else PRINTED_GENERAL
    chk.matrices(f"form {shown}", lhs, rhs_by_name[shown])
    details = {"which": which, "candidates": general_candidates(), "matched": matched,
               "unique": len(matched) == 1, "printed_form": PRINTED_GENERAL,
               "printed_matches": PRINTED_GENERAL in matched}
    if route:
        details["route"] = route
    return chk.report("general_commutator", w.label, {"m": m, "which": which}, N, details)


def verify_general_commutator_solved(w: WeightSequence, m: int, N: int, which: str
                                     ) -> VerifyReport:
    A, B, wu, route = solve_pair(w, m, which, N + m + 6)
    rep = verify_general_commutator(A, B, wu, m, N, which, route)
    rep.family = w.label
    return rep


STIRLING_CANDIDATES = ("printed", "signed")


def verify_stirling_commutator(m: int, N: int) -> VerifyReport:
    """[B*, B] for A = d/dz, B = M_z on (n!)^m weights, where D = [B, A] = -id.

    Candidates: the printed ``I + sum (k+1) S(m,k+1) A^k B^k`` and the signed
    ``(-1)^{m+1} I + sum (-1)^{m-k+1} (k+1) S(m,k+1) A^k B^k``.
    """
    w = WeightSequence.pfock(m)
    one = Fraction(1)
    A = ShiftOp.lowering(lambda n: Fraction(n), "d")
    B = ShiftOp.raising(lambda n: one, "Mz")
    Bm = to_matrix(B, N)
    star = weighted_adjoint(Bm, w)
    lhs = star @ Bm - Bm @ star
    matched = []
    for name in STIRLING_CANDIDATES:
        terms = []
        for k in range(0, m + 1):
            c = (k + 1) * coeffs.stirling(m, k + 1) if k else 1
            if name == "signed":
                c *= (-1) ** (m - k + 1)
            terms.append((DiagonalOp(lambda n, c=c: c * one), A ** k * B ** k))
        if _matches(EXACT, lhs, _diag_word_sum(terms, N, one)):
            matched.append(name)
    chk = Checker(EXACT)
    chk.flag("some candidate matches", bool(matched))
    # cross-check with the general machinery (D = -id)
    gen = verify_general_commutator(A, B, w, m, N, BSTAR)
    chk.flag("general commutator agrees", gen.passed)
    details = {"candidates": list(STIRLING_CANDIDATES), "matched": matched,
               "unique": len(matched) == 1, "general_matched": gen.details["matched"]}
    return chk.report("stirling_commutator", w.label, {"m": m}, N, details)


# entry formulas ---------------------------------------------------------------------

ENTRY_CANDIDATES = (coeffs.PRINTED, coeffs.COUNT)


def verify_entry_formulas(w: WeightSequence | None, kind: str, N: int, nmax: int = 6
                          ) -> VerifyReport:
    """Per-entry closed forms versus the recurrence.

    ``w=None`` uses the D0 seed; otherwise D = [R0, I^phi]. Candidates differ
    only in the boundary binomial.
    """
    if w is None:
        seed, D, label = "D0", d_zero(), "D0"
    else:
        ops = standard_ops(w)
        seed, D, label = w, shift_commutator(ops.R0, ops.Iphi), w.label
    rec = coeffs.lambda_recurrence if kind == coeffs.LAMBDA else coeffs.gamma_recurrence
    mode = EXACT if w is None else w.mode
    per_variant = {v: Checker(mode) for v in ENTRY_CANDIDATES}
    for n in range(2, nmax + 1):
        for k in range(1, n):
            T = rec(D, k, n)
            for deg in range(N):
                for v, vc in per_variant.items():
                    vc.entry(f"{k},{n}", k * 100 + n, deg,
                             coeffs.entry_formula(kind, seed, k, n, deg, v), T[deg])
    matched = [v for v, vc in per_variant.items() if vc.ok]
    chk = Checker(mode)
    chk.flag("some candidate matches", bool(matched))
    if matched:
        chk.max_err = per_variant[matched[0]].max_err
    discrepancies = {v: [{"k": r // 100, "n": r % 100, "degree": c} for r, c, *_ in
                         vc.witnesses[:MAX_WITNESSES]]
                     for v, vc in per_variant.items() if not vc.ok}
    details = {"kind": kind, "candidates": list(ENTRY_CANDIDATES), "matched": matched,
               "unique": len(matched) == 1, "discrepancies": discrepancies,
               "degree_to_matrix_index": "i = degree + 1"}
    return chk.report("entry_formulas", label, {"kind": kind, "nmax": nmax}, N, details)


DUNKL_CANDIDATES = (coeffs.PRINTED, coeffs.CORRECTED)


def verify_dunkl_example(kappa, N: int, nmax: int = 7) -> VerifyReport:
    """Closing Dunkl example: expanded and factored entry forms versus the recurrence."""
    kappa = Fraction(kappa)
    w = WeightSequence.dunkl(kappa)
    ops = standard_ops(w)
    D = shift_commutator(ops.R0, ops.Iphi)
    checkers = {v: Checker(EXACT) for v in coeffs.DUNKL_VARIANTS}
    for n in range(2, nmax + 1):
        for k in range(1, n):
            T = coeffs.lambda_recurrence(D, k, n)
            for deg in range(N):
                for v, vc in checkers.items():
                    vc.entry(f"{k},{n}", k * 100 + n, deg,
                             coeffs.dunkl_example_entry(kappa, k, n, deg, v), T[deg])
    matched = [v for v in DUNKL_CANDIDATES if checkers[v].ok]
    chk = Checker(EXACT)
    chk.flag("expanded form matches", checkers[coeffs.EXPANDED].ok)
    chk.flag("some factored candidate matches", bool(matched))
    discrepancies = {v: [{"k": r // 100, "n": r % 100, "degree": c} for r, c, *_ in
                         vc.witnesses[:MAX_WITNESSES]]
                     for v, vc in checkers.items() if not vc.ok}
    counts = {v: len(vc.witnesses) for v, vc in checkers.items()}
    details = {"candidates": list(DUNKL_CANDIDATES), "matched": matched,
               "unique": len(matched) == 1, "mismatch_counts": counts,
               "discrepancies": discrepancies}
    return chk.report("dunkl_example", w.label, {"kappa": kappa, "nmax": nmax}, N, details)


def verify_dunkl_consistency(kappa, N: int = 21) -> VerifyReport:
    """Direct Dunkl operator versus the weighted derivative for Dunkl weights."""
    kappa = Fraction(kappa)
    w = WeightSequence.dunkl(kappa)
    dphi = standard_ops(w).dphi
    chk = Checker(EXACT)
    for deg in range(N):
        f = [0] * deg + [Fraction(1)]
        direct = dunkl_apply(f, kappa, N)
        via = apply(dphi, f, N)
        for i in range(N):
            chk.entry("T = dphi", i, deg, direct[i], via[i])
    # spot values of the monomial action
    chk.entry("T z = 1 + 2 kappa", 0, 1, dunkl_apply([0, 1], kappa, 2)[0], 1 + 2 * kappa)
    return chk.report("dunkl_consistency", w.label, {"kappa": kappa}, N)


# Stirling degeneration ----------------------------------------------------------------

def verify_stirling(nmax: int = 7, N: int = 32) -> VerifyReport:
    D = identity(Fraction(1))
    chk = Checker(EXACT)
    head = {}
    for n in range(1, nmax + 1):
        for k in range(1, n + 1):
            L = coeffs.lambda_recurrence(D, k, n)
            s = coeffs.stirling(n, k)
            for deg in range(n, N):
                chk.entry("tail = S(n,k)", k * 100 + n, deg, L[deg], s)
            below = [L[d] for d in range(n) if L[d] != s]
            if below:
                head[f"{k},{n}"] = len(below)
    details = {"tail_from_degree": "n", "low_degree_entries_differing": head}
    return chk.report("stirling", "D=id", {"nmax": nmax}, N, details)


# contraction --------------------------------------------------------------------------

def verify_contraction(w: WeightSequence, N: int, trials: int = 100, seed: int = 0
                       ) -> VerifyReport:
    """||R0 f||^2 <= ||f||^2 for random real polynomials (non-decreasing weights)."""
    chk = Checker(w.mode)
    nondecreasing = w.is_nondecreasing(N)
    chk.flag("weights non-decreasing", nondecreasing)
    R0 = standard_ops(w).R0
    rng = random.Random(f"contraction:{seed}:{w.label}")
    worst = None
    if nondecreasing:
        for t in range(trials):
            deg = rng.randint(0, N - 1)
            f = [w.mode.coerce(random_rational(rng, -20, 20)) for _ in range(deg + 1)]
            lhs, rhs = norm_sq(apply(R0, f, N), w), norm_sq(f, w)
            if not lhs <= rhs:
                chk.witnesses.append((t, deg, lhs, rhs))
                chk.flag("norm inequality", False)
            gap = rhs - lhs
            worst = gap if worst is None or gap < worst else worst
    details = {"trials": trials, "min_gap": worst}
    return chk.report("contraction", w.label, {"trials": trials, "seed": seed}, N, details)


# Mittag-Leffler float mode -------------------------------------------------------------

def verify_ml_classic(N: int = 24, rho=1.0, mu=1.0, tolerance: float = 1e-9) -> VerifyReport:
    """Mittag-Leffler weights with rho = mu = 1 against exact classic-Fock matrices."""
    mode = EngineMode(exact=False, tolerance=tolerance)
    ml = WeightSequence.mittag_leffler(rho, mu, mode)
    classic = WeightSequence.classic()
    chk = Checker(mode)
    ops_f, ops_e = standard_ops(ml), standard_ops(classic)
    words = ["R0", "I", "Iphi", "dphi", "Mz", "D0"]
    for name in words:
        Mf = to_matrix(getattr(ops_f, name), N, 1.0)
        Me = to_matrix(getattr(ops_e, name), N)
        chk.matrices(name, Mf, _to_float(Me))
    for a, b in (("dphi", "Mz"), ("R0", "Iphi")):
        A, B = getattr(ops_f, a), getattr(ops_f, b)
        chk.matrices(f"[{a},{b}]", commutator(A, B, N, 1.0),
                     _to_float(commutator(getattr(ops_e, a), getattr(ops_e, b), N)))
    chk.matrices("R0* in ml", weighted_adjoint(to_matrix(ops_f.R0, N, 1.0), ml),
                 _to_float(weighted_adjoint(to_matrix(ops_e.R0, N), classic)))
    # raw weights grow like n!, so compare the ratios that enter the operators
    for n in range(N):
        chk.entry("phi_n / phi_{n+1}", n, n, ml.ratio(n), float(classic.ratio(n)))
    return chk.report("ml_classic", ml.label, {"rho": rho, "mu": mu}, N)


def _to_float(M: TruncMatrix) -> TruncMatrix:
    return TruncMatrix([[float(x) for x in r] for r in M.rows], list(M.trusted), M.shift)


# registry ------------------------------------------------------------------------------

def _param(params, key, default=None, cast=int):
    if key in params:
        try:
            return cast(params[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {params[key]!r}") from exc
    if default is None:
        raise ConfigError(f"missing parameter {key!r}")
    return default


def _kappa_of(w):
    if w.family != "dunkl":
        raise ConfigError(f"identity needs a dunkl family, got {w.label}")
    return w.params["kappa"]


def _pair_for(w, params):
    name = _param(params, "pair", "R0,Iphi", str)
    A, B = named_pair(w, name)
    return A, B, name


def _run_expansion(w, params, N):
    A, B, name = _pair_for(w, params)
    return verify_expansion(w, A, B, _param(params, "n", 2), N, name)


def _run_adjoint_condition(w, params, N):
    A, B, name = _pair_for(w, params)
    return verify_adjoint_condition(A, B, w, N, name)


def _fp_weights(w, params):
    p = _param(params, "p", w.params.get("p", 1) if w.family == "pfock" else 1)
    if w.family == "pfock" and w.params["p"] == p:
        return p, w
    if w.family == "classic" and p == 1:
        return p, w
    return p, WeightSequence.pfock(p, w.mode)


def _run_fp_adjoint(w, params, N):
    p, wp = _fp_weights(w, params)
    return verify_fp_adjoint(p, N, wp)


def _run_fp_commutator(w, params, N):
    p, wp = _fp_weights(w, params)
    return verify_fp_commutator(p, N, wp)


IDENTITIES = {
    "commutator_seed": lambda w, prm, N: verify_commutator_seed(N, w),
    "shift_lemmas": lambda w, prm, N: verify_shift_lemmas(N, _param(prm, "seed", "0", str), w),
    "expansion": _run_expansion,
    "coeff_routes": lambda w, prm, N: verify_coeff_routes(
        prm.get("seed", "D0"), N, _param(prm, "nmax", 6)),
    "reference_values": lambda w, prm, N: verify_reference_values(N),
    "fp_adjoint": _run_fp_adjoint,
    "fp_commutator": _run_fp_commutator,
    "adjoint_condition": _run_adjoint_condition,
    "adjoint_iff": lambda w, prm, N: verify_adjoint_iff(
        w, _param(prm, "p", 1), N, _param(prm, "which", ASTAR, str),
        _param(prm, "trials", 10), _param(prm, "seed", 0)),
    "general_commutator": lambda w, prm, N: verify_general_commutator_solved(
        w, _param(prm, "m", 1), N, _param(prm, "which", ASTAR, str)),
    "stirling_commutator": lambda w, prm, N: verify_stirling_commutator(_param(prm, "m", 2), N),
    "entry_formulas": lambda w, prm, N: verify_entry_formulas(
        None if prm.get("seed") == "D0" else w, _param(prm, "kind", coeffs.LAMBDA, str), N,
        _param(prm, "nmax", 6)),
    "dunkl_example": lambda w, prm, N: verify_dunkl_example(_kappa_of(w), N,
                                                            _param(prm, "nmax", 7)),
    "dunkl_consistency": lambda w, prm, N: verify_dunkl_consistency(_kappa_of(w), N),
    "stirling": lambda w, prm, N: verify_stirling(_param(prm, "nmax", 7), N),
    "contraction": lambda w, prm, N: verify_contraction(
        w, N, _param(prm, "trials", 100), _param(prm, "seed", 0)),
    "ml_classic": lambda w, prm, N: verify_ml_classic(N),
}


def run_identity(name: str, w: WeightSequence, params: dict, N: int) -> VerifyReport:
    try:
        runner = IDENTITIES[name]
    except KeyError:
        raise ConfigError(f"unknown identity {name!r}; known: {', '.join(IDENTITIES)}") from None
    return runner(w, params, N)
