"""Weight sequences phi_n and the weighted inner product they define.

A space of power series is fixed by positive weights with phi_0 = 1:
``<z^n, z^m> = phi_n * delta_{nm}``.
"""
from __future__ import annotations

import json
import random
import threading
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Callable, Sequence

from .scalar import EXACT, FLOAT, EngineMode, UnsupportedInExactMode, gamma_fn, parse_scalar


class MissingWeight(IndexError):
    pass


class InvalidWeight(ValueError):
    pass


class FamilySpecError(ValueError):
    pass


def rising(x, n: int):
    """Pochhammer symbol (x)_n = x (x+1) ... (x+n-1)."""
    out = 1
    for j in range(n):
        out *= x + j
    return out


class WeightSequence:
    """Memoized weights for one family.

    Use the classmethods (:meth:`classic`, :meth:`pfock`, :meth:`mittag_leffler`,
    :meth:`dunkl`, :meth:`custom`) or :func:`parse_family`.
    """

    def __init__(self, family: str, params: dict, generator: Callable[[int], object],
                 mode: EngineMode = EXACT, label: str | None = None,
                 length: int | None = None):
        self.family = family
        self.params = dict(params)
        self.mode = mode
        self.label = label or family
        self.length = length
        self._gen = generator
        self._memo: dict[int, object] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"WeightSequence({self.label!r}, mode={self.mode})"

    # families ---------------------------------------------------------------

    @classmethod
    def classic(cls, mode: EngineMode = EXACT):
        return cls("classic", {}, factorial, mode, "classic")

    @classmethod
    def pfock(cls, p: int, mode: EngineMode = EXACT):
        if int(p) != p or p < 1:
            raise FamilySpecError(f"pfock needs a positive integer p, got {p!r}")
        p = int(p)
        return cls("pfock", {"p": p}, lambda n: factorial(n) ** p, mode, f"pfock:p={p}")

    @classmethod
    def mittag_leffler(cls, rho: float, mu: float, mode: EngineMode = FLOAT):
        if mode.exact:
            raise UnsupportedInExactMode("Mittag-Leffler weights need float mode")
        rho, mu = float(rho), float(mu)
        if not (rho > 0 and mu > 0):
            raise FamilySpecError("Mittag-Leffler needs rho > 0 and mu > 0")
        g_mu = gamma_fn(mu)
        # renormalized so that phi_0 = 1; ratios are unchanged
        return cls("ml", {"rho": rho, "mu": mu},
                   lambda n: gamma_fn(mu + n / rho) / g_mu, mode,
                   f"ml:rho={rho:g},mu={mu:g}")

    @classmethod
    def dunkl(cls, kappa, mode: EngineMode = EXACT):
        kappa = Fraction(kappa) if mode.exact else float(kappa)
        if not kappa > 0:
            raise FamilySpecError("dunkl needs kappa > 0")
        half = Fraction(1, 2)
        one = Fraction(1) if mode.exact else 1.0

        def gen(n):
            j, odd = divmod(n, 2)
            if odd:
                j += 1
            return one * factorial(n) * rising(kappa + half, j) / rising(half, j)

        return cls("dunkl", {"kappa": kappa}, gen, mode, f"dunkl:kappa={kappa}")

    @classmethod
    def custom(cls, entries: Sequence | Callable[[int], object], mode: EngineMode = EXACT,
               label: str = "custom"):
        if callable(entries):
            return cls("custom", {}, entries, mode, label)
        values = list(entries)
        return cls("custom", {}, values.__getitem__, mode, label, length=len(values))

    @classmethod
    def seeded(cls, seed: int, mode: EngineMode = EXACT):
        """Random non-decreasing rational weights, reproducible from ``seed``."""
        cache = [Fraction(1)]

        def gen(n):
            while len(cache) <= n:
                rng = random.Random(f"weights:{seed}:{len(cache)}")
                step = 1 + Fraction(rng.randint(0, 12), rng.randint(1, 7))
                cache.append(cache[-1] * step)
            return cache[n]

        return cls("custom", {"seed": seed}, gen, mode, f"custom:seed={seed}")

    # access -----------------------------------------------------------------

    def phi(self, n: int):
        try:
            return self._memo[n]
        except KeyError:
            pass
        if n < 0:
            raise MissingWeight(f"negative weight index {n}")
        if self.length is not None and n >= self.length:
            raise MissingWeight(f"{self.label}: no weight supplied for index {n}")
        value = self.mode.coerce(self._gen(n))
        if not value > 0:
            raise InvalidWeight(f"{self.label}: phi_{n} = {value} is not positive")
        if n == 0 and not self.mode.close(value, 1):
            raise InvalidWeight(f"{self.label}: phi_0 must be 1, got {value}")
        with self._lock:
            self._memo.setdefault(n, value)
        return value

    __getitem__ = phi

    def ratio(self, n: int):
        """phi_n / phi_{n+1}; zero for n < 0 (convention phi_{-1} = 0)."""
        if n < 0:
            return self.mode.coerce(0)
        return self.phi(n) / self.phi(n + 1)

    def values(self, N: int) -> list:
        return [self.phi(n) for n in range(N)]

    def perturbed(self, k: int, delta=1):
        """Copy with phi_k replaced by phi_k + delta (negative controls)."""
        base = self

        def gen(n):
            v = base.phi(n)
            return v + delta if n == k else v

        return WeightSequence(self.family, {**self.params, "perturbed": k}, gen, self.mode,
                              f"{self.label}+perturb[{k}]", self.length)

    def is_nondecreasing(self, N: int) -> bool:
        vals = self.values(N)
        return all(x <= y for x, y in zip(vals, vals[1:]))


def inner_product(f: Sequence, g: Sequence, w: WeightSequence):
    """sum_n phi_n f_n g_n over the common index range (real coefficients)."""
    total = w.mode.coerce(0)
    for n in range(min(len(f), len(g))):
        if f[n] and g[n]:
            total += w.phi(n) * f[n] * g[n]
    return total


def norm_sq(f: Sequence, w: WeightSequence):
    return inner_product(f, f, w)


def kernel_eval(w: WeightSequence, x, N: int):
    """Truncated reproducing kernel sum_{n<N} x^n / phi_n, with x = z * conj(w)."""
    x = w.mode.coerce(x)
    total = w.mode.coerce(0)
    power = w.mode.coerce(1)
    for n in range(N):
        total += power / w.phi(n)
        power *= x
    return total


def _parse_params(body: str, allowed: tuple[str, ...], bare: bool = False) -> dict:
    """``key=value`` pairs; a lone bare value is allowed for one-parameter families."""
    body = body.strip()
    if bare and body and "=" not in body:
        return {allowed[0]: body}
    params = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        if "=" not in item:
            raise FamilySpecError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        if key.strip() not in allowed:
            raise FamilySpecError(f"unknown parameter {key.strip()!r}")
        params[key.strip()] = value.strip()
    return params


def parse_family(spec: str, mode: EngineMode | None = None,
                 base_dir: str | Path | None = None) -> WeightSequence:
    """Parse a family spec: ``classic``, ``pfock:p=2``, ``ml:rho=1.0,mu=1.0``,
    ``dunkl:kappa=1/2``, ``custom:@file.json`` or ``custom:seed=7``. The
    one-parameter families also take a bare value (``pfock:2``, ``dunkl:1/2``).

    ``mode=None`` picks exact mode, except Mittag-Leffler which defaults to float.
    """
    name, _, body = spec.strip().partition(":")
    name = name.lower()
    try:
        if name == "classic":
            return WeightSequence.classic(mode or EXACT)
        if name == "pfock":
            p = int(_parse_params(body, ("p",), bare=True).get("p", 1))
            return WeightSequence.pfock(p, mode or EXACT)
        if name in ("ml", "mittag-leffler"):
            params = _parse_params(body, ("rho", "mu"))
            return WeightSequence.mittag_leffler(float(Fraction(params.get("rho", "1"))),
                                                 float(Fraction(params.get("mu", "1"))),
                                                 mode or FLOAT)
        if name == "dunkl":
            params = _parse_params(body, ("kappa",), bare=True)
            if "kappa" not in params:
                raise FamilySpecError("dunkl needs kappa=<rational>")
            return WeightSequence.dunkl(Fraction(params["kappa"]), mode or EXACT)
        if name == "custom":
            mode = mode or EXACT
            if body.startswith("@"):
                path = Path(body[1:])
                if base_dir is not None and not path.is_absolute():
                    path = Path(base_dir) / path
                raw = json.loads(path.read_text())
                if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
                    raise FamilySpecError("custom weight file must be a JSON array of strings")
                return WeightSequence.custom([parse_scalar(s, mode) for s in raw], mode,
                                             label=f"custom:@{body[1:]}")
            params = _parse_params(body, ("seed",))
            if "seed" in params:
                return WeightSequence.seeded(int(params["seed"]), mode)
            raise FamilySpecError("custom needs @file.json or seed=<int>")
    except (ValueError, ZeroDivisionError, OSError) as exc:
        if isinstance(exc, (FamilySpecError, UnsupportedInExactMode)):
            raise
        raise FamilySpecError(f"bad family spec {spec!r}: {exc}") from exc
    raise FamilySpecError(f"unknown family {name!r}")
