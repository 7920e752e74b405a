"""Verification sweeps: identities x families x parameter grid, in a fixed order.

Config (JSON)::

    {"identities": [...], "families": [...], "N": 32, "mode": "exact",
     "grid": {"n": [1, 2], "p": [1, 2], "m": [1, 2], "pair": ["R0,I"], ...}}

Identities whose printed form admits several candidate right-hand sides get a
trailing ``<identity>:consensus`` report: it passes when the candidates that
matched in every instance narrow down to exactly one.
"""
from __future__ import annotations

import json
from itertools import product
from pathlib import Path

from .scalar import parse_mode
from .verify import ASTAR, BSTAR, IDENTITIES, ConfigError, VerifyReport, run_identity
from .weights import FamilySpecError, parse_family

DEFAULT_FAMILIES = ["classic", "pfock:p=2", "pfock:p=3", "dunkl:kappa=1/2", "dunkl:kappa=3/2",
                    "custom:seed=1", "custom:seed=2"]

DEFAULT_GRID = {
    "n": [1, 2, 3, 4, 5, 6],
    "p": [1, 2, 3, 4],
    "m": [1, 2, 3, 4],
    "pair": ["R0,I", "dphi,Mz", "R0,Iphi"],
    "adjoint_pair": ["R0,Iphi", "dphi,Mz"],
    "which": [ASTAR, BSTAR],
    "kind": ["lambda", "gamma"],
    "seed": ["D0", 1, 2, 3],
}

DEFAULT_CONFIG = {
    "identities": list(IDENTITIES),
    "families": DEFAULT_FAMILIES,
    "N": 32,
    "mode": "exact",
    "grid": DEFAULT_GRID,
}

# identity -> (scope, grid axes); scope "once" ignores the family list
_PLAN = {
    "commutator_seed": ("once", ()),
    "shift_lemmas": ("once", ("seed",)),
    "expansion": ("family", ("pair", "n")),
    "coeff_routes": ("once", ("seed",)),
    "reference_values": ("once", ()),
    "fp_adjoint": ("once", ("p",)),
    "fp_commutator": ("once", ("p",)),
    "adjoint_condition": ("family", ("adjoint_pair",)),
    "adjoint_iff": ("family", ("p", "which")),
    "general_commutator": ("family", ("m", "which")),
    "stirling_commutator": ("once", ("m",)),
    "entry_formulas": ("seeded", ("kind",)),
    "dunkl_example": ("dunkl", ()),
    "dunkl_consistency": ("dunkl", ()),
    "stirling": ("once", ()),
    "contraction": ("family", ()),
    "ml_classic": ("once", ()),
}

CONSENSUS = {"fp_commutator", "general_commutator", "stirling_commutator", "entry_formulas",
             "dunkl_example"}

_KEYS = {"identities", "families", "N", "mode", "grid"}


def load_config(path: str | Path) -> dict:
    try:
        config = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read suite config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("suite config must be a JSON object")
    return config


def _validate(config: dict):
    if not isinstance(config, dict):
        raise ConfigError("suite config must be a JSON object")
    unknown = set(config) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    identities = config.get("identities", [])
    families = config.get("families", DEFAULT_FAMILIES)
    if not isinstance(identities, list) or not all(isinstance(x, str) for x in identities):
        raise ConfigError("'identities' must be a list of names")
    for name in identities:
        if name not in _PLAN:
            raise ConfigError(f"unknown identity {name!r}")
    if not isinstance(families, list) or not all(isinstance(x, str) for x in families):
        raise ConfigError("'families' must be a list of family specs")
    N = config.get("N", 32)
    if not isinstance(N, int) or isinstance(N, bool) or N < 2:
        raise ConfigError("'N' must be an integer >= 2")
    grid = dict(DEFAULT_GRID)
    user_grid = config.get("grid", {})
    if not isinstance(user_grid, dict):
        raise ConfigError("'grid' must be an object")
    for key, values in user_grid.items():
        if key not in DEFAULT_GRID:
            raise ConfigError(f"unknown grid axis {key!r}")
        if not isinstance(values, list):
            raise ConfigError(f"grid axis {key!r} must be a list")
        grid[key] = values
    try:
        mode = parse_mode(config.get("mode", "exact"))
    except (ValueError, AttributeError) as exc:
        raise ConfigError(f"bad mode: {exc}") from exc
    return identities, families, N, grid, mode


def plan(config: dict) -> list[tuple[str, str, dict]]:
    """Expand a config into ordered (identity, family spec, params) cases."""
    identities, families, N, grid, _ = _validate(config)
    cases = []
    for name in identities:
        scope, axes = _PLAN[name]
        combos = [dict(zip(axes, values)) for values in product(*(grid[a] for a in axes))]
        if scope == "once":
            cases += [(name, "classic", c) for c in combos]
        elif scope == "dunkl":
            cases += [(name, fam, c) for fam in families if fam.startswith("dunkl")
                      for c in combos]
        elif scope == "seeded":
            cases += [(name, "classic", {**c, "seed": "D0"}) for c in combos]
            cases += [(name, fam, c) for fam in families for c in combos]
        else:
            cases += [(name, fam, c) for fam in families for c in combos]
    return cases


def _rename_pair(params):
    if "adjoint_pair" in params:
        params = dict(params)
        params["pair"] = params.pop("adjoint_pair")
    return params


def run_suite(config: dict) -> list[VerifyReport]:
    """Run every case of ``config``; reports come back in plan order."""
    identities, families, N, grid, mode = _validate(config)
    weights = {}
    for spec in {fam for _, fam, _ in plan(config)}:
        try:
            weights[spec] = parse_family(spec, None if mode.exact else mode)
        except (FamilySpecError, ValueError) as exc:
            raise ConfigError(f"bad family {spec!r}: {exc}") from exc
    reports = []
    for name, fam, params in plan(config):
        reports.append(run_identity(name, weights[fam], _rename_pair(params), N))
    reports += consensus_reports(reports, N)
    return reports


def consensus_reports(reports: list[VerifyReport], N: int) -> list[VerifyReport]:
    groups: dict[tuple, list[VerifyReport]] = {}
    for r in reports:
        if r.identity in CONSENSUS and "matched" in r.details:
            key = (r.identity, r.params.get("which"), r.params.get("kind"))
            groups.setdefault(key, []).append(r)
    out = []
    for (name, which, kind), group in groups.items():
        common = None
        for r in group:
            matched = set(r.details["matched"])
            common = matched if common is None else common & matched
        common = sorted(common or ())
        mode = "float" if any(r.mode == "float" for r in group) else "exact"
        params = {k: v for k, v in (("which", which), ("kind", kind)) if v is not None}
        details = {"matched": common, "instances": len(group),
                   "instances_with_unique_match": sum(1 for r in group if r.details["unique"])}
        status = "fail" if len(common) != 1 else ("pass" if mode == "exact" else "tol_pass")
        if status == "fail":
            details["failed_checks"] = ["exactly one candidate matches every instance"]
        out.append(VerifyReport(f"{name}:consensus", "*", params, N, mode, status,
                                None, [], details))
    return out
