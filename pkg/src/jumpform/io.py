"""Chain and field files, and the CSV schemas emitted by the CLI.

A chain file is JSON with the keys of :func:`jumpform.model.make_chain`::

    {"m": [1, 1, 1], "R": [[0, 1, 0], [1, 0, 2], [0, 2, 0]], "kappa": [0, 0, 0.5]}

``kappa`` is optional.  ``{"preset": "brown_chain", "n": 8}`` builds the
2n-state counterexample chain instead.  A field file holds one number per line;
blank lines and lines starting with ``#`` are skipped.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .errors import BadConfig, JumpformError
from .model import Chain, make_chain, random_field

SCHEMAS = {
    "report": ["state_index", "G", "G_tilde", "H", "H_tilde"],
    "norms": ["p", "norm_G", "norm_G_tilde", "norm_H", "norm_H_tilde", "method", "tol"],
    "scan": ["scan_name", "seed", "n", "p", "ratio", "bound_kind"],
    "brown": ["n", "p", "ratio_G_tilde", "normalized", "target_constant", "ratio_H"],
    "mc": ["seed", "n", "T", "paths", "est_M2", "se_M2", "est_sharp", "se_sharp", "est_square", "se_square"],
    "hardy_stein": ["seed", "n", "p", "lhs", "rhs", "rel_err"],
}


def chain_from_dict(data: dict, label: str = "") -> Chain:
    if not isinstance(data, dict):
        raise BadConfig("chain file must hold a JSON object")
    if "preset" in data:
        if data["preset"] != "brown_chain":
            raise BadConfig(f"unknown preset {data['preset']!r}; the only preset is 'brown_chain'")
        from .brown import build_brown_chain

        n = data.get("n")
        if not isinstance(n, int) or n < 1:
            raise BadConfig(f"brown_chain needs a positive integer n, got {n!r}")
        return build_brown_chain(n)[0]
    unknown = set(data) - {"n", "m", "R", "kappa"}
    if unknown:
        raise BadConfig(f"unknown chain keys {sorted(unknown)}")
    if "R" not in data:
        raise BadConfig("chain file needs an 'R' matrix")
    try:
        R = np.asarray(data["R"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise BadConfig(f"R is not a numeric matrix: {exc}") from None
    if R.ndim != 2:
        raise BadConfig(f"R must be a square matrix, got shape {R.shape}")
    m = data.get("m", np.ones(R.shape[0]))
    if "n" in data and data["n"] != R.shape[0]:
        raise BadConfig(f"n = {data['n']} but R is {R.shape[0]}x{R.shape[1]}")
    try:
        return make_chain(m, R, data.get("kappa"), label=label)
    except (JumpformError, ValueError, TypeError) as exc:
        raise BadConfig(str(exc)) from exc


def load_chain(path) -> Chain:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise BadConfig(f"cannot read chain file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise BadConfig(f"{path} is not valid JSON: {exc}") from None
    return chain_from_dict(data, label=path.name)


def chain_to_dict(chain: Chain) -> dict:
    out = {"n": chain.n, "m": chain.m.tolist(), "R": np.asarray(chain.kernel.R).tolist()}
    if not chain.gen.conservative:
        out["kappa"] = chain.gen.kappa.tolist()
    return out


def save_chain(chain: Chain, path) -> None:
    Path(path).write_text(json.dumps(chain_to_dict(chain), indent=2) + "\n")


def load_field(path, n: int) -> np.ndarray:
    vals = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise BadConfig(f"{path}:{lineno}: not a number: {line!r}") from None
    if len(vals) != n:
        raise BadConfig(f"{path} has {len(vals)} values, the chain has {n} states")
    return np.asarray(vals)


def resolve_field(spec: str, chain: Chain) -> np.ndarray:
    """A field file path or a preset.

    Presets: ``random[:seed]``, ``meanzero[:seed]``, ``eigen:k`` (k-th
    eigenfunction, ascending eigenvalue), ``indicator:i`` and ``brown`` (the
    counterexample eigenfunction; brown chains only).
    """
    name, _, arg = spec.partition(":")
    try:
        if name in ("random", "meanzero"):
            return random_field(chain, int(arg or 0), mean_zero=name == "meanzero")
        if name == "eigen":
            return chain.spec.basis[:, int(arg)].copy()
        if name == "indicator":
            f = np.zeros(chain.n)
            f[int(arg)] = 1.0
            return f
    except (ValueError, IndexError) as exc:
        raise BadConfig(f"bad field preset {spec!r}: {exc}") from None
    if name == "brown":
        from .brown import eigenfunction

        if chain.n % 2:
            raise BadConfig("the brown field needs a brown chain")
        return eigenfunction(chain.n // 2)
    if not Path(spec).exists():
        raise BadConfig(f"{spec!r} is neither a field file nor a preset")
    return load_field(spec, chain.n)


def parse_list(text: str, kind=float) -> list:
    try:
        return [kind(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise BadConfig(f"cannot parse {text!r} as a comma-separated list") from None


def _row(obj, header):
    d = asdict(obj) if is_dataclass(obj) else dict(obj)
    return [d[k] for k in header]


def _cell(v):
    # repr round-trips floats exactly; numpy scalars need unwrapping first
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_csv(stream, schema: str, rows) -> None:
    """Rows are dataclasses or mappings containing every header key."""
    header = SCHEMAS[schema]
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in _row(r, header)])


def read_csv(path_or_stream) -> list[dict]:
    if hasattr(path_or_stream, "read"):
        return list(csv.DictReader(path_or_stream))
    with open(path_or_stream, newline="") as fh:
        return list(csv.DictReader(fh))

