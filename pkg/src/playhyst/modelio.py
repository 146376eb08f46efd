"""Model files, CSV output and run configuration.

A model file is JSON lines: a header object followed by one object per
hysteron.  Floats go through ``repr``, so a round trip is exact.
"""
from __future__ import annotations

import configparser
import csv
import json
import os
from typing import Dict, Iterable, List, Sequence

from .core import Truncation
from .curves import curve_from_dict
from .errors import ConfigError
from .model import CurvePair, Hysteron, Model, PlayPair

FORMAT = "playhyst-model"
VERSION = 1


def _constraint_dict(c):
    if isinstance(c, PlayPair):
        return {"type": "play", "alpha": c.alpha, "beta": c.beta}
    return {"type": "curves", "gl": c.gl.to_dict(), "gr": c.gr.to_dict()}


def _constraint_from(d):
    kind = d.get("type")
    if kind == "play":
        return PlayPair(float(d["alpha"]), float(d["beta"]))
    if kind == "curves":
        return CurvePair(curve_from_dict(d["gl"]), curve_from_dict(d["gr"]))
    raise ConfigError(f"unknown constraint type {kind!r}")


def dumps_model(model: Model) -> str:
    lines = [json.dumps({"format": FORMAT, "version": VERSION, "kind": model.kind,
                         "K": model.K, "offset": model.offset})]
    for hy in model.hysterons:
        lines.append(json.dumps({"mu": hy.mu, "constraint": _constraint_dict(hy.constraint),
                                 "trunc": hy.trunc.to_dict()}))
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> Model:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise ConfigError("empty model file")
    try:
        head = json.loads(rows[0])
        recs = [json.loads(r) for r in rows[1:]]
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file is not JSON lines: {exc}") from None
    if head.get("format") != FORMAT:
        raise ConfigError("missing model file header")
    if head.get("version") != VERSION:
        raise ConfigError(f"unsupported model file version {head.get('version')!r}")
    if int(head["K"]) != len(recs):
        raise ConfigError(f"header says K={head['K']} but {len(recs)} records follow")
    hs = []
    for i, r in enumerate(recs):
        try:
            hs.append(Hysteron(float(r["mu"]), _constraint_from(r["constraint"]),
                               Truncation.from_dict(r["trunc"])))
        except KeyError as exc:
            raise ConfigError(f"record {i + 1}: missing field {exc}") from None
    return Model(hs, head["kind"], float(head.get("offset", 0.0)))


def save_model(model: Model, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> Model:
    with open(path) as fh:
        return loads_model(fh.read())


# ---------------------------------------------------------------- CSV

def fmt(x) -> str:
    """17 significant digits, enough to read back the same double."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    d = os.path.dirname(os.fspath(path))
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def read_csv(path) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def read_column(path, name: str) -> List[float]:
    rows = read_csv(path)
    if rows and name not in rows[0]:
        raise ConfigError(f"{path}: no column {name!r}")
    return [float(r[name]) for r in rows]


# ---------------------------------------------------------------- config

def load_config(path, section: str, allowed: Iterable[str]) -> Dict[str, str]:
    """Read ``key = value`` pairs from ``[section]``; unknown keys are errors."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not cp.has_section(section):
        return {}
    allowed = set(allowed)
    out = {}
    for key, val in cp.items(section):
        norm = key.strip().replace("-", "_")
        if norm not in allowed:
            raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
        out[norm] = val.strip()
    return out
