"""JSON and CSV output. Complex numbers are [re, im]; floats carry 17 significant digits."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import ConfigError
from .models import ModelSpec
from .solvers import EigenPair, SpectralResult

FORMATS = ("json", "csv")


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = "%.17g" % x
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def to_jsonable(obj: Any) -> Any:
    """Plain containers with complex numbers expanded to [re, im]."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text with every float printed as %.17g."""
    data = to_jsonable(obj)
    out: list[str] = []

    def emit(x, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(x, dict):
            if not x:
                out.append("{}")
                return
            out.append("{\n")
            for i, (k, v) in enumerate(x.items()):
                out.append(pad + json.dumps(k) + ": ")
                emit(v, level + 1)
                out.append(",\n" if i < len(x) - 1 else "\n")
            out.append(end + "}")
        elif isinstance(x, list):
            # short numeric lists (complex pairs) stay on one line
            if all(not isinstance(v, (dict, list)) for v in x) and len(x) <= 4:
                out.append("[" + ", ".join(_scalar(v) for v in x) + "]")
                return
            if not x:
                out.append("[]")
                return
            out.append("[\n")
            for i, v in enumerate(x):
                out.append(pad)
                emit(v, level + 1)
                out.append(",\n" if i < len(x) - 1 else "\n")
            out.append(end + "]")
        else:
            out.append(_scalar(x))

    emit(data, 0)
    return "".join(out) + "\n"


def _scalar(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, int):
        return str(v)
    return json.dumps(v, ensure_ascii=False)


def _c(x) -> complex:
    if x is None:
        return complex("nan")
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _f(x) -> float:
    return float("inf") if x is None else float(x)


# SpectralResult <-> dict

def result_to_dict(res: SpectralResult) -> dict:
    return {
        "model": res.model.to_dict(),
        "tolerances": {"solver": res.tol},
        "seed": res.seed,
        "gbz_radius": res.gbz_radius,
        "pairs": [{"E": p.E, "z1": p.z1, "z2": p.z2, "psi": p.psi,
                   "residuals": dict(p.residuals), "tags": list(p.tags)} for p in res.pairs],
        "pairing": res.pairing,
        "diagnostics": res.diagnostics,
    }


def result_from_dict(d: dict, validate: bool = True) -> SpectralResult:
    try:
        model = ModelSpec.from_dict(d["model"])
        pairs = [EigenPair(_c(p["E"]), _c(p["z1"]), _c(p["z2"]),
                           np.array([_c(v) for v in p["psi"]], dtype=complex),
                           {k: _f(v) for k, v in p["residuals"].items()}, tuple(p["tags"]))
                 for p in d["pairs"]]
        pairing = [{"state": int(r["state"]), "q_zero": _c(r["q_zero"]),
                    "p_zero": None if r["p_zero"] is None else _c(r["p_zero"]),
                    "distance": _f(r["distance"])} for r in d.get("pairing", [])]
        res = SpectralResult(model, pairs, float(d["gbz_radius"]), pairing,
                             float(d["tolerances"]["solver"]), int(d.get("seed", 0)),
                             d.get("diagnostics", {}))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed spectral result: {exc}") from exc
    if validate:
        problems = res.validate()
        if problems:
            raise ConfigError("spectral result fails validation: " + "; ".join(problems[:5]))
    return res


def loads_result(text: str, validate: bool = True) -> SpectralResult:
    return result_from_dict(json.loads(text), validate)


# CSV

def csv_text(header: list[str], rows: list[list]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt_float(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def wavefunction_rows(res: SpectralResult) -> tuple[list[str], list[list]]:
    ssh = res.model.kind.value == "ssh"
    header = ["state", "E_re", "E_im", "site", "sublattice", "psi_re", "psi_im", "psi_abs", "tags"]
    rows = []
    for i, p in enumerate(res.pairs):
        for j, v in enumerate(p.psi):
            site, sub = (j // 2 + 1, "AB"[j % 2]) if ssh else (j + 1, "")
            rows.append([i, float(p.E.real), float(p.E.imag), site, sub, float(v.real), float(v.imag),
                         float(abs(v)), ";".join(p.tags)])
    return header, rows


def records_csv(records: list[dict]) -> str:
    """Flat records; complex fields split into _re/_im columns."""
    if not records:
        return ""
    header: list[str] = []
    flat = []
    for r in records:
        row = {}
        for k, v in r.items():
            if isinstance(v, (complex, np.complexfloating)):
                row[k + "_re"], row[k + "_im"] = float(v.real), float(v.imag)
            elif isinstance(v, (np.floating,)):
                row[k] = float(v)
            else:
                row[k] = v
        for k in row:
            if k not in header:
                header.append(k)
        flat.append(row)
    return csv_text(header, [[row.get(k, "") for k in header] for row in flat])


# run configuration

@dataclass
class RunConfig:
    command: str
    model: Optional[ModelSpec] = None
    options: dict = field(default_factory=dict)
    seed: int = 0
    format: str = "json"
    output: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if int(self.jobs) < 1:
            raise ConfigError("jobs must be >= 1")

    def to_dict(self) -> dict:
        return {"command": self.command, "model": None if self.model is None else self.model.to_dict(),
                "options": dict(self.options), "seed": self.seed, "format": self.format,
                "output": self.output, "jobs": self.jobs}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if "command" not in d:
            raise ConfigError("config needs a 'command'")
        model = d.get("model")
        return cls(d["command"], None if model is None else ModelSpec.from_dict(model),
                   dict(d.get("options", {})), int(d.get("seed", 0)), d.get("format", "json"),
                   d.get("output"), int(d.get("jobs", 1)))

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
