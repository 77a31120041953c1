"""Experiment configs and deterministic report files.

Reports serialize through `canonical_json`: keys sorted, floats printed with
17 significant digits, no whitespace variation.  Two runs with the same
config and cache produce byte-identical files; wall time is printed to the
terminal, never written into the report.
"""

from __future__ import annotations

import dataclasses
import json
import numbers
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

__all__ = [
    "ExperimentConfig",
    "canonical_json",
    "config_from_mapping",
    "load_config",
    "write_report",
]

# experiments that draw random samples; their configs must carry a seed
SAMPLING_KINDS = frozenset({"cls-brudno", "qc-brudno"})

_KNOWN_KINDS = frozenset(
    {
        "kx-search",
        "kx-kraft",
        "cls-entropy",
        "cls-typical",
        "cls-brudno",
        "qc-af",
        "qc-typical",
        "qc-gacs",
        "qc-brudno",
    }
)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    source: Optional[str] = None  # classical source spec path
    site: Optional[str] = None  # density-matrix spec path
    rho: Optional[str] = None  # state spec path
    ensemble: Optional[str] = None  # ensemble spec path
    opu: Optional[str] = None
    n: Optional[int] = None
    n_max: Optional[int] = None
    n_range: Optional[tuple[int, int]] = None
    eps: Optional[float] = None
    trials: Optional[int] = None
    samples: Optional[int] = None
    backend: Optional[str] = None
    mode: Optional[str] = None
    max_len: Optional[int] = None
    max_steps: Optional[int] = None
    jobs: Optional[int] = None
    tol: Optional[float] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    format: str = "json"

    def __post_init__(self) -> None:
        if self.kind not in _KNOWN_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.kind in SAMPLING_KINDS and self.seed is None:
            raise ValueError(f"{self.kind} samples randomness; a seed is required")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown report format {self.format!r}")

    def as_mapping(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


def parse_n_range(value) -> tuple[int, int]:
    """Accept "4:12" or a [4, 12] pair; the range is inclusive."""
    if isinstance(value, str):
        head, sep, tail = value.partition(":")
        if not sep:
            raise ValueError(f"n_range {value!r} is not of the form lo:hi")
        lo, hi = int(head), int(tail)
    else:
        lo, hi = (int(x) for x in value)
    if lo < 1 or hi < lo:
        raise ValueError(f"bad n_range {value!r}")
    return lo, hi


def config_from_mapping(mapping: Mapping) -> ExperimentConfig:
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    kwargs = {}
    for key, value in mapping.items():
        if key not in fields:
            raise ValueError(f"unknown config field {key!r}")
        if key == "n_range" and value is not None:
            value = parse_n_range(value)
        kwargs[key] = value
    if "kind" not in kwargs:
        raise ValueError("config is missing the experiment kind")
    return ExperimentConfig(**kwargs)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return config_from_mapping(raw)


# ---------------------------------------------------------------------------
# canonical serialization


def _format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        # JSON has no literals for these; keep them greppable and re-loadable
        return f'"{x!r}"'
    text = format(x, ".17g")
    return text if any(c in text for c in ".eE") else text + ".0"


def _encode(obj, parts: list) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True or obj is False:
        parts.append("true" if obj else "false")
    elif isinstance(obj, Fraction):
        parts.append(f'"{obj.numerator}/{obj.denominator}"')
    elif isinstance(obj, numbers.Integral):
        parts.append(str(int(obj)))
    elif isinstance(obj, numbers.Real):
        parts.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, Mapping):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            if i:
                parts.append(",")
            parts.append(json.dumps(key, ensure_ascii=True))
            parts.append(":")
            _encode(obj[key], parts)
        parts.append("}")
    elif isinstance(obj, Sequence):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(",")
            _encode(item, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def canonical_json(obj) -> str:
    parts: list = []
    _encode(obj, parts)
    return "".join(parts)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return format(float(value), ".17g")
    text = str(value)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(cell) for cell in row))
    return "\n".join(lines) + "\n"


def write_report(
    report: Mapping,
    config: ExperimentConfig,
    path: str,
    csv_table: Optional[tuple[Sequence[str], Sequence[Sequence]]] = None,
) -> str:
    """Write the report echoing its config; returns the path written.

    JSON format always writes the full report.  CSV writes the command's
    rate table when it has one and falls back to JSON otherwise.
    """
    payload = dict(report)
    payload["config"] = config.as_mapping()
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    if config.format == "csv" and csv_table is not None:
        header, rows = csv_table
        text = render_csv(header, rows)
    else:
        text = canonical_json(payload) + "\n"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path
