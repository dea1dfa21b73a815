"""Output artifacts: shortest round-trip CSV, canonical JSON, run manifests.

Every file is written atomically (temp file + rename) and floats use
``repr`` shortest round-trip formatting, so identical runs produce
byte-identical files and a stored manifest replays to the same bytes.
"""

import json
import os
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "fmt_float",
    "write_csv_atomic",
    "write_json_atomic",
    "RunManifest",
]


def fmt_float(x) -> str:
    return repr(float(x))


def _atomic_write(path, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv_atomic(path, header, rows):
    """Write a matrix (or iterable of rows) as CSV with full precision."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json_atomic(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


@dataclass
class RunManifest:
    """Everything needed to re-execute a run bit-identically."""

    kernel: str
    kernel_params: dict
    sampler: str  # "asg" | "rwmh"
    config: dict  # ChainConfig / RwmhConfig fields
    seed: int
    engine: str  # engine actually used for the stored artifacts
    output_dir: str
    timestamp: str
    version: str
    data_source: dict | None = None  # lasso_bridge input description

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(**d)
