"""Atomic, byte-reproducible artifact writing.

Every artifact is written to a temporary file in the destination directory
and renamed into place, so readers never observe partial output.  Floats are
serialised with repr (shortest round-trip form) and JSON keys are sorted;
re-running with the same inputs reproduces every byte.  No artifact embeds a
timestamp.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path

__all__ = [
    "atomic_write_text",
    "sidecar_path",
    "write_json",
    "read_json",
    "canonical_json",
    "json_safe",
    "config_sha256",
    "write_eta_samples",
    "read_eta_samples",
]


def atomic_write_text(path, text: str) -> None:
    """Write text via a temp file + rename in the destination directory."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path) -> Path:
    """Metadata sidecar convention: append .meta.json to the artifact name."""
    p = Path(path)
    return p.with_name(p.name + ".meta.json")


def json_safe(obj):
    """Copy of a JSON-ish tree with non-finite floats replaced by strings."""
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    atomic_write_text(path, canonical_json(obj))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def config_sha256(obj) -> str:
    """Hash of the compact canonical JSON form of a config object."""
    compact = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(compact.encode()).hexdigest()


def write_eta_samples(samples, metadata: dict, path) -> None:
    """Persist regulator samples as CSV (trajectory_id,eta_value) + sidecar."""
    lines = ["trajectory_id,eta_value"]
    lines.extend(f"{i},{s.value!r}" for i, s in enumerate(samples))
    atomic_write_text(path, "\n".join(lines) + "\n")
    write_json(sidecar_path(path), metadata)


def read_eta_samples(path):
    """Read samples written by write_eta_samples; returns (values, metadata)."""
    import numpy as np

    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)[:, 1]
    return values, read_json(sidecar_path(path))
