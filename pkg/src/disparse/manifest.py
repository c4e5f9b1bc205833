"""Run manifests, canonical JSON/CSV emission, and atomic file writes.

Every emitted report embeds a manifest: the command, its seeds, the
content digests of all inputs, and the toolkit version.  Reports carry
no wall-clock data, so rerunning the same manifest on the same inputs
reproduces them byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TOOLKIT_VERSION = "0.1.0"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """What produced an output directory, sufficient to reproduce it.

    Output files are recorded by name, relative to the report, so that
    reruns into a different directory stay byte-identical.
    """

    command: str
    seed: int
    inputs: dict[str, str] = field(default_factory=dict)   # role -> path
    digests: dict[str, str] = field(default_factory=dict)  # path -> sha256
    outputs: list[str] = field(default_factory=list)       # emitted file names
    config: dict = field(default_factory=dict)
    version: str = TOOLKIT_VERSION

    @classmethod
    def create(
        cls,
        command: str,
        seed: int,
        inputs: dict[str, str],
        config: dict | None = None,
        outputs: list[str] | None = None,
    ) -> "RunManifest":
        digests = {}
        for path in inputs.values():
            if path and Path(path).is_file():
                digests[str(path)] = file_digest(path)
        return cls(
            command=command,
            seed=seed,
            inputs={k: str(v) for k, v in inputs.items()},
            digests=digests,
            outputs=list(outputs or []),
            config=config or {},
        )

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "inputs": self.inputs,
            "digests": self.digests,
            "outputs": self.outputs,
            "config": self.config,
            "version": self.version,
        }


def jsonify(obj):
    """Convert numpy scalars/arrays and non-dict mappings to JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, frozenset):
        return sorted(obj)
    return obj


def dumps_canonical(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed layout, trailing newline."""
    return json.dumps(jsonify(obj), sort_keys=True, indent=2) + "\n"


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_report(path, payload: dict, manifest: RunManifest) -> None:
    body = dict(payload)
    body["manifest"] = manifest.to_dict()
    atomic_write_text(path, dumps_canonical(body))


def format_csv(rows) -> str:
    """Render rows with repr() floats for full, stable precision."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(
            [repr(v) if isinstance(v, float) else v for v in jsonify(list(row))]
        )
    return buf.getvalue()


def write_csv_report(path, rows) -> None:
    atomic_write_text(path, format_csv(rows))
