"""CSV/JSON writers shared by the CLI.

Floats are written with 17 significant digits so every value round-trips.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os
import platform
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_matrix_csv(path: Path, matrix: np.ndarray) -> Path:
    with open(path, "w", newline="") as fh:
        for row in np.asarray(matrix, dtype=float):
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def ensure_dir(path: Path) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise PermissionError(f"output directory {path} is not writable")
    return path


def config_hash(normalized: dict) -> str:
    blob = json.dumps(_jsonable(normalized), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def versions() -> dict:
    import scipy

    from . import __version__

    return {
        "tpaopt": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def write_manifest(
    outdir: Path,
    command: str,
    argv: Sequence[str],
    normalized: dict,
    files: Sequence[Path],
    extra: dict | None = None,
) -> Path:
    """Run record; the only output file allowed to differ between reruns."""
    manifest = {
        "command": command,
        "argv": list(argv),
        "config": normalized,
        "config_hash": config_hash(normalized),
        "versions": versions(),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "files": sorted(str(Path(f).name) for f in files),
    }
    if extra:
        manifest.update(extra)
    return write_json(outdir / "manifest.json", manifest)
