"""
File operation utilities

Deterministic CSV/JSON writers with a header block, and numpy archives for the
cache. Every write goes to a temporary sibling first and is moved into place
with os.replace, so readers never see a partial file.
"""
import csv
import io
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


logger = logging.getLogger(__name__)

ARTIFACT_VERSION = "1"


def canonical_json(payload: Any) -> str:
    """Sorted keys, no whitespace, floats rendered with repr; stable across runs."""
    return json.dumps(_normalize(payload), sort_keys=True, separators=(",", ":"), allow_nan=True)


def _normalize(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(key): _normalize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_normalize(item) for item in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def header_lines(header: Mapping[str, Any]) -> list[str]:
    """'# key: value' lines, the artifact version first, then sorted keys."""
    lines = [f"# artifact_version: {ARTIFACT_VERSION}"]
    for key in sorted(header):
        lines.append(f"# {key}: {canonical_json(header[key])}")
    return lines


def write_atomic(path: Path, text: str) -> Path:
    """Write text to path through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    temp_file = Path(temp_name)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(temp_file, path)
    except OSError:
        cleanup_temp_file(temp_file)
        raise
    logger.debug("Wrote %s (%d bytes)", path, len(text))
    return path


def render_csv(header: Mapping[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    for line in header_lines(header):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(value) for value in row])
    return buffer.getvalue()


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, bool):
        return "true" if value else "false"
    normalized = _normalize(value)
    return normalized if isinstance(normalized, str) else str(normalized)


def render_json(header: Mapping[str, Any], payload: Any) -> str:
    document = {"header": {"artifact_version": ARTIFACT_VERSION, **_normalize(dict(header))}, "result": _normalize(payload)}
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_csv(path: Path, header: Mapping[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return write_atomic(path, render_csv(header, columns, rows))


def save_arrays(path: Path, arrays: Mapping[str, np.ndarray]) -> Path:
    """numpy.savez through a temporary file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_file = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    try:
        with temp_file.open("wb") as handle:
            np.savez(handle, **arrays)
        os.replace(temp_file, path)
    except OSError:
        cleanup_temp_file(temp_file)
        raise
    return path


def load_arrays(path: Path) -> dict[str, np.ndarray]:
    with np.load(path, allow_pickle=False) as archive:
        return {name: archive[name] for name in archive.files}


def cleanup_temp_file(file_path: Path) -> bool:
    """
    Safely delete a temporary file

    Args:
        file_path: Path to file to delete

    Returns:
        True if deleted successfully, False otherwise
    """
    if not file_path or not file_path.exists():
        return False

    try:
        file_path.unlink()
        logger.debug("Cleaned up temporary file: %s", file_path)
        return True
    except (OSError, PermissionError) as e:
        logger.warning("Failed to delete temporary file %s: %s", file_path, e)
        return False


__all__ = [
    "ARTIFACT_VERSION",
    "canonical_json",
    "header_lines",
    "write_atomic",
    "render_csv",
    "render_json",
    "write_csv",
    "save_arrays",
    "load_arrays",
    "cleanup_temp_file",
]
