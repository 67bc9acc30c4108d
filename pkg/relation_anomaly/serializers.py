"""Serialization helpers for checkpoints, reports and graph exports."""

from __future__ import annotations

import csv
import io
import json
import os
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


def _default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def serialize_json(data: Any, compact: bool = False) -> str:
    """Serialize data to JSON format.

    Floats are written with ``repr`` precision, so 64-bit values survive a
    write/read cycle bit for bit.

    Args:
        data: Data to serialize
        compact: If True, use compact JSON (minified)

    Returns:
        JSON formatted string
    """
    if compact:
        return json.dumps(data, separators=(",", ":"), default=_default, sort_keys=True)
    return json.dumps(data, indent=2, default=_default, sort_keys=True)


def write_json(path: str, data: Any, compact: bool = False) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_json(data, compact=compact))
        fh.write("\n")
    return path


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def serialize_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as CSV text. Floats use ``repr`` so reruns are byte-identical."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_csv(header, rows))
    return path


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_dot(
    name: str,
    edges: Sequence[tuple[str, str, str, Mapping[str, str]]],
    graph_attrs: Mapping[str, str] | None = None,
) -> str:
    """Serialize a directed graph to Graphviz DOT text.

    Args:
        name: Graph identifier
        edges: ``(source, target, label, attributes)`` per edge
        graph_attrs: Optional graph-level attributes

    Returns:
        DOT formatted string
    """
    lines = [f"digraph {_dot_quote(name)} {{"]
    for key, value in (graph_attrs or {}).items():
        lines.append(f"  {key}={_dot_quote(value)};")

    nodes: list[str] = []
    for src, dst, _, _ in edges:
        for node in (src, dst):
            if node not in nodes:
                nodes.append(node)
    for node in nodes:
        lines.append(f"  {_dot_quote(node)};")

    for src, dst, label, attrs in edges:
        parts = [f"label={_dot_quote(label)}"]
        parts.extend(f"{k}={_dot_quote(v)}" for k, v in attrs.items())
        lines.append(f"  {_dot_quote(src)} -> {_dot_quote(dst)} [{', '.join(parts)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
