"""System description files.

A system is declared in a small YAML document:

    dimension: 2
    nodes: [i, j, k, l]
    edges:
      - [i, i, 1]        # source node, target node, mode label
      - [i, j, 2]
    matrices:
      1: [[0.47, 0.28], [-0.175, 0.365]]   # row-major, one per label
      2: [[0.47, 0.28], [0.07, 0.365]]

Labels are 1-based and must cover 1..m with no gaps.  Node identifiers
are opaque strings ordered by first appearance.  The parser reports the
offending field (and the YAML line for syntax errors) and then runs the
full structural validation before handing back a system object.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .automaton import Automaton, validate
from .system import Csls


class ConfigError(Exception):
    """Malformed or structurally invalid system description."""


def _fail(path, field: str, msg: str):
    raise ConfigError(f"{path}: {field}: {msg}")


def _parse_matrix(path, label: int, raw, n: int) -> np.ndarray:
    field = f"matrices[{label}]"
    if not isinstance(raw, list) or len(raw) != n:
        _fail(path, field, f"expected {n} rows")
    rows = []
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            _fail(path, field, f"row {r}: expected {n} entries")
        try:
            rows.append([float(x) for x in row])
        except (TypeError, ValueError):
            _fail(path, field, f"row {r}: entries must be numbers, got {row!r}")
    return np.array(rows, dtype=np.float64)


def parse_system_config(path) -> Csls:
    """Read a system description file and return a validated system.

    Raises ConfigError with a field (or line) diagnostic on any problem,
    including automaton validation failures.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such file")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else "syntax"
        raise ConfigError(f"{path}: {where}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    known = {"name", "dimension", "nodes", "edges", "matrices"}
    for key in doc:
        if key not in known:
            _fail(path, str(key), f"unknown field (expected one of {sorted(known)})")
    for key in ("dimension", "nodes", "edges", "matrices"):
        if key not in doc:
            _fail(path, key, "missing required field")

    n = doc["dimension"]
    if not isinstance(n, int) or n < 1:
        _fail(path, "dimension", f"must be a positive integer, got {n!r}")

    nodes = doc["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(v, str) for v in nodes):
        _fail(path, "nodes", "must be a list of strings")

    raw_edges = doc["edges"]
    if not isinstance(raw_edges, list) or not raw_edges:
        _fail(path, "edges", "must be a nonempty list")
    edges = []
    for i, e in enumerate(raw_edges):
        if not (isinstance(e, list) and len(e) == 3):
            _fail(path, f"edges[{i}]", f"expected [source, target, label], got {e!r}")
        u, v, lab = e
        if not isinstance(u, str) or not isinstance(v, str):
            _fail(path, f"edges[{i}]", "source and target must be node names")
        if not isinstance(lab, int) or lab < 1:
            _fail(path, f"edges[{i}]", f"label must be a positive integer, got {lab!r}")
        edges.append((u, v, lab))

    raw_mats = doc["matrices"]
    if not isinstance(raw_mats, dict) or not raw_mats:
        _fail(path, "matrices", "must be a nonempty mapping label -> matrix")
    labels = sorted(raw_mats)
    if any(not isinstance(l, int) for l in labels):
        _fail(path, "matrices", "labels must be integers")
    m = labels[-1]
    missing = [l for l in range(1, m + 1) if l not in raw_mats]
    if missing:
        _fail(path, "matrices", f"missing labels {missing} (need 1..{m})")
    if labels[0] < 1:
        _fail(path, "matrices", f"labels must start at 1, got {labels[0]}")
    matrices = [_parse_matrix(path, l, raw_mats[l], n) for l in range(1, m + 1)]

    try:
        automaton = Automaton(nodes, edges, m)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: automaton: {exc}") from exc
    report = validate(automaton)
    if not report:
        listing = "; ".join(report.problems)
        raise ConfigError(f"{path}: invalid automaton: {listing}")
    try:
        return Csls(automaton, tuple(matrices), n)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: system: {exc}") from exc


def bundled_example_path() -> Path:
    """Filesystem path of the example system shipped with the package."""
    return Path(resources.files("cslscert").joinpath("data", "example1.cfg"))
