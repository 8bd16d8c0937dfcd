"""Specialist review sessions: suggestion pools, decision log, persistence.

A session stores the candidate ranking computed once at creation plus an
append-only decision log. Every view (suggestions, export) is a pure fold
of the log over that immutable ranking, which makes state replayable and
crash-safe: losing an unflushed decision never corrupts a session.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import threading
import uuid
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ConflictError, DomainError, NotFoundError
from .evalbench import GT_HEADER
from .ingest import load_table, split_columns
from .matcher import MatchConfig, rank_candidates
from .preprocess import build_histogram, normalize_histogram, shared_edges

ACTIONS = ("accept", "mark_removed", "mark_new", "undo")


@dataclass(frozen=True)
class Decision:
    action: str
    base_column: str | None = None
    new_column: str | None = None

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise DomainError(f"unknown action {self.action!r}")
        if self.action == "accept" and not (self.base_column and self.new_column):
            raise DomainError("accept needs base_column and new_column")
        if self.action == "mark_removed" and not self.base_column:
            raise DomainError("mark_removed needs base_column")
        if self.action == "mark_new" and not self.new_column:
            raise DomainError("mark_new needs new_column")


@dataclass
class FoldedState:
    accepted: dict[str, str]
    removed: list[str]
    marked_new: list[str]

    @property
    def consumed(self) -> set[str]:
        return set(self.accepted.values()) | set(self.marked_new)

    @property
    def resolved(self) -> set[str]:
        return set(self.accepted) | set(self.removed)


def fold_decisions(decisions) -> FoldedState:
    """Collapse the log into effective decisions; undo pops the stack."""
    effective: list[Decision] = []
    for d in decisions:
        if d.action == "undo":
            if not effective:
                raise ConflictError("nothing to undo")
            effective.pop()
        else:
            effective.append(d)
    state = FoldedState({}, [], [])
    for d in effective:
        if d.action == "accept":
            state.accepted[d.base_column] = d.new_column
        elif d.action == "mark_removed":
            state.removed.append(d.base_column)
        else:
            state.marked_new.append(d.new_column)
    return state


def _column_histogram(values, bins: int) -> dict | None:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return None
    h = normalize_histogram(build_histogram(arr, shared_edges(arr, arr, bins=bins)))
    return {
        "edges": [float(e) for e in h.edges],
        "counts": [float(w) for w in h.normalized],
    }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class SessionStore:
    """One JSON document per session, written atomically."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.json"

    def _write(self, doc: dict):
        path = self._path(doc["id"])
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def create(self, base_path, new_path, config: MatchConfig = MatchConfig()) -> dict:
        base_table = load_table(base_path)
        new_table = load_table(new_path)
        base_cols, unscored_base = split_columns(base_table)
        new_cols, unscored_new = split_columns(new_table)
        ranked = {
            col.name: [
                {
                    "new_column": c.new_column,
                    "p_value": c.p_value,
                    "statistic": c.statistic,
                    "comparable": c.comparable,
                }
                for c in rank_candidates(col, new_cols, config)
            ]
            for col in base_cols
        }
        doc = {
            "id": uuid.uuid4().hex,
            "base_release": base_table.name,
            "new_release": new_table.name,
            "config": asdict(config),
            "created": _now(),
            "updated": _now(),
            "base_columns": [c.name for c in base_cols],
            "new_columns": [c.name for c in new_cols],
            "unscored_base": unscored_base,
            "unscored_new": unscored_new,
            "ranked": ranked,
            "histograms": {
                "base": {c.name: _column_histogram(c.values, config.bins) for c in base_cols},
                "new": {c.name: _column_histogram(c.values, config.bins) for c in new_cols},
            },
            "decisions": [],
        }
        self._write(doc)
        return doc

    def load(self, session_id: str) -> dict:
        path = self._path(session_id)
        if not path.exists():
            raise NotFoundError(f"no session {session_id!r}")
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def list_sessions(self) -> list[dict]:
        out = []
        for path in sorted(self.root.glob("*.json")):
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
            state = fold_decisions(decisions_of(doc))
            out.append(
                {
                    "id": doc["id"],
                    "base_release": doc["base_release"],
                    "new_release": doc["new_release"],
                    "decided": len(state.resolved),
                    "total": len(doc["base_columns"]),
                }
            )
        return out

    def record(self, session_id: str, decision: Decision) -> dict:
        """Validate against current state, append, persist. Returns the doc."""
        with self._lock(session_id):
            doc = self.load(session_id)
            _validate_decision(doc, decision)
            doc["decisions"].append(asdict(decision))
            doc["updated"] = _now()
            self._write(doc)
            return doc


def decisions_of(doc: dict) -> list[Decision]:
    return [Decision(**d) for d in doc["decisions"]]


def _validate_decision(doc: dict, decision: Decision):
    state = fold_decisions(decisions_of(doc))
    if decision.action == "undo":
        fold_decisions(decisions_of(doc) + [decision])  # raises on empty history
        return
    base, new = decision.base_column, decision.new_column
    if base is not None and base not in doc["base_columns"]:
        raise DomainError(f"unknown base column {base!r}")
    if new is not None and new not in doc["new_columns"]:
        raise DomainError(f"unknown new column {new!r}")
    if base is not None and base in state.resolved:
        raise ConflictError(f"base column {base!r} already resolved")
    if new is not None and new in state.consumed:
        raise ConflictError(f"new column {new!r} already consumed")


def suggestions(doc: dict, k: int = 3) -> dict[str, list[dict]]:
    """Unresolved base columns mapped to their top-k unconsumed candidates."""
    if k < 1:
        raise DomainError("k must be >= 1")
    state = fold_decisions(decisions_of(doc))
    out: dict[str, list[dict]] = {}
    for base in doc["base_columns"]:
        if base in state.resolved:
            continue
        pool = [
            c for c in doc["ranked"][base] if c["new_column"] not in state.consumed
        ]
        out[base] = [
            {
                "new_column": c["new_column"],
                "p_value": c["p_value"],
                "statistic": c["statistic"],
                "rank": i + 1,
            }
            for i, c in enumerate(pool[:k])
        ]
    return out


def export_csv(doc: dict) -> str:
    """Decided mapping in ground-truth CSV form; undecided flagged in comments."""
    state = fold_decisions(decisions_of(doc))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(GT_HEADER)
    for base in doc["base_columns"]:
        if base in state.accepted:
            new = state.accepted[base]
            writer.writerow([base, new, "same" if base == new else "renamed"])
        elif base in state.removed:
            writer.writerow([base, "", "removed"])
    for new in doc["new_columns"]:
        if new in state.marked_new:
            writer.writerow(["", new, "added"])
    for b in doc["base_columns"]:
        if b not in state.resolved:
            writer.writerow([f"# undecided base: {b}"])
    for n in doc["new_columns"]:
        if n not in state.consumed:
            writer.writerow([f"# undecided new: {n}"])
    return buf.getvalue()
