"""File-backed session persistence and interaction logging.

Sessions append a JSON snapshot line on every mutation; loading keeps the
latest snapshot per id, skipping corrupt lines with a warning instead of
failing.  The event log is append-only and rides along in the snapshot.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .engine import RefineConfig, SessionState
from .tasks import Task
from .vecsearch import RankedResults, RocchioParams, Vector

log = logging.getLogger(__name__)

EVENT_KINDS = ("query", "page_change", "option_selected", "none_selected")


@dataclass
class SessionRecord:
    session_id: str
    state: SessionState
    method: str
    created: float
    updated: float
    events: list[dict] = field(default_factory=list)
    question: dict | None = None  # pending question (text/options/kind)
    answers: list[dict] = field(default_factory=list)  # replay trail

    def log_event(self, kind: str, payload: dict | None = None) -> None:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        self.events.append({
            "timestamp": time.time(),
            "kind": kind,
            "payload": payload or {},
        })
        self.updated = time.time()


def state_to_dict(state: SessionState) -> dict:
    return {
        "query_text": state.query_text,
        "method": state.method,
        "query_task": state.query_task.roles() if state.query_task else None,
        "query_vector": {str(t): w for t, w in state.query_vector.entries.items()},
        "result_ids": state.result_ids,
        "ranking": [[fid, score] for fid, score in state.ranking.entries],
        "accepted": state.accepted,
        "rejected_sets": state.rejected_sets,
        "round": state.round,
        "done": state.done,
        "config": {
            "min_support": state.config.min_support,
            "min_confidence": state.config.min_confidence,
            "alpha": state.config.rocchio.alpha,
            "beta": state.config.rocchio.beta,
            "gamma": state.config.rocchio.gamma,
            "top_k": state.config.top_k,
            "max_options": state.config.max_options,
        },
        "kw_pool": state.kw_pool,
        "kw_selected": sorted(state.kw_selected),
        "kw_rejected": sorted(state.kw_rejected),
        "kw_incidence": {fid: sorted(kws) for fid, kws in state.kw_incidence.items()},
    }


def state_from_dict(data: dict, task_table) -> SessionState:
    config = RefineConfig(
        min_support=data["config"]["min_support"],
        min_confidence=data["config"]["min_confidence"],
        rocchio=RocchioParams(
            alpha=data["config"]["alpha"],
            beta=data["config"]["beta"],
            gamma=data["config"]["gamma"],
        ),
        top_k=data["config"]["top_k"],
        max_options=data["config"]["max_options"],
    )
    query_task = Task(**data["query_task"]) if data["query_task"] else None
    state = SessionState(
        query_text=data["query_text"],
        method=data["method"],
        query_task=query_task,
        query_vector=Vector({int(t): w for t, w in data["query_vector"].items()}),
        task_table=task_table,
        result_ids=list(data["result_ids"]),
        ranking=RankedResults(
            entries=[(fid, score) for fid, score in data["ranking"]],
            query_vector=Vector({int(t): w for t, w in data["query_vector"].items()}),
        ),
        accepted=dict(data["accepted"]),
        rejected_sets=[dict(r) for r in data["rejected_sets"]],
        round=data["round"],
        done=data["done"],
        config=config,
    )
    state.kw_pool = list(data.get("kw_pool", []))
    state.kw_selected = set(data.get("kw_selected", []))
    state.kw_rejected = set(data.get("kw_rejected", []))
    state.kw_incidence = {
        fid: frozenset(kws) for fid, kws in data.get("kw_incidence", {}).items()}
    return state


class SessionStore:
    """Append-only JSONL store keyed by session id."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def save(self, record: SessionRecord) -> None:
        line = json.dumps({
            "session_id": record.session_id,
            "method": record.method,
            "created": record.created,
            "updated": record.updated,
            "events": record.events,
            "question": record.question,
            "answers": record.answers,
            "state": state_to_dict(record.state),
        }, sort_keys=True)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def load_raw(self) -> dict[str, dict]:
        """Latest snapshot per session id; corrupt lines are skipped."""
        snapshots: dict[str, dict] = {}
        if not self.path.exists():
            return snapshots
        with open(self.path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    data = json.loads(line)
                    snapshots[data["session_id"]] = data
                except (json.JSONDecodeError, KeyError, TypeError):
                    log.warning("skipping corrupt session line %d in %s", lineno, self.path)
        return snapshots
