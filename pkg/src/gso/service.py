"""Annotation backend: task queue, worker submissions, consolidation, export.

Workers fetch GIF tasks, submit an ordered SentiPair sequence plus an overall
judgment, and a task is done once the required number of distinct workers has
submitted.  Submissions are appended to a log and fsynced before they are
acknowledged; a periodic snapshot bounds replay time on restart.

The HTTP layer is a thin JSON wrapper over AnnotationStore; one lock makes
every store operation atomic under the threading server.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional
from urllib.parse import parse_qs, urlparse

from .dataset import NOISE_FLAGS, SentimentLabel
from .errors import (
    GsoError,
    InvalidSequence,
    NoAnnotations,
    UnknownTask,
    UnknownWorker,
)
from .ontology import SynsetForest, ValidationReport, search_synsets, validate_sequence


@dataclass(frozen=True)
class TaskRecord:
    gif_id: str
    gif_uri: str = ""
    required_workers: Optional[int] = None  # None falls back to the store default
    duration_s: Optional[float] = None
    noise_flags: tuple[str, ...] = ()


def load_tasks(path: str) -> list[TaskRecord]:
    tasks = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            obj = json.loads(raw)
            flags = tuple(obj.get("noise_flags", ()))
            for flag in flags:
                if flag not in NOISE_FLAGS:
                    raise ValueError(f"{path}:{lineno}: unknown noise flag {flag!r}")
            tasks.append(
                TaskRecord(
                    gif_id=str(obj["gif_id"]),
                    gif_uri=str(obj.get("gif_uri", "")),
                    required_workers=obj.get("required_workers"),
                    duration_s=obj.get("duration_s"),
                    noise_flags=flags,
                )
            )
    return tasks


@dataclass
class WorkerAnnotation:
    worker_id: str
    gif_id: str
    sequence: list[tuple[str, str]]
    judgment: SentimentLabel
    submitted_at: float

    def to_record(self) -> dict:
        return {
            "worker_id": self.worker_id,
            "gif_id": self.gif_id,
            "sequence": [{"modifier": m, "noun": n} for m, n in self.sequence],
            "judgment": self.judgment.value,
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_record(cls, obj: dict) -> "WorkerAnnotation":
        return cls(
            worker_id=obj["worker_id"],
            gif_id=obj["gif_id"],
            sequence=[(p["modifier"], p["noun"]) for p in obj["sequence"]],
            judgment=SentimentLabel(obj["judgment"]),
            submitted_at=obj["submitted_at"],
        )


@dataclass
class ConsolidatedLabel:
    gif_id: str
    label: SentimentLabel
    votes: dict[str, int]
    sequence: list[tuple[str, str]]

    def to_json(self) -> dict:
        return {
            "gif_id": self.gif_id,
            "label": self.label.value,
            "votes": self.votes,
            "sequence": [{"modifier": m, "noun": n} for m, n in self.sequence],
        }


class AnnotationStore:
    """All service state; every public method is atomic."""

    def __init__(
        self,
        forest: SynsetForest,
        tasks: list[TaskRecord],
        workers: list[str],
        state_dir: str,
        required_workers: int = 7,
        lease_seconds: float = 600.0,
        snapshot_every: int = 100,
        clock: Callable[[], float] = time.time,
    ):
        if required_workers < 1:
            raise ValueError("required_workers must be at least 1")
        self.forest = forest
        self.tasks = {t.gif_id: t for t in tasks}
        self.workers = set(workers)
        self.required_default = required_workers
        self.lease_seconds = lease_seconds
        self.snapshot_every = snapshot_every
        self.clock = clock
        self._lock = threading.Lock()
        self._annotations: dict[tuple[str, str], WorkerAnnotation] = {}
        self._leases: dict[tuple[str, str], float] = {}
        os.makedirs(state_dir, exist_ok=True)
        self._log_path = os.path.join(state_dir, "submissions.log")
        self._snapshot_path = os.path.join(state_dir, "snapshot.json")
        self._recover()
        self._log = open(self._log_path, "a", encoding="utf-8")
        self._since_snapshot = 0

    # --- persistence ----------------------------------------------------------

    def _recover(self) -> None:
        offset = 0
        if os.path.exists(self._snapshot_path):
            with open(self._snapshot_path, encoding="utf-8") as fh:
                snap = json.load(fh)
            offset = snap["log_offset"]
            for record in snap["annotations"]:
                ann = WorkerAnnotation.from_record(record)
                self._annotations[(ann.worker_id, ann.gif_id)] = ann
        if os.path.exists(self._log_path):
            with open(self._log_path, encoding="utf-8") as fh:
                fh.seek(offset)
                for raw in fh:
                    raw = raw.strip()
                    if not raw:
                        continue
                    ann = WorkerAnnotation.from_record(json.loads(raw))
                    self._annotations[(ann.worker_id, ann.gif_id)] = ann

    def _write_snapshot_locked(self) -> None:
        self._log.flush()
        os.fsync(self._log.fileno())
        snap = {
            "log_offset": self._log.tell(),
            "annotations": [
                ann.to_record()
                for _, ann in sorted(self._annotations.items())
            ],
        }
        tmp = self._snapshot_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(snap, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._snapshot_path)

    def close(self) -> None:
        with self._lock:
            if not self._log.closed:
                self._write_snapshot_locked()
                self._log.close()

    # --- task state -------------------------------------------------------------

    def _required(self, task: TaskRecord) -> int:
        return task.required_workers or self.required_default

    def _completions_locked(self, gif_id: str) -> int:
        return sum(1 for (_, g) in self._annotations if g == gif_id)

    def _status_locked(self, task: TaskRecord) -> str:
        if self._completions_locked(task.gif_id) >= self._required(task):
            return "done"
        now = self.clock()
        for (worker, gif), expiry in self._leases.items():
            if gif == task.gif_id and expiry > now:
                return "in_progress"
        return "open"

    def _task_view_locked(self, task: TaskRecord) -> dict:
        return {
            "gif_id": task.gif_id,
            "gif_uri": task.gif_uri,
            "status": self._status_locked(task),
            "required_workers": self._required(task),
            "completed_workers": self._completions_locked(task.gif_id),
        }

    def _check_worker(self, worker_id: str) -> None:
        if worker_id not in self.workers:
            raise UnknownWorker(f"worker {worker_id!r} is not registered")

    # --- operations ---------------------------------------------------------------

    def next_task(self, worker_id: str) -> Optional[dict]:
        """Least-completed open task the worker has not already annotated."""
        with self._lock:
            self._check_worker(worker_id)
            candidates = []
            for gif_id in sorted(self.tasks):
                task = self.tasks[gif_id]
                if (worker_id, gif_id) in self._annotations:
                    continue
                completions = self._completions_locked(gif_id)
                if completions >= self._required(task):
                    continue
                candidates.append((completions, gif_id))
            if not candidates:
                return None
            candidates.sort()
            _, gif_id = candidates[0]
            self._leases[(worker_id, gif_id)] = self.clock() + self.lease_seconds
            return self._task_view_locked(self.tasks[gif_id])

    def submit(
        self,
        worker_id: str,
        gif_id: str,
        sequence: list[tuple[str, str]],
        judgment: str | SentimentLabel,
    ) -> dict:
        """Validate, persist (fsync before ack), and recount the task."""
        with self._lock:
            self._check_worker(worker_id)
            task = self.tasks.get(gif_id)
            if task is None:
                raise UnknownTask(f"no task for gif {gif_id!r}")
            judgment = SentimentLabel(judgment)
            result = validate_sequence(sequence, self.forest)
            if isinstance(result, ValidationReport):
                raise InvalidSequence(
                    f"{len(result.issues)} invalid pair(s)",
                    positions=[
                        {"position": i.position, "error": i.kind, "message": i.message}
                        for i in result.issues
                    ],
                )
            ann = WorkerAnnotation(
                worker_id=worker_id,
                gif_id=gif_id,
                sequence=[(m, n) for m, n in sequence],
                judgment=judgment,
                submitted_at=self.clock(),
            )
            self._log.write(json.dumps(ann.to_record(), sort_keys=True) + "\n")
            self._log.flush()
            os.fsync(self._log.fileno())
            self._annotations[(worker_id, gif_id)] = ann
            self._leases.pop((worker_id, gif_id), None)
            self._since_snapshot += 1
            if self._since_snapshot >= self.snapshot_every:
                self._write_snapshot_locked()
                self._since_snapshot = 0
            return {"status": "ok", "task": self._task_view_locked(task)}

    def _consolidate_locked(self, gif_id: str) -> ConsolidatedLabel:
        if gif_id not in self.tasks:
            raise UnknownTask(f"no task for gif {gif_id!r}")
        annotations = [
            ann for (w, g), ann in self._annotations.items() if g == gif_id
        ]
        if not annotations:
            raise NoAnnotations(f"gif {gif_id!r} has no annotations")
        votes: dict[str, int] = {}
        for ann in annotations:
            votes[ann.judgment.value] = votes.get(ann.judgment.value, 0) + 1
        ranked = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))
        if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
            label = SentimentLabel.CANT_JUDGE
            voters = annotations
        else:
            label = SentimentLabel(ranked[0][0])
            voters = [a for a in annotations if a.judgment == label]
        voters.sort(key=lambda a: (len(a.sequence), a.worker_id))
        chosen = voters[(len(voters) - 1) // 2]
        return ConsolidatedLabel(
            gif_id=gif_id,
            label=label,
            votes=votes,
            sequence=list(chosen.sequence),
        )

    def consolidate(self, gif_id: str) -> ConsolidatedLabel:
        """Strict plurality vote; any tie for first place becomes cant_judge.

        The exported sequence is the median-length sequence among the
        annotators who voted for the winning label (all annotators on a tie).
        """
        with self._lock:
            return self._consolidate_locked(gif_id)

    def export(self) -> str:
        """GSO-2015 JSONL for every done task, byte-stable (ordered by gif_id).

        The whole export reads one consistent snapshot of the store.
        """
        lines = []
        with self._lock:
            for gif_id in sorted(self.tasks):
                task = self.tasks[gif_id]
                if self._completions_locked(gif_id) < self._required(task):
                    continue
                consolidated = self._consolidate_locked(gif_id)
                record = {
                    "gif_id": gif_id,
                    "pairs": [{"modifier": m, "noun": n} for m, n in consolidated.sequence],
                    "label": consolidated.label.value,
                }
                if task.duration_s is not None:
                    record["duration_s"] = task.duration_s
                if task.noise_flags:
                    record["noise_flags"] = list(task.noise_flags)
                lines.append(json.dumps(record, sort_keys=True))
        return "".join(line + "\n" for line in lines)

    def stats(self) -> dict:
        with self._lock:
            by_status = {"open": 0, "in_progress": 0, "done": 0}
            for task in self.tasks.values():
                by_status[self._status_locked(task)] += 1
            return {
                "tasks": by_status,
                "task_total": len(self.tasks),
                "annotations": len(self._annotations),
                "workers": sorted(self.workers),
            }


# --- HTTP layer --------------------------------------------------------------------

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".gif": "image/gif",
    ".png": "image/png",
    ".svg": "image/svg+xml",
}


class ServiceHandler(BaseHTTPRequestHandler):
    server_version = "gso-annotation/0.1"

    @property
    def store(self) -> AnnotationStore:
        return self.server.store  # type: ignore[attr-defined]

    @property
    def ui_dir(self) -> Optional[str]:
        return self.server.ui_dir  # type: ignore[attr-defined]

    def log_message(self, format, *args):  # quiet by default
        if os.environ.get("GSO_SERVICE_LOG"):
            super().log_message(format, *args)

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, exc: GsoError) -> None:
        status = 404 if isinstance(exc, (UnknownTask, UnknownWorker)) else 400
        payload = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, InvalidSequence):
            payload["positions"] = exc.positions
        self._send_json(payload, status=status)

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        url = urlparse(self.path)
        query = parse_qs(url.query)
        try:
            if url.path == "/forest":
                self._send_json({"synsets": self.store.forest.to_records()})
            elif url.path == "/synsets":
                q = query.get("q", [""])[0]
                pos = query.get("pos", [None])[0] or None
                hits = search_synsets(self.store.forest, q, pos=pos)
                self._send_json(
                    {
                        "synsets": [
                            {"id": s.id, "lemma": s.lemma, "sense": s.sense,
                             "pos": s.pos, "score": s.score, "gloss": s.gloss,
                             "parent": s.parent}
                            for s in hits
                        ]
                    }
                )
            elif url.path == "/tasks/next":
                worker = query.get("worker", [""])[0]
                task = self.store.next_task(worker)
                self._send_json({"task": task})
            elif url.path.startswith("/gifs/") and url.path.endswith("/consolidated"):
                gif_id = url.path[len("/gifs/"):-len("/consolidated")]
                self._send_json(self.store.consolidate(gif_id).to_json())
            elif url.path == "/export":
                body = self.store.export().encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/x-ndjson; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                self.wfile.write(body)
            elif url.path == "/stats":
                self._send_json(self.store.stats())
            elif self.ui_dir:
                self._serve_static(url.path)
            else:
                self._send_json({"error": "NotFound", "message": url.path}, status=404)
        except GsoError as e:
            self._send_error_json(e)

    def _serve_static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        base = os.path.realpath(self.ui_dir)
        full = os.path.realpath(os.path.join(base, rel))
        if not full.startswith(base + os.sep) and full != base:
            self._send_json({"error": "NotFound", "message": path}, status=404)
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._send_json({"error": "NotFound", "message": path}, status=404)
            return
        ext = os.path.splitext(full)[1]
        with open(full, "rb") as fh:
            body = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", _CONTENT_TYPES.get(ext, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/annotations":
            self._send_json({"error": "NotFound", "message": url.path}, status=404)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            obj = json.loads(self.rfile.read(length) or b"{}")
            sequence = [(p["modifier"], p["noun"]) for p in obj.get("sequence", [])]
            ack = self.store.submit(
                worker_id=obj.get("worker_id", ""),
                gif_id=obj.get("gif_id", ""),
                sequence=sequence,
                judgment=obj.get("judgment", ""),
            )
            self._send_json(ack)
        except GsoError as e:
            self._send_error_json(e)
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
            self._send_json({"error": "BadRequest", "message": str(e)}, status=400)


def make_server(
    store: AnnotationStore,
    host: str = "127.0.0.1",
    port: int = 0,
    ui_dir: Optional[str] = None,
) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), ServiceHandler)
    server.store = store  # type: ignore[attr-defined]
    server.ui_dir = ui_dir  # type: ignore[attr-defined]
    return server
