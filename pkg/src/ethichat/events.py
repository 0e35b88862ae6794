"""In-process event bus with a gapless per-stream sequence number.

Subscribers receive every event after their `since` cursor: history is
replayed first, then live events are pushed; slow consumers fall back
to polling via the same cursor.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass


@dataclass(frozen=True)
class EventEnvelope:
    seq: int
    kind: str  # verdict | alert | label_request | kb_updated | turn
    body: dict

    def to_json(self) -> str:
        return json.dumps({"seq": self.seq, "kind": self.kind, "body": self.body})


class EventBus:
    def __init__(self, max_client_buffer: int = 1000):
        self._lock = threading.Lock()
        self._history: list[EventEnvelope] = []
        self._subscribers: list[queue.Queue] = []
        self.max_client_buffer = max_client_buffer

    def publish(self, kind: str, body: dict) -> EventEnvelope:
        with self._lock:
            envelope = EventEnvelope(len(self._history) + 1, kind, body)
            self._history.append(envelope)
            dead = []
            for q in self._subscribers:
                try:
                    q.put_nowait(envelope)
                except queue.Full:
                    dead.append(q)  # slow client: drop, it can resume by seq
            for q in dead:
                self._subscribers.remove(q)
        return envelope

    def since(self, seq: int) -> list[EventEnvelope]:
        with self._lock:
            return [e for e in self._history if e.seq > seq]

    def subscribe(self, since: int = 0):
        """Returns (backlog, live queue, unsubscribe)."""
        q: queue.Queue = queue.Queue(maxsize=self.max_client_buffer)
        with self._lock:
            backlog = [e for e in self._history if e.seq > since]
            self._subscribers.append(q)

        def unsubscribe():
            with self._lock:
                if q in self._subscribers:
                    self._subscribers.remove(q)

        return backlog, q, unsubscribe
