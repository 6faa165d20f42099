"""Append-only event log shared by every component of a world."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Event:
    seq: int
    tick: int
    name: str
    fields: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "tick": self.tick, "event": self.name, **self.fields}


@dataclass
class EventLog:
    entries: list[Event] = field(default_factory=list)

    def emit(self, tick: int, name: str, **fields: Any) -> Event:
        ev = Event(len(self.entries) + 1, tick, name, fields)
        self.entries.append(ev)
        return ev

    def named(self, name: str) -> list[Event]:
        return [e for e in self.entries if e.name == name]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)
