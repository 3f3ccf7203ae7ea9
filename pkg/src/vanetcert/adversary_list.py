"""Bounded, recency-ordered list of known adversaries kept by each vehicle."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

from .errors import InvalidInput, NotFound

DEFAULT_CAPACITY = 10


@dataclass(frozen=True)
class AdversaryListEntry:
    warning_issuer_id: int
    adversary_id: int
    timestamp: int
    reason_code: int
    review_date: int


class AdversaryList:
    """Newest-first list of at most ``capacity`` adversaries, one entry per id.

    Recording a new id when full drops the oldest entry. Recording a known id
    replaces its entry and moves it to the top.
    """

    def __init__(self, capacity: int = DEFAULT_CAPACITY, entries: Iterable[AdversaryListEntry] = ()):
        if capacity < 1:
            raise InvalidInput("capacity must be positive")
        self.capacity = capacity
        # oldest first internally; public views are newest first
        self._entries: OrderedDict[int, AdversaryListEntry] = OrderedDict()
        for entry in reversed(list(entries)):
            self.record(entry)

    def record(self, entry: AdversaryListEntry) -> None:
        self._entries.pop(entry.adversary_id, None)
        self._entries[entry.adversary_id] = entry
        if len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def contains(self, vehicle_id: int) -> bool:
        return vehicle_id in self._entries

    __contains__ = contains

    def touch(self, vehicle_id: int, now: int) -> None:
        try:
            entry = self._entries[vehicle_id]
        except KeyError:
            raise NotFound(f"vehicle {vehicle_id} is not in the adversary list") from None
        self._entries[vehicle_id] = replace(entry, timestamp=now)
        self._entries.move_to_end(vehicle_id)

    def purge_departed(self, departed_ids: Iterable[int]) -> None:
        for vid in departed_ids:
            self._entries.pop(vid, None)

    def get(self, vehicle_id: int) -> AdversaryListEntry | None:
        return self._entries.get(vehicle_id)

    def position(self, vehicle_id: int) -> int:
        """0-based position from the top; raises NotFound if absent."""
        for pos, vid in enumerate(self.ids()):
            if vid == vehicle_id:
                return pos
        raise NotFound(f"vehicle {vehicle_id} is not in the adversary list")

    @property
    def entries(self) -> tuple[AdversaryListEntry, ...]:
        return tuple(reversed(self._entries.values()))

    def ids(self) -> list[int]:
        return list(reversed(self._entries.keys()))

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[AdversaryListEntry]:
        return iter(self.entries)

    def __repr__(self) -> str:
        return f"AdversaryList(capacity={self.capacity}, ids={self.ids()})"

    def dump(self) -> str:
        """One line per entry, newest first: ``pos issuer adv ts reason review``."""
        return "\n".join(
            f"{pos} {e.warning_issuer_id} {e.adversary_id} {e.timestamp} {e.reason_code} {e.review_date}"
            for pos, e in enumerate(self.entries)
        )
