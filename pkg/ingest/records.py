#!/usr/bin/env python3
"""
Ingestion Record Types

Typed values for parsed extractor log lines and the per-minute activity matrix.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from config.settings import (
    FILETIME_UNIX_EPOCH, FILETIME_TICKS_PER_SECOND, MINUTES_PER_DAY, DAYS_PER_WEEK,
)
from utils.errors import InvalidRecord, PreEpochTimestamp
from utils.validators import validate_token

TICKS_PER_MINUTE = FILETIME_TICKS_PER_SECOND * 60


class EventKind(Enum):
    """Enumeration for extractor event kinds"""
    PROCESS = "ProcessEvent"
    NETWORK = "NetworkEvent"
    MOUSE_CLICK = "MouseClick"
    KEYSTROKE_BURST = "KeystrokeBurst"

    def __str__(self):
        return self.value

    @property
    def is_input(self) -> bool:
        return self in (EventKind.MOUSE_CLICK, EventKind.KEYSTROKE_BURST)

    @classmethod
    def from_string(cls, kind_str: str) -> 'EventKind':
        """Convert string (log file stem or enum value) to EventKind"""
        kind_map = {
            'process': cls.PROCESS,
            'processevent': cls.PROCESS,
            'network': cls.NETWORK,
            'networkevent': cls.NETWORK,
            'mouse': cls.MOUSE_CLICK,
            'mouseclick': cls.MOUSE_CLICK,
            'click': cls.MOUSE_CLICK,
            'keyboard': cls.KEYSTROKE_BURST,
            'keystrokeburst': cls.KEYSTROKE_BURST,
            'keystroke': cls.KEYSTROKE_BURST,
        }
        key = str(kind_str).strip().lower()
        if key not in kind_map:
            raise InvalidRecord(f"Unknown event kind: {kind_str}")
        return kind_map[key]


class Direction(Enum):
    """Enumeration for network traffic direction"""
    INBOUND = "inbound"
    OUTBOUND = "outbound"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NetInfo:
    """Destination of a network event"""
    dst_ip: str
    direction: Direction
    dst_domain: Optional[str] = None


@dataclass(frozen=True)
class RawEventRecord:
    """One parsed extractor log line"""
    kind: EventKind
    pid: int
    exe_path: str
    timestamp_filetime: int
    net: Optional[NetInfo] = None
    count: int = 1
    # Whether the input count was written on the line (kept for re-serialization)
    explicit_count: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if self.timestamp_filetime < FILETIME_UNIX_EPOCH:
            raise PreEpochTimestamp(f"FILETIME {self.timestamp_filetime} precedes 1970-01-01")
        if (self.net is not None) != (self.kind is EventKind.NETWORK):
            raise InvalidRecord("net info must be present exactly for network events")
        if self.pid < 0:
            raise InvalidRecord(f"negative pid {self.pid}")
        if self.count < 1:
            raise InvalidRecord(f"count must be positive, got {self.count}")

    @property
    def minute_epoch(self) -> int:
        """Calendar minute since the Unix epoch, computed in integer ticks"""
        return (self.timestamp_filetime - FILETIME_UNIX_EPOCH) // TICKS_PER_MINUTE


@dataclass(frozen=True)
class ActivityMinute:
    """One row of the N x 6 activity matrix"""
    minute_epoch: int
    processes: Tuple[str, ...] = ()
    domains: Tuple[str, ...] = ()
    clicks: int = 0
    keystrokes: int = 0
    background: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'processes', tuple(self.processes))
        object.__setattr__(self, 'domains', tuple(self.domains))
        if self.clicks < 0 or self.keystrokes < 0:
            raise InvalidRecord(f"negative input counts at minute {self.minute_epoch}")
        if self.background and (self.clicks or self.keystrokes or not self.domains):
            raise InvalidRecord(f"background minute {self.minute_epoch} must have traffic and no input")
        for token in self.processes + self.domains:
            if not validate_token(token):
                raise InvalidRecord(f"invalid token {token!r} at minute {self.minute_epoch}")

    @property
    def hour_epoch(self) -> int:
        return self.minute_epoch // 60


@dataclass(frozen=True)
class UserDataset:
    """Per-user activity matrix, rows strictly ascending by minute"""
    user_id: str
    minutes: Tuple[ActivityMinute, ...] = ()
    # Calendar day (minute // 1440) that counts as study day 1
    origin_day: Optional[int] = None
    day_index: Dict[int, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        rows = tuple(self.minutes)
        object.__setattr__(self, 'minutes', rows)
        for prev, cur in zip(rows, rows[1:]):
            if cur.minute_epoch <= prev.minute_epoch:
                raise InvalidRecord(
                    f"{self.user_id}: minutes not strictly ascending at {cur.minute_epoch}")
        if self.origin_day is None and rows:
            object.__setattr__(self, 'origin_day', rows[0].minute_epoch // MINUTES_PER_DAY)
        object.__setattr__(self, 'day_index', {row.minute_epoch: self.day_of(row.minute_epoch) for row in rows})

    def __len__(self):
        return len(self.minutes)

    def day_of(self, minute_epoch: int) -> int:
        """Study day number (1-based) of a minute"""
        return minute_epoch // MINUTES_PER_DAY - (self.origin_day or 0) + 1

    @property
    def n_days(self) -> int:
        """Highest study day holding data"""
        if not self.minutes:
            return 0
        return self.day_of(self.minutes[-1].minute_epoch)

    @property
    def start_minute(self) -> int:
        """First minute of study day 1"""
        return (self.origin_day or 0) * MINUTES_PER_DAY

    def select_days(self, first: int, last: Optional[int] = None) -> 'UserDataset':
        """Rows whose study day lies in [first, last], keeping the day numbering"""
        rows = [row for row in self.minutes
                if self.day_index[row.minute_epoch] >= first
                and (last is None or self.day_index[row.minute_epoch] <= last)]
        return UserDataset(self.user_id, tuple(rows), origin_day=self.origin_day)

    def split_by_week(self) -> List['UserDataset']:
        """One dataset per study week (days 1-7, 8-14, ...)"""
        n_weeks = (self.n_days + DAYS_PER_WEEK - 1) // DAYS_PER_WEEK
        return [self.select_days(DAYS_PER_WEEK * w + 1, DAYS_PER_WEEK * (w + 1)) for w in range(n_weeks)]
