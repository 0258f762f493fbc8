# Small hand-built records shared by the test modules
from ingest.records import ActivityMinute, UserDataset

# 2023-01-02 00:00 UTC
START_MINUTE = 27876960
START_FILETIME = 133170912000000000
TICKS_PER_MINUTE = 600_000_000


def minute_row(offset, processes=('c:/apps/editor.exe',), domains=(), clicks=0, keystrokes=0):
    background = bool(domains) and clicks == 0 and keystrokes == 0
    return ActivityMinute(START_MINUTE + offset, tuple(processes), tuple(domains), clicks, keystrokes, background)


def dataset_of(user_id, rows, origin_day=None):
    return UserDataset(user_id, tuple(rows), origin_day=origin_day)


def filetime_at(offset_minutes, seconds=0):
    return START_FILETIME + offset_minutes * TICKS_PER_MINUTE + seconds * 10_000_000
