"""
Aggregation of parsed events into the per-minute activity matrix.
"""
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

from config.settings import BAD_LINE_THRESHOLD, EVENT_LOG_FILES
from utils.logger import setup_logger
from .dns import resolve_domain
from .event_parser import parse_event_file
from .records import ActivityMinute, EventKind, RawEventRecord, UserDataset

logger = setup_logger('ingest')


def process_token(exe_path: str) -> str:
    """Full executable path, lower-cased, with '/' separators"""
    return exe_path.replace('\\', '/').lower()


class _MinuteBucket:
    """Mutable accumulator for one calendar minute"""

    __slots__ = ('processes', 'domains', 'clicks', 'keystrokes')

    def __init__(self):
        # dicts keep first-seen order and de-duplicate
        self.processes: Dict[str, None] = {}
        self.domains: Dict[str, None] = {}
        self.clicks = 0
        self.keystrokes = 0

    def freeze(self, minute_epoch: int) -> ActivityMinute:
        domains = tuple(self.domains)
        background = bool(domains) and self.clicks == 0 and self.keystrokes == 0
        return ActivityMinute(
            minute_epoch=minute_epoch,
            processes=tuple(self.processes),
            domains=domains,
            clicks=self.clicks,
            keystrokes=self.keystrokes,
            background=background,
        )


def build_activity_matrix(events: Iterable[RawEventRecord], user_id: str,
                          dns_map: Optional[Mapping[str, str]] = None) -> UserDataset:
    """
    Bucket events by calendar minute.

    Every event contributes its executable as an active process; network
    events add the destination domain; input events add their counts.
    Minutes without events produce no row.
    """
    # Stable sort keeps file order for events sharing a timestamp
    ordered = sorted(events, key=lambda e: e.timestamp_filetime)
    buckets: Dict[int, _MinuteBucket] = {}

    for event in ordered:
        bucket = buckets.get(event.minute_epoch)
        if bucket is None:
            bucket = buckets[event.minute_epoch] = _MinuteBucket()
        bucket.processes.setdefault(process_token(event.exe_path), None)

        if event.kind is EventKind.NETWORK:
            domain = event.net.dst_domain or resolve_domain(event.net.dst_ip, dns_map)
            bucket.domains.setdefault(domain, None)
        elif event.kind is EventKind.MOUSE_CLICK:
            bucket.clicks += event.count
        elif event.kind is EventKind.KEYSTROKE_BURST:
            bucket.keystrokes += event.count

    rows = [buckets[minute].freeze(minute) for minute in sorted(buckets)]
    if not rows:
        logger.warning(f"No events for user {user_id}; activity matrix is empty")
    return UserDataset(user_id=user_id, minutes=tuple(rows))


def ingest_user_dir(user_dir: Union[str, Path], user_id: Optional[str] = None,
                    dns_map: Optional[Mapping[str, str]] = None,
                    threshold: float = BAD_LINE_THRESHOLD) -> UserDataset:
    """Parse every extractor log present in a user directory"""
    user_dir = Path(user_dir)
    user_id = user_id or user_dir.name
    events: List[RawEventRecord] = []
    saw_network = False

    for kind_name, file_name in EVENT_LOG_FILES.items():
        path = user_dir / file_name
        if not path.exists():
            continue
        records, _ = parse_event_file(path, EventKind.from_string(kind_name), threshold=threshold)
        saw_network = saw_network or (kind_name == 'network' and bool(records))
        events.extend(records)

    if saw_network and not dns_map:
        logger.warning(f"{user_id}: network logs present without a DNS map; IPs pass through as tokens")

    dataset = build_activity_matrix(events, user_id, dns_map)
    logger.info(f"{user_id}: {len(events)} events -> {len(dataset)} active minutes over {dataset.n_days} days")
    return dataset
