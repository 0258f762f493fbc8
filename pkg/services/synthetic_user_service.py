#!/usr/bin/env python3
"""
Synthetic User Service

Generates controlled computer-usage profiles: a daily schedule of active
hours, per-minute Bernoulli draws over process and domain vocabularies and
Poisson input counts. Datasets can also be written out as extractor logs so
the ingestion path can be exercised end to end.
"""

from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
from dateutil import tz
from dateutil.parser import isoparse

from config.constants import TOKEN_SEPARATOR
from config.settings import (
    DNS_MAP_FILE, EVENT_LOG_FILES, FILETIME_TICKS_PER_SECOND, FILETIME_UNIX_EPOCH, MINUTES_PER_DAY,
)
from ingest.activity_matrix import process_token
from ingest.event_parser import format_event_line
from ingest.records import ActivityMinute, Direction, EventKind, NetInfo, RawEventRecord, UserDataset
from utils.errors import InvalidSpec
from utils.helpers import derive_seed
from utils.logger import setup_logger
from utils.validators import validate_probability, validate_token

logger = setup_logger('synthetic_users')

DEFAULT_START_DATE = "2023-01-02"
OFFICE_HOURS = list(range(9, 17))

# Shared process mix of the default population; users differ in domains only
COMMON_PROCESSES = {
    "c:/windows/explorer.exe": 0.6,
    "c:/program files/browser/browser.exe": 0.8,
    "c:/program files/office/editor.exe": 0.4,
    "c:/program files/chat/chat.exe": 0.3,
    "c:/windows/system32/svchost.exe": 0.5,
}
COMMON_DOMAINS = {
    "update.vendor.example": 0.05,
    "cdn.shared.example": 0.05,
}


@dataclass
class SyntheticUserSpec:
    user_id: str
    processes: Dict[str, float]
    domains: Dict[str, float]
    active_hours: List[int] = field(default_factory=lambda: list(OFFICE_HOURS))
    activity_prob: float = 0.8
    click_rate: float = 3.0
    keystroke_rate: float = 20.0
    background_prob: float = 0.1
    days: int = 56
    seed: int = 0
    start_date: str = DEFAULT_START_DATE

    def validate(self):
        if not self.user_id or not validate_token(self.user_id):
            raise InvalidSpec(f"invalid synthetic user id {self.user_id!r}")
        if not self.processes:
            raise InvalidSpec(f"{self.user_id}: at least one process token is required")
        for token, p in list(self.processes.items()) + list(self.domains.items()):
            if not validate_token(token) or TOKEN_SEPARATOR in token:
                raise InvalidSpec(f"{self.user_id}: invalid token {token!r}")
            if not validate_probability(p):
                raise InvalidSpec(f"{self.user_id}: probability of {token!r} outside [0, 1]")
        for name in ('activity_prob', 'background_prob'):
            if not validate_probability(getattr(self, name)):
                raise InvalidSpec(f"{self.user_id}: {name} outside [0, 1]")
        if not self.active_hours:
            raise InvalidSpec(f"{self.user_id}: at least one active hour is required")
        if any(not 0 <= int(h) <= 23 for h in self.active_hours):
            raise InvalidSpec(f"{self.user_id}: active hours must lie in 0..23")
        if self.click_rate < 0 or self.keystroke_rate < 0:
            raise InvalidSpec(f"{self.user_id}: input rates must be non-negative")
        if self.days < 1:
            raise InvalidSpec(f"{self.user_id}: days must be positive")
        return self

    @property
    def origin_day(self) -> int:
        """Calendar day (days since the Unix epoch) of study day 1"""
        start = isoparse(self.start_date)
        if start.tzinfo is None:
            start = start.replace(tzinfo=tz.UTC)
        return int(start.timestamp()) // 86400

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'SyntheticUserSpec':
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidSpec(f"unknown synthetic user fields {sorted(unknown)}")
        return cls(**data).validate()


def default_population(n_users: int, seed: int, days: int = 56, domains_per_user: int = 6) -> List[SyntheticUserSpec]:
    """
    Users sharing one process mix and two common domains, each with its own
    domain vocabulary.
    """
    if n_users < 1:
        raise InvalidSpec("population needs at least one user")
    specs = []
    for i in range(n_users):
        rng = np.random.default_rng(derive_seed(seed, i))
        own = {f"u{i:02d}-site{j}.example": float(np.round(rng.uniform(0.1, 0.5), 3))
               for j in range(domains_per_user)}
        specs.append(SyntheticUserSpec(
            user_id=f"user{i:02d}",
            processes=dict(COMMON_PROCESSES),
            domains={**own, **COMMON_DOMAINS},
            days=days,
            seed=derive_seed(seed, i, 1),
        ).validate())
    return specs


def expand_user_entries(entries: Sequence[dict], seed: int) -> List[SyntheticUserSpec]:
    """Config 'users' entries: explicit specs, or {'population': n, 'days': d} shorthands"""
    specs: List[SyntheticUserSpec] = []
    for k, entry in enumerate(entries):
        entry = dict(entry)
        if 'population' in entry:
            specs += default_population(int(entry.pop('population')), derive_seed(seed, k),
                                        days=int(entry.pop('days', 56)))
            if entry:
                raise InvalidSpec(f"unknown population fields {sorted(entry)}")
        else:
            entry.setdefault('seed', derive_seed(seed, k))
            specs.append(SyntheticUserSpec.from_dict(entry))
    ids = [s.user_id for s in specs]
    if len(set(ids)) != len(ids):
        raise InvalidSpec("synthetic user ids must be unique")
    return specs


def generate_synthetic_user(spec: SyntheticUserSpec) -> UserDataset:
    """
    Draw one user's activity matrix.

    Minutes of active hours are active with activity_prob. An active minute
    holds each process and domain independently with its probability (at
    least the most likely process), Poisson clicks and keystrokes, and loses
    its input with background_prob when it has traffic.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    proc_tokens = [process_token(t) for t in spec.processes]
    proc_probs = np.array(list(spec.processes.values()), dtype=float)
    dom_tokens = list(spec.domains)
    dom_probs = np.array(list(spec.domains.values()), dtype=float)
    fallback = int(np.argmax(proc_probs))

    hours = np.array(sorted(set(int(h) for h in spec.active_hours)))
    minute_of_day = (hours[:, None] * 60 + np.arange(60)[None, :]).ravel()
    day_offsets = (spec.origin_day + np.arange(spec.days)) * MINUTES_PER_DAY
    candidates = (day_offsets[:, None] + minute_of_day[None, :]).ravel()
    active = candidates[rng.random(candidates.size) < spec.activity_prob]

    n = active.size
    proc_draws = rng.random((n, len(proc_tokens))) < proc_probs
    dom_draws = rng.random((n, len(dom_tokens))) < dom_probs if dom_tokens else np.zeros((n, 0), dtype=bool)
    clicks = rng.poisson(spec.click_rate, n)
    keystrokes = rng.poisson(spec.keystroke_rate, n)
    quiet = rng.random(n) < spec.background_prob

    rows = []
    for i, minute in enumerate(active):
        procs = tuple(proc_tokens[j] for j in np.flatnonzero(proc_draws[i])) or (proc_tokens[fallback],)
        doms = tuple(dom_tokens[j] for j in np.flatnonzero(dom_draws[i]))
        c, k = int(clicks[i]), int(keystrokes[i])
        if doms and quiet[i]:
            c = k = 0
        rows.append(ActivityMinute(minute_epoch=int(minute), processes=procs, domains=doms,
                                   clicks=c, keystrokes=k, background=bool(doms) and c == 0 and k == 0))

    logger.info(f"Generated {spec.user_id}: {len(rows)} active minutes over {spec.days} days")
    return UserDataset(spec.user_id, tuple(rows), origin_day=spec.origin_day)


def _synthetic_ip(index: int) -> str:
    return f"10.{(index >> 16) & 255}.{(index >> 8) & 255}.{index & 255}"


def write_raw_logs(dataset: UserDataset, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Write a dataset as extractor logs plus a DNS map.

    Network and input events are attributed to the minute's first process,
    so ingesting the directory rebuilds the same activity matrix.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    domains = sorted({d for row in dataset.minutes for d in row.domains})
    ips = {domain: _synthetic_ip(i + 1) for i, domain in enumerate(domains)}
    pids = {p: 1000 + i for i, p in enumerate(sorted({p for row in dataset.minutes for p in row.processes}))}
    lines: Dict[str, List[str]] = {kind: [] for kind in EVENT_LOG_FILES}

    for row in dataset.minutes:
        base = FILETIME_UNIX_EPOCH + row.minute_epoch * 60 * FILETIME_TICKS_PER_SECOND
        owner = row.processes[0]
        for s, process in enumerate(row.processes):
            lines['process'].append(format_event_line(RawEventRecord(
                EventKind.PROCESS, pids[process], process, base + s * FILETIME_TICKS_PER_SECOND)))
        for domain in row.domains:
            lines['network'].append(format_event_line(RawEventRecord(
                EventKind.NETWORK, pids[owner], owner, base + 20 * FILETIME_TICKS_PER_SECOND,
                net=NetInfo(dst_ip=ips[domain], direction=Direction.OUTBOUND))))
        if row.clicks:
            lines['mouse'].append(format_event_line(RawEventRecord(
                EventKind.MOUSE_CLICK, pids[owner], owner, base + 30 * FILETIME_TICKS_PER_SECOND,
                count=row.clicks, explicit_count=True)))
        if row.keystrokes:
            lines['keyboard'].append(format_event_line(RawEventRecord(
                EventKind.KEYSTROKE_BURST, pids[owner], owner, base + 40 * FILETIME_TICKS_PER_SECOND,
                count=row.keystrokes, explicit_count=True)))

    written = {}
    for kind, file_name in EVENT_LOG_FILES.items():
        path = out_dir / file_name
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.writelines(line + '\n' for line in lines[kind])
        written[kind] = path
    dns_path = out_dir / DNS_MAP_FILE
    with open(dns_path, 'w', encoding='utf-8', newline='\n') as f:
        f.write('ip,domain\n')
        f.writelines(f"{ips[d]},{d}\n" for d in domains)
    written['dns_map'] = dns_path
    logger.info(f"Wrote extractor logs for {dataset.user_id} to {out_dir}")
    return written
