"""
Extractor log line parser.

Line layout, every field terminated by '|':
    process          PID|path|FILETIME|
    network          PID|path|FILETIME|dst_ip|direction|
    mouse/keyboard   PID|path|FILETIME|            (one event)
                     PID|path|FILETIME|count|      (aggregated events)
"""
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

from config.constants import TOKEN_SEPARATOR
from config.settings import BAD_LINE_THRESHOLD, FILETIME_UNIX_EPOCH, FILETIME_TICKS_PER_SECOND
from utils.errors import (
    BatchRejected, DataError, EmptyPath, InvalidRecord, MalformedIp, NonNumericField,
    PreEpochTimestamp, WrongFieldCount,
)
from utils.logger import setup_logger
from utils.validators import validate_ipv4
from .records import Direction, EventKind, NetInfo, RawEventRecord

logger = setup_logger('ingest')

_UNIX_EPOCH_SECONDS = FILETIME_UNIX_EPOCH // FILETIME_TICKS_PER_SECOND


@dataclass(frozen=True)
class ParseIssue:
    """A rejected line in batch mode"""
    line_no: int
    code: str
    message: str


def filetime_to_epoch_seconds(ft: int) -> float:
    """Convert a FILETIME tick count to seconds since the Unix epoch"""
    if ft < FILETIME_UNIX_EPOCH:
        raise PreEpochTimestamp(f"FILETIME {ft} precedes 1970-01-01")
    # Split into whole seconds and remaining ticks so the result keeps 1e-7 s resolution
    whole, ticks = divmod(ft, FILETIME_TICKS_PER_SECOND)
    return float(whole - _UNIX_EPOCH_SECONDS) + ticks / FILETIME_TICKS_PER_SECOND


def _parse_canonical_int(value: str, name: str, line_no: Optional[int]) -> int:
    if not (value.isascii() and value.isdigit()) or (len(value) > 1 and value[0] == '0'):
        raise NonNumericField(f"{name} is not a canonical non-negative integer: {value!r}", line_no=line_no)
    return int(value)


def parse_event_line(line: str, kind_hint: Union[EventKind, str], line_no: Optional[int] = None) -> RawEventRecord:
    """
    Parse one pipe-delimited extractor line.

    Args:
        line: Raw line, optionally ending with a newline
        kind_hint: Event kind of the file the line comes from
        line_no: Line number reported in errors (batch mode)

    Returns:
        RawEventRecord with every field populated
    """
    kind = kind_hint if isinstance(kind_hint, EventKind) else EventKind.from_string(kind_hint)
    text = line.rstrip('\r\n')
    fields = text.split('|')

    if kind is EventKind.NETWORK:
        expected = (6,)
    elif kind.is_input:
        expected = (4, 5)
    else:
        expected = (4,)
    if len(fields) not in expected or fields[-1] != '':
        raise WrongFieldCount(
            f"expected {' or '.join(str(n - 1) for n in expected)} '|'-terminated fields for {kind}, "
            f"got {len(fields)}", line_no=line_no)

    pid = _parse_canonical_int(fields[0], 'pid', line_no)
    exe_path = fields[1]
    if not exe_path:
        raise EmptyPath("empty executable path", line_no=line_no)
    if TOKEN_SEPARATOR in exe_path:
        raise InvalidRecord(f"executable path contains '{TOKEN_SEPARATOR}': {exe_path!r}", line_no=line_no)
    timestamp = _parse_canonical_int(fields[2], 'timestamp', line_no)
    if timestamp < FILETIME_UNIX_EPOCH:
        raise PreEpochTimestamp(f"FILETIME {timestamp} precedes 1970-01-01", line_no=line_no)

    net = None
    count = 1
    explicit_count = False
    if kind is EventKind.NETWORK:
        dst_ip = fields[3]
        if not validate_ipv4(dst_ip):
            raise MalformedIp(f"malformed destination ip {dst_ip!r}", line_no=line_no)
        try:
            direction = Direction(fields[4])
        except ValueError:
            raise InvalidRecord(f"unknown direction {fields[4]!r}", line_no=line_no)
        net = NetInfo(dst_ip=dst_ip, direction=direction)
    elif len(fields) == 5:
        count = _parse_canonical_int(fields[3], 'count', line_no)
        if count < 1:
            raise NonNumericField("count must be positive", line_no=line_no)
        explicit_count = True

    return RawEventRecord(kind=kind, pid=pid, exe_path=exe_path, timestamp_filetime=timestamp,
                          net=net, count=count, explicit_count=explicit_count)


def format_event_line(record: RawEventRecord) -> str:
    """Serialize a record back into its extractor line (no trailing newline)"""
    fields = [str(record.pid), record.exe_path, str(record.timestamp_filetime)]
    if record.kind is EventKind.NETWORK:
        fields += [record.net.dst_ip, record.net.direction.value]
    elif record.kind.is_input and (record.explicit_count or record.count != 1):
        fields.append(str(record.count))
    return '|'.join(fields) + '|'


def _decode_line(raw: bytes, line_no: int) -> str:
    try:
        return raw.decode('utf-8')
    except UnicodeDecodeError as e:
        raise InvalidRecord(f"line is not valid UTF-8: {e.reason} at byte {e.start}", line_no=line_no)


def parse_event_file(path: Union[str, Path], kind: Union[EventKind, str],
                     threshold: float = BAD_LINE_THRESHOLD) -> Tuple[List[RawEventRecord], List[ParseIssue]]:
    """
    Parse a whole log file, collecting bad lines instead of failing on the first.

    Raises:
        BatchRejected: when the share of bad lines exceeds the threshold
    """
    path = Path(path)
    kind = kind if isinstance(kind, EventKind) else EventKind.from_string(kind)
    records: List[RawEventRecord] = []
    issues: List[ParseIssue] = []
    total = 0

    with open(path, 'rb') as f:
        for line_no, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            total += 1
            try:
                records.append(parse_event_line(_decode_line(raw, line_no), kind, line_no=line_no))
            except DataError as e:
                issues.append(ParseIssue(line_no=line_no, code=e.code, message=e.message))

    if issues:
        logger.warning(f"{path.name}: {len(issues)} of {total} lines rejected")
        for issue in issues[:10]:
            logger.debug(f"{path.name}:{issue.line_no} {issue.code} {issue.message}")
    if total and len(issues) / total > threshold:
        raise BatchRejected(
            f"{path.name}: {len(issues)}/{total} bad lines exceeds threshold {threshold}",
            bad_lines=len(issues), total_lines=total, first_bad_line=issues[0].line_no)

    logger.info(f"Parsed {len(records)} {kind} records from {path}")
    return records, issues
