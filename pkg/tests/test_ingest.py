import pytest
from hypothesis import given, strategies as st

from builders import START_MINUTE, dataset_of, filetime_at, minute_row
from data_manager.csv_handler import CSVHandler
from ingest import (
    Direction, EventKind, NetInfo, RawEventRecord, build_activity_matrix, filetime_to_epoch_seconds,
    format_event_line, ingest_user_dir, load_dns_map, parse_event_file, parse_event_line, resolve_domain,
)
from services.synthetic_user_service import SyntheticUserSpec, generate_synthetic_user, write_raw_logs
from utils.errors import (
    BatchRejected, EmptyPath, InvalidRecord, MalformedIp, NonNumericField, PreEpochTimestamp, WrongFieldCount,
)
from utils.validators import validate_ipv4


def test_parse_process_line():
    record = parse_event_line(f"4242|C:\\Windows\\explorer.exe|{filetime_at(0)}|\n", 'process')
    assert record.kind is EventKind.PROCESS
    assert record.pid == 4242
    assert record.exe_path == "C:\\Windows\\explorer.exe"
    assert record.minute_epoch == START_MINUTE


def test_parse_network_line():
    record = parse_event_line(f"7|c:/apps/browser.exe|{filetime_at(3, 59)}|93.184.216.34|outbound|", 'network')
    assert record.net == NetInfo(dst_ip='93.184.216.34', direction=Direction.OUTBOUND)
    assert record.minute_epoch == START_MINUTE + 3


def test_input_line_with_and_without_count():
    single = parse_event_line(f"7|c:/apps/editor.exe|{filetime_at(0)}|", 'keyboard')
    burst = parse_event_line(f"7|c:/apps/editor.exe|{filetime_at(0)}|12|", 'keyboard')
    assert single.count == 1
    assert burst.count == 12
    assert burst.kind is EventKind.KEYSTROKE_BURST


@pytest.mark.parametrize('line, kind, error', [
    ("1|a.exe|{ft}", 'process', WrongFieldCount),
    ("1|a.exe|{ft}|10.0.0.1|", 'network', WrongFieldCount),
    ("x1|a.exe|{ft}|", 'process', NonNumericField),
    ("01|a.exe|{ft}|", 'process', NonNumericField),
    ("1||{ft}|", 'process', EmptyPath),
    ("1|a.exe|{ft}|300.1.1.1|outbound|", 'network', MalformedIp),
    ("1|a.exe|{ft}|10.0.0.1|sideways|", 'network', InvalidRecord),
    ("1|a.exe|5|", 'process', PreEpochTimestamp),
    ("1\u00b2|a.exe|{ft}|", 'process', NonNumericField),
    ("1|c:/apps/a;b.exe|{ft}|", 'process', InvalidRecord),
])
def test_malformed_lines(line, kind, error):
    with pytest.raises(error):
        parse_event_line(line.format(ft=filetime_at(0)), kind, line_no=9)


def test_errors_carry_line_number():
    with pytest.raises(WrongFieldCount) as info:
        parse_event_line("1|a.exe|", 'process', line_no=17)
    assert info.value.line_no == 17
    assert info.value.exit_code == 3


def test_filetime_conversion_keeps_sub_second_ticks():
    assert filetime_to_epoch_seconds(filetime_at(0) + 5) == pytest.approx(START_MINUTE * 60 + 5e-7)


@given(
    kind=st.sampled_from(list(EventKind)),
    pid=st.integers(0, 10 ** 6),
    path=st.text(alphabet=st.characters(exclude_characters='|;\r\n', exclude_categories=('Cs',)), min_size=1),
    offset=st.integers(0, 10 ** 7),
    count=st.integers(1, 500),
)
def test_format_then_parse_restores_record(kind, pid, path, offset, count):
    net = NetInfo('10.1.2.3', Direction.INBOUND) if kind is EventKind.NETWORK else None
    record = RawEventRecord(kind, pid, path, filetime_at(offset), net=net,
                            count=count if kind.is_input else 1, explicit_count=kind.is_input)
    assert parse_event_line(format_event_line(record), kind) == record


def test_batch_parse_tolerates_bad_lines_under_threshold(tmp_path):
    path = tmp_path / 'process.log'
    path.write_text(f"1|a.exe|{filetime_at(0)}|\nbroken\n2|b.exe|{filetime_at(1)}|\n\n")
    records, issues = parse_event_file(path, 'process', threshold=0.5)
    assert [r.pid for r in records] == [1, 2]
    assert [(i.line_no, i.code) for i in issues] == [(2, 'WrongFieldCount')]


def test_batch_parse_rejects_above_threshold(tmp_path):
    path = tmp_path / 'process.log'
    path.write_text(f"1|a.exe|{filetime_at(0)}|\nbroken\n")
    with pytest.raises(BatchRejected):
        parse_event_file(path, 'process')


def valid_process_lines(n):
    return ''.join(f"{i + 1}|c:/apps/editor.exe|{filetime_at(i)}|\n" for i in range(n))


def test_batch_parse_counts_unicode_digits_as_a_bad_line(tmp_path):
    path = tmp_path / 'process.log'
    path.write_text(valid_process_lines(200) + "12\u00b2|C:/a.exe|132162206271021146|\n", encoding='utf-8')
    records, issues = parse_event_file(path, 'process')
    assert len(records) == 200
    assert [(i.line_no, i.code) for i in issues] == [(201, 'NonNumericField')]


def test_batch_parse_counts_undecodable_line_as_bad(tmp_path):
    path = tmp_path / 'process.log'
    path.write_bytes(valid_process_lines(100).encode() + b"7|c:/apps/\xffeditor.exe|"
                     + str(filetime_at(0)).encode() + b"|\n" + valid_process_lines(100).encode())
    records, issues = parse_event_file(path, 'process')
    assert len(records) == 200
    assert [(i.line_no, i.code) for i in issues] == [(101, 'InvalidRecord')]
    assert 'UTF-8' in issues[0].message


def test_events_bucket_by_minute():
    events = [
        RawEventRecord(EventKind.PROCESS, 1, "C:\\Apps\\Editor.exe", filetime_at(0, 5)),
        RawEventRecord(EventKind.MOUSE_CLICK, 1, "C:\\Apps\\Editor.exe", filetime_at(0, 10), count=3),
        RawEventRecord(EventKind.NETWORK, 2, "c:/apps/sync.exe", filetime_at(2, 1),
                       net=NetInfo('10.0.0.9', Direction.OUTBOUND)),
    ]
    dataset = build_activity_matrix(events, 'u1', dns_map={'10.0.0.9': 'sync.example'})
    assert [r.minute_epoch for r in dataset.minutes] == [START_MINUTE, START_MINUTE + 2]
    first, second = dataset.minutes
    assert first.processes == ('c:/apps/editor.exe',)
    assert first.clicks == 3 and not first.background
    assert second.domains == ('sync.example',)
    assert second.background


def test_unmapped_ip_passes_through():
    assert resolve_domain('10.0.0.1', {}) == '10.0.0.1'
    assert resolve_domain('10.0.0.1', {'10.0.0.1': 'intranet.example'}) == 'intranet.example'
    with pytest.raises(MalformedIp):
        resolve_domain('10.0.0')


@pytest.mark.parametrize('ip, valid', [
    ('10.0.0.1', True),
    ('255.255.255.255', True),
    ('256.0.0.1', False),
    ('10.0.0.1\n', False),
    ('10.0.0.\u0661', False),
    ('1.2.3', False),
])
def test_ipv4_validation(ip, valid):
    assert validate_ipv4(ip) is valid


def test_dns_map_header_is_optional(tmp_path):
    with_header = tmp_path / 'a.csv'
    with_header.write_text("ip,domain\n10.0.0.1,a.example\n")
    without = tmp_path / 'b.csv'
    without.write_text("10.0.0.2,b.example\nnot-an-ip,c.example\n10.0.0.3,d;e.example\n")
    assert load_dns_map(with_header) == {'10.0.0.1': 'a.example'}
    assert load_dns_map(without) == {'10.0.0.2': 'b.example'}


def test_minutes_must_ascend():
    with pytest.raises(InvalidRecord):
        dataset_of('u', [minute_row(5), minute_row(5)])


def test_split_by_week():
    dataset = dataset_of('u', [minute_row(0), minute_row(7 * 1440 + 3), minute_row(15 * 1440)])
    weeks = dataset.split_by_week()
    assert [len(w) for w in weeks] == [1, 1, 1]
    assert dataset.n_days == 16
    assert weeks[2].day_of(weeks[2].minutes[0].minute_epoch) == 16


def test_synthetic_logs_ingest_back_to_same_matrix(tmp_path):
    spec = SyntheticUserSpec(user_id='round', processes={'c:/apps/a.exe': 0.6, 'c:/apps/b.exe': 0.3},
                             domains={'x.example': 0.5, 'y.example': 0.2}, days=2, seed=3)
    original = generate_synthetic_user(spec)
    write_raw_logs(original, tmp_path / 'round')
    rebuilt = ingest_user_dir(tmp_path / 'round', dns_map=load_dns_map(tmp_path / 'round' / 'dns_map.csv'))
    assert rebuilt.user_id == 'round'
    assert rebuilt.minutes == original.minutes


def test_activity_matrix_csv_keeps_rows_and_origin(tmp_path):
    dataset = dataset_of('u1', [
        minute_row(0, processes=('c:/a.exe', 'c:/b.exe'), clicks=2),
        minute_row(1, domains=('d.example', 'e.example')),
        minute_row(1440 * 3, keystrokes=9),
    ], origin_day=START_MINUTE // 1440 - 1)
    handler = CSVHandler()
    path = handler.write_activity_matrix(dataset, tmp_path / 'u1.csv')
    assert path.read_text().startswith('#schema_version=1;user_id=u1;')
    loaded = handler.read_activity_matrix(path)
    assert loaded == dataset
    assert loaded.n_days == dataset.n_days == 5
