import csv
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
import scipy.sparse as sp

from config.constants import CSV_HEADERS, TOKEN_SEPARATOR
from config.settings import SCHEMA_VERSION
from features.tfidf import FeatureMatrix
from features.vocabulary import Vocabulary
from ingest.records import ActivityMinute, UserDataset
from utils.errors import IoError, InvalidSpec
from utils.helpers import read_json, write_json
from utils.logger import setup_logger

PathLike = Union[str, Path]


def _format_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return '1' if value else '0'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _parse_header_line(line: str) -> Dict[str, str]:
    """'#schema_version=1;user_id=u1' -> {'schema_version': '1', 'user_id': 'u1'}"""
    fields = {}
    for part in line.lstrip('#').strip().split(';'):
        if '=' in part:
            key, value = part.split('=', 1)
            fields[key.strip()] = value.strip()
    return fields


class CSVHandler:
    """Reads and writes every CSV/JSON artifact of the pipeline"""

    def __init__(self):
        self.logger = setup_logger('csv_handler')

    def write_csv(self, file_type: str, file_path: PathLike, data: List[Dict],
                  meta: Optional[Dict] = None) -> Path:
        """Write rows under the registered headers, with an optional '#key=value;...' line first"""
        headers = CSV_HEADERS.get(file_type)
        if headers is None:
            raise InvalidSpec(f"no CSV headers registered for {file_type!r}")
        file_path = Path(file_path)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            with open(file_path, 'w', newline='', encoding='utf-8') as f:
                if meta is not None:
                    f.write('#' + ';'.join(f"{k}={v}" for k, v in meta.items()) + '\n')
                writer = csv.DictWriter(f, fieldnames=headers, lineterminator='\n', extrasaction='ignore')
                writer.writeheader()
                for row in data:
                    writer.writerow({header: _format_value(row.get(header)) for header in headers})
        except OSError as e:
            raise IoError(f"cannot write {file_path}: {e}")

        self.logger.debug(f"Wrote {len(data)} rows to {file_path}")
        return file_path

    def read_csv(self, file_path: PathLike) -> Tuple[Dict[str, str], List[Dict]]:
        """Read a CSV written by write_csv; returns (meta, rows) with string values"""
        file_path = Path(file_path)
        if not file_path.exists():
            raise IoError(f"CSV file not found: {file_path}")
        with open(file_path, 'r', encoding='utf-8') as f:
            first = f.readline()
            meta = _parse_header_line(first) if first.startswith('#') else {}
            if not meta:
                f.seek(0)
            reader = csv.DictReader(f)
            rows = [{key: (value or '').strip() for key, value in row.items()} for row in reader]
        return meta, rows

    def _check_schema(self, meta: Dict[str, str], file_path: Path):
        version = meta.get('schema_version')
        if version is not None and int(version) != SCHEMA_VERSION:
            raise InvalidSpec(f"{file_path}: schema version {version}, expected {SCHEMA_VERSION}")

    # Activity matrices

    def write_activity_matrix(self, dataset: UserDataset, file_path: PathLike) -> Path:
        rows = [{
            'minute_epoch': row.minute_epoch,
            'processes': TOKEN_SEPARATOR.join(row.processes),
            'domains': TOKEN_SEPARATOR.join(row.domains),
            'clicks': row.clicks,
            'keystrokes': row.keystrokes,
            'background': row.background,
        } for row in dataset.minutes]
        meta = {'schema_version': SCHEMA_VERSION, 'user_id': dataset.user_id, 'origin_day': dataset.origin_day}
        return self.write_csv('activity_matrix', file_path, rows, meta=meta)

    def read_activity_matrix(self, file_path: PathLike) -> UserDataset:
        file_path = Path(file_path)
        if not file_path.exists():
            raise IoError(f"activity matrix not found: {file_path}")
        with open(file_path, 'r', encoding='utf-8') as f:
            meta = _parse_header_line(f.readline())
        self._check_schema(meta, file_path)

        frame = pd.read_csv(file_path, skiprows=1, dtype={'processes': str, 'domains': str},
                            keep_default_na=False)
        missing = set(CSV_HEADERS['activity_matrix']) - set(frame.columns)
        if missing:
            raise InvalidSpec(f"{file_path}: missing columns {sorted(missing)}")

        def tokens(cell: str):
            return tuple(t for t in cell.split(TOKEN_SEPARATOR) if t) if cell else ()

        minutes = [
            ActivityMinute(
                minute_epoch=int(r.minute_epoch),
                processes=tokens(r.processes),
                domains=tokens(r.domains),
                clicks=int(r.clicks),
                keystrokes=int(r.keystrokes),
                background=bool(int(r.background)),
            )
            for r in frame.itertuples(index=False)
        ]
        origin = meta.get('origin_day')
        user_id = meta.get('user_id') or file_path.stem
        self.logger.info(f"Loaded {len(minutes)} activity rows for {user_id}")
        return UserDataset(user_id, tuple(minutes), origin_day=int(origin) if origin not in (None, '', 'None') else None)

    # Feature matrices: (row, col, value) triplets plus a JSON sidecar

    def write_feature_matrix(self, matrix: FeatureMatrix, file_path: PathLike) -> Path:
        file_path = Path(file_path)
        coo = matrix.X.tocoo()
        order = np.lexsort((coo.col, coo.row))
        rows = [{'row': int(coo.row[i]), 'col': int(coo.col[i]), 'value': float(coo.data[i])} for i in order]
        self.write_csv('feature_triplets', file_path, rows, meta={'schema_version': SCHEMA_VERSION})
        write_json(file_path.with_suffix('.json'), {
            'schema_version': SCHEMA_VERSION,
            'shape': list(matrix.X.shape),
            'labels': list(matrix.labels),
            'end_minutes': matrix.end_minutes,
            'names': list(matrix.names),
        })
        return file_path

    def read_feature_matrix(self, file_path: PathLike) -> FeatureMatrix:
        file_path = Path(file_path)
        sidecar = file_path.with_suffix('.json')
        if not sidecar.exists():
            raise IoError(f"feature matrix sidecar not found: {sidecar}")
        info = read_json(sidecar)
        self._check_schema({'schema_version': str(info.get('schema_version', SCHEMA_VERSION))}, sidecar)
        meta, rows = self.read_csv(file_path)
        self._check_schema(meta, file_path)

        shape = tuple(info['shape'])
        r = np.array([int(row['row']) for row in rows], dtype=np.int64)
        c = np.array([int(row['col']) for row in rows], dtype=np.int64)
        v = np.array([float(row['value']) for row in rows], dtype=float)
        X = sp.csr_matrix((v, (r, c)), shape=shape)
        return FeatureMatrix(X=X, labels=info['labels'], end_minutes=np.asarray(info['end_minutes'], dtype=np.int64),
                             names=info.get('names', []))

    # Vocabularies

    def write_vocabulary(self, vocab: Vocabulary, file_path: PathLike) -> Path:
        payload = vocab.to_dict()
        payload['schema_version'] = SCHEMA_VERSION
        write_json(file_path, payload)
        return Path(file_path)

    def read_vocabulary(self, file_path: PathLike) -> Vocabulary:
        file_path = Path(file_path)
        if not file_path.exists():
            raise IoError(f"vocabulary not found: {file_path}")
        return Vocabulary.from_dict(read_json(file_path))
