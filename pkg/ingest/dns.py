"""
IP to domain resolution from a provided DNS map (no live lookups).
"""
import csv
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

from config.constants import TOKEN_SEPARATOR
from utils.errors import MalformedIp
from utils.logger import setup_logger
from utils.validators import validate_ipv4

logger = setup_logger('ingest')


def resolve_domain(ip: str, dns_map: Optional[Mapping[str, str]] = None) -> str:
    """Return the mapped domain, or the dotted quad itself when unmapped"""
    if not validate_ipv4(ip):
        raise MalformedIp(f"malformed ip {ip!r}")
    if dns_map:
        domain = dns_map.get(ip)
        if domain:
            return domain
    return ip


def load_dns_map(path: Union[str, Path]) -> Dict[str, str]:
    """Read an `ip,domain` CSV; a header row is optional"""
    path = Path(path)
    dns_map: Dict[str, str] = {}
    with open(path, 'r', encoding='utf-8', newline='') as f:
        for row_no, row in enumerate(csv.reader(f), start=1):
            if len(row) < 2 or not row[0].strip():
                continue
            ip, domain = row[0].strip(), row[1].strip()
            if row_no == 1 and ip.lower() == 'ip':
                continue
            if not validate_ipv4(ip):
                logger.warning(f"{path.name}:{row_no} skipping malformed ip {ip!r}")
                continue
            if TOKEN_SEPARATOR in domain:
                logger.warning(f"{path.name}:{row_no} skipping domain containing '{TOKEN_SEPARATOR}': {domain!r}")
                continue
            if domain:
                dns_map[ip] = domain
    logger.info(f"Loaded {len(dns_map)} DNS entries from {path}")
    return dns_map
