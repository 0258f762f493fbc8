# Input validators
import re


_IPV4_PATTERN = re.compile(r'([0-9]{1,3})\.([0-9]{1,3})\.([0-9]{1,3})\.([0-9]{1,3})')


def validate_ipv4(ip: str) -> bool:
    """Validate dotted-quad IPv4 format with octets in 0..255"""
    if not ip:
        return False

    match = _IPV4_PATTERN.fullmatch(ip)
    if match is None:
        return False
    return all(int(octet) <= 255 for octet in match.groups())


def validate_token(token: str) -> bool:
    """Tokens are non-empty and never contain the log field separator"""
    return bool(token) and '|' not in token


def validate_probability(value) -> bool:
    """Validate a probability in [0, 1]"""
    try:
        return 0.0 <= float(value) <= 1.0
    except (TypeError, ValueError):
        return False
