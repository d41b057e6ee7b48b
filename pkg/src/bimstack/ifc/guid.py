"""22-character GlobalId codec and generators.

A GlobalId packs 128 bits into 22 digits of a 64-symbol alphabet: the first
digit carries the top 2 bits (so it is always '0'..'3'), the remaining 21
digits carry 6 bits each.
"""

from __future__ import annotations

import hashlib
import uuid

ALPHABET = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_$"
_INDEX = {c: i for i, c in enumerate(ALPHABET)}

GUID_LENGTH = 22


class GuidError(ValueError):
    pass


def guid_encode(bits: int) -> str:
    """Encode a 128-bit non-negative integer as a 22-char GlobalId."""
    if bits < 0 or bits >= 1 << 128:
        raise GuidError("value out of 128-bit range")
    digits = [ALPHABET[(bits >> 126) & 0x3]]
    for i in range(21):
        shift = 6 * (20 - i)
        digits.append(ALPHABET[(bits >> shift) & 0x3F])
    return "".join(digits)


def guid_decode(guid: str) -> int:
    """Decode a 22-char GlobalId back to its 128-bit integer."""
    if len(guid) != GUID_LENGTH:
        raise GuidError(f"GlobalId must be {GUID_LENGTH} chars, got {len(guid)}")
    try:
        values = [_INDEX[c] for c in guid]
    except KeyError as exc:
        raise GuidError(f"invalid GlobalId character {exc.args[0]!r}") from None
    if values[0] > 3:
        raise GuidError("first GlobalId char must be '0'..'3'")
    n = values[0]
    for v in values[1:]:
        n = (n << 6) | v
    return n


def is_guid(s: object) -> bool:
    if not isinstance(s, str) or len(s) != GUID_LENGTH:
        return False
    return s[0] in "0123" and all(c in _INDEX for c in s)


def new_guid() -> str:
    """Fresh random GlobalId."""
    return guid_encode(uuid.uuid4().int)


class SeededGuids:
    """Deterministic GlobalId stream derived from a seed string.

    Used in reproducible test mode: the same seed always yields the same
    id sequence, so replayed requests produce byte-identical models.
    """

    def __init__(self, seed: str):
        self._seed = seed.encode()
        self._counter = 0

    def next(self, used: set[str] | None = None) -> str:
        while True:
            digest = hashlib.sha256(self._seed + self._counter.to_bytes(8, "big")).digest()
            self._counter += 1
            guid = guid_encode(int.from_bytes(digest[:16], "big"))
            if used is None or guid not in used:
                return guid
