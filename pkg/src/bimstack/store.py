"""Versioned object store with HMAC-presigned access.

Append-only: every put creates a new version; nothing is ever overwritten
or deleted. Versions live on disk as root/<bucket>/<quoted-key>/<versionId>
plus a small .meta.json sidecar, so a restart rebuilds the index by
scanning. Version ids are time-ordered (48-bit millisecond timestamp +
80 random bits, Crockford base32), strictly increasing per store instance.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import secrets as _secrets
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote, unquote

CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"

MIN_TTL_SEC = 1
MAX_TTL_SEC = 86400


class StoreError(Exception):
    pass


class NotFound(StoreError):
    pass


class BadGrant(StoreError):
    """Presigned access refused; str(exc) is the reason ('expired', ...)."""


def encode_version_id(bits128: int) -> str:
    digits = []
    for i in range(26):
        digits.append(CROCKFORD[(bits128 >> (5 * (25 - i))) & 0x1F])
    return "".join(digits)


def new_version_id(now_ms: int, rand80: int) -> str:
    return encode_version_id(((now_ms & (2**48 - 1)) << 80) | (rand80 & (2**80 - 1)))


@dataclass(frozen=True)
class ObjectVersion:
    bucket: str
    key: str
    version_id: str
    size: int
    content_hash: str  # sha-256 hex
    created_at: str  # RFC 3339 UTC

    def to_json(self) -> dict:
        return {
            "bucket": self.bucket,
            "key": self.key,
            "versionId": self.version_id,
            "size": self.size,
            "contentHash": self.content_hash,
            "createdAt": self.created_at,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ObjectVersion":
        return cls(d["bucket"], d["key"], d["versionId"], d["size"], d["contentHash"], d["createdAt"])


def _rfc3339(unix: float) -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(unix))


def canonical_grant_string(method: str, bucket: str, key: str, version_id: str, expires_at: int) -> str:
    return "\n".join([method.upper(), bucket, key, version_id or "", str(int(expires_at))])


def sign_grant(secret: bytes, method: str, bucket: str, key: str, version_id: str, expires_at: int) -> str:
    msg = canonical_grant_string(method, bucket, key, version_id, expires_at)
    return hmac.new(secret, msg.encode("utf-8"), hashlib.sha256).hexdigest()


class ObjectStore:
    def __init__(self, root: str | Path, secret: bytes | str, buckets: tuple[str, ...] = ("models",)):
        if isinstance(secret, str):
            secret = secret.encode("utf-8")
        self.root = Path(root)
        self.secret = secret
        self.buckets = set(buckets)
        self._lock = threading.Lock()
        self._index: dict[tuple[str, str], list[ObjectVersion]] = {}
        self._last_id_bits = 0
        for bucket in self.buckets:
            (self.root / bucket).mkdir(parents=True, exist_ok=True)
        self._scan()

    def _scan(self) -> None:
        for bucket_dir in self.root.iterdir():
            if not bucket_dir.is_dir():
                continue
            self.buckets.add(bucket_dir.name)
            for key_dir in bucket_dir.iterdir():
                if not key_dir.is_dir():
                    continue
                key = unquote(key_dir.name)
                versions = []
                for meta in key_dir.glob("*.meta.json"):
                    versions.append(ObjectVersion.from_json(json.loads(meta.read_text())))
                versions.sort(key=lambda v: v.version_id)
                if versions:
                    self._index[(bucket_dir.name, key)] = versions

    def _require_bucket(self, bucket: str) -> None:
        if bucket not in self.buckets:
            raise NotFound(f"unknown bucket {bucket!r}")

    def _key_dir(self, bucket: str, key: str) -> Path:
        return self.root / bucket / quote(key, safe="")

    def _next_version_id(self) -> str:
        # caller holds the lock
        now_ms = int(time.time() * 1000)
        bits = ((now_ms & (2**48 - 1)) << 80) | _secrets.randbits(80)
        if bits <= self._last_id_bits:
            bits = self._last_id_bits + 1  # same-ms or clock-skew guard
        self._last_id_bits = bits
        return encode_version_id(bits)

    def put_object(self, bucket: str, key: str, data: bytes) -> ObjectVersion:
        self._require_bucket(bucket)
        if not key:
            raise StoreError("empty key")
        if not data:
            raise StoreError("empty object body")
        with self._lock:
            version_id = self._next_version_id()
            version = ObjectVersion(
                bucket=bucket,
                key=key,
                version_id=version_id,
                size=len(data),
                content_hash=hashlib.sha256(data).hexdigest(),
                created_at=_rfc3339(time.time()),
            )
            key_dir = self._key_dir(bucket, key)
            key_dir.mkdir(parents=True, exist_ok=True)
            blob = key_dir / version_id
            tmp = key_dir / f".{version_id}.tmp"
            tmp.write_bytes(data)
            os.replace(tmp, blob)
            (key_dir / f"{version_id}.meta.json").write_text(json.dumps(version.to_json()))
            self._index.setdefault((bucket, key), []).append(version)
        return version

    def list_versions(self, bucket: str, key: str) -> list[ObjectVersion]:
        self._require_bucket(bucket)
        return list(self._index.get((bucket, key), []))

    def _find(self, bucket: str, key: str, version_id: str | None) -> ObjectVersion:
        versions = self._index.get((bucket, key), [])
        if not versions:
            raise NotFound(f"no object {bucket}/{key}")
        if version_id is None:
            return versions[-1]
        for v in versions:
            if v.version_id == version_id:
                return v
        raise NotFound(f"no version {version_id} of {bucket}/{key}")

    def get_object(self, bucket: str, key: str, version_id: str | None = None) -> bytes:
        self._require_bucket(bucket)
        version = self._find(bucket, key, version_id)
        return (self._key_dir(bucket, key) / version.version_id).read_bytes()

    def stat(self, bucket: str, key: str, version_id: str | None = None) -> ObjectVersion:
        self._require_bucket(bucket)
        return self._find(bucket, key, version_id)

    # --- presigned access ---------------------------------------------------

    def presign(
        self,
        method: str,
        bucket: str,
        key: str,
        version_id: str | None = None,
        ttl_sec: int = 300,
        now: float | None = None,
    ) -> str:
        """Relative presigned URL (path + query); prepend the service base URL."""
        if not (MIN_TTL_SEC <= ttl_sec <= MAX_TTL_SEC):
            raise StoreError(f"ttl must be within [{MIN_TTL_SEC}, {MAX_TTL_SEC}] seconds")
        method = method.upper()
        if method not in ("GET", "POST"):
            raise StoreError("presign supports GET and POST only")
        self._require_bucket(bucket)
        expires_at = int(now if now is not None else time.time()) + int(ttl_sec)
        sig = sign_grant(self.secret, method, bucket, key, version_id or "", expires_at)
        url = f"/bucket/{quote(bucket, safe='')}/{quote(key, safe='/')}"
        params = []
        if version_id:
            params.append(f"versionId={quote(version_id, safe='')}")
        params.append(f"X-Expires={expires_at}")
        params.append(f"X-Sig={sig}")
        return url + "?" + "&".join(params)

    def verify_grant(
        self,
        method: str,
        bucket: str,
        key: str,
        version_id: str,
        expires_at: str,
        sig: str,
        now: float | None = None,
    ) -> None:
        """Raises BadGrant('bad signature') or BadGrant('expired')."""
        try:
            expiry = int(expires_at)
        except (TypeError, ValueError):
            raise BadGrant("bad signature") from None
        expected = sign_grant(self.secret, method, bucket, key, version_id or "", expiry)
        if not hmac.compare_digest(expected, sig or ""):
            raise BadGrant("bad signature")
        if (now if now is not None else time.time()) > expiry:
            raise BadGrant("expired")
