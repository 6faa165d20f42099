"""Content-addressed blob store used for NFT metadata.

Hashes are SHA-256 over the raw bytes, rendered as lowercase hex.  The store
is append-only.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from . import errors

HASH_HEX_LEN = 64


def content_hash(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()


def check_hash(h: Any) -> str:
    if not isinstance(h, str) or len(h) != HASH_HEX_LEN:
        raise errors.InvalidHash(f"expected {HASH_HEX_LEN} hex chars, got {h!r}")
    try:
        bytes.fromhex(h)
    except ValueError:
        raise errors.InvalidHash(f"not hex: {h!r}") from None
    return h.lower()


def encode_metadata(doc: Any) -> bytes:
    """Canonical bytes for a JSON metadata document (sorted keys, no spaces)."""
    if isinstance(doc, bytes):
        return doc
    if isinstance(doc, str):
        return doc.encode("utf-8")
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


class MetadataStore:
    def __init__(self) -> None:
        self._blobs: dict[str, bytes] = {}

    def put(self, blob: bytes) -> str:
        h = content_hash(blob)
        self._blobs.setdefault(h, bytes(blob))
        return h

    def get(self, h: str) -> bytes:
        try:
            return self._blobs[check_hash(h)]
        except KeyError:
            raise errors.NotFound(h) from None

    def verify(self, h: str) -> bool:
        """Re-hash the stored blob and compare, as a buyer would."""
        return content_hash(self.get(h)) == check_hash(h)

    def __contains__(self, h: str) -> bool:
        return h in self._blobs

    def __len__(self) -> int:
        return len(self._blobs)

    def hashes(self) -> list[str]:
        return sorted(self._blobs)
