# digests.py - Content digests for provenance records
# This file computes SHA-256 digests of files, bytes and JSON-able payloads.

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Union


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_file(path: Union[str, Path]) -> str:
    """SHA-256 of a file's bytes, streamed in 1 MiB chunks."""
    sha = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            sha.update(chunk)
    return sha.hexdigest()


def digest_payload(payload: Any) -> str:
    """Digest of a JSON-serialisable payload with sorted keys."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return digest_bytes(text.encode("utf-8"))


def combine_digests(digests: Iterable[str]) -> str:
    return digest_bytes("\n".join(digests).encode("utf-8"))
