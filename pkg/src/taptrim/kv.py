"""Shared line format for manifest.txt and trim config files.

`key: value` per line, `#` comments, blank lines ignored.
"""

from __future__ import annotations

from typing import Iterator


def iter_kv_lines(text: str) -> Iterator[tuple[int, str, str]]:
    """Yield (lineno, key, value); raises ValueError with the line number."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"{lineno}: expected 'key: value', got {line!r}")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ValueError(f"{lineno}: expected 'key: value', got {line!r}")
        yield lineno, key, value
