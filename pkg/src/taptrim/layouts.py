"""Text scanning for res files: @type/name references and custom widget tags.

Res files are stored as raw blobs, so scanning is regex-based rather than a
strict XML parse; decompiled resources are rarely well-formed enough for one.
"""

from __future__ import annotations

import re

from .model import RESOURCE_TYPES

RES_REF_RE = re.compile(r"@([a-z]+)/([A-Za-z0-9_.]+)")
WIDGET_TAG_RE = re.compile(r"<\s*([A-Za-z_$][A-Za-z0-9_$]*(?:\.[A-Za-z_$][A-Za-z0-9_$]*)+)")

_KNOWN_TYPES = frozenset(RESOURCE_TYPES)


def decode_res_text(blob: bytes) -> str:
    return blob.decode("utf-8", errors="replace")


def find_res_refs(text: str) -> set[tuple[str, str]]:
    """(rtype, name) pairs referenced as @type/name, known types only."""
    return {(t, n) for t, n in RES_REF_RE.findall(text) if t in _KNOWN_TYPES}


def find_widget_classes(text: str) -> set[str]:
    """Fully-qualified class names used as element tags."""
    return set(WIDGET_TAG_RE.findall(text))


def is_layout_path(path: str) -> bool:
    return path.startswith("res/layout/") and path.endswith(".xml")


def is_res_xml(path: str) -> bool:
    return path.startswith("res/") and path.endswith(".xml")
