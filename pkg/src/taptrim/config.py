"""Trim configuration: keep rules, platform namespaces, library attribution."""

from __future__ import annotations

import fnmatch
import hashlib
import re
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError
from .kv import iter_kv_lines

DEFAULT_PLATFORM_PREFIXES = ("android.", "java.", "javax.", "kotlin.")
DEFAULT_ENTRY_BASES = (
    "android.app.Application",
    "android.app.Activity",
    "android.app.Service",
    "android.content.BroadcastReceiver",
    "android.content.ContentProvider",
)
DEFAULT_ENUM_BASE = "java.lang.Enum"
DEFAULT_CALLBACK_PATTERNS = ("on*", "<init>", "<clinit>")
DEFAULT_LIBRARY_PREFIXES = (
    "android.",
    "androidx.",
    "com.android.",
    "com.google.",
    "kotlin.",
    "kotlinx.",
    "org.apache.",
    "org.jetbrains.",
    "io.reactivex.",
    "okhttp3.",
    "com.squareup.",
    "retrofit2.",
)

# config file / CLI override keys mapped to TrimConfig list fields
_LIST_KEYS = {
    "platform-prefix": "platform_prefixes",
    "entry-base": "entry_bases",
    "callback-pattern": "callback_patterns",
    "extra-keep": "extra_keep",
    "library-prefix": "library_prefixes",
}


@dataclass(frozen=True)
class TrimConfig:
    platform_prefixes: tuple[str, ...] = DEFAULT_PLATFORM_PREFIXES
    entry_bases: tuple[str, ...] = DEFAULT_ENTRY_BASES
    enum_base: str = DEFAULT_ENUM_BASE
    callback_patterns: tuple[str, ...] = DEFAULT_CALLBACK_PATTERNS
    extra_keep: tuple[str, ...] = ()
    library_prefixes: tuple[str, ...] = DEFAULT_LIBRARY_PREFIXES

    def __post_init__(self) -> None:
        if not self.platform_prefixes:
            raise ConfigError("platform prefix list must not be empty")
        if not self.library_prefixes:
            raise ConfigError("library prefix list must not be empty")
        if not self.entry_bases:
            raise ConfigError("entry base list must not be empty")
        for glob in (*self.callback_patterns, *self.extra_keep):
            if not glob or glob != glob.strip():
                raise ConfigError(f"invalid glob {glob!r}")
            try:
                re.compile(fnmatch.translate(glob))
            except re.error as err:
                raise ConfigError(f"invalid glob {glob!r}: {err}") from None

    def is_platform(self, fqn: str) -> bool:
        return fqn.startswith(self.platform_prefixes)

    def is_library(self, fqn: str) -> bool:
        return fqn.startswith(self.library_prefixes)

    def matches_callback(self, method_name: str) -> bool:
        return any(fnmatch.fnmatchcase(method_name, g) for g in self.callback_patterns)

    def digest(self) -> str:
        text = repr(self)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_trim_config(text: str, base: TrimConfig | None = None) -> TrimConfig:
    """Apply `key: value` lines on top of ``base`` (defaults if omitted).

    A list key appearing at least once replaces the base list wholesale.
    """
    cfg = base or TrimConfig()
    collected: dict[str, list[str]] = {}
    enum_base: str | None = None
    try:
        for lineno, key, value in iter_kv_lines(text):
            if key in _LIST_KEYS:
                collected.setdefault(_LIST_KEYS[key], []).append(value)
            elif key == "enum-base":
                enum_base = value
            else:
                raise ConfigError(f"line {lineno}: unknown config key {key!r}")
    except ValueError as err:
        raise ConfigError(f"line {err}") from None
    updates: dict[str, object] = {name: tuple(vals) for name, vals in collected.items()}
    if enum_base is not None:
        updates["enum_base"] = enum_base
    return replace(cfg, **updates) if updates else cfg


def load_trim_config(path: str | Path, base: TrimConfig | None = None) -> TrimConfig:
    return parse_trim_config(Path(path).read_text(encoding="utf-8"), base)
