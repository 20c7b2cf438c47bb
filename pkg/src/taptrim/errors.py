"""Exception types raised across the taptrim pipeline."""

from __future__ import annotations


class TapError(Exception):
    """Base class for all taptrim errors."""


class MalformedArchive(TapError):
    """The input is not a readable TAP container."""


class MissingManifest(TapError):
    """The archive has no manifest.txt entry."""


class ManifestParseError(TapError):
    def __init__(self, message: str, line: int):
        super().__init__(f"manifest.txt:{line}: {message}")
        self.line = line


class ClassParseError(TapError):
    def __init__(self, message: str, line: int, path: str | None = None):
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.path = path


class DuplicateMethod(ClassParseError):
    """Two method blocks in one class share a (name, descriptor) pair."""


class TableParseError(TapError):
    def __init__(self, message: str, line: int):
        super().__init__(f"resource-table.tsv:{line}: {message}")
        self.line = line


class PathMismatch(TapError):
    """A class file's declaration does not match its storage path."""


class InvalidPackage(TapError):
    """A Package value violates one of its structural invariants."""


class CyclicHierarchy(TapError):
    def __init__(self, cycle: list[str]):
        super().__init__("inheritance cycle: " + " -> ".join(cycle))
        self.cycle = cycle


class MissingSeed(TapError):
    """A manifest-declared entry class is absent from the package."""


class ConfigError(TapError):
    """A trim configuration value is unusable."""


class ConfigMismatch(TapError):
    """A reachability result was produced from a different package."""


class EmptyPackage(TapError):
    """An analysis that needs a nonzero total size got an empty package."""


class EmptyCode(TapError):
    """library_ratio needs at least one byte of procedure code."""
