"""Bloat detection: turn a reachability result into removal reports."""

from __future__ import annotations

from dataclasses import dataclass

from .classfile import class_text_size, method_block_size
from .errors import ConfigMismatch
from .layouts import decode_res_text, find_res_refs
from .model import FILE_BACKED_TYPES, Package, ResourceEntry
from .refgraph import ReachabilityResult, package_digest

__all__ = [
    "CodeBloatReport",
    "ResBloatReport",
    "AssetBloatReport",
    "detect_code_bloat",
    "detect_res_bloat",
    "detect_asset_bloat",
]


def _check_digest(pkg: Package, result: ReachabilityResult) -> None:
    if result.package_digest != package_digest(pkg):
        raise ConfigMismatch("reachability result was computed for a different package")


@dataclass(frozen=True)
class CodeBloatReport:
    removable_classes: frozenset[str]
    removable_methods: frozenset[tuple[str, str, str]]  # within kept classes
    class_bytes: dict[str, int]
    method_bytes: dict[tuple[str, str, str], int]

    @property
    def total_bytes(self) -> int:
        return sum(self.class_bytes.values()) + sum(self.method_bytes.values())

    def to_dict(self) -> dict:
        return {
            "removable_classes": [
                {"class": c, "bytes": self.class_bytes[c]} for c in sorted(self.removable_classes)
            ],
            "removable_methods": [
                {"class": o, "method": n, "descriptor": d, "bytes": self.method_bytes[(o, n, d)]}
                for o, n, d in sorted(self.removable_methods)
            ],
            "total_bytes": self.total_bytes,
        }

    def tsv_rows(self) -> list[tuple[str, str, int]]:
        rows = [("class", c, self.class_bytes[c]) for c in sorted(self.removable_classes)]
        rows += [
            ("method", f"{o}.{n} {d}", self.method_bytes[(o, n, d)])
            for o, n, d in sorted(self.removable_methods)
        ]
        return rows


@dataclass(frozen=True)
class ResBloatReport:
    unused_entries: tuple[ResourceEntry, ...]  # drawable/layout only, sorted by id
    file_bytes: dict[int, int]  # entry id -> file size

    @property
    def unused_ids(self) -> frozenset[int]:
        return frozenset(e.resource_id for e in self.unused_entries)

    @property
    def total_bytes(self) -> int:
        return sum(self.file_bytes.values())

    def to_dict(self) -> dict:
        return {
            "unused_entries": [
                {
                    "id": e.id_hex,
                    "type": e.rtype,
                    "name": e.name,
                    "path": e.path,
                    "bytes": self.file_bytes[e.resource_id],
                }
                for e in self.unused_entries
            ],
            "total_bytes": self.total_bytes,
        }

    def tsv_rows(self) -> list[tuple[str, str, int]]:
        return [
            (e.rtype, f"{e.id_hex} {e.rtype}/{e.name}", self.file_bytes[e.resource_id])
            for e in self.unused_entries
        ]


@dataclass(frozen=True)
class AssetBloatReport:
    unused_assets: tuple[str, ...]  # sorted package-relative paths
    asset_bytes: dict[str, int]

    @property
    def total_bytes(self) -> int:
        return sum(self.asset_bytes.values())

    def to_dict(self) -> dict:
        return {
            "unused_assets": [
                {"path": p, "bytes": self.asset_bytes[p]} for p in self.unused_assets
            ],
            "total_bytes": self.total_bytes,
        }

    def tsv_rows(self) -> list[tuple[str, str, int]]:
        return [("asset", p, self.asset_bytes[p]) for p in self.unused_assets]


# --------------------------------------------------------------------------- #
# detectors


def detect_code_bloat(pkg: Package, result: ReachabilityResult) -> CodeBloatReport:
    _check_digest(pkg, result)
    removable_classes = frozenset(pkg.classes) - result.kept_classes
    removable_methods: set[tuple[str, str, str]] = set()
    method_bytes: dict[tuple[str, str, str], int] = {}
    for name in result.kept_classes:
        cls = pkg.classes[name]
        for m in cls.methods:
            key = (name, m.name, m.descriptor)
            if key not in result.kept_methods:
                removable_methods.add(key)
                method_bytes[key] = method_block_size(m)
    class_bytes = {c: class_text_size(pkg.classes[c]) for c in removable_classes}
    return CodeBloatReport(removable_classes, frozenset(removable_methods), class_bytes, method_bytes)


def _res_usage_closure(pkg: Package, used_ids: frozenset[int], transitive: bool) -> set[int]:
    """Ids reachable from code uses, optionally closed over file-to-file refs."""
    table = pkg.resource_table
    used = {e.resource_id for e in table.entries if e.resource_id in used_ids}
    if not transitive:
        return used
    pending = list(used)
    while pending:
        entry = table.by_id[pending.pop()]
        if not entry.path or not entry.path.endswith(".xml"):
            continue
        text = decode_res_text(pkg.res_files[entry.path])
        for rtype, name in find_res_refs(text):
            target = table.by_type_name.get((rtype, name))
            if target and target.resource_id not in used:
                used.add(target.resource_id)
                pending.append(target.resource_id)
    return used


def detect_res_bloat(
    pkg: Package, result: ReachabilityResult, *, paper_strict: bool = False
) -> ResBloatReport:
    """Unused drawable/layout entries. By default usage closes transitively
    over @type/name references between res files; --paper-strict limits the
    scan to ids mentioned in code."""
    _check_digest(pkg, result)
    used = _res_usage_closure(pkg, result.used_resource_ids, transitive=not paper_strict)
    unused = tuple(
        sorted(
            (
                e
                for e in pkg.resource_table.entries
                if e.rtype in FILE_BACKED_TYPES and e.resource_id not in used
            ),
            key=lambda e: e.resource_id,
        )
    )
    file_bytes = {e.resource_id: len(pkg.res_files[e.path]) for e in unused}
    return ResBloatReport(unused, file_bytes)


def asset_path_is_used(path: str, strings: frozenset[str], *, prefixes: bool = True) -> bool:
    """True if a code string names this asset, with or without the assets/
    prefix, or (unless disabled) names one of its parent directories."""
    rel = path[len("assets/"):] if path.startswith("assets/") else path
    full = "assets/" + rel
    if rel in strings or full in strings:
        return True
    if not prefixes:
        return False
    for s in strings:
        for candidate in (rel, full):
            if s and s != candidate and candidate.startswith(s):
                if s.endswith("/") or candidate[len(s)] == "/":
                    return True
    return False


def detect_asset_bloat(
    pkg: Package, result: ReachabilityResult, *, paper_strict: bool = False
) -> AssetBloatReport:
    _check_digest(pkg, result)
    unused = tuple(
        sorted(
            p
            for p in pkg.asset_files
            if not asset_path_is_used(p, result.asset_strings, prefixes=not paper_strict)
        )
    )
    asset_bytes = {p: len(pkg.asset_files[p]) for p in unused}
    return AssetBloatReport(unused, asset_bytes)
