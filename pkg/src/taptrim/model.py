"""Domain model for TAP packages.

A TAP archive is a ZIP with a plain-text manifest, one textual class file
per class, a tab-separated resource table, and raw blobs for res, asset
and native-library files. Everything here is an immutable value; pipeline
stages build new Package instances instead of mutating.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

from .errors import InvalidPackage

FQN_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*(\.[A-Za-z_$][A-Za-z0-9_$]*)*\Z")
IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*\Z")

RESOURCE_TYPES = ("drawable", "layout", "string", "color", "attr", "array", "other")
#: resource types whose entries carry a file under res/
FILE_BACKED_TYPES = frozenset({"drawable", "layout"})

CONSTRUCTOR = "<init>"
STATIC_INIT = "<clinit>"


def is_fqn(name: str) -> bool:
    return bool(FQN_RE.match(name))


def simple_name(fqn: str) -> str:
    return fqn.rsplit(".", 1)[-1]


def is_resource_index_class(fqn: str) -> bool:
    """True for generated resource-index classes (simple name R or R$<type>)."""
    simple = simple_name(fqn)
    return simple == "R" or simple.startswith("R$")


def class_storage_path(fqn: str) -> str:
    return "classes/" + fqn.replace(".", "/") + ".cls"


# --------------------------------------------------------------------------- #
# instructions


@dataclass(frozen=True)
class Invoke:
    owner: str
    name: str
    descriptor: str


@dataclass(frozen=True)
class NewInstance:
    owner: str


@dataclass(frozen=True)
class FieldAccess:
    owner: str
    field_name: str


@dataclass(frozen=True)
class ConstString:
    value: str


@dataclass(frozen=True)
class ConstResource:
    resource_id: int  # 32-bit unsigned, rendered 0x%08x


Instruction = Invoke | NewInstance | FieldAccess | ConstString | ConstResource


# --------------------------------------------------------------------------- #
# code model


@dataclass(frozen=True)
class MethodDef:
    name: str  # identifier, or <init> / <clinit>
    descriptor: str  # JVM-style signature, e.g. (II)I
    is_native: bool = False
    body: tuple[Instruction, ...] = ()

    @property
    def key(self) -> tuple[str, str]:
        return (self.name, self.descriptor)


@dataclass(frozen=True)
class ClassDef:
    name: str
    superclass: str | None = None
    interfaces: tuple[str, ...] = ()
    fields: tuple[tuple[str, str], ...] = ()  # (name, descriptor)
    methods: tuple[MethodDef, ...] = ()

    def method(self, name: str, descriptor: str) -> MethodDef | None:
        for m in self.methods:
            if m.name == name and m.descriptor == descriptor:
                return m
        return None

    def defines(self, name: str, descriptor: str) -> bool:
        return self.method(name, descriptor) is not None


# --------------------------------------------------------------------------- #
# manifest and resource table


@dataclass(frozen=True)
class Manifest:
    package_name: str
    application_class: str | None = None
    activities: tuple[str, ...] = ()
    main_activity: str | None = None
    services: tuple[str, ...] = ()
    receivers: tuple[str, ...] = ()
    providers: tuple[str, ...] = ()

    def declared_classes(self) -> Iterator[str]:
        if self.application_class:
            yield self.application_class
        yield from self.activities
        yield from self.services
        yield from self.receivers
        yield from self.providers


@dataclass(frozen=True)
class ResourceEntry:
    resource_id: int
    rtype: str
    name: str
    path: str | None = None  # package-relative path under res/, file-backed types only

    @property
    def id_hex(self) -> str:
        return f"0x{self.resource_id:08x}"


@dataclass(frozen=True)
class ResourceTable:
    entries: tuple[ResourceEntry, ...] = ()

    @cached_property
    def by_id(self) -> Mapping[int, ResourceEntry]:
        return {e.resource_id: e for e in self.entries}

    @cached_property
    def by_type_name(self) -> Mapping[tuple[str, str], ResourceEntry]:
        return {(e.rtype, e.name): e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)


# --------------------------------------------------------------------------- #
# the package


@dataclass(frozen=True)
class Package:
    manifest: Manifest
    classes: dict[str, ClassDef] = field(default_factory=dict)
    resource_table: ResourceTable = ResourceTable()
    res_files: dict[str, bytes] = field(default_factory=dict)
    asset_files: dict[str, bytes] = field(default_factory=dict)
    native_files: dict[str, bytes] = field(default_factory=dict)

    def internal(self, fqn: str) -> bool:
        return fqn in self.classes


@dataclass(frozen=True)
class ComponentSizes:
    res_bytes: int
    assets_bytes: int
    native_bytes: int
    code_bytes: int
    config_bytes: int

    @property
    def total(self) -> int:
        return (
            self.res_bytes
            + self.assets_bytes
            + self.native_bytes
            + self.code_bytes
            + self.config_bytes
        )

    def to_dict(self) -> dict[str, int]:
        return {
            "res_bytes": self.res_bytes,
            "assets_bytes": self.assets_bytes,
            "native_bytes": self.native_bytes,
            "code_bytes": self.code_bytes,
            "config_bytes": self.config_bytes,
            "total_bytes": self.total,
        }


def validate_package(pkg: Package) -> None:
    """Raise InvalidPackage on the first structural invariant violation."""
    problems: list[str] = []
    if not pkg.manifest.package_name:
        problems.append("manifest has no package name")
    if pkg.manifest.main_activity and pkg.manifest.main_activity not in pkg.manifest.activities:
        problems.append(f"main-activity {pkg.manifest.main_activity} not listed as an activity")
    for fqn, cls in pkg.classes.items():
        if cls.name != fqn:
            problems.append(f"class stored under {fqn} declares name {cls.name}")
        if cls.superclass == cls.name:
            problems.append(f"{fqn} is its own superclass")
        seen: set[tuple[str, str]] = set()
        for m in cls.methods:
            if m.key in seen:
                problems.append(f"{fqn} defines {m.name} {m.descriptor} twice")
            seen.add(m.key)
            if m.is_native and m.body:
                problems.append(f"{fqn}.{m.name} is native but has a body")
    ids: set[int] = set()
    for entry in pkg.resource_table.entries:
        if entry.resource_id in ids:
            problems.append(f"duplicate resource id {entry.id_hex}")
        ids.add(entry.resource_id)
        if entry.rtype in FILE_BACKED_TYPES and not entry.path:
            problems.append(f"{entry.rtype} entry {entry.name} has no file path")
        if entry.rtype not in FILE_BACKED_TYPES and entry.path:
            problems.append(f"{entry.rtype} entry {entry.name} must not have a file path")
        if entry.path and entry.path not in pkg.res_files:
            problems.append(f"resource {entry.name} points at missing file {entry.path}")
    if problems:
        raise InvalidPackage("; ".join(problems))
