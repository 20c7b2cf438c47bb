"""TAP container I/O: parse, deterministic repack, and size accounting.

Container layout:

    manifest.txt
    classes/<FQN with dots as slashes>.cls
    res/resource-table.tsv
    res/**            (layout XML, drawables, ...)
    assets/**
    lib/**

Repacking is deterministic: entries sorted bytewise by path, zeroed
timestamps, fixed permissions and compression level, so equal packages
produce bit-identical archives.
"""

from __future__ import annotations

import io
import re
import zipfile

from .classfile import class_text_size, parse_class_text, serialize_class_text
from .errors import (
    MalformedArchive,
    ManifestParseError,
    MissingManifest,
    PathMismatch,
    TableParseError,
)
from .kv import iter_kv_lines
from .model import (
    ClassDef,
    ComponentSizes,
    FILE_BACKED_TYPES,
    Manifest,
    Package,
    RESOURCE_TYPES,
    ResourceEntry,
    ResourceTable,
    class_storage_path,
    is_fqn,
    validate_package,
)

MANIFEST_PATH = "manifest.txt"
RESOURCE_TABLE_PATH = "res/resource-table.tsv"

_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)
_COMPRESSION_LEVEL = 6


# --------------------------------------------------------------------------- #
# manifest


def parse_manifest(text: str) -> Manifest:
    package_name: str | None = None
    application: str | None = None
    main_activity: str | None = None
    lists: dict[str, list[str]] = {"activity": [], "service": [], "receiver": [], "provider": []}

    try:
        pairs = list(iter_kv_lines(text))
    except ValueError as err:
        lineno, _, msg = str(err).partition(": ")
        raise ManifestParseError(msg, int(lineno)) from None

    for lineno, key, value in pairs:
        if key in ("package", "application", "main-activity") and not is_fqn(value):
            raise ManifestParseError(f"invalid class name {value!r}", lineno)
        if key == "package":
            if package_name is not None:
                raise ManifestParseError("duplicate package line", lineno)
            package_name = value
        elif key == "application":
            if application is not None:
                raise ManifestParseError("duplicate application line", lineno)
            application = value
        elif key == "main-activity":
            if main_activity is not None:
                raise ManifestParseError("duplicate main-activity line", lineno)
            main_activity = value
        elif key in lists:
            if not is_fqn(value):
                raise ManifestParseError(f"invalid class name {value!r}", lineno)
            lists[key].append(value)
        else:
            raise ManifestParseError(f"unknown key {key!r}", lineno)

    if package_name is None:
        raise ManifestParseError("missing package line", 1)
    if main_activity is not None and main_activity not in lists["activity"]:
        raise ManifestParseError(f"main-activity {main_activity} is not a declared activity", 1)
    return Manifest(
        package_name=package_name,
        application_class=application,
        activities=tuple(lists["activity"]),
        main_activity=main_activity,
        services=tuple(lists["service"]),
        receivers=tuple(lists["receiver"]),
        providers=tuple(lists["provider"]),
    )


def serialize_manifest(manifest: Manifest) -> str:
    lines = [f"package: {manifest.package_name}"]
    if manifest.application_class:
        lines.append(f"application: {manifest.application_class}")
    lines.extend(f"activity: {a}" for a in manifest.activities)
    if manifest.main_activity:
        lines.append(f"main-activity: {manifest.main_activity}")
    lines.extend(f"service: {s}" for s in manifest.services)
    lines.extend(f"receiver: {r}" for r in manifest.receivers)
    lines.extend(f"provider: {p}" for p in manifest.providers)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- #
# resource table


_RESOURCE_NAME_RE = re.compile(r"[A-Za-z0-9_.]+\Z")


def parse_resource_table(text: str) -> ResourceTable:
    entries: list[ResourceEntry] = []
    seen_ids: set[int] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        if not raw.strip():
            continue
        cols = raw.split("\t")
        if len(cols) != 4:
            raise TableParseError(f"expected 4 tab-separated fields, got {len(cols)}", lineno)
        id_text, rtype, name, path = cols
        if not id_text.startswith("0x"):
            raise TableParseError(f"resource id must be 0x-prefixed hex, got {id_text!r}", lineno)
        try:
            resource_id = int(id_text, 16)
        except ValueError:
            raise TableParseError(f"bad resource id {id_text!r}", lineno) from None
        if not 0 <= resource_id <= 0xFFFFFFFF:
            raise TableParseError(f"resource id {id_text} out of 32-bit range", lineno)
        if rtype not in RESOURCE_TYPES:
            raise TableParseError(f"unknown resource type {rtype!r}", lineno)
        if not _RESOURCE_NAME_RE.match(name):
            raise TableParseError(f"invalid resource name {name!r}", lineno)
        if rtype in FILE_BACKED_TYPES and not path:
            raise TableParseError(f"{rtype} entry {name} needs a file path", lineno)
        if rtype not in FILE_BACKED_TYPES and path:
            raise TableParseError(f"{rtype} entry {name} must not have a file path", lineno)
        if resource_id in seen_ids:
            raise TableParseError(f"duplicate resource id {id_text}", lineno)
        seen_ids.add(resource_id)
        entries.append(ResourceEntry(resource_id, rtype, name, path or None))
    return ResourceTable(tuple(entries))


def serialize_resource_table(table: ResourceTable) -> str:
    return "".join(
        f"{e.id_hex}\t{e.rtype}\t{e.name}\t{e.path or ''}\n" for e in table.entries
    )


def resource_row_size(entry: ResourceEntry) -> int:
    return len(f"{entry.id_hex}\t{entry.rtype}\t{entry.name}\t{entry.path or ''}\n".encode("utf-8"))


# --------------------------------------------------------------------------- #
# container


def parse_package(archive_bytes: bytes) -> Package:
    """Parse a TAP archive into an in-memory Package."""
    try:
        zf = zipfile.ZipFile(io.BytesIO(archive_bytes))
    except zipfile.BadZipFile as err:
        raise MalformedArchive(f"not a ZIP archive: {err}") from None

    with zf:
        infos = [i for i in zf.infolist() if not i.is_dir()]
        names = [i.filename for i in infos]
        if len(set(names)) != len(names):
            raise MalformedArchive("archive contains duplicate entry paths")
        blobs = {i.filename: zf.read(i) for i in infos}

    if MANIFEST_PATH not in blobs:
        raise MissingManifest("archive has no manifest.txt")
    manifest = parse_manifest(blobs.pop(MANIFEST_PATH).decode("utf-8"))

    table = ResourceTable()
    if RESOURCE_TABLE_PATH in blobs:
        table = parse_resource_table(blobs.pop(RESOURCE_TABLE_PATH).decode("utf-8"))

    classes: dict[str, ClassDef] = {}
    res_files: dict[str, bytes] = {}
    asset_files: dict[str, bytes] = {}
    native_files: dict[str, bytes] = {}
    for path in sorted(blobs):
        data = blobs[path]
        if path.startswith("classes/"):
            if not path.endswith(".cls"):
                raise MalformedArchive(f"unexpected entry under classes/: {path}")
            cls = parse_class_text(data.decode("utf-8"), path=path)
            expected = class_storage_path(cls.name)
            if expected != path:
                raise PathMismatch(f"{path} declares class {cls.name} (expected {expected})")
            classes[cls.name] = cls
        elif path.startswith("res/"):
            res_files[path] = data
        elif path.startswith("assets/"):
            asset_files[path] = data
        elif path.startswith("lib/"):
            native_files[path] = data
        else:
            raise MalformedArchive(f"unexpected archive entry {path}")

    pkg = Package(
        manifest=manifest,
        classes=classes,
        resource_table=table,
        res_files=res_files,
        asset_files=asset_files,
        native_files=native_files,
    )
    validate_package(pkg)
    return pkg


def _entries(pkg: Package) -> dict[str, bytes]:
    entries: dict[str, bytes] = {MANIFEST_PATH: serialize_manifest(pkg.manifest).encode("utf-8")}
    if pkg.resource_table.entries:
        entries[RESOURCE_TABLE_PATH] = serialize_resource_table(pkg.resource_table).encode("utf-8")
    for cls in pkg.classes.values():
        entries[class_storage_path(cls.name)] = serialize_class_text(cls).encode("utf-8")
    entries.update(pkg.res_files)
    entries.update(pkg.asset_files)
    entries.update(pkg.native_files)
    return entries


def serialize_package(pkg: Package) -> bytes:
    """Deterministic repack. Raises InvalidPackage on invariant violations."""
    validate_package(pkg)
    entries = _entries(pkg)
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED, compresslevel=_COMPRESSION_LEVEL) as zf:
        for path in sorted(entries):
            info = zipfile.ZipInfo(filename=path, date_time=_ZIP_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.create_system = 0
            info.external_attr = 0o644 << 16
            zf.writestr(info, entries[path])
    return buf.getvalue()


def component_sizes(pkg: Package) -> ComponentSizes:
    """Uncompressed byte counts per package component.

    Code, config and table sizes are canonical-serialization sizes; on
    archives produced by serialize_package they match the raw entries
    byte for byte.
    """
    table_bytes = 0
    if pkg.resource_table.entries:
        table_bytes = len(serialize_resource_table(pkg.resource_table).encode("utf-8"))
    return ComponentSizes(
        res_bytes=sum(len(b) for b in pkg.res_files.values()) + table_bytes,
        assets_bytes=sum(len(b) for b in pkg.asset_files.values()),
        native_bytes=sum(len(b) for b in pkg.native_files.values()),
        code_bytes=sum(class_text_size(c) for c in pkg.classes.values()),
        config_bytes=len(serialize_manifest(pkg.manifest).encode("utf-8")),
    )
