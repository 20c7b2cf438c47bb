"""The trim pipeline: assets, then res entries, then procedure code, plus
static link verification of the result."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .archive import component_sizes
from .bloat import detect_asset_bloat, detect_code_bloat, detect_res_bloat
from .config import TrimConfig
from .errors import InvalidPackage
from .layouts import decode_res_text, find_res_refs, find_widget_classes, is_res_xml
from .model import (
    ClassDef,
    ComponentSizes,
    ConstResource,
    FieldAccess,
    Invoke,
    NewInstance,
    Package,
    ResourceTable,
    is_resource_index_class,
    validate_package,
)
from .refgraph import Missing, build_hierarchy, reach, resolve_method

__all__ = ["StageStats", "TrimReport", "VerifyReport", "trim", "verify_links"]


@dataclass(frozen=True)
class StageStats:
    items_removed: dict[str, int]
    bytes_removed: int

    def to_dict(self) -> dict:
        return {"items_removed": dict(self.items_removed), "bytes_removed": self.bytes_removed}


@dataclass(frozen=True)
class TrimReport:
    stages: dict[str, StageStats]  # keyed by stage name, in execution order
    original_sizes: ComponentSizes
    trimmed_sizes: ComponentSizes

    @property
    def absolute_reduction(self) -> int:
        return self.original_sizes.total - self.trimmed_sizes.total

    @property
    def normalized_reduction(self) -> float:
        total = self.original_sizes.total
        return self.absolute_reduction / total if total else 0.0

    @property
    def items_removed_total(self) -> int:
        return sum(sum(s.items_removed.values()) for s in self.stages.values())

    def to_dict(self) -> dict:
        return {
            "stages": {name: stats.to_dict() for name, stats in self.stages.items()},
            "original_sizes": self.original_sizes.to_dict(),
            "trimmed_sizes": self.trimmed_sizes.to_dict(),
            "absolute_reduction": self.absolute_reduction,
            "normalized_reduction": self.normalized_reduction,
        }

    def render_table(self) -> str:
        lines = [f"{'stage':<8} {'removed':>28} {'bytes':>12}"]
        for name, stats in self.stages.items():
            items = ", ".join(f"{v} {k}" for k, v in sorted(stats.items_removed.items())) or "-"
            lines.append(f"{name:<8} {items:>28} {stats.bytes_removed:>12}")
        lines.append(
            f"{'total':<8} {self.items_removed_total:>21} items "
            f"{self.absolute_reduction:>12}"
        )
        lines.append(
            f"size: {self.original_sizes.total} -> {self.trimmed_sizes.total} bytes "
            f"({self.normalized_reduction:.2%} reduction)"
        )
        return "\n".join(lines)


# --------------------------------------------------------------------------- #
# trim


def _remove_assets(pkg: Package, unused: tuple[str, ...]) -> Package:
    doomed = set(unused)
    return replace(pkg, asset_files={p: b for p, b in pkg.asset_files.items() if p not in doomed})


def _remove_res_entries(pkg: Package, unused_ids: frozenset[int]) -> Package:
    kept = tuple(e for e in pkg.resource_table.entries if e.resource_id not in unused_ids)
    kept_paths = {e.path for e in kept if e.path}
    doomed_paths = {
        e.path for e in pkg.resource_table.entries if e.resource_id in unused_ids and e.path
    } - kept_paths
    res_files = {p: b for p, b in pkg.res_files.items() if p not in doomed_paths}
    return replace(pkg, resource_table=ResourceTable(kept), res_files=res_files)


def _remove_code(
    pkg: Package,
    removable_classes: frozenset[str],
    removable_methods: frozenset[tuple[str, str, str]],
) -> Package:
    classes: dict[str, ClassDef] = {}
    for name, cls in pkg.classes.items():
        if name in removable_classes:
            continue
        kept = tuple(m for m in cls.methods if (name, m.name, m.descriptor) not in removable_methods)
        classes[name] = replace(cls, methods=kept) if len(kept) != len(cls.methods) else cls
    return replace(pkg, classes=classes)


def trim(
    pkg: Package,
    cfg: TrimConfig,
    *,
    paper_strict: bool = False,
    code_first: bool = False,
) -> tuple[Package, TrimReport]:
    """Run the full pipeline and return the trimmed package plus its report.

    Detection happens once, against the input package; the removal stages
    then run in sequence (assets, res, code by default).
    """
    validate_package(pkg)
    result = reach(pkg, cfg)
    asset_report = detect_asset_bloat(pkg, result, paper_strict=paper_strict)
    res_report = detect_res_bloat(pkg, result, paper_strict=paper_strict)
    code_report = detect_code_bloat(pkg, result)

    res_item_counts: dict[str, int] = {"drawable": 0, "layout": 0}
    for entry in res_report.unused_entries:
        res_item_counts[entry.rtype] += 1

    def stage_assets(p: Package) -> tuple[Package, dict[str, int]]:
        return _remove_assets(p, asset_report.unused_assets), {
            "assets": len(asset_report.unused_assets)
        }

    def stage_res(p: Package) -> tuple[Package, dict[str, int]]:
        return _remove_res_entries(p, res_report.unused_ids), dict(res_item_counts)

    def stage_code(p: Package) -> tuple[Package, dict[str, int]]:
        return _remove_code(p, code_report.removable_classes, code_report.removable_methods), {
            "classes": len(code_report.removable_classes),
            "methods": len(code_report.removable_methods),
        }

    if code_first:
        order = [("code", stage_code), ("assets", stage_assets), ("res", stage_res)]
    else:
        order = [("assets", stage_assets), ("res", stage_res), ("code", stage_code)]

    original = component_sizes(pkg)
    stages: dict[str, StageStats] = {}
    current = pkg
    sizes = original
    for name, fn in order:
        current, counts = fn(current)
        after = component_sizes(current)
        stages[name] = StageStats(items_removed=counts, bytes_removed=sizes.total - after.total)
        sizes = after

    try:
        validate_package(current)
    except InvalidPackage as err:
        raise InvalidPackage(f"trim produced an invalid package: {err}") from err
    report = TrimReport(stages=stages, original_sizes=original, trimmed_sizes=sizes)
    return current, report


# --------------------------------------------------------------------------- #
# verification


@dataclass(frozen=True)
class VerifyReport:
    unresolved_invokes: tuple[tuple[str, str, str, str], ...]  # (site, owner, name, descriptor)
    missing_classes: tuple[tuple[str, str], ...]  # (site, owner)
    dangling_resource_ids: tuple[tuple[str, str], ...]  # (site, id hex)
    broken_layout_refs: tuple[tuple[str, str], ...]  # (res path, reference)

    @property
    def ok(self) -> bool:
        return not (
            self.unresolved_invokes
            or self.missing_classes
            or self.dangling_resource_ids
            or self.broken_layout_refs
        )

    @property
    def finding_count(self) -> int:
        return (
            len(self.unresolved_invokes)
            + len(self.missing_classes)
            + len(self.dangling_resource_ids)
            + len(self.broken_layout_refs)
        )

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "unresolved_invokes": [
                {"site": s, "owner": o, "name": n, "descriptor": d}
                for s, o, n, d in self.unresolved_invokes
            ],
            "missing_classes": [{"site": s, "owner": o} for s, o in self.missing_classes],
            "dangling_resource_ids": [
                {"site": s, "id": i} for s, i in self.dangling_resource_ids
            ],
            "broken_layout_refs": [{"file": f, "ref": r} for f, r in self.broken_layout_refs],
        }


def verify_links(pkg: Package, cfg: TrimConfig) -> VerifyReport:
    """Statically check that every symbolic reference still lands somewhere:
    invokes resolve, instantiated/field-accessed classes exist or belong to a
    declared platform namespace, resource ids are in the table, and res XML
    references point at surviving entries and widget classes."""
    h = build_hierarchy(pkg, cfg)
    table_ids = set(pkg.resource_table.by_id)
    unresolved: list[tuple[str, str, str, str]] = []
    missing_cls: list[tuple[str, str]] = []
    dangling: list[tuple[str, str]] = []
    broken: list[tuple[str, str]] = []

    def owner_present(owner: str) -> bool:
        return owner in pkg.classes or cfg.is_platform(owner)

    for cname in sorted(pkg.classes):
        cls = pkg.classes[cname]
        index_class = is_resource_index_class(cname)
        for m in cls.methods:
            site = f"{cname}.{m.name} {m.descriptor}"
            for ins in m.body:
                if isinstance(ins, Invoke):
                    res = resolve_method(h, pkg, ins.owner, ins.name, ins.descriptor)
                    if isinstance(res, Missing):
                        unresolved.append((site, ins.owner, ins.name, ins.descriptor))
                elif isinstance(ins, NewInstance):
                    if not owner_present(ins.owner):
                        missing_cls.append((site, ins.owner))
                elif isinstance(ins, FieldAccess):
                    if not owner_present(ins.owner):
                        missing_cls.append((site, ins.owner))
                elif isinstance(ins, ConstResource):
                    if not index_class and ins.resource_id not in table_ids:
                        dangling.append((site, f"0x{ins.resource_id:08x}"))

    for path in sorted(pkg.res_files):
        if not is_res_xml(path):
            continue
        text = decode_res_text(pkg.res_files[path])
        for rtype, name in sorted(find_res_refs(text)):
            if (rtype, name) not in pkg.resource_table.by_type_name:
                broken.append((path, f"@{rtype}/{name}"))
        for widget in sorted(find_widget_classes(text)):
            if not owner_present(widget):
                broken.append((path, widget))

    return VerifyReport(
        unresolved_invokes=tuple(unresolved),
        missing_classes=tuple(missing_cls),
        dangling_resource_ids=tuple(dangling),
        broken_layout_refs=tuple(broken),
    )
