"""Measurement analytics: composition breakdown, library share, pairwise
package comparison, and corpus rows for downstream CDF tooling."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .archive import component_sizes, serialize_package
from .classfile import class_text_size
from .config import TrimConfig
from .errors import EmptyCode, EmptyPackage
from .model import ComponentSizes, Package

__all__ = [
    "IMAGE_EXTENSIONS",
    "CompositionReport",
    "PairReport",
    "PackageMetrics",
    "composition_report",
    "library_ratio",
    "compare",
]

IMAGE_EXTENSIONS = frozenset({"png", "jpg", "jpeg", "gif", "webp"})

#: percentage rows reported, in output order
COMPOSITION_KEYS = ("images", "layouts", "res_other", "assets", "native", "code", "config")


def is_image_path(path: str) -> bool:
    _, _, ext = path.rpartition(".")
    return ext.lower() in IMAGE_EXTENSIONS


def _percent(part: int, total: int) -> float:
    value = Decimal(part) * 100 / Decimal(total)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CompositionReport:
    sizes: ComponentSizes
    image_bytes: int
    layout_bytes: int
    res_other_bytes: int  # non-image, non-layout res files plus the resource table
    percentages: dict[str, float]  # keyed by COMPOSITION_KEYS, half-up to 2 decimals

    def to_dict(self) -> dict:
        return {
            "sizes": self.sizes.to_dict(),
            "image_bytes": self.image_bytes,
            "layout_bytes": self.layout_bytes,
            "res_other_bytes": self.res_other_bytes,
            "percentages": dict(self.percentages),
        }

    def tsv_rows(self) -> list[tuple[str, int, float]]:
        bytes_by_key = {
            "images": self.image_bytes,
            "layouts": self.layout_bytes,
            "res_other": self.res_other_bytes,
            "assets": self.sizes.assets_bytes,
            "native": self.sizes.native_bytes,
            "code": self.sizes.code_bytes,
            "config": self.sizes.config_bytes,
        }
        return [(k, bytes_by_key[k], self.percentages[k]) for k in COMPOSITION_KEYS]


def composition_from_sizes(
    sizes: ComponentSizes, image_bytes: int = 0, layout_bytes: int = 0
) -> CompositionReport:
    total = sizes.total
    if total == 0:
        raise EmptyPackage("package has zero total size")
    res_other = sizes.res_bytes - image_bytes - layout_bytes
    parts = {
        "images": image_bytes,
        "layouts": layout_bytes,
        "res_other": res_other,
        "assets": sizes.assets_bytes,
        "native": sizes.native_bytes,
        "code": sizes.code_bytes,
        "config": sizes.config_bytes,
    }
    percentages = {key: _percent(value, total) for key, value in parts.items()}
    return CompositionReport(sizes, image_bytes, layout_bytes, res_other, percentages)


def composition_report(pkg: Package) -> CompositionReport:
    """Byte counts and rounded percentage share per component. Res files are
    broken down into images (by extension), layouts (res/layout/), and the
    remainder including the resource table."""
    sizes = component_sizes(pkg)
    image_bytes = sum(len(b) for p, b in pkg.res_files.items() if is_image_path(p))
    layout_bytes = sum(
        len(b)
        for p, b in pkg.res_files.items()
        if p.startswith("res/layout/") and not is_image_path(p)
    )
    return composition_from_sizes(sizes, image_bytes, layout_bytes)


def library_ratio(pkg: Package, cfg: TrimConfig) -> float:
    """Share of procedure code bytes owned by library-prefixed classes."""
    total = 0
    library = 0
    for name, cls in pkg.classes.items():
        size = class_text_size(cls)
        total += size
        if cfg.is_library(name):
            library += size
    if total == 0:
        raise EmptyCode("package has no procedure code")
    return library / total


@dataclass(frozen=True)
class PackageMetrics:
    label: str
    total_bytes: int
    archive_bytes: int
    image_count: int
    image_bytes: int
    page_count: int
    composition: CompositionReport

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "total_bytes": self.total_bytes,
            "archive_bytes": self.archive_bytes,
            "image_count": self.image_count,
            "image_bytes": self.image_bytes,
            "page_count": self.page_count,
            "composition": self.composition.to_dict(),
        }


@dataclass(frozen=True)
class PairReport:
    left: PackageMetrics
    right: PackageMetrics
    size_ratio: float  # larger total over smaller, >= 1

    def to_dict(self) -> dict:
        return {
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "size_ratio": self.size_ratio,
        }

    def tsv_rows(self) -> list[tuple[str, object, object]]:
        lm, rm = self.left.to_dict(), self.right.to_dict()
        keys = ("total_bytes", "archive_bytes", "image_count", "image_bytes", "page_count")
        rows: list[tuple[str, object, object]] = [("label", lm["label"], rm["label"])]
        rows += [(k, lm[k], rm[k]) for k in keys]
        rows.append(("size_ratio", self.size_ratio, self.size_ratio))
        return rows


def package_metrics(pkg: Package, label: str) -> PackageMetrics:
    blobs = {**pkg.res_files, **pkg.asset_files}
    image_paths = [p for p in blobs if is_image_path(p)]
    image_bytes = sum(len(blobs[p]) for p in image_paths)
    return PackageMetrics(
        label=label,
        total_bytes=component_sizes(pkg).total,
        archive_bytes=len(serialize_package(pkg)),
        image_count=len(image_paths),
        image_bytes=image_bytes,
        page_count=len(pkg.manifest.activities),
        composition=composition_report(pkg),
    )


def compare(a: Package, b: Package, label_a: str = "a", label_b: str = "b") -> PairReport:
    left = package_metrics(a, label_a)
    right = package_metrics(b, label_b)
    small = min(left.total_bytes, right.total_bytes)
    large = max(left.total_bytes, right.total_bytes)
    ratio = large / small if small else (float("inf") if large else 1.0)
    return PairReport(left, right, ratio)


# --------------------------------------------------------------------------- #
# corpus mode

CORPUS_COLUMNS = (
    "package",
    "total_bytes",
    "archive_bytes",
    "res_bytes",
    "assets_bytes",
    "native_bytes",
    "code_bytes",
    "config_bytes",
    "image_bytes",
    "layout_bytes",
    "page_count",
    "library_ratio",
)


def corpus_row(pkg: Package, label: str, cfg: TrimConfig) -> dict[str, object]:
    comp = composition_report(pkg)
    sizes = comp.sizes
    return {
        "package": label,
        "total_bytes": sizes.total,
        "archive_bytes": len(serialize_package(pkg)),
        "res_bytes": sizes.res_bytes,
        "assets_bytes": sizes.assets_bytes,
        "native_bytes": sizes.native_bytes,
        "code_bytes": sizes.code_bytes,
        "config_bytes": sizes.config_bytes,
        "image_bytes": comp.image_bytes,
        "layout_bytes": comp.layout_bytes,
        "page_count": len(pkg.manifest.activities),
        "library_ratio": library_ratio(pkg, cfg) if sizes.code_bytes else 0.0,
    }
