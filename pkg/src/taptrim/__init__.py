"""taptrim: whole-package bloat analysis and trimming for TAP archives."""

from .analyzer import (
    CompositionReport,
    PairReport,
    compare,
    composition_report,
    library_ratio,
)
from .archive import component_sizes, parse_package, serialize_package
from .bloat import (
    AssetBloatReport,
    CodeBloatReport,
    ResBloatReport,
    detect_asset_bloat,
    detect_code_bloat,
    detect_res_bloat,
)
from .classfile import parse_class_text, serialize_class_text
from .config import TrimConfig, load_trim_config, parse_trim_config
from .model import (
    ClassDef,
    ComponentSizes,
    ConstResource,
    ConstString,
    FieldAccess,
    Instruction,
    Invoke,
    Manifest,
    MethodDef,
    NewInstance,
    Package,
    ResourceEntry,
    ResourceTable,
    validate_package,
)
from .refgraph import (
    ClassHierarchy,
    ReachabilityResult,
    build_hierarchy,
    collect_seeds,
    reach,
    resolve_method,
)
from .trimmer import TrimReport, VerifyReport, trim, verify_links

__version__ = "0.1.0"

__all__ = [
    "AssetBloatReport",
    "ClassDef",
    "ClassHierarchy",
    "CodeBloatReport",
    "ComponentSizes",
    "CompositionReport",
    "ConstResource",
    "ConstString",
    "FieldAccess",
    "Instruction",
    "Invoke",
    "Manifest",
    "MethodDef",
    "NewInstance",
    "Package",
    "PairReport",
    "ReachabilityResult",
    "ResBloatReport",
    "ResourceEntry",
    "ResourceTable",
    "TrimConfig",
    "TrimReport",
    "VerifyReport",
    "build_hierarchy",
    "collect_seeds",
    "compare",
    "component_sizes",
    "composition_report",
    "detect_asset_bloat",
    "detect_code_bloat",
    "detect_res_bloat",
    "library_ratio",
    "load_trim_config",
    "parse_class_text",
    "parse_package",
    "parse_trim_config",
    "reach",
    "resolve_method",
    "serialize_class_text",
    "serialize_package",
    "trim",
    "validate_package",
    "verify_links",
]
