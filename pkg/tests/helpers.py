"""Shared fixture builders for the test suite.

The demo pair (a full-size app and its compact counterpart) is padded to
exact byte targets so composition percentages and size ratios are stable
frozen values.
"""

from __future__ import annotations

import random

from taptrim.archive import serialize_manifest, serialize_resource_table
from taptrim.classfile import class_text_size
from taptrim.model import (
    ClassDef,
    ConstResource,
    ConstString,
    FieldAccess,
    Invoke,
    Manifest,
    MethodDef,
    NewInstance,
    Package,
    ResourceEntry,
    ResourceTable,
    validate_package,
)

# byte targets for the demo pair
DEMO_IMAGE_BYTES = 67_205
DEMO_LAYOUT_BYTES = 6_963
DEMO_CODE_BYTES = 1_394_606
DEMO_CONFIG_BYTES = 2_478
DEMO_TABLE_BYTES = 15_606
DEMO_IMAGE_COUNT = 7
DEMO_TOTAL_BYTES = (
    DEMO_IMAGE_BYTES + DEMO_LAYOUT_BYTES + DEMO_CODE_BYTES + DEMO_CONFIG_BYTES + DEMO_TABLE_BYTES
)

MINI_IMAGE_BYTES = 30_894
MINI_LAYOUT_BYTES = 43_848
MINI_CODE_BYTES = 8_581
MINI_CONFIG_BYTES = 481
MINI_IMAGE_COUNT = 3
MINI_TOTAL_BYTES = MINI_IMAGE_BYTES + MINI_LAYOUT_BYTES + MINI_CODE_BYTES + MINI_CONFIG_BYTES


def entry_activity_package() -> Package:
    """One activity whose onCreate calls sum; sub is never called."""
    main = ClassDef(
        name="com.example.MainActivity",
        superclass="android.app.Activity",
        methods=(
            MethodDef("<init>", "()V", body=(Invoke("android.app.Activity", "<init>", "()V"),)),
            MethodDef(
                "onCreate",
                "(Landroid/os/Bundle;)V",
                body=(
                    Invoke("android.app.Activity", "onCreate", "(Landroid/os/Bundle;)V"),
                    ConstResource(0x7F09001B),
                    Invoke("com.example.MainActivity", "setContentView", "(I)V"),
                    Invoke("com.example.MainActivity", "sum", "(II)I"),
                ),
            ),
            MethodDef("sum", "(II)I"),
            MethodDef("sub", "(II)I"),
        ),
    )
    layout = b"<LinearLayout>\n    <TextView/>\n</LinearLayout>\n"
    pkg = Package(
        manifest=Manifest(
            package_name="com.example",
            activities=("com.example.MainActivity",),
            main_activity="com.example.MainActivity",
        ),
        classes={main.name: main},
        resource_table=ResourceTable(
            (ResourceEntry(0x7F09001B, "layout", "activity_main", "res/layout/activity_main.xml"),)
        ),
        res_files={"res/layout/activity_main.xml": layout},
    )
    validate_package(pkg)
    return pkg


TRIMMED_ENTRY_ACTIVITY_TEXT = """\
.class com.example.MainActivity
.super android.app.Activity
.method <init> ()V
    invoke android.app.Activity.<init> ()V
.end method
.method onCreate (Landroid/os/Bundle;)V
    invoke android.app.Activity.onCreate (Landroid/os/Bundle;)V
    const-resource 0x7f09001b
    invoke com.example.MainActivity.setContentView (I)V
    invoke com.example.MainActivity.sum (II)I
.end method
.method sum (II)I
.end method
"""


def minimal_package(
    pkg_name: str = "com.min", main: str = "com.min.Main", **extra
) -> Package:
    cls = ClassDef(main, "android.app.Activity")
    pkg = Package(
        manifest=Manifest(package_name=pkg_name, activities=(main,), main_activity=main),
        classes={main: cls},
        **extra,
    )
    validate_package(pkg)
    return pkg


# --------------------------------------------------------------------------- #
# the demo pair


def _pad_manifest(pkg_name: str, main: str, target: int) -> Manifest:
    pads: list[str] = []

    def build() -> Manifest:
        return Manifest(
            package_name=pkg_name, activities=(main, *pads), main_activity=main
        )

    def size() -> int:
        return len(serialize_manifest(build()).encode("utf-8"))

    i = 0
    pad_line = len(f"activity: {pkg_name}.Pad000\n")
    while target - size() > pad_line + 8:
        pads.append(f"{pkg_name}.Pad{i:03d}")
        i += 1
    deficit = target - size()
    assert deficit >= 0, "manifest overshoot"
    if deficit:
        assert pads, "nothing to extend"
        pads[-1] += "x" * deficit
    manifest = build()
    assert size() == target
    return manifest


def _activity_stub(name: str) -> ClassDef:
    return ClassDef(name, "android.app.Activity")


def _padded_class(name: str, deficit_probe: str | None = None) -> ClassDef:
    filler = deficit_probe if deficit_probe is not None else ""
    return ClassDef(
        name,
        "java.lang.Object",
        methods=(MethodDef("fill", "()V", body=(ConstString(filler),)),),
    )


def _pad_code(classes: dict[str, ClassDef], pad_name: str, target: int) -> None:
    classes[pad_name] = _padded_class(pad_name)
    current = sum(class_text_size(c) for c in classes.values())
    deficit = target - current
    assert deficit >= 0, f"code overshoot by {-deficit}"
    classes[pad_name] = _padded_class(pad_name, "x" * deficit)
    assert sum(class_text_size(c) for c in classes.values()) == target


def _pad_table(entries: list[ResourceEntry], target: int, id_base: int) -> list[ResourceEntry]:
    def size() -> int:
        return len(serialize_resource_table(ResourceTable(tuple(entries))).encode("utf-8"))

    i = 0
    names: list[str] = []
    while target - size() > 30:
        name = f"s{i:04d}"
        names.append(name)
        entries.append(ResourceEntry(id_base + i, "string", name, None))
        i += 1
    deficit = target - size()
    assert deficit >= 0, "table overshoot"
    if deficit:
        last = entries.pop()
        entries.append(ResourceEntry(last.resource_id, "string", last.name + "x" * deficit, None))
    assert size() == target
    return entries


def demo_app_package() -> Package:
    """Full-size app: image-light, library-dominated code, exact byte totals."""
    pkg_name = "com.demo.notes"
    main = f"{pkg_name}.MainActivity"
    manifest = _pad_manifest(pkg_name, main, DEMO_CONFIG_BYTES)

    classes: dict[str, ClassDef] = {}
    for activity in manifest.activities[1:]:
        classes[activity] = _activity_stub(activity)
    classes[main] = ClassDef(
        main,
        "android.app.Activity",
        methods=(
            MethodDef("<init>", "()V", body=(Invoke("android.app.Activity", "<init>", "()V"),)),
            MethodDef(
                "onCreate",
                "(Landroid/os/Bundle;)V",
                body=(
                    Invoke("android.app.Activity", "onCreate", "(Landroid/os/Bundle;)V"),
                    ConstResource(0x7F090000),
                    Invoke("android.support.v7.app.Kit0", "boot", "()V"),
                ),
            ),
        ),
    )
    for i in range(4):
        name = f"android.support.v7.app.Kit{i}"
        classes[name] = ClassDef(
            name,
            "java.lang.Object",
            methods=(
                MethodDef("boot", "()V"),
                MethodDef(f"helper{i}", "(I)I", body=(FieldAccess("java.lang.System", "out"),)),
            ),
        )
    _pad_code(classes, "android.support.v7.internal.Blob", DEMO_CODE_BYTES)

    res_files: dict[str, bytes] = {}
    entries: list[ResourceEntry] = []
    per_image = DEMO_IMAGE_BYTES // DEMO_IMAGE_COUNT
    sizes = [per_image] * (DEMO_IMAGE_COUNT - 1)
    sizes.append(DEMO_IMAGE_BYTES - sum(sizes))
    refs = []
    for i, size in enumerate(sizes):
        path = f"res/drawable/img{i}.png"
        res_files[path] = b"\x89PNG\r\n\x1a\n" + b"\x00" * (size - 8)
        entries.append(ResourceEntry(0x7F010000 + i, "drawable", f"img{i}", path))
        refs.append(f'    <ImageView src="@drawable/img{i}"/>')
    prefix = "<LinearLayout>\n" + "\n".join(refs) + "\n"
    suffix = "</LinearLayout>\n"
    fill = DEMO_LAYOUT_BYTES - len(prefix.encode()) - len(suffix.encode())
    assert fill >= 0
    layout_text = prefix + "x" * fill + suffix
    res_files["res/layout/main.xml"] = layout_text.encode("utf-8")
    entries.append(ResourceEntry(0x7F090000, "layout", "main", "res/layout/main.xml"))
    entries = _pad_table(entries, DEMO_TABLE_BYTES, id_base=0x7F100000)

    pkg = Package(
        manifest=manifest,
        classes=classes,
        resource_table=ResourceTable(tuple(entries)),
        res_files=res_files,
    )
    validate_package(pkg)
    return pkg


def demo_mini_package() -> Package:
    """Compact counterpart: tiny code, layout-heavy, same notes domain."""
    pkg_name = "com.mini.notes"
    main = f"{pkg_name}.Main"
    manifest = _pad_manifest(pkg_name, main, MINI_CONFIG_BYTES)

    classes: dict[str, ClassDef] = {main: _activity_stub(main)}
    for activity in manifest.activities[1:]:
        classes[activity] = _activity_stub(activity)
    _pad_code(classes, f"{pkg_name}.Pages", MINI_CODE_BYTES)

    res_files: dict[str, bytes] = {}
    per_image = MINI_IMAGE_BYTES // MINI_IMAGE_COUNT
    sizes = [per_image] * (MINI_IMAGE_COUNT - 1)
    sizes.append(MINI_IMAGE_BYTES - sum(sizes))
    for i, size in enumerate(sizes):
        res_files[f"res/drawable/icon{i}.png"] = b"\x89PNG\r\n\x1a\n" + b"\x00" * (size - 8)
    half = MINI_LAYOUT_BYTES // 2
    for i, size in enumerate((half, MINI_LAYOUT_BYTES - half)):
        body = "<page>\n" + "x" * (size - len("<page>\n</page>\n")) + "</page>\n"
        res_files[f"res/layout/page{i}.xml"] = body.encode("utf-8")

    pkg = Package(manifest=manifest, classes=classes, res_files=res_files)
    validate_package(pkg)
    return pkg


# --------------------------------------------------------------------------- #
# unconstrained random packages for oracle cross-checks

_DESCRIPTORS = ("()V", "(I)V", "(II)I", "(Ljava/lang/String;)V", "()Z")
_EXTERNAL_SUPERS = (
    "java.lang.Object",
    "android.app.Activity",
    "android.view.View",
    "java.lang.Enum",
    "com.thirdparty.Widget",
)


def random_messy_package(rng: random.Random, max_classes: int = 30) -> Package:
    """Arbitrary shapes: random hierarchy, overrides, dangling references.

    Only reachability semantics matter for these; they are not safe for
    idempotence or ledger tests.
    """
    n = rng.randint(2, max_classes)
    names = [f"com.m.C{i}" for i in range(n)]
    method_pool = [(f"m{i}", rng.choice(_DESCRIPTORS)) for i in range(6)]
    method_pool += [("onPing", "()V"), ("<init>", "()V"), ("<clinit>", "()V")]

    classes: dict[str, ClassDef] = {}
    for i, name in enumerate(names):
        # superclass from earlier classes or an external name: acyclic by construction
        if i > 0 and rng.random() < 0.6:
            superclass = names[rng.randrange(i)]
        else:
            superclass = rng.choice(_EXTERNAL_SUPERS)
        interfaces = tuple(
            names[rng.randrange(i)] for _ in range(rng.randint(0, 2)) if i > 0 and rng.random() < 0.3
        )
        methods: list[MethodDef] = []
        seen: set[tuple[str, str]] = set()
        for _ in range(rng.randint(0, 8)):
            mname, mdesc = rng.choice(method_pool)
            if (mname, mdesc) in seen:
                continue
            seen.add((mname, mdesc))
            native = rng.random() < 0.08
            body: list = []
            if not native:
                for _ in range(rng.randint(0, 4)):
                    roll = rng.random()
                    if roll < 0.45:
                        owner = rng.choice(names + ["android.app.Activity", "com.gone.Ghost"])
                        tname, tdesc = rng.choice(method_pool)
                        body.append(Invoke(owner, tname, tdesc))
                    elif roll < 0.6:
                        body.append(NewInstance(rng.choice(names)))
                    elif roll < 0.7:
                        body.append(FieldAccess(rng.choice(names), "f"))
                    elif roll < 0.85:
                        body.append(ConstString(rng.choice(("data/", "a.bin", "note 1"))))
                    else:
                        body.append(ConstResource(rng.choice((0x7F010000, 0x7F010001))))
            methods.append(MethodDef(mname, mdesc, native, tuple(body)))
        classes[name] = ClassDef(name, superclass, interfaces, (), tuple(methods))

    res_files = {}
    if rng.random() < 0.4:
        widget = rng.choice(names)
        res_files["res/layout/l.xml"] = f"<LinearLayout>\n    <{widget}/>\n</LinearLayout>\n".encode()

    pkg = Package(
        manifest=Manifest(
            package_name="com.m", activities=(names[0],), main_activity=names[0]
        ),
        classes=classes,
        res_files=res_files,
    )
    validate_package(pkg)
    return pkg
