"""Deterministic synthetic package generator with a planted-bloat ledger.

Each generated package mixes live and dead classes, methods, resources and
assets. Liveness is decided during construction and recorded in the ledger,
which acceptance tests use as ground truth for the trimming pipeline. The
ledger assumes the default TrimConfig.

Construction discipline (so the ledger stays exact):
  - live method bodies only reference live targets, by their defining class;
  - resource ids and asset paths appear only in live bodies (or in
    resource-index classes, which the usage scan ignores);
  - dead layouts never name internal widget classes;
  - strings in dead bodies contain spaces, so they can never match an asset
    path or directory prefix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .archive import resource_row_size, serialize_package
from .classfile import class_text_size, method_block_size
from .model import (
    CONSTRUCTOR,
    ClassDef,
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
    STATIC_INIT,
    validate_package,
)

__all__ = ["LedgerRow", "GeneratedPackage", "generate_package", "generate_corpus", "write_corpus"]

LEDGER_FILE = "ledger.tsv"
META_FILE = "meta.tsv"

_DESCRIPTORS = ("()V", "(I)V", "(II)I", "(Ljava/lang/String;)V", "()Ljava/lang/String;", "()Z")
_EXTERNAL_CALLS = (
    ("android.util.Log", "d", "(Ljava/lang/String;Ljava/lang/String;)I"),
    ("java.lang.String", "valueOf", "(I)Ljava/lang/String;"),
    ("java.util.Objects", "requireNonNull", "(Ljava/lang/Object;)Ljava/lang/Object;"),
)


@dataclass(frozen=True)
class LedgerRow:
    package: str
    kind: str  # class | method | res | asset | native
    identifier: str
    live: bool
    bytes: int

    def to_tsv(self) -> str:
        status = "live" if self.live else "dead"
        return f"{self.package}\t{self.kind}\t{self.identifier}\t{status}\t{self.bytes}\n"

    @staticmethod
    def from_tsv(line: str) -> "LedgerRow":
        package, kind, identifier, status, size = line.rstrip("\n").split("\t")
        return LedgerRow(package, kind, identifier, status == "live", int(size))


@dataclass(frozen=True)
class GeneratedPackage:
    file_name: str
    package: Package
    ledger: tuple[LedgerRow, ...]
    library_ratio_target: float


# --------------------------------------------------------------------------- #
# mutable drafts used during construction


@dataclass
class _MethodDraft:
    name: str
    descriptor: str
    is_native: bool = False
    body: list[Instruction] = field(default_factory=list)


@dataclass
class _ClassDraft:
    name: str
    superclass: str | None
    interfaces: tuple[str, ...] = ()
    fields: tuple[tuple[str, str], ...] = ()
    methods: list[_MethodDraft] = field(default_factory=list)

    def add(self, name: str, descriptor: str, native: bool = False) -> _MethodDraft:
        m = _MethodDraft(name, descriptor, native)
        self.methods.append(m)
        return m

    def freeze(self) -> ClassDef:
        return ClassDef(
            self.name,
            self.superclass,
            self.interfaces,
            self.fields,
            tuple(MethodDef(m.name, m.descriptor, m.is_native, tuple(m.body)) for m in self.methods),
        )


class _Liveness:
    """Tracks the keep set as construction wires references, mirroring the
    keep rules for exactly the shapes this generator plants."""

    def __init__(self, classes: dict[str, _ClassDraft]):
        self.classes = classes
        self.live_methods: set[tuple[str, str, str]] = set()
        self.kept_classes: set[str] = set()
        self.dispatchable: set[str] = set()

    def keep_class(self, name: str) -> None:
        if name in self.kept_classes:
            return
        self.kept_classes.add(name)
        for m in self.classes[name].methods:
            if m.is_native or m.name == STATIC_INIT:
                self.keep_method(name, m.name, m.descriptor)

    def keep_method(self, owner: str, name: str, descriptor: str) -> None:
        key = (owner, name, descriptor)
        if key in self.live_methods:
            return
        self.live_methods.add(key)
        self.keep_class(owner)

    def instantiate(self, name: str) -> None:
        self.keep_class(name)
        self.dispatchable.add(name)
        for m in self.classes[name].methods:
            if m.name == CONSTRUCTOR:
                self.keep_method(name, m.name, m.descriptor)

    def seed(self, name: str, callback_prefix: str = "on") -> None:
        self.keep_class(name)
        self.dispatchable.add(name)
        for m in self.classes[name].methods:
            if (
                m.name in (CONSTRUCTOR, STATIC_INIT)
                or m.is_native
                or m.name.startswith(callback_prefix)
            ):
                self.keep_method(name, m.name, m.descriptor)


# --------------------------------------------------------------------------- #
# the builder


class _Builder:
    def __init__(self, rng: random.Random, index: int, library_ratio: float | None):
        self.rng = rng
        self.pkg_name = f"com.app{index:03d}"
        self.classes: dict[str, _ClassDraft] = {}
        self.live = _Liveness(self.classes)
        self.live_bodies: list[tuple[str, _MethodDraft]] = []  # carriers for new references
        self.library_classes: set[str] = set()
        self.target_ratio = library_ratio if library_ratio is not None else (
            0.45 + 0.45 * rng.random()
        )
        self.res_entries: list[ResourceEntry] = []
        self.res_files: dict[str, bytes] = {}
        self.live_res_ids: set[int] = set()
        self.asset_files: dict[str, bytes] = {}
        self.live_assets: set[str] = set()
        self.native_files: dict[str, bytes] = {}
        self.manifest: Manifest | None = None

    # -- helpers -------------------------------------------------------------

    def new_class(self, name: str, superclass: str | None, library: bool = False) -> _ClassDraft:
        draft = _ClassDraft(name, superclass)
        self.classes[name] = draft
        if library:
            self.library_classes.add(name)
        return draft

    def register_live(self, owner: str, method: _MethodDraft) -> None:
        self.live.keep_method(owner, method.name, method.descriptor)
        self.live_bodies.append((owner, method))

    def live_carrier(self) -> tuple[str, _MethodDraft]:
        return self.rng.choice(self.live_bodies)

    def wire_live_call(self, owner: str, method: _MethodDraft) -> None:
        """Make (owner, method) reachable by invoking it from a live body."""
        _, carrier = self.live_carrier()
        carrier.body.append(Invoke(owner, method.name, method.descriptor))
        self.register_live(owner, method)

    def dead_body(self) -> list[Instruction]:
        body: list[Instruction] = []
        for _ in range(self.rng.randint(1, 3)):
            roll = self.rng.random()
            if roll < 0.4:
                body.append(ConstString(f"note {self.rng.randint(0, 999)} unused"))
            elif roll < 0.7:
                body.append(Invoke(*self.rng.choice(_EXTERNAL_CALLS)))
            else:
                body.append(FieldAccess("java.lang.System", "out"))
        return body

    # -- construction stages ---------------------------------------------------

    def build_code(self) -> None:
        pkg = self.pkg_name
        rng = self.rng

        main = self.new_class(f"{pkg}.MainActivity", "android.app.Activity")
        main.add(CONSTRUCTOR, "()V").body.append(
            Invoke("android.app.Activity", CONSTRUCTOR, "()V")
        )
        on_create = main.add("onCreate", "(Landroid/os/Bundle;)V")
        on_create.body.append(Invoke("android.app.Activity", "onCreate", "(Landroid/os/Bundle;)V"))
        if rng.random() < 0.5:
            main.add("onStart", "()V")
        # dead helpers on the entry class itself
        for i in range(rng.randint(1, 2)):
            stale = main.add(f"calc{i}", rng.choice(_DESCRIPTORS))
            stale.body.extend(self.dead_body())

        activities = [main.name]
        application = None
        services: list[str] = []
        if rng.random() < 0.3:
            app = self.new_class(f"{pkg}.App", "android.app.Application")
            app.add(CONSTRUCTOR, "()V")
            app.add("onCreate", "()V")
            application = app.name
        if rng.random() < 0.4:
            extra = self.new_class(f"{pkg}.SettingsActivity", "android.app.Activity")
            extra.add(CONSTRUCTOR, "()V")
            extra.add("onCreate", "(Landroid/os/Bundle;)V")
            extra.add(f"helper{rng.randint(0, 9)}", "()V").body.extend(self.dead_body())
            activities.append(extra.name)
        if rng.random() < 0.3:
            svc = self.new_class(f"{pkg}.SyncService", "android.app.Service")
            svc.add(CONSTRUCTOR, "()V")
            svc.add("onStartCommand", "(I)V")
            services.append(svc.name)

        self.manifest = Manifest(
            package_name=pkg,
            application_class=application,
            activities=tuple(activities),
            main_activity=main.name,
            services=tuple(services),
        )

        # seed processing mirrors the entry rules; everything wired later
        # hangs off these bodies
        for seed_name in (application, *activities, *services):
            if seed_name:
                self.live.seed(seed_name)
        for seed_name in (application, *activities, *services):
            if not seed_name:
                continue
            draft = self.classes[seed_name]
            for m in draft.methods:
                if (seed_name, m.name, m.descriptor) in self.live.live_methods:
                    self.live_bodies.append((seed_name, m))

        # live helper chain
        for i in range(rng.randint(1, 3)):
            helper = self.new_class(f"{pkg}.util.Helper{i}", "java.lang.Object")
            method = helper.add(f"run{i}", rng.choice(_DESCRIPTORS))
            self.wire_live_call(helper.name, method)
            if rng.random() < 0.5:
                extra = helper.add(f"more{i}", rng.choice(_DESCRIPTORS))
                self.wire_live_call(helper.name, extra)
            if rng.random() < 0.4:
                dead = helper.add(f"stale{i}", rng.choice(_DESCRIPTORS))
                dead.body.extend(self.dead_body())

        # a class kept only through instantiation
        if rng.random() < 0.7:
            model = self.new_class(f"{pkg}.data.Model", "java.lang.Object")
            model.add(CONSTRUCTOR, "()V")
            model.add("unusedDump", "()Ljava/lang/String;").body.extend(self.dead_body())
            _, carrier = self.live_carrier()
            carrier.body.append(NewInstance(model.name))
            carrier.body.append(Invoke(model.name, CONSTRUCTOR, "()V"))
            self.live.instantiate(model.name)
            self.live.keep_method(model.name, CONSTRUCTOR, "()V")

        # a class kept only through a static field access
        if rng.random() < 0.5:
            holder = self.new_class(f"{pkg}.data.Holder", "java.lang.Object")
            holder.fields = (("cache", "Ljava/lang/String;"),)
            if rng.random() < 0.5:
                holder.add(STATIC_INIT, "()V")
            holder.add("wipe", "()V").body.extend(self.dead_body())
            _, carrier = self.live_carrier()
            carrier.body.append(FieldAccess(holder.name, "cache"))
            self.live.keep_class(holder.name)
            for m in self.classes[holder.name].methods:
                if (holder.name, m.name, m.descriptor) in self.live.live_methods:
                    self.live_bodies.append((holder.name, m))

        # virtual dispatch: overrides live only where instantiated
        if rng.random() < 0.7:
            base = self.new_class(f"{pkg}.task.Base", "java.lang.Object")
            base_work = base.add("work", "()V")
            self.wire_live_call(base.name, base_work)

            sub_live = self.new_class(f"{pkg}.task.Fast", base.name)
            sub_live.add(CONSTRUCTOR, "()V")
            live_override = sub_live.add("work", "()V")
            _, carrier = self.live_carrier()
            carrier.body.append(NewInstance(sub_live.name))
            carrier.body.append(Invoke(sub_live.name, CONSTRUCTOR, "()V"))
            self.live.instantiate(sub_live.name)
            # dispatchable subclass of a live method: the override is live
            self.register_live(sub_live.name, live_override)

            # kept statically but never instantiated: its override stays dead
            sub_static = self.new_class(f"{pkg}.task.Slow", base.name)
            sub_static.add("work", "()V").body.extend(self.dead_body())
            util = sub_static.add("poke", "()V")
            self.wire_live_call(sub_static.name, util)

            # untouched subclass: removed wholesale
            sub_dead = self.new_class(f"{pkg}.task.Idle", base.name)
            sub_dead.add("work", "()V").body.extend(self.dead_body())

        # interface dispatch through an instantiated implementor
        if rng.random() < 0.6:
            iface = self.new_class(f"{pkg}.io.Sink", "java.lang.Object")
            sink_cb = iface.add("accept", "(Ljava/lang/String;)V")
            self.wire_live_call(iface.name, sink_cb)
            impl = self.new_class(f"{pkg}.io.FileSink", "java.lang.Object")
            impl.interfaces = (iface.name,)
            impl.add(CONSTRUCTOR, "()V")
            impl_cb = impl.add("accept", "(Ljava/lang/String;)V")
            _, carrier = self.live_carrier()
            carrier.body.append(NewInstance(impl.name))
            carrier.body.append(Invoke(impl.name, CONSTRUCTOR, "()V"))
            self.live.instantiate(impl.name)
            self.register_live(impl.name, impl_cb)

        # an enum is an entry class; unused members still die
        if rng.random() < 0.5:
            enum = self.new_class(f"{pkg}.Kind", "java.lang.Enum")
            enum.add(CONSTRUCTOR, "(Ljava/lang/String;I)V")
            clinit = enum.add(STATIC_INIT, "()V")
            clinit.body.append(NewInstance(enum.name))
            clinit.body.append(Invoke(enum.name, CONSTRUCTOR, "(Ljava/lang/String;I)V"))
            values = enum.add("values", "()[Ljava/lang/Object;")
            self.live.seed(enum.name)
            self.live.instantiate(enum.name)
            self.live_bodies.append((enum.name, clinit))
            if rng.random() < 0.5:
                self.wire_live_call(enum.name, values)

        # a native-bearing class: natives ride along with the class
        if rng.random() < 0.4:
            jni = self.new_class(f"{pkg}.jni.Codec", "java.lang.Object")
            jni.add("encode", "(I)I", native=True)
            entry = jni.add("wrap", "(I)I")
            entry.body.append(Invoke(jni.name, "encode", "(I)I"))
            self.wire_live_call(jni.name, entry)
            blob = bytes([0x7F, 0x45, 0x4C, 0x46]) + rng.randbytes(rng.randint(100, 900))
            self.native_files[f"lib/armeabi-v7a/libcodec{rng.randint(0, 9)}.so"] = blob

        # dead class chains: they reference each other, never the live world
        for i in range(rng.randint(1, 4)):
            dead = self.new_class(f"{pkg}.legacy.Old{i}", "java.lang.Object")
            for j in range(rng.randint(1, 3)):
                m = dead.add(f"step{j}", "()V" if j == 0 else rng.choice(_DESCRIPTORS))
                m.body.extend(self.dead_body())
                if i > 0 and rng.random() < 0.5:
                    m.body.append(Invoke(f"{pkg}.legacy.Old{i - 1}", "step0", "()V"))

        # library classes, mostly dead; one sometimes live
        lib_roots = ("android.support.v4.util", "com.google.common.base", "okhttp3.internal")
        for i in range(rng.randint(2, 4)):
            root = rng.choice(lib_roots)
            lib = self.new_class(f"{root}.Lib{i}", "java.lang.Object", library=True)
            for j in range(rng.randint(1, 3)):
                m = lib.add(f"op{j}", rng.choice(_DESCRIPTORS))
                m.body.extend(self.dead_body())
            if i == 0 and rng.random() < 0.6:
                entry = lib.add("shared", "()V")
                self.wire_live_call(lib.name, entry)

    def build_resources(self) -> None:
        rng = self.rng
        pkg = self.pkg_name

        drawables: list[ResourceEntry] = []
        for i in range(rng.randint(2, 6)):
            path = f"res/drawable/d{i}.png"
            entry = ResourceEntry(0x7F010000 + i, "drawable", f"d{i}", path)
            self.res_files[path] = b"\x89PNG\r\n\x1a\n" + rng.randbytes(rng.randint(40, 800))
            drawables.append(entry)
            self.res_entries.append(entry)

        widget_name: str | None = None
        if rng.random() < 0.5:
            widget = self.new_class(f"{pkg}.ui.Badge", "android.view.View")
            widget.add(CONSTRUCTOR, "()V")
            widget.add("onDraw", "()V")
            widget.add(f"tint{rng.randint(0, 9)}", "()V").body.extend(self.dead_body())
            widget_name = widget.name
            self.live.seed(widget_name)

        # live layouts pull a subset of drawables in through @refs
        layout_live = drawables[: rng.randint(1, max(1, len(drawables) - 1))]
        n_layouts = rng.randint(1, 3)
        for i in range(n_layouts):
            path = f"res/layout/l{i}.xml"
            entry = ResourceEntry(0x7F090000 + i, "layout", f"l{i}", path)
            self.res_entries.append(entry)
            live_layout = i == 0 or rng.random() < 0.5
            refs = layout_live if live_layout else drawables[len(layout_live):]
            lines = ["<LinearLayout>"]
            for d in refs:
                lines.append(f'    <ImageView src="@drawable/{d.name}"/>')
            if live_layout and widget_name and i == 0:
                lines.append(f"    <{widget_name}/>")
            lines.append("</LinearLayout>\n")
            self.res_files[path] = "\n".join(lines).encode("utf-8")
            if live_layout:
                _, carrier = self.live_carrier()
                carrier.body.append(ConstResource(entry.resource_id))
                self.live_res_ids.add(entry.resource_id)
                self.live_res_ids.update(d.resource_id for d in layout_live)

        # some drawables referenced straight from code
        direct = [d for d in drawables if rng.random() < 0.4]
        for d in direct:
            _, carrier = self.live_carrier()
            carrier.body.append(ConstResource(d.resource_id))
            self.live_res_ids.add(d.resource_id)

        # value resources are never trimmable
        for i in range(rng.randint(1, 4)):
            entry = ResourceEntry(0x7F100000 + i, "string", f"s{i}", None)
            self.res_entries.append(entry)
            if rng.random() < 0.3:
                _, carrier = self.live_carrier()
                carrier.body.append(ConstResource(entry.resource_id))
                self.live_res_ids.add(entry.resource_id)
        if rng.random() < 0.5:
            self.res_entries.append(ResourceEntry(0x7F110000, "color", "accent", None))

        # resource-index classes enumerate everything but protect nothing
        r_drawable = self.new_class(f"{pkg}.R$drawable", "java.lang.Object")
        clinit = r_drawable.add(STATIC_INIT, "()V")
        clinit.body.extend(ConstResource(d.resource_id) for d in drawables)
        r_layout = self.new_class(f"{pkg}.R$layout", "java.lang.Object")
        clinit = r_layout.add(STATIC_INIT, "()V")
        clinit.body.extend(
            ConstResource(e.resource_id) for e in self.res_entries if e.rtype == "layout"
        )

    def build_assets(self) -> None:
        rng = self.rng
        # exact-path references, relative or assets/-prefixed at random
        for i in range(rng.randint(0, 3)):
            rel = f"cfg/app{i}.json"
            self.asset_files[f"assets/{rel}"] = rng.randbytes(rng.randint(20, 300))
            _, carrier = self.live_carrier()
            ref = rel if rng.random() < 0.5 else f"assets/{rel}"
            carrier.body.append(ConstString(ref))
            self.live_assets.add(f"assets/{rel}")
        # a directory loaded by prefix keeps everything under it
        if rng.random() < 0.6:
            d = rng.randint(0, 9)
            for j in range(rng.randint(1, 3)):
                path = f"assets/data{d}/f{j}.bin"
                self.asset_files[path] = rng.randbytes(rng.randint(30, 400))
                self.live_assets.add(path)
            _, carrier = self.live_carrier()
            carrier.body.append(ConstString(f"data{d}/"))
        # dead assets live in directories nothing mentions
        for i in range(rng.randint(0, 4)):
            self.asset_files[f"assets/old{i}/junk.bin"] = rng.randbytes(rng.randint(30, 500))

    def pad_library_ratio(self) -> None:
        """Add one padding class per side so library bytes hit the target share."""
        lib_bytes = sum(
            class_text_size(d.freeze()) for n, d in self.classes.items() if n in self.library_classes
        )
        app_bytes = sum(
            class_text_size(d.freeze())
            for n, d in self.classes.items()
            if n not in self.library_classes
        )
        t = self.target_ratio

        def pad_class(name: str, library: bool) -> _ClassDraft:
            draft = self.new_class(name, "java.lang.Object", library=library)
            draft.add("blob", "()V").body.append(ConstString(""))
            return draft

        lib_pad = pad_class("com.google.common.cache.Pad0", library=True)
        app_pad = pad_class(f"{self.pkg_name}.misc.Pad0", library=False)
        lib_base = class_text_size(lib_pad.freeze())
        app_base = class_text_size(app_pad.freeze())
        total_base = lib_bytes + app_bytes + lib_base + app_base

        # solve (lib + lib_base + x) == t * (total_base + x + y) with x or y zero
        x = (t * total_base - lib_bytes - lib_base) / (1 - t) if t < 1 else 0.0
        if x >= 0:
            extra_lib, extra_app = int(round(x)), 0
        else:
            y = (lib_bytes + lib_base) / t - total_base if t > 0 else 0.0
            extra_lib, extra_app = 0, max(0, int(round(y)))
        lib_pad.methods[0].body[0] = ConstString("x" * extra_lib)
        app_pad.methods[0].body[0] = ConstString("x" * extra_app)

    # -- output ----------------------------------------------------------------

    def finish(self, file_name: str) -> GeneratedPackage:
        classes = {name: draft.freeze() for name, draft in self.classes.items()}
        table = ResourceTable(tuple(sorted(self.res_entries, key=lambda e: e.resource_id)))
        assert self.manifest is not None
        pkg = Package(
            manifest=self.manifest,
            classes=classes,
            resource_table=table,
            res_files=self.res_files,
            asset_files=self.asset_files,
            native_files=self.native_files,
        )
        validate_package(pkg)

        rows: list[LedgerRow] = []
        for name in sorted(classes):
            cls = classes[name]
            class_live = name in self.live.kept_classes
            rows.append(LedgerRow(file_name, "class", name, class_live, class_text_size(cls)))
            if class_live:
                for m in cls.methods:
                    live = (name, m.name, m.descriptor) in self.live.live_methods
                    rows.append(
                        LedgerRow(
                            file_name,
                            "method",
                            f"{name}.{m.name} {m.descriptor}",
                            live,
                            method_block_size(m),
                        )
                    )
        for entry in table.entries:
            if entry.rtype in ("drawable", "layout"):
                live = entry.resource_id in self.live_res_ids
                size = len(self.res_files[entry.path]) + resource_row_size(entry)
            else:
                live = True  # value resources are not trimmable
                size = resource_row_size(entry)
            rows.append(LedgerRow(file_name, "res", entry.id_hex, live, size))
        for path in sorted(self.asset_files):
            rows.append(
                LedgerRow(
                    file_name, "asset", path, path in self.live_assets, len(self.asset_files[path])
                )
            )
        for path in sorted(self.native_files):
            rows.append(LedgerRow(file_name, "native", path, True, len(self.native_files[path])))
        return GeneratedPackage(file_name, pkg, tuple(rows), self.target_ratio)


def generate_package(seed: int, index: int, library_ratio: float | None = None) -> GeneratedPackage:
    rng = random.Random(f"taptrim-gen/{seed}/{index}")
    builder = _Builder(rng, index, library_ratio)
    builder.build_code()
    builder.build_resources()
    builder.build_assets()
    builder.pad_library_ratio()
    return builder.finish(f"pkg_{index:03d}.tap")


def generate_corpus(
    seed: int, count: int, library_ratio: float | None = None
) -> list[GeneratedPackage]:
    return [generate_package(seed, i, library_ratio) for i in range(count)]


def write_corpus(directory: str | Path, corpus: list[GeneratedPackage]) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    ledger_lines: list[str] = []
    meta_lines: list[str] = []
    for item in corpus:
        (out / item.file_name).write_bytes(serialize_package(item.package))
        ledger_lines.extend(row.to_tsv() for row in item.ledger)
        meta_lines.append(f"{item.file_name}\tlibrary_ratio_target\t{item.library_ratio_target!r}\n")
    (out / LEDGER_FILE).write_text("".join(ledger_lines), encoding="utf-8")
    (out / META_FILE).write_text("".join(meta_lines), encoding="utf-8")


def read_ledger(path: str | Path) -> list[LedgerRow]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [LedgerRow.from_tsv(line) for line in lines if line.strip()]
