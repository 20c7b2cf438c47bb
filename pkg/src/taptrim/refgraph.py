"""Class hierarchy, method resolution, and reachability analysis.

Reachability is a worklist fixpoint seeded from the manifest entry points
and framework-subclass keep rules. Dispatch is RTA-flavored: an override
only becomes reachable in classes that are instantiated somewhere in live
code or are entry-point classes themselves.
"""

from __future__ import annotations

import fnmatch
import hashlib
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .config import TrimConfig
from .errors import CyclicHierarchy, MissingSeed
from .layouts import decode_res_text, find_widget_classes, is_layout_path
from .model import (
    CONSTRUCTOR,
    ConstResource,
    ConstString,
    FieldAccess,
    Invoke,
    NewInstance,
    Package,
    STATIC_INIT,
    is_resource_index_class,
)

__all__ = [
    "ClassHierarchy",
    "Internal",
    "External",
    "Missing",
    "Resolution",
    "ReachabilityResult",
    "build_hierarchy",
    "resolve_method",
    "collect_seeds",
    "reach",
    "package_digest",
]


def package_digest(pkg: Package) -> str:
    from .archive import serialize_package  # local import to avoid a cycle

    return hashlib.sha256(serialize_package(pkg)).hexdigest()


# --------------------------------------------------------------------------- #
# hierarchy


@dataclass(frozen=True)
class ClassHierarchy:
    parent: dict[str, str | None]  # internal class -> superclass (or None)
    children: dict[str, set[str]]  # superclass -> internal subclasses
    interfaces: dict[str, tuple[str, ...]]  # internal class -> declared interfaces
    implementors: dict[str, set[str]]  # interface -> internal classes naming it
    internal: frozenset[str]

    def is_internal(self, fqn: str) -> bool:
        return fqn in self.internal

    def parents_of(self, fqn: str) -> tuple[str, ...]:
        """Superclass first, then interfaces in declaration order."""
        sup = self.parent.get(fqn)
        ifaces = self.interfaces.get(fqn, ())
        return (sup, *ifaces) if sup else ifaces

    def ancestors_of(self, fqn: str) -> set[str]:
        """All transitive supertypes (internal and external names)."""
        seen: set[str] = set()
        queue = deque(self.parents_of(fqn))
        while queue:
            cur = queue.popleft()
            if cur in seen:
                continue
            seen.add(cur)
            if cur in self.internal:
                queue.extend(self.parents_of(cur))
        return seen

    def internal_descendants(self, fqn: str) -> set[str]:
        """Internal classes that have fqn as a transitive supertype."""
        seen: set[str] = set()
        queue = deque(self.children.get(fqn, set()) | self.implementors.get(fqn, set()))
        while queue:
            cur = queue.popleft()
            if cur in seen:
                continue
            seen.add(cur)
            queue.extend(self.children.get(cur, ()))
            queue.extend(self.implementors.get(cur, ()))
        return seen


def build_hierarchy(pkg: Package, cfg: TrimConfig | None = None) -> ClassHierarchy:
    """Build parent/children maps; raises CyclicHierarchy on internal cycles."""
    internal = frozenset(pkg.classes)
    parent: dict[str, str | None] = {}
    children: dict[str, set[str]] = {}
    interfaces: dict[str, tuple[str, ...]] = {}
    implementors: dict[str, set[str]] = {}
    for name, cls in pkg.classes.items():
        parent[name] = cls.superclass
        interfaces[name] = cls.interfaces
        if cls.superclass:
            children.setdefault(cls.superclass, set()).add(name)
        for iface in cls.interfaces:
            implementors.setdefault(iface, set()).add(name)

    def internal_parents(name: str) -> list[str]:
        sup = parent.get(name)
        return [p for p in (sup, *interfaces.get(name, ())) if p in internal]

    # cycle check over superclass + interface edges restricted to internal classes
    color: dict[str, int] = {}  # 1 = on stack, 2 = done
    for start in sorted(internal):
        if color.get(start):
            continue
        path = [start]
        stack = [(start, iter(internal_parents(start)))]
        color[start] = 1
        while stack:
            node, parents_iter = stack[-1]
            for nxt in parents_iter:
                if color.get(nxt) == 1:
                    raise CyclicHierarchy(path[path.index(nxt):] + [nxt])
                if color.get(nxt) != 2:
                    color[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, iter(internal_parents(nxt))))
                    break
            else:
                color[node] = 2
                path.pop()
                stack.pop()
    return ClassHierarchy(parent, children, interfaces, implementors, internal)


# --------------------------------------------------------------------------- #
# method resolution


@dataclass(frozen=True)
class Internal:
    owner: str
    name: str
    descriptor: str


@dataclass(frozen=True)
class External:
    exit_class: str
    name: str
    descriptor: str


@dataclass(frozen=True)
class Missing:
    owner: str
    name: str
    descriptor: str


Resolution = Internal | External | Missing


def resolve_method(
    h: ClassHierarchy, pkg: Package, owner: str, name: str, descriptor: str
) -> Resolution:
    """Find the nearest definition walking supertypes through internal classes.

    Breadth-first, superclass before interfaces; the first external name
    reached before any definition decides External. A walk that exhausts
    internal classes without leaving the package is Missing.
    """
    queue: deque[str] = deque([owner])
    visited: set[str] = set()
    while queue:
        cur = queue.popleft()
        if cur in visited:
            continue
        visited.add(cur)
        if not h.is_internal(cur):
            return External(cur, name, descriptor)
        if pkg.classes[cur].defines(name, descriptor):
            return Internal(cur, name, descriptor)
        queue.extend(h.parents_of(cur))
    return Missing(owner, name, descriptor)


# --------------------------------------------------------------------------- #
# seeds


def collect_seeds(pkg: Package, h: ClassHierarchy, cfg: TrimConfig) -> set[str]:
    """Entry-point classes: manifest components, framework/enum subclasses,
    layout widgets, and extra-keep matches."""
    manifest = pkg.manifest
    if manifest.main_activity is None:
        raise MissingSeed("manifest declares no main-activity")
    seeds: set[str] = set()
    for declared in manifest.declared_classes():
        if declared not in pkg.classes:
            raise MissingSeed(f"manifest-declared class {declared} is not in the package")
        seeds.add(declared)

    bases = set(cfg.entry_bases) | {cfg.enum_base}
    for name in pkg.classes:
        ancestors = h.ancestors_of(name)
        if ancestors & bases:
            seeds.add(name)

    for path, blob in pkg.res_files.items():
        if is_layout_path(path):
            for widget in find_widget_classes(decode_res_text(blob)):
                if widget in pkg.classes:
                    seeds.add(widget)

    if cfg.extra_keep:
        for name in pkg.classes:
            if any(fnmatch.fnmatchcase(name, g) for g in cfg.extra_keep):
                seeds.add(name)
    return seeds


# --------------------------------------------------------------------------- #
# reachability


@dataclass(frozen=True)
class ReachabilityResult:
    kept_classes: frozenset[str]
    kept_methods: frozenset[tuple[str, str, str]]
    instantiated: frozenset[str]
    used_resource_ids: frozenset[int]
    asset_strings: frozenset[str]
    external_refs: frozenset[tuple[str, str, str]]
    package_digest: str
    seeds: frozenset[str]

    def keeps_method(self, owner: str, name: str, descriptor: str) -> bool:
        return (owner, name, descriptor) in self.kept_methods


def scan_constants(pkg: Package) -> tuple[set[int], set[str]]:
    """Resource ids and strings from every internal method body, reachable
    or not; resource-index classes are excluded from the id scan."""
    used_ids: set[int] = set()
    strings: set[str] = set()
    for name, cls in pkg.classes.items():
        index_class = is_resource_index_class(name)
        for method in cls.methods:
            for ins in method.body:
                if isinstance(ins, ConstResource) and not index_class:
                    used_ids.add(ins.resource_id)
                elif isinstance(ins, ConstString):
                    strings.add(ins.value)
    return used_ids, strings


def reach(pkg: Package, cfg: TrimConfig) -> ReachabilityResult:
    """Least fixpoint of the keep rules; see module docstring."""
    h = build_hierarchy(pkg, cfg)
    seeds = collect_seeds(pkg, h, cfg)

    kept_classes: set[str] = set()
    kept_methods: set[tuple[str, str, str]] = set()
    instantiated: set[str] = set()
    external_refs: set[tuple[str, str, str]] = set()
    dispatchable: set[str] = set()  # instantiated or seed classes
    worklist: deque[tuple[str, str, str]] = deque()

    resolve = lru_cache(maxsize=None)(
        lambda owner, name, desc: resolve_method(h, pkg, owner, name, desc)
    )

    def keep_class(name: str) -> None:
        if name in kept_classes:
            return
        kept_classes.add(name)
        for m in pkg.classes[name].methods:
            if m.is_native or m.name == STATIC_INIT:
                keep_method(name, m.name, m.descriptor)

    def keep_method(owner: str, name: str, desc: str) -> None:
        key = (owner, name, desc)
        if key in kept_methods:
            return
        kept_methods.add(key)
        keep_class(owner)
        worklist.append(key)
        # override propagation: dispatchable subclasses defining the same method
        for sub in h.internal_descendants(owner):
            if sub in dispatchable and pkg.classes[sub].defines(name, desc):
                keep_method(sub, name, desc)

    def make_dispatchable(name: str) -> None:
        if name in dispatchable:
            return
        dispatchable.add(name)
        ancestors = h.ancestors_of(name)
        for m in pkg.classes[name].methods:
            for anc in ancestors:
                if (anc, m.name, m.descriptor) in kept_methods:
                    keep_method(name, m.name, m.descriptor)
                    break

    def instantiate(name: str) -> None:
        if name in instantiated:
            return
        instantiated.add(name)
        keep_class(name)
        for m in pkg.classes[name].methods:
            if m.name == CONSTRUCTOR:
                keep_method(name, m.name, m.descriptor)
        make_dispatchable(name)

    for seed in sorted(seeds):
        keep_class(seed)
        make_dispatchable(seed)
        for m in pkg.classes[seed].methods:
            if m.name in (CONSTRUCTOR, STATIC_INIT) or m.is_native or cfg.matches_callback(m.name):
                keep_method(seed, m.name, m.descriptor)

    while worklist:
        owner, name, desc = worklist.popleft()
        method = pkg.classes[owner].method(name, desc)
        if method is None:
            continue
        for ins in method.body:
            if isinstance(ins, Invoke):
                res = resolve(ins.owner, ins.name, ins.descriptor)
                if isinstance(res, Internal):
                    keep_method(res.owner, res.name, res.descriptor)
                elif isinstance(res, External):
                    external_refs.add((ins.owner, ins.name, ins.descriptor))
            elif isinstance(ins, NewInstance):
                if ins.owner in pkg.classes:
                    instantiate(ins.owner)
            elif isinstance(ins, FieldAccess):
                if ins.owner in pkg.classes:
                    keep_class(ins.owner)

    used_ids, strings = scan_constants(pkg)
    return ReachabilityResult(
        kept_classes=frozenset(kept_classes),
        kept_methods=frozenset(kept_methods),
        instantiated=frozenset(instantiated),
        used_resource_ids=frozenset(used_ids),
        asset_strings=frozenset(strings),
        external_refs=frozenset(external_refs),
        package_digest=package_digest(pkg),
        seeds=frozenset(seeds),
    )
