"""End-to-end acceptance gates for the trimming pipeline.

Each test prints one pass/fail line (run with -s to see them); the suite
exercises an exact single-activity fixture, an exact composition fixture,
and a 220-package generated corpus with a planted-bloat ledger.
"""

from __future__ import annotations

import hashlib
import json
import time

import pytest

from taptrim.analyzer import composition_report
from taptrim.archive import parse_package, serialize_package
from taptrim.classfile import serialize_class_text
from taptrim.config import TrimConfig
from taptrim.gen import LEDGER_FILE, META_FILE, generate_corpus, read_ledger, write_corpus
from taptrim.refgraph import reach
from taptrim.trimmer import trim, verify_links

import helpers
import oracle

CORPUS_SEED = 2026
CORPUS_COUNT = 220

CFG = TrimConfig()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    directory = tmp_path_factory.mktemp("acceptance_corpus")
    write_corpus(directory, generate_corpus(CORPUS_SEED, CORPUS_COUNT))
    packages = {
        path.name: parse_package(path.read_bytes())
        for path in sorted(directory.glob("*.tap"))
    }
    ledger = read_ledger(directory / LEDGER_FILE)
    return directory, packages, ledger


def _report(name: str, ok: bool, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"acceptance {name}: {'PASS' if ok else 'FAIL'}{suffix}")
    assert ok, f"{name} failed{suffix}"


def test_c1_entrypoint_trim_exact_method_set():
    start = time.monotonic()
    pkg = helpers.entry_activity_package()
    trimmed, _ = trim(pkg, CFG)
    cls = trimmed.classes["com.example.MainActivity"]
    kept = [m.name for m in cls.methods]
    exact_text = serialize_class_text(cls) == helpers.TRIMMED_ENTRY_ACTIVITY_TEXT

    again, second = trim(trimmed, CFG)
    idempotent = (
        second.items_removed_total == 0
        and serialize_package(again) == serialize_package(trimmed)
    )
    elapsed = time.monotonic() - start
    ok = kept == ["<init>", "onCreate", "sum"] and exact_text and idempotent and elapsed < 1.0
    _report(
        "1 entry-point trim",
        ok,
        f"kept={kept}, exact_text={exact_text}, idempotent={idempotent}, {elapsed:.2f}s",
    )


def test_c2_composition_percentages():
    start = time.monotonic()
    report = composition_report(helpers.demo_app_package())
    expected = {"code": 93.80, "images": 4.52, "layouts": 0.47, "config": 0.17}
    deltas = {k: abs(report.percentages[k] - v) for k, v in expected.items()}
    elapsed = time.monotonic() - start
    ok = all(d <= 0.01 for d in deltas.values()) and elapsed < 1.0
    _report(
        "2 composition percentages",
        ok,
        ", ".join(f"{k}={report.percentages[k]:.2f}" for k in expected) + f", {elapsed:.2f}s",
    )


def test_c3_reach_matches_naive_oracle(corpus):
    _, packages, _ = corpus
    start = time.monotonic()
    mismatches = 0
    for name, pkg in packages.items():
        got = reach(pkg, CFG)
        want = oracle.naive_reach(pkg, CFG)
        if (
            got.kept_classes != frozenset(want["kept_classes"])
            or got.kept_methods != frozenset(want["kept_methods"])
            or got.instantiated != frozenset(want["instantiated"])
            or got.used_resource_ids != frozenset(want["used_resource_ids"])
            or got.asset_strings != frozenset(want["asset_strings"])
            or got.external_refs != frozenset(want["external_refs"])
        ):
            mismatches += 1
    elapsed = time.monotonic() - start
    ok = mismatches == 0 and len(packages) >= 200 and elapsed < 30.0
    _report(
        "3 oracle equivalence",
        ok,
        f"{len(packages)} packages, {mismatches} mismatches, {elapsed:.1f}s",
    )


def test_c4_soundness_and_idempotence(corpus):
    _, packages, _ = corpus
    start = time.monotonic()
    unsound = 0
    not_idempotent = 0
    for pkg in packages.values():
        trimmed, _ = trim(pkg, CFG)
        if not verify_links(trimmed, CFG).ok:
            unsound += 1
        again, second = trim(trimmed, CFG)
        if second.items_removed_total != 0 or serialize_package(again) != serialize_package(
            trimmed
        ):
            not_idempotent += 1
    elapsed = time.monotonic() - start
    ok = unsound == 0 and not_idempotent == 0 and elapsed < 60.0
    _report(
        "4 soundness and idempotence",
        ok,
        f"{len(packages)} packages, {unsound} unsound, {not_idempotent} non-idempotent, "
        f"{elapsed:.1f}s",
    )


def test_c5_planted_bloat_recovery(corpus):
    _, packages, ledger = corpus
    assert len(packages) >= 100
    rows_by_pkg: dict[str, list] = {}
    for row in ledger:
        rows_by_pkg.setdefault(row.package, []).append(row)

    wrong_byte_totals = 0
    wrong_items = 0
    for name, pkg in packages.items():
        trimmed, report = trim(pkg, CFG)
        rows = rows_by_pkg[name]
        dead = {"asset": 0, "res": 0, "code": 0}
        for row in rows:
            if row.live:
                continue
            if row.kind in ("class", "method"):
                dead["code"] += row.bytes
            elif row.kind in dead:
                dead[row.kind] += row.bytes
        if (
            report.stages["assets"].bytes_removed != dead["asset"]
            or report.stages["res"].bytes_removed != dead["res"]
            or report.stages["code"].bytes_removed != dead["code"]
        ):
            wrong_byte_totals += 1
        for row in rows:
            if row.kind == "class":
                present = row.identifier in trimmed.classes
            elif row.kind == "method":
                target, desc = row.identifier.rsplit(" ", 1)
                owner, mname = target.rsplit(".", 1)
                cls = trimmed.classes.get(owner)
                present = cls is not None and cls.defines(mname, desc)
            elif row.kind == "res":
                present = int(row.identifier, 16) in trimmed.resource_table.by_id
            elif row.kind == "asset":
                present = row.identifier in trimmed.asset_files
            else:  # native files are never trimmed
                present = row.identifier in trimmed.native_files
            if present != row.live:
                wrong_items += 1
    ok = wrong_byte_totals == 0 and wrong_items == 0
    _report(
        "5 planted-bloat recovery",
        ok,
        f"{len(packages)} packages, {wrong_byte_totals} byte mismatches, "
        f"{wrong_items} item mismatches",
    )


def test_c6_full_pipeline_determinism(corpus, tmp_path):
    directory, packages, _ = corpus

    def pipeline_digest() -> str:
        digest = hashlib.sha256()
        for path in sorted(directory.glob("*.tap")):
            pkg = parse_package(path.read_bytes())
            trimmed, report = trim(pkg, CFG)
            digest.update(serialize_package(trimmed))
            digest.update(json.dumps(report.to_dict(), sort_keys=True).encode())
        return digest.hexdigest()

    runs = {pipeline_digest() for _ in range(2)}

    # regenerating the corpus reproduces it bit for bit
    regen = tmp_path / "regen"
    write_corpus(regen, generate_corpus(CORPUS_SEED, CORPUS_COUNT))
    regen_identical = all(
        (regen / p.name).read_bytes() == p.read_bytes() for p in sorted(directory.glob("*"))
    )
    ok = len(runs) == 1 and regen_identical
    _report(
        "6 determinism",
        ok,
        f"pipeline digests={len(runs)}, regen identical={regen_identical}",
    )


def test_c7_library_ratio_recovery(corpus, tmp_path):
    directory, packages, _ = corpus
    targets: dict[str, float] = {}
    for line in (directory / META_FILE).read_text().splitlines():
        name, key, value = line.split("\t")
        if key == "library_ratio_target":
            targets[name] = float(value)

    # measure through the actual corpus TSV surface
    from taptrim.cli import main as cli_main

    tsv_path = tmp_path / "corpus.tsv"
    assert cli_main(["analyze", "--corpus", str(directory), "--format", "tsv",
                     "-o", str(tsv_path)]) == 0
    lines = tsv_path.read_text().splitlines()
    header = lines[0].split("\t")
    name_col, ratio_col = header.index("package"), header.index("library_ratio")

    worst = 0.0
    misses = 0
    seen = 0
    for line in lines[1:]:
        cols = line.split("\t")
        name, ratio = cols[name_col], float(cols[ratio_col])
        delta_pp = abs(ratio - targets[name]) * 100
        worst = max(worst, delta_pp)
        seen += 1
        if delta_pp > 0.5:
            misses += 1
    ok = misses == 0 and seen == len(packages) == len(targets)
    _report(
        "7 library-ratio recovery",
        ok,
        f"{seen} packages, worst delta {worst:.3f}pp, {misses} misses",
    )
