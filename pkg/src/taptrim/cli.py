"""Command-line front end.

Subcommands: analyze, bloat, trim, verify, compare, gen.
Exit codes: 0 success, 1 usage error, 2 parse/IO error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analyzer import CORPUS_COLUMNS, compare, composition_report, corpus_row, library_ratio
from .archive import parse_package, serialize_package
from .bloat import detect_asset_bloat, detect_code_bloat, detect_res_bloat
from .config import TrimConfig, load_trim_config
from .errors import TapError
from .gen import generate_corpus, write_corpus
from .refgraph import reach
from .trimmer import trim, verify_links

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    """A semantic usage problem argparse cannot catch."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="trim config file (key: value lines)")
    p.add_argument("--platform-prefix", action="append", metavar="PREFIX", default=None)
    p.add_argument("--library-prefix", action="append", metavar="PREFIX", default=None)
    p.add_argument("--entry-base", action="append", metavar="FQN", default=None)
    p.add_argument("--callback-pattern", action="append", metavar="GLOB", default=None)
    p.add_argument("--extra-keep", action="append", metavar="GLOB", default=None)
    p.add_argument("--enum-base", metavar="FQN", default=None)


def _add_format_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "tsv"), default="json", help="report format")
    p.add_argument("-o", "--output", metavar="FILE", help="write the report here, not stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="taptrim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="composition breakdown and library ratio")
    p.add_argument("input", nargs="?", help="package file")
    p.add_argument("--corpus", metavar="DIR", help="analyze every *.tap in a directory")
    _add_config_flags(p)
    _add_format_flag(p)

    p = sub.add_parser("bloat", help="report removable code, res entries, and assets")
    p.add_argument("input")
    p.add_argument("--paper-strict", action="store_true", help="disable res closure and asset prefixes")
    _add_config_flags(p)
    _add_format_flag(p)

    p = sub.add_parser("trim", help="remove bloat and repack")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, metavar="FILE", help="trimmed package path")
    p.add_argument("--report", metavar="FILE", help="also write the JSON trim report here")
    p.add_argument("--paper-strict", action="store_true")
    p.add_argument("--code-first", action="store_true", help="trim code before resources")
    _add_config_flags(p)

    p = sub.add_parser("verify", help="static link verification")
    p.add_argument("input")
    _add_config_flags(p)
    _add_format_flag(p)

    p = sub.add_parser("compare", help="pairwise package metrics")
    p.add_argument("left")
    p.add_argument("right")
    _add_config_flags(p)
    _add_format_flag(p)

    p = sub.add_parser("gen", help="generate a synthetic corpus with a bloat ledger")
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--lib-ratio", type=float, default=None, help="library share of code, (0, 1)")
    return parser


def _load_config(args: argparse.Namespace) -> TrimConfig:
    cfg = TrimConfig()
    if getattr(args, "config", None):
        cfg = load_trim_config(args.config, cfg)
    overrides: dict[str, object] = {}
    for attr, field_name in (
        ("platform_prefix", "platform_prefixes"),
        ("library_prefix", "library_prefixes"),
        ("entry_base", "entry_bases"),
        ("callback_pattern", "callback_patterns"),
        ("extra_keep", "extra_keep"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[field_name] = tuple(value)
    if getattr(args, "enum_base", None) is not None:
        overrides["enum_base"] = args.enum_base
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


def _read_package(path: str):
    return parse_package(Path(path).read_bytes())


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(payload: object, output: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", output)


def _emit_tsv(rows: list[tuple], output: str | None, header: tuple[str, ...] | None = None) -> None:
    lines = []
    if header:
        lines.append("\t".join(header))
    lines.extend("\t".join(str(c) for c in row) for row in rows)
    _emit("\n".join(lines) + "\n", output)


# --------------------------------------------------------------------------- #
# subcommands


def _cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if args.corpus:
        rows = []
        for path in sorted(Path(args.corpus).glob("*.tap")):
            pkg = parse_package(path.read_bytes())
            rows.append(corpus_row(pkg, path.name, cfg))
        if args.format == "tsv":
            _emit_tsv([tuple(r[c] for c in CORPUS_COLUMNS) for r in rows], args.output,
                      header=CORPUS_COLUMNS)
        else:
            _emit_json(rows, args.output)
        return EXIT_OK
    if not args.input:
        raise UsageError("analyze needs a package file or --corpus DIR")
    pkg = _read_package(args.input)
    comp = composition_report(pkg)
    ratio = library_ratio(pkg, cfg) if comp.sizes.code_bytes else 0.0
    if args.format == "tsv":
        rows = [(k, b, p) for k, b, p in comp.tsv_rows()]
        rows.append(("library_ratio", "", round(ratio, 6)))
        _emit_tsv(rows, args.output, header=("component", "bytes", "percent"))
    else:
        _emit_json({"composition": comp.to_dict(), "library_ratio": ratio}, args.output)
    return EXIT_OK


def _cmd_bloat(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pkg = _read_package(args.input)
    result = reach(pkg, cfg)
    code = detect_code_bloat(pkg, result)
    res = detect_res_bloat(pkg, result, paper_strict=args.paper_strict)
    assets = detect_asset_bloat(pkg, result, paper_strict=args.paper_strict)
    if args.format == "tsv":
        rows = code.tsv_rows() + res.tsv_rows() + assets.tsv_rows()
        _emit_tsv(rows, args.output, header=("kind", "identifier", "bytes"))
    else:
        _emit_json(
            {"code": code.to_dict(), "res": res.to_dict(), "assets": assets.to_dict()},
            args.output,
        )
    return EXIT_OK


def _cmd_trim(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pkg = _read_package(args.input)
    trimmed, report = trim(pkg, cfg, paper_strict=args.paper_strict, code_first=args.code_first)
    Path(args.output).write_bytes(serialize_package(trimmed))
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(report.render_table())
    verdict = verify_links(trimmed, cfg)
    if not verdict.ok:
        print(f"verification failed: {verdict.finding_count} findings", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pkg = _read_package(args.input)
    report = verify_links(pkg, cfg)
    if args.format == "tsv":
        rows: list[tuple] = [("unresolved_invoke", f"{s} -> {o}.{n} {d}") for s, o, n, d in report.unresolved_invokes]
        rows += [("missing_class", f"{s} -> {o}") for s, o in report.missing_classes]
        rows += [("dangling_resource_id", f"{s} -> {i}") for s, i in report.dangling_resource_ids]
        rows += [("broken_layout_ref", f"{f} -> {r}") for f, r in report.broken_layout_refs]
        _emit_tsv(rows or [("ok", "true")], args.output, header=("kind", "finding"))
    else:
        _emit_json(report.to_dict(), args.output)
    return EXIT_OK if report.ok else EXIT_VERIFY


def _cmd_compare(args: argparse.Namespace) -> int:
    left = _read_package(args.left)
    right = _read_package(args.right)
    report = compare(left, right, Path(args.left).name, Path(args.right).name)
    if args.format == "tsv":
        _emit_tsv(report.tsv_rows(), args.output, header=("metric", "left", "right"))
    else:
        _emit_json(report.to_dict(), args.output)
    return EXIT_OK


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    if args.lib_ratio is not None and not 0.0 < args.lib_ratio < 1.0:
        raise UsageError("--lib-ratio must be strictly between 0 and 1")
    corpus = generate_corpus(args.seed, args.count, args.lib_ratio)
    write_corpus(args.output, corpus)
    print(f"generated {len(corpus)} packages in {args.output}")
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "bloat": _cmd_bloat,
    "trim": _cmd_trim,
    "verify": _cmd_verify,
    "compare": _cmd_compare,
    "gen": _cmd_gen,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"taptrim: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (TapError, OSError, UnicodeDecodeError) as err:
        print(f"taptrim: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
