"""Command-line interface: parse documents, dispatch, emit reports.

Every report is a self-contained JSON (or CSV summary) embedding the run
manifest; all numeric content is exact-rational strings, so identical
manifests with the same seed reproduce identical reports byte for byte apart
from the timestamp.  Exit codes: 0 success, 2 parse error, 3 validation
error, 4 no stable configuration found, 5 internal inequality violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__
from .chern import c2_number, c2_trivial, derive_tables, norm_sq
from .errors import (
    BGIViolationError,
    DocumentParseError,
    DocumentValidationError,
    FiltstabError,
    NoStableConfigurationError,
)
from .fixtures import three_concurrent_lines, three_generic_lines, two_lines
from .linalg import rational_from_string, rational_to_string
from .serialize import (
    arrangement_from_doc,
    canonical_json,
    chern_report_to_doc,
    divisor_configuration_to_doc,
    estimate_to_doc,
    input_document,
    parse_config,
    verdict_to_doc,
)
from .stability import check_stability
from .surface import blow_up, crossing_points
from .upsilon import outer_search

SEED_ENV_VAR = "FILTSTAB_SEED"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NO_STABLE = 4
EXIT_INEQUALITY = 5


@dataclass
class RunManifest:
    """Provenance block embedded into every report."""

    command: str
    input_path: Optional[str]
    options: dict[str, Any] = field(default_factory=dict)
    version: str = __version__
    timestamp: str = ""

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def to_doc(self) -> dict:
        return {
            "command": self.command,
            "input": self.input_path,
            "options": self.options,
            "version": self.version,
            "timestamp": self.timestamp,
        }


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR, "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _load_document(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as error:
        raise DocumentParseError(f"cannot open input file: {error}", path) from error
    except json.JSONDecodeError as error:
        raise DocumentParseError(
            f"invalid JSON at line {error.lineno} column {error.colno}: {error.msg}",
            path,
        ) from error


def _flatten(prefix: str, value: Any, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], rows)
    elif isinstance(value, list):
        for index, item in enumerate(value):
            _flatten(f"{prefix}[{index}]", item, rows)
    else:
        rows.append((prefix, "" if value is None else str(value)))


def _render(report: dict, output_format: str) -> str:
    if output_format == "json":
        return canonical_json(report)
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("key", "value"))
    writer.writerows(rows)
    return buffer.getvalue()


def _emit(text: str, output_path: Optional[str]) -> None:
    if output_path is None or output_path == "-":
        sys.stdout.write(text)
    else:
        with open(output_path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _cmd_chern(args: argparse.Namespace) -> dict:
    config, fc, data = parse_config(_load_document(args.input))
    if data is None and fc is None:
        raise DocumentValidationError(
            "need filtered_configuration or system_data to compute Chern numbers",
            "filtered_configuration",
        )
    if data is None:
        data = derive_tables(fc, config)
    report = c2_number(data, config)
    result: dict[str, Any] = {
        "report": chern_report_to_doc(report),
        "crossings": [
            {"components": list(pair), "points": count}
            for pair, count in crossing_points(config)
        ],
    }
    if fc is not None:
        result["balanced"] = fc.is_balanced()
        result["norm_sq"] = rational_to_string(norm_sq(fc, config))
        if fc.is_balanced():
            result["c2_pairing"] = rational_to_string(c2_trivial(fc, config))
    return result


def _cmd_stability(args: argparse.Namespace) -> dict:
    config, fc, _ = parse_config(_load_document(args.input))
    if fc is None:
        raise DocumentValidationError(
            "stability needs a filtered_configuration", "filtered_configuration"
        )
    verdict = check_stability(
        fc,
        config,
        mode=args.stability_mode,
        samples=args.samples,
        seed=args.seed,
        depth=args.depth,
    )
    return {"verdict": verdict_to_doc(verdict)}


def _cmd_blowup(args: argparse.Namespace) -> dict:
    document = _load_document(args.input)
    if not isinstance(document, dict) or "arrangement" not in document:
        raise DocumentParseError("missing key 'arrangement'", ".")
    arrangement = arrangement_from_doc(document["arrangement"], "arrangement")
    try:
        epsilon = rational_from_string(args.epsilon)
    except ValueError as error:
        raise DocumentParseError(str(error), "--epsilon") from error
    config = blow_up(arrangement, epsilon)
    return input_document(config)


def _cmd_upsilon(args: argparse.Namespace) -> dict:
    config, fc, _ = parse_config(_load_document(args.input))
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    supplied = (fc,) if fc is not None else ()
    if fc is not None and "user" not in strategies:
        strategies = strategies + ("user",)

    def progress(done: int, total: int, best: Optional[Fraction]) -> None:
        if args.quiet:
            return
        stride = max(1, total // 10)
        if done % stride == 0 or done == total:
            shown = rational_to_string(best) if best is not None else "none"
            print(f"candidates {done}/{total}, best ratio {shown}", file=sys.stderr)

    estimate = outer_search(
        config,
        rank=args.rank,
        budget=args.budget,
        seed=args.seed,
        strategies=strategies,
        supplied=supplied,
        max_denominator=args.max_denominator,
        samples=args.samples,
        progress=progress,
    )
    return estimate_to_doc(estimate)


def _cmd_demo(args: argparse.Namespace) -> dict:
    result: dict[str, Any] = {}

    config2, fc2 = two_lines()
    report2 = c2_number(derive_tables(fc2, config2), config2)
    verdict2 = check_stability(fc2, config2)
    result["two_lines"] = {
        "chern": chern_report_to_doc(report2),
        "stability": verdict_to_doc(verdict2),
    }

    arrangement = three_concurrent_lines()
    blown = blow_up(arrangement, Fraction(1, 10))
    result["three_concurrent_lines_blowup"] = divisor_configuration_to_doc(blown)

    config3, fc3 = three_generic_lines()
    report3 = c2_number(derive_tables(fc3, config3), config3)
    verdict3 = check_stability(fc3, config3)
    c2_value = c2_trivial(fc3, config3)
    norm_value = norm_sq(fc3, config3)
    result["three_generic_lines"] = {
        "chern": chern_report_to_doc(report3),
        "stability": verdict_to_doc(verdict3),
        "c2": rational_to_string(c2_value),
        "norm_sq": rational_to_string(norm_value),
        "ratio": rational_to_string(c2_value / norm_value),
    }
    if not args.quiet:
        print(
            f"three generic lines: ratio = {rational_to_string(c2_value / norm_value)}",
            file=sys.stderr,
        )
    return result


def _manifest_options(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"func", "command", "input", "output"}
    options = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or callable(value):
            continue
        options[key] = value
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filtstab",
        description=(
            "Exact Chern-number and stability calculus for weighted flags on "
            "surface divisor configurations."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--output", default=None, help="report path (default stdout)")
        sub.add_argument(
            "--format", choices=("json", "csv"), default="json", dest="output_format"
        )
        sub.add_argument(
            "--quiet", action="store_true", help="suppress progress, never content"
        )

    chern = subparsers.add_parser("chern", help="Chern numbers of filtered data")
    chern.add_argument("--input", required=True)
    add_common(chern)
    chern.set_defaults(func=_cmd_chern)

    stability = subparsers.add_parser("stability", help="stability verdict")
    stability.add_argument("--input", required=True)
    stability.add_argument(
        "--stability-mode", choices=("auto", "exact2", "heuristic"), default="auto"
    )
    stability.add_argument("--samples", type=int, default=2000)
    stability.add_argument("--seed", type=int, default=_default_seed())
    stability.add_argument("--depth", type=int, default=3)
    add_common(stability)
    stability.set_defaults(func=_cmd_stability)

    upsilon = subparsers.add_parser(
        "upsilon", help="search for the minimal c2 / norm ratio"
    )
    upsilon.add_argument("--input", required=True)
    upsilon.add_argument("--rank", type=int, required=True)
    upsilon.add_argument("--budget", type=int, default=200)
    upsilon.add_argument("--seed", type=int, default=_default_seed())
    upsilon.add_argument(
        "--strategies", default="random,coincident,generic",
        help="comma-separated subset of random,coincident,generic,user",
    )
    upsilon.add_argument("--samples", type=int, default=2000)
    upsilon.add_argument("--max-denominator", type=int, default=64)
    add_common(upsilon)
    upsilon.set_defaults(func=_cmd_upsilon)

    blowup = subparsers.add_parser(
        "blowup", help="resolve a plane arrangement by blowing up its points"
    )
    blowup.add_argument("--input", required=True)
    blowup.add_argument("--epsilon", default="1/100")
    add_common(blowup)
    blowup.set_defaults(func=_cmd_blowup)

    demo = subparsers.add_parser("demo", help="run the built-in worked examples")
    add_common(demo)
    demo.set_defaults(func=_cmd_demo)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(
        command=args.command,
        input_path=getattr(args, "input", None),
        options=_manifest_options(args),
    )
    try:
        result = args.func(args)
    except DocumentParseError as error:
        print(f"parse error: {error}", file=sys.stderr)
        return EXIT_PARSE
    except DocumentValidationError as error:
        print(f"validation error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    except NoStableConfigurationError as error:
        report = {
            "manifest": manifest.to_doc(),
            "error": str(error),
            "search_log": error.search_log,
        }
        _emit(_render(report, args.output_format), args.output)
        print(f"no stable configuration: {error}", file=sys.stderr)
        return EXIT_NO_STABLE
    except BGIViolationError as error:
        print(f"inequality violation (bug): {error}", file=sys.stderr)
        return EXIT_INEQUALITY
    except FiltstabError as error:
        print(f"validation error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    report = {"manifest": manifest.to_doc(), "result": result}
    _emit(_render(report, args.output_format), args.output)
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


def upsilon_entry() -> None:
    """Direct entry point running the upsilon subcommand."""
    sys.exit(main(["upsilon", *sys.argv[1:]]))
