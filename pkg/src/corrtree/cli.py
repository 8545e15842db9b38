"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data validation error,
3 unexpected runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import DataValidationError
from .linkage import METHODS
from .pipeline import FORMATS, RunConfig, Window, run


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="corrtree",
        description=(
            "Build correlation-based structures from a time-series panel: "
            "minimal spanning tree, single/average-linkage dendrograms, and "
            "bootstrap link reliabilities."
        ),
    )
    parser.add_argument("--input", required=True, help="delimited panel file (header row of symbols)")
    parser.add_argument(
        "--window",
        action="append",
        default=[],
        metavar="START:END",
        help="period-label window, inclusive; repeatable; omit for the full panel",
    )
    parser.add_argument(
        "--linkage",
        default="single,average",
        help=f"comma list from {{{','.join(METHODS)}}} (default: single,average)",
    )
    parser.add_argument("--replicas", type=int, default=1600, help="bootstrap replicas (default: 1600)")
    parser.add_argument("--seed", type=int, default=0, help="bootstrap seed, unsigned 64-bit (default: 0)")
    parser.add_argument("--out", required=True, help="output directory (one subdirectory per window)")
    parser.add_argument(
        "--formats",
        default=",".join(FORMATS),
        help=f"comma list from {{{','.join(FORMATS)}}} (default: all)",
    )
    parser.add_argument(
        "--cut",
        type=float,
        default=None,
        metavar="HEIGHT",
        help="also emit flat clusters from each dendrogram cut at this height",
    )
    parser.add_argument("--delimiter", default=",", help="input field delimiter (default: ,)")
    return parser


def _split_csv(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _parse_window(raw: str) -> Window:
    if raw.count(":") != 1:
        raise _UsageError(f"window {raw!r} must look like START:END")
    start, end = (part.strip() for part in raw.split(":"))
    if not start or not end:
        raise _UsageError(f"window {raw!r} must name both endpoints")
    return Window(start=start, end=end)


def parse_config(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.replicas < 1:
        raise _UsageError("--replicas must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise _UsageError("--seed must fit in an unsigned 64-bit integer")
    methods = _split_csv(args.linkage)
    for m in methods:
        if m not in METHODS:
            raise _UsageError(f"unknown linkage method {m!r}")
    formats = _split_csv(args.formats)
    if not formats:
        raise _UsageError("--formats must name at least one format")
    for f in formats:
        if f not in FORMATS:
            raise _UsageError(f"unknown export format {f!r}")
    if args.cut is not None and args.cut < 0:
        raise _UsageError("--cut must be >= 0")
    windows = tuple(_parse_window(w) for w in args.window) or (Window(),)
    return RunConfig(
        input_path=Path(args.input),
        out_dir=Path(args.out),
        windows=windows,
        linkage_methods=methods,
        replicas=args.replicas,
        seed=args.seed,
        formats=formats,
        cut_height=args.cut,
        delimiter=args.delimiter,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    if not config.input_path.is_file():
        print(f"usage error: input file {config.input_path} does not exist", file=sys.stderr)
        return 1
    try:
        written = run(config)
    except DataValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"failure: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
