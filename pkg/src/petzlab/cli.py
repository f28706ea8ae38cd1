"""Command-line entry point: ``petzlab sweep ...``.

Exit codes: 0 on success, 1 for configuration errors, 2 for numeric failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .sweep import (
    CHANNELS,
    EXPERIMENTS,
    MAXIMALLY_MIXED,
    ConfigError,
    NumericFailure,
    SweepConfig,
    emit_csv,
    format_csv,
    p_range,
    resolve_threads,
    run_sweep,
)


def parse_dims(text: str) -> tuple[int, ...]:
    """``"2,10,40"`` or inclusive ranges such as ``"2:20"``, freely mixed."""
    dims: list[int] = []
    try:
        for part in filter(None, (s.strip() for s in text.split(","))):
            if ":" in part:
                lo, hi = (int(x) for x in part.split(":"))
                dims.extend(range(lo, hi + 1))
            else:
                dims.append(int(part))
    except ValueError:
        raise ConfigError(f"cannot parse dimensions {text!r}") from None
    return tuple(dims)


def parse_grid(text: str) -> tuple[float, ...]:
    """``"start:stop:step"`` (inclusive) or a comma-separated list of values."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            return p_range(start, stop, step)
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


def parse_reference(text: str):
    key = text.strip().lower().replace("-", "_")
    if key == MAXIMALLY_MIXED:
        return MAXIMALLY_MIXED
    if key.startswith(("eps=", "epsilon=")):
        try:
            return float(key.split("=", 1)[1])
        except ValueError:
            pass
    raise ConfigError(f"reference must be 'maximally-mixed' or 'eps=<value>', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="petzlab", description="Petz recovery map sweeps.")
    sub = ap.add_subparsers(dest="command", required=True)
    sw = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    sw.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    sw.add_argument("--channel", required=True, choices=CHANNELS)
    sw.add_argument("--dims", default=None, help="e.g. 2,10,40 or 2:20")
    sw.add_argument("--p", dest="p_grid", default=None, help="start:stop:step or comma list")
    sw.add_argument("--reference", default="maximally-mixed", help="maximally-mixed or eps=<value>")
    sw.add_argument("--out", default=None, help="output CSV path (stdout if omitted)")
    sw.add_argument("--heavy", action="store_true", help="allow d > 40")
    sw.add_argument("--tol", type=float, default=1e-9, help="CPTP tolerance for each Petz map")
    sw.add_argument("--threads", type=int, default=None)
    sw.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage; that code is reserved for numeric failures
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = SweepConfig(
            experiment=args.experiment,
            channel=args.channel,
            dims=parse_dims(args.dims) if args.dims else (),
            p_grid=parse_grid(args.p_grid) if args.p_grid else (),
            reference=parse_reference(args.reference),
            out_path=args.out,
            heavy=args.heavy,
            tol=args.tol,
            threads=resolve_threads(args.threads),
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        rows = run_sweep(cfg)
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    try:
        if cfg.out_path:
            emit_csv(rows, cfg.out_path)
        else:
            sys.stdout.write(format_csv(rows))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
