"""Command line: simulate, classify, report, calibrate."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections import defaultdict
from pathlib import Path

from . import __version__
from .calibrate import (TARGET_LABELS, base_calibration, calibrate,
                        classification_report)
from .calibration import Calibration
from .characterization import (CounterFormatError, classify, ingest_counters,
                               rank_benefit, write_counters)
from .comparison import (RESULTS_HEADER, CellError, counter_rows, fmt, sweep,
                         write_results_csv)
from .config import ConfigError, ExperimentConfig

log = logging.getLogger("hybridmem")

PLOT_HEADER = ("scale_label", "perf_hms", "perf_ums", "improvement")


class ReportError(ValueError):
    pass


def cmd_simulate(args) -> int:
    config = ExperimentConfig.load(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.calibration is not None:
        config.calibration = args.calibration
    if args.out is not None:
        config.output_dir = args.out
    cal, machine, points = config.validate()

    results = sweep(config.workloads, points, config.seed, cal, machine, config.workers)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_results_csv(results, out / "results.csv")
    write_counters(out / "counters.csv", counter_rows(results))
    point = points[min(cal.classification_scale_index, len(points) - 1)]
    chosen = [(r.workload, r.counters_hms if cal.classification_design.value == "HMS"
               else r.counters_ums)
              for r in results if r.scale_point == point]
    write_counters(out / "classification_counters.csv", chosen)
    log.info("wrote %d cells to %s", len(results), out)
    return 0


def classify_rows(path: str | Path, cal: Calibration) -> list[list[str]]:
    samples = ingest_counters(path)
    if not samples:
        raise CounterFormatError(f"{path}: no samples")
    ranked = rank_benefit([classify(s, cal.thresholds, label) for label, s in samples])
    return [[c.label, *c.labels, str(c.benefit_rank)] for c in ranked]


def cmd_classify(args) -> int:
    cal = Calibration.load(args.calibration)
    rows = classify_rows(args.counters, cal)
    header = ["label", "regularity", "locality", "cpu_intensity", "benefit_rank"]
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        fh = open(Path(args.out) / "classification.csv", "w", newline="")
    else:
        fh = sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    return 0


def read_results(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RESULTS_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise ReportError(f"{path}: missing column(s) {', '.join(missing)}")
        return list(reader)


def build_report(rows: list[dict]) -> tuple[dict[str, list[tuple]], list[tuple]]:
    """Per-workload plot rows and a max-improvement summary."""
    cells: dict[tuple[str, str], dict] = {}
    order: dict[str, list[str]] = defaultdict(list)
    for r in rows:
        key = (r["workload"], r["scale_label"])
        if key not in cells:
            cells[key] = {}
            order[r["workload"]].append(r["scale_label"])
        cell = cells[key]
        cell[r["design"]] = float(r["perf_per_process"])
        if r["design"] == "HMS":
            cell["improvement"] = float(r["improvement"])
    plots, summary = {}, []
    for wl, labels in order.items():
        pts = []
        for lab in labels:
            c = cells[(wl, lab)]
            if "HMS" not in c or "UMS" not in c:
                raise ReportError(f"{wl} {lab}: needs both an HMS and a UMS row")
            pts.append((lab, c["HMS"], c["UMS"], c["improvement"]))
        plots[wl] = pts
        best = max(pts, key=lambda p: p[3])
        summary.append((wl, best[3], best[0]))
    return plots, summary


def cmd_report(args) -> int:
    plots, summary = build_report(read_results(args.results))
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for wl, pts in plots.items():
        with open(out / f"plot_{wl}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(PLOT_HEADER)
            for lab, h, u, imp in pts:
                w.writerow([lab, fmt(h), fmt(u), fmt(imp)])
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["workload", "max_improvement", "at_scale"])
        for wl, imp, lab in summary:
            w.writerow([wl, fmt(imp), lab])
    for wl, imp, lab in summary:
        print(f"{wl:10s} max improvement {imp:.3f}x at {lab}")
    return 0


def cmd_calibrate(args) -> int:
    seed = 0 if args.seed is None else args.seed
    cal = calibrate(base_calibration(), seed=seed)
    dest = Path(args.calibration) if args.calibration else Path(args.out or ".") / "calibration.json"
    dest.parent.mkdir(parents=True, exist_ok=True)
    cal.save(dest)
    labels = classification_report(cal, seed)
    for name, got in labels.items():
        status = "ok" if TARGET_LABELS.get(name) == got else "MISMATCH"
        print(f"{name:10s} {'/'.join(got):24s} {status}")
    print(f"wrote {dest}")
    return 0 if all(TARGET_LABELS.get(n) == g for n, g in labels.items()) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridmem", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", metavar="DIR")
        sp.add_argument("--calibration", metavar="PATH")

    s = sub.add_parser("simulate", help="run the HMS-vs-UMS sweep")
    s.add_argument("--config", metavar="PATH")
    common(s)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("classify", help="classify counter samples from a CSV")
    c.add_argument("counters", metavar="COUNTER_CSV")
    common(c)
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("report", help="turn results.csv into plot-data files")
    r.add_argument("results", metavar="RESULTS_CSV")
    common(r)
    r.set_defaults(func=cmd_report)

    k = sub.add_parser("calibrate", help="solve the calibration constants")
    common(k)
    k.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CounterFormatError, ReportError, CellError, OSError,
            ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
