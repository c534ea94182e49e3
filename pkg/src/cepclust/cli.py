"""Command-line interface: generate, simulate, distance, cluster, benchmark.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 benchmark bound failure under ``--check``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import clustering, evaluation, figures, lti, signals
from .distances import DtwConfig
from .errors import AcceptanceFailure, CepclustError, ConfigError, DataFormatError, UsageError
from .spectral import WelchConfig, default_config


class _Parser(argparse.ArgumentParser):
    """argparse parser whose own errors map to exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _common_flags() -> _Parser:
    common = _Parser(add_help=False)
    group = common.add_argument_group("common options")
    group.add_argument("--seed", type=int, default=1000, help="master random seed (default 1000)")
    group.add_argument("--sample-period", type=float, default=evaluation.DEFAULT_SAMPLE_PERIOD,
                       help="circuit sampling period in seconds (default %(default)s)")
    group.add_argument("--welch-segment", type=int, default=None,
                       help="Welch segment length (default: min(256, N/4) rounded to a power of two)")
    group.add_argument("--welch-overlap", type=float, default=0.5,
                       help="Welch segment overlap fraction (default 0.5)")
    group.add_argument("--window", choices=("hann", "hamming", "rectangular"), default="hann",
                       help="Welch window (default hann)")
    group.add_argument("--dtw-band", type=float, default=0.1,
                       help="Sakoe-Chiba band radius as a fraction of series length (default 0.1)")
    group.add_argument("--linkage", choices=("average", "complete", "single"), default="average",
                       help="agglomeration rule (default average)")
    group.add_argument("--threads", type=int, default=1,
                       help="worker threads for distance matrices (default 1)")
    group.add_argument("--output", default=None,
                       help="output file, or directory for generate/benchmark (default: cwd)")
    group.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="serialization for single-file outputs (default csv)")
    return common


def _welch_from(args, length: int) -> WelchConfig:
    if args.welch_segment is None:
        return default_config(length, overlap_fraction=args.welch_overlap, window=args.window)
    if args.welch_segment > length:
        raise ConfigError(
            f"welch segment {args.welch_segment} does not fit series length {length}"
        )
    return WelchConfig(segment_length=args.welch_segment,
                       overlap_fraction=args.welch_overlap, window=args.window)


def _parse_counts(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--counts expects three comma-separated integers, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"--counts expects integers, got {text!r}") from exc


def _read_series(path) -> np.ndarray:
    """Read a single-series CSV of ``k,value`` rows (header optional)."""
    values = []
    with open(path, newline="") as fh:
        for row_number, row in enumerate(csv.reader(fh), start=1):
            if not row or (row_number == 1 and row[0].strip().lower() == "k"):
                continue
            if len(row) != 2:
                raise DataFormatError(f"{path}:{row_number}: expected k,value got {len(row)} fields")
            try:
                values.append(float(row[1]))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{row_number}: bad value {row[1]!r}") from exc
    if not values:
        raise DataFormatError(f"{path}: no samples found")
    return np.array(values)


def _write_series(values, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "value"])
        for k, value in enumerate(np.asarray(values, dtype=float)):
            writer.writerow([k, repr(float(value))])


def cmd_generate(args) -> int:
    counts = _parse_counts(args.counts)
    if args.welch_segment is not None and args.welch_segment > args.length:
        raise ConfigError(
            f"welch segment {args.welch_segment} does not fit series length {args.length}"
        )
    systems = evaluation.circuit_systems(args.sample_period, args.discretization)
    dataset = signals.build_labeled_dataset(args.length, counts, systems, seed=args.seed)
    directory = Path(args.output or ".")
    signals.save_dataset(dataset, directory)
    kinds = dict(zip(("lti", "multisine", "noise"), counts))
    print(f"wrote {len(dataset.pairs)} pairs of length {args.length} to {directory}")
    print(f"  systems: {len(systems)} ({args.systems}), inputs per system: {kinds}")
    print(f"  seed {args.seed}, sample period {args.sample_period}, {args.discretization} discretization")
    return 0


def cmd_simulate(args) -> int:
    model = lti.load_model(args.model)
    u = _read_series(args.input)
    y = lti.simulate(model, u)
    out = Path(args.output or "output.csv")
    _write_series(y.values, out)
    print(f"simulated {len(u)} samples through order-{model.order} model -> {out}")
    return 0


_SERIES_MEASURES = ("euclidean", "dtw", "keogh-lb", "cepstral")


def _series_distance(args) -> float:
    from . import distances

    a, b = _read_series(args.series[0]), _read_series(args.series[1])
    if args.measure not in _SERIES_MEASURES:
        raise UsageError(f"measure {args.measure!r} needs a dataset (input/output pairs); "
                         f"bare series support: {', '.join(_SERIES_MEASURES)}")
    dtw_cfg = DtwConfig(band_radius_fraction=args.dtw_band)
    if args.measure == "euclidean":
        return distances.d_euclidean(a, b)
    if args.measure == "dtw":
        return distances.d_dtw_exact(a, b, dtw_cfg)
    if args.measure == "keogh-lb":
        return distances.lb_keogh(a, b, dtw_cfg)
    welch = _welch_from(args, min(len(a), len(b)))
    return distances.cepstral_distance(a, b, welch)


def cmd_distance(args) -> int:
    if args.series:
        print(_series_distance(args))
        return 0
    if not args.dataset:
        raise UsageError("distance needs --dataset DIR or --series A.csv B.csv")
    dataset = signals.load_dataset(args.dataset)
    length = len(dataset.pairs[0].output)
    measure = evaluation.make_measure(
        args.measure, welch=_welch_from(args, length), dtw=DtwConfig(band_radius_fraction=args.dtw_band)
    )
    if args.pair is not None:
        i, j = args.pair
        if not (0 <= i < len(dataset.pairs) and 0 <= j < len(dataset.pairs)):
            raise UsageError(f"pair indices ({i}, {j}) out of range for {len(dataset.pairs)} pairs")
        features = measure.prepare(dataset)
        print(measure.compute(features[i], features[j]))
        return 0
    matrix = clustering.pairwise_matrix(dataset, measure, threads=args.threads)
    out = Path(args.output or "matrix.csv")
    if args.format == "json":
        with open(out, "w") as fh:
            json.dump({"measure": args.measure, "entries": matrix.entries.tolist()}, fh)
    else:
        clustering.save_matrix(matrix, out)
    print(f"wrote {matrix.n}x{matrix.n} {args.measure} matrix to {out}")
    return 0


def cmd_cluster(args) -> int:
    matrix = clustering.load_matrix(args.matrix)
    dendrogram = clustering.hierarchical_cluster(matrix, args.linkage)
    partition = clustering.cut(dendrogram, args.clusters)
    pair_ids = [f"p{i:04d}" for i in range(matrix.n)]
    truth = None
    if args.manifest:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        entries = manifest.get("pairs", [])
        if len(entries) != matrix.n:
            raise DataFormatError(
                f"manifest lists {len(entries)} pairs but matrix has {matrix.n} rows"
            )
        pair_ids = [entry["pair_id"] for entry in entries]
        truth = [int(entry["label"]) for entry in entries]
    out = Path(args.output or "partition.csv")
    if args.format == "json":
        with open(out, "w") as fh:
            json.dump({"pairs": [{"pair_id": p, "label": int(l)}
                                 for p, l in zip(pair_ids, partition.labels)]}, fh)
    else:
        clustering.save_partition(partition, pair_ids, out)
    print(f"wrote {args.clusters}-cluster partition of {matrix.n} series to {out}")
    if truth is not None:
        print(f"ARI {evaluation.adjusted_rand_index(partition, truth)}")
    return 0


def _parse_int_list(text: str, flag: str) -> tuple:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from exc


def cmd_benchmark(args) -> int:
    cfg = evaluation.preset_config(args.preset)
    cfg.master_seed = args.seed
    cfg.sample_period = args.sample_period
    cfg.linkage = args.linkage
    cfg.threads = args.threads
    cfg.dtw = DtwConfig(band_radius_fraction=args.dtw_band)
    if args.lengths:
        cfg.series_lengths = _parse_int_list(args.lengths, "--lengths")
    if args.reps:
        cfg.repetitions = args.reps
    if args.counts:
        cfg.pairs_per_system = _parse_counts(args.counts)
    if args.measures:
        cfg.measures = tuple(args.measures.split(","))
    if args.welch_segment is not None:
        cfg.welch = WelchConfig(segment_length=args.welch_segment,
                                overlap_fraction=args.welch_overlap, window=args.window)
    cfg.__post_init__()

    report = evaluation.run_experiment(cfg)
    directory = Path(args.output or ".")
    directory.mkdir(parents=True, exist_ok=True)
    report.to_json(directory / "report.json")
    report.to_csv(directory / "report.csv")
    written = [directory / "report.json", directory / "report.csv"]
    if not args.no_figures:
        written += figures.render_report(report, directory)
    for (measure, length), stats in sorted(report.cells.items()):
        if stats["failed"]:
            print(f"  {measure:18s} N={length:6d}  FAILED  {stats['error']}")
        else:
            print(f"  {measure:18s} N={length:6d}  ARI {stats['ari_mean']:+.4f} "
                  f"± {stats['ari_std']:.4f}  {stats['seconds_mean']:.3f}s")
    print("wrote " + ", ".join(str(p) for p in written))
    if args.check:
        checks = evaluation.report_checks(report)
        for label, ok, detail in checks:
            print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        failed = [label for label, ok, _ in checks if not ok]
        if failed:
            raise AcceptanceFailure(f"{len(failed)} benchmark bound(s) failed: {', '.join(failed)}")
    return 0


def build_parser() -> _Parser:
    common = _common_flags()
    parser = _Parser(prog="cepclust",
                     description="Cluster input/output time series by generating-system dynamics.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", parents=[common],
                       help="simulate a labeled circuit dataset to series.csv + manifest.json")
    p.add_argument("--systems", choices=("rlc-circuits",), default="rlc-circuits",
                   help="generating-system family (default rlc-circuits)")
    p.add_argument("--counts", default="10,5,5",
                   help="LTI,multisine,noise inputs per system (default 10,5,5)")
    p.add_argument("--length", type=int, required=True, help="series length (power of two)")
    p.add_argument("--discretization", choices=("bilinear", "zoh"), default="bilinear",
                   help="continuous-to-discrete method (default bilinear)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", parents=[common],
                       help="drive a saved state-space model with an input series")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--input", required=True, help="input series CSV (k,value)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("distance", parents=[common],
                       help="distance matrix for a dataset, one pair, or two bare series")
    p.add_argument("--measure", choices=evaluation.MEASURES, default="extended-cepstral",
                   help="distance measure (default extended-cepstral)")
    p.add_argument("--dataset", help="directory with series.csv + manifest.json")
    p.add_argument("--pair", nargs=2, type=int, metavar=("I", "J"),
                   help="print the distance between dataset pairs I and J")
    p.add_argument("--series", nargs=2, metavar=("A", "B"),
                   help="two series CSVs; print their distance")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("cluster", parents=[common],
                       help="agglomerative clustering of a saved distance matrix")
    p.add_argument("--matrix", required=True, help="distance-matrix CSV")
    p.add_argument("-k", "--clusters", type=int, required=True, help="number of clusters")
    p.add_argument("--manifest", help="dataset manifest; prints ARI against its labels")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("benchmark", parents=[common],
                       help="run the clustering benchmark and write report + figures")
    p.add_argument("--preset", choices=tuple(evaluation.PRESETS), default="desk",
                   help="experiment scale (default desk; paper = 400 pairs, 2^6..2^16, 100 reps)")
    p.add_argument("--lengths", help="override series lengths, comma-separated")
    p.add_argument("--reps", type=int, help="override repetition count")
    p.add_argument("--counts", help="override LTI,multisine,noise counts per system")
    p.add_argument("--measures", help="override measure list, comma-separated")
    p.add_argument("--check", action="store_true",
                   help="verify the report against its reference bounds; exit 3 on failure")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CepclustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
