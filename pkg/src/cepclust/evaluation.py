"""Adjusted Rand Index and the circuit-clustering benchmark harness.

The harness regenerates the two-circuit dataset for every repetition,
builds one distance matrix per measure, clusters, cuts at the number of
systems, and scores the partition against the ground truth.  Timings
cover matrix construction plus clustering, never dataset generation.
"""

from __future__ import annotations

import csv
import json
import sys
import time
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy

from . import distances, lti
from .clustering import Partition, cut, hierarchical_cluster, pairwise_matrix
from .errors import AcceptanceFailure, CepclustError, ConfigError, UsageError
from .signals import build_labeled_dataset
from .spectral import WelchConfig, default_config


def _labels(partition) -> np.ndarray:
    if isinstance(partition, Partition):
        return partition.labels
    return np.asarray(partition, dtype=int)


def adjusted_rand_index(p1, p2) -> float:
    """Hubert-Arabie chance-corrected partition agreement.

    Counts pairs of points grouped consistently in both partitions and
    subtracts the value expected from random labelings with the same
    cluster sizes, so guessing scores about 0 and identity scores 1.
    A zero denominator only occurs when both partitions are all-singletons
    or both are a single cluster; either way they are the same partition,
    so that case scores 1.
    """
    a, b = _labels(p1), _labels(p2)
    if len(a) != len(b):
        raise UsageError(f"partitions of lengths {len(a)} and {len(b)} are not comparable")
    if len(a) < 2:
        raise UsageError("ARI needs at least 2 points")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    n_a, n_b = ai.max() + 1, bi.max() + 1
    contingency = np.zeros((n_a, n_b))
    np.add.at(contingency, (ai, bi), 1.0)

    def pairs(x: np.ndarray) -> np.ndarray:
        return x * (x - 1.0) / 2.0

    sum_cells = pairs(contingency).sum()
    sum_rows = pairs(contingency.sum(axis=1)).sum()
    sum_cols = pairs(contingency.sum(axis=0)).sum()
    total = pairs(np.array(float(len(a))))
    expected = sum_rows * sum_cols / total
    denominator = 0.5 * (sum_rows + sum_cols) - expected
    if denominator == 0.0:
        # r(T - c) + c(T - r) = 0 with 0 <= r, c <= T forces r = c = 0
        # (both all-singletons) or r = c = T (both one cluster): the
        # partitions coincide.
        return 1.0
    return float((sum_cells - expected) / denominator)


class CepstralMeasure:
    """Output-cepstrum distance with the cepstrum cached once per pair."""

    name = "cepstral"

    def __init__(self, welch: WelchConfig | None = None):
        self._welch = welch

    def prepare(self, dataset):
        cfg = self._welch or default_config(len(dataset.pairs[0].output))
        from .spectral import power_cepstrum

        return [power_cepstrum(pair.output, cfg).coefficients for pair in dataset.pairs]

    def compute(self, left, right) -> float:
        return distances.weighted_quefrency_gap(left, right)


class ExtendedCepstralMeasure:
    """System-cepstrum (c_y - c_u) distance with cached per-pair cepstra."""

    name = "extended-cepstral"

    def __init__(self, welch: WelchConfig | None = None):
        self._welch = welch

    def prepare(self, dataset):
        cfg = self._welch or default_config(len(dataset.pairs[0].output))
        return [distances.pair_system_cepstrum(pair, cfg) for pair in dataset.pairs]

    def compute(self, left, right) -> float:
        return distances.weighted_quefrency_gap(left, right)


def _standardized(values: np.ndarray) -> np.ndarray:
    """Z-score a series so shape measures compare waveforms, not amplitudes.

    The benchmark's Euclidean/Keogh/DTW columns follow the time-series
    matching convention of comparing standardized series; otherwise the
    two circuits' different output power separates them on loudness alone
    and the shape baselines stop measuring shape.
    """
    centered = values - values.mean()
    spread = centered.std()
    return centered / spread if spread > 0 else centered


class EuclideanMeasure:
    name = "euclidean"

    def prepare(self, dataset):
        return [_standardized(pair.output.values) for pair in dataset.pairs]

    def compute(self, left, right) -> float:
        return distances.d_euclidean(left, right)


class KeoghMeasure:
    """Symmetrized Keogh lower bound with envelopes precomputed per pair."""

    name = "keogh-lb"

    def __init__(self, dtw: distances.DtwConfig | None = None):
        self._dtw = dtw or distances.DtwConfig()

    def prepare(self, dataset):
        features = []
        for pair in dataset.pairs:
            values = _standardized(pair.output.values)
            radius = self._dtw.band_radius(len(values), len(values))
            upper, lower = distances.keogh_envelope(values, radius)
            features.append((values, upper, lower))
        return features

    def compute(self, left, right) -> float:
        forward = distances._envelope_exceedance(left[0], right[1], right[2])
        backward = distances._envelope_exceedance(right[0], left[1], left[2])
        return max(forward, backward)


class DtwMeasure:
    name = "dtw"

    def __init__(self, dtw: distances.DtwConfig | None = None):
        self._dtw = dtw or distances.DtwConfig()

    def prepare(self, dataset):
        return [_standardized(pair.output.values) for pair in dataset.pairs]

    def compute(self, left, right) -> float:
        return distances.d_dtw_exact(left, right, self._dtw)


class ModelNormMeasure:
    """Distance between the ground-truth generating models of two pairs.

    No identification step: each pair's feature is the known model it was
    simulated from.  Pairs sharing a label map to the same model object, so
    the three distinct label combinations are memoized.
    """

    def __init__(self, norm: str):
        if norm not in ("h2", "hinf"):
            raise UsageError(f"model norm must be h2 or hinf, got {norm!r}")
        self.name = norm
        self._norm = norm
        self._memo: dict = {}

    def prepare(self, dataset):
        serialized = dataset.generator_config.get("systems")
        if not serialized:
            raise ConfigError("dataset carries no generating systems; model-norm measures need them")
        systems = [lti.model_from_dict(payload) for payload in serialized]
        return [systems[label] for label in dataset.ground_truth]

    def compute(self, left, right) -> float:
        key = (id(left), id(right))
        if key not in self._memo:
            self._memo[key] = lti.model_distance(left, right, self._norm)
        return self._memo[key]


MEASURES = ("extended-cepstral", "cepstral", "euclidean", "keogh-lb", "dtw", "h2", "hinf")


def make_measure(name: str, welch: WelchConfig | None = None, dtw: distances.DtwConfig | None = None):
    """Instantiate a measure by registry name."""
    if name == "extended-cepstral":
        return ExtendedCepstralMeasure(welch)
    if name == "cepstral":
        return CepstralMeasure(welch)
    if name == "euclidean":
        return EuclideanMeasure()
    if name == "keogh-lb":
        return KeoghMeasure(dtw)
    if name == "dtw":
        return DtwMeasure(dtw)
    if name in ("h2", "hinf"):
        return ModelNormMeasure(name)
    raise UsageError(f"unknown measure {name!r}; known: {', '.join(MEASURES)}")


DEFAULT_SAMPLE_PERIOD = 150.0


def circuit_systems(sample_period: float = DEFAULT_SAMPLE_PERIOD, method: str = "bilinear"):
    """The two discretized reference circuits used by the benchmark."""
    return [
        lti.discretize(lti.circuit_model(lti.S1_COMPONENTS), sample_period, method),
        lti.discretize(lti.circuit_model(lti.S2_COMPONENTS), sample_period, method),
    ]


@dataclass
class ExperimentConfig:
    """Full description of one benchmark sweep."""

    series_lengths: tuple = (256, 1024, 4096)
    repetitions: int = 10
    pairs_per_system: tuple = (10, 5, 5)
    measures: tuple = ("extended-cepstral", "cepstral", "euclidean", "keogh-lb")
    sample_period: float = DEFAULT_SAMPLE_PERIOD
    discretization: str = "bilinear"
    linkage: str = "average"
    welch: WelchConfig | None = None
    dtw: distances.DtwConfig = field(default_factory=distances.DtwConfig)
    master_seed: int = 1000
    threads: int = 1

    def __post_init__(self) -> None:
        self.series_lengths = tuple(int(n) for n in self.series_lengths)
        self.pairs_per_system = tuple(int(c) for c in self.pairs_per_system)
        self.measures = tuple(self.measures)
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        for n in self.series_lengths:
            if n & (n - 1):
                raise ConfigError(f"series length {n} is not a power of two")
            segment = self.welch.segment_length if self.welch else None
            if segment is not None and n < 2 * segment:
                raise ConfigError(f"length {n} is below twice the Welch segment {segment}")
        for name in self.measures:
            if name not in MEASURES:
                raise ConfigError(f"unknown measure {name!r}; known: {', '.join(MEASURES)}")


@dataclass
class ExperimentReport:
    """Per-repetition rows plus per-(measure, length) aggregates."""

    rows: list
    cells: dict
    metadata: dict

    def cell(self, measure: str, length: int) -> dict:
        return self.cells[(measure, int(length))]

    def to_json(self, path) -> None:
        payload = {
            "metadata": self.metadata,
            "cells": [
                {"measure": measure, "length": length, **stats}
                for (measure, length), stats in sorted(self.cells.items())
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["measure", "length", "repetition", "ari", "seconds"])
            for row in self.rows:
                if row.get("error"):
                    continue
                writer.writerow(
                    [row["measure"], row["length"], row["repetition"], repr(row["ari"]), repr(row["seconds"])]
                )


def _aggregate(rows: list) -> dict:
    cells: dict = {}
    keys = {(row["measure"], row["length"]) for row in rows}
    for measure, length in keys:
        cell_rows = [r for r in rows if r["measure"] == measure and r["length"] == length]
        errors = [r["error"] for r in cell_rows if r.get("error")]
        good = [r for r in cell_rows if not r.get("error")]
        stats = {
            "failed": bool(errors),
            "error": errors[0] if errors else None,
            "repetitions": len(cell_rows),
        }
        if good:
            aris = np.array([r["ari"] for r in good])
            seconds = np.array([r["seconds"] for r in good])
            stats.update(
                ari_mean=float(aris.mean()),
                ari_std=float(aris.std()),
                seconds_mean=float(seconds.mean()),
                seconds_std=float(seconds.std()),
                seconds_min=float(seconds.min()),
            )
        cells[(measure, length)] = stats
    return cells


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run the full sweep of the configured benchmark.

    Per repetition the dataset is rebuilt with seed ``master_seed +
    repetition``, so ARI columns are bitwise reproducible for a fixed
    config while every repetition sees fresh draws.  A failing measure
    marks its cell and the sweep continues.
    """
    systems = circuit_systems(cfg.sample_period, cfg.discretization)
    rows = []
    for length in cfg.series_lengths:
        welch = cfg.welch or default_config(length)
        for repetition in range(cfg.repetitions):
            dataset = build_labeled_dataset(
                length, cfg.pairs_per_system, systems, seed=cfg.master_seed + repetition
            )
            for name in cfg.measures:
                row = {"measure": name, "length": length, "repetition": repetition}
                try:
                    measure = make_measure(name, welch=welch, dtw=cfg.dtw)
                    start = time.perf_counter()
                    matrix = pairwise_matrix(dataset, measure, threads=cfg.threads)
                    dendrogram = hierarchical_cluster(matrix, cfg.linkage)
                    partition = cut(dendrogram, len(systems))
                    row["seconds"] = time.perf_counter() - start
                    row["ari"] = adjusted_rand_index(partition, dataset.ground_truth)
                except CepclustError as exc:
                    row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)

    metadata = {
        "config": {
            **{k: v for k, v in asdict(cfg).items() if k not in ("welch", "dtw")},
            "welch": asdict(cfg.welch) if cfg.welch else "per-length default",
            "dtw": asdict(cfg.dtw),
        },
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "notes": [
            "timings cover distance-matrix construction and clustering; dataset generation is excluded",
            "euclidean/keogh-lb/dtw columns compare z-scored output series (shape, not amplitude)",
        ],
    }
    if any(name in ("h2", "hinf") for name in cfg.measures):
        metadata["notes"].append(
            "model-norm (known models): h2/hinf columns use the ground-truth generating systems, no identification"
        )
    return ExperimentReport(rows, _aggregate(rows), metadata)


def timing_scaling_check(report: ExperimentReport, measure: str) -> list:
    """Consecutive wall-clock ratios of one measure over doubling lengths.

    Uses the fastest repetition per cell, which is the usual way to damp
    scheduler noise in scaling measurements.  Requires at least three
    consecutive doubling lengths in the report.
    """
    lengths = sorted(length for (name, length), stats in report.cells.items() if name == measure and not stats["failed"])
    if len(lengths) < 3 or any(b != 2 * a for a, b in zip(lengths, lengths[1:])):
        raise UsageError(f"need >= 3 consecutive doubling lengths for {measure}, got {lengths}")
    best = [report.cell(measure, length)["seconds_min"] for length in lengths]
    return [later / earlier for earlier, later in zip(best, best[1:])]


# Bound templates applied by `benchmark --check`: the headline measure must
# recover the generating systems exactly, series-shape baselines must stay
# at chance level, and the known-model norms must stay near perfect.
def report_checks(report: ExperimentReport) -> list:
    checks = []
    for (measure, length), stats in sorted(report.cells.items()):
        label = f"{measure} @ N={length}"
        if stats["failed"]:
            checks.append((label, False, f"cell failed: {stats['error']}"))
            continue
        mean, std = stats.get("ari_mean"), stats.get("ari_std")
        if measure == "extended-cepstral":
            ok = mean == 1.0 and std == 0.0
            checks.append((label, ok, f"ARI mean {mean} std {std}, need exactly 1.0 / 0.0"))
        elif measure in ("cepstral", "euclidean", "keogh-lb"):
            ok = abs(mean) <= 0.05
            checks.append((label, ok, f"|ARI mean| = {abs(mean):.4f}, bound 0.05"))
        elif measure == "h2":
            ok = mean == 1.0
            checks.append((label, ok, f"ARI mean {mean}, need exactly 1.0"))
        elif measure == "hinf":
            ok = mean >= 0.9
            checks.append((label, ok, f"ARI mean {mean}, bound >= 0.9"))
    return checks


def assert_report_checks(report: ExperimentReport) -> list:
    """Raise AcceptanceFailure if any check fails; return the check list."""
    checks = report_checks(report)
    failed = [f"{label}: {detail}" for label, ok, detail in checks if not ok]
    if failed:
        raise AcceptanceFailure("; ".join(failed))
    return checks


PRESETS = {
    "desk": ExperimentConfig(
        series_lengths=(256, 1024, 4096),
        repetitions=10,
        pairs_per_system=(10, 5, 5),
        measures=("extended-cepstral", "cepstral", "euclidean", "keogh-lb", "h2", "hinf"),
        master_seed=1000,
    ),
    "paper": ExperimentConfig(
        series_lengths=(64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536),
        repetitions=100,
        pairs_per_system=(100, 50, 50),
        measures=("extended-cepstral", "cepstral", "euclidean", "keogh-lb", "h2", "hinf"),
        master_seed=1000,
    ),
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    base = PRESETS[name]
    return ExperimentConfig(**{k: v for k, v in base.__dict__.items()})
