"""Time-series containers, input-signal generators, and dataset assembly.

All randomness flows through a counter-based Philox generator keyed by
explicit integer seeds, with Gaussian variates produced by a fixed
Box-Muller construction.  This keeps every generated signal bitwise
reproducible for a given seed, independent of platform and call order.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .errors import DataFormatError, LengthError, ValidationError

# Stream tags keep the independent random streams of one seed apart.
# The additive-noise stream is shared by gen_white_noise and gen_multisine
# so that a component-free multisine degenerates to the same samples.
_STREAM_NOISE = 11
_STREAM_MODEL = 12
_STREAM_DRIVE = 13
_STREAM_PARAMS = 14

DEFAULT_POLE_RADIUS = 0.7
DEFAULT_RESPONSE_BOUND = 8.0

_MODEL_CHECK_GRID = np.exp(1j * np.linspace(0.0, np.pi, 512))


def make_rng(seed: int, *streams: int) -> np.random.Generator:
    """Return a Philox generator for the given seed and stream tags.

    Philox is counter based, so generators for distinct ``(seed, streams)``
    keys are statistically independent and reproducible everywhere.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, streams)])))


def _normals(n: int, rng: np.random.Generator) -> np.ndarray:
    """Standard normal samples via Box-Muller on uniform doubles.

    Spelled out rather than delegated to the generator's own ``normal`` so
    the construction is pinned down: ``u1`` is mapped to ``1 - u1`` to keep
    the logarithm away from zero.
    """
    m = (n + 1) // 2
    u1 = 1.0 - rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * m)
    out[0::2] = r * np.cos(2.0 * np.pi * u2)
    out[1::2] = r * np.sin(2.0 * np.pi * u2)
    return out[:n]


@dataclass
class TimeSeries:
    """A finite, uniformly sampled real-valued signal.

    Parameters
    ----------
    values : array_like
        The samples.  Must be one-dimensional, finite, and of length >= 2.
    sample_period : float, optional
        Seconds between samples.  Metadata only; no operation resamples.
    """

    values: np.ndarray
    sample_period: float = 1.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValidationError("TimeSeries values must be one-dimensional")
        if len(self.values) < 2:
            raise LengthError(f"TimeSeries needs at least 2 samples, got {len(self.values)}")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("TimeSeries values must be finite")
        if self.sample_period <= 0:
            raise ValidationError("sample_period must be positive")

    def __len__(self) -> int:
        return len(self.values)


def series_values(series) -> np.ndarray:
    """Return the sample array of a TimeSeries or of a bare array."""
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float)


@dataclass
class IOPair:
    """One input/output pair produced by a single system."""

    input: TimeSeries
    output: TimeSeries
    pair_id: str

    def __post_init__(self) -> None:
        if len(self.input) != len(self.output):
            raise ValidationError(
                f"input length {len(self.input)} != output length {len(self.output)} within one pair"
            )


@dataclass
class LabeledDataset:
    """A sequence of IO pairs with ground-truth generating-system labels."""

    pairs: list
    ground_truth: np.ndarray
    generator_config: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.ground_truth = np.asarray(self.ground_truth, dtype=int)
        if len(self.pairs) != len(self.ground_truth):
            raise ValidationError("one ground-truth label per pair is required")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def sample_period(self) -> float:
        return self.pairs[0].input.sample_period if self.pairs else 1.0


def gen_white_noise(n: int, std: float, seed: int) -> TimeSeries:
    """Gaussian white noise: ``n`` i.i.d. samples of mean 0 and the given std."""
    if n < 2:
        raise LengthError(f"need n >= 2, got {n}")
    if std <= 0:
        raise ValidationError(f"std must be positive, got {std}")
    return TimeSeries(std * _normals(n, make_rng(seed, _STREAM_NOISE)))


def gen_multisine(n: int, components, noise_std: float, seed: int | None = None) -> TimeSeries:
    """Sum of sinusoids plus optional Gaussian noise.

    Parameters
    ----------
    components : sequence of (frequency, amplitude, phase)
        Frequencies in cycles per sample, each strictly inside (0, 0.5).
    noise_std : float
        Standard deviation of the additive noise; 0 disables it.  The noise
        uses the same construction as :func:`gen_white_noise`, so a
        component-free multisine equals the white-noise series of the same
        seed and std sample for sample.
    """
    if n < 2:
        raise LengthError(f"need n >= 2, got {n}")
    if noise_std < 0:
        raise ValidationError("noise_std must be nonnegative")
    for freq, _amp, _phase in components:
        if not 0.0 < freq < 0.5:
            raise ValidationError(f"component frequency {freq} outside (0, 0.5)")
    if noise_std > 0:
        if seed is None:
            raise ValidationError("a seed is required when noise_std > 0")
        values = noise_std * _normals(n, make_rng(seed, _STREAM_NOISE))
    else:
        values = np.zeros(n)
    k = np.arange(n)
    for freq, amp, phase in components:
        values = values + amp * np.sin(2.0 * np.pi * freq * k + phase)
    return TimeSeries(values)


def draw_input_model(
    order: int,
    seed: int,
    pole_radius: float = DEFAULT_POLE_RADIUS,
    response_bound: float = DEFAULT_RESPONSE_BOUND,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw a random stable transfer function ``(b, a)`` of the given order.

    Poles come in conjugate pairs drawn uniformly from the disk of radius
    ``pole_radius`` (plus one real pole for odd orders); the ``order - 1``
    zeros are drawn the same way.  A draw is accepted only if its log
    magnitude response stays within ``+-response_bound`` (natural log of
    power, about +-35 dB at the default) on a 512-point frequency grid.
    Rejected draws are retried with a fresh stream, so the result is still
    a pure function of ``(order, seed)``.

    The bound matters: clustering by input/output spectra needs the input
    to excite every frequency band, and an unconstrained random model can
    stack zeros into an arbitrarily deep notch that leaves the band
    around it unobservable.
    """
    if order < 1:
        raise ValidationError(f"order must be >= 1, got {order}")
    if not 0.0 < pole_radius < 1.0:
        raise ValidationError("pole_radius must be in (0, 1)")
    for attempt in itertools.count():
        rng = make_rng(seed, _STREAM_MODEL, attempt)

        def conj_pairs(npairs: int) -> np.ndarray:
            radii = pole_radius * np.sqrt(rng.random(npairs))
            angles = np.pi * rng.random(npairs)
            half = radii * np.exp(1j * angles)
            return np.concatenate([half, half.conj()])

        poles = conj_pairs(order // 2)
        if order % 2:
            poles = np.append(poles, rng.uniform(-pole_radius, pole_radius))
        n_zeros = order - 1
        zeros = conj_pairs(n_zeros // 2)
        if n_zeros % 2:
            zeros = np.append(zeros, rng.uniform(-pole_radius, pole_radius))
        b = np.real(np.poly(zeros)) if len(zeros) else np.array([1.0])
        a = np.real(np.poly(poles))
        response = np.polyval(b, _MODEL_CHECK_GRID) / np.polyval(a, _MODEL_CHECK_GRID)
        log_power = 2.0 * np.log(np.abs(response))
        if log_power.min() >= -response_bound and log_power.max() <= response_bound:
            return b, a


def gen_lti_filtered_input(
    n: int,
    order: int,
    seed: int,
    pole_radius: float = DEFAULT_POLE_RADIUS,
    response_bound: float = DEFAULT_RESPONSE_BOUND,
    model: tuple | None = None,
) -> TimeSeries:
    """Output of a random stable LTI model of the given order driven by unit white noise.

    ``model`` is a diagnostic hook: pass an explicit ``(b, a)`` pair to skip
    the random draw (used by tests to force known dynamics).
    """
    if n < 2:
        raise LengthError(f"need n >= 2, got {n}")
    if model is None:
        b, a = draw_input_model(order, seed, pole_radius, response_bound)
    else:
        b, a = (np.asarray(c, dtype=float) for c in model)
    drive = _normals(n, make_rng(seed, _STREAM_DRIVE))
    return TimeSeries(scipy.signal.lfilter(b, a, drive))


def _draw_multisine_components(rng: np.random.Generator) -> list:
    """Random multisine parameters: 3 to 8 components spread over the band."""
    n_comp = int(rng.integers(3, 9))
    comps = []
    for _ in range(n_comp):
        freq = 0.01 + 0.44 * rng.random()
        amp = 0.5 + rng.random()
        phase = 2.0 * np.pi * rng.random()
        comps.append((freq, amp, phase))
    return comps


def build_labeled_dataset(n: int, pairs_per_system, systems, seed: int, input_order: int = 15) -> LabeledDataset:
    """Simulate a labeled dataset: every system responds to fresh input draws.

    Parameters
    ----------
    pairs_per_system : (int, int, int)
        Counts of LTI-filtered, multisine, and white-noise inputs per system.
    systems : sequence of StateSpace
        Discrete-time systems sharing one sample period; the index of a
        pair's system is its ground-truth label.
    seed : int
        Master seed; pair ``i`` uses ``seed * 100003 + i`` so that datasets
        from different master seeds never share input draws.
    """
    from . import lti

    counts = tuple(int(c) for c in pairs_per_system)
    if len(counts) != 3 or any(c < 0 for c in counts):
        raise ValidationError("pairs_per_system must be three nonnegative counts")
    if not systems:
        raise ValidationError("at least one system is required")
    periods = {ss.sample_period for ss in systems}
    if len(periods) > 1:
        raise ValidationError(f"systems must share one sample period, got {sorted(periods)}")
    dt = periods.pop()

    pairs, labels = [], []
    index = 0
    for sys_index, system in enumerate(systems):
        for kind, count in zip(("lti", "multisine", "noise"), counts):
            for _ in range(count):
                pair_seed = seed * 100003 + index
                if kind == "lti":
                    u = gen_lti_filtered_input(n, input_order, pair_seed)
                elif kind == "multisine":
                    comps = _draw_multisine_components(make_rng(pair_seed, _STREAM_PARAMS))
                    u = gen_multisine(n, comps, 0.1, pair_seed)
                else:
                    u = gen_white_noise(n, 1.0, pair_seed)
                u = TimeSeries(u.values, sample_period=dt)
                y = lti.simulate(system, u)
                pairs.append(IOPair(u, y, pair_id=f"p{index:04d}"))
                labels.append(sys_index)
                index += 1

    config = {
        "length": n,
        "pairs_per_system": list(counts),
        "input_order": input_order,
        "input_pole_radius": DEFAULT_POLE_RADIUS,
        "input_response_bound": DEFAULT_RESPONSE_BOUND,
        "seed": seed,
        "sample_period": dt,
        "systems": [lti.model_to_dict(ss) for ss in systems],
    }
    return LabeledDataset(pairs, np.asarray(labels), generator_config=config)


def save_dataset(dataset: LabeledDataset, directory) -> None:
    """Write ``series.csv`` and ``manifest.json`` into the given directory."""
    import pathlib

    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "series.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "role", "k", "value"])
        for pair in dataset.pairs:
            for role, series in (("input", pair.input), ("output", pair.output)):
                for k, value in enumerate(series.values):
                    writer.writerow([pair.pair_id, role, k, repr(float(value))])
    manifest = {
        "pairs": [
            {"pair_id": pair.pair_id, "label": int(label)}
            for pair, label in zip(dataset.pairs, dataset.ground_truth)
        ],
        "sample_period": dataset.sample_period,
        "seed": dataset.generator_config.get("seed"),
        "generator_config": dataset.generator_config,
    }
    with open(directory / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)


def load_dataset(directory) -> LabeledDataset:
    """Read a dataset previously written by :func:`save_dataset`."""
    import pathlib

    directory = pathlib.Path(directory)
    manifest_path = directory / "manifest.json"
    series_path = directory / "series.csv"
    if not manifest_path.exists() or not series_path.exists():
        raise DataFormatError(f"no dataset at {directory} (need series.csv and manifest.json)")
    with open(manifest_path) as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"unparseable manifest {manifest_path}: {exc}") from exc

    dt = float(manifest.get("sample_period", 1.0))
    collected: dict[str, dict[str, list]] = {}
    with open(series_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["pair_id", "role", "k", "value"]:
            raise DataFormatError(f"unexpected series header {header} in {series_path}")
        for row_number, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise DataFormatError(f"{series_path} row {row_number}: expected 4 columns, got {len(row)}")
            pair_id, role, _k, value = row
            if role not in ("input", "output"):
                raise DataFormatError(f"{series_path} row {row_number}: unknown role {role!r}")
            try:
                collected.setdefault(pair_id, {"input": [], "output": []})[role].append(float(value))
            except ValueError as exc:
                raise DataFormatError(f"{series_path} row {row_number}: bad value {value!r}") from exc

    pairs, labels = [], []
    for entry in manifest["pairs"]:
        pair_id = entry["pair_id"]
        if pair_id not in collected:
            raise DataFormatError(f"manifest pair {pair_id} has no rows in {series_path}")
        data = collected[pair_id]
        pairs.append(
            IOPair(
                TimeSeries(np.asarray(data["input"]), sample_period=dt),
                TimeSeries(np.asarray(data["output"]), sample_period=dt),
                pair_id=pair_id,
            )
        )
        labels.append(int(entry["label"]))
    return LabeledDataset(pairs, np.asarray(labels), generator_config=manifest.get("generator_config") or {})
