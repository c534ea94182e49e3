"""Welch power-spectral-density estimation and the power cepstrum.

The power cepstrum of a signal is the inverse Fourier transform of the log
of its power spectral density.  Because the PSD of a filtered signal is the
input PSD times the squared magnitude response, taking logs turns that
product into a sum, and the cepstrum of the output splits into input part
plus system part.  Everything downstream builds on that additivity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CepclustError, ConfigError, LengthError, ValidationError
from .signals import series_values

_WINDOWS = ("hann", "hamming", "rectangular")


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def default_segment_length(n: int) -> int:
    """Welch segment rule: ``min(256, largest power of two <= n / 4)``.

    Keeps at least a handful of averaged segments for short series while
    capping the cepstrum length (and the pairwise comparison cost) for
    long ones.
    """
    if n < 8:
        raise LengthError(f"series of length {n} is too short for spectral estimation")
    return min(256, 2 ** int(np.log2(n // 4)))


@dataclass
class WelchConfig:
    """Parameters of the Welch PSD estimate.

    ``psd_floor`` is relative: bins below ``psd_floor * max(psd)`` are
    clamped there before the log, so spectral nulls cannot produce -inf.
    """

    segment_length: int
    overlap_fraction: float = 0.5
    window: str = "hann"
    psd_floor: float = 1e-12

    def __post_init__(self) -> None:
        if not _is_power_of_two(self.segment_length):
            raise ConfigError(f"segment_length must be a power of two, got {self.segment_length}")
        if not 0.0 <= self.overlap_fraction < 1.0:
            raise ConfigError(f"overlap_fraction must be in [0, 1), got {self.overlap_fraction}")
        if self.window not in _WINDOWS:
            raise ConfigError(f"window must be one of {_WINDOWS}, got {self.window!r}")
        if self.psd_floor <= 0:
            raise ConfigError("psd_floor must be positive")

    @property
    def step(self) -> int:
        """Hop size between segment starts (overlap rounded down to samples)."""
        return self.segment_length - int(self.overlap_fraction * self.segment_length)


def default_config(n: int, **overrides) -> WelchConfig:
    """WelchConfig with the default segment rule applied for series length ``n``."""
    overrides.setdefault("segment_length", default_segment_length(n))
    return WelchConfig(**overrides)


@dataclass
class PowerSpectrum:
    """Two-sided PSD over ``segment_length`` frequency bins."""

    values: np.ndarray
    segment_length: int

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != self.segment_length:
            raise ValidationError("PSD length must equal segment_length")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValidationError("PSD bins must be finite and nonnegative")


@dataclass
class Cepstrum:
    """Real cepstrum coefficients c(0) .. c(L-1), L = segment_length."""

    coefficients: np.ndarray

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if not np.all(np.isfinite(self.coefficients)):
            raise ValidationError("cepstrum coefficients must be finite")

    def __len__(self) -> int:
        return len(self.coefficients)


def fft(values, inverse: bool = False, pad: bool = False) -> np.ndarray:
    """Discrete Fourier transform restricted to power-of-two lengths.

    With ``pad=True`` the input is zero-extended to the next power of two;
    otherwise a non-power-of-two length raises.  The inverse transform is
    normalized by 1/L.
    """
    values = np.asarray(values)
    n = len(values)
    if n == 0:
        raise LengthError("cannot transform an empty sequence")
    if not _is_power_of_two(n):
        if not pad:
            raise LengthError(f"length {n} is not a power of two (pass pad=True to zero-pad)")
        target = 1 << (n - 1).bit_length()
        values = np.concatenate([values, np.zeros(target - n, dtype=values.dtype)])
    return np.fft.ifft(values) if inverse else np.fft.fft(values)


def _window(name: str, length: int) -> np.ndarray:
    k = np.arange(length)
    if name == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / length)
    if name == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / length)
    return np.ones(length)


def welch_psd(series, cfg: WelchConfig) -> PowerSpectrum:
    """Average of windowed periodograms over overlapping segments.

    Normalized by the window power so that unit-variance white noise gives
    a PSD of about 1 in every bin.
    """
    x = series_values(series)
    seg = cfg.segment_length
    if len(x) < seg:
        raise ConfigError(f"series length {len(x)} is shorter than segment_length {seg}")
    step = cfg.step
    n_segments = (len(x) - seg) // step + 1
    window = _window(cfg.window, seg)
    starts = step * np.arange(n_segments)
    offsets = np.arange(seg)
    # Accumulate in fixed-size chunks: keeps the working set cache-resident,
    # so runtime stays linear in the series length.
    accumulator = np.zeros(seg // 2 + 1)
    for chunk in range(0, n_segments, 64):
        segments = x[starts[chunk:chunk + 64, None] + offsets[None, :]]
        accumulator += (np.abs(np.fft.rfft(segments * window, axis=1)) ** 2).sum(axis=0)
    half = accumulator / (n_segments * np.sum(window**2))
    # Real input makes the spectrum conjugate-even; mirror the rfft half
    # into the full two-sided PSD.
    psd = np.concatenate([half, half[-2:0:-1]])
    return PowerSpectrum(psd, seg)


def power_cepstrum(series, cfg: WelchConfig) -> Cepstrum:
    """Inverse transform of the log PSD, floored to keep the log finite.

    The inverse transform of a real, even spectrum is real up to rounding;
    an imaginary residue above 1e-9 would indicate a broken estimate and
    raises instead of being discarded silently.
    """
    psd = welch_psd(series, cfg).values
    floored = np.maximum(psd, cfg.psd_floor * psd.max())
    complex_cepstrum = np.fft.ifft(np.log(floored))
    residue = np.max(np.abs(complex_cepstrum.imag))
    if residue > 1e-9:
        raise CepclustError(f"cepstrum imaginary residue {residue:.3e} exceeds 1e-9")
    return Cepstrum(complex_cepstrum.real)
