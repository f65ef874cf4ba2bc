"""Receiver side: signal extraction, sync, level estimation, symbol decisions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import _warp_unit
from .core import (
    Color,
    ModulationParams,
    SymbolSeries,
    symbols_to_bits,
    to_unit,
    validate_frames,
)
from .encoder import CRC_BITS, LENGTH_BITS, crc32_bits, preamble_bits, preamble_symbols

# A preamble correlation below this is indistinguishable from scanning noise.
MIN_SYNC_CORRELATION = 0.5
# Payloads may replicate the preamble pattern, producing a second correlation
# peak mid-frame. The true start is the earliest peak, so any offset within
# this margin of the best counts as a candidate and the earliest one wins.
SYNC_PEAK_TOLERANCE = 0.1


class SyncError(RuntimeError):
    """No capture offset aligned with the preamble pattern."""


class DegenerateLevelsError(RuntimeError):
    """Preamble level estimates collapsed; the signal carries no usable swing."""


class FramingError(ValueError):
    """Decoded bitstream is too short for the declared frame layout."""


@dataclass(frozen=True)
class SyncResult:
    offset: int
    frames_per_symbol: float


@dataclass(frozen=True)
class LevelEstimate:
    """Amplitudes learned from the preamble.

    mu0/mu1 are the bottom and top symbol amplitudes, sigma the pooled
    per-sample noise deviation. level_means interpolates all m symbol
    amplitudes; thresholds holds the m-1 midpoint decision boundaries.
    """

    mu0: float
    mu1: float
    sigma: float
    level_means: np.ndarray
    thresholds: np.ndarray


@dataclass(frozen=True)
class DecodeReport:
    payload: np.ndarray
    series: SymbolSeries
    sync: SyncResult
    levels: LevelEstimate
    symbols: np.ndarray
    crc_ok: bool
    ber_vs_reference: float | None = None


def extract_signal(frames: np.ndarray, homography: np.ndarray | None = None,
                   region: tuple[int, int, int, int] | None = None,
                   channel: Color = Color.RED,
                   sample_rate: float = 1.0) -> SymbolSeries:
    """Reduce captured frames to one amplitude sample per frame.

    homography is the forward display-to-sensor mapping the channel applied;
    when given, each capture is rectified back into display coordinates before
    measuring (a rectified pixel at display position p is pulled from sensor
    position H p). region is an (x, y, w, h) crop in the rectified frame; by
    default the whole frame is averaged.
    """
    arr = validate_frames(frames)
    crop = None
    if region is not None:
        x, y, w, h = (int(v) for v in region)
        if w < 1 or h < 1:
            raise ValueError(f"region must have positive size, got {region}")
        if x < 0 or y < 0 or y + h > arr.shape[1] or x + w > arr.shape[2]:
            raise ValueError(f"region {region} falls outside frames of shape "
                             f"{arr.shape[1:3]}")
        crop = (x, y, w, h)
    rectify = None
    if homography is not None:
        rectify = np.asarray(homography, dtype=np.float64)
        if rectify.shape != (3, 3):
            raise ValueError(f"homography must be 3x3, got shape {rectify.shape}")
        if abs(np.linalg.det(rectify)) < 1e-12:
            raise ValueError("homography is singular")
        # An identity mapping resamples every pixel from itself; skip it.
        if np.allclose(rectify / rectify[2, 2], np.eye(3), atol=1e-12):
            rectify = None
    values = np.empty(arr.shape[0], dtype=np.float64)
    for k in range(arr.shape[0]):
        unit = to_unit(arr[k])
        if rectify is not None:
            unit = _warp_unit(unit, rectify)
        if crop is not None:
            x, y, w, h = crop
            unit = unit[y:y + h, x:x + w]
        values[k] = unit[:, :, int(channel)].mean()
    return SymbolSeries(values, sample_rate)


def received_frames_per_symbol(params: ModulationParams, camera_fps: float) -> float:
    """Capture frames spanned by one symbol."""
    return camera_fps * params.symbol_duration_frames / params.frame_rate


def synchronize(series: SymbolSeries, params: ModulationParams,
                camera_fps: float) -> SyncResult:
    """Locate the preamble by sliding a +/-1 alternating template over the trace.

    Candidate offsets correlate within SYNC_PEAK_TOLERANCE of the best Pearson
    correlation; the earliest candidate wins, which keeps alternating payloads
    from being mistaken for the preamble. Raises SyncError when the trace is
    shorter than one preamble or the best correlation stays below
    MIN_SYNC_CORRELATION.
    """
    r = received_frames_per_symbol(params, camera_fps)
    template_len = math.ceil(len(preamble_symbols(params)) * r)
    values = series.values
    if len(values) < template_len:
        raise SyncError(f"trace of {len(values)} samples is shorter than the "
                        f"{template_len}-sample preamble")

    # Sample k sits at time (k + 0.5) capture periods, hence the half-sample
    # shift when assigning samples to template symbols.
    symbol_of = np.floor((np.arange(template_len) + 0.5) / r).astype(np.int64)
    template = np.where(symbol_of % 2 == 0, 1.0, -1.0)
    t_centered = template - template.mean()
    t_norm = float(np.sqrt(np.sum(t_centered**2)))
    if t_norm == 0.0:
        raise SyncError("degenerate preamble template")

    windows = np.lib.stride_tricks.sliding_window_view(values, template_len)
    centered = windows - windows.mean(axis=1, keepdims=True)
    w_norm = np.sqrt(np.sum(centered**2, axis=1))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = (centered @ t_centered) / (w_norm * t_norm)
    corr[~np.isfinite(corr)] = -np.inf

    peak = float(corr.max())
    if peak < MIN_SYNC_CORRELATION:
        raise SyncError(f"best preamble correlation {peak:.3f} below "
                        f"{MIN_SYNC_CORRELATION}; no transmission found")
    cutoff = max(MIN_SYNC_CORRELATION, peak - SYNC_PEAK_TOLERANCE)
    earliest = int(np.nonzero(corr >= cutoff)[0][0])
    return SyncResult(offset=earliest, frames_per_symbol=r)


def _symbol_sample_indices(sync: SyncResult, symbol: int, n_samples: int) -> np.ndarray:
    """Capture-sample indices in the central half of one symbol period.

    Edge samples may straddle a display-frame boundary, so decisions use the
    middle 50 percent. Falls back to the single nearest-center sample when the
    window rounds to nothing.
    """
    r = sync.frames_per_symbol
    start = sync.offset + (symbol + 0.25) * r
    stop = sync.offset + (symbol + 0.75) * r
    indices = np.arange(math.ceil(start), math.ceil(stop))
    if indices.size == 0:
        indices = np.array([math.floor(sync.offset + (symbol + 0.5) * r)])
    return indices[(indices >= 0) & (indices < n_samples)]


def estimate_levels(series: SymbolSeries, sync: SyncResult,
                    params: ModulationParams) -> LevelEstimate:
    """Learn symbol amplitudes from the alternating preamble.

    The m per-symbol means are interpolated between the measured top and
    bottom amplitudes; sigma pools the within-symbol sample deviations.
    """
    values = series.values
    n_preamble = len(preamble_symbols(params))
    means = np.empty(n_preamble)
    residuals = []
    for j in range(n_preamble):
        idx = _symbol_sample_indices(sync, j, len(values))
        if idx.size == 0:
            raise DegenerateLevelsError(f"preamble symbol {j} has no samples")
        samples = values[idx]
        means[j] = samples.mean()
        residuals.append(samples - means[j])
    mu1 = float(means[0::2].mean())
    mu0 = float(means[1::2].mean())
    if not mu1 > mu0:
        raise DegenerateLevelsError(f"top amplitude {mu1:.6g} does not exceed "
                                    f"bottom amplitude {mu0:.6g}")
    pooled = np.concatenate(residuals)
    dof = pooled.size - n_preamble
    sigma = float(np.sqrt(np.sum(pooled**2) / dof)) if dof > 0 else 0.0
    level_means = mu0 + (mu1 - mu0) * np.arange(params.m) / (params.m - 1)
    thresholds = (level_means[:-1] + level_means[1:]) / 2.0
    return LevelEstimate(mu0=mu0, mu1=mu1, sigma=sigma,
                         level_means=level_means, thresholds=thresholds)


def decide_symbols(series: SymbolSeries, sync: SyncResult, levels: LevelEstimate,
                   params: ModulationParams) -> np.ndarray:
    """Threshold each symbol's central-window mean into a symbol index.

    Values exactly on a threshold resolve to the higher symbol.
    """
    values = series.values
    r = sync.frames_per_symbol
    n_symbols = int(math.floor((len(values) - sync.offset) / r))
    decisions = np.empty(n_symbols, dtype=np.int64)
    for s in range(n_symbols):
        idx = _symbol_sample_indices(sync, s, len(values))
        if idx.size == 0:
            decisions[s] = 0
            continue
        mean = values[idx].mean()
        decisions[s] = int(np.searchsorted(levels.thresholds, mean, side="right"))
    return decisions


def deframe(bits: np.ndarray, params: ModulationParams) -> tuple[np.ndarray, bool]:
    """Split a decoded bitstream into (payload, crc_ok).

    crc_ok requires both an intact preamble and a matching payload CRC. Raises
    FramingError only when the stream is too short to even carry the declared
    layout.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    expected_preamble = preamble_bits(params)
    header_end = expected_preamble.size + LENGTH_BITS
    if bits.size < header_end:
        raise FramingError(f"bitstream of {bits.size} bits is shorter than the "
                           f"{header_end}-bit header")
    preamble_ok = bool(np.array_equal(bits[:expected_preamble.size], expected_preamble))
    length = int(_bits_to_int(bits[expected_preamble.size:header_end]))
    if bits.size < header_end + length + CRC_BITS:
        raise FramingError(f"header declares {length} payload bits but only "
                           f"{bits.size - header_end - CRC_BITS} are present")
    payload = bits[header_end:header_end + length]
    crc_field = bits[header_end + length:header_end + length + CRC_BITS]
    crc_ok = preamble_ok and bool(np.array_equal(crc_field, crc32_bits(payload)))
    return payload, crc_ok


def _bits_to_int(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def bit_error_rate(decoded: np.ndarray, reference: np.ndarray) -> float:
    """Fraction of differing bits; length mismatches count as errors."""
    decoded = np.asarray(decoded, dtype=np.uint8)
    reference = np.asarray(reference, dtype=np.uint8)
    n = max(decoded.size, reference.size)
    if n == 0:
        return 0.0
    overlap = min(decoded.size, reference.size)
    errors = int(np.count_nonzero(decoded[:overlap] != reference[:overlap]))
    errors += n - overlap
    return errors / n


def decode_frames(frames: np.ndarray, params: ModulationParams, camera_fps: float,
                  homography: np.ndarray | None = None,
                  region: tuple[int, int, int, int] | None = None,
                  reference_payload: np.ndarray | None = None) -> DecodeReport:
    """Run the full receive pipeline over captured frames.

    homography is the forward display-to-sensor mapping used by the channel;
    captures are rectified back into display coordinates before measuring.
    """
    series = extract_signal(frames, homography=homography, region=region,
                            channel=params.channel, sample_rate=camera_fps)
    sync = synchronize(series, params, camera_fps)
    levels = estimate_levels(series, sync, params)
    symbols = decide_symbols(series, sync, levels, params)
    payload, crc_ok = deframe(symbols_to_bits(symbols, params), params)
    ber = None
    if reference_payload is not None:
        ber = bit_error_rate(payload, reference_payload)
    return DecodeReport(payload=payload, series=series, sync=sync, levels=levels,
                        symbols=symbols, crc_ok=crc_ok, ber_vs_reference=ber)
