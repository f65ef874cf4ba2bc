"""Error-rate prediction and measurement: Q-function model, Monte Carlo, sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erfc

from .channel import ChannelParams, transmit
from .core import ModulationParams, as_bits
from .decoder import decode_frames
from .encoder import encode_stream

MC_MIN_SYMBOLS = 10_000
_MC_CHUNK = 1 << 15


def q_function(x) -> np.ndarray | float:
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    result = 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))
    return float(result) if np.isscalar(x) or np.ndim(x) == 0 else result


@dataclass(frozen=True)
class BerModel:
    """Binary decision model: two Gaussian amplitude clusters and a threshold.

    p0/p1 are the prior symbol probabilities; threshold defaults to the
    midpoint between the cluster means.
    """

    mu0: float
    mu1: float
    sigma0: float
    sigma1: float
    p0: float = 0.5
    p1: float = 0.5
    threshold: float | None = None

    def __post_init__(self) -> None:
        if not self.mu1 > self.mu0:
            raise ValueError(f"mu1 ({self.mu1}) must exceed mu0 ({self.mu0})")
        if self.sigma0 <= 0.0 or self.sigma1 <= 0.0:
            raise ValueError("sigma0 and sigma1 must be positive, got "
                             f"{self.sigma0}, {self.sigma1}")
        if min(self.p0, self.p1) < 0.0 or not math.isclose(self.p0 + self.p1, 1.0,
                                                           rel_tol=0.0, abs_tol=1e-9):
            raise ValueError(f"priors must be nonnegative and sum to 1, got "
                             f"p0={self.p0}, p1={self.p1}")
        if self.threshold is None:
            object.__setattr__(self, "threshold", (self.mu0 + self.mu1) / 2.0)

    @classmethod
    def from_levels(cls, mu0: float, mu1: float, sigma: float) -> "BerModel":
        """Equal-prior, equal-variance model straight from decoder estimates."""
        return cls(mu0=mu0, mu1=mu1, sigma0=sigma, sigma1=sigma)


def conditional_error_probs(model: BerModel) -> tuple[float, float]:
    """(P(decide 1 | sent 0), P(decide 0 | sent 1)) for threshold detection."""
    p10 = q_function((model.threshold - model.mu0) / model.sigma0)
    p01 = q_function((model.mu1 - model.threshold) / model.sigma1)
    return p10, p01


def theoretical_ber(model: BerModel) -> float:
    """Prior-weighted error probability of the threshold detector.

    With equal priors, equal sigmas, and the midpoint threshold this reduces
    to Q((mu1 - mu0) / (2 sigma)).
    """
    p10, p01 = conditional_error_probs(model)
    return model.p0 * p10 + model.p1 * p01


def monte_carlo_ber(model: BerModel, n_symbols: int, seed: int = 0) -> tuple[float, float]:
    """Simulate the binary channel and return (error rate, 3-sigma halfwidth).

    Draws n_symbols equiprobable symbols, adds cluster noise, thresholds, and
    counts errors. The halfwidth is three binomial standard errors at the
    measured rate. Chunks are keyed (seed, chunk index), so results do not
    depend on chunking internals or history.
    """
    if n_symbols < MC_MIN_SYMBOLS:
        raise ValueError(f"n_symbols must be at least {MC_MIN_SYMBOLS} for a "
                         f"meaningful estimate, got {n_symbols}")
    errors = 0
    done = 0
    chunk_index = 0
    mu = np.array([model.mu0, model.mu1])
    sigma = np.array([model.sigma0, model.sigma1])
    while done < n_symbols:
        n = min(_MC_CHUNK, n_symbols - done)
        key = np.array([seed, chunk_index], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        sent = (rng.random(n) < model.p1).astype(np.int64)
        amplitude = mu[sent] + sigma[sent] * rng.standard_normal(n)
        decided = (amplitude >= model.threshold).astype(np.int64)
        errors += int(np.count_nonzero(decided != sent))
        done += n
        chunk_index += 1
    rate = errors / n_symbols
    halfwidth = 3.0 * math.sqrt(rate * (1.0 - rate) / n_symbols)
    return rate, halfwidth


@dataclass(frozen=True)
class SweepRow:
    """One distance point of a sweep; error holds the failure text if the
    pipeline broke at this distance and the numeric fields are then NaN."""

    distance_m: float
    delta_mu: float
    pe_theory: float
    pe_measured: float
    ci_halfwidth: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    slope: float


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of log10(y) against log10(x)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log10(x[keep]), np.log10(y[keep]), 1)[0])


def distance_sweep(distances, payload_bits, carrier: np.ndarray,
                   modulation: ModulationParams, channel: ChannelParams,
                   region: tuple[int, int, int, int] | None = None) -> SweepResult:
    """Run the full encode/capture/decode pipeline at each distance.

    Per distance the row records the measured amplitude swing between the top
    and bottom levels, the Q-function error prediction from the decoder's own
    level and noise estimates, and the measured error rate against the sent
    payload. A failing distance is recorded and the sweep continues. The
    returned slope fits log10(delta_mu) against log10(distance) over the rows
    that survived.
    """
    dist = [float(d) for d in distances]
    if len(dist) < 3:
        raise ValueError(f"a sweep needs at least 3 distances, got {len(dist)}")
    payload = as_bits(payload_bits)
    sent = encode_stream(payload, carrier, modulation)
    rows = []
    for d in dist:
        try:
            params = replace(channel, geometry=replace(channel.geometry, distance_m=d))
            captured = transmit(sent, modulation.frame_rate, params,
                                symbol_rate=modulation.symbol_rate)
            report = decode_frames(captured, modulation, params.camera_fps,
                                   homography=params.affine, region=region,
                                   reference_payload=payload)
            delta_mu = report.levels.mu1 - report.levels.mu0
            pe_theory = _decision_error_estimate(report)
            pe_measured = float(report.ber_vs_reference)
            n_bits = max(payload.size, 1)
            ci = 3.0 * math.sqrt(pe_measured * (1.0 - pe_measured) / n_bits)
            rows.append(SweepRow(d, delta_mu, pe_theory, pe_measured, ci))
        except (ValueError, RuntimeError) as exc:
            nan = float("nan")
            rows.append(SweepRow(d, nan, nan, nan, nan, error=str(exc)))
    slope = fit_loglog_slope([r.distance_m for r in rows if r.error is None],
                             [r.delta_mu for r in rows if r.error is None])
    return SweepResult(rows=tuple(rows), slope=slope)


def _decision_error_estimate(report) -> float:
    """Q-model error rate using the decoder's level and noise estimates.

    Decisions average the central samples of each symbol, so the effective
    sigma is the per-sample estimate shrunk by sqrt(samples per decision).
    A zero sigma estimate means a noiseless run, hence zero predicted errors.
    """
    levels = report.levels
    if levels.sigma == 0.0:
        return 0.0
    n_central = max(1.0, math.floor(report.sync.frames_per_symbol / 2.0))
    sigma_decision = levels.sigma / math.sqrt(n_central)
    return float(q_function((levels.mu1 - levels.mu0) / (2.0 * sigma_decision)))
