"""Display-to-camera optical channel: geometry, warp, resampling, noise, quantization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import quantize_unit, to_unit, validate_frames


def identity_homography() -> np.ndarray:
    return np.eye(3, dtype=np.float64)


@dataclass(frozen=True)
class ChannelGeometry:
    """Physical layout of the display and the observing camera.

    distance_m:
        line-of-sight distance between display and aperture, in meters.
    phi_rad, theta_rad:
        angles between the line of sight and the display normal (phi) and the
        camera optical axis (theta). Both must stay below 90 degrees or the
        surfaces no longer face each other.
    display_area_m2, aperture_area_m2:
        emitting and collecting areas. Defaults: a 19-inch 4:3 panel and a
        small security-camera lens.
    """

    distance_m: float = 1.0
    phi_rad: float = 0.0
    theta_rad: float = 0.0
    display_area_m2: float = 0.11
    aperture_area_m2: float = 2.0e-5

    def __post_init__(self) -> None:
        if not math.isfinite(self.distance_m) or self.distance_m <= 0.0:
            raise ValueError(f"distance_m must be positive, got {self.distance_m}")
        for label, angle in (("phi_rad", self.phi_rad), ("theta_rad", self.theta_rad)):
            if not 0.0 <= angle < math.pi / 2:
                raise ValueError(f"{label} must lie in [0, pi/2), got {angle}")
        for label, area in (("display_area_m2", self.display_area_m2),
                            ("aperture_area_m2", self.aperture_area_m2)):
            if not math.isfinite(area) or area <= 0.0:
                raise ValueError(f"{label} must be positive, got {area}")


def geometric_gain(geometry: ChannelGeometry) -> float:
    """Fraction of display radiance collected by the aperture.

    Point-to-point approximation of the surface integral: both areas are
    treated as single elements at distance d, so the gain is
    A_display * A_aperture * cos(phi) * cos(theta) / (pi * d^2). Accurate when
    the distance is large against both apertures.
    """
    g = geometry
    return (g.display_area_m2 * g.aperture_area_m2
            * math.cos(g.phi_rad) * math.cos(g.theta_rad)
            / (math.pi * g.distance_m**2))


def normalized_gain(geometry: ChannelGeometry) -> float:
    """Gain relative to the same pair head-on at one meter.

    The reference keeps pixel amplitudes in a usable range: a head-on capture
    at one meter reproduces the display values, and everything else scales by
    cos(phi) * cos(theta) / d^2.
    """
    reference = replace(geometry, distance_m=1.0, phi_rad=0.0, theta_rad=0.0)
    return geometric_gain(geometry) / geometric_gain(reference)


@dataclass(frozen=True)
class ChannelParams:
    """Full channel configuration for a capture run.

    affine is the forward 3x3 homography mapping display pixel coordinates to
    sensor pixel coordinates. noise_sigma is the per-pixel Gaussian noise level
    in unit-range amplitude. quantizer_bits sets the sensor bit depth; 8 yields
    uint8 output, anything else a float32 grid. rng_seed drives the per-frame
    noise generator.
    """

    geometry: ChannelGeometry = ChannelGeometry()
    noise_sigma: float = 0.0
    affine: np.ndarray = field(default_factory=identity_homography)
    camera_fps: float = 30.0
    quantizer_bits: int = 8
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.noise_sigma) or self.noise_sigma < 0.0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        matrix = np.asarray(self.affine, dtype=np.float64)
        if matrix.shape != (3, 3):
            raise ValueError(f"affine must be a 3x3 matrix, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)) or abs(np.linalg.det(matrix)) < 1e-12:
            raise ValueError("affine must be finite and invertible")
        object.__setattr__(self, "affine", matrix)
        if not math.isfinite(self.camera_fps) or self.camera_fps <= 0.0:
            raise ValueError(f"camera_fps must be positive, got {self.camera_fps}")
        if not isinstance(self.quantizer_bits, int) or not 1 <= self.quantizer_bits <= 30:
            raise ValueError(f"quantizer_bits must be an int in [1, 30], "
                             f"got {self.quantizer_bits}")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError(f"rng_seed must fit in 64 bits, got {self.rng_seed}")


class SamplingRateError(ValueError):
    """Camera frame rate is too low to resolve the symbol stream."""


def apply_homography(matrix: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Map Nx2 (x, y) points through a 3x3 homography."""
    pts = np.asarray(points, dtype=np.float64)
    ones = np.ones((pts.shape[0], 1))
    projected = np.hstack([pts, ones]) @ np.asarray(matrix, dtype=np.float64).T
    w = projected[:, 2:3]
    if np.any(np.abs(w) < 1e-12):
        raise ValueError("homography maps a point to infinity")
    return projected[:, :2] / w


def warp_frame(frame: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Resample a frame through a forward homography (display -> sensor).

    Every output pixel is pulled from the inverse-mapped source location by
    bilinear interpolation; locations outside the source read as black. uint8
    input yields uint8 output (rounded half up), float input stays float.
    """
    arr = np.asarray(frame)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"frame must have shape (h, w, 3), got {arr.shape}")
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape != (3, 3):
        raise ValueError(f"homography must be 3x3, got shape {matrix.shape}")
    try:
        inverse = np.linalg.inv(matrix)
    except np.linalg.LinAlgError:
        raise ValueError("homography is singular") from None
    warped = _warp_unit(to_unit(arr), inverse)
    if arr.dtype == np.uint8:
        return np.floor(warped * 255.0 + 0.5).astype(np.uint8)
    return warped.astype(arr.dtype, copy=False)


def _warp_unit(unit: np.ndarray, inverse: np.ndarray) -> np.ndarray:
    """Backward-map a unit-range float frame; out-of-bounds samples are zero."""
    h, w = unit.shape[:2]
    ys, xs = np.mgrid[0:h, 0:w]
    dest = np.column_stack([xs.ravel().astype(np.float64),
                            ys.ravel().astype(np.float64)])
    src = apply_homography(inverse, dest)
    sx, sy = src[:, 0], src[:, 1]

    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0

    out = np.zeros((h * w, unit.shape[2]), dtype=np.float64)
    weights = ((1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy)
    corners = ((x0, y0), (x0 + 1, y0), (x0, y0 + 1), (x0 + 1, y0 + 1))
    for weight, (cx, cy) in zip(weights, corners):
        valid = (cx >= 0) & (cx < w) & (cy >= 0) & (cy < h)
        if not np.any(valid):
            continue
        contrib = unit[cy[valid], cx[valid], :] * weight[valid, None]
        out[valid] += contrib
    return out.reshape(h, w, unit.shape[2])


def _frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    # Counter-style keying: one independent stream per (seed, frame), so any
    # frame's noise can be reproduced without generating its predecessors.
    # The key must be built as uint64 or large seeds round through float64.
    key = np.array([seed, frame_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def transmit(frames: np.ndarray, display_fps: float, params: ChannelParams,
             symbol_rate: float | None = None) -> np.ndarray:
    """Push a display clip through the optical channel to sensor frames.

    Stages per captured frame: pick the display frame shown at the capture
    instant (nearest in time), warp it through the homography, scale by the
    normalized geometric gain, add white Gaussian noise, clamp to [0, 1], and
    quantize to the sensor bit depth.

    Passing symbol_rate enables the sampling guard: the camera must run at
    twice the symbol rate or faster, otherwise captures can miss symbols
    entirely and decoding is hopeless.
    """
    source = validate_frames(frames)
    if not math.isfinite(display_fps) or display_fps <= 0.0:
        raise ValueError(f"display_fps must be positive, got {display_fps}")
    if symbol_rate is not None:
        if symbol_rate <= 0.0:
            raise ValueError(f"symbol_rate must be positive, got {symbol_rate}")
        if params.camera_fps < 2.0 * symbol_rate:
            raise SamplingRateError(
                f"camera_fps {params.camera_fps} is below twice the symbol rate "
                f"{symbol_rate}; raise the camera rate or slow the symbols")

    n_in = source.shape[0]
    duration = n_in / display_fps
    n_out = max(1, round(duration * params.camera_fps))
    capture_times = (np.arange(n_out) + 0.5) / params.camera_fps
    src_index = np.minimum((capture_times * display_fps).astype(np.int64), n_in - 1)

    gain = normalized_gain(params.geometry)
    inverse = np.linalg.inv(params.affine)
    is_identity = np.allclose(params.affine / params.affine[2, 2], np.eye(3),
                              atol=1e-12)

    captured = []
    # Capture times are monotonic, so one cached source frame is enough.
    cached_idx = -1
    cached_unit = None
    for k in range(n_out):
        idx = int(src_index[k])
        if idx != cached_idx:
            unit = to_unit(source[idx])
            if not is_identity:
                unit = _warp_unit(unit, inverse)
            cached_idx, cached_unit = idx, unit * gain
        observed = cached_unit
        if params.noise_sigma > 0.0:
            noise = _frame_rng(params.rng_seed, k).normal(
                0.0, params.noise_sigma, size=observed.shape)
            observed = observed + noise
        observed = np.clip(observed, 0.0, 1.0)
        captured.append(quantize_unit(observed, params.quantizer_bits))
    return np.stack(captured)


def mean_received_amplitude(frames: np.ndarray, channel: int) -> float:
    """Mean unit-range amplitude of one color plane over a captured clip."""
    arr = validate_frames(frames)
    return float(to_unit(arr)[:, :, :, int(channel)].mean())
