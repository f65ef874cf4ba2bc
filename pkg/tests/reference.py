"""Independent reference implementations used to cross-check the package.

Everything here is written the slow, obvious way on purpose and must not call
into brightlink: these are the oracles the tests compare against.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

# Reflected CRC-32 polynomial (the zip/png one).
_CRC_POLY = 0xEDB88320


def crc32_reference(data: bytes) -> int:
    """Bit-at-a-time CRC-32: init 0xFFFFFFFF, reflected, final complement."""
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            if crc & 1:
                crc = (crc >> 1) ^ _CRC_POLY
            else:
                crc >>= 1
    return crc ^ 0xFFFFFFFF


def pack_bits_reference(bits) -> bytes:
    """MSB-first bit packing with zero padding, one bit at a time."""
    out = bytearray()
    acc = 0
    count = 0
    for bit in bits:
        acc = (acc << 1) | int(bit)
        count += 1
        if count == 8:
            out.append(acc)
            acc = 0
            count = 0
    if count:
        out.append(acc << (8 - count))
    return bytes(out)


def q_reference(x: float) -> float:
    """Gaussian tail probability by direct numerical integration of the pdf."""
    pdf = lambda t: math.exp(-t * t / 2.0) / math.sqrt(2.0 * math.pi)
    value, _ = quad(pdf, x, np.inf)
    return value


def surface_integrated_gain(distance: float, phi: float, theta: float,
                            display_area: float, aperture_area: float,
                            n: int = 64) -> float:
    """Exact link gain by double surface integration over both apertures.

    The display is a square of the given area centered at the origin, tilted
    by phi about the y axis; the aperture is a square centered at (0, 0, d),
    tilted by theta about the x axis. Each surface is split into an n-by-n
    grid of elements and every element pair contributes
    cos(alpha) * cos(beta) / (pi * r^2) with the true per-pair distance r and
    incidence angles alpha/beta against the surface normals.
    """
    l_disp = math.sqrt(display_area)
    l_aper = math.sqrt(aperture_area)

    n_disp = np.array([math.sin(phi), 0.0, math.cos(phi)])
    u_disp = np.array([math.cos(phi), 0.0, -math.sin(phi)])
    v_disp = np.array([0.0, 1.0, 0.0])

    center = np.array([0.0, 0.0, distance])
    n_aper = np.array([0.0, math.sin(theta), -math.cos(theta)])
    u_aper = np.array([1.0, 0.0, 0.0])
    v_aper = np.array([0.0, math.cos(theta), math.sin(theta)])

    ticks = (np.arange(n) + 0.5) / n - 0.5
    da, db = np.meshgrid(ticks * l_disp, ticks * l_disp, indexing="ij")
    display_pts = da.ravel()[:, None] * u_disp + db.ravel()[:, None] * v_disp
    aa, ab = np.meshgrid(ticks * l_aper, ticks * l_aper, indexing="ij")
    aperture_pts = center + aa.ravel()[:, None] * u_aper + ab.ravel()[:, None] * v_aper

    # Per pair (p, q): cos(alpha) = (q - p) . n_disp / r and
    # cos(beta) = (p - q) . n_aper / r, so the integrand
    # cos(alpha) cos(beta) / (pi r^2) equals the product of the two (clipped)
    # dot products over pi r^4. Everything decomposes into outer sums, which
    # sidesteps materializing the pairwise difference vectors. Chunking the
    # display axis bounds peak memory.
    q_norm2 = np.sum(aperture_pts**2, axis=1)
    q_dot_nd = aperture_pts @ n_disp
    q_dot_na = aperture_pts @ n_aper
    total = 0.0
    chunk = 1024
    for start in range(0, display_pts.shape[0], chunk):
        p = display_pts[start:start + chunk]
        r2 = np.add.outer(np.sum(p**2, axis=1), q_norm2) - 2.0 * p @ aperture_pts.T
        facing_disp = np.subtract.outer(-(p @ n_disp), -q_dot_nd)
        facing_aper = np.subtract.outer(p @ n_aper, q_dot_na)
        np.clip(facing_disp, 0.0, None, out=facing_disp)
        np.clip(facing_aper, 0.0, None, out=facing_aper)
        total += float(np.sum(facing_disp * facing_aper / (math.pi * r2 * r2)))
    element_area = (display_area / n**2) * (aperture_area / n**2)
    return total * element_area


def nearest_level_index(value: float, levels) -> int:
    """Index of the closest level; ties go to the higher index."""
    best = 0
    best_dist = abs(value - levels[0])
    for i in range(1, len(levels)):
        dist = abs(value - levels[i])
        if dist <= best_dist:
            best = i
            best_dist = dist
    return best
