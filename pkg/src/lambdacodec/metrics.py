"""Distortion measures and Bjontegaard delta metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .video_io import VideoFrame

PSNR_CAP = 99.0
_MSE_FLOOR = 255.0**2 * 10 ** (-PSNR_CAP / 10)


def mse(a, b) -> float:
    """Luma MSE between two frames (or two equally shaped arrays)."""
    pa = a.plane_y if isinstance(a, VideoFrame) else np.asarray(a)
    pb = b.plane_y if isinstance(b, VideoFrame) else np.asarray(b)
    if pa.shape != pb.shape:
        raise ValueError(f"shape mismatch {pa.shape} vs {pb.shape}")
    d = pa.astype(np.int64) - pb.astype(np.int64)
    return float((d * d).sum()) / d.size


def psnr(mse_value: float) -> float:
    if mse_value < _MSE_FLOOR:
        return PSNR_CAP
    return 10.0 * math.log10(255.0**2 / mse_value)


@dataclass(frozen=True)
class RDPoint:
    bitrate: float  # kbit/s
    psnr: float

    def __post_init__(self):
        if not self.bitrate > 0:
            raise ValueError(f"bitrate must be positive, got {self.bitrate}")
        if not math.isfinite(self.psnr):
            raise ValueError("psnr must be finite")


class RDCurve:
    """Four or more RD points, sorted by rate, with PSNR rising with rate."""

    def __init__(self, points: Iterable):
        pts = [p if isinstance(p, RDPoint) else RDPoint(*p) for p in points]
        pts.sort(key=lambda p: p.bitrate)
        if len(pts) < 4:
            raise ValueError(f"an RD curve needs at least 4 points, got {len(pts)}")
        rates = np.array([p.bitrate for p in pts])
        quality = np.array([p.psnr for p in pts])
        if np.any(np.diff(rates) <= 0):
            raise ValueError("RD curve bitrates must be distinct")
        if np.any(np.diff(quality) <= 0):
            raise ValueError("RD curve is not monotone: PSNR must increase with bitrate")
        self.points = pts
        self.log_rate = np.log10(rates)
        self.psnr = quality

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        inner = ", ".join(f"({p.bitrate:.3f}, {p.psnr:.3f})" for p in self.points)
        return f"RDCurve([{inner}])"


@dataclass(frozen=True)
class CubicFit:
    """Cubic in the centred/scaled abscissa ``t = (x - centre) / scale``."""

    coeffs: np.ndarray  # ascending powers of t
    centre: float
    scale: float

    def __call__(self, x):
        t = (np.asarray(x, dtype=float) - self.centre) / self.scale
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def integral(self, lo: float, hi: float) -> float:
        anti = np.polynomial.polynomial.polyint(self.coeffs)
        tl = (lo - self.centre) / self.scale
        th = (hi - self.centre) / self.scale
        return float(self.scale * (np.polynomial.polynomial.polyval(th, anti) - np.polynomial.polynomial.polyval(tl, anti)))


def fit_cubic(x: Sequence[float], y: Sequence[float]) -> CubicFit:
    """Least-squares cubic via the normal equations on centred, scaled x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    centre = float(x.mean())
    scale = float(np.abs(x - centre).max()) or 1.0
    t = (x - centre) / scale
    V = np.vander(t, 4, increasing=True)
    coeffs = np.linalg.solve(V.T @ V, V.T @ y)
    return CubicFit(coeffs, centre, scale)


def _overlap(xa: np.ndarray, xb: np.ndarray) -> tuple[float, float]:
    lo = max(xa.min(), xb.min())
    hi = min(xa.max(), xb.max())
    if not hi > lo:
        raise ValueError("RD curves do not overlap")
    return float(lo), float(hi)


def _mean_difference(xa, ya, xb, yb) -> float:
    lo, hi = _overlap(xa, xb)
    fa, fb = fit_cubic(xa, ya), fit_cubic(xb, yb)
    return (fb.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo)


def _curve(c) -> RDCurve:
    return c if isinstance(c, RDCurve) else RDCurve(c)


def bd_psnr(anchor, test) -> float:
    """Average PSNR gain (dB) of ``test`` over ``anchor`` across the shared log-rate range."""
    a, t = _curve(anchor), _curve(test)
    return _mean_difference(a.log_rate, a.psnr, t.log_rate, t.psnr)


def bd_rate(anchor, test) -> float:
    """Average bitrate change (%) of ``test`` relative to ``anchor`` at equal PSNR."""
    a, t = _curve(anchor), _curve(test)
    delta = _mean_difference(a.psnr, a.log_rate, t.psnr, t.log_rate)
    return (10.0**delta - 1.0) * 100.0


def bitrate_kbps(total_bits: int, n_frames: int, fps: float) -> float:
    return total_bits * fps / n_frames / 1000.0
