"""Hard-cut detection from luma histogram differences."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .video_io import VideoFrame

DEFAULT_THRESHOLD = 0.5


def histogram256(frame: VideoFrame) -> np.ndarray:
    return np.bincount(frame.plane_y.ravel(), minlength=256).astype(np.int64)


def histogram_difference(h1, h2) -> float:
    """Normalised L1 distance: 0 for identical, 1 for disjoint supports."""
    h1 = np.asarray(h1, dtype=np.int64)
    h2 = np.asarray(h2, dtype=np.int64)
    total = int(h1.sum())
    if total != int(h2.sum()):
        raise ValueError(f"histogram totals differ ({total} vs {int(h2.sum())})")
    if total == 0:
        return 0.0
    return float(np.abs(h1 - h2).sum()) / (2 * total)


def is_cut(prev: VideoFrame, curr: VideoFrame, threshold: float = DEFAULT_THRESHOLD) -> bool:
    if (prev.width, prev.height) != (curr.width, curr.height):
        raise ValueError("frames differ in size")
    return histogram_difference(histogram256(prev), histogram256(curr)) > threshold


def detect_cuts(frames: Sequence[VideoFrame], threshold: float = DEFAULT_THRESHOLD) -> list[int]:
    """Display indices of frames that start a new shot (frame 0 excluded)."""
    hists = [histogram256(f) for f in frames]
    return [
        i for i in range(1, len(frames))
        if histogram_difference(hists[i - 1], hists[i]) > threshold
    ]
