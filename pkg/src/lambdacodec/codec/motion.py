"""Full-search integer-pel block matching with a Lagrangian mv-rate term.

A motion vector ``(dx, dy)`` predicts the block at ``(y, x)`` from
``ref[y - dy, x - dx]``: it is the displacement of the content from the
reference picture to the current one.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bits import se_len, se_len_array

BLOCK = 16


class MotionVector(NamedTuple):
    dx: int
    dy: int


ZERO_MV = MotionVector(0, 0)


def pad_plane(plane: np.ndarray, pad: int) -> np.ndarray:
    return np.pad(np.asarray(plane, dtype=np.int64), pad, mode="edge")


def mv_bits(mv: MotionVector, pred: MotionVector) -> int:
    return se_len(mv.dx - pred.dx) + se_len(mv.dy - pred.dy)


class MvField:
    """Per-block vectors of one prediction direction, for median mv prediction.

    Blocks that do not use the direction (or are not coded yet) count as the
    zero vector. The predictor is the component-wise median of the left, top
    and top-right neighbours (top-left stands in at the right picture edge);
    on the first block row it is simply the left neighbour.
    """

    def __init__(self, nby: int, nbx: int):
        self.mv = np.zeros((nby, nbx, 2), np.int64)

    def set(self, by: int, bx: int, mv: MotionVector | None) -> None:
        self.mv[by, bx] = mv if mv is not None else (0, 0)

    def predictor(self, by: int, bx: int) -> MotionVector:
        nbx = self.mv.shape[1]
        left = self.mv[by, bx - 1] if bx > 0 else np.zeros(2, np.int64)
        if by == 0:
            return MotionVector(int(left[0]), int(left[1]))
        top = self.mv[by - 1, bx]
        if bx + 1 < nbx:
            diag = self.mv[by - 1, bx + 1]
        else:
            diag = self.mv[by - 1, bx - 1] if bx > 0 else np.zeros(2, np.int64)
        med = np.median(np.stack([left, top, diag]), axis=0).astype(np.int64)
        return MotionVector(int(med[0]), int(med[1]))


def ssd_tables(cur: np.ndarray, ref_padded: np.ndarray, search_range: int, block: int = BLOCK) -> np.ndarray:
    """SSD for every block of ``cur`` and every mv in the search window.

    ``ref_padded`` is the reference plane padded by ``search_range`` on every
    side. Returns int64 ``(nby, nbx, 2s+1, 2s+1)`` indexed ``[.., dy+s, dx+s]``.
    The cross term is computed by FFT correlation and rounded back to the
    exact integer.
    """
    s = search_range
    h, w = cur.shape
    nby, nbx = h // block, w // block
    n = 2 * s + 1
    span = block + 2 * s
    ref = np.asarray(ref_padded, dtype=np.float64)
    windows = sliding_window_view(ref, (span, span))[::block, ::block][:nby, :nbx].reshape(-1, span, span)
    blocks = (
        np.asarray(cur, dtype=np.float64)
        .reshape(nby, block, nbx, block)
        .transpose(0, 2, 1, 3)
        .reshape(-1, block, block)
    )
    corr = np.fft.irfft2(
        np.fft.rfft2(windows) * np.conj(np.fft.rfft2(blocks, s=(span, span))), s=(span, span)
    )[:, :n, :n]
    sq = ref * ref
    box = sliding_window_view(sq, block, axis=0).sum(-1)
    box = sliding_window_view(box, block, axis=1).sum(-1)
    energy = sliding_window_view(box, (n, n))[::block, ::block][:nby, :nbx].reshape(-1, n, n)
    own = (blocks * blocks).sum(axis=(1, 2))[:, None, None]
    table = np.rint(energy - 2 * corr + own).astype(np.int64)
    # window offset j corresponds to dy = s - j
    return table[:, ::-1, ::-1].reshape(nby, nbx, n, n)


def block_ssd_table(block: np.ndarray, ref_padded: np.ndarray, y0: int, x0: int, search_range: int) -> np.ndarray:
    """Direct SSD over the window for one block; same layout as one entry of :func:`ssd_tables`."""
    s = search_range
    b = np.asarray(block, dtype=np.int64)
    size = b.shape[0]
    region = np.asarray(ref_padded, dtype=np.int64)[y0:y0 + size + 2 * s, x0:x0 + size + 2 * s]
    win = sliding_window_view(region, (size, size))
    table = ((win - b) ** 2).sum(axis=(2, 3))
    return table[::-1, ::-1]


def best_mv(table: np.ndarray, pred: MotionVector, search_range: int, lam_milli: int) -> tuple[MotionVector, int, int]:
    """Pick the mv minimising ``1000*SSD + lam_milli*R_mv``.

    Ties go to smaller |dx|+|dy|, then smaller dy, then smaller dx.
    Returns ``(mv, ssd, mv_bits)``.
    """
    s = search_range
    vals = np.arange(-s, s + 1)
    bx = se_len_array(vals - pred.dx)
    by = se_len_array(vals - pred.dy)
    bits = by[:, None] + bx[None, :]
    cost = 1000 * table + lam_milli * bits
    jj, ii = np.nonzero(cost == cost.min())
    dy, dx = jj - s, ii - s
    k = np.lexsort((dx, dy, np.abs(dx) + np.abs(dy)))[0]
    mv = MotionVector(int(dx[k]), int(dy[k]))
    return mv, int(table[jj[k], ii[k]]), int(bits[jj[k], ii[k]])


def motion_search(block, ref_plane, y0: int, x0: int, pred_mv=ZERO_MV, search_range: int = 16, lam: float = 0.0):
    """Full search for one block of the current picture at ``(y0, x0)``.

    Returns ``(mv, cost)`` with cost = SSD + lam * (Exp-Golomb bits of mv - pred_mv).
    """
    s = search_range
    ref_padded = pad_plane(ref_plane, s)
    table = block_ssd_table(block, ref_padded, y0, x0, s)
    lam_milli = int(round(lam * 1000))
    mv, ssd, bits = best_mv(table, MotionVector(*pred_mv), s, lam_milli)
    return mv, ssd + lam_milli / 1000 * bits


def fetch(ref_padded: np.ndarray, pad: int, y0: int, x0: int, mv: MotionVector, size: int) -> np.ndarray:
    """Prediction block for ``mv`` from a padded reference."""
    y = y0 - mv.dy + pad
    x = x0 - mv.dx + pad
    return ref_padded[y:y + size, x:x + size]
