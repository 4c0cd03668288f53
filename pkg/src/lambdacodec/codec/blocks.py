"""Macroblock modes, prediction and Lagrangian evaluation of candidates.

Block syntax (after the frame header), for each 16x16 block in raster order::

    P/B frames: skip flag (1 bit); SKIP blocks stop here
    ue(mode index)            see MODE_CODES
    se(mvd.dx), se(mvd.dy)    forward then backward, for the directions used
    4 luma 8x8 + U 8x8 + V 8x8 residual blocks (see residual.py)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..rdo import FrameType
from .bits import BitReader, BitstreamError, BitWriter, se_len
from .motion import BLOCK, ZERO_MV, MotionVector, fetch
from .residual import block_bits, read_block, write_block
from .transform import dequantize, fdct8, from_zigzag, idct8, quantize, to_zigzag

INTRA_MODES = ("DC", "H", "V")


@dataclass(frozen=True)
class BlockMode:
    kind: str
    mv_fwd: Optional[MotionVector] = None
    mv_bwd: Optional[MotionVector] = None
    intra: Optional[str] = None

    def __str__(self):
        if self.kind == "INTRA":
            return f"INTRA({self.intra})"
        mvs = [m for m in (self.mv_fwd, self.mv_bwd) if m is not None]
        if self.kind == "SKIP" or not mvs:
            return self.kind
        return f"{self.kind}(" + ",".join(f"{m.dx},{m.dy}" for m in mvs) + ")"

    @property
    def uses_fwd(self) -> bool:
        return self.kind in ("INTER_FWD", "INTER_BI")

    @property
    def uses_bwd(self) -> bool:
        return self.kind in ("INTER_BWD", "INTER_BI")


SKIP = BlockMode("SKIP")

# coded mode index per frame type; SKIP is signalled by the flag instead
MODE_CODES = {
    FrameType.I: ("INTRA:DC", "INTRA:H", "INTRA:V"),
    FrameType.P: ("INTER_FWD", "INTRA:DC", "INTRA:H", "INTRA:V"),
    FrameType.B: ("INTER_FWD", "INTER_BWD", "INTER_BI", "INTRA:DC", "INTRA:H", "INTRA:V"),
}


def mode_key(mode: BlockMode) -> str:
    return f"INTRA:{mode.intra}" if mode.kind == "INTRA" else mode.kind


def legal_kinds(frame_type: FrameType) -> tuple[str, ...]:
    if frame_type is FrameType.I:
        return ("INTRA",)
    if frame_type is FrameType.P:
        return ("SKIP", "INTER_FWD", "INTRA")
    return ("SKIP", "INTER_FWD", "INTER_BWD", "INTER_BI", "INTRA")


def header_bits(frame_type: FrameType, mode: BlockMode, pred_fwd: MotionVector, pred_bwd: MotionVector) -> int:
    if mode.kind == "SKIP":
        return 1
    n = 0 if frame_type is FrameType.I else 1
    idx = MODE_CODES[frame_type].index(mode_key(mode))
    n += 2 * (idx + 1).bit_length() - 1
    if mode.uses_fwd:
        n += se_len(mode.mv_fwd.dx - pred_fwd.dx) + se_len(mode.mv_fwd.dy - pred_fwd.dy)
    if mode.uses_bwd:
        n += se_len(mode.mv_bwd.dx - pred_bwd.dx) + se_len(mode.mv_bwd.dy - pred_bwd.dy)
    return n


def write_header(w: BitWriter, frame_type: FrameType, mode: BlockMode, pred_fwd: MotionVector, pred_bwd: MotionVector) -> None:
    if frame_type is not FrameType.I:
        w.bit(mode.kind == "SKIP")
        if mode.kind == "SKIP":
            return
    w.ue(MODE_CODES[frame_type].index(mode_key(mode)))
    if mode.uses_fwd:
        w.se(mode.mv_fwd.dx - pred_fwd.dx)
        w.se(mode.mv_fwd.dy - pred_fwd.dy)
    if mode.uses_bwd:
        w.se(mode.mv_bwd.dx - pred_bwd.dx)
        w.se(mode.mv_bwd.dy - pred_bwd.dy)


def read_header(r: BitReader, frame_type: FrameType, pred_fwd: MotionVector, pred_bwd: MotionVector) -> BlockMode:
    if frame_type is not FrameType.I and r.bit():
        return SKIP
    codes = MODE_CODES[frame_type]
    idx = r.ue()
    if idx >= len(codes):
        raise BitstreamError(f"mode index {idx} invalid for {frame_type.name} frame")
    key = codes[idx]
    if key.startswith("INTRA:"):
        return BlockMode("INTRA", intra=key[6:])
    fwd = bwd = None
    if key in ("INTER_FWD", "INTER_BI"):
        fwd = MotionVector(pred_fwd.dx + r.se(), pred_fwd.dy + r.se())
    if key in ("INTER_BWD", "INTER_BI"):
        bwd = MotionVector(pred_bwd.dx + r.se(), pred_bwd.dy + r.se())
    return BlockMode(key, fwd, bwd)


# ---------------------------------------------------------------- prediction


def intra_pred(recon: np.ndarray, y0: int, x0: int, size: int, mode: str) -> np.ndarray:
    """DC/H/V prediction from reconstructed neighbours; missing ones read as 128."""
    top = recon[y0 - 1, x0:x0 + size].astype(np.int64) if y0 > 0 else None
    left = recon[y0:y0 + size, x0 - 1].astype(np.int64) if x0 > 0 else None
    if mode == "DC":
        if top is not None and left is not None:
            dc = (int(top.sum()) + int(left.sum()) + size) // (2 * size)
        elif top is not None:
            dc = (int(top.sum()) + size // 2) // size
        elif left is not None:
            dc = (int(left.sum()) + size // 2) // size
        else:
            dc = 128
        return np.full((size, size), dc, dtype=np.int64)
    if mode == "H":
        col = left if left is not None else np.full(size, 128, np.int64)
        return np.repeat(col[:, None], size, axis=1)
    if mode == "V":
        row = top if top is not None else np.full(size, 128, np.int64)
        return np.repeat(row[None, :], size, axis=0)
    raise ValueError(f"unknown intra mode {mode!r}")


def chroma_mv(mv: MotionVector) -> MotionVector:
    return MotionVector(mv.dx >> 1, mv.dy >> 1)


@dataclass
class RefPicture:
    """A reconstructed reference with edge-padded planes."""

    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    pad: int
    cpad: int

    @classmethod
    def from_planes(cls, planes, search_range: int) -> "RefPicture":
        cpad = (search_range + 1) // 2 + 1
        y, u, v = planes
        return cls(
            np.pad(np.asarray(y, np.int64), search_range, mode="edge"),
            np.pad(np.asarray(u, np.int64), cpad, mode="edge"),
            np.pad(np.asarray(v, np.int64), cpad, mode="edge"),
            search_range,
            cpad,
        )

    def predict(self, y0: int, x0: int, mv: MotionVector):
        cmv = chroma_mv(mv)
        return (
            fetch(self.y, self.pad, y0, x0, mv, BLOCK),
            fetch(self.u, self.cpad, y0 // 2, x0 // 2, cmv, BLOCK // 2),
            fetch(self.v, self.cpad, y0 // 2, x0 // 2, cmv, BLOCK // 2),
        )


def average(a, b):
    return (a + b + 1) >> 1


def predict_block(mode: BlockMode, frame_type: FrameType, y0: int, x0: int, recon, fwd: Optional[RefPicture], bwd: Optional[RefPicture]):
    """Luma (16x16) and chroma (2x 8x8) prediction for ``mode``.

    ``recon`` holds the current picture's reconstructed (y, u, v) planes, used
    for intra neighbours.
    """
    if mode.kind == "INTRA":
        ry, ru, rv = recon
        return (
            intra_pred(ry, y0, x0, BLOCK, mode.intra),
            intra_pred(ru, y0 // 2, x0 // 2, BLOCK // 2, mode.intra),
            intra_pred(rv, y0 // 2, x0 // 2, BLOCK // 2, mode.intra),
        )
    if mode.kind == "SKIP":
        f = fwd.predict(y0, x0, ZERO_MV)
        if frame_type is FrameType.B:
            b = bwd.predict(y0, x0, ZERO_MV)
            return tuple(average(p, q) for p, q in zip(f, b))
        return f
    if mode.kind == "INTER_FWD":
        return fwd.predict(y0, x0, mode.mv_fwd)
    if mode.kind == "INTER_BWD":
        return bwd.predict(y0, x0, mode.mv_bwd)
    f = fwd.predict(y0, x0, mode.mv_fwd)
    b = bwd.predict(y0, x0, mode.mv_bwd)
    return tuple(average(p, q) for p, q in zip(f, b))


# ---------------------------------------------------------------- evaluation


def split8(block16: np.ndarray) -> np.ndarray:
    """(..., 16, 16) -> (..., 4, 8, 8) in raster order of the 8x8 quadrants."""
    lead = block16.shape[:-2]
    return (
        block16.reshape(lead + (2, 8, 2, 8))
        .swapaxes(-3, -2)
        .reshape(lead + (4, 8, 8))
    )


def merge8(subs: np.ndarray) -> np.ndarray:
    lead = subs.shape[:-3]
    return subs.reshape(lead + (2, 2, 8, 8)).swapaxes(-3, -2).reshape(lead + (16, 16))


def code_residual(src, pred, qp):
    """Transform/quantize ``src - pred`` over stacks of 8x8 blocks.

    Returns (levels in zigzag order, reconstruction, bits, ssd).
    """
    lev = quantize(fdct8(src - pred), qp)
    rec = np.clip(pred + idct8(dequantize(lev, qp)), 0, 255)
    zz = to_zigzag(lev)
    flat = zz.reshape(-1, 64)
    bits = block_bits(flat).reshape(zz.shape[:-1])
    ssd = ((src - rec) ** 2).sum(axis=(-2, -1))
    return zz, rec, bits, ssd


@dataclass
class BlockDecision:
    mode: BlockMode
    coded: tuple[bool, bool, bool, bool]
    levels: np.ndarray  # (6, 64) zigzag levels actually transmitted
    recon_y: np.ndarray
    recon_u: np.ndarray
    recon_v: np.ndarray
    ssd: int
    bits: int
    cost_milli: int


def evaluate_candidates(modes, preds, hbits, src, qp: int, lam_milli: int):
    """Lagrangian evaluation of all candidates for one block.

    ``preds`` is a list of (luma 16x16, u 8x8, v 8x8) predictions and ``hbits``
    the header bit count of each mode. Each luma 8x8 is transmitted only when
    that lowers its own cost; chroma residuals are always sent.

    Returns ``(index, costs, decision)``: the cheapest candidate (first in list
    order on ties), every candidate's cost ``1000*SSD + lam_milli*bits`` and
    the full decision for the winner.
    """
    sy, su, sv = (np.asarray(p, np.int64) for p in src)
    n = len(modes)
    # stack 4 luma + 2 chroma 8x8 blocks per candidate into one transform batch
    pred6 = np.empty((n, 6, 8, 8), np.int64)
    for i, (py, pu, pv) in enumerate(preds):
        pred6[i, :4] = split8(np.asarray(py))
        pred6[i, 4] = pu
        pred6[i, 5] = pv
    src6 = np.concatenate([split8(sy), su[None], sv[None]])[None]
    zz, rec, bits, ssd = code_residual(src6, pred6, qp)
    ssd_zero = ((src6[:, :4] - pred6[:, :4]) ** 2).sum(axis=(-2, -1))
    coded = 1000 * ssd[:, :4] + lam_milli * bits[:, :4] < 1000 * ssd_zero + lam_milli
    skip = np.array([m.kind == "SKIP" for m in modes])
    coded &= ~skip[:, None]
    cand_ssd = np.where(coded, ssd[:, :4], ssd_zero).sum(axis=1)
    cand_bits = np.asarray(hbits, np.int64) + np.where(
        skip, 0, np.where(coded, bits[:, :4], 1).sum(axis=1) + bits[:, 4:].sum(axis=1)
    )
    costs = 1000 * cand_ssd + lam_milli * cand_bits
    i = int(np.argmin(costs))
    c = coded[i]
    if skip[i]:
        levels = np.zeros((6, 64), np.int64)
        ry, ru, rv = (np.asarray(p, np.int64) for p in preds[i])
    else:
        levels = np.concatenate([np.where(c[:, None], zz[i, :4], 0), zz[i, 4:]])
        ry = merge8(np.where(c[:, None, None], rec[i, :4], pred6[i, :4]))
        ru, rv = rec[i, 4], rec[i, 5]
    decision = BlockDecision(
        modes[i], tuple(bool(x) for x in c), levels, ry, ru, rv,
        int(cand_ssd[i]), int(cand_bits[i]), int(costs[i]),
    )
    return i, costs, decision


def write_residual(w: BitWriter, levels: np.ndarray) -> None:
    for row in levels:
        write_block(w, row)


def read_residual(r: BitReader) -> np.ndarray:
    return np.stack([read_block(r) for _ in range(6)])


def reconstruct(pred, levels: np.ndarray, qp: int):
    """Decoder-side reconstruction from prediction and transmitted levels."""
    py, pu, pv = (np.asarray(p, np.int64) for p in pred)
    coef = dequantize(from_zigzag(levels), qp)
    res = idct8(coef)
    ry = merge8(np.clip(split8(py) + res[:4], 0, 255))
    # an all-zero luma 8x8 reconstructs to the prediction either way
    ru = np.clip(pu + res[4], 0, 255)
    rv = np.clip(pv + res[5], 0, 255)
    return ry, ru, rv
