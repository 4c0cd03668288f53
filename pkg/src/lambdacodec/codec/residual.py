"""Run-length / Exp-Golomb coding of one 8x8 block of quantized levels.

Syntax per block (levels in zigzag order)::

    ue(nnz)
    repeat nnz: ue(zero run before coefficient), ue(|level| - 1), sign bit
"""

from __future__ import annotations

import numpy as np

from .bits import BitReader, BitstreamError, BitWriter, ue_len_array

_POS = np.arange(64)


def block_bits(levels_zz: np.ndarray) -> np.ndarray:
    """Exact coded length of each row of an (N, 64) zigzag level array."""
    lv = np.atleast_2d(np.asarray(levels_zz, dtype=np.int64))
    nz = lv != 0
    nnz = nz.sum(axis=1)
    last = np.where(nz, _POS, -1)
    prev = np.maximum.accumulate(last, axis=1)
    prev = np.concatenate([np.full((lv.shape[0], 1), -1), prev[:, :-1]], axis=1)
    run = _POS - prev - 1
    per = ue_len_array(np.where(nz, run, 0)) + ue_len_array(np.maximum(np.abs(lv) - 1, 0)) + 1
    return ue_len_array(nnz) + np.where(nz, per, 0).sum(axis=1)


def write_block(w: BitWriter, levels_zz) -> int:
    start = w.nbits
    lv = np.asarray(levels_zz)
    idx = np.flatnonzero(lv)
    w.ue(len(idx))
    prev = -1
    for i in idx.tolist():
        v = int(lv[i])
        w.ue(i - prev - 1)
        w.ue(abs(v) - 1)
        w.bit(v < 0)
        prev = i
    return w.nbits - start


def read_block(r: BitReader) -> np.ndarray:
    out = np.zeros(64, dtype=np.int64)
    nnz = r.ue()
    if nnz > 64:
        raise BitstreamError(f"block claims {nnz} nonzero coefficients")
    pos = -1
    for _ in range(nnz):
        pos += r.ue() + 1
        if pos >= 64:
            raise BitstreamError("coefficient run past end of block")
        mag = r.ue() + 1
        out[pos] = -mag if r.bit() else mag
    return out
