"""Brute-force re-evaluation of block mode decisions.

Written independently of the encoder's vectorised path: predictions use
explicit index clamping, motion search is a plain double loop, residual bits
come from actually writing the syntax, and the per-8x8 coded/not-coded
choice is enumerated over all 16 patterns.
"""

from __future__ import annotations

import itertools

import numpy as np

from lambdacodec.codec.bits import BitWriter, se_len, ue_len
from lambdacodec.codec.gop import assign_frame_types
from lambdacodec.codec.residual import write_block
from lambdacodec.codec.transform import dequantize, fdct8, idct8, quantize, to_zigzag
from lambdacodec.rdo import FrameType
from lambdacodec.scene_cut import detect_cuts

CODE_ORDER = {
    FrameType.I: ["INTRA:DC", "INTRA:H", "INTRA:V"],
    FrameType.P: ["INTER_FWD", "INTRA:DC", "INTRA:H", "INTRA:V"],
    FrameType.B: ["INTER_FWD", "INTER_BWD", "INTER_BI", "INTRA:DC", "INTRA:H", "INTRA:V"],
}


def clamp_fetch(plane, y0, x0, dx, dy, size):
    h, w = plane.shape
    ys = np.clip(np.arange(y0, y0 + size) - dy, 0, h - 1)
    xs = np.clip(np.arange(x0, x0 + size) - dx, 0, w - 1)
    return plane[np.ix_(ys, xs)].astype(np.int64)


def inter_pred(ref, y0, x0, mv):
    dx, dy = mv
    return (
        clamp_fetch(ref[0], y0, x0, dx, dy, 16),
        clamp_fetch(ref[1], y0 // 2, x0 // 2, dx >> 1, dy >> 1, 8),
        clamp_fetch(ref[2], y0 // 2, x0 // 2, dx >> 1, dy >> 1, 8),
    )


def intra(plane, y0, x0, size, mode):
    top = [int(plane[y0 - 1, x]) for x in range(x0, x0 + size)] if y0 else None
    left = [int(plane[y, x0 - 1]) for y in range(y0, y0 + size)] if x0 else None
    out = np.empty((size, size), np.int64)
    for y in range(size):
        for x in range(size):
            if mode == "H":
                out[y, x] = left[y] if left else 128
            elif mode == "V":
                out[y, x] = top[x] if top else 128
            elif top and left:
                out[y, x] = (sum(top) + sum(left) + size) // (2 * size)
            elif top or left:
                out[y, x] = (sum(top or left) + size // 2) // size
            else:
                out[y, x] = 128
    return out


def median_pred(mvs, by, bx, nbx):
    """mvs: dict (by, bx) -> (dx, dy), or None for blocks not using the direction."""
    def get(y, x):
        v = mvs.get((y, x))
        return v if v is not None else (0, 0)

    left = get(by, bx - 1) if bx else (0, 0)
    if by == 0:
        return left
    top = get(by - 1, bx)
    diag = get(by - 1, bx + 1) if bx + 1 < nbx else (get(by - 1, bx - 1) if bx else (0, 0))
    return tuple(sorted(c)[1] for c in zip(left, top, diag))


def search(src_y, ref_y, y0, x0, pred, s, lam_milli):
    """Every mv in the window, gathered with clamped indices; ties per the stated order."""
    h, w = ref_y.shape
    d = np.arange(-s, s + 1)
    ys = np.clip(y0 + np.arange(16)[None, :] - d[:, None], 0, h - 1)  # (n, 16) per dy
    xs = np.clip(x0 + np.arange(16)[None, :] - d[:, None], 0, w - 1)  # (n, 16) per dx
    cand = ref_y[ys[:, None, :, None], xs[None, :, None, :]].astype(np.int64)
    blk = src_y[y0:y0 + 16, x0:x0 + 16].astype(np.int64)
    ssd = ((cand - blk) ** 2).sum(axis=(2, 3))
    bits_x = np.array([se_len(v - pred[0]) for v in d.tolist()])
    bits_y = np.array([se_len(v - pred[1]) for v in d.tolist()])
    cost = 1000 * ssd + lam_milli * (bits_y[:, None] + bits_x[None, :])
    dy, dx = np.meshgrid(d, d, indexing="ij")
    k = np.lexsort((dx.ravel(), dy.ravel(), (np.abs(dx) + np.abs(dy)).ravel(), cost.ravel()))[0]
    return int(dx.ravel()[k]), int(dy.ravel()[k])


def _bits(levels):
    w = BitWriter()
    write_block(w, levels)
    return w.nbits


def _code8(src, pred, qp):
    lev = quantize(fdct8(src - pred), qp)
    rec = np.clip(pred + idct8(dequantize(lev, qp)), 0, 255)
    return int(((src - rec) ** 2).sum()), _bits(to_zigzag(lev))


def mode_cost(src, pred, header_bits, qp, lam_milli, skip):
    """Best Lagrangian cost of one mode over all 16 luma coded/not-coded patterns."""
    sy, su, sv = src
    py, pu, pv = pred
    if skip:
        return 1000 * int(((sy - py) ** 2).sum()) + lam_milli * header_bits
    quads = [(y, x) for y in (0, 8) for x in (0, 8)]
    coded = [_code8(sy[y:y + 8, x:x + 8], py[y:y + 8, x:x + 8], qp) for y, x in quads]
    plain = [int(((sy[y:y + 8, x:x + 8] - py[y:y + 8, x:x + 8]) ** 2).sum()) for y, x in quads]
    chroma_bits = _code8(su, pu, qp)[1] + _code8(sv, pv, qp)[1]
    best = None
    for pattern in itertools.product((False, True), repeat=4):
        ssd = sum(c[0] if on else p for c, p, on in zip(coded, plain, pattern))
        bits = header_bits + chroma_bits + sum(c[1] if on else 1 for c, on in zip(coded, pattern))
        cost = 1000 * ssd + lam_milli * bits
        best = cost if best is None else min(best, cost)
    return best


def header_len(ftype, key, mvd=()):
    n = 0 if ftype is FrameType.I else 1
    n += ue_len(CODE_ORDER[ftype].index(key))
    return n + sum(se_len(v) for v in mvd)


def frame_costs(frames, result, stats, search_range, qp):
    """Yield (block record, recorded cost, {mode key: oracle cost}) for one coded frame."""
    plan = {p.display: p for p in assign_frame_types(len(frames), 4, detect_cuts(frames))}
    fp = plan[stats.index]
    ftype = stats.frame_type
    lam_milli = int(round(stats.lambda_used * 1000))
    src_all = [p.astype(np.int64) for p in frames[stats.index].planes()]
    rec_all = [p.astype(np.int64) for p in result.recon[stats.index].planes()]
    fwd = [p.astype(np.int64) for p in result.recon[fp.fwd_ref].planes()] if fp.fwd_ref is not None else None
    bwd = [p.astype(np.int64) for p in result.recon[fp.bwd_ref].planes()] if fp.bwd_ref is not None else None
    mv_f, mv_b = {}, {}
    for rec in stats.blocks:
        by, bx = rec.by, rec.bx
        y0, x0 = by * 16, bx * 16
        src = (
            src_all[0][y0:y0 + 16, x0:x0 + 16],
            src_all[1][y0 // 2:y0 // 2 + 8, x0 // 2:x0 // 2 + 8],
            src_all[2][y0 // 2:y0 // 2 + 8, x0 // 2:x0 // 2 + 8],
        )
        nbx = rec_all[0].shape[1] // 16
        pf, pb = median_pred(mv_f, by, bx, nbx), median_pred(mv_b, by, bx, nbx)
        assert (pf, pb) == (tuple(rec.pred_fwd), tuple(rec.pred_bwd)), "mv predictor mismatch"
        costs = {}
        for m in ("DC", "H", "V"):
            pred = (
                intra(rec_all[0], y0, x0, 16, m),
                intra(rec_all[1], y0 // 2, x0 // 2, 8, m),
                intra(rec_all[2], y0 // 2, x0 // 2, 8, m),
            )
            costs["INTRA:" + m] = mode_cost(src, pred, header_len(ftype, "INTRA:" + m), qp, lam_milli, False)
        if ftype is not FrameType.I:
            f_mv = search(src_all[0], fwd[0], y0, x0, pf, search_range, lam_milli)
            pf_blk = inter_pred(fwd, y0, x0, f_mv)
            mvd_f = (f_mv[0] - pf[0], f_mv[1] - pf[1])
            costs["INTER_FWD"] = mode_cost(src, pf_blk, header_len(ftype, "INTER_FWD", mvd_f), qp, lam_milli, False)
            zero_f = inter_pred(fwd, y0, x0, (0, 0))
            if ftype is FrameType.P:
                costs["SKIP"] = mode_cost(src, zero_f, 1, qp, lam_milli, True)
            else:
                b_mv = search(src_all[0], bwd[0], y0, x0, pb, search_range, lam_milli)
                pb_blk = inter_pred(bwd, y0, x0, b_mv)
                mvd_b = (b_mv[0] - pb[0], b_mv[1] - pb[1])
                costs["INTER_BWD"] = mode_cost(src, pb_blk, header_len(ftype, "INTER_BWD", mvd_b), qp, lam_milli, False)
                bi = tuple((a + b + 1) >> 1 for a, b in zip(pf_blk, pb_blk))
                costs["INTER_BI"] = mode_cost(src, bi, header_len(ftype, "INTER_BI", mvd_f + mvd_b), qp, lam_milli, False)
                zero_b = inter_pred(bwd, y0, x0, (0, 0))
                avg0 = tuple((a + b + 1) >> 1 for a, b in zip(zero_f, zero_b))
                costs["SKIP"] = mode_cost(src, avg0, 1, qp, lam_milli, True)
        mode = rec.mode
        mv_f[(by, bx)] = tuple(mode.mv_fwd) if mode.uses_fwd else None
        mv_b[(by, bx)] = tuple(mode.mv_bwd) if mode.uses_bwd else None
        yield rec, costs
