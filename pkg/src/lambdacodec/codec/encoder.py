"""Sequence encoder: GOP planning, per-block RDO and the lambda policy."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .. import adaptive
from ..adaptive import ControllerParams
from ..rdo import FrameType, LambdaQuery, Profile, check_qp, lambda_orig
from ..scene_cut import detect_cuts
from ..video_io import VideoFrame
from .bits import BitWriter
from .blocks import (
    INTRA_MODES,
    SKIP,
    BlockMode,
    RefPicture,
    evaluate_candidates,
    header_bits,
    predict_block,
    write_header,
    write_residual,
)
from .gop import FramePlan, assign_frame_types
from .motion import BLOCK, MotionVector, MvField, best_mv, ssd_tables
from .stream import Bitstream

log = logging.getLogger(__name__)

LAMBDA_FIELD_MAX = 2**32 - 1


@dataclass
class EncoderConfig:
    qp: int = 32
    gop_length: int = 4
    profile: Profile = Profile.H264_LIKE
    hevc_p: float = 0.5
    adaptive: bool = False
    lambda_scale_k: float = 1.0
    search_range: int = 16
    block_size: int = BLOCK
    scene_cut_threshold: float = 0.5
    # override the per-profile model constants and dead band
    controller_params: Optional[ControllerParams] = None
    # apply the model factor to lambda_orig rather than lambda_last
    lambda_base_orig: bool = False

    def __post_init__(self):
        check_qp(self.qp)
        self.profile = Profile.parse(self.profile)
        if self.gop_length < 1:
            raise ValueError("gop_length must be positive")
        if self.block_size != BLOCK:
            raise ValueError("block size is fixed at 16")
        if self.hevc_p <= 0:
            raise ValueError("hevc_p must be positive")
        if self.lambda_scale_k <= 0:
            raise ValueError("lambda_scale_k must be positive")
        if self.adaptive and self.lambda_scale_k != 1.0:
            raise ValueError("adaptive lambda and a fixed k scale are mutually exclusive")
        if not 1 <= self.search_range <= 255:
            raise ValueError("search_range must lie in [1, 255]")
        if not 0.0 <= self.scene_cut_threshold <= 1.0:
            raise ValueError("scene_cut_threshold must lie in [0, 1]")

    @property
    def n_b(self) -> int:
        return max(self.gop_length - 1, 0)

    def lambda_for(self, frame_type: FrameType) -> float:
        return lambda_orig(LambdaQuery(self.qp, frame_type, self.profile, self.n_b, self.hevc_p))


@dataclass
class BlockRecord:
    by: int
    bx: int
    mode: BlockMode
    coded: tuple
    pred_fwd: MotionVector
    pred_bwd: MotionVector
    ssd: int
    bits: int
    cost_milli: int


@dataclass
class FrameStats:
    index: int
    coding_order: int
    frame_type: FrameType
    lambda_used: float
    bits: int
    mse_y: float
    ratio: Optional[float] = None
    dead_band: bool = False
    adapted: bool = False
    blocks: list = field(default_factory=list, repr=False)


@dataclass
class EncodeResult:
    bitstream: Bitstream
    stats: list[FrameStats]
    recon: list[VideoFrame]  # display order


def _planes(frame: VideoFrame):
    return tuple(np.asarray(p, np.int64) for p in frame.planes())


def encode_frame(src, frame_type: FrameType, fwd: Optional[RefPicture], bwd: Optional[RefPicture], qp: int, lam_milli: int, search_range: int, w: BitWriter, keep_blocks: bool = False):
    """Code one picture's blocks into ``w``; returns (recon planes, ssd_y, block records)."""
    sy, su, sv = src
    h, wd = sy.shape
    ry = np.zeros_like(sy)
    ru = np.zeros_like(su)
    rv = np.zeros_like(sv)
    recon = (ry, ru, rv)
    t_fwd = ssd_tables(sy, fwd.y, search_range) if fwd is not None else None
    t_bwd = ssd_tables(sy, bwd.y, search_range) if bwd is not None else None
    records = []
    total_ssd = 0
    field_f = MvField(h // BLOCK, wd // BLOCK)
    field_b = MvField(h // BLOCK, wd // BLOCK)
    for by in range(h // BLOCK):
        for bx in range(wd // BLOCK):
            y0, x0 = by * BLOCK, bx * BLOCK
            pf, pb = field_f.predictor(by, bx), field_b.predictor(by, bx)
            modes: list[BlockMode] = []
            if frame_type is not FrameType.I:
                modes.append(SKIP)
                mv_f, _, _ = best_mv(t_fwd[by, bx], pf, search_range, lam_milli)
                modes.append(BlockMode("INTER_FWD", mv_fwd=mv_f))
                if frame_type is FrameType.B:
                    mv_b, _, _ = best_mv(t_bwd[by, bx], pb, search_range, lam_milli)
                    modes.append(BlockMode("INTER_BWD", mv_bwd=mv_b))
                    modes.append(BlockMode("INTER_BI", mv_fwd=mv_f, mv_bwd=mv_b))
            modes.extend(BlockMode("INTRA", intra=m) for m in INTRA_MODES)
            preds = [predict_block(m, frame_type, y0, x0, recon, fwd, bwd) for m in modes]
            hbits = [header_bits(frame_type, m, pf, pb) for m in modes]
            src_blk = (
                sy[y0:y0 + BLOCK, x0:x0 + BLOCK],
                su[y0 // 2:(y0 + BLOCK) // 2, x0 // 2:(x0 + BLOCK) // 2],
                sv[y0 // 2:(y0 + BLOCK) // 2, x0 // 2:(x0 + BLOCK) // 2],
            )
            _, _, d = evaluate_candidates(modes, preds, hbits, src_blk, qp, lam_milli)
            start = w.nbits
            write_header(w, frame_type, d.mode, pf, pb)
            if d.mode.kind != "SKIP":
                write_residual(w, d.levels)
            if w.nbits - start != d.bits:
                raise AssertionError(f"rate mismatch at block ({by},{bx}): {w.nbits - start} != {d.bits}")
            ry[y0:y0 + BLOCK, x0:x0 + BLOCK] = d.recon_y
            ru[y0 // 2:(y0 + BLOCK) // 2, x0 // 2:(x0 + BLOCK) // 2] = d.recon_u
            rv[y0 // 2:(y0 + BLOCK) // 2, x0 // 2:(x0 + BLOCK) // 2] = d.recon_v
            total_ssd += d.ssd
            if keep_blocks:
                records.append(BlockRecord(by, bx, d.mode, d.coded, pf, pb, d.ssd, d.bits, d.cost_milli))
            field_f.set(by, bx, d.mode.mv_fwd if d.mode.uses_fwd else None)
            field_b.set(by, bx, d.mode.mv_bwd if d.mode.uses_bwd else None)
    return recon, total_ssd, records


def write_frame_header(w: BitWriter, plan: FramePlan, lam_milli: int) -> None:
    w.write(int(plan.frame_type), 2)
    w.write(plan.display, 16)
    w.write(lam_milli, 32)
    if plan.frame_type is not FrameType.I:
        w.ue(plan.display - plan.fwd_ref - 1)
    if plan.frame_type is FrameType.B:
        w.ue(plan.bwd_ref - plan.display - 1)


def _check_frames(frames: Sequence[VideoFrame]) -> tuple[int, int]:
    if not frames:
        raise ValueError("need at least one frame")
    w, h = frames[0].width, frames[0].height
    for f in frames:
        if (f.width, f.height) != (w, h):
            raise ValueError("all frames must share the same dimensions")
    if w % BLOCK or h % BLOCK:
        raise ValueError(f"frame size {w}x{h} is not a multiple of {BLOCK}")
    if len(frames) >= 1 << 16 or w >= 1 << 16 or h >= 1 << 16:
        raise ValueError("sequence too large for the container fields")
    return w, h


def encode(frames: Sequence[VideoFrame], config: EncoderConfig, frame_rate=(25, 1), keep_blocks: bool = False) -> EncodeResult:
    """Encode ``frames`` (display order) and return stream, per-frame stats and reconstruction."""
    width, height = _check_frames(frames)
    cfg = config
    s = cfg.search_range
    cuts = detect_cuts(frames, cfg.scene_cut_threshold)
    plan = assign_frame_types(len(frames), cfg.gop_length, cuts)
    lam = {ft: cfg.lambda_for(ft) for ft in FrameType}
    ctrl = None
    if cfg.adaptive:
        ctrl = adaptive.new_state(
            cfg.profile, lam[FrameType.B], max(cfg.n_b, 1), cfg.controller_params, cfg.lambda_base_orig
        )

    writer = BitWriter()
    recon: dict[int, tuple] = {}
    refpics: dict[int, RefPicture] = {}
    stats: list[FrameStats] = []
    for order, fp in enumerate(plan):
        ftype = fp.frame_type
        ratio, dead, adapted = None, False, False
        if ftype is FrameType.I:
            lam_used = lam[FrameType.I]
            if ctrl is not None:
                adaptive.reset(ctrl, lam[FrameType.B])
        elif ftype is FrameType.P:
            lam_used = lam[FrameType.P]
        elif ctrl is not None:
            if adaptive.ready(ctrl) and ctrl.d_b == 0:
                # all B frames so far were lossless: no ratio to act on
                lam_used = ctrl.lambda_last
            else:
                adapted = adaptive.ready(ctrl)
                lam_used, _ = adaptive.next_b_lambda(ctrl, lam[FrameType.B])
                ratio, dead = ctrl.last_ratio, ctrl.last_in_dead_band
        else:
            lam_used = cfg.lambda_scale_k * lam[FrameType.B]
        lam_milli = int(round(lam_used * 1000))
        if lam_milli > LAMBDA_FIELD_MAX:
            raise OverflowError(f"lambda {lam_used} exceeds the frame header field")

        start = writer.nbits
        write_frame_header(writer, fp, lam_milli)
        src = _planes(frames[fp.display])
        fwd = refpics.get(fp.fwd_ref) if fp.fwd_ref is not None else None
        bwd = refpics.get(fp.bwd_ref) if fp.bwd_ref is not None else None
        planes, ssd, records = encode_frame(src, ftype, fwd, bwd, cfg.qp, lam_milli, s, writer, keep_blocks)
        recon[fp.display] = planes
        if ftype is not FrameType.B:
            refpics[fp.display] = RefPicture.from_planes(planes, s)
        mse = ssd / (width * height)
        if ctrl is not None and ftype is not FrameType.I:
            adaptive.record_distortion(ctrl, ftype, mse)
        stats.append(
            FrameStats(fp.display, order, ftype, lam_used, writer.nbits - start, mse, ratio, dead, adapted, records)
        )
        # B frames never serve as references
        done_anchor = [k for k in refpics if k < (fp.fwd_ref if fp.fwd_ref is not None else -1)]
        for k in done_anchor:
            del refpics[k]

    payload = writer.to_bytes()
    stream = Bitstream(
        width, height, len(frames), cfg.qp, payload, writer.nbits, int(frame_rate[0]), int(frame_rate[1]), s
    )
    out_frames = [
        VideoFrame(*(p.astype(np.uint8) for p in recon[i]), index=i) for i in range(len(frames))
    ]
    return EncodeResult(stream, stats, out_frames)


def encode_sequence(frames: Sequence[VideoFrame], config: EncoderConfig, frame_rate=(25, 1)):
    """Encode and return ``(Bitstream, [FrameStats, ...])`` in coding order."""
    res = encode(frames, config, frame_rate)
    return res.bitstream, res.stats
