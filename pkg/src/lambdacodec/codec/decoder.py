"""Bitstream decoder; mirrors the encoder's reconstruction exactly."""

from __future__ import annotations

import numpy as np

from ..rdo import FrameType
from ..video_io import VideoFrame
from .bits import BitReader, BitstreamError
from .blocks import RefPicture, predict_block, read_header, read_residual, reconstruct
from .motion import BLOCK, MvField
from .stream import Bitstream


def _decode_frame(r: BitReader, ftype: FrameType, width: int, height: int, qp: int, fwd, bwd):
    ry = np.zeros((height, width), np.int64)
    ru = np.zeros((height // 2, width // 2), np.int64)
    rv = np.zeros((height // 2, width // 2), np.int64)
    recon = (ry, ru, rv)
    field_f = MvField(height // BLOCK, width // BLOCK)
    field_b = MvField(height // BLOCK, width // BLOCK)
    for by in range(height // BLOCK):
        for bx in range(width // BLOCK):
            y0, x0 = by * BLOCK, bx * BLOCK
            pf, pb = field_f.predictor(by, bx), field_b.predictor(by, bx)
            mode = read_header(r, ftype, pf, pb)
            for ref, used, mv in ((fwd, mode.uses_fwd, mode.mv_fwd), (bwd, mode.uses_bwd, mode.mv_bwd)):
                if used and (abs(mv.dx) > ref.pad or abs(mv.dy) > ref.pad):
                    raise BitstreamError(f"motion vector {mv} outside the reference window")
            pred = predict_block(mode, ftype, y0, x0, recon, fwd, bwd)
            if mode.kind == "SKIP":
                levels = np.zeros((6, 64), np.int64)
            else:
                levels = read_residual(r)
            by_, bu, bv = reconstruct(pred, levels, qp)
            ry[y0:y0 + BLOCK, x0:x0 + BLOCK] = by_
            ru[y0 // 2:(y0 + BLOCK) // 2, x0 // 2:(x0 + BLOCK) // 2] = bu
            rv[y0 // 2:(y0 + BLOCK) // 2, x0 // 2:(x0 + BLOCK) // 2] = bv
            field_f.set(by, bx, mode.mv_fwd if mode.uses_fwd else None)
            field_b.set(by, bx, mode.mv_bwd if mode.uses_bwd else None)
    return recon


def decode_sequence(stream: Bitstream | bytes) -> list[VideoFrame]:
    """Decode to frames in display order; vectors beyond the declared search range are rejected."""
    if isinstance(stream, (bytes, bytearray)):
        stream = Bitstream.from_bytes(bytes(stream))
    r = stream.reader()
    w, h = stream.width, stream.height
    if w % BLOCK or h % BLOCK:
        raise BitstreamError(f"frame size {w}x{h} is not a multiple of {BLOCK}")
    decoded: dict[int, tuple] = {}
    refs: dict[int, RefPicture] = {}
    for _ in range(stream.frame_count):
        code = r.read(2)
        if code > 2:
            raise BitstreamError(f"invalid frame type code {code}")
        ftype = FrameType(code)
        display = r.read(16)
        r.read(32)  # lambda metadata
        fwd = bwd = None
        if ftype is not FrameType.I:
            fref = display - r.ue() - 1
            fwd = refs.get(fref)
            if fwd is None:
                raise BitstreamError(f"frame {display} references undecoded anchor {fref}")
        if ftype is FrameType.B:
            bref = display + r.ue() + 1
            bwd = refs.get(bref)
            if bwd is None:
                raise BitstreamError(f"frame {display} references undecoded anchor {bref}")
        if display >= stream.frame_count or display in decoded:
            raise BitstreamError(f"bad display index {display}")
        planes = _decode_frame(r, ftype, w, h, stream.qp, fwd, bwd)
        decoded[display] = planes
        if ftype is not FrameType.B:
            refs[display] = RefPicture.from_planes(planes, stream.search_range)
    if r.remaining():
        raise BitstreamError(f"{r.remaining()} undecoded bits before declared end of stream")
    return [
        VideoFrame(*(p.astype(np.uint8) for p in decoded[i]), index=i) for i in range(stream.frame_count)
    ]
