"""Miniature block-based hybrid codec (I/P/B, 16x16 blocks, Exp-Golomb)."""

from .bits import BitReader, BitstreamError, BitWriter
from .blocks import BlockMode
from .decoder import decode_sequence
from .encoder import EncodeResult, EncoderConfig, FrameStats, encode, encode_sequence
from .gop import FramePlan, assign_frame_types
from .motion import MotionVector, motion_search
from .stream import Bitstream
from .transform import dequantize, fdct8, idct8, qstep, quantize

__all__ = [
    "BitReader",
    "BitWriter",
    "BitstreamError",
    "Bitstream",
    "BlockMode",
    "EncodeResult",
    "EncoderConfig",
    "FramePlan",
    "FrameStats",
    "MotionVector",
    "assign_frame_types",
    "decode_sequence",
    "dequantize",
    "encode",
    "encode_sequence",
    "fdct8",
    "idct8",
    "motion_search",
    "qstep",
    "quantize",
]
