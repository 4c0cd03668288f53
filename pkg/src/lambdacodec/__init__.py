"""Block-based hybrid video codec with adaptive B-frame Lagrange multipliers."""

from .rdo import FrameType, LambdaQuery, Profile, lambda_orig, rd_cost, select_mode
from .video_io import SequenceHeader, VideoFrame, read_raw_yuv, read_y4m, write_y4m

__version__ = "0.1.0"

__all__ = [
    "FrameType",
    "LambdaQuery",
    "Profile",
    "SequenceHeader",
    "VideoFrame",
    "lambda_orig",
    "rd_cost",
    "read_raw_yuv",
    "read_y4m",
    "select_mode",
    "write_y4m",
]
