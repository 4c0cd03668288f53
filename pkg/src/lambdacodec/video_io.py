"""Planar 4:2:0 frame buffers and Y4M / raw I420 file I/O."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Sequence

import numpy as np

__all__ = [
    "VideoFrame",
    "SequenceHeader",
    "VideoIOError",
    "Y4MHeaderError",
    "UnsupportedColourspaceError",
    "TruncatedFrameError",
    "DimensionError",
    "read_y4m",
    "write_y4m",
    "read_raw_yuv",
    "write_raw_yuv",
    "load_video",
    "frame_size",
]

Y4M_SIGNATURE = b"YUV4MPEG2"
_C420_TAGS = {"420", "420jpeg", "420paldv", "420mpeg2"}


class VideoIOError(ValueError):
    """Base class for malformed or unsupported video input."""


class Y4MHeaderError(VideoIOError):
    pass


class UnsupportedColourspaceError(VideoIOError):
    pass


class TruncatedFrameError(VideoIOError):
    pass


class DimensionError(VideoIOError):
    pass


def frame_size(width: int, height: int) -> int:
    """Bytes in one 8-bit I420 picture."""
    return width * height * 3 // 2


@dataclass(eq=False)
class VideoFrame:
    """One 8-bit 4:2:0 picture. ``plane_u``/``plane_v`` are half size in each axis."""

    plane_y: np.ndarray
    plane_u: np.ndarray
    plane_v: np.ndarray
    index: int = 0

    def __post_init__(self):
        planes = []
        for name in ("plane_y", "plane_u", "plane_v"):
            arr = np.asarray(getattr(self, name))
            if arr.ndim != 2:
                raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
            if arr.dtype != np.uint8:
                if arr.size and (arr.min() < 0 or arr.max() > 255):
                    raise VideoIOError(f"{name} samples outside [0, 255]")
                arr = arr.astype(np.uint8)
            planes.append(arr)
        self.plane_y, self.plane_u, self.plane_v = planes
        h, w = self.plane_y.shape
        if w <= 0 or h <= 0 or w % 2 or h % 2:
            raise DimensionError(f"frame dimensions must be positive and even, got {w}x{h}")
        for name in ("plane_u", "plane_v"):
            if getattr(self, name).shape != (h // 2, w // 2):
                raise DimensionError(
                    f"{name} has shape {getattr(self, name).shape}, expected {(h // 2, w // 2)}"
                )
        if self.index < 0:
            raise ValueError("frame index must be nonnegative")

    @property
    def width(self) -> int:
        return self.plane_y.shape[1]

    @property
    def height(self) -> int:
        return self.plane_y.shape[0]

    @classmethod
    def blank(cls, width: int, height: int, luma: int = 128, chroma: int = 128, index: int = 0):
        return cls(
            np.full((height, width), luma, np.uint8),
            np.full((height // 2, width // 2), chroma, np.uint8),
            np.full((height // 2, width // 2), chroma, np.uint8),
            index,
        )

    @classmethod
    def from_bytes(cls, data: bytes, width: int, height: int, index: int = 0) -> "VideoFrame":
        buf = np.frombuffer(data, dtype=np.uint8)
        n_y = width * height
        n_c = n_y // 4
        return cls(
            buf[:n_y].reshape(height, width).copy(),
            buf[n_y:n_y + n_c].reshape(height // 2, width // 2).copy(),
            buf[n_y + n_c:n_y + 2 * n_c].reshape(height // 2, width // 2).copy(),
            index,
        )

    def to_bytes(self) -> bytes:
        return self.plane_y.tobytes() + self.plane_u.tobytes() + self.plane_v.tobytes()

    def planes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.plane_y, self.plane_u, self.plane_v

    def same_samples(self, other: "VideoFrame") -> bool:
        return all(np.array_equal(a, b) for a, b in zip(self.planes(), other.planes()))


@dataclass
class SequenceHeader:
    width: int
    height: int
    frame_rate_num: int = 25
    frame_rate_den: int = 1
    frame_count: int = 0
    extra_tags: list[str] = field(default_factory=list, compare=False)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.width % 2 or self.height % 2:
            raise DimensionError(f"dimensions must be positive and even, got {self.width}x{self.height}")
        if self.frame_rate_num <= 0 or self.frame_rate_den <= 0:
            raise VideoIOError("frame rate must be a positive ratio")

    @property
    def fps(self) -> float:
        return self.frame_rate_num / self.frame_rate_den


def _as_stream(source) -> BinaryIO:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return io.BytesIO(bytes(source))
    if isinstance(source, (str, os.PathLike)):
        return open(source, "rb")
    return source


def _parse_header(line: bytes) -> SequenceHeader:
    try:
        text = line.decode("ascii")
    except UnicodeDecodeError as exc:
        raise Y4MHeaderError("header is not ASCII") from exc
    tokens = text.split(" ")
    if tokens[0] != Y4M_SIGNATURE.decode():
        raise Y4MHeaderError(f"bad signature {tokens[0]!r}")
    width = height = None
    num, den = 25, 1
    extra = []
    for tok in tokens[1:]:
        if not tok:
            continue
        key, val = tok[0], tok[1:]
        try:
            if key == "W":
                width = int(val)
            elif key == "H":
                height = int(val)
            elif key == "F":
                n, d = val.split(":")
                num, den = int(n), int(d)
            elif key == "C":
                if val not in _C420_TAGS:
                    raise UnsupportedColourspaceError(f"colourspace C{val} is not 8-bit 4:2:0")
                extra.append(tok)
            elif key in "IAX":
                # interlacing, aspect ratio, extensions: parsed and ignored
                extra.append(tok)
            else:
                raise Y4MHeaderError(f"unknown header tag {tok!r}")
        except ValueError as exc:
            if isinstance(exc, VideoIOError):
                raise
            raise Y4MHeaderError(f"malformed tag {tok!r}") from exc
    if width is None or height is None:
        raise Y4MHeaderError("header lacks W or H")
    try:
        return SequenceHeader(width, height, num, den, 0, extra)
    except VideoIOError as exc:
        raise Y4MHeaderError(str(exc)) from exc


def _read_line(stream: BinaryIO, limit: int = 4096) -> bytes:
    out = bytearray()
    while len(out) < limit:
        ch = stream.read(1)
        if not ch:
            return bytes(out)
        if ch == b"\n":
            return bytes(out)
        out += ch
    raise Y4MHeaderError("header line too long")


def read_y4m(source) -> tuple[SequenceHeader, list[VideoFrame]]:
    """Parse a Y4M stream (bytes, path or binary file object).

    Raises :class:`Y4MHeaderError`, :class:`UnsupportedColourspaceError` or
    :class:`TruncatedFrameError` depending on what is wrong with the input.
    """
    stream = _as_stream(source)
    try:
        first = stream.read(len(Y4M_SIGNATURE))
        if first != Y4M_SIGNATURE:
            raise Y4MHeaderError("stream does not start with YUV4MPEG2")
        header = _parse_header(first + _read_line(stream))
        size = frame_size(header.width, header.height)
        frames = []
        while True:
            marker = stream.read(5)
            if not marker:
                break
            if marker != b"FRAME":
                raise Y4MHeaderError(f"expected FRAME marker, got {marker!r}")
            _read_line(stream)
            payload = stream.read(size)
            if len(payload) != size:
                raise TruncatedFrameError(
                    f"frame {len(frames)}: expected {size} bytes, got {len(payload)}"
                )
            frames.append(VideoFrame.from_bytes(payload, header.width, header.height, len(frames)))
        header.frame_count = len(frames)
        return header, frames
    finally:
        if stream is not source and not isinstance(source, (bytes, bytearray, memoryview)):
            stream.close()


def write_y4m(header: SequenceHeader, frames: Iterable[VideoFrame], sink) -> None:
    """Write ``frames`` as Y4M to a path or binary file object."""
    frames = list(frames)
    for f in frames:
        if (f.width, f.height) != (header.width, header.height):
            raise DimensionError(
                f"frame {f.index} is {f.width}x{f.height}, header says {header.width}x{header.height}"
            )
    line = f"YUV4MPEG2 W{header.width} H{header.height} F{header.frame_rate_num}:{header.frame_rate_den} Ip C420jpeg\n"
    own = isinstance(sink, (str, os.PathLike))
    stream = open(sink, "wb") if own else sink
    try:
        stream.write(line.encode("ascii"))
        for f in frames:
            stream.write(b"FRAME\n")
            stream.write(f.to_bytes())
    finally:
        if own:
            stream.close()


def read_raw_yuv(source, width: int, height: int) -> list[VideoFrame]:
    """Split headerless planar I420 data into frames."""
    if width <= 0 or height <= 0 or width % 2 or height % 2:
        raise DimensionError(f"dimensions must be positive and even, got {width}x{height}")
    stream = _as_stream(source)
    try:
        data = stream.read()
    finally:
        if stream is not source and not isinstance(source, (bytes, bytearray, memoryview)):
            stream.close()
    size = frame_size(width, height)
    if len(data) % size:
        raise TruncatedFrameError(
            f"stream length {len(data)} is not a multiple of the {size}-byte frame size"
        )
    return [
        VideoFrame.from_bytes(data[i * size:(i + 1) * size], width, height, i)
        for i in range(len(data) // size)
    ]


def write_raw_yuv(frames: Sequence[VideoFrame], sink) -> None:
    own = isinstance(sink, (str, os.PathLike))
    stream = open(sink, "wb") if own else sink
    try:
        for f in frames:
            stream.write(f.to_bytes())
    finally:
        if own:
            stream.close()


def load_video(path, width: int | None = None, height: int | None = None, fps=(25, 1)):
    """Read a ``.y4m`` file, or raw I420 when ``width`` and ``height`` are given."""
    path = os.fspath(path)
    if width is None and height is None:
        return read_y4m(path)
    if width is None or height is None:
        raise DimensionError("raw YUV input needs both width and height")
    frames = read_raw_yuv(path, width, height)
    return SequenceHeader(width, height, fps[0], fps[1], len(frames)), frames
