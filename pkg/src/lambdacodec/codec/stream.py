"""The ``LFG1`` container.

Layout (all fields big-endian, bit-packed)::

    'LFG1'            4 bytes magic
    version           8 bits   (currently 1)
    width, height     16 bits each
    fps num, den      16 bits each
    frame count       16 bits
    qp                8 bits
    search range      8 bits
    total_bits        32 bits  payload length in bits
    payload           ceil(total_bits / 8) bytes, zero padded

Payload = one record per frame in coding order::

    frame type        2 bits   (0 I, 1 P, 2 B)
    display index     16 bits
    lambda * 1000     32 bits  (metadata only)
    P: ue(display - fwd_ref - 1)
    B: ue(display - fwd_ref - 1), ue(bwd_ref - display - 1)
    blocks            see blocks.py
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitReader, BitstreamError, BitWriter

MAGIC = b"LFG1"
VERSION = 1
HEADER_BYTES = 4 + 17


class BadMagicError(BitstreamError):
    pass


class VersionMismatchError(BitstreamError):
    pass


class TruncatedStreamError(BitstreamError):
    pass


@dataclass
class Bitstream:
    width: int
    height: int
    frame_count: int
    qp: int
    payload: bytes
    total_bits: int
    frame_rate_num: int = 25
    frame_rate_den: int = 1
    search_range: int = 16
    version: int = VERSION

    def to_bytes(self) -> bytes:
        w = BitWriter()
        w.write(self.version, 8)
        w.write(self.width, 16)
        w.write(self.height, 16)
        w.write(self.frame_rate_num, 16)
        w.write(self.frame_rate_den, 16)
        w.write(self.frame_count, 16)
        w.write(self.qp, 8)
        w.write(self.search_range, 8)
        w.write(self.total_bits, 32)
        return MAGIC + w.to_bytes() + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "Bitstream":
        if data[:4] != MAGIC:
            raise BadMagicError(f"bad magic {data[:4]!r}")
        if len(data) < HEADER_BYTES:
            raise TruncatedStreamError("stream shorter than its header")
        r = BitReader(data[4:HEADER_BYTES])
        version = r.read(8)
        if version != VERSION:
            raise VersionMismatchError(f"stream version {version}, decoder supports {VERSION}")
        width, height = r.read(16), r.read(16)
        num, den = r.read(16), r.read(16)
        count, qp, srange, total = r.read(16), r.read(8), r.read(8), r.read(32)
        payload = data[HEADER_BYTES:]
        need = (total + 7) // 8
        if len(payload) < need:
            raise TruncatedStreamError(f"payload has {len(payload)} bytes, header declares {need}")
        if len(payload) > need:
            raise BitstreamError(f"payload has {len(payload)} bytes, header declares {need}")
        return cls(width, height, count, qp, payload, total, num, den, srange, version)

    def reader(self) -> BitReader:
        if len(self.payload) != (self.total_bits + 7) // 8:
            raise BitstreamError("total_bits inconsistent with payload length")
        r = BitReader(self.payload)
        tail = r._bits[self.total_bits:]
        if "1" in tail:
            raise BitstreamError("nonzero padding after declared total_bits")
        return BitReader(r._bits[:self.total_bits])
