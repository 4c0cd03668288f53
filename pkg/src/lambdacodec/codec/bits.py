"""Bit-level writer/reader with Exp-Golomb codes.

Bits are kept as a ``str`` of ``'0'``/``'1'`` characters; ``str.find`` and
``int(s, 2)`` do the heavy lifting in C, which is plenty for desk-scale streams.
"""

from __future__ import annotations

import numpy as np


class BitstreamError(ValueError):
    pass


def ue_len(v: int) -> int:
    return 2 * (v + 1).bit_length() - 1


def se_to_ue(v: int) -> int:
    # 0, 1, -1, 2, -2, ... -> 0, 1, 2, 3, 4, ...
    return 2 * v - 1 if v > 0 else -2 * v


def ue_to_se(k: int) -> int:
    return (k + 1) // 2 if k % 2 else -(k // 2)


def se_len(v: int) -> int:
    return ue_len(se_to_ue(v))


def _ue_len_frexp(v: np.ndarray) -> np.ndarray:
    # frexp gives exponent e with 2^(e-1) <= x < 2^e, i.e. the bit length
    _, e = np.frexp(v + 1.0)
    return 2 * e.astype(np.int64) - 1


_UE_TABLE = _ue_len_frexp(np.arange(1 << 16))


def ue_len_array(v: np.ndarray) -> np.ndarray:
    """Vectorised Exp-Golomb length for nonnegative integers."""
    v = np.asarray(v, dtype=np.int64)
    if v.size and v.max() >= _UE_TABLE.size:
        return _ue_len_frexp(v)
    return _UE_TABLE[v]


def se_len_array(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    return ue_len_array(np.where(v > 0, 2 * v - 1, -2 * v))


class BitWriter:
    def __init__(self):
        self._chunks: list[str] = []
        self.nbits = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits == 0:
            return
        if value < 0 or value >> nbits:
            raise BitstreamError(f"{value} does not fit in {nbits} bits")
        self._chunks.append(format(value, f"0{nbits}b"))
        self.nbits += nbits

    def bit(self, flag) -> None:
        self._chunks.append("1" if flag else "0")
        self.nbits += 1

    def ue(self, v: int) -> None:
        if v < 0:
            raise BitstreamError(f"ue(v) needs v >= 0, got {v}")
        b = format(v + 1, "b")
        self._chunks.append("0" * (len(b) - 1) + b)
        self.nbits += 2 * len(b) - 1

    def se(self, v: int) -> None:
        self.ue(se_to_ue(v))

    def extend(self, other: "BitWriter") -> None:
        self._chunks.extend(other._chunks)
        self.nbits += other.nbits

    def getbits(self) -> str:
        s = "".join(self._chunks)
        self._chunks = [s]
        return s

    def to_bytes(self) -> bytes:
        """Pack MSB-first, zero-padding the final byte."""
        s = self.getbits()
        if not s:
            return b""
        pad = (-len(s)) % 8
        return int(s + "0" * pad, 2).to_bytes((len(s) + pad) // 8, "big")


class BitReader:
    def __init__(self, data: bytes | str, nbits: int | None = None):
        if isinstance(data, str):
            bits = data
        else:
            bits = format(int.from_bytes(data, "big"), f"0{8 * len(data)}b") if data else ""
        if nbits is not None:
            if nbits > len(bits):
                raise BitstreamError(f"need {nbits} bits, only {len(bits)} available")
            bits = bits[:nbits]
        self._bits = bits
        self.pos = 0

    @property
    def nbits(self) -> int:
        return len(self._bits)

    def remaining(self) -> int:
        return len(self._bits) - self.pos

    def read(self, nbits: int) -> int:
        if nbits == 0:
            return 0
        end = self.pos + nbits
        if end > len(self._bits):
            raise BitstreamError("read past end of bitstream")
        v = int(self._bits[self.pos:end], 2)
        self.pos = end
        return v

    def bit(self) -> int:
        if self.pos >= len(self._bits):
            raise BitstreamError("read past end of bitstream")
        b = self._bits[self.pos] == "1"
        self.pos += 1
        return int(b)

    def ue(self) -> int:
        one = self._bits.find("1", self.pos)
        if one < 0:
            raise BitstreamError("malformed Exp-Golomb prefix (no terminating 1)")
        zeros = one - self.pos
        if zeros > 32:
            raise BitstreamError("Exp-Golomb prefix longer than 32 zeros")
        end = one + zeros + 1
        if end > len(self._bits):
            raise BitstreamError("Exp-Golomb suffix runs past end of bitstream")
        v = int(self._bits[one:end], 2) - 1
        self.pos = end
        return v

    def se(self) -> int:
        return ue_to_se(self.ue())
