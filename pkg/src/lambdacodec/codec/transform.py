"""8x8 integer transform, scalar quantizer and zigzag scan.

The transform is the sequency-ordered Walsh-Hadamard pair. Coefficients are
expressed in 1/16 orthonormal units (``2 * H @ x @ H.T``), which makes the
inverse exact for unquantized input and lets one step table serve every
coefficient position.
"""

from __future__ import annotations

import numpy as np

from ..rdo import check_qp


def _sequency_hadamard(n: int = 8) -> np.ndarray:
    h = np.array([[1]])
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    changes = (np.diff(h, axis=1) != 0).sum(axis=1)
    return h[np.argsort(changes)]


WHT8 = _sequency_hadamard(8).astype(np.int64)

# Qstep * 16 for qp % 6; doubles every 6 QP so Qstep(4) == 1.0
_QBASE = np.array([10, 11, 13, 14, 16, 18], dtype=np.int64)
QSTEP16 = np.array([_QBASE[q % 6] << (q // 6) for q in range(52)], dtype=np.int64)


def qstep(qp: int) -> float:
    return QSTEP16[check_qp(qp)] / 16.0


def fdct8(block) -> np.ndarray:
    """Forward transform of one (8, 8) block or a stack of shape (..., 8, 8)."""
    x = np.asarray(block, dtype=np.int64)
    return 2 * (WHT8 @ x @ WHT8.T)


def idct8(coeffs) -> np.ndarray:
    """Inverse of :func:`fdct8`, rounding half up after the 1/128 scale."""
    c = np.asarray(coeffs, dtype=np.int64)
    return (WHT8.T @ c @ WHT8 + 64) >> 7


def quantize(coeffs, qp: int) -> np.ndarray:
    """Round-to-nearest levels, ties away from zero."""
    q = QSTEP16[check_qp(qp)]
    c = np.asarray(coeffs, dtype=np.int64)
    mag = (2 * np.abs(c) + q) // (2 * q)
    return np.where(c < 0, -mag, mag)


def dequantize(levels, qp: int) -> np.ndarray:
    return np.asarray(levels, dtype=np.int64) * QSTEP16[check_qp(qp)]


def _zigzag(n: int = 8) -> np.ndarray:
    order = sorted(
        ((y, x) for y in range(n) for x in range(n)),
        key=lambda p: (p[0] + p[1], p[1] if (p[0] + p[1]) % 2 == 0 else p[0]),
    )
    return np.array([y * n + x for y, x in order])


ZIGZAG = _zigzag(8)
INV_ZIGZAG = np.argsort(ZIGZAG)


def to_zigzag(block) -> np.ndarray:
    """(..., 8, 8) -> (..., 64) in scan order."""
    b = np.asarray(block)
    return b.reshape(b.shape[:-2] + (64,))[..., ZIGZAG]


def from_zigzag(scan) -> np.ndarray:
    s = np.asarray(scan)
    return s[..., INV_ZIGZAG].reshape(s.shape[:-1] + (8, 8))
