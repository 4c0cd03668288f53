"""Lagrange multiplier formulas and Lagrangian mode selection."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Sequence


class FrameType(enum.IntEnum):
    I = 0
    P = 1
    B = 2


class Profile(str, enum.Enum):
    H264_LIKE = "h264"
    HEVC_LIKE = "hevc"

    @classmethod
    def parse(cls, value) -> "Profile":
        if isinstance(value, cls):
            return value
        v = str(value).lower().replace(".", "").replace("_like", "")
        for p in cls:
            if v == p.value:
                return p
        raise ValueError(f"unknown profile {value!r}")


QP_MIN, QP_MAX = 0, 51


@dataclass(frozen=True)
class LambdaQuery:
    qp: int
    frame_type: FrameType
    profile: Profile = Profile.H264_LIKE
    n_b: int = 3
    p: float = 0.5


def check_qp(qp: int) -> int:
    if not QP_MIN <= qp <= QP_MAX or int(qp) != qp:
        raise ValueError(f"QP must be an integer in [0, 51], got {qp}")
    return int(qp)


def _b_scale(qp: int) -> float:
    return max(2.0, min(4.0, (qp - 12) / 6))


def lambda_orig(query: LambdaQuery) -> float:
    """Reference-codec lambda for one frame type, with SSD distortion.

    H.264: 0.57/0.85 times 2^((QP-12)/3) for I/P, and 0.68 * clip((QP-12)/6, 2, 4)
    times the same exponential for B. The HEVC variant discounts I frames by
    the GOP's B-frame count and uses the configurable ``p`` for P and B.
    """
    qp = check_qp(query.qp)
    base = 2.0 ** ((qp - 12) / 3)
    ftype = FrameType(query.frame_type)
    if Profile.parse(query.profile) is Profile.H264_LIKE:
        if ftype is FrameType.I:
            return 0.57 * base
        if ftype is FrameType.P:
            return 0.85 * base
        return 0.68 * _b_scale(qp) * base
    if query.p <= 0:
        raise ValueError("HEVC p must be positive")
    if ftype is FrameType.I:
        return (1 - max(0.0, min(0.5, 0.05 * query.n_b))) * 0.57 * base
    if ftype is FrameType.P:
        return query.p * base
    return query.p * _b_scale(qp) * base


def rd_cost(distortion: float, rate_bits: float, lam: float) -> float:
    return distortion + lam * rate_bits


# enumeration order doubles as the tie-break order
MODE_ORDER = ("SKIP", "INTER_FWD", "INTER_BWD", "INTER_BI", "INTRA")


def mode_rank(mode: Any) -> int:
    """Tie-break rank of a mode; accepts a name or anything with a ``kind`` attribute."""
    kind = getattr(mode, "kind", mode)
    kind = getattr(kind, "name", kind)
    return MODE_ORDER.index(str(kind).split("(")[0])


def select_mode(candidates: Sequence[tuple[Any, float, float]], lam: float):
    """Return ``(mode, cost)`` minimising D + lam*R.

    Equal costs resolve to the earliest mode in ``MODE_ORDER``; within one
    mode kind, to the earlier candidate in the list.
    """
    if not candidates:
        raise ValueError("select_mode needs at least one candidate")
    best = None
    for pos, (mode, d, r) in enumerate(candidates):
        key = (rd_cost(d, r, lam), mode_rank(mode), pos)
        if best is None or key < best[0]:
            best = (key, mode)
    return best[1], best[0][0]
