"""In-loop adaptation of the B-frame Lagrange multiplier.

The controller keeps exponentially weighted MSE indices for P and B frames.
Once a full GOP has been observed, each new B frame gets
``lambda_last * (a * r**b + c)`` with ``r = D_P / D_B``, except inside the
dead band ``r1 < r < r2`` where ``lambda_last`` is reused. The step is
clipped to +/-5% of ``lambda_last``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .rdo import FrameType, Profile

CLIP_LOW = 0.95
CLIP_HIGH = 1.05


@dataclass(frozen=True)
class ControllerParams:
    a: float
    b: float
    c: float
    r1: float
    r2: float

    def __post_init__(self):
        if not self.r1 < self.r2:
            raise ValueError(f"dead band needs r1 < r2, got ({self.r1}, {self.r2})")

    @classmethod
    def for_profile(cls, profile) -> "ControllerParams":
        return PROFILE_PARAMS[Profile.parse(profile)]

    def factor(self, r: float) -> float:
        return self.a * r ** self.b + self.c


PROFILE_PARAMS = {
    Profile.H264_LIKE: ControllerParams(a=2.696, b=10.06, c=0.367, r1=0.81, r2=0.93),
    Profile.HEVC_LIKE: ControllerParams(a=2.197, b=5.196, c=0.308, r1=0.73, r2=0.89),
}


@dataclass
class ControllerState:
    params: ControllerParams
    n_b: int = 3
    lambda_last: float = 1.0
    d_p: float = 0.0
    d_b: float = 0.0
    frames_recorded_p: int = 0
    frames_recorded_b: int = 0
    # scale the model output from lambda_orig instead of lambda_last
    base_on_orig: bool = False
    last_ratio: float | None = field(default=None, compare=False)
    last_in_dead_band: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.lambda_last <= 0:
            raise ValueError("lambda_last must be positive")


def _smooth(d: float, mse_t: float) -> float:
    """0.2*d + 0.8*mse_t, written so equal inputs are an exact fixed point."""
    if d == 0:
        return mse_t
    return d + 0.8 * (mse_t - d)


def record_distortion(state: ControllerState, frame_type, mse_t: float) -> ControllerState:
    """Fold the latest frame's MSE into the P or B distortion index."""
    ftype = FrameType(frame_type)
    if ftype is FrameType.I:
        raise ValueError("I-frame distortion is not tracked")
    if not (mse_t >= 0 and math.isfinite(mse_t)):
        raise ValueError(f"MSE must be finite and nonnegative, got {mse_t}")
    if ftype is FrameType.P:
        state.d_p = _smooth(state.d_p, mse_t)
        state.frames_recorded_p += 1
    else:
        state.d_b = _smooth(state.d_b, mse_t)
        state.frames_recorded_b += 1
    return state


def _clip_bound(last: float, ratio: float) -> float:
    """ratio*last, nudged by an ulp where needed so that bound/last stays within the clip."""
    bound = ratio * last
    if ratio < 1:
        while bound / last < ratio:
            bound = math.nextafter(bound, math.inf)
    else:
        while bound / last > ratio:
            bound = math.nextafter(bound, -math.inf)
    return bound


def ready(state: ControllerState) -> bool:
    """True once one P and ``n_b`` B frames have been recorded since the last reset."""
    return state.frames_recorded_p >= 1 and state.frames_recorded_b >= max(state.n_b, 1)


def next_b_lambda(state: ControllerState, lambda_orig_b: float) -> tuple[float, ControllerState]:
    """Lambda for the next B frame; updates ``lambda_last``."""
    if lambda_orig_b <= 0:
        raise ValueError("lambda_orig_b must be positive")
    state.last_ratio = None
    state.last_in_dead_band = False
    if not ready(state):
        state.lambda_last = lambda_orig_b
        return lambda_orig_b, state
    if state.d_b == 0:
        raise ZeroDivisionError("B-frame distortion index is zero; r_P/B undefined")
    p = state.params
    r = state.d_p / state.d_b
    last = state.lambda_last
    state.last_ratio = r
    if p.r1 < r < p.r2:
        state.last_in_dead_band = True
        lam = last
    else:
        base = lambda_orig_b if state.base_on_orig else last
        lam = base * p.factor(r)
        lam = min(max(lam, _clip_bound(last, CLIP_LOW)), _clip_bound(last, CLIP_HIGH))
    state.lambda_last = lam
    return lam, state


def reset(state: ControllerState, lambda_orig_b: float) -> ControllerState:
    if lambda_orig_b <= 0:
        raise ValueError("lambda_orig_b must be positive")
    state.d_p = state.d_b = 0.0
    state.frames_recorded_p = state.frames_recorded_b = 0
    state.lambda_last = lambda_orig_b
    state.last_ratio = None
    state.last_in_dead_band = False
    return state


def new_state(profile=Profile.H264_LIKE, lambda_orig_b: float = 1.0, n_b: int = 3, params: ControllerParams | None = None, base_on_orig: bool = False) -> ControllerState:
    return ControllerState(
        params=params or ControllerParams.for_profile(profile),
        n_b=n_b,
        lambda_last=lambda_orig_b,
        base_on_orig=base_on_orig,
    )


def copy_state(state: ControllerState) -> ControllerState:
    return replace(state)
