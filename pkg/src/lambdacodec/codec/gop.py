"""GOP planning: frame types, references and coding order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from ..rdo import FrameType


@dataclass(frozen=True)
class FramePlan:
    display: int
    frame_type: FrameType
    fwd_ref: Optional[int] = None
    bwd_ref: Optional[int] = None
    scene_cut: bool = False


def assign_frame_types(n_frames: int, gop_length: int = 4, scene_cuts: Iterable[int] = ()) -> list[FramePlan]:
    """Plan a non-hierarchical IBBBP... structure, returned in coding order.

    Anchors (I/P) sit every ``gop_length`` frames from the start of each scene;
    a scene cut turns its frame into an I frame and restarts the phase there.
    The last frame of each scene is always an anchor so every B frame has a
    future reference. Each anchor is coded before the B frames preceding it.

    >>> [(p.display, p.frame_type.name) for p in assign_frame_types(5)]
    [(0, 'I'), (4, 'P'), (1, 'B'), (2, 'B'), (3, 'B')]
    """
    if n_frames < 0:
        raise ValueError("n_frames must be nonnegative")
    if gop_length < 1:
        raise ValueError("gop_length must be positive")
    cuts = sorted({c for c in scene_cuts if 0 < c < n_frames})
    starts = [0] + cuts if n_frames else []
    ends = cuts + [n_frames]
    plan: list[FramePlan] = []
    for start, end in zip(starts, ends):
        anchors = list(range(start, end, gop_length))
        if anchors[-1] != end - 1:
            anchors.append(end - 1)
        plan.append(FramePlan(start, FrameType.I, scene_cut=start > 0))
        for prev, cur in zip(anchors, anchors[1:]):
            plan.append(FramePlan(cur, FrameType.P, fwd_ref=prev))
            for b in range(prev + 1, cur):
                plan.append(FramePlan(b, FrameType.B, fwd_ref=prev, bwd_ref=cur))
    return plan


def frame_type_at(display_index: int, n_frames: int, gop_length: int = 4, scene_cuts: Iterable[int] = ()) -> FrameType:
    for p in assign_frame_types(n_frames, gop_length, scene_cuts):
        if p.display == display_index:
            return p.frame_type
    raise IndexError(display_index)
