from hypothesis import given, strategies as st

from lambdacodec.codec.gop import assign_frame_types, frame_type_at
from lambdacodec.rdo import FrameType


def test_first_frame_is_intra():
    plan = assign_frame_types(1)
    assert [(p.display, p.frame_type) for p in plan] == [(0, FrameType.I)]
    assert plan[0].fwd_ref is None and plan[0].bwd_ref is None


def test_nine_frames_coding_order():
    plan = assign_frame_types(9, 4)
    assert [p.display for p in plan] == [0, 4, 1, 2, 3, 8, 5, 6, 7]
    types = {p.display: p.frame_type.name for p in plan}
    assert "".join(types[i] for i in range(9)) == "IBBBPBBBP"
    b = next(p for p in plan if p.display == 6)
    assert (b.fwd_ref, b.bwd_ref) == (4, 8)


def test_scene_cut_becomes_intra_and_restarts_phase():
    plan = assign_frame_types(15, 4, scene_cuts=[6])
    types = {p.display: p.frame_type for p in plan}
    assert types[6] is FrameType.I
    assert types[10] is FrameType.P and types[14] is FrameType.P
    assert types[8] is FrameType.B
    # no reference crosses the cut
    for p in plan:
        for ref in (p.fwd_ref, p.bwd_ref):
            if ref is not None:
                assert (ref < 6) == (p.display < 6)
    assert frame_type_at(6, 15, 4, [6]) is FrameType.I


def test_short_tail_ends_on_anchor():
    types = {p.display: p.frame_type for p in assign_frame_types(7, 4)}
    assert types[6] is FrameType.P and types[5] is FrameType.B


@given(st.integers(1, 80), st.integers(2, 8), st.sets(st.integers(1, 79), max_size=5))
def test_plan_invariants(n, gop, cuts):
    plan = assign_frame_types(n, gop, cuts)
    assert sorted(p.display for p in plan) == list(range(n))
    coded = set()
    for p in plan:
        for ref in (p.fwd_ref, p.bwd_ref):
            if ref is not None:
                assert ref in coded
        if p.frame_type is FrameType.B:
            assert p.fwd_ref < p.display < p.bwd_ref
        if p.frame_type is FrameType.P:
            assert p.bwd_ref is None and p.fwd_ref < p.display
        coded.add(p.display)
    starts = {0} | {c for c in cuts if c < n}
    for p in plan:
        assert (p.frame_type is FrameType.I) == (p.display in starts)
