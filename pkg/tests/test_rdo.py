import math

import pytest
from hypothesis import given, strategies as st

from lambdacodec.rdo import FrameType, LambdaQuery, Profile, lambda_orig, mode_rank, rd_cost, select_mode

H264, HEVC = Profile.H264_LIKE, Profile.HEVC_LIKE
qps = st.integers(0, 51)


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_h264_b_qp27():
    assert _rel(lambda_orig(LambdaQuery(27, FrameType.B, H264)), 0.68 * 2.5 * 32) <= 1e-12


def test_hevc_i_qp32_nb3():
    want = 0.85 * 0.57 * 2 ** (20 / 3)
    assert _rel(lambda_orig(LambdaQuery(32, FrameType.I, HEVC, n_b=3)), want) <= 1e-12
    assert round(want, 2) == 49.22


def test_hevc_b_qp32():
    want = 0.5 * (20 / 6) * 2 ** (20 / 3)
    assert _rel(lambda_orig(LambdaQuery(32, FrameType.B, HEVC, p=0.5)), want) <= 1e-12
    assert round(want, 2) == 169.32


def test_h264_i_p_values():
    assert lambda_orig(LambdaQuery(12, FrameType.I, H264)) == 0.57
    assert lambda_orig(LambdaQuery(12, FrameType.P, H264)) == 0.85
    assert lambda_orig(LambdaQuery(15, FrameType.P, H264)) == pytest.approx(1.7, rel=1e-15)


def test_hevc_i_discount_saturates():
    base = 0.57 * 2 ** (20 / 3)
    assert lambda_orig(LambdaQuery(32, FrameType.I, HEVC, n_b=0)) == pytest.approx(base, rel=1e-15)
    assert lambda_orig(LambdaQuery(32, FrameType.I, HEVC, n_b=15)) == pytest.approx(0.5 * base, rel=1e-15)


@given(qps, st.sampled_from(list(FrameType)), st.sampled_from(list(Profile)))
def test_monotone_in_qp(qp, ftype, profile):
    if qp == 51:
        return
    a = lambda_orig(LambdaQuery(qp, ftype, profile))
    b = lambda_orig(LambdaQuery(qp + 1, ftype, profile))
    assert 0 < a < b


@given(qps)
def test_b_over_p_ratio_identity(qp):
    ratio = lambda_orig(LambdaQuery(qp, FrameType.B, H264)) / lambda_orig(LambdaQuery(qp, FrameType.P, H264))
    assert ratio == pytest.approx(0.68 / 0.85 * min(4, max(2, (qp - 12) / 6)), rel=1e-14)


@pytest.mark.parametrize("qp", [-1, 52, 27.5])
def test_bad_qp(qp):
    with pytest.raises(ValueError):
        lambda_orig(LambdaQuery(qp, FrameType.P))


def test_bad_p():
    with pytest.raises(ValueError):
        lambda_orig(LambdaQuery(30, FrameType.P, HEVC, p=0))


def test_profile_parse():
    assert Profile.parse("H.264") is H264
    assert Profile.parse("hevc_like") is HEVC
    with pytest.raises(ValueError):
        Profile.parse("vp9")


def test_select_mode_examples():
    cands = [("INTRA", 10.0, 40), ("INTER_FWD", 40.0, 11), ("SKIP", 100.0, 1)]
    assert select_mode(cands, 0.0) == ("INTRA", 10.0)
    assert select_mode(cands, 100.0) == ("SKIP", 200.0)
    # exact tie between SKIP (100 + 6) and INTER_FWD (40 + 66)
    assert select_mode(cands, 6.0) == ("SKIP", 106.0)
    with pytest.raises(ValueError):
        select_mode([], 1.0)


def test_mode_rank_forms():
    assert mode_rank("INTRA(DC)") == mode_rank("INTRA") == 4
    assert mode_rank("SKIP") == 0


cand = st.tuples(
    st.sampled_from(["SKIP", "INTER_FWD", "INTER_BWD", "INTER_BI", "INTRA"]),
    st.floats(0, 1e6), st.floats(0, 1e4),
)


@given(st.lists(cand, min_size=1, max_size=12), st.floats(0, 1e3))
def test_select_mode_brute_force(cands, lam):
    mode, cost = select_mode(cands, lam)
    costs = [d + lam * r for _, d, r in cands]
    assert cost == min(costs)
    first = min(
        (i for i, c in enumerate(costs) if c == cost),
        key=lambda i: (mode_rank(cands[i][0]), i),
    )
    assert mode == cands[first][0]


@given(st.lists(cand, min_size=1, max_size=8), st.floats(0.01, 1e3), st.sampled_from([2.0, 4.0, 0.5]))
def test_select_mode_scale_invariant(cands, lam, s):
    # scaling D and lambda by a power of two keeps every comparison exact
    scaled = [(m, d * s, r) for m, d, r in cands]
    assert select_mode(scaled, lam * s)[0] == select_mode(cands, lam)[0]


def test_rd_cost():
    assert rd_cost(10, 4, 2.5) == 20
    assert math.isinf(rd_cost(math.inf, 0, 1))


@given(st.lists(cand, min_size=1, max_size=12), st.floats(0, 1e3), st.floats(0, 1e3))
def test_chosen_rate_non_increasing_in_lambda(cands, lam1, lam2):
    lo, hi = sorted((lam1, lam2))
    pick = lambda lam: min(
        range(len(cands)), key=lambda i: (cands[i][1] + lam * cands[i][2], mode_rank(cands[i][0]), i)
    )
    assert select_mode(cands, lo)[0] == cands[pick(lo)][0]
    costs_lo = [d + lo * r for _, d, r in cands]
    costs_hi = [d + hi * r for _, d, r in cands]
    # compare rates only when both optima are strict, away from float ties
    if sorted(costs_lo)[:2].count(min(costs_lo)) == 1 and sorted(costs_hi)[:2].count(min(costs_hi)) == 1:
        assert cands[pick(hi)][2] <= cands[pick(lo)][2] + 1e-9
