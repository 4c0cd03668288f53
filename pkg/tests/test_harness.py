import math

import numpy as np
import pytest

from lambdacodec.adaptive import ControllerParams
from lambdacodec.codec import EncoderConfig, encode
from lambdacodec.experiments.harness import (
    SWEEP_COLUMNS, SweepRecord, anchor_ratio, compare_adaptive, default_k_grid, find_lambda_opt, format_table,
    read_records, run_rd_point, sweep, write_compare, write_records,
)
from lambdacodec.experiments.synth import corpus
from lambdacodec.rdo import FrameType, LambdaQuery, Profile, lambda_orig


@pytest.fixture(scope="module")
def small():
    return corpus(("static", "mixed"), (0,), 32, 32, 13)


@pytest.fixture(scope="module")
def small_sweep(small):
    return sweep(small[1:], k_grid=default_k_grid())


def test_k_grid():
    g = default_k_grid()
    assert len(g) == 15 and g[0] == 0.2 and g[-1] == 5.0 and 1.0 in g
    assert all(b / a == pytest.approx(5 ** (1 / 7), rel=1e-5) for a, b in zip(g, g[1:]))


def test_sweep_product_and_order(small_sweep):
    assert len(small_sweep) == 60
    assert sum(r.k == 1.0 for r in small_sweep) == 4
    assert small_sweep == sorted(small_sweep, key=lambda r: (r.seq, r.qp, r.k))


def test_sweep_reproducible(small):
    a = sweep(small[:1], k_grid=(0.5, 1.0, 2.0))
    assert a == sweep(small[:1], k_grid=(0.5, 1.0, 2.0))


def test_sweep_rejects_k_out_of_range(small):
    with pytest.raises(ValueError):
        sweep(small[:1], k_grid=(0.1, 1.0))


def test_anchor_equivalence(small):
    frames = small[1].frames
    _, stats, rec = run_rd_point(frames, 32)
    direct = encode(frames, EncoderConfig(qp=32))
    assert rec.bits == direct.bitstream.total_bits
    assert [s.lambda_used for s in stats] == [s.lambda_used for s in direct.stats]
    b = lambda_orig(LambdaQuery(32, FrameType.B))
    assert all(s.lambda_used == b for s in stats if s.frame_type is FrameType.B)


def test_record_fields(small):
    point, stats, rec = run_rd_point(small[0].frames, 37, seq_id="x", fps=25)
    assert rec.frames == 13 and rec.bitrate_kbps == pytest.approx(rec.bits * 25 / 13 / 1000)
    assert rec.r_pb == pytest.approx(rec.mean_dp / rec.mean_db)
    assert point == rec.point
    assert run_rd_point(small[0].frames, 37, seq_id="x")[2] == rec


def test_small_k_spends_more(small):
    frames = small[1].frames
    for qp in (27, 37):
        lo = run_rd_point(frames, qp, k=0.2)[2]
        hi = run_rd_point(frames, qp, k=5.0)[2]
        assert lo.bits >= hi.bits and lo.psnr_y >= hi.psnr_y


def _records(seq, curves):
    out = []
    for k, pts in curves.items():
        for qp, (rate, q) in zip((27, 32, 37, 42), pts):
            out.append(SweepRecord(seq, qp, k, False, int(rate * 520), 13, rate, q, 4.0, 5.0, 0.8))
    return out


ANCHOR = [(100.0, 30.0), (180.0, 32.5), (330.0, 35.0), (600.0, 37.5)]


def test_opt_all_identical_picks_one():
    recs = _records("s", {k: ANCHOR for k in (0.5, 1.0, 2.0)})
    opt = find_lambda_opt(recs)
    assert opt.k_star == 1.0 and opt.bd_rate == 0.0


def test_opt_dominating_k():
    better = [(r * 0.9, q) for r, q in ANCHOR]
    worse = [(r * 1.1, q) for r, q in ANCHOR]
    recs = _records("s", {0.5: worse, 1.0: ANCHOR, 2.0: better})
    opt = find_lambda_opt(recs, per_qp=True)
    assert opt.k_star == opt.r_lambda == 2.0
    assert opt.bd_rate == pytest.approx(-10.0, abs=1e-6)
    assert opt.lambda_opt[32] == 2.0 * lambda_orig(LambdaQuery(32, FrameType.B))
    assert set(opt.per_qp_k.values()) == {2.0}


def test_opt_tie_prefers_k_near_one():
    recs = _records("s", {0.5: ANCHOR, 1.0: [(r * 1.2, q) for r, q in ANCHOR], 3.0: ANCHOR})
    assert find_lambda_opt(recs).k_star == 0.5


def test_opt_errors():
    with pytest.raises(ValueError):
        find_lambda_opt(_records("s", {2.0: ANCHOR}))
    with pytest.raises(ValueError):
        find_lambda_opt(_records("s", {1.0: ANCHOR}) + _records("t", {1.0: ANCHOR}))


def test_opt_skips_unusable_curve():
    broken = [(100.0, 30.0), (180.0, 29.0), (330.0, 35.0), (600.0, 37.5)]
    opt = find_lambda_opt(_records("s", {1.0: ANCHOR, 2.0: broken}))
    assert math.isnan(opt.bd_rates[2.0]) and opt.k_star == 1.0


def test_opt_on_real_sweep(small_sweep):
    opt = find_lambda_opt(small_sweep)
    assert opt.bd_rate <= 0
    assert opt.k_star in default_k_grid()
    assert anchor_ratio(small_sweep) > 0


def test_csv_round_trip(small_sweep, tmp_path):
    path = tmp_path / "sweep.csv"
    write_records(small_sweep, path)
    assert path.read_text().splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert SWEEP_COLUMNS == ["seq", "qp", "k", "adaptive", "bits", "frames", "bitrate_kbps", "psnr_y", "mean_dp", "mean_db", "r_pb"]
    assert read_records(path) == small_sweep


def test_forced_dead_band_matches_anchor(small, tmp_path):
    never = ControllerParams(a=2.696, b=10.06, c=0.367, r1=0.0, r2=math.inf)
    res = compare_adaptive(small, qps=(22, 27, 32, 37, 42), controller_params=never)
    for row in res.rows:
        assert row.bd_rate == 0.0 and row.bd_psnr == 0.0
    assert {r.level for r in res.rows} == {"sequence", "class", "group", "overall"}
    assert set(res.class_means()) == {"static", "mixed"}
    text = format_table([res])
    assert "overall" in text and "H264_LIKE" in text
    write_compare([res], tmp_path / "cmp.csv")
    assert (tmp_path / "cmp.csv").read_text().startswith("profile,level,label")
