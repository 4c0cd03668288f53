"""Lambda sweep, optimum-lambda identification and the adaptive-vs-anchor comparison."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional, Sequence as Seq

import numpy as np

from ..codec.encoder import EncoderConfig, FrameStats, encode
from ..metrics import RDCurve, RDPoint, bd_psnr, bd_rate, bitrate_kbps, fit_cubic, psnr
from ..rdo import FrameType, LambdaQuery, Profile, lambda_orig
from .synth import Sequence

log = logging.getLogger(__name__)

SWEEP_QPS = (27, 32, 37, 42)
COMPARE_QPS = (22, 27, 32, 37, 42)
K_MIN, K_MAX = 0.2, 5.0


def default_k_grid(n: int = 15) -> tuple[float, ...]:
    """``n`` multiplicatively spaced scales from 0.2 to 5; odd ``n`` includes 1.0 exactly."""
    grid = K_MAX ** np.linspace(-1.0, 1.0, n)
    return tuple(float(round(k, 6)) for k in grid)


@dataclass
class SweepRecord:
    seq: str
    qp: int
    k: float
    adaptive: bool
    bits: int
    frames: int
    bitrate_kbps: float
    psnr_y: float
    mean_dp: float
    mean_db: float
    r_pb: float

    @property
    def point(self) -> RDPoint:
        return RDPoint(self.bitrate_kbps, self.psnr_y)


SWEEP_COLUMNS = [f.name for f in fields(SweepRecord)]
FRAME_COLUMNS = ["idx", "coding_order", "type", "lambda", "bits", "mse_y"]


def run_rd_point(frames, qp: int, k: float = 1.0, adaptive: bool = False, profile=Profile.H264_LIKE, seq_id: str = "", fps: float = 25, **config):
    """Encode once and summarise as an RD point, per-frame stats and a sweep record.

    ``k`` scales the B-frame lambda only; I and P frames keep the formula value.
    """
    cfg = EncoderConfig(qp=qp, profile=profile, adaptive=adaptive, lambda_scale_k=k, **config)
    res = encode(frames, cfg, frame_rate=(int(round(fps)), 1) if float(fps).is_integer() else (int(fps * 1000), 1000))
    stats = res.stats
    n = len(stats)
    rate = bitrate_kbps(res.bitstream.total_bits, n, fps)
    quality = float(np.mean([psnr(s.mse_y) for s in stats]))
    p_mse = [s.mse_y for s in stats if s.frame_type is FrameType.P]
    b_mse = [s.mse_y for s in stats if s.frame_type is FrameType.B]
    mean_dp = float(np.mean(p_mse)) if p_mse else 0.0
    mean_db = float(np.mean(b_mse)) if b_mse else 0.0
    r_pb = mean_dp / mean_db if mean_db > 0 else float("nan")
    record = SweepRecord(seq_id, qp, float(k), bool(adaptive), res.bitstream.total_bits, n, rate, quality, mean_dp, mean_db, r_pb)
    return RDPoint(rate, quality), stats, record


def _cell(args):
    frames, qp, k, adaptive, profile, name, fps, config = args
    return run_rd_point(frames, qp, k, adaptive, profile, name, fps, **config)[2]


def _run_cells(cells: list, jobs: int) -> list[SweepRecord]:
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(c) for c in cells]


def sweep(sequences: Iterable[Sequence], qps=SWEEP_QPS, k_grid=None, profile=Profile.H264_LIKE, jobs: int = 1, **config) -> list[SweepRecord]:
    """Encode every (sequence, QP, k) cell with a constant B-frame lambda scale."""
    k_grid = tuple(default_k_grid() if k_grid is None else k_grid)
    for k in k_grid:
        if not K_MIN - 1e-9 <= k <= K_MAX + 1e-9:
            raise ValueError(f"k={k} outside [{K_MIN}, {K_MAX}]")
    cells = [
        (seq.frames, qp, k, False, profile, seq.name, seq.fps, config)
        for seq in sequences
        for qp in qps
        for k in k_grid
    ]
    records = _run_cells(cells, jobs)
    return sorted(records, key=lambda r: (r.seq, r.qp, r.k, r.adaptive))


@dataclass
class LambdaOpt:
    seq: str
    k_star: float
    r_lambda: float
    bd_rate: float
    lambda_opt: dict  # qp -> lambda_opt of B frames
    bd_rates: dict  # k -> BD-rate vs k = 1 (NaN if that curve was unusable)
    per_qp_k: Optional[dict] = None  # qp -> k*, when identified per QP


def _closest_to_one(ks):
    return min(ks, key=lambda k: (abs(math.log(k)), k))


def find_lambda_opt(records: Seq[SweepRecord], profile=Profile.H264_LIKE, per_qp: bool = False, hevc_p: float = 0.5, gop_length: int = 4) -> LambdaOpt:
    """Best constant B-frame lambda scale for one sequence by BD-rate against k = 1.

    Ties resolve to the k closest to 1 (in log scale). With ``per_qp`` the
    optimum is also picked per QP as the k whose point saves the most rate
    against the anchor curve interpolated at equal PSNR.
    """
    records = [r for r in records if not r.adaptive]
    if not records:
        raise ValueError("no sweep records")
    seqs = {r.seq for r in records}
    if len(seqs) != 1:
        raise ValueError(f"records span several sequences: {sorted(seqs)}")
    by_k: dict[float, list[SweepRecord]] = {}
    for r in records:
        by_k.setdefault(r.k, []).append(r)
    anchor_k = [k for k in by_k if abs(k - 1.0) < 1e-9]
    if not anchor_k:
        raise ValueError("sweep lacks the k = 1 anchor rows")
    anchor = RDCurve(r.point for r in by_k[anchor_k[0]])
    qps = sorted({r.qp for r in by_k[anchor_k[0]]})

    bd = {}
    for k, rows in sorted(by_k.items()):
        if abs(k - 1.0) < 1e-9:
            bd[k] = 0.0
            continue
        try:
            bd[k] = bd_rate(anchor, RDCurve(r.point for r in rows))
        except ValueError as exc:
            log.warning("%s: k=%g curve unusable (%s)", records[0].seq, k, exc)
            bd[k] = float("nan")
    valid = {k: v for k, v in bd.items() if not math.isnan(v)}
    best = min(valid.values())
    k_star = _closest_to_one([k for k, v in valid.items() if v == best])

    per_qp_k = None
    if per_qp:
        inv = fit_cubic(anchor.psnr, anchor.log_rate)
        per_qp_k = {}
        for qp in qps:
            saving = {}
            for k, rows in by_k.items():
                row = next((r for r in rows if r.qp == qp), None)
                if row is not None:
                    saving[k] = math.log10(row.bitrate_kbps) - float(inv(row.psnr_y))
            lo = min(saving.values())
            per_qp_k[qp] = _closest_to_one([k for k, v in saving.items() if v == lo])

    lam_opt = {}
    for qp in qps:
        k_q = per_qp_k[qp] if per_qp_k else k_star
        lam_opt[qp] = k_q * lambda_orig(LambdaQuery(qp, FrameType.B, Profile.parse(profile), max(gop_length - 1, 0), hevc_p))
    return LambdaOpt(records[0].seq, k_star, k_star, best, lam_opt, bd, per_qp_k)


def anchor_ratio(records: Seq[SweepRecord]) -> float:
    """Mean r_P/B of the k = 1 rows of one sequence."""
    vals = [r.r_pb for r in records if abs(r.k - 1.0) < 1e-9 and not r.adaptive and r.r_pb == r.r_pb]
    if not vals:
        raise ValueError("no anchor rows with a defined r_P/B")
    return float(np.mean(vals))


# ------------------------------------------------------------------ compare


@dataclass
class CompareRow:
    level: str  # "sequence", "class", "group" or "overall"
    label: str
    content: str
    group: str
    profile: str
    bd_psnr: float
    bd_rate: float
    n: int = 1


@dataclass
class CompareResult:
    profile: Profile
    rows: list[CompareRow]
    records: list[SweepRecord]

    def row(self, level: str, label: str) -> CompareRow:
        for r in self.rows:
            if r.level == level and r.label == label:
                return r
        raise KeyError((level, label))

    def class_means(self) -> dict[str, float]:
        return {r.label: r.bd_rate for r in self.rows if r.level == "class"}


def compare_adaptive(sequences: Iterable[Sequence], qps=COMPARE_QPS, profile=Profile.H264_LIKE, jobs: int = 1, **config) -> CompareResult:
    """Adaptive controller vs formula lambda (k = 1) for every sequence, as BD numbers.

    Rows are produced per sequence, then averaged per content class, per
    resolution group and overall.
    """
    profile = Profile.parse(profile)
    sequences = list(sequences)
    cells = []
    for seq in sequences:
        for qp in qps:
            for adaptive in (False, True):
                cells.append((seq.frames, qp, 1.0, adaptive, profile, seq.name, seq.fps, config))
    records = sorted(_run_cells(cells, jobs), key=lambda r: (r.seq, r.qp, r.adaptive))
    rows = []
    for seq in sequences:
        mine = [r for r in records if r.seq == seq.name]
        a = RDCurve(r.point for r in mine if not r.adaptive)
        t = RDCurve(r.point for r in mine if r.adaptive)
        content = seq.content.value if seq.content is not None else ""
        rows.append(CompareRow("sequence", seq.name, content, seq.group, profile.value, bd_psnr(a, t), bd_rate(a, t)))
    seq_rows = list(rows)
    for level, key in (("class", "content"), ("group", "group")):
        labels = sorted({getattr(r, key) for r in seq_rows})
        for lab in labels:
            sel = [r for r in seq_rows if getattr(r, key) == lab]
            rows.append(
                CompareRow(
                    level, lab, lab if level == "class" else "", lab if level == "group" else "", profile.value,
                    float(np.mean([r.bd_psnr for r in sel])), float(np.mean([r.bd_rate for r in sel])), len(sel),
                )
            )
    rows.append(
        CompareRow(
            "overall", "overall", "", "", profile.value,
            float(np.mean([r.bd_psnr for r in seq_rows])), float(np.mean([r.bd_rate for r in seq_rows])), len(seq_rows),
        )
    )
    return CompareResult(profile, rows, records)


def format_table(results: Seq[CompareResult]) -> str:
    """Aligned text table: one BD-PSNR/BD-Rate column pair per profile."""
    head1 = f"{'':<18}" + "".join(f"| {r.profile.name:^22}" for r in results)
    head2 = f"{'row':<18}" + "".join(f"| {'BD-PSNR':>10} {'BD-Rate':>10} " for _ in results)
    lines = [head1, head2, "-" * len(head2)]
    keys = [(row.level, row.label) for row in results[0].rows]
    prev_level = None
    for level, label in keys:
        if prev_level is not None and level != prev_level:
            lines.append("-" * len(head2))
        prev_level = level
        cells = []
        for res in results:
            row = res.row(level, label)
            cells.append(f"| {row.bd_psnr:>8.3f}dB {row.bd_rate:>9.2f}% ")
        name = label if level != "sequence" else f"  {label}"
        lines.append(f"{name:<18}" + "".join(cells))
    return "\n".join(lines)


# ------------------------------------------------------------------ csv


def write_records(records: Iterable[SweepRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in records:
            d = asdict(r)
            d["adaptive"] = int(r.adaptive)
            w.writerow([_fmt(d[c]) for c in SWEEP_COLUMNS])


def read_records(path) -> list[SweepRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                SweepRecord(
                    row["seq"], int(row["qp"]), float(row["k"]), row["adaptive"] in ("1", "True", "true"),
                    int(row["bits"]), int(row["frames"]), float(row["bitrate_kbps"]), float(row["psnr_y"]),
                    float(row["mean_dp"]), float(row["mean_db"]), float(row["r_pb"]),
                )
            )
    return out


def write_frame_stats(stats: Iterable[FrameStats], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FRAME_COLUMNS)
        for s in stats:
            w.writerow([s.index, s.coding_order, s.frame_type.name, repr(float(s.lambda_used)), s.bits, repr(float(s.mse_y))])


def write_compare(results: Iterable[CompareResult], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["profile", "level", "label", "class", "group", "n", "bd_psnr_db", "bd_rate_pct"])
        for res in results:
            for r in res.rows:
                w.writerow([r.profile, r.level, r.label, r.content, r.group, r.n, _fmt(r.bd_psnr), _fmt(r.bd_rate)])


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v
