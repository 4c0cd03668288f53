"""``lambdacodec`` command line: encode/decode, sweep, fit, bd, compare, synth.

Exit codes: 0 success, 1 usage error (bad arguments or config keys),
2 data error (unreadable or malformed input).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .codec import Bitstream, EncoderConfig, decode_sequence, encode
from .codec.bits import BitstreamError
from .experiments.config import ConfigError, load_config
from .experiments.fit import fit_power
from .experiments.harness import (
    COMPARE_QPS,
    SWEEP_QPS,
    anchor_ratio,
    compare_adaptive,
    find_lambda_opt,
    format_table,
    read_records,
    sweep,
    write_compare,
    write_frame_stats,
    write_records,
)
from .experiments.synth import ContentClass, SynthSpec, synth_sequence
from .metrics import RDCurve, RDPoint, bd_psnr, bd_rate
from .rdo import Profile
from .video_io import SequenceHeader, VideoIOError, load_video, write_y4m

log = logging.getLogger("lambdacodec")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _size(text: str) -> tuple[int, int]:
    w, sep, h = text.lower().partition("x")
    try:
        if not sep:
            raise ValueError
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def cmd_encode(args) -> int:
    if (args.width is None) != (args.height is None):
        raise UsageError("--width and --height go together")
    header, frames = load_video(args.input, args.width, args.height)
    if not frames:
        raise DataError(f"{args.input}: no frames")
    try:
        cfg = EncoderConfig(
            qp=args.qp, profile=Profile.parse(args.profile), adaptive=args.adaptive,
            lambda_scale_k=args.k, gop_length=args.gop, search_range=args.search_range,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        res = encode(frames, cfg, frame_rate=(header.frame_rate_num, header.frame_rate_den))
    except ValueError as exc:
        raise DataError(str(exc)) from None
    Path(args.out).write_bytes(res.bitstream.to_bytes())
    if args.stats:
        write_frame_stats(res.stats, args.stats)
    print(f"{len(frames)} frames, {res.bitstream.total_bits} bits -> {args.out}")
    return EXIT_OK


def cmd_decode(args) -> int:
    stream = Bitstream.from_bytes(Path(args.input).read_bytes())
    frames = decode_sequence(stream)
    header = SequenceHeader(stream.width, stream.height, stream.frame_rate_num, stream.frame_rate_den, len(frames))
    write_y4m(header, frames, args.out)
    print(f"{len(frames)} frames -> {args.out}")
    return EXIT_OK


def _load_cfg(path):
    try:
        return load_config(path)
    except ConfigError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_sweep(args) -> int:
    cfg = _load_cfg(args.config)
    records = sweep(
        cfg.sequences(), cfg.qps or SWEEP_QPS, cfg.k_grid, cfg.profile, cfg.jobs, **cfg.encoder_options()
    )
    write_records(records, args.out)
    print(f"{len(records)} records -> {args.out}")
    for seq in sorted({r.seq for r in records}):
        mine = [r for r in records if r.seq == seq]
        opt = find_lambda_opt(mine, cfg.profile, cfg.per_qp, cfg.hevc_p, cfg.gop_length)
        print(f"{seq:>12}  r_pb={anchor_ratio(mine):.3f}  k*={opt.k_star:.4g}  BD-Rate={opt.bd_rate:+.2f}%")
    return EXIT_OK


def _read_fit_points(path) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataError(f"{path}: empty CSV")
    cols = set(rows[0])
    if {"r_pb", "r_lambda"} <= cols:
        return [(float(r["r_pb"]), float(r["r_lambda"])) for r in rows]
    if {"seq", "k", "r_pb"} <= cols:
        # a sweep CSV: one (anchor r_pb, k*) point per sequence
        records = read_records(path)
        points = []
        for seq in sorted({r.seq for r in records}):
            mine = [r for r in records if r.seq == seq]
            points.append((anchor_ratio(mine), find_lambda_opt(mine).r_lambda))
        return points
    raise DataError(f"{path}: need columns r_pb,r_lambda (or a sweep CSV)")


def cmd_fit(args) -> int:
    points = _read_fit_points(args.input)
    res = fit_power(points)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "c", "rss", "n"])
        w.writerow([repr(res.a), repr(res.b), repr(res.c), repr(res.rss), res.n])
    print(f"r_lambda = {res.a:.4g} * r_pb^{res.b:.4g} + {res.c:.4g}  (rss {res.rss:.3g}, n={res.n})")
    return EXIT_OK


def _read_curve(path) -> RDCurve:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataError(f"{path}: empty CSV")
    cols = set(rows[0])
    for rate_col, q_col in (("bitrate_kbps", "psnr_y"), ("bitrate", "psnr")):
        if {rate_col, q_col} <= cols:
            return RDCurve(RDPoint(float(r[rate_col]), float(r[q_col])) for r in rows)
    raise DataError(f"{path}: need columns bitrate,psnr (or bitrate_kbps,psnr_y)")


def cmd_bd(args) -> int:
    a, t = _read_curve(args.anchor), _read_curve(args.test)
    print(f"BD-PSNR {bd_psnr(a, t):+.4f} dB")
    print(f"BD-Rate {bd_rate(a, t):+.3f} %")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _load_cfg(args.config)
    seqs = cfg.sequences()
    profiles = [cfg.profile] if not args.both_profiles else list(Profile)
    results = [
        compare_adaptive(seqs, cfg.qps or COMPARE_QPS, p, cfg.jobs, **cfg.encoder_options()) for p in profiles
    ]
    write_compare(results, args.out)
    print(format_table(results))
    return EXIT_OK


def cmd_synth(args) -> int:
    w, h = args.size
    try:
        spec = SynthSpec(ContentClass.parse(args.content), args.seed, w, h, args.frames, args.fps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    frames = synth_sequence(spec)
    write_y4m(SequenceHeader(w, h, args.fps, 1, len(frames)), frames, args.out)
    print(f"{spec.name}: {len(frames)} frames {w}x{h} -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lambdacodec", description="Toy hybrid codec with adaptive B-frame lambda.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("encode", help="encode a .y4m (or raw I420) file")
    e.add_argument("--input", required=True)
    e.add_argument("--width", type=int)
    e.add_argument("--height", type=int)
    e.add_argument("--qp", type=int, required=True)
    e.add_argument("--profile", choices=[x.value for x in Profile], default="h264")
    e.add_argument("--adaptive", action="store_true")
    e.add_argument("--k", type=float, default=1.0)
    e.add_argument("--gop", type=int, default=4)
    e.add_argument("--search-range", type=int, default=16)
    e.add_argument("--out", required=True)
    e.add_argument("--stats")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="decode a bitstream to .y4m")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("sweep", help="constant-k B-frame lambda sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fit", help="fit r_lambda = a*r_pb^b + c")
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    b = sub.add_parser("bd", help="Bjontegaard deltas between two RD curves")
    b.add_argument("--anchor", required=True)
    b.add_argument("--test", required=True)
    b.set_defaults(func=cmd_bd)

    c = sub.add_parser("compare", help="adaptive controller vs formula lambda")
    c.add_argument("--config", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--both-profiles", action="store_true")
    c.set_defaults(func=cmd_compare)

    y = sub.add_parser("synth", help="write a synthetic test sequence")
    y.add_argument("--class", dest="content", required=True, choices=[x.value for x in ContentClass])
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--size", type=_size, default=(64, 64))
    y.add_argument("--frames", type=int, default=61)
    y.add_argument("--fps", type=int, default=25)
    y.add_argument("--out", required=True)
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, VideoIOError, BitstreamError, OSError, ValueError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
