"""Plain ``key = value`` experiment configuration files.

Blank lines and ``#`` comments are ignored; unknown keys and repeated keys
are errors. Example::

    classes = static, dyntex, mixed
    seeds = 0, 1, 2
    size = 64x64
    frames = 61
    qps = 27, 32, 37, 42
    profile = h264
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from ..rdo import Profile
from ..video_io import read_y4m
from .synth import ContentClass, Sequence, SynthSpec, corpus


class ConfigError(ValueError):
    pass


def _ints(v: str) -> tuple[int, ...]:
    return tuple(int(x) for x in _items(v))


def _floats(v: str) -> tuple[float, ...]:
    return tuple(float(x) for x in _items(v))


def _items(v: str) -> list[str]:
    out = [x.strip() for x in v.split(",")]
    if not all(out):
        raise ValueError(f"empty item in list {v!r}")
    return out


def _size(v: str) -> tuple[int, int]:
    w, sep, h = v.lower().partition("x")
    if not sep:
        raise ValueError(f"size must look like WxH, got {v!r}")
    return int(w), int(h)


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


@dataclass
class ExperimentConfig:
    classes: tuple = ("static", "dyntex", "mixed")
    seeds: tuple = (0, 1, 2)
    size: tuple = (64, 64)
    frames: int = 61
    fps: int = 25
    qps: Optional[tuple] = None  # None: the experiment's own default grid
    k_grid: Optional[tuple] = None
    profile: Profile = Profile.H264_LIKE
    gop_length: int = 4
    search_range: int = 16
    hevc_p: float = 0.5
    scene_cut_threshold: float = 0.5
    per_qp: bool = False
    jobs: int = 1
    inputs: tuple = field(default_factory=tuple)  # y4m files used instead of synthetic content

    def sequences(self) -> list[Sequence]:
        if self.inputs:
            seqs = []
            for path in self.inputs:
                header, frames = read_y4m(path)
                fps = header.frame_rate_num / header.frame_rate_den
                seqs.append(Sequence(Path(path).stem, frames, None, f"{header.width}x{header.height}", fps))
            return seqs
        w, h = self.size
        return corpus(self.classes, self.seeds, w, h, self.frames, self.fps)

    def encoder_options(self) -> dict:
        return {
            "gop_length": self.gop_length,
            "search_range": self.search_range,
            "hevc_p": self.hevc_p,
            "scene_cut_threshold": self.scene_cut_threshold,
        }


_PARSERS = {
    "classes": lambda v: tuple(ContentClass.parse(x).value for x in _items(v)),
    "seeds": _ints,
    "size": _size,
    "frames": int,
    "fps": int,
    "qps": _ints,
    "k_grid": _floats,
    "profile": Profile.parse,
    "gop_length": int,
    "search_range": int,
    "hevc_p": float,
    "scene_cut_threshold": float,
    "per_qp": _bool,
    "jobs": int,
    "inputs": lambda v: tuple(_items(v)),
}
assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    cfg = ExperimentConfig(**values)
    if cfg.frames < 1 or cfg.fps < 1 or cfg.jobs < 1:
        raise ConfigError("frames, fps and jobs must be positive")
    if not cfg.inputs:
        try:
            SynthSpec(ContentClass.parse(cfg.classes[0]), 0, cfg.size[0], cfg.size[1], cfg.frames, cfg.fps)
        except (ValueError, IndexError) as exc:
            raise ConfigError(str(exc)) from None
    return cfg


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())
