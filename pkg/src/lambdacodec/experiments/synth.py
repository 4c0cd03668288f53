"""Seeded synthetic test content standing in for the three content classes.

* ``static``  smooth gradient + fixed low-contrast texture, a slow sub-pixel
  drift totalling at most one pixel over the clip, light sensor noise;
* ``dyntex``  band-limited noise field re-drawn every frame (weak AR(1) memory),
  i.e. a dynamic texture with little temporal predictability;
* ``mixed``   textured rectangles translating over a static textured background.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter, shift

from ..video_io import VideoFrame

MIN_FRAMES = 13


class ContentClass(str, enum.Enum):
    STATIC = "static"
    DYNTEX = "dyntex"
    MIXED = "mixed"

    @classmethod
    def parse(cls, value) -> "ContentClass":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class SynthSpec:
    content: ContentClass
    seed: int = 0
    width: int = 64
    height: int = 64
    frames: int = 61
    fps: int = 25

    def __post_init__(self):
        object.__setattr__(self, "content", ContentClass.parse(self.content))
        if self.width <= 0 or self.height <= 0 or self.width % 2 or self.height % 2:
            raise ValueError(f"dimensions must be positive and even, got {self.width}x{self.height}")
        if self.frames < MIN_FRAMES:
            raise ValueError(f"need at least {MIN_FRAMES} frames, got {self.frames}")

    @property
    def name(self) -> str:
        return f"{self.content.value}-{self.seed}"

    @property
    def group(self) -> str:
        return f"{self.width}x{self.height}"


@dataclass
class Sequence:
    name: str
    frames: list
    content: ContentClass | None = None
    group: str = ""
    fps: int = 25
    meta: dict = field(default_factory=dict)


def _texture(rng, shape, sigma, amplitude):
    t = gaussian_filter(rng.standard_normal(shape), sigma, mode="wrap")
    return t / (t.std() + 1e-12) * amplitude


def _gradient(rng, h, w):
    yy, xx = np.mgrid[0:h, 0:w]
    gx, gy = rng.uniform(-60, 60, 2)
    return rng.uniform(90, 160) + gx * (xx / w - 0.5) + gy * (yy / h - 0.5)


def _to_frame(luma: np.ndarray, index: int, tint=(0.18, -0.12)) -> VideoFrame:
    y = np.clip(np.rint(luma), 0, 255).astype(np.uint8)
    h, w = y.shape
    sub = y.astype(float).reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))
    dev = sub - sub.mean()
    u = np.clip(np.rint(128 + tint[0] * dev), 0, 255).astype(np.uint8)
    v = np.clip(np.rint(128 + tint[1] * dev), 0, 255).astype(np.uint8)
    return VideoFrame(y, u, v, index)


def _static(spec: SynthSpec, rng) -> list[VideoFrame]:
    h, w = spec.height, spec.width
    margin = 2
    canvas = _gradient(rng, h + 2 * margin, w + 2 * margin)
    canvas += _texture(rng, canvas.shape, sigma=rng.uniform(1.2, 2.5), amplitude=rng.uniform(10, 18))
    # slow camera drift of at most one pixel over the whole clip, sub-pixel per frame
    drift = rng.uniform(-1, 1, size=2)
    drift /= max(1.0, float(np.hypot(*drift)))
    noise = rng.uniform(1.0, 2.0)
    frames = []
    for t in range(spec.frames):
        moved = shift(canvas, drift * t / (spec.frames - 1), order=3, mode="nearest")
        view = moved[margin:margin + h, margin:margin + w]
        frames.append(_to_frame(view + rng.normal(0, noise, (h, w)), t))
    return frames


def _dyntex(spec: SynthSpec, rng) -> list[VideoFrame]:
    h, w = spec.height, spec.width
    base = _gradient(rng, h, w) * 0.3 + rng.uniform(80, 120)
    sigma = rng.uniform(1.0, 2.0)
    amp = rng.uniform(18, 30)
    rho = rng.uniform(0.2, 0.45)
    field_ = _texture(rng, (h, w), sigma, 1.0)
    frames = []
    for t in range(spec.frames):
        if t:
            field_ = rho * field_ + np.sqrt(1 - rho * rho) * _texture(rng, (h, w), sigma, 1.0)
        frames.append(_to_frame(base + amp * field_, t))
    return frames


def _mixed(spec: SynthSpec, rng) -> list[VideoFrame]:
    h, w = spec.height, spec.width
    background = _gradient(rng, h, w) + _texture(rng, (h, w), sigma=1.5, amplitude=14)
    objects = []
    for _ in range(rng.integers(2, 4)):
        oh, ow = rng.integers(h // 6, h // 3), rng.integers(w // 6, w // 3)
        patch = rng.uniform(40, 220) + _texture(rng, (oh, ow), sigma=1.0, amplitude=22)
        vel = rng.integers(-3, 4, size=2)
        if not vel.any():
            vel[1] = 2
        pos = rng.uniform(0, [h - oh, w - ow])
        objects.append([patch, pos, vel.astype(float)])
    noise = rng.uniform(0.5, 1.2)
    frames = []
    for t in range(spec.frames):
        img = background.copy()
        for patch, pos, vel in objects:
            oh, ow = patch.shape
            y0, x0 = int(round(pos[0])), int(round(pos[1]))
            img[y0:y0 + oh, x0:x0 + ow] = patch
        frames.append(_to_frame(img + rng.normal(0, noise, (h, w)), t))
        for obj in objects:
            patch, pos, vel = obj
            oh, ow = patch.shape
            pos += vel
            for ax, lim in ((0, h - oh), (1, w - ow)):
                if pos[ax] < 0 or pos[ax] > lim:
                    vel[ax] = -vel[ax]
                    pos[ax] = min(max(pos[ax], 0), lim)
    return frames


_GENERATORS = {
    ContentClass.STATIC: _static,
    ContentClass.DYNTEX: _dyntex,
    ContentClass.MIXED: _mixed,
}


def synth_sequence(spec: SynthSpec) -> list[VideoFrame]:
    """Generate the frames for ``spec``; a pure function of its fields."""
    # class index folded into the seed so equal seeds differ across classes
    rng = np.random.default_rng([spec.seed, list(ContentClass).index(spec.content)])
    return _GENERATORS[spec.content](spec, rng)


def make_sequence(spec: SynthSpec) -> Sequence:
    return Sequence(spec.name, synth_sequence(spec), spec.content, spec.group, spec.fps, {"spec": spec})


def corpus(classes=("static", "dyntex", "mixed"), seeds=(0, 1, 2), width=64, height=64, frames=61, fps=25) -> list[Sequence]:
    return [
        make_sequence(SynthSpec(ContentClass.parse(c), s, width, height, frames, fps))
        for c in classes
        for s in seeds
    ]
