import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lambdacodec.video_io import VideoFrame

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_frame(rng, width=64, height=64, index=0):
    return VideoFrame(
        rng.integers(0, 256, (height, width), dtype=np.uint8),
        rng.integers(0, 256, (height // 2, width // 2), dtype=np.uint8),
        rng.integers(0, 256, (height // 2, width // 2), dtype=np.uint8),
        index,
    )


def smooth_sequence(rng, n=13, width=64, height=64, motion=2):
    """Smooth textured frames drifting by a few pixels: codeable, non-trivial content."""
    from scipy.ndimage import gaussian_filter

    big = gaussian_filter(rng.standard_normal((height + 64, width + 64)), 2.0, mode="wrap")
    big = 128 + 40 * big / big.std()
    frames = []
    for t in range(n):
        oy, ox = 32 - motion * t // 2, 32 - motion * t
        y = big[oy:oy + height, ox:ox + width] + rng.normal(0, 2, (height, width))
        y = np.clip(np.rint(y), 0, 255).astype(np.uint8)
        c = np.clip(np.rint(y.reshape(height // 2, 2, width // 2, 2).mean(axis=(1, 3))), 0, 255).astype(np.uint8)
        frames.append(VideoFrame(y, c, 255 - c, t))
    return frames


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
