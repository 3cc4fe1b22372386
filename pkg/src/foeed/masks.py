"""Inpainting masks: ``True`` marks a known pixel (the Dirichlet set)."""
import math

import numpy as np


def _rng(seed):
    # PCG64 through numpy's Generator: stable across platforms for a given seed
    return np.random.Generator(np.random.PCG64(seed))


def known_count(width, height, density):
    """``round(density * width * height)`` with halves rounded up."""
    return int(math.floor(density * width * height + 0.5))


def random_mask(width, height, density, seed=0):
    """Exactly ``known_count(...)`` known pixels drawn uniformly without replacement."""
    if not 0.0 < density < 1.0:
        raise ValueError(f"density must lie in (0, 1), got {density}")
    n = width * height
    k = known_count(width, height, density)
    if k < 1 or k >= n:
        raise ValueError(f"density {density} leaves no known or no unknown pixel on {width}x{height}")
    idx = _rng(seed).choice(n, size=k, replace=False)
    known = np.zeros(n, dtype=bool)
    known[idx] = True
    return known.reshape(height, width)


def scratch_mask_from_image(marker, threshold=128):
    """Pixels whose marker value exceeds ``threshold`` become unknown.

    Returns ``(known, unknown_fraction)``.
    """
    marker = np.asarray(marker)
    known = ~(marker > threshold)
    if known.all():
        raise ValueError("marker image marks no pixel as scratched")
    if not known.any():
        raise ValueError("marker image marks every pixel as scratched")
    return known, float(1.0 - known.mean())


def scratch_marker(width, height, coverage, thickness=3, seed=0, max_strokes=100000):
    """Synthetic scratch overlay: random straight strokes until ``coverage`` is reached.

    Returns a uint8 image with 255 on scratches and 0 elsewhere. Strokes are
    added one at a time, so the achieved coverage overshoots the target by at
    most one stroke.
    """
    if not 0.0 < coverage < 1.0:
        raise ValueError(f"coverage must lie in (0, 1), got {coverage}")
    rng = _rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    scratched = np.zeros((height, width), dtype=bool)
    half = 0.5 * thickness
    for _ in range(max_strokes):
        if scratched.mean() >= coverage:
            break
        x0, x1 = rng.uniform(0, width, 2)
        y0, y1 = rng.uniform(0, height, 2)
        dx, dy = x1 - x0, y1 - y0
        length2 = dx * dx + dy * dy
        if length2 < 1.0:
            continue
        t = np.clip(((xx - x0) * dx + (yy - y0) * dy) / length2, 0.0, 1.0)
        dist2 = (xx - x0 - t * dx) ** 2 + (yy - y0 - t * dy) ** 2
        scratched |= dist2 <= half * half
    return np.where(scratched, 255, 0).astype(np.uint8)


def to_pgm_array(known):
    """Mask as 8-bit image: 255 known, 0 unknown."""
    return np.where(np.asarray(known, dtype=bool), 255, 0).astype(np.uint8)


def from_pgm_array(a):
    a = np.asarray(a)
    bad = (a != 0) & (a != 255)
    if bad.any():
        raise ValueError("mask images must contain only 0 (unknown) and 255 (known)")
    return a == 255
