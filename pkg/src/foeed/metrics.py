"""Reconstruction error measures over all pixels (and channels)."""
import numpy as np


def _pair(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    return u, v


def mse(u, v):
    """Mean squared error."""
    u, v = _pair(u, v)
    return float(np.mean((u - v) ** 2))


def aae(u, v):
    """Average absolute error."""
    u, v = _pair(u, v)
    return float(np.mean(np.abs(u - v)))
