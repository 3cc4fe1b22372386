"""Input checks shared by the estimators and the command line."""
import numpy as np
from sklearn.utils import check_array


def check_image(X, min_size=3):
    """Float copy of a ``(h, w)`` or ``(h, w, c)`` image with finite values."""
    X = check_array(X, ensure_2d=False, allow_nd=True, dtype=np.float64,
                    ensure_all_finite=True, copy=True)
    if X.ndim not in (2, 3):
        raise ValueError(f"expected a 2D image or a 3D (h, w, channels) stack, got shape {X.shape}")
    if X.shape[0] < min_size or X.shape[1] < min_size:
        raise ValueError(f"image must be at least {min_size}x{min_size}, got {X.shape[1]}x{X.shape[0]}")
    return X


def check_mask(mask, shape, require_unknown=False):
    """Boolean known-pixel mask of the given 2D ``shape``.

    Accepts booleans or 0/255 images (255 = known).
    """
    if mask is None:
        raise ValueError("an inpainting mask is required")
    m = np.asarray(mask)
    if m.dtype != bool:
        values = np.unique(m)
        if not np.isin(values, (0, 1, 255)).all():
            raise ValueError("mask values must be boolean, 0/1, or 0/255")
        m = m > 0
    if m.shape != tuple(shape):
        raise ValueError(f"mask shape {m.shape} does not match image shape {tuple(shape)}")
    if not m.any():
        raise ValueError("mask has no known pixels")
    if require_unknown and m.all():
        raise ValueError("mask has no unknown pixels")
    return m
