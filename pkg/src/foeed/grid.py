"""Discrete differential operators on 2D pixel grids.

Images are ``(height, width)`` float arrays; axis 1 is ``x`` (column index
``i``) and axis 0 is ``y`` (row index ``j``). Homogeneous Neumann boundaries
are realised by half-sample mirroring (``d c b a | a b c d``). Fields of
symmetric tensors are mirrored as tensors: the off-diagonal component changes
sign under reflection, which makes every outer operator here the exact
adjoint of the matching inner one.
"""
import math
from typing import NamedTuple

import numpy as np
from scipy import ndimage


class VectorField2(NamedTuple):
    x: np.ndarray
    y: np.ndarray


class SymMat2(NamedTuple):
    """Symmetric 2x2 matrix, or a per-pixel field of them.

    Components may be scalars or arrays of equal shape. ``xy`` is stored once.
    """

    xx: np.ndarray
    xy: np.ndarray
    yy: np.ndarray

    @property
    def yx(self):
        return self.xy

    def __getitem__(self, key):
        if isinstance(key, tuple):
            i, j = key
            comp = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 2}[(i, j)]
            return tuple.__getitem__(self, comp)
        return tuple.__getitem__(self, key)

    def as_array(self):
        """Dense ``(2, 2, ...)`` representation."""
        xx, xy, yy = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in self))
        return np.array([[xx, xy], [xy, yy]])

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=float)
        return cls(a[0, 0], 0.5 * (a[0, 1] + a[1, 0]), a[1, 1])


def _pad(u, odd=False):
    p = np.pad(u, 1, mode="symmetric")
    if odd:
        p[0, :] *= -1
        p[-1, :] *= -1
        p[:, 0] *= -1
        p[:, -1] *= -1
    return p


def gaussian_kernel(sigma):
    """Normalised sampled Gaussian truncated at radius ``ceil(3 sigma)``."""
    radius = int(math.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def gaussian_smooth(u, sigma):
    """Separable Gaussian presmoothing with mirrored boundaries.

    ``sigma == 0`` returns the input unchanged.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    u = np.asarray(u, dtype=float)
    if sigma == 0:
        return u
    k = gaussian_kernel(sigma)
    # scipy's "reflect" is the half-sample mirror used everywhere in this module
    out = ndimage.correlate1d(u, k, axis=1, mode="reflect")
    return ndimage.correlate1d(out, k, axis=0, mode="reflect")


def gradient(u, dx=1.0, dy=1.0):
    """Central-difference gradient."""
    p = _pad(np.asarray(u, dtype=float))
    ux = (p[1:-1, 2:] - p[1:-1, :-2]) / (2.0 * dx)
    uy = (p[2:, 1:-1] - p[:-2, 1:-1]) / (2.0 * dy)
    return VectorField2(ux, uy)


def _second_x(p, dx):
    return (p[1:-1, :-2] - 2.0 * p[1:-1, 1:-1] + p[1:-1, 2:]) / (dx * dx)


def _second_y(p, dy):
    return (p[:-2, 1:-1] - 2.0 * p[1:-1, 1:-1] + p[2:, 1:-1]) / (dy * dy)


def _mixed(p, dx, dy):
    return (p[2:, 2:] + p[:-2, :-2] - p[:-2, 2:] - p[2:, :-2]) / (4.0 * dx * dy)


def hessian(u, dx=1.0, dy=1.0):
    """Second derivatives with the standard 3x3 stencils.

    The mixed stencil is the antisymmetric four-corner one, exact on ``x*y``.
    """
    p = _pad(np.asarray(u, dtype=float))
    return SymMat2(_second_x(p, dx), _mixed(p, dx, dy), _second_y(p, dy))


def laplacian(u, dx=1.0, dy=1.0):
    p = _pad(np.asarray(u, dtype=float))
    return _second_x(p, dx) + _second_y(p, dy)


def structure_tensor(u, sigma, dx=1.0, dy=1.0):
    """Rank-one structure tensor of the presmoothed image (no integration scale)."""
    g = gradient(gaussian_smooth(u, sigma), dx, dy)
    return SymMat2(g.x * g.x, g.x * g.y, g.y * g.y)


def outer_second(T, dx=1.0, dy=1.0):
    """``d_xx T_xx + d_xy T_xy + d_yx T_yx + d_yy T_yy`` for a symmetric field."""
    pxx = _pad(np.asarray(T.xx, dtype=float))
    pyy = _pad(np.asarray(T.yy, dtype=float))
    pxy = _pad(np.asarray(T.xy, dtype=float), odd=True)
    return _second_x(pxx, dx) + 2.0 * _mixed(pxy, dx, dy) + _second_y(pyy, dy)


def outer_div2(D, u, dx=1.0, dy=1.0):
    """``div(D grad u)`` for a field of symmetric diffusion tensors.

    Diagonal terms use the compact two-point flux with half-pixel averaged
    coefficients (so ``D = I`` gives the 5-point Laplacian); off-diagonal
    terms use central differences.
    """
    u = np.asarray(u, dtype=float)
    a = np.broadcast_to(np.asarray(D.xx, dtype=float), u.shape)
    b = np.broadcast_to(np.asarray(D.xy, dtype=float), u.shape)
    c = np.broadcast_to(np.asarray(D.yy, dtype=float), u.shape)
    pu = _pad(u)
    pa = _pad(a)
    pc = _pad(c)

    # x-flux at i+1/2; the mirrored ghost makes the boundary flux vanish
    fx = 0.5 * (pa[1:-1, 1:] + pa[1:-1, :-1]) * (pu[1:-1, 1:] - pu[1:-1, :-1]) / dx
    fy = 0.5 * (pc[1:, 1:-1] + pc[:-1, 1:-1]) * (pu[1:, 1:-1] - pu[:-1, 1:-1]) / dy
    out = (fx[:, 1:] - fx[:, :-1]) / dx + (fy[1:, :] - fy[:-1, :]) / dy

    g = gradient(u, dx, dy)
    # off-diagonal flux parts are odd under reflection across the normal axis
    px = _pad(b * g.y)
    px[:, 0] *= -1
    px[:, -1] *= -1
    py = _pad(b * g.x)
    py[0, :] *= -1
    py[-1, :] *= -1
    out += (px[1:-1, 2:] - px[1:-1, :-2]) / (2.0 * dx)
    out += (py[2:, 1:-1] - py[:-2, 1:-1]) / (2.0 * dy)
    return out
