"""Second- and fourth-order diffusion tensors.

A fourth-order tensor is stored as an array of shape ``(2, 2, 2, 2, *field)``
indexed ``d[i, j, k, l]`` with ``0 = x`` and ``1 = y``; a single tensor has
``field == ()``.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grid import SymMat2, gaussian_smooth, gradient

EPS_GRAD = 1e-10
SQRT2 = np.sqrt(2.0)


class Mu3Rule(str, Enum):
    ONE = "one"
    AMEAN = "amean"
    GMEAN = "gmean"


def mu3_value(rule, mu1, mu2=1.0):
    rule = Mu3Rule(rule)
    if rule is Mu3Rule.ONE:
        return np.ones_like(np.asarray(mu1, dtype=float))
    if rule is Mu3Rule.AMEAN:
        return 0.5 * (mu1 + mu2)
    return np.sqrt(mu1 * mu2)


@dataclass
class Eigenframe:
    """Spectral data of a rank-one structure tensor ``grad u_s grad u_s^T``.

    ``lambda1`` is measured in diffusivity units (gradient divided by the
    intensity scale); ``v1`` and ``v2`` have shape ``(2, *field)``.
    """

    lambda1: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    degenerate: np.ndarray

    @classmethod
    def from_gradient(cls, gx, gy, scale=1.0, eps=EPS_GRAD):
        gx = np.asarray(gx, dtype=float)
        gy = np.asarray(gy, dtype=float)
        norm = np.hypot(gx, gy)
        degenerate = norm < eps
        safe = np.where(degenerate, 1.0, norm)
        c = np.where(degenerate, 1.0, gx / safe)
        s = np.where(degenerate, 0.0, gy / safe)
        lambda1 = np.where(degenerate, 0.0, (norm / scale) ** 2)
        return cls(lambda1, np.array([c, s]), np.array([-s, c]), degenerate)

    @classmethod
    def from_image(cls, u, sigma, dx=1.0, dy=1.0, scale=1.0, eps=EPS_GRAD):
        g = gradient(gaussian_smooth(u, sigma), dx, dy)
        return cls.from_gradient(g.x, g.y, scale=scale, eps=eps)

    def eigentensors(self):
        """``E1..E4`` as ``(2, 2, *field)`` arrays."""
        v1, v2 = self.v1, self.v2
        o12 = np.einsum("i...,j...->ij...", v1, v2)
        o21 = np.einsum("i...,j...->ij...", v2, v1)
        return (
            np.einsum("i...,j...->ij...", v1, v1),
            np.einsum("i...,j...->ij...", v2, v2),
            (o12 + o21) / SQRT2,
            (o12 - o21) / SQRT2,
        )


def _outer(a, b):
    return np.einsum("ij...,kl...->ijkl...", a, b)


def _as_dense(H):
    if isinstance(H, SymMat2):
        return H.as_array()
    return np.asarray(H, dtype=float)


def contract(A, B):
    """Frobenius product ``A : B = trace(B^T A)`` of ``(2, 2, ...)`` arrays."""
    return np.einsum("ij...,ij...->...", A, B)


def identity4(field=()):
    """The fourth-order tensor acting as identity on symmetric matrices."""
    d = np.eye(2)
    ident = 0.5 * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d))
    return np.broadcast_to(ident.reshape((2, 2, 2, 2) + (1,) * len(field)),
                           (2, 2, 2, 2) + tuple(field)).copy()


def eed_tensor(frame, g):
    """EED tensor ``g(lambda1) v1 v1^T + v2 v2^T``; identity where degenerate."""
    mu1 = g(frame.lambda1)
    c, s = frame.v1
    xx = mu1 * c * c + s * s
    xy = (mu1 - 1.0) * c * s
    yy = mu1 * s * s + c * c
    deg = frame.degenerate
    return SymMat2(np.where(deg, 1.0, xx), np.where(deg, 0.0, xy), np.where(deg, 1.0, yy))


def foeed_eigenvalues(frame, g, rule=Mu3Rule.GMEAN):
    mu1 = np.asarray(g(frame.lambda1), dtype=float)
    mu2 = np.ones_like(mu1)
    return mu1, mu2, mu3_value(rule, mu1, mu2)


def foeed_tensor(frame, g, rule=Mu3Rule.GMEAN):
    """Spectral fourth-order tensor ``sum_a mu_a E_a (x) E_a`` (``mu4 = 0``)."""
    mu1, mu2, mu3 = foeed_eigenvalues(frame, g, rule)
    E1, E2, E3, _ = frame.eigentensors()
    return mu1 * _outer(E1, E1) + mu2 * _outer(E2, E2) + mu3 * _outer(E3, E3)


def foeed_apply(frame, g, rule, H):
    """``foeed_tensor(frame, g, rule) : H`` in closed form, without the 16 coefficients."""
    mu1, mu2, mu3 = foeed_eigenvalues(frame, g, rule)
    c, s = frame.v1
    cc, ss, cs = c * c, s * s, c * s
    a1 = cc * H.xx + 2.0 * cs * H.xy + ss * H.yy
    a2 = ss * H.xx - 2.0 * cs * H.xy + cc * H.yy
    w = -cs * H.xx + (cc - ss) * H.xy + cs * H.yy
    m1, m2, m3 = mu1 * a1, mu2 * a2, 2.0 * mu3 * w
    return SymMat2(
        m1 * cc + m2 * ss - m3 * cs,
        (m1 - m2) * cs + 0.5 * m3 * (cc - ss),
        m1 * ss + m2 * cc + m3 * cs,
    )


def double_dot(D4, H):
    """``T_ij = d_ijkl H_kl``, returned symmetrised."""
    T = np.einsum("ijkl...,kl...->ij...", np.asarray(D4, dtype=float), _as_dense(H))
    return SymMat2.from_array(T)


def e3_contraction(frame, H):
    """``E3 : H``, the mixed second derivative along ``v1`` and ``v2``."""
    Hd = _as_dense(H)
    v1, v2 = frame.v1, frame.v2
    return (np.einsum("i...,ij...,j...->...", v1, Hd, v2)
            + np.einsum("i...,ij...,j...->...", v2, Hd, v1)) / SQRT2


# -- adapters expressing earlier fourth-order models as d_ijkl --------------

def _laplacian_rows(inner):
    """Place an inner ``(2, 2, ...)`` weight in the ``xx`` and ``yy`` rows."""
    shape = (2, 2) + inner.shape
    d = np.zeros(shape)
    d[0, 0] = inner
    d[1, 1] = inner
    return d


def coeffs_you_kaveh(laplacian, g, scale=1.0):
    """``-lap(g(|lap u|) lap u)``: ``d_xxxx = d_xxyy = d_yyxx = d_yyyy = g``."""
    lap = np.asarray(laplacian, dtype=float)
    gv = np.asarray(g((lap / scale) ** 2), dtype=float)
    inner = np.zeros((2, 2) + lap.shape)
    inner[0, 0] = gv
    inner[1, 1] = gv
    return _laplacian_rows(inner)


def _normal_tangent_rows(gx, gy, w_nn, w_tt, eps):
    gx = np.asarray(gx, dtype=float)
    gy = np.asarray(gy, dtype=float)
    norm2 = gx * gx + gy * gy
    degenerate = norm2 < eps * eps
    safe = np.where(degenerate, 1.0, norm2)
    nn = np.array([[gx * gx, gx * gy], [gx * gy, gy * gy]]) / safe
    tt = np.array([[gy * gy, -gx * gy], [-gx * gy, gx * gx]]) / safe
    inner = w_nn * nn + w_tt * tt
    iso = 0.5 * (w_nn + w_tt)
    inner[0, 0] = np.where(degenerate, iso, inner[0, 0])
    inner[1, 1] = np.where(degenerate, iso, inner[1, 1])
    inner[0, 1] = np.where(degenerate, 0.0, inner[0, 1])
    inner[1, 0] = np.where(degenerate, 0.0, inner[1, 0])
    return _laplacian_rows(inner)


def _g_of_gradient(gx, gy, g, scale):
    return np.asarray(g((np.asarray(gx) ** 2 + np.asarray(gy) ** 2) / scale ** 2), dtype=float)


def coeffs_hajiaboli(gradient_xy, g, scale=1.0, eps=EPS_GRAD):
    """``-lap(g^2 u_NN + g u_TT)``."""
    gx, gy = gradient_xy
    gv = _g_of_gradient(gx, gy, g, scale)
    return _normal_tangent_rows(gx, gy, gv * gv, gv, eps)


def coeffs_li1(gradient_xy, g, scale=1.0, eps=EPS_GRAD):
    """``-lap(g u_NN + u_TT)``."""
    gx, gy = gradient_xy
    gv = _g_of_gradient(gx, gy, g, scale)
    return _normal_tangent_rows(gx, gy, gv, np.ones_like(gv), eps)


def coeffs_li2(gradient_xy, eps=EPS_GRAD):
    """``-lap(u_TT)``."""
    gx, gy = gradient_xy
    gx = np.asarray(gx, dtype=float)
    zero = np.zeros_like(gx)
    return _normal_tangent_rows(gx, gy, zero, zero + 1.0, eps)
