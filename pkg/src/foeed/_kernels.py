"""Fused numba kernels for the EED and FOEED right-hand sides.

These compute exactly what the array code in ``grid``/``tensors`` computes,
in two passes over the image instead of a few dozen temporaries.
"""
import math

import numba
import numpy as np

CHARBONNIER, AUBERT, PERONA_MALIK, PERONA_MALIK2, GEMAN_REYNOLDS = range(5)
MU3_ONE, MU3_AMEAN, MU3_GMEAN = range(3)


@numba.njit(cache=True, inline="always")
def _m(i, n):
    if i < 0:
        return -i - 1
    if i >= n:
        return 2 * n - i - 1
    return i


@numba.njit(cache=True, inline="always")
def _sgn(i, n):
    return -1.0 if (i < 0 or i >= n) else 1.0


@numba.njit(cache=True, inline="always")
def _g(kind, s2, lam2):
    if kind == CHARBONNIER:
        return 1.0 / math.sqrt(1.0 + s2 / lam2)
    if kind == AUBERT:
        return (s2 / lam2) / ((s2 + lam2) * (s2 + lam2))
    if kind == PERONA_MALIK:
        return 1.0 / (1.0 + s2 / lam2)
    if kind == PERONA_MALIK2:
        return math.exp(-s2 / lam2)
    return 2.0 * lam2 / ((s2 + lam2) * (s2 + lam2))


@numba.njit(cache=True, inline="always")
def _frame(us, j, i, ny, nx, dx, dy, inv_scale2, eps):
    gx = (us[j, _m(i + 1, nx)] - us[j, _m(i - 1, nx)]) / (2.0 * dx)
    gy = (us[_m(j + 1, ny), i] - us[_m(j - 1, ny), i]) / (2.0 * dy)
    n2 = gx * gx + gy * gy
    norm = math.sqrt(n2)
    if norm < eps:
        return 1.0, 0.0, 0.0, True
    inv = 1.0 / norm
    return gx * inv, gy * inv, n2 * inv_scale2, False


@numba.njit(cache=True, fastmath=True)
def gaussian_smooth(u, kernel):
    """Separable correlation with half-sample mirrored boundaries."""
    ny, nx = u.shape
    r = kernel.size // 2
    tmp = np.empty_like(u)
    for j in range(ny):
        for i in range(nx):
            acc = 0.0
            for t in range(-r, r + 1):
                acc += kernel[t + r] * u[j, _m(i + t, nx)]
            tmp[j, i] = acc
    out = np.empty_like(u)
    for j in range(ny):
        for i in range(nx):
            acc = 0.0
            for t in range(-r, r + 1):
                acc += kernel[t + r] * tmp[_m(j + t, ny), i]
            out[j, i] = acc
    return out


@numba.njit(cache=True, fastmath=True)
def foeed_rhs(u, us, dx, dy, kind, lam, mu3_rule, inv_scale2, eps):
    ny, nx = u.shape
    txx = np.empty_like(u)
    txy = np.empty_like(u)
    tyy = np.empty_like(u)
    lam2 = lam * lam
    rxx, ryy, rxy = 1.0 / (dx * dx), 1.0 / (dy * dy), 0.25 / (dx * dy)
    for j in range(ny):
        jm, jp = _m(j - 1, ny), _m(j + 1, ny)
        for i in range(nx):
            im, ip = _m(i - 1, nx), _m(i + 1, nx)
            c, s, l1, _ = _frame(us, j, i, ny, nx, dx, dy, inv_scale2, eps)
            mu1 = _g(kind, l1, lam2)
            if mu3_rule == MU3_ONE:
                mu3 = 1.0
            elif mu3_rule == MU3_AMEAN:
                mu3 = 0.5 * (mu1 + 1.0)
            else:
                mu3 = math.sqrt(mu1)
            hxx = (u[j, im] - 2.0 * u[j, i] + u[j, ip]) * rxx
            hyy = (u[jm, i] - 2.0 * u[j, i] + u[jp, i]) * ryy
            hxy = (u[jp, ip] + u[jm, im] - u[jm, ip] - u[jp, im]) * rxy
            cc, ss, cs = c * c, s * s, c * s
            m1 = mu1 * (cc * hxx + 2.0 * cs * hxy + ss * hyy)
            m2 = ss * hxx - 2.0 * cs * hxy + cc * hyy
            m3 = 2.0 * mu3 * (-cs * hxx + (cc - ss) * hxy + cs * hyy)
            txx[j, i] = m1 * cc + m2 * ss - m3 * cs
            txy[j, i] = (m1 - m2) * cs + 0.5 * m3 * (cc - ss)
            tyy[j, i] = m1 * ss + m2 * cc + m3 * cs
    return _neg_outer_second(txx, txy, tyy, dx, dy)


@numba.njit(cache=True, fastmath=True)
def _neg_outer_second(txx, txy, tyy, dx, dy):
    ny, nx = txx.shape
    out = np.empty_like(txx)
    rxx, ryy, rxy = 1.0 / (dx * dx), 1.0 / (dy * dy), 0.25 / (dx * dy)
    for j in range(ny):
        jm, jp = _m(j - 1, ny), _m(j + 1, ny)
        sjm, sjp = _sgn(j - 1, ny), _sgn(j + 1, ny)
        for i in range(nx):
            im, ip = _m(i - 1, nx), _m(i + 1, nx)
            sim, sip = _sgn(i - 1, nx), _sgn(i + 1, nx)
            dxx = (txx[j, im] - 2.0 * txx[j, i] + txx[j, ip]) * rxx
            dyy = (tyy[jm, i] - 2.0 * tyy[j, i] + tyy[jp, i]) * ryy
            # off-diagonal component is odd under reflection
            dxy = (sjp * sip * txy[jp, ip] + sjm * sim * txy[jm, im]
                   - sjm * sip * txy[jm, ip] - sjp * sim * txy[jp, im]) * rxy
            out[j, i] = -(dxx + 2.0 * dxy + dyy)
    return out


@numba.njit(cache=True, fastmath=True)
def eed_rhs(u, us, dx, dy, kind, lam, inv_scale2, eps):
    ny, nx = u.shape
    a = np.empty_like(u)
    b = np.empty_like(u)
    c_ = np.empty_like(u)
    lam2 = lam * lam
    for j in range(ny):
        for i in range(nx):
            c, s, l1, deg = _frame(us, j, i, ny, nx, dx, dy, inv_scale2, eps)
            if deg:
                a[j, i], b[j, i], c_[j, i] = 1.0, 0.0, 1.0
            else:
                mu1 = _g(kind, l1, lam2)
                a[j, i] = mu1 * c * c + s * s
                b[j, i] = (mu1 - 1.0) * c * s
                c_[j, i] = mu1 * s * s + c * c
    out = np.empty_like(u)
    for j in range(ny):
        jm, jp = _m(j - 1, ny), _m(j + 1, ny)
        sjm, sjp = _sgn(j - 1, ny), _sgn(j + 1, ny)
        for i in range(nx):
            im, ip = _m(i - 1, nx), _m(i + 1, nx)
            sim, sip = _sgn(i - 1, nx), _sgn(i + 1, nx)
            fe = 0.5 * (a[j, i] + a[j, ip]) * (u[j, ip] - u[j, i]) / dx
            fw = 0.5 * (a[j, im] + a[j, i]) * (u[j, i] - u[j, im]) / dx
            fn = 0.5 * (c_[j, i] + c_[jp, i]) * (u[jp, i] - u[j, i]) / dy
            fs = 0.5 * (c_[jm, i] + c_[j, i]) * (u[j, i] - u[jm, i]) / dy
            acc = (fe - fw) / dx + (fn - fs) / dy
            # x-flux part b*u_y at i+-1, odd across the x boundary
            uy_p = (u[jp, ip] - u[jm, ip]) / (2.0 * dy)
            uy_m = (u[jp, im] - u[jm, im]) / (2.0 * dy)
            acc += (sip * b[j, ip] * uy_p - sim * b[j, im] * uy_m) / (2.0 * dx)
            ux_p = (u[jp, ip] - u[jp, im]) / (2.0 * dx)
            ux_m = (u[jm, ip] - u[jm, im]) / (2.0 * dx)
            acc += (sjp * b[jp, i] * ux_p - sjm * b[jm, i] * ux_m) / (2.0 * dy)
            out[j, i] = acc
    return out
