"""Pure-numpy fallback for the hot RK4 kernels.

Same contract and the same accumulation order as the compiled twocav._core,
so the two backends agree to rounding.  Buffers are preallocated; the inner
loops lean on numpy matmul.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def rk4_affine(a: np.ndarray, b: np.ndarray, y0: np.ndarray, dt: float,
               n_steps: int, record_stride: int) -> np.ndarray:
    """RK4 for y' = a @ y + b; returns states at steps 0, s, 2s, ..., n."""
    if n_steps % record_stride:
        raise ValueError("record_stride must divide n_steps")
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    y = np.array(y0, dtype=float)
    out = np.empty((n_steps // record_stride + 1, y.size))
    out[0] = y
    rec = 1
    h = dt
    for step in range(1, n_steps + 1):
        k1 = a @ y + b
        k2 = a @ (y + (0.5 * h) * k1) + b
        k3 = a @ (y + (0.5 * h) * k2) + b
        k4 = a @ (y + h * k3) + b
        acc = y + (h / 6.0) * k1
        acc += (h / 3.0) * k2
        acc += (h / 3.0) * k3
        acc += (h / 6.0) * k4
        y = acc
        if step % record_stride == 0:
            out[rec] = y
            rec += 1
    return out


def rk4_lindblad(g: np.ndarray, gh: np.ndarray, cs: np.ndarray,
                 chs: np.ndarray, rho0: np.ndarray, dt: float,
                 n_steps: int, record_stride: int) -> np.ndarray:
    """RK4 for rho' = -(g rho + rho gh) + sum_k cs[k] rho chs[k].

    g = iH + (1/2) sum_k chs[k] cs[k] and gh = g^dagger are precomputed by
    the caller; cs carry their sqrt(rate) factors.  Returns density matrices
    at steps 0, s, 2s, ..., n.
    """
    if n_steps % record_stride:
        raise ValueError("record_stride must divide n_steps")
    g = np.ascontiguousarray(g, dtype=complex)
    gh = np.ascontiguousarray(gh, dtype=complex)
    cs = np.ascontiguousarray(cs, dtype=complex)
    chs = np.ascontiguousarray(chs, dtype=complex)
    rho = np.array(rho0, dtype=complex)
    d = rho.shape[0]
    out = np.empty((n_steps // record_stride + 1, d, d), dtype=complex)
    out[0] = rho
    k = np.empty_like(rho)
    tmp = np.empty_like(rho)
    stage = np.empty_like(rho)

    def rhs(r, dest):
        np.matmul(g, r, out=dest)
        dest += r @ gh
        np.negative(dest, out=dest)
        for c, ch in zip(cs, chs):
            np.matmul(c, r, out=tmp)
            dest += tmp @ ch

    rec = 1
    h = dt
    for step in range(1, n_steps + 1):
        rhs(rho, k)
        acc = rho + (h / 6.0) * k
        np.multiply(k, 0.5 * h, out=stage)
        stage += rho
        rhs(stage, k)
        acc += (h / 3.0) * k
        np.multiply(k, 0.5 * h, out=stage)
        stage += rho
        rhs(stage, k)
        acc += (h / 3.0) * k
        np.multiply(k, h, out=stage)
        stage += rho
        rhs(stage, k)
        acc += (h / 6.0) * k
        rho = acc
        if step % record_stride == 0:
            out[rec] = rho
            rec += 1
    return out
