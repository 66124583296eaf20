"""Shared numerical kernels: fixed-step RK4, small dense solves, safe sines.

Everything here is deliberately boring: the physics modules sit on top of a
classical RK4 stepper with a step-halving convergence gate, a partial-pivot
Gaussian elimination for the small stationarity systems, and a sine that
reduces its argument modulo pi so resonance zeros come out exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .trajectory import Trajectory

MAX_DENSE_DIM = 16
PIVOT_FLOOR = 1e-13
SIN_SNAP = 1e-12


class IntegrationError(RuntimeError):
    """Raised when a trajectory cannot be produced to specification."""


@dataclass(frozen=True)
class StepperConfig:
    """Fixed-step RK4 settings.

    convergence_tol=None disables the halving gate (single run at dt);
    otherwise dt is halved until successive final states agree to the
    tolerance, up to halving_limit halvings.
    """

    dt: float
    max_steps: int = 50_000_000
    convergence_tol: float | None = 1e-10
    halving_limit: int = 10

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if self.halving_limit < 1:
            raise ValueError("halving_limit must be >= 1")


def plan_steps(T: float, dt: float, max_steps: int) -> tuple[int, float]:
    """Number of steps and the adjusted dt that lands exactly on T."""
    if T < 0.0:
        raise ValueError(f"duration must be non-negative, got {T}")
    if T == 0.0:
        return 0, dt
    n = max(1, math.ceil(T / dt - 1e-12))
    if n > max_steps:
        raise IntegrationError(
            f"T={T} at dt={dt} needs {n} steps (max_steps={max_steps})")
    return n, T / n


def rk4_fixed(rhs: Callable[[np.ndarray], np.ndarray], y0: np.ndarray,
              T: float, dt: float, record_stride: int = 1,
              max_steps: int = 50_000_000) -> tuple[np.ndarray, np.ndarray]:
    """One classical RK4 run; returns (times, states) recorded every stride.

    Generic path: rhs is an arbitrary callable on 1-D state vectors (real or
    complex).  The specialized linear systems go through twocav._backend
    instead; this stepper exists for arbitrary right-hand sides and as the
    reference the kernels are tested against.
    """
    y = np.array(y0, copy=True)
    if y.ndim != 1:
        raise ValueError("state must be one-dimensional (flatten matrices)")
    n_steps, h = plan_steps(T, dt, max_steps)
    if record_stride < 1 or (n_steps % record_stride and n_steps):
        raise ValueError("record_stride must be >= 1 and divide n_steps")
    n_rec = (n_steps // record_stride if n_steps else 0) + 1
    states = np.empty((n_rec, y.size), dtype=y.dtype)
    states[0] = y
    rec = 1
    for step in range(1, n_steps + 1):
        k1 = rhs(y)
        k2 = rhs(y + (0.5 * h) * k1)
        k3 = rhs(y + (0.5 * h) * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % record_stride == 0:
            if not np.all(np.isfinite(y.view(float))):
                raise IntegrationError(
                    f"non-finite state at step {step} (t={step * h})")
            states[rec] = y
            rec += 1
    times = h * record_stride * np.arange(n_rec)
    return times, states


def converge_by_halving(run: Callable[[float, int], Trajectory],
                        cfg: StepperConfig,
                        record_stride: int = 1) -> Trajectory:
    """Run at cfg.dt, then halve dt (doubling the stride so record times are
    unchanged) until successive final states differ by < convergence_tol.
    """
    traj = run(cfg.dt, record_stride)
    if cfg.convergence_tol is None:
        return traj
    dt, stride = cfg.dt, record_stride
    for _ in range(cfg.halving_limit):
        dt, stride = dt / 2.0, stride * 2
        finer = run(dt, stride)
        gap = np.max(np.abs(finer.states[-1] - traj.states[-1]))
        traj = finer
        if gap < cfg.convergence_tol:
            return traj
    raise IntegrationError(
        f"no convergence after {cfg.halving_limit} halvings "
        f"(last final-state change {gap:.3e} >= {cfg.convergence_tol})")


def rk4_integrate(rhs: Callable[[np.ndarray], np.ndarray], y0: np.ndarray,
                  T: float, cfg: StepperConfig,
                  record_stride: int = 1) -> Trajectory:
    """Gated RK4 for an arbitrary right-hand side on a flat state vector."""
    y0 = np.asarray(y0)

    def run(dt: float, stride: int) -> Trajectory:
        n_steps, _ = plan_steps(T, dt, cfg.max_steps)
        stride = stride if n_steps == 0 else math.gcd(stride, n_steps)
        times, states = rk4_fixed(rhs, y0, T, dt, stride, cfg.max_steps)
        return Trajectory(times, states, {"dt": dt, "stride": stride})

    return converge_by_halving(run, cfg, record_stride)


def dense_solve(A: Sequence[Sequence[float]] | np.ndarray,
                b: Sequence[float] | np.ndarray) -> np.ndarray:
    """Solve A x = b by partial-pivot Gaussian elimination (k <= 16).

    Raises ValueError("no unique stationary state") when a pivot falls below
    PIVOT_FLOOR * max|A|; the residual contract |Ax-b| < 1e-12 (1+|b|) is
    checked before returning.
    """
    A0 = np.array(A, dtype=float)
    b0 = np.array(b, dtype=float)
    k = A0.shape[0]
    if A0.shape != (k, k) or b0.shape != (k,):
        raise ValueError(f"need square A and matching b, got {A0.shape}, {b0.shape}")
    if k > MAX_DENSE_DIM:
        raise ValueError(f"dense_solve is for k <= {MAX_DENSE_DIM}, got {k}")
    scale = np.abs(A0).max()
    if scale == 0.0:
        raise ValueError("no unique stationary state")
    M = np.hstack([A0, b0[:, None]])
    for col in range(k):
        piv = col + int(np.argmax(np.abs(M[col:, col])))
        if abs(M[piv, col]) < PIVOT_FLOOR * scale:
            raise ValueError("no unique stationary state")
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
        M[col + 1:] -= (M[col + 1:, col:col + 1] / M[col, col]) * M[col]
    x = np.empty(k)
    for row in range(k - 1, -1, -1):
        x[row] = (M[row, -1] - M[row, row + 1:k] @ x[row + 1:]) / M[row, row]
    residual = np.abs(A0 @ x - b0).max()
    if not residual < 1e-12 * (1.0 + np.abs(b0).max()):
        raise IntegrationError(f"stationarity solve residual {residual:.3e}")
    return x


def reduced_sin(phi: float) -> float:
    """sin(phi) with argument reduction modulo pi and exact-zero snapping.

    Residuals below max(SIN_SNAP, 4 ulp(phi)) collapse to exactly 0.0 so
    couplings vanish identically on resonance instead of surviving as
    rounding noise; the ulp term covers large phases whose representation
    error already exceeds the absolute threshold.
    """
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi}")
    rem = math.remainder(phi, math.pi)
    if abs(rem) < max(SIN_SNAP, 4.0 * abs(phi) * math.ulp(1.0)):
        return 0.0
    half_turns = round((phi - rem) / math.pi)
    s = math.sin(rem)
    return -s if half_turns & 1 else s
