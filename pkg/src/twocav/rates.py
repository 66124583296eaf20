"""Expectation-value dynamics of the driven two-sided cavity.

Three linear models share one integrator:

* the five-variable traveling-wave system (n_L, n_R, k1, k2, k3),
* the three-variable single-mode system (n, k1, k2),
* the reduced system for the total photon number, structurally identical
  to the single-mode one.

All are affine, y' = A y + c, so evolve() routes them through the kernel
backend; closed-form steady states are cross-checked against a dense solve
of the stationarity system on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .numerics import StepperConfig, converge_by_halving, dense_solve, plan_steps, rk4_integrate
from .parameters import TravelingWaveParams
from .trajectory import Trajectory

DT_FACTOR = 0.01  # default step: 0.01 / fastest rate


def _finite(**fields):
    for name, value in fields.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")


@dataclass(frozen=True)
class RateState5:
    """Expectation values closed under the traveling-wave dynamics.

    n_l, n_r: mean photon numbers of the left/right-moving modes.
    k1 = <a_L + a_L^+>, k2 = i<a_R - a_R^+>,
    k3 = i<a_L a_R^+ - a_L^+ a_R>.
    Also used for derivative vectors, so no positivity is enforced here.
    """

    n_l: float
    n_r: float
    k1: float
    k2: float
    k3: float

    def __post_init__(self):
        _finite(n_l=self.n_l, n_r=self.n_r, k1=self.k1, k2=self.k2,
                k3=self.k3)

    @property
    def n_tot(self) -> float:
        return self.n_l + self.n_r

    def as_array(self) -> np.ndarray:
        return np.array([self.n_l, self.n_r, self.k1, self.k2, self.k3])

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "RateState5":
        return cls(*(float(v) for v in a))

    @classmethod
    def vacuum(cls) -> "RateState5":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SingleModeState:
    """Single standing-wave mode: n = <c^+ c>, k1 = <c + c^+>, k2 = i<c - c^+>."""

    n: float
    k1: float
    k2: float

    def __post_init__(self):
        _finite(n=self.n, k1=self.k1, k2=self.k2)

    def as_array(self) -> np.ndarray:
        return np.array([self.n, self.k1, self.k2])

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "SingleModeState":
        return cls(*(float(v) for v in a))

    @classmethod
    def vacuum(cls) -> "SingleModeState":
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class EmissionRates:
    """Photon emission rates through the left and right mirror."""

    i_left: float
    i_right: float
    i_total: float

    @classmethod
    def from_sides(cls, i_left: float, i_right: float) -> "EmissionRates":
        # i_total is the float sum of the sides by construction
        return cls(i_left, i_right, i_left + i_right)


class AffineSystem:
    """Constant-coefficient linear ODE y' = matrix @ y + constant."""

    def __init__(self, matrix: np.ndarray, constant: np.ndarray,
                 labels: tuple[str, ...], rate_scale: float, name: str):
        self.matrix = np.ascontiguousarray(matrix, dtype=float)
        self.constant = np.ascontiguousarray(constant, dtype=float)
        self.matrix.flags.writeable = False
        self.constant.flags.writeable = False
        self.labels = labels
        self.rate_scale = rate_scale
        self.name = name

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.matrix @ y + self.constant


def traveling_rhs(s: RateState5, p: TravelingWaveParams) -> RateState5:
    """Time derivative of the five traveling-wave expectation values.

    The drive enters the k3 equation at half weight (-rabi*k1/2); the
    closed-form stationary photon numbers are solutions only with this
    coefficient.
    """
    j, kap, om = p.coupling, p.kappa, p.rabi
    return RateState5(
        n_l=0.5 * j * s.k3 - kap * s.n_l,
        n_r=0.5 * om * s.k2 - 0.5 * j * s.k3 - kap * s.n_r,
        k1=-0.5 * j * s.k2 - 0.5 * kap * s.k1,
        k2=om + 0.5 * j * s.k1 - 0.5 * kap * s.k2,
        k3=-0.5 * om * s.k1 - j * (s.n_l - s.n_r) - kap * s.k3,
    )


def traveling_system(p: TravelingWaveParams) -> AffineSystem:
    """Matrix form of traveling_rhs, ordered (n_l, n_r, k1, k2, k3)."""
    j, kap, om = p.coupling, p.kappa, p.rabi
    matrix = np.array([
        [-kap, 0.0, 0.0, 0.0, 0.5 * j],
        [0.0, -kap, 0.0, 0.5 * om, -0.5 * j],
        [0.0, 0.0, -0.5 * kap, -0.5 * j, 0.0],
        [0.0, 0.0, 0.5 * j, -0.5 * kap, 0.0],
        [-j, j, -0.5 * om, 0.0, -kap],
    ])
    constant = np.array([0.0, 0.0, 0.0, om, 0.0])
    return AffineSystem(matrix, constant, ("n_l", "n_r", "k1", "k2", "k3"),
                        p.rate_scale, "traveling5")


def single_mode_rhs(s: SingleModeState, rabi: float, detuning: float,
                    kappa: float) -> SingleModeState:
    """Time derivative of the single-mode expectation values."""
    return SingleModeState(
        n=0.5 * rabi * s.k2 - kappa * s.n,
        k1=-detuning * s.k2 - 0.5 * kappa * s.k1,
        k2=rabi + detuning * s.k1 - 0.5 * kappa * s.k2,
    )


def single_mode_system(rabi: float, detuning: float,
                       kappa: float) -> AffineSystem:
    matrix = np.array([
        [-kappa, 0.0, 0.5 * rabi],
        [0.0, -0.5 * kappa, -detuning],
        [0.0, detuning, -0.5 * kappa],
    ])
    constant = np.array([0.0, 0.0, rabi])
    scale = max(kappa, rabi, abs(detuning), 1.0)
    return AffineSystem(matrix, constant, ("n", "k1", "k2"), scale,
                        "single_mode")


def reduced_total_rhs(n_tot: float, k1: float, k2: float, rabi: float,
                      detuning: float, kappa: float) -> tuple[float, float, float]:
    """Closed system for the total photon number under near-resonant driving.

    Structurally identical to single_mode_rhs with n replaced by n_tot.
    """
    s = single_mode_rhs(SingleModeState(n_tot, k1, k2), rabi, detuning, kappa)
    return s.n, s.k1, s.k2


def reduced_total_system(rabi: float, detuning: float,
                         kappa: float) -> AffineSystem:
    base = single_mode_system(rabi, detuning, kappa)
    return AffineSystem(base.matrix, base.constant, ("n_tot", "k1", "k2"),
                        base.rate_scale, "reduced_total")


def _state_array(state) -> np.ndarray:
    if hasattr(state, "as_array"):
        return state.as_array()
    return np.asarray(state, dtype=float)


def evolve(system: AffineSystem | Callable[[np.ndarray], np.ndarray],
           state0, T: float, dt: float | None = None,
           config: StepperConfig | None = None,
           record_stride: int = 1) -> Trajectory:
    """RK4 trajectory of a rate-equation system.

    AffineSystem inputs run on the kernel backend; any other callable goes
    through the generic stepper and then needs an explicit dt.  The step is
    refined by the halving gate of the StepperConfig (convergence_tol=None
    disables it, for fixed-step model comparisons).
    """
    y0 = _state_array(state0)
    if config is None:
        if dt is None:
            if not isinstance(system, AffineSystem):
                raise ValueError("explicit dt required for a generic rhs")
            dt = DT_FACTOR / system.rate_scale
        config = StepperConfig(dt=dt)
    elif dt is not None and dt != config.dt:
        raise ValueError("give dt either directly or via config, not both")

    if isinstance(system, AffineSystem):
        if y0.shape != system.constant.shape:
            raise ValueError(
                f"state has {y0.size} components, system expects "
                f"{system.constant.size} ({', '.join(system.labels)})")
        meta = {"model": system.name, "labels": system.labels,
                "backend": _backend.backend_name(), "T": T}

        def run(h: float, stride: int) -> Trajectory:
            n_steps, h_eff = plan_steps(T, h, config.max_steps)
            stride = stride if n_steps == 0 else math.gcd(stride, n_steps)
            states = _backend.rk4_affine(system.matrix, system.constant, y0,
                                         h_eff, n_steps, stride)
            if not np.all(np.isfinite(states[-1])):
                raise_nonfinite(system.name, n_steps, h_eff)
            times = h_eff * stride * np.arange(len(states))
            return Trajectory(times, states, dict(meta, dt=h_eff))

        return converge_by_halving(run, config, record_stride)

    traj = rk4_integrate(system, y0, T, config, record_stride)
    return Trajectory(traj.times, traj.states,
                      dict(traj.metadata, model="custom", T=T))


def raise_nonfinite(name: str, n_steps: int, dt: float):
    from .numerics import IntegrationError
    raise IntegrationError(
        f"{name} trajectory became non-finite within {n_steps} steps "
        f"at dt={dt}")


def traveling_steady_state(p: TravelingWaveParams) -> RateState5:
    """Closed-form stationary state of the five-variable system.

    n_l = rabi^2 J^2 / (J^2+kappa^2)^2, n_r = rabi^2 kappa^2 / (J^2+kappa^2)^2,
    k1 = -2 rabi J/(J^2+kappa^2), k2 = 2 rabi kappa/(J^2+kappa^2),
    k3 = 2 kappa rabi^2 J/(J^2+kappa^2)^2.  The result is verified against a
    dense solve of the stationarity system before being returned.
    """
    if p.kappa <= 0.0:
        raise ValueError("no stationary state: kappa must be positive")
    j, kap, om = p.coupling, p.kappa, p.rabi
    d = j * j + kap * kap
    closed = np.array([
        om * om * j * j / (d * d),
        om * om * kap * kap / (d * d),
        -2.0 * om * j / d,
        2.0 * om * kap / d,
        2.0 * kap * om * om * j / (d * d),
    ])
    system = traveling_system(p)
    solved = dense_solve(system.matrix, -system.constant)
    gap = np.abs(closed - solved).max()
    if not gap <= 1e-12 * (1.0 + np.abs(closed).max()):
        raise RuntimeError(
            f"closed-form steady state disagrees with the dense solve by {gap:.3e}")
    return RateState5.from_array(closed)


def emission_rates(s: RateState5, kappa: float) -> EmissionRates:
    """I_A = kappa * n_A for each side; the total is their sum."""
    if kappa < 0.0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    return EmissionRates.from_sides(kappa * s.n_l, kappa * s.n_r)


def steady_emission_split(p: TravelingWaveParams) -> EmissionRates:
    """Closed-form stationary emission rates through the two mirrors.

    I_L = rabi^2 J^2 kappa/(J^2+kappa^2)^2 and
    I_R = rabi^2 kappa^3/(J^2+kappa^2)^2; their sum reduces to
    rabi^2 kappa/(J^2+kappa^2).
    """
    if p.kappa <= 0.0:
        raise ValueError("no stationary state: kappa must be positive")
    j, kap = p.coupling, p.kappa
    amp = p.rabi * p.rabi
    d = j * j + kap * kap
    return EmissionRates.from_sides(amp * j * j * kap / (d * d),
                                    amp * kap ** 3 / (d * d))


def single_mode_steady(rabi: float, detuning: float,
                       kappa: float) -> tuple[SingleModeState, float]:
    """Stationary single-mode state and its emission rate.

    n = rabi^2/(4 detuning^2 + kappa^2), k1 = -4 rabi detuning / (...),
    k2 = 2 rabi kappa / (...); the rate is kappa * n.
    """
    if kappa <= 0.0:
        raise ValueError("no stationary state: kappa must be positive")
    d = 4.0 * detuning * detuning + kappa * kappa
    state = SingleModeState(n=rabi * rabi / d,
                            k1=-4.0 * rabi * detuning / d,
                            k2=2.0 * rabi * kappa / d)
    system = single_mode_system(rabi, detuning, kappa)
    solved = dense_solve(system.matrix, -system.constant)
    gap = np.abs(state.as_array() - solved).max()
    if not gap <= 1e-12 * (1.0 + np.abs(solved).max()):
        raise RuntimeError(
            f"closed-form steady state disagrees with the dense solve by {gap:.3e}")
    return state, kappa * state.n


def lorentzian_total_rate(rabi: float, detuning: float, kappa: float) -> float:
    """Total stationary emission rate rabi^2 kappa/(4 detuning^2 + kappa^2)."""
    if kappa <= 0.0:
        raise ValueError("no stationary state: kappa must be positive")
    return rabi * rabi * kappa / (4.0 * detuning * detuning + kappa * kappa)
