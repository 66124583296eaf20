"""Quantum-model constants of the two-sided cavity.

Maps the slab geometry and the drive frequency to the spontaneous decay
rate kappa, the signed left/right photon coupling rate J, their
high-reflectivity approximations, the standing-wave resonance ladder, and
the near-resonant rule J = -2*detuning.  The r-based forms are exposed
directly so limits (r -> 1, transit time -> infinity) can be probed without
constructing a geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .classical import CavityGeometry, fresnel_coefficients
from .numerics import reduced_sin


@dataclass(frozen=True)
class TravelingWaveParams:
    """Parameter bundle of the traveling-wave model.

    kappa: spontaneous decay rate through either mirror (>= 0).
    coupling: signed left/right conversion rate J.
    rabi: drive strength measured inside the cavity (>= 0).
    detuning: drive offset from the nearest resonance; only the single-mode
    and near-resonant reductions read it.
    """

    kappa: float
    coupling: float
    rabi: float
    detuning: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "coupling", "rabi", "detuning"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.rabi < 0.0:
            raise ValueError(f"rabi must be >= 0, got {self.rabi}")

    @property
    def rate_scale(self) -> float:
        """Fastest rate in the problem; sets the default integrator step."""
        return max(self.kappa, abs(self.coupling), self.rabi,
                   abs(self.detuning), 1.0)

    @classmethod
    def from_geometry(cls, geom: CavityGeometry, omega0: float,
                      rabi: float) -> "TravelingWaveParams":
        delta, _ = nearest_detuning(geom, omega0)
        return cls(kappa=kappa_exact(geom),
                   coupling=coupling_exact(geom, omega0),
                   rabi=rabi, detuning=delta)


@dataclass(frozen=True)
class Resonance:
    """One rung of the standing-wave ladder omega_m = m pi c / (n d)."""

    index: int
    omega: float


def decay_rate(r: float, transit_time: float) -> float:
    """kappa = -(2/transit_time) ln r for internal reflectivity r in (0, 1]."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"reflectivity must be in [0, 1], got {r}")
    if r == 0.0:
        raise ValueError("no cavity: decay rate diverges for r = 0")
    return -2.0 / transit_time * math.log(r)


def coupling_rate(r: float, transit_time: float, phi: float) -> float:
    """Signed conversion rate J = (4/transit_time) r ln(r)/(1-r^2) sin(phi).

    At r = 1 the prefactor has the finite limit -1/2, giving
    J = -(2/transit_time) sin(phi).  The sine is snapped to zero on
    resonance so J(omega_m) vanishes identically.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"reflectivity must be in [0, 1], got {r}")
    if r == 0.0:
        raise ValueError("no cavity: decay rate diverges for r = 0")
    if r == 1.0:
        prefactor = -0.5
    else:
        prefactor = r * math.log(r) / (1.0 - r * r)
    return 4.0 / transit_time * prefactor * reduced_sin(phi)


def coupling_envelope(r: float, transit_time: float) -> float:
    """sup over phases of |J|: (4/transit_time) r |ln r| / (1 - r^2)."""
    if r == 1.0:
        return 2.0 / transit_time
    return 4.0 / transit_time * r * abs(math.log(r)) / (1.0 - r * r)


def kappa_exact(geom: CavityGeometry) -> float:
    """Spontaneous decay rate of the slab cavity; zero only for r = 1."""
    return decay_rate(fresnel_coefficients(geom.index).r, geom.transit_time)


def coupling_exact(geom: CavityGeometry, omega0: float) -> float:
    """Exact photon coupling rate J(omega0) for the slab cavity."""
    return coupling_rate(fresnel_coefficients(geom.index).r,
                         geom.transit_time, geom.round_trip_phase(omega0))


def high_reflectivity_rates(r: float, transit_time: float,
                            phi: float) -> tuple[float, float]:
    """(kappa, J) in the highly-reflecting-mirror approximation.

    kappa = (1-r^2)/transit_time and J = -(2 r/transit_time) sin(phi); both
    follow from -2 ln r = 1 - r^2, accurate only for r near 1.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"reflectivity must be in [0, 1], got {r}")
    kappa_hr = (1.0 - r * r) / transit_time
    j_hr = -2.0 * r / transit_time * reduced_sin(phi)
    return kappa_hr, j_hr


def params_high_reflectivity(geom: CavityGeometry,
                             omega0: float) -> tuple[float, float]:
    """(kappa, J) of the slab cavity in the high-reflectivity approximation."""
    return high_reflectivity_rates(fresnel_coefficients(geom.index).r,
                                   geom.transit_time,
                                   geom.round_trip_phase(omega0))


def resonance_frequency(geom: CavityGeometry, m: int) -> float:
    """Standing-wave resonance omega_m = m pi c/(n d), m a positive integer."""
    if m < 1:
        raise ValueError(f"mode index must be >= 1, got {m}")
    return m * math.pi / geom.transit_time


def nearest_resonance(geom: CavityGeometry, omega0: float) -> Resonance:
    """The ladder rung closest to omega0 (ties resolved to the smaller m).

    The tie rule applies to the exact float midpoint of omega0 * n d/(c pi);
    the index is clamped to m >= 1.
    """
    if not omega0 > 0.0:
        raise ValueError(f"drive frequency must be > 0, got {omega0}")
    x = omega0 * geom.transit_time / math.pi
    m = math.floor(x + 0.5)
    if x + 0.5 == m:  # exactly midway: keep the smaller index
        m -= 1
    m = max(m, 1)
    return Resonance(index=m, omega=resonance_frequency(geom, m))


def nearest_detuning(geom: CavityGeometry, omega0: float) -> tuple[float, int]:
    """(omega_m - omega0, m) for the resonance nearest the drive."""
    res = nearest_resonance(geom, omega0)
    return res.omega - omega0, res.index


def coupling_near_resonant(detuning: float) -> float:
    """Near-resonant coupling rule J = -2 * detuning (high-reflectivity)."""
    return -2.0 * detuning
