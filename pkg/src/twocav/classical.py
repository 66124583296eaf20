"""Classical scattering off a lossless dielectric slab (Fabry-Perot cavity).

Normal incidence, one polarisation, vacuum outside and refractive index n
inside.  Provides the amplitude-level Fresnel coefficients, the multi-bounce
scattering series and its closed form, the power reflection/transmission
rates with the cavity finesse, and the smooth intensity decay of an undriven
cavity.  These results are the classical reference that the quantum-side
rates are checked against.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .numerics import reduced_sin


@dataclass(frozen=True)
class CavityGeometry:
    """Dielectric slab of width ``length`` and index ``index``.

    ``light_speed`` defaults to 1 (natural units); pass an SI value to work
    in SI.  All derived quantities depend on the geometry only through the
    one-way transit time n*d/c and the Fresnel reflectivity r(n).
    """

    length: float
    index: float
    light_speed: float = 1.0

    def __post_init__(self):
        if not (self.length > 0.0 and math.isfinite(self.length)):
            raise ValueError(f"cavity length must be positive, got {self.length}")
        if not (self.index >= 1.0 and math.isfinite(self.index)):
            raise ValueError(f"refractive index must be >= 1, got {self.index}")
        if not (self.light_speed > 0.0 and math.isfinite(self.light_speed)):
            raise ValueError(f"light speed must be positive, got {self.light_speed}")

    @property
    def transit_time(self) -> float:
        """One-way travel time n*d/c through the slab."""
        return self.index * self.length / self.light_speed

    def round_trip_phase(self, omega0: float) -> float:
        """Phase omega0*n*d/c accumulated in one pass across the cavity."""
        if omega0 < 0.0:
            raise ValueError(f"angular frequency must be >= 0, got {omega0}")
        return omega0 * self.transit_time


@dataclass(frozen=True)
class FresnelSet:
    """Amplitude coefficients of one vacuum/dielectric interface.

    r, t: incidence from inside the dielectric; r_prime, t_prime: incidence
    from the vacuum side.  r_prime is kept signed (negative for n > 1).
    """

    r: float
    t: float
    r_prime: float
    t_prime: float


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Complex reflection/transmission amplitudes of the whole slab."""

    r_cav: complex
    t_cav: complex


@dataclass(frozen=True)
class ScatteringRates:
    """Power reflection/transmission rates and the finesse 4r^2/(1-r^2)^2."""

    R_cav: float
    T_cav: float
    finesse: float


def fresnel_coefficients(index: float) -> FresnelSet:
    """Normal-incidence Fresnel coefficients for a vacuum/dielectric interface.

    Args:
        index: refractive index of the dielectric, >= 1.

    Returns:
        FresnelSet with r = (n-1)/(n+1), t = 2n/(n+1), r' = (1-n)/(1+n),
        t' = 2/(1+n).  They satisfy the Stokes relation r^2 + t*t' = 1.
    """
    if not index >= 1.0:
        raise ValueError(f"refractive index must be >= 1, got {index}")
    return FresnelSet(
        r=(index - 1.0) / (index + 1.0),
        t=2.0 * index / (index + 1.0),
        r_prime=(1.0 - index) / (1.0 + index),
        t_prime=2.0 / (1.0 + index),
    )


def cavity_amplitudes(geom: CavityGeometry, omega0: float) -> ScatteringAmplitudes:
    """Closed-form slab scattering amplitudes at drive frequency omega0.

    With phi the round-trip (single-pass) phase and r the internal Fresnel
    reflectivity:

        r_cav = r (e^{2i phi} - 1) / (1 - r^2 e^{2i phi})
        t_cav = (1 - r^2) e^{i phi} / (1 - r^2 e^{2i phi})

    For a lossless slab |r_cav|^2 + |t_cav|^2 = 1.
    """
    phi = geom.round_trip_phase(omega0)
    r = fresnel_coefficients(geom.index).r
    e2 = cmath.exp(2j * phi)
    denom = 1.0 - r * r * e2
    return ScatteringAmplitudes(
        r_cav=r * (e2 - 1.0) / denom,
        t_cav=(1.0 - r * r) * cmath.exp(1j * phi) / denom,
    )


def truncated_bounce_sum(geom: CavityGeometry, omega0: float,
                         m_max: int) -> ScatteringAmplitudes:
    """Partial multi-bounce sums for the slab amplitudes.

    Sums the field that leaves after m traversals, t' r^{m-1} e^{i m phi} t,
    over odd m (transmission) and even m (reflection, on top of the prompt
    r' reflection), up to m_max traversals.  Converges to cavity_amplitudes
    at the geometric rate r^2, which makes it the independent cross-check of
    the closed form.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    phi = geom.round_trip_phase(omega0)
    fr = fresnel_coefficients(geom.index)
    r_sum = complex(fr.r_prime)
    t_sum = 0j
    for m in range(1, m_max + 1):
        term = fr.t_prime * fr.r ** (m - 1) * cmath.exp(1j * m * phi) * fr.t
        if m % 2:
            t_sum += term
        else:
            r_sum += term
    return ScatteringAmplitudes(r_cav=r_sum, t_cav=t_sum)


def cavity_rates(geom: CavityGeometry, omega0: float) -> ScatteringRates:
    """Power reflection/transmission rates via the finesse formula.

    R_cav = F sin^2(phi) / (1 + F sin^2(phi)), T_cav = 1 - R_cav, with
    F = 4 r^2/(1-r^2)^2.  The sine is evaluated with reduced_sin so that
    resonances phi = m*pi give T_cav = 1 exactly.
    """
    phi = geom.round_trip_phase(omega0)
    r = fresnel_coefficients(geom.index).r
    one_minus_r2 = 1.0 - r * r
    finesse = 4.0 * r * r / (one_minus_r2 * one_minus_r2)
    s = reduced_sin(phi)
    fs2 = finesse * s * s
    return ScatteringRates(R_cav=fs2 / (1.0 + fs2), T_cav=1.0 / (1.0 + fs2),
                           finesse=finesse)


def undriven_intensity(geom: CavityGeometry, t: float, intensity0: float) -> float:
    """Smoothly interpolated intensity of an undriven cavity at time t.

    I(t) = r^{2 c t / (n d)} * I(0): each round trip nd/c the field loses a
    factor r^2 of intensity through the mirrors.  The bounce-count picture
    carries one extra factor r^2 at the bounce times; this smooth form is
    the one the decay rate is matched to.
    """
    if t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    if intensity0 < 0.0:
        raise ValueError(f"intensity must be >= 0, got {intensity0}")
    r = fresnel_coefficients(geom.index).r
    return r ** (2.0 * t / geom.transit_time) * intensity0
