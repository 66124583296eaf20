"""Density-matrix evolution on truncated Fock spaces.

The full quantum tier: ladder operators for one or two traveling-wave
modes, the drive/coupling Hamiltonian, the master equation with one decay
channel per direction, RK4 evolution of the density matrix, and extraction
of the expectation values that the rate-equation tier propagates directly.
This is the oracle the closed-form results are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .numerics import IntegrationError, StepperConfig, converge_by_halving, plan_steps, rk4_integrate
from .parameters import TravelingWaveParams
from .rates import EmissionRates, RateState5, SingleModeState, traveling_steady_state
from .trajectory import Trajectory

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
IMAG_RESIDUE_TOL = 1e-12


class FockSpace:
    """Truncated Fock space with at most n_max photons per mode.

    Two-mode spaces use the product basis |n_L, n_R> ordered
    lexicographically (index = n_L*(n_max+1) + n_R); single-mode spaces hold
    the one standing-wave mode c.  All operator matrices are dense, built
    once, and read-only.
    """

    def __init__(self, n_max: int, modes: int = 2):
        if n_max < 1:
            raise ValueError(f"need n_max >= 1, got {n_max}")
        if modes not in (1, 2):
            raise ValueError(f"modes must be 1 or 2, got {modes}")
        self.n_max = n_max
        self.modes = modes
        levels = n_max + 1
        ladder = np.diag(np.sqrt(np.arange(1.0, levels)), 1).astype(complex)
        eye = np.eye(levels, dtype=complex)
        if modes == 1:
            self.dimension = levels
            self.a = ladder
        else:
            self.dimension = levels * levels
            self.a_left = np.kron(ladder, eye)
            self.a_right = np.kron(eye, ladder)
        self.identity = np.eye(self.dimension, dtype=complex)
        for op in self._operators():
            op.flags.writeable = False

    def _operators(self):
        if self.modes == 1:
            return (self.a, self.identity)
        return (self.a_left, self.a_right, self.identity)

    def number_op(self, mode: str = "") -> np.ndarray:
        a = self.annihilator(mode)
        return a.conj().T @ a

    def annihilator(self, mode: str = "") -> np.ndarray:
        if self.modes == 1:
            return self.a
        if mode == "L":
            return self.a_left
        if mode == "R":
            return self.a_right
        raise ValueError("two-mode space: mode must be 'L' or 'R'")

    def index(self, *occupations: int) -> int:
        if len(occupations) != self.modes:
            raise ValueError(f"need {self.modes} occupation numbers")
        if any(not 0 <= n <= self.n_max for n in occupations):
            raise ValueError(f"occupations must lie in [0, {self.n_max}]")
        idx = 0
        for n in occupations:
            idx = idx * (self.n_max + 1) + n
        return idx

    def fock_ket(self, *occupations: int) -> np.ndarray:
        ket = np.zeros(self.dimension, dtype=complex)
        ket[self.index(*occupations)] = 1.0
        return ket

    def fock_density(self, *occupations: int) -> np.ndarray:
        ket = self.fock_ket(*occupations)
        return np.outer(ket, ket.conj())

    def vacuum_density(self) -> np.ndarray:
        return self.fock_density(*([0] * self.modes))


def build_space(n_max: int, modes: int = 2) -> FockSpace:
    """Truncated Fock space for `modes` bosonic modes with cutoff n_max."""
    return FockSpace(n_max, modes)


@dataclass(frozen=True)
class DensityMatrix:
    """A density operator snapshot with its time stamp."""

    matrix: np.ndarray
    time: float = 0.0

    def check(self):
        rho = self.matrix
        herm = np.abs(rho - rho.conj().T).max()
        if herm > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: deviation {herm:.3e}")
        trace_gap = abs(np.trace(rho).real - 1.0)
        if trace_gap > TRACE_TOL:
            raise ValueError(f"trace deviates from 1 by {trace_gap:.3e}")
        low = np.linalg.eigvalsh(rho).min()
        if low < EIGENVALUE_FLOOR:
            raise ValueError(f"negative eigenvalue {low:.3e}")


@dataclass(frozen=True)
class InteractionHamiltonian:
    """Drive + left/right coupling Hamiltonian on a two-mode space.

    H = (rabi/2)(a_R + a_R^+) + (coupling/2)(a_L^+ a_R + a_R^+ a_L).
    """

    matrix: np.ndarray
    rabi: float
    coupling: float
    space: FockSpace


def interaction_hamiltonian(space: FockSpace, rabi: float,
                            coupling: float) -> InteractionHamiltonian:
    if space.modes != 2:
        raise ValueError("the traveling-wave Hamiltonian needs a two-mode space")
    ar, al = space.a_right, space.a_left
    h = 0.5 * rabi * (ar + ar.conj().T) \
        + 0.5 * coupling * (al.conj().T @ ar + ar.conj().T @ al)
    h.flags.writeable = False
    return InteractionHamiltonian(h, rabi, coupling, space)


def single_mode_hamiltonian(space: FockSpace, rabi: float,
                            detuning: float) -> np.ndarray:
    """H = (rabi/2)(c + c^+) + detuning c^+ c.

    The half-weight drive matches the single-mode rate equations
    (dn/dt = rabi*k2/2 - kappa*n); it is the same convention as the
    two-mode Hamiltonian.
    """
    if space.modes != 1:
        raise ValueError("the single-mode Hamiltonian needs a one-mode space")
    c = space.a
    h = 0.5 * rabi * (c + c.conj().T) + detuning * space.number_op()
    h.flags.writeable = False
    return h


def one_photon_block(omega: float, coupling: float) -> np.ndarray:
    """Free + coupling Hamiltonian restricted to the |1,0>, |0,1> subspace."""
    return np.array([[omega, 0.5 * coupling], [0.5 * coupling, omega]])


def single_photon_spectrum(omega: float, coupling: float) -> tuple[float, float]:
    """One-photon eigenvalues (omega + J/2, omega - J/2).

    The eigenvectors are the standing-wave combinations (|L> +- |R>)/sqrt(2);
    the numeric diagonalization of the block is compared against the closed
    form before returning.
    """
    closed = (omega + 0.5 * coupling, omega - 0.5 * coupling)
    numeric = np.linalg.eigvalsh(one_photon_block(omega, coupling))
    gap = np.abs(np.sort(numeric) - np.sort(closed)).max()
    if gap > 1e-12 * max(1.0, abs(omega), abs(coupling)):
        raise RuntimeError(f"one-photon spectrum mismatch {gap:.3e}")
    return closed


class LindbladGenerator:
    """Right-hand side of a Lindblad master equation, precomputed.

    Stores G = iH + (1/2) sum_k C_k^+ C_k with C_k = sqrt(rate_k) * op_k so
    the derivative is -(G rho + rho G^+) + sum_k C_k rho C_k^+; the same
    arrays feed the kernel backend.
    """

    def __init__(self, hamiltonian: np.ndarray,
                 collapse_ops: Sequence[np.ndarray],
                 rates: Sequence[float], rate_scale: float, label: str):
        if len(collapse_ops) != len(rates):
            raise ValueError("one rate per collapse operator")
        h = np.asarray(hamiltonian, dtype=complex)
        self.dimension = h.shape[0]
        self.cs = np.array([math.sqrt(r) * np.asarray(op, dtype=complex)
                            for op, r in zip(collapse_ops, rates)])
        self.chs = np.array([c.conj().T for c in self.cs])
        g = 1j * h
        for c, ch in zip(self.cs, self.chs):
            g = g + 0.5 * (ch @ c)
        self.g = g
        self.gh = g.conj().T
        self.rate_scale = rate_scale
        self.label = label

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = -(self.g @ rho + rho @ self.gh)
        for c, ch in zip(self.cs, self.chs):
            out += c @ rho @ ch
        return out


def traveling_generator(space: FockSpace, rabi: float, coupling: float,
                        kappa: float) -> LindbladGenerator:
    """Master-equation generator with both decay channels at equal kappa."""
    if kappa < 0.0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    h = interaction_hamiltonian(space, rabi, coupling)
    scale = max(kappa, abs(coupling), rabi, 1.0)
    return LindbladGenerator(h.matrix, [space.a_left, space.a_right],
                             [kappa, kappa], scale, "lindblad_traveling")


def single_mode_generator(space: FockSpace, rabi: float, detuning: float,
                          kappa: float) -> LindbladGenerator:
    if kappa < 0.0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    h = single_mode_hamiltonian(space, rabi, detuning)
    scale = max(kappa, abs(detuning), rabi, 1.0)
    return LindbladGenerator(h, [space.a], [kappa], scale,
                             "lindblad_single_mode")


def lindblad_rhs(rho: np.ndarray, hamiltonian: InteractionHamiltonian,
                 kappa: float) -> np.ndarray:
    """Textbook form of the two-mode master equation right-hand side.

    drho/dt = -i[H, rho]
              + sum_A (kappa/2)(2 a_A rho a_A^+ - n_A rho - rho n_A).
    Kept as an independent formulation of LindbladGenerator for testing.
    """
    space = hamiltonian.space
    h = hamiltonian.matrix
    if rho.shape != h.shape:
        raise ValueError(f"state shape {rho.shape} does not match {h.shape}")
    out = -1j * (h @ rho - rho @ h)
    for a in (space.a_left, space.a_right):
        num = a.conj().T @ a
        out += 0.5 * kappa * (2.0 * a @ rho @ a.conj().T
                              - num @ rho - rho @ num)
    return out


def single_mode_lindblad_rhs(rho: np.ndarray, space: FockSpace, rabi: float,
                             detuning: float, kappa: float) -> np.ndarray:
    """Textbook single-mode master equation right-hand side."""
    if space.modes != 1:
        raise ValueError("single-mode right-hand side needs a one-mode space")
    h = single_mode_hamiltonian(space, rabi, detuning)
    if rho.shape != h.shape:
        raise ValueError(f"state shape {rho.shape} does not match {h.shape}")
    c = space.a
    num = space.number_op()
    return -1j * (h @ rho - rho @ h) + 0.5 * kappa * (
        2.0 * c @ rho @ c.conj().T - num @ rho - rho @ num)


def _density_array(rho0) -> np.ndarray:
    if isinstance(rho0, DensityMatrix):
        return np.array(rho0.matrix, dtype=complex)
    return np.array(rho0, dtype=complex)


def evolve_density(rho0, generator, T: float, dt: float | None = None,
                   config: StepperConfig | None = None,
                   record_stride: int = 1,
                   validate: bool = True) -> Trajectory:
    """RK4 evolution of a density matrix under a Lindblad generator.

    LindbladGenerator inputs run on the kernel backend; any callable
    rho -> drho/dt works through the generic stepper.  Every recorded state
    is checked against the density-matrix invariants (hermiticity, unit
    trace, positivity) unless validate=False.
    """
    rho = _density_array(rho0)
    d = rho.shape[0]
    if rho.shape != (d, d):
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if config is None:
        if dt is None:
            if not isinstance(generator, LindbladGenerator):
                raise ValueError("explicit dt required for a generic generator")
            dt = 0.01 / generator.rate_scale
        config = StepperConfig(dt=dt)
    elif dt is not None and dt != config.dt:
        raise ValueError("give dt either directly or via config, not both")

    if isinstance(generator, LindbladGenerator):
        if generator.dimension != d:
            raise ValueError(
                f"generator dimension {generator.dimension} does not match "
                f"state dimension {d}")
        meta = {"model": generator.label, "dimension": d,
                "backend": _backend.backend_name(), "T": T}

        def run(h: float, stride: int) -> Trajectory:
            n_steps, h_eff = plan_steps(T, h, config.max_steps)
            stride = stride if n_steps == 0 else math.gcd(stride, n_steps)
            states = _backend.rk4_lindblad(generator.g, generator.gh,
                                           generator.cs, generator.chs,
                                           rho, h_eff, n_steps, stride)
            if not np.all(np.isfinite(states[-1].view(float))):
                raise IntegrationError(
                    f"{generator.label} evolution became non-finite "
                    f"within {n_steps} steps at dt={h_eff}")
            times = h_eff * stride * np.arange(len(states))
            return Trajectory(times, states, dict(meta, dt=h_eff))

        traj = converge_by_halving(run, config, record_stride)
    else:
        flat = rho.reshape(-1)

        def rhs_flat(y: np.ndarray) -> np.ndarray:
            return np.asarray(generator(y.reshape(d, d))).reshape(-1)

        raw = rk4_integrate(rhs_flat, flat, T, config, record_stride)
        traj = Trajectory(raw.times, raw.states.reshape(-1, d, d),
                          dict(raw.metadata, model="lindblad_custom", T=T))

    if validate:
        for i, (t, state) in enumerate(zip(traj.times, traj.states)):
            try:
                DensityMatrix(state, t).check()
            except ValueError as exc:
                raise IntegrationError(
                    f"density-matrix invariant violated at record {i} "
                    f"(t={t}): {exc}") from exc
    return traj


def _observables(space: FockSpace) -> list[np.ndarray]:
    if space.modes == 2:
        al, ar = space.a_left, space.a_right
        return [
            al.conj().T @ al,
            ar.conj().T @ ar,
            al + al.conj().T,
            1j * (ar - ar.conj().T),
            1j * (al @ ar.conj().T - al.conj().T @ ar),
        ]
    c = space.a
    return [c.conj().T @ c, c + c.conj().T, 1j * (c - c.conj().T)]


def _traces(ops: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    vals = np.array([np.einsum("ij,ji->", op, rho) for op in ops])
    residue = np.abs(vals.imag).max()
    if residue > IMAG_RESIDUE_TOL:
        raise ValueError(
            f"imaginary residue {residue:.3e} in a real expectation value")
    return vals.real


def expectations(rho, space: FockSpace,
                 kappa: float) -> tuple[RateState5, EmissionRates]:
    """(n_L, n_R, k1, k2, k3) and the emission rates I_A = kappa n_A."""
    if space.modes != 2:
        raise ValueError("expectations needs a two-mode space")
    matrix = _density_array(rho)
    if matrix.shape != (space.dimension, space.dimension):
        raise ValueError(
            f"state dimension {matrix.shape} does not match space "
            f"dimension {space.dimension}")
    state = RateState5.from_array(_traces(_observables(space), matrix))
    return state, EmissionRates.from_sides(kappa * state.n_l,
                                           kappa * state.n_r)


def single_mode_expectations(rho, space: FockSpace) -> SingleModeState:
    """(n, k1, k2) of a single-mode density matrix."""
    if space.modes != 1:
        raise ValueError("single_mode_expectations needs a one-mode space")
    matrix = _density_array(rho)
    return SingleModeState.from_array(_traces(_observables(space), matrix))


def expectation_columns(traj: Trajectory, space: FockSpace) -> np.ndarray:
    """Expectation values of every recorded state, one row per time."""
    ops = _observables(space)
    cols = np.stack([np.einsum("ij,tji->t", op, traj.states) for op in ops],
                    axis=1)
    residue = np.abs(cols.imag).max()
    if residue > IMAG_RESIDUE_TOL:
        raise ValueError(
            f"imaginary residue {residue:.3e} in a real expectation value")
    return cols.real


def suggested_cutoff(p: TravelingWaveParams) -> int:
    """Fock cutoff heuristic: ceil(mu + 6 sqrt(max(mu,1)) + 4) photons.

    mu is the larger of the closed-form stationary photon numbers, so the
    cutoff leaves room for the Poisson tail of a coherent state on top of
    the mean occupation.
    """
    ss = traveling_steady_state(p)
    mu = max(ss.n_l, ss.n_r)
    return math.ceil(mu + 6.0 * math.sqrt(max(mu, 1.0)) + 4.0)
