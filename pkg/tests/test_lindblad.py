import math

import numpy as np
import pytest

from twocav.lindblad import (DensityMatrix, build_space, evolve_density,
                             expectation_columns, expectations,
                             interaction_hamiltonian, lindblad_rhs,
                             one_photon_block, single_mode_expectations,
                             single_mode_generator, single_mode_hamiltonian,
                             single_mode_lindblad_rhs, single_photon_spectrum,
                             suggested_cutoff, traveling_generator)
from twocav.numerics import IntegrationError, StepperConfig
from twocav.parameters import TravelingWaveParams
from twocav.rates import (RateState5, SingleModeState, evolve,
                          single_mode_system, traveling_system)

FIXED_CFG = dict(convergence_tol=None)


def random_density(space, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(space.dimension, space.dimension)) \
        + 1j * rng.normal(size=(space.dimension, space.dimension))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def test_single_mode_ladder():
    space = build_space(1, modes=1)
    np.testing.assert_array_equal(space.a, [[0.0, 1.0], [0.0, 0.0]])
    space = build_space(2, modes=1)
    np.testing.assert_allclose(np.diag(space.number_op()).real, [0.0, 1.0, 2.0])


def test_ladder_commutator_below_cutoff():
    space = build_space(6, modes=1)
    comm = space.a @ space.a.conj().T - space.a.conj().T @ space.a
    expected = np.eye(7)
    expected[6, 6] = -6.0  # truncation boundary
    np.testing.assert_allclose(comm, expected, atol=1e-14)


def test_two_mode_operators_commute():
    space = build_space(3, modes=2)
    comm = space.a_left @ space.a_right.conj().T \
        - space.a_right.conj().T @ space.a_left
    assert np.abs(comm).max() == 0.0


def test_two_mode_photon_transfer():
    # a_L^+ a_R moves one photon from right to left
    space = build_space(1, modes=2)
    assert space.dimension == 4
    moved = space.a_left.conj().T @ space.a_right @ space.fock_ket(0, 1)
    np.testing.assert_array_equal(moved, space.fock_ket(1, 0))


def test_space_validation():
    with pytest.raises(ValueError):
        build_space(0)
    with pytest.raises(ValueError):
        build_space(2, modes=3)
    with pytest.raises(ValueError):
        build_space(2, modes=2).fock_ket(3, 0)


def test_hamiltonian_zero_drive():
    space = build_space(2, modes=2)
    h = interaction_hamiltonian(space, 0.0, 0.0)
    assert np.abs(h.matrix).max() == 0.0


def test_hamiltonian_matrix_elements():
    space = build_space(2, modes=2)
    h = interaction_hamiltonian(space, 0.8, 0.6).matrix
    one_l, one_r = space.index(1, 0), space.index(0, 1)
    vac = space.index(0, 0)
    assert h[one_l, one_r] == pytest.approx(0.3)  # J/2
    assert h[one_r, one_l] == pytest.approx(0.3)
    assert h[one_l, one_l] == 0.0
    assert h[vac, one_r] == pytest.approx(0.4)  # rabi/2
    assert np.abs(h - h.conj().T).max() < 1e-14


def test_hamiltonian_requires_two_modes():
    with pytest.raises(ValueError):
        interaction_hamiltonian(build_space(2, modes=1), 1.0, 0.0)
    with pytest.raises(ValueError):
        single_mode_hamiltonian(build_space(2, modes=2), 1.0, 0.0)


def test_single_photon_spectrum():
    assert single_photon_spectrum(1.0, 0.0) == (1.0, 1.0)
    plus, minus = single_photon_spectrum(1.0, 0.4)
    assert (plus, minus) == (pytest.approx(1.2), pytest.approx(0.8))


def test_single_photon_eigenvectors_are_standing_waves():
    values, vectors = np.linalg.eigh(one_photon_block(1.0, 0.4))
    target = np.array([1.0, 1.0]) / math.sqrt(2.0)
    for column in vectors.T:
        overlap = abs(np.dot(column, target))
        assert overlap == pytest.approx(1.0, abs=1e-12) or \
            overlap == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(values, [0.8, 1.2], atol=1e-12)


def test_rhs_vacuum_is_stationary_without_drive():
    space = build_space(3, modes=2)
    h = interaction_hamiltonian(space, 0.0, 0.7)
    deriv = lindblad_rhs(space.vacuum_density(), h, kappa=1.0)
    assert np.abs(deriv).max() == 0.0


def test_rhs_single_photon_decay():
    space = build_space(2, modes=2)
    h = interaction_hamiltonian(space, 0.0, 0.0)
    rho = space.fock_density(0, 1)
    deriv = lindblad_rhs(rho, h, kappa=0.9)
    n_r = space.a_right.conj().T @ space.a_right
    rate = np.einsum("ij,ji->", n_r, deriv).real
    assert rate == pytest.approx(-0.9, abs=1e-14)


def test_rhs_preserves_trace():
    space = build_space(3, modes=2)
    h = interaction_hamiltonian(space, 0.5, 0.3)
    for seed in range(3):
        deriv = lindblad_rhs(random_density(space, seed), h, kappa=1.0)
        assert abs(np.trace(deriv)) < 1e-12


def test_rhs_linearity():
    space = build_space(2, modes=2)
    gen = traveling_generator(space, 0.4, 0.6, 1.0)
    rho1, rho2 = random_density(space, 1), random_density(space, 2)
    lhs = gen(0.3 * rho1 + 0.7 * rho2)
    rhs = 0.3 * gen(rho1) + 0.7 * gen(rho2)
    assert np.abs(lhs - rhs).max() < 1e-13


def test_generator_matches_textbook_rhs():
    space = build_space(3, modes=2)
    h = interaction_hamiltonian(space, 0.5, 0.3)
    gen = traveling_generator(space, 0.5, 0.3, 0.8)
    rho = random_density(space, 5)
    np.testing.assert_allclose(gen(rho), lindblad_rhs(rho, h, 0.8),
                               atol=1e-13)


def test_single_mode_generator_matches_textbook_rhs():
    space = build_space(4, modes=1)
    gen = single_mode_generator(space, 0.5, 0.2, 0.8)
    rho = random_density(space, 6)
    np.testing.assert_allclose(
        gen(rho), single_mode_lindblad_rhs(rho, space, 0.5, 0.2, 0.8),
        atol=1e-13)


def test_single_mode_rhs_rejects_two_mode_space():
    space = build_space(2, modes=2)
    with pytest.raises(ValueError):
        single_mode_lindblad_rhs(space.vacuum_density(), space, 1.0, 0.0, 1.0)


def test_undriven_decay_single_photon():
    space = build_space(2, modes=2)
    gen = traveling_generator(space, 0.0, 0.0, 1.0)
    traj = evolve_density(space.fock_density(0, 1), gen, T=10.0,
                          config=StepperConfig(dt=0.005, **FIXED_CFG),
                          record_stride=100)
    cols = expectation_columns(traj, space)
    n_tot = cols[:, 0] + cols[:, 1]
    np.testing.assert_allclose(n_tot, np.exp(-traj.times), atol=1e-8)


def test_driven_oracle_matches_rate_equations():
    # the rate equations are exact for this linear system, so the only gap
    # is Fock truncation
    space = build_space(8, modes=2)
    p = TravelingWaveParams(kappa=1.0, coupling=0.0, rabi=0.2)
    cfg = StepperConfig(dt=0.01, **FIXED_CFG)
    gen = traveling_generator(space, p.rabi, p.coupling, p.kappa)
    dtraj = evolve_density(space.vacuum_density(), gen, T=10.0, config=cfg)
    rtraj = evolve(traveling_system(p), RateState5.vacuum(), T=10.0,
                   config=cfg)
    cols = expectation_columns(dtraj, space)
    assert np.abs(cols[:, 1] - rtraj.column(1)).max() < 1e-5


def test_single_mode_oracle_matches_rate_equations():
    space = build_space(8, modes=1)
    cfg = StepperConfig(dt=0.01, **FIXED_CFG)
    gen = single_mode_generator(space, 0.4, 0.3, 1.0)
    dtraj = evolve_density(space.vacuum_density(), gen, T=10.0, config=cfg)
    rtraj = evolve(single_mode_system(0.4, 0.3, 1.0),
                   SingleModeState.vacuum(), T=10.0, config=cfg)
    cols = expectation_columns(dtraj, space)
    assert np.abs(cols - rtraj.states).max() < 1e-8


def test_evolve_density_zero_duration():
    space = build_space(2, modes=2)
    gen = traveling_generator(space, 0.1, 0.0, 1.0)
    rho0 = space.vacuum_density()
    traj = evolve_density(rho0, gen, T=0.0)
    assert len(traj) == 1
    np.testing.assert_array_equal(traj.states[0], rho0)


def test_evolve_density_validates_invariants():
    space = build_space(2, modes=2)
    gen = traveling_generator(space, 0.1, 0.0, 1.0)
    with pytest.raises(IntegrationError, match="invariant"):
        evolve_density(2.0 * space.vacuum_density(), gen, T=1.0)


def test_evolve_density_generic_callable():
    space = build_space(2, modes=2)
    gen = traveling_generator(space, 0.2, 0.3, 1.0)
    cfg = StepperConfig(dt=0.01, **FIXED_CFG)
    fast = evolve_density(space.vacuum_density(), gen, T=2.0, config=cfg)
    slow = evolve_density(space.vacuum_density(),
                          lambda rho: gen(rho), T=2.0, config=cfg)
    assert np.abs(fast.final - slow.final).max() < 1e-12


def test_trajectory_states_stay_physical():
    space = build_space(6, modes=2)
    gen = traveling_generator(space, 0.3, 0.5, 1.0)
    traj = evolve_density(space.vacuum_density(), gen, T=5.0,
                          record_stride=50)
    for t, state in zip(traj.times, traj.states):
        DensityMatrix(state, t).check()
    assert abs(np.trace(traj.final).real - 1.0) < 1e-10


def test_expectations_vacuum_and_fock():
    space = build_space(2, modes=2)
    state, rates = expectations(space.vacuum_density(), space, 1.0)
    assert state.as_array().tolist() == [0.0] * 5
    assert rates.i_total == 0.0
    state, rates = expectations(space.fock_density(1, 0), space, 0.5)
    assert (state.n_l, state.n_r) == (1.0, 0.0)
    assert (state.k1, state.k2, state.k3) == (0.0, 0.0, 0.0)
    assert rates.i_left == 0.5


def test_expectation_k2_sign_convention():
    # k2 = i<a_R - a_R^+> = -2 Im<a_R>: the ket (|0> + i|1>)/sqrt(2) in the
    # right mode has <a_R> = i/2, hence k2 = -1
    space = build_space(2, modes=2)
    ket = (space.fock_ket(0, 0) + 1j * space.fock_ket(0, 1)) / math.sqrt(2.0)
    state, _ = expectations(np.outer(ket, ket.conj()), space, 1.0)
    assert state.k2 == pytest.approx(-1.0, abs=1e-14)
    ket = (space.fock_ket(0, 0) - 1j * space.fock_ket(0, 1)) / math.sqrt(2.0)
    state, _ = expectations(np.outer(ket, ket.conj()), space, 1.0)
    assert state.k2 == pytest.approx(1.0, abs=1e-14)


def test_expectations_reject_dirty_input():
    space = build_space(2, modes=2)
    skew = np.zeros((9, 9), dtype=complex)
    skew[0, 1] = 1.0  # not Hermitian: n_R picks up an imaginary residue
    with pytest.raises(ValueError, match="imaginary residue"):
        expectations(skew + 0.5j * np.eye(9), space, 1.0)


def test_expectations_dimension_check():
    space = build_space(2, modes=2)
    with pytest.raises(ValueError):
        expectations(np.eye(4, dtype=complex), space, 1.0)
    with pytest.raises(ValueError):
        single_mode_expectations(np.eye(4, dtype=complex), space)


def test_cauchy_schwarz_bound_along_trajectory():
    # |k3| <= 2 sqrt(n_l n_r) for states reachable from vacuum
    space = build_space(6, modes=2)
    gen = traveling_generator(space, 0.4, 0.8, 1.0)
    traj = evolve_density(space.vacuum_density(), gen, T=6.0,
                          record_stride=20)
    cols = expectation_columns(traj, space)
    bound = 2.0 * np.sqrt(cols[:, 0] * cols[:, 1]) + 1e-9
    assert np.all(np.abs(cols[:, 4]) <= bound)


def test_suggested_cutoff():
    p = TravelingWaveParams(kappa=1.0, coupling=0.0, rabi=0.2)
    assert suggested_cutoff(p) == 11  # mu = 0.04 -> 0.04 + 6 + 4, ceil
    strong = TravelingWaveParams(kappa=1.0, coupling=0.0, rabi=4.0)
    assert suggested_cutoff(strong) >= 16 + 10
