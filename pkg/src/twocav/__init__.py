"""twocav: a laser-driven two-sided optical cavity, three ways.

Classical multi-bounce scattering, expectation-value rate equations for
traveling-wave photon modes, and full density-matrix evolution on a
truncated Fock space, with the identities connecting them checked to
machine precision.
"""

from ._backend import COMPILED, backend_name
from .classical import (CavityGeometry, FresnelSet, ScatteringAmplitudes,
                        ScatteringRates, cavity_amplitudes, cavity_rates,
                        fresnel_coefficients, truncated_bounce_sum,
                        undriven_intensity)
from .consistency import (ConsistencyReport, check_flux_condition,
                          check_free_field_limit, check_ratio_identity,
                          compare_near_resonant, default_suite,
                          format_text, fuzz_ratio_identity, reports_to_json)
from .lindblad import (DensityMatrix, FockSpace, InteractionHamiltonian,
                       build_space, evolve_density, expectation_columns,
                       expectations, interaction_hamiltonian, lindblad_rhs,
                       one_photon_block, single_mode_expectations,
                       single_mode_generator, single_mode_hamiltonian,
                       single_mode_lindblad_rhs, single_photon_spectrum,
                       suggested_cutoff, traveling_generator)
from .numerics import (IntegrationError, StepperConfig, dense_solve,
                       reduced_sin, rk4_integrate)
from .parameters import (Resonance, TravelingWaveParams, coupling_envelope,
                         coupling_exact, coupling_near_resonant,
                         coupling_rate, decay_rate, high_reflectivity_rates,
                         kappa_exact, nearest_detuning, nearest_resonance,
                         params_high_reflectivity, resonance_frequency)
from .rates import (AffineSystem, EmissionRates, RateState5, SingleModeState,
                    emission_rates, evolve, lorentzian_total_rate,
                    reduced_total_rhs, reduced_total_system,
                    single_mode_rhs, single_mode_steady, single_mode_system,
                    steady_emission_split, traveling_rhs, traveling_steady_state,
                    traveling_system)
from .trajectory import Trajectory

__version__ = "0.1.0"
