"""Steady-state energy currents of driven-dissipative quantum systems.

Three independent methods over three built-in models, with analytic and
brute-force oracles and a config-driven sweep CLI:

* ``dressed``  -- master equations in the rotated-frame eigenbasis, with
  drive-shifted ("dqme") or bare ("dme") rate channels
* ``floquet``  -- sideband-resolved master equation on Floquet modes of
  the time-periodic lab-frame Hamiltonian ("fme")
* ``analytic`` -- closed-form spin-boson currents and a full-density-matrix
  integrator for ground truth
* ``sweep``    -- validated JSON configs, parallel parameter sweeps, CSV
"""

from .analytic import (NesbAnalytic, StepSizeError,
                       evolve_full_master_equation, nesb_analytic,
                       nesb_analytic_currents, two_level_balance)
from .dressed import (CurrentReport, PopulationVector, RateTable,
                      SteadyStateError, build_population_generator,
                      build_rate_table, build_rate_table_traditional,
                      dressed_current_report, energy_current,
                      jump_rate_matrix, pump_current, solve_steady_state)
from .floquet import (ConvergenceError, FloquetControls, FloquetError,
                      FloquetSystem, ParsevalError, SidebandTable,
                      build_sideband_table, floquet_decompose,
                      fme_current_report, fme_current_report_converged,
                      fme_rates_and_currents, fourier_components,
                      propagate_one_period, shift_quasienergy_gauge)
from .models import (CoupledSpinsModel, DriveSpec, KerrModel, ModelSpec,
                     NesbModel, RotatedSystem, bare_hamiltonian,
                     build_coupled_spins, build_kerr, build_nesb,
                     build_rotated, coupling_operators, excitation_number,
                     lab_frame_hamiltonian)
from .operators import (EigenSystem, boson_annihilation,
                        hermitian_eigendecompose, matrix_element,
                        pauli_lowering, tensor_product)
from .reservoir import (Reservoir, bose_occupation, ohmic_spectral_density,
                        rate_down, rate_up)
from .sweep import (ConfigError, SweepConfig, SweepError, SweepRow,
                    bundled_config_path, emit_csv, evaluate_point,
                    list_bundled_configs, load_config, parse_config,
                    rows_to_csv_text, run_sweep, sweep_values)

__version__ = "0.1.0"
