"""Dressed master equation: rate tables, steady states, energy currents."""

import numpy as np
import pytest

from driveflux.dressed import (
    PopulationVector,
    RateTable,
    SteadyStateError,
    build_population_generator,
    build_rate_table,
    build_rate_table_traditional,
    dressed_current_report,
    energy_current,
    jump_rate_matrix,
    pump_current,
    solve_steady_state,
)
from driveflux.models import CoupledSpinsModel, DriveSpec, KerrModel, NesbModel, build_rotated
from driveflux.operators import hermitian_eigendecompose
from driveflux.reservoir import Reservoir, rate_down, rate_up

LEFT = Reservoir(label="left", temperature=1.2, alpha=0.001, omega_c=10.0)
RIGHT = Reservoir(label="right", temperature=0.4, alpha=0.001, omega_c=10.0)
RESERVOIRS = [LEFT, RIGHT]


def nesb_table(eta, omega_d, traditional=False):
    drive = DriveSpec(eta=eta, omega_d=omega_d)
    system = build_rotated(NesbModel(), drive)
    es = hermitian_eigendecompose(system.hamiltonian)
    build = build_rate_table_traditional if traditional else build_rate_table
    return build(system, es, RESERVOIRS, drive)


def test_channels_shift_by_drive_frequency():
    # detuning 0.3, gap 0.1 -> dressed splitting sqrt(0.1)
    table = nesb_table(0.1, 0.7)
    lam = np.sqrt(0.1)
    expected = np.array([[0.7, 0.7 + lam], [0.7 - lam, 0.7]])
    np.testing.assert_allclose(table.channels, expected, atol=1e-14)


def test_traditional_channels_are_bare_gaps():
    table = nesb_table(0.1, 0.7, traditional=True)
    lam = np.sqrt(0.1)
    expected = np.array([[0.0, lam], [-lam, 0.0]])
    np.testing.assert_allclose(table.channels, expected, atol=1e-14)


def test_resonant_weights_are_one_quarter():
    # on resonance the mixing angle is pi/2 and every weight is 1/4
    table = nesb_table(0.2, 1.0)
    for r in RESERVOIRS:
        weight = table.minus[r.label] / rate_down(table.channels, r)
        np.testing.assert_allclose(weight, 0.25 * np.ones((2, 2)), atol=1e-13)


def test_zero_drive_frequency_matches_traditional_bitwise():
    driven = nesb_table(0.25, 0.0)
    static = nesb_table(0.25, 0.0, traditional=True)
    assert np.array_equal(driven.channels, static.channels)
    for label in ("left", "right"):
        assert np.array_equal(driven.minus[label], static.minus[label])
        assert np.array_equal(driven.plus[label], static.plus[label])


def test_zero_drive_frequency_currents_identical():
    drive = DriveSpec(eta=0.25, omega_d=0.0)
    system = build_rotated(NesbModel(), drive)
    a = dressed_current_report(system, RESERVOIRS, drive)
    b = dressed_current_report(system, RESERVOIRS, drive, traditional=True)
    assert abs(a.j_left - b.j_left) <= 1e-15
    assert abs(a.j_right - b.j_right) <= 1e-15
    assert abs(a.j_pump - b.j_pump) <= 1e-15


@pytest.mark.parametrize("model,drive", [
    (NesbModel(), DriveSpec(eta=0.1, omega_d=0.7)),
    (KerrModel(chi=0.4, n_max=10), DriveSpec(eta=0.1, omega_d=0.5)),
])
def test_table_detailed_balance(model, drive):
    """plus/minus = exp(-channel/kT) wherever the pair is active."""
    system = build_rotated(model, drive)
    es = hermitian_eigendecompose(system.hamiltonian)
    table = build_rate_table(system, es, RESERVOIRS, drive)
    for r in RESERVOIRS:
        minus, plus = table.minus[r.label], table.plus[r.label]
        mask = (minus > 1e-300) & (table.channels > 0.0)
        ratio = plus[mask] / minus[mask]
        np.testing.assert_allclose(ratio,
                                   np.exp(-table.channels[mask] / r.temperature),
                                   rtol=1e-12)


def test_rate_table_rejects_negative_rates():
    channels = np.zeros((2, 2))
    good = {"left": np.zeros((2, 2)), "right": np.zeros((2, 2))}
    bad = {"left": np.array([[0.0, -1.0], [0.0, 0.0]]), "right": np.zeros((2, 2))}
    with pytest.raises(ValueError):
        RateTable(channels=channels, minus=bad, plus=good)


def test_generator_columns_sum_to_zero():
    table = nesb_table(0.1, 0.7)
    w = build_population_generator(table)
    np.testing.assert_allclose(w.sum(axis=0), np.zeros(2), atol=1e-16)


def test_generator_off_diagonal_gain_convention():
    table = nesb_table(0.1, 0.7)
    w = build_population_generator(table)
    gain = jump_rate_matrix(table)
    for m in range(2):
        for mp in range(2):
            if m != mp:
                expected = sum(table.minus[lab][m, mp] + table.plus[lab][mp, m]
                               for lab in ("left", "right"))
                np.testing.assert_allclose(w[m, mp], expected, rtol=1e-15)
                np.testing.assert_allclose(gain[m, mp], expected, rtol=1e-15)


def test_steady_state_of_symmetric_two_level():
    w = np.array([[-1.0, 1.0], [1.0, -1.0]])
    p = solve_steady_state(w)
    np.testing.assert_allclose(p.p, [0.5, 0.5], atol=1e-14)


def test_steady_state_single_state():
    p = solve_steady_state(np.zeros((1, 1)))
    np.testing.assert_allclose(p.p, [1.0])


def test_steady_state_residual_is_tiny():
    table = nesb_table(0.15, 0.8)
    w = build_population_generator(table)
    p = solve_steady_state(w)
    assert np.max(np.abs(w @ p.p)) < 1e-18


def test_disconnected_blocks_raise_with_block_report():
    # two uncoupled two-state loops -> two independent steady states
    block = np.array([[-1.0, 2.0], [1.0, -2.0]])
    w = np.zeros((4, 4))
    w[:2, :2] = block
    w[2:, 2:] = block
    with pytest.raises(SteadyStateError) as excinfo:
        solve_steady_state(w)
    message = str(excinfo.value)
    assert "2 independent steady states" in message
    assert "{0, 1}" in message and "{2, 3}" in message


def test_steady_state_rejects_bad_column_sums():
    with pytest.raises(ValueError):
        solve_steady_state(np.array([[-1.0, 0.0], [2.0, 0.0]]))


def test_population_vector_validation():
    with pytest.raises(ValueError):
        PopulationVector(p=np.array([0.5, -0.5]))
    with pytest.raises(ValueError):
        PopulationVector(p=np.array([0.6, 0.6]))
    PopulationVector(p=np.array([0.25, 0.75]))


def test_equilibrium_has_no_currents():
    # equal temperatures, no drive amplitude: every bond balances and both
    # currents vanish
    warm = [Reservoir(label="left", temperature=0.8, alpha=0.001, omega_c=10.0),
            Reservoir(label="right", temperature=0.8, alpha=0.001, omega_c=10.0)]
    drive = DriveSpec(eta=0.0, omega_d=0.0)
    system = build_rotated(NesbModel(), drive)
    report = dressed_current_report(system, warm, drive)
    assert abs(report.j_left) < 1e-18
    assert abs(report.j_right) < 1e-18


@pytest.mark.parametrize("model", [NesbModel(), KerrModel(chi=0.4, n_max=10)],
                         ids=["nesb", "kerr"])
def test_zero_amplitude_drive_pumps_nothing(model):
    # eta=0 leaves a birth-death chain: bonds balance in the steady state,
    # so the net absorbed power vanishes even at finite drive frequency
    drive = DriveSpec(eta=0.0, omega_d=0.9)
    system = build_rotated(model, drive)
    report = dressed_current_report(system, RESERVOIRS, drive)
    assert abs(report.j_left + report.j_right) < 1e-12
    assert abs(report.j_pump) < 1e-12
    # heat still flows through: the hot bath loses energy, the cold one
    # receives it
    assert report.j_left < 0.0 and report.j_right > 0.0


def test_uncoupled_right_spin_carries_no_current():
    model = CoupledSpinsModel(hopping=0.0)
    drive = DriveSpec(eta=0.2, omega_d=0.9)
    system = build_rotated(model, drive)
    report = dressed_current_report(system, RESERVOIRS, drive)
    assert abs(report.j_right) < 1e-12


def test_current_conservation_is_exact():
    for omega_d in (0.1, 0.5, 0.95):
        drive = DriveSpec(eta=0.1, omega_d=omega_d)
        system = build_rotated(NesbModel(), drive)
        report = dressed_current_report(system, RESERVOIRS, drive)
        assert report.j_left + report.j_right + report.j_pump == 0.0


def test_pump_current_sign_convention():
    assert pump_current(0.25, 0.5) == -0.75


def test_energy_current_matches_hand_sum():
    table = nesb_table(0.1, 0.7)
    p = solve_steady_state(build_population_generator(table))
    for r in RESERVOIRS:
        manual = 0.0
        for m in range(2):
            for mp in range(2):
                manual += table.channels[m, mp] * (
                    table.minus[r.label][m, mp] * p.p[mp]
                    - table.plus[r.label][m, mp] * p.p[m])
        np.testing.assert_allclose(energy_current(table, p, r.label), manual,
                                   rtol=1e-13)


def test_report_method_labels():
    drive = DriveSpec(eta=0.1, omega_d=0.7)
    system = build_rotated(NesbModel(), drive)
    assert dressed_current_report(system, RESERVOIRS, drive).method == "dqme"
    assert dressed_current_report(system, RESERVOIRS, drive,
                                  traditional=True).method == "dme"
