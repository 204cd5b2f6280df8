"""Ground-truth oracles: closed-form spin-boson currents and a brute-force
full master-equation integrator.

The driven two-level system in the rotated frame,

    H = Delta |up><up| - (eta/2)(|up><down| + |down><up|),  Delta = eps - w_d,

diagonalizes by the mixing angle theta = atan2(eta, Delta) with splitting
Lambda = sqrt(Delta^2 + eta^2).  Its dressed jump channels sit at
w_d + Lambda (weight cos^4(theta/2)), w_d - Lambda (weight sin^4(theta/2))
and w_d (two diagonal pairs, weight sin^2(theta/2)cos^2(theta/2) each),
which gives two-state balance equations and explicit currents.  Every
quantity here is written directly from those formulas, independent of the
rate-table machinery, so agreement with the dressed pipeline is a real
cross-check.

The brute-force oracle integrates the full Lindblad equation (commutator
plus every pairwise dissipator, coherences included) with a classic
fixed-step fourth-order scheme and hands back the final density matrix in
the computational basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dressed import (CurrentReport, PopulationVector, RateTable,
                      jump_rate_matrix, pump_current)
from .models import DriveSpec, NesbModel, RotatedSystem
from .operators import hermitian_eigendecompose
from .reservoir import Reservoir, rate_down, rate_up

__all__ = [
    "NesbAnalytic",
    "StepSizeError",
    "evolve_full_master_equation",
    "nesb_analytic",
    "nesb_analytic_currents",
    "two_level_balance",
]

TRACE_DRIFT_TOL = 1e-10


class StepSizeError(RuntimeError):
    """Raised when the fixed integration step is too large to be trusted."""


@dataclass(frozen=True)
class NesbAnalytic:
    """Closed-form ingredients of the driven spin-boson steady state."""

    theta: float
    lam: float
    omega_plus: float   # channel w_d + Lambda
    omega_minus: float  # channel w_d - Lambda
    omega_drive: float  # diagonal channel w_d
    gamma_up: float     # collective rate feeding the upper dressed state
    gamma_down: float   # collective rate feeding the lower dressed state
    populations: PopulationVector
    reservoirs: tuple[Reservoir, ...]


def two_level_balance(gplus: float, gminus: float) -> PopulationVector:
    """Steady state (P_lower, P_upper) of a two-state rate balance.

    ``gplus`` feeds the upper state, ``gminus`` the lower one.
    """
    if gplus < 0.0 or gminus < 0.0:
        raise ValueError("rates must be nonnegative")
    total = gplus + gminus
    if total <= 0.0:
        raise ValueError("at least one rate must be positive")
    return PopulationVector(p=np.array([gminus, gplus]) / total)


def _mixing_angle(delta: float, eta: float) -> float:
    if eta == 0.0 and delta == 0.0:
        return 0.0
    return math.atan2(eta, delta)


def nesb_analytic(model: NesbModel, drive: DriveSpec,
                  reservoirs: list[Reservoir]) -> NesbAnalytic:
    """Collective rates and populations of the driven spin-boson system."""
    delta = model.epsilon - drive.omega_d
    theta = _mixing_angle(delta, drive.eta)
    lam = math.hypot(delta, drive.eta)
    w_a = drive.omega_d + lam
    w_b = drive.omega_d - lam
    c4 = math.cos(0.5 * theta) ** 4
    s4 = math.sin(0.5 * theta) ** 4

    # pair (lower, upper) exchanges w_d + Lambda, pair (upper, lower)
    # exchanges w_d - Lambda; both directions of both pairs feed the balance
    g_up = sum(c4 * rate_up(w_a, r) + s4 * rate_down(w_b, r)
               for r in reservoirs)
    g_down = sum(c4 * rate_down(w_a, r) + s4 * rate_up(w_b, r)
                 for r in reservoirs)
    pops = two_level_balance(g_up, g_down)
    return NesbAnalytic(theta=theta, lam=lam, omega_plus=w_a, omega_minus=w_b,
                        omega_drive=drive.omega_d, gamma_up=g_up,
                        gamma_down=g_down, populations=pops,
                        reservoirs=tuple(reservoirs))


def nesb_analytic_currents(model: NesbModel, drive: DriveSpec,
                           reservoirs: list[Reservoir]) -> CurrentReport:
    """Closed-form steady-state currents of the driven spin-boson system."""
    sol = nesb_analytic(model, drive, reservoirs)
    p_low, p_up = sol.populations.p
    half = 0.5 * sol.theta
    c4 = math.cos(half) ** 4
    s4 = math.sin(half) ** 4
    sc = (math.sin(half) * math.cos(half)) ** 2

    currents = {}
    for r in sol.reservoirs:
        j = sol.omega_plus * c4 * (rate_down(sol.omega_plus, r) * p_up
                                   - rate_up(sol.omega_plus, r) * p_low)
        j += sol.omega_minus * s4 * (rate_down(sol.omega_minus, r) * p_low
                                     - rate_up(sol.omega_minus, r) * p_up)
        j += sol.omega_drive * sc * (rate_down(sol.omega_drive, r)
                                     - rate_up(sol.omega_drive, r))
        currents[r.label] = float(j)
    j_l = currents["left"]
    j_r = currents["right"]
    return CurrentReport(j_left=j_l, j_right=j_r,
                         j_pump=pump_current(j_l, j_r), method="analytic")


def _validate_initial_state(rho0: np.ndarray, dim: int) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise ValueError(f"initial state has shape {rho0.shape}, "
                         f"expected {(dim, dim)}")
    if np.abs(rho0 - rho0.conj().T).max() > 1e-10:
        raise ValueError("initial state must be Hermitian")
    if abs(np.trace(rho0).real - 1.0) > 1e-10:
        raise ValueError("initial state must have unit trace")
    if np.linalg.eigvalsh(rho0).min() < -1e-9:
        raise ValueError("initial state must be positive semidefinite")
    return rho0


def evolve_full_master_equation(system: RotatedSystem, table: RateTable,
                                rho0: np.ndarray, t_final: float,
                                dt: float) -> np.ndarray:
    """Integrate the full master equation and return rho(t_final).

    ``rho0`` and the returned state live in the computational basis; the
    dissipators of ``table`` act between eigenstates of the system
    Hamiltonian.  In that eigenbasis the equation of motion reads

        d rho_ab/dt = [-i(E_a - E_b) - (D_a + D_b)/2] rho_ab
                      + delta_ab * sum_c G[a, c] rho_cc

    with G the pairwise jump-rate matrix and D its column sums (self-loop
    pairs dephase coherences but move no population).  Integration uses
    fixed-step classic Runge-Kutta; a drifting trace or a non-finite entry
    aborts with advice to reduce ``dt``.
    """
    if dt <= 0.0 or t_final < 0.0:
        raise ValueError("need dt > 0 and t_final >= 0")
    es = hermitian_eigendecompose(system.hamiltonian)
    dim = es.dim
    if table.dim != dim:
        raise ValueError("rate table dimension does not match the system")
    rho0 = _validate_initial_state(rho0, dim)

    gain = jump_rate_matrix(table)
    outflow = gain.sum(axis=0)
    decay = -1j * (es.energies[:, None] - es.energies[None, :]) \
        - 0.5 * (outflow[:, None] + outflow[None, :])
    diag = np.diag_indices(dim)

    def rhs(rho):
        out = decay * rho
        out[diag] += gain @ rho[diag].real
        return out

    rho = es.vectors.conj().T @ rho0 @ es.vectors
    n_steps = max(1, int(round(t_final / dt)))
    check_every = max(1, n_steps // 64)
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(n_steps):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * dt * k1)
            k3 = rhs(rho + 0.5 * dt * k2)
            k4 = rhs(rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if step % check_every == 0 or step == n_steps - 1:
                trace = np.trace(rho).real
                # coherences can diverge without moving the trace, so check
                # every entry, not just the trace
                if (not np.all(np.isfinite(rho))
                        or abs(trace - 1.0) > TRACE_DRIFT_TOL):
                    raise StepSizeError(
                        f"state diverged by t={(step + 1) * dt:.3g} "
                        f"(trace {trace!r}); the fixed step dt={dt:.3g} is "
                        f"too large for this spectrum, reduce dt")
    return es.vectors @ rho @ es.vectors.conj().T
