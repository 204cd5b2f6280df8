"""Floquet master equation built from the time-periodic lab-frame Hamiltonian.

This pipeline never touches the rotated static Hamiltonian, so its currents
are an independent cross-check of the dressed-basis results.  Steps:

1. propagate one drive period with second-order midpoint exponential steps
   to obtain U(T) and snapshots U(t_k) on a uniform grid,
2. diagonalize U(T) for quasienergies (folded into (-Omega/2, Omega/2])
   and Floquet modes |psi_a(t_k)> = U(t_k)|psi_a(0)> e^{+i eps_a t_k},
3. Fourier-transform the sampled coupling matrix elements
   <psi_a(t)|A|psi_b(t)> into sideband coefficients sigma[a, b, m],
4. evaluate golden-rule rates at the sideband gaps
   eps_b - eps_a - m*Omega and solve the Floquet population balance.

For the pair (a, b) at sideband m, the emission rate
|sigma[a, b, m]|^2 * rate_down(gap) moves population b -> a while the bath
gains the gap energy; the matching absorption rate moves a -> b.  Currents
then follow exactly as in the dressed-basis method.

A Parseval residual guards the sideband cutoff: when the retained
|sigma|^2 weights miss part of the time-averaged |<psi_a|A|psi_b>|^2
power, the cutoff is too small and an explicit error is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dressed import CurrentReport, PopulationVector, generator_from_gain, \
    pump_current, solve_steady_state
from .models import DriveSpec, ModelSpec, bare_hamiltonian, coupling_operators
from .operators import fix_eigenvector_gauge, order_degenerate_columns
from .reservoir import Reservoir, rate_down, rate_up

__all__ = [
    "ConvergenceError",
    "FloquetControls",
    "FloquetError",
    "FloquetSystem",
    "ParsevalError",
    "SidebandTable",
    "build_sideband_table",
    "floquet_decompose",
    "fme_current_report",
    "fme_current_report_converged",
    "fme_energy_current",
    "fme_populations",
    "fme_rates_and_currents",
    "fourier_components",
    "propagate_one_period",
    "shift_quasienergy_gauge",
]

DEFAULT_N_STEPS = 4096
DEFAULT_N_T = 512
DEFAULT_M_MAX = 8

UNITARITY_TOL = 1e-10
MODE_TOL = 1e-9
PARSEVAL_TOL = 1e-8


class FloquetError(RuntimeError):
    """Raised when the Floquet pipeline violates one of its invariants."""


class ParsevalError(FloquetError):
    """Raised when the sideband cutoff cannot capture the coupling spectrum."""


class ConvergenceError(FloquetError):
    """Raised when escalating the discretization fails to converge currents."""


@dataclass(frozen=True)
class FloquetControls:
    """Explicit discretization: propagator steps, samples, sideband cutoff."""

    n_steps: int = DEFAULT_N_STEPS
    n_t: int = DEFAULT_N_T
    m_max: int = DEFAULT_M_MAX

    def __post_init__(self):
        if self.n_steps < 256:
            raise ValueError(f"n_steps must be >= 256, got {self.n_steps}")
        if self.n_t < 8:
            raise ValueError(f"n_t must be >= 8, got {self.n_t}")
        if self.m_max < 1:
            raise ValueError(f"m_max must be >= 1, got {self.m_max}")
        if self.n_steps % self.n_t != 0:
            raise ValueError(
                f"n_steps={self.n_steps} must be a multiple of n_t={self.n_t}")
        if self.n_t < 4 * self.m_max:
            raise ValueError(
                f"n_t={self.n_t} must be >= 4*m_max={4 * self.m_max}")


@dataclass(frozen=True)
class FloquetSystem:
    """Quasienergies and mode samples over one drive period.

    ``mode_samples[k, :, a]`` holds |psi_a(t_k)> at t_k = k * period / n_t.
    """

    quasienergies: np.ndarray
    mode_samples: np.ndarray
    period: float

    @property
    def dim(self) -> int:
        return int(self.quasienergies.shape[0])

    @property
    def n_t(self) -> int:
        return int(self.mode_samples.shape[0])

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def sample_times(self) -> np.ndarray:
        return np.arange(self.n_t) * (self.period / self.n_t)


@dataclass(frozen=True)
class SidebandTable:
    """Sideband-resolved gaps, weights and golden-rule rates per reservoir.

    ``gaps[a, b, i]`` = eps_b - eps_a - m_values[i] * omega_d is the bath
    energy quantum for the (a, b) pair at that sideband; ``coeffs[label]``
    holds the matching |sigma[a, b, m]|^2 weights.
    """

    omega_d: float
    m_values: np.ndarray
    gaps: np.ndarray
    coeffs: dict[str, np.ndarray]
    g_minus: dict[str, np.ndarray]
    g_plus: dict[str, np.ndarray]

    @property
    def dim(self) -> int:
        return int(self.gaps.shape[0])

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.coeffs)


def _fold_quasienergies(values: np.ndarray, omega: float) -> np.ndarray:
    """Fold into the zone (-omega/2, omega/2]."""
    folded = np.mod(np.asarray(values, dtype=float) + 0.5 * omega, omega) \
        - 0.5 * omega
    return np.where(folded <= -0.5 * omega, folded + omega, folded)


def _propagate(model: ModelSpec, drive: DriveSpec, n_steps: int,
               n_snapshots: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint-exponential propagation over one period.

    Returns U(T) together with ``n_snapshots`` uniformly spaced snapshots
    U(t_k), k = 0 .. n_snapshots-1 (so U(0) = identity is included and
    U(T) is not).
    """
    if n_steps % n_snapshots != 0:
        raise ValueError(f"n_steps={n_steps} must be a multiple of "
                         f"n_snapshots={n_snapshots}")
    h_s = bare_hamiltonian(model)
    a_l, _ = coupling_operators(model)
    a_dag = a_l.conj().T
    dim = h_s.shape[0]
    period = 2.0 * math.pi / drive.omega_d
    dt = period / n_steps
    stride = n_steps // n_snapshots

    u = np.eye(dim, dtype=complex)
    snaps = np.empty((n_snapshots, dim, dim), dtype=complex)
    half_eta = 0.5 * drive.eta
    for k in range(n_steps):
        if k % stride == 0:
            snaps[k // stride] = u
        t_mid = (k + 0.5) * dt
        phase = np.exp(-1j * drive.omega_d * t_mid)
        h = h_s - half_eta * (phase * a_dag + np.conj(phase) * a_l)
        w, v = np.linalg.eigh(h)
        u = (v * np.exp(-1j * w * dt)) @ v.conj().T @ u
    return u, snaps


def _check_unitary(u: np.ndarray, tol: float, what: str) -> None:
    dev = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if dev > tol:
        raise FloquetError(f"{what} deviates from unitarity by {dev:.3e} "
                           f"(tolerance {tol:.1e})")


def _unitarity_tolerance(n_steps: int, dim: int) -> float:
    # every step factor is unitary to a few eps, so the product drifts
    # linearly with the step count; keep the baseline for short products
    drift = 8.0 * np.finfo(float).eps * n_steps * math.sqrt(dim)
    return max(UNITARITY_TOL, drift)


def propagate_one_period(model: ModelSpec, drive: DriveSpec,
                         n_steps: int = DEFAULT_N_STEPS) -> np.ndarray:
    """One-period propagator U(T) of the time-periodic lab-frame Hamiltonian."""
    if drive.omega_d <= 0.0:
        raise ValueError("drive frequency must be positive: a static "
                         "Hamiltonian has no drive period")
    if n_steps < 256:
        raise ValueError(f"n_steps must be >= 256, got {n_steps}")
    u, _ = _propagate(model, drive, n_steps, 1)
    _check_unitary(u, _unitarity_tolerance(n_steps, u.shape[0]),
                   "one-period propagator")
    return u


def _decompose_with_snapshots(u_period: np.ndarray, snaps: np.ndarray,
                              drive: DriveSpec,
                              unitary_tol: float = UNITARITY_TOL) -> FloquetSystem:
    omega = drive.omega_d
    period = 2.0 * math.pi / omega
    dim = u_period.shape[0]

    # unitary U(T) is normal, so its Schur form is diagonal and the Schur
    # vectors are orthonormal eigenvectors even for near-degenerate phases
    t_mat, z = scipy.linalg.schur(u_period, output="complex")
    off = np.abs(t_mat - np.diag(np.diag(t_mat))).max()
    if off > 1e-8:
        raise FloquetError(f"one-period propagator is not normal "
                           f"(Schur off-diagonal {off:.3e})")
    lam = np.diag(t_mat)
    radial = np.abs(np.abs(lam) - 1.0).max()
    if radial > unitary_tol:
        raise FloquetError(f"propagator eigenvalues off the unit circle "
                           f"by {radial:.3e}")

    eps = _fold_quasienergies(-np.angle(lam) / period, omega)
    order = np.argsort(eps, kind="stable")
    eps, vectors = order_degenerate_columns(eps[order], z[:, order],
                                            atol=1e-10 * max(1.0, omega))
    v0 = fix_eigenvector_gauge(vectors)

    times = np.arange(snaps.shape[0]) * (period / snaps.shape[0])
    modes = snaps @ v0
    modes = modes * np.exp(1j * times[:, None, None] * eps[None, None, :])

    psi_period = (u_period @ v0) * np.exp(1j * eps * period)[None, :]
    drift = np.abs(psi_period - v0).max()
    if drift > MODE_TOL:
        raise FloquetError(f"Floquet modes fail periodicity by {drift:.3e}")

    gram = np.einsum("kia,kib->kab", modes.conj(), modes)
    ortho = np.abs(gram - np.eye(dim)[None, :, :]).max()
    if ortho > MODE_TOL:
        raise FloquetError(f"Floquet modes lose orthonormality by {ortho:.3e}")

    return FloquetSystem(quasienergies=eps, mode_samples=modes, period=period)


def floquet_decompose(u_period: np.ndarray, model: ModelSpec, drive: DriveSpec,
                      n_t: int = DEFAULT_N_T,
                      n_steps: int | None = None) -> FloquetSystem:
    """Quasienergies and sampled Floquet modes from a one-period propagator.

    The mode samples require re-propagating the period on the ``n_t`` grid;
    ``n_steps`` defaults to the smallest multiple of ``n_t`` that is at
    least the propagation default.
    """
    if drive.omega_d <= 0.0:
        raise ValueError("drive frequency must be positive")
    u_period = np.asarray(u_period, dtype=complex)
    if n_steps is None:
        n_steps = max(DEFAULT_N_STEPS, n_t)
        n_steps += (-n_steps) % n_t
    _check_unitary(u_period, _unitarity_tolerance(n_steps, u_period.shape[0]),
                   "one-period propagator")
    _, snaps = _propagate(model, drive, n_steps, n_t)
    return _decompose_with_snapshots(
        u_period, snaps, drive,
        unitary_tol=_unitarity_tolerance(n_steps, u_period.shape[0]))


def _sampled_elements(fs: FloquetSystem, coupling: np.ndarray) -> np.ndarray:
    """f[k, a, b] = <psi_a(t_k)| coupling |psi_b(t_k)>."""
    modes = fs.mode_samples
    return np.einsum("kia,kib->kab", modes.conj(),
                     np.matmul(coupling, modes))


def _spectrum(fs: FloquetSystem, coupling: np.ndarray) -> tuple[np.ndarray,
                                                                np.ndarray]:
    """All DFT sideband coefficients plus the per-pair total power."""
    f = _sampled_elements(fs, coupling)
    coeffs = np.fft.fft(f, axis=0) / fs.n_t
    total = np.mean(np.abs(f) ** 2, axis=0)
    return coeffs, total


def fourier_components(fs: FloquetSystem, coupling: np.ndarray,
                       m_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Sideband coefficients sigma[a, b, i] for m_values[i] in [-m_max, m_max].

    sigma[a, b, m] is the m-th Fourier coefficient of <psi_a(t)|A|psi_b(t)>
    over one period.  Raises ``ParsevalError`` when the retained sidebands
    miss part of the time-averaged power beyond tolerance.
    """
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    if fs.n_t < 4 * m_max:
        raise ValueError(f"need n_t >= 4*m_max for sideband resolution, "
                         f"got n_t={fs.n_t}, m_max={m_max}")
    spectrum, total = _spectrum(fs, coupling)
    m_values = np.arange(-m_max, m_max + 1)
    sigma = np.stack([spectrum[m % fs.n_t] for m in m_values], axis=-1)

    kept = np.sum(np.abs(sigma) ** 2, axis=-1)
    tail = float((total - kept).max())
    tol = PARSEVAL_TOL * max(1.0, float(total.max(initial=0.0)))
    if tail > tol:
        raise ParsevalError(
            f"sideband cutoff m_max={m_max} misses spectral weight "
            f"{tail:.3e} (tolerance {tol:.3e}); increase m_max or n_t")
    return m_values, sigma


def _required_m_max(fs: FloquetSystem, couplings: list[np.ndarray]) -> int:
    """Smallest cutoff whose Parseval tail is within tolerance, with margin."""
    limit = fs.n_t // 4
    best = 1
    for coupling in couplings:
        spectrum, total = _spectrum(fs, coupling)
        power = np.abs(spectrum) ** 2
        tol = PARSEVAL_TOL * max(1.0, float(total.max(initial=0.0)))
        tail = np.array(total, copy=True)
        tail -= power[0]
        m = 0
        while float(tail.max()) > 0.1 * tol:
            m += 1
            if m > limit:
                raise ParsevalError(
                    f"coupling spectrum needs more than n_t/4 = {limit} "
                    f"sidebands; increase n_t")
            tail -= power[m] + power[-m % fs.n_t]
        best = max(best, m)
    return min(limit, max(best + 2, DEFAULT_M_MAX))


def build_sideband_table(fs: FloquetSystem, couplings: dict[str, np.ndarray],
                         reservoirs: dict[str, Reservoir],
                         m_max: int) -> SidebandTable:
    """Assemble gaps, |sigma|^2 weights and bath rates for all sidebands."""
    omega = fs.omega
    eps = fs.quasienergies
    m_values = np.arange(-m_max, m_max + 1)
    gaps = eps[None, :, None] - eps[:, None, None] \
        - m_values[None, None, :] * omega
    coeffs: dict[str, np.ndarray] = {}
    g_minus: dict[str, np.ndarray] = {}
    g_plus: dict[str, np.ndarray] = {}
    for label, r in reservoirs.items():
        _, sigma = fourier_components(fs, couplings[label], m_max)
        weight = np.abs(sigma) ** 2
        coeffs[label] = weight
        g_minus[label] = weight * rate_down(gaps, r)
        g_plus[label] = weight * rate_up(gaps, r)
    return SidebandTable(omega_d=omega, m_values=m_values, gaps=gaps,
                         coeffs=coeffs, g_minus=g_minus, g_plus=g_plus)


def fme_populations(table: SidebandTable) -> PopulationVector:
    """Steady state of the sideband-summed Floquet population balance."""
    dim = table.dim
    gain = np.zeros((dim, dim))
    for label in table.labels:
        gain += table.g_minus[label].sum(axis=2)
        gain += table.g_plus[label].sum(axis=2).T
    return solve_steady_state(generator_from_gain(gain))


def fme_energy_current(table: SidebandTable, populations: PopulationVector,
                       label: str) -> float:
    """Energy flow into reservoir ``label``, summed over all sidebands."""
    if label not in table.labels:
        raise ValueError(f"no reservoir {label!r} in table")
    p = populations.p
    flux = table.g_minus[label] * p[None, :, None] \
        - table.g_plus[label] * p[:, None, None]
    return float(np.sum(table.gaps * flux))


def fme_rates_and_currents(table: SidebandTable) -> CurrentReport:
    pops = fme_populations(table)
    j_l = fme_energy_current(table, pops, "left")
    j_r = fme_energy_current(table, pops, "right")
    return CurrentReport(j_left=j_l, j_right=j_r,
                         j_pump=pump_current(j_l, j_r), method="fme")


def _reservoir_map(reservoirs: list[Reservoir]) -> dict[str, Reservoir]:
    by_label = {r.label: r for r in reservoirs}
    if len(by_label) != len(reservoirs):
        raise ValueError("duplicate reservoir labels")
    if set(by_label) != {"left", "right"}:
        raise ValueError("need exactly one left and one right reservoir")
    return by_label


def fme_current_report(model: ModelSpec, drive: DriveSpec,
                       reservoirs: list[Reservoir],
                       controls: FloquetControls | None = None) -> CurrentReport:
    """Full Floquet pipeline for one parameter point.

    With explicit ``controls`` the given discretization is used as-is and
    an insufficient sideband cutoff raises ``ParsevalError``; without, the
    cutoff is chosen from the sampled coupling spectrum.
    """
    if controls is None:
        return _fme_report_free(model, drive, reservoirs,
                                DEFAULT_N_STEPS, DEFAULT_N_T)
    return _fme_report_free(model, drive, reservoirs,
                            controls.n_steps, controls.n_t,
                            m_max=controls.m_max)


def fme_current_report_converged(model: ModelSpec, drive: DriveSpec,
                                 reservoirs: list[Reservoir],
                                 rel_tol: float = 1e-6,
                                 max_rounds: int = 6) -> CurrentReport:
    """Escalate the discretization until currents stop moving.

    Each round doubles the propagation steps and the sample grid (the
    sideband cutoff re-adapts to the refined spectrum); the result of a
    round is accepted when it differs from the previous round by less than
    ``rel_tol`` relative to the largest current.
    """
    previous: CurrentReport | None = None
    last_error: ParsevalError | None = None
    for round_idx in range(max_rounds + 1):
        factor = 2 ** round_idx
        try:
            report = _fme_report_free(model, drive, reservoirs,
                                      DEFAULT_N_STEPS * factor,
                                      DEFAULT_N_T * factor)
        except ParsevalError as exc:
            # spectrum wider than this round's sample grid; refine and retry
            last_error = exc
            previous = None
            continue
        if previous is not None:
            delta = max(abs(a - b) for a, b in
                        zip(report.as_tuple(), previous.as_tuple()))
            scale = max(max(abs(v) for v in report.as_tuple()), 1e-300)
            if delta <= rel_tol * scale:
                return report
        previous = report
    if previous is None and last_error is not None:
        raise ConvergenceError(
            f"sideband spectrum still unresolved after {max_rounds + 1} "
            f"refinement rounds: {last_error}")
    raise ConvergenceError(
        f"currents not converged to {rel_tol:.1e} after {max_rounds + 1} "
        f"refinement rounds")


def _fme_report_free(model: ModelSpec, drive: DriveSpec,
                     reservoirs: list[Reservoir], n_steps: int, n_t: int,
                     m_max: int | None = None) -> CurrentReport:
    if drive.omega_d <= 0.0:
        raise ValueError("the Floquet method needs a positive drive frequency")
    by_label = _reservoir_map(reservoirs)
    u_period, snaps = _propagate(model, drive, n_steps, n_t)
    _check_unitary(u_period,
                   _unitarity_tolerance(n_steps, u_period.shape[0]),
                   "one-period propagator")
    fs = _decompose_with_snapshots(
        u_period, snaps, drive,
        unitary_tol=_unitarity_tolerance(n_steps, u_period.shape[0]))
    a_l, a_r = coupling_operators(model)
    if m_max is None:
        m_max = _required_m_max(fs, [a_l, a_r])
    table = build_sideband_table(fs, {"left": a_l, "right": a_r}, by_label,
                                 m_max)
    return fme_rates_and_currents(table)


def shift_quasienergy_gauge(fs: FloquetSystem, index: int,
                            k: int = 1) -> FloquetSystem:
    """Equivalent Floquet system with eps_index shifted by k full zones.

    The mode picks up the compensating phase e^{+i k Omega t}, so physical
    quantities built from the pair (quasienergy, mode) must not change;
    used to test the sideband summation.
    """
    if not (0 <= index < fs.dim):
        raise IndexError(f"mode index {index} out of range")
    eps = np.array(fs.quasienergies, copy=True)
    eps[index] += k * fs.omega
    modes = np.array(fs.mode_samples, copy=True)
    phase = np.exp(1j * k * fs.omega * fs.sample_times)
    modes[:, :, index] *= phase[:, None]
    return FloquetSystem(quasienergies=eps, mode_samples=modes,
                         period=fs.period)
