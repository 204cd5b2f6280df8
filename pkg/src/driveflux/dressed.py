"""Dressed-basis master equations and steady-state energy currents.

Dissipation is expanded in the eigenbasis of the rotated Hamiltonian,
one Lindblad dissipator per ordered eigenstate pair (m, m').  For the
pair (m, m') the emission rate

    Gamma_minus[m, m'] = rate_down(w_ch) * |<phi_m| A |phi_m'>|^2

moves population m' -> m while depositing the channel energy w_ch in the
bath, and the absorption rate

    Gamma_plus[m, m'] = rate_up(w_ch) * |<phi_m| A |phi_m'>|^2

moves population m -> m' while absorbing w_ch.  The two table flavors
differ only in the channel frequency:

* driven table:      w_ch = omega_d + (E_m' - E_m)   (method "dqme")
* traditional table: w_ch = E_m' - E_m               (method "dme")

Populations and eigenbasis coherences decouple, so the steady state is
the null vector of a classical rate generator.  Currents are counted as
energy flow into each reservoir; the drive picks up the remainder,
j_pump = -(j_left + j_right), so the three always sum to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .models import DriveSpec, RotatedSystem
from .operators import EigenSystem, hermitian_eigendecompose
from .reservoir import Reservoir, rate_down, rate_up

__all__ = [
    "CurrentReport",
    "PopulationVector",
    "RateTable",
    "SteadyStateError",
    "build_population_generator",
    "build_rate_table",
    "build_rate_table_traditional",
    "dressed_current_report",
    "energy_current",
    "generator_from_gain",
    "jump_rate_matrix",
    "pump_current",
    "solve_steady_state",
]

# entries of a steady-state vector below this are treated as numerical dust
NEGATIVE_POPULATION_TOL = 1e-12

# singular values below this fraction of the largest count as null directions
_NULLSPACE_RTOL = 1e-8


class SteadyStateError(RuntimeError):
    """Raised when the rate generator has no unique normalizable steady state."""


@dataclass(frozen=True)
class RateTable:
    """Per-pair channel frequencies and jump rates for both reservoirs.

    ``channels[m, mp]`` is the energy quantum exchanged with a bath by the
    (m, mp) pair; ``minus[label][m, mp]`` and ``plus[label][m, mp]`` are the
    emission and absorption rates defined in the module docstring.  Diagonal
    pairs m == mp are kept: they carry the bare drive quantum and dephase
    coherences without moving population.
    """

    channels: np.ndarray
    minus: dict[str, np.ndarray] = field(repr=False)
    plus: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        n = self.channels.shape[0]
        if self.channels.shape != (n, n):
            raise ValueError("channel matrix must be square")
        for rates in (self.minus, self.plus):
            for label, mat in rates.items():
                if mat.shape != (n, n):
                    raise ValueError(f"rate matrix for {label!r} has shape "
                                     f"{mat.shape}, expected {(n, n)}")
                if np.any(mat < 0.0):
                    raise ValueError(f"negative rate in table for {label!r}")

    @property
    def dim(self) -> int:
        return int(self.channels.shape[0])

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.minus)


@dataclass(frozen=True)
class PopulationVector:
    """Normalized nonnegative eigenstate occupations."""

    p: np.ndarray

    def __post_init__(self):
        if self.p.ndim != 1:
            raise ValueError("populations must form a vector")
        if np.any(self.p < 0.0):
            raise ValueError("populations must be nonnegative")
        if abs(float(self.p.sum()) - 1.0) > 1e-12:
            raise ValueError("populations must sum to one")

    @property
    def dim(self) -> int:
        return int(self.p.shape[0])


@dataclass(frozen=True)
class CurrentReport:
    """Steady-state energy currents into each terminal for one method."""

    j_left: float
    j_right: float
    j_pump: float
    method: str

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.j_left, self.j_right, self.j_pump)


def _assemble_table(system: RotatedSystem, es: EigenSystem,
                    reservoirs: list[Reservoir], offset: float) -> RateTable:
    energies = es.energies
    # channels[m, mp] = offset + E_mp - E_m
    channels = offset + energies[None, :] - energies[:, None]
    minus: dict[str, np.ndarray] = {}
    plus: dict[str, np.ndarray] = {}
    for r in reservoirs:
        if r.label in minus:
            raise ValueError(f"duplicate reservoir label {r.label!r}")
        coupling = system.coupling(r.label)
        melem = es.vectors.conj().T @ coupling @ es.vectors
        weights = np.abs(melem) ** 2
        minus[r.label] = weights * rate_down(channels, r)
        plus[r.label] = weights * rate_up(channels, r)
    return RateTable(channels=channels, minus=minus, plus=plus)


def build_rate_table(system: RotatedSystem, es: EigenSystem,
                     reservoirs: list[Reservoir], drive: DriveSpec) -> RateTable:
    """Rate table with drive-shifted channels omega_d + (E_m' - E_m)."""
    return _assemble_table(system, es, reservoirs, drive.omega_d)


def build_rate_table_traditional(system: RotatedSystem, es: EigenSystem,
                                 reservoirs: list[Reservoir],
                                 drive: DriveSpec) -> RateTable:
    """Rate table with bare channels E_m' - E_m (no drive shift)."""
    return _assemble_table(system, es, reservoirs, 0.0)


def jump_rate_matrix(table: RateTable) -> np.ndarray:
    """Total rate matrix G with G[a, b] the jump rate b -> a, self-loops kept."""
    g = np.zeros((table.dim, table.dim))
    for label in table.labels:
        g += table.minus[label] + table.plus[label].T
    return g


def generator_from_gain(gain: np.ndarray) -> np.ndarray:
    """Classical generator from a gain matrix: losses balance column sums."""
    w = np.array(gain, dtype=float, copy=True)
    np.fill_diagonal(w, 0.0)
    w[np.diag_indices_from(w)] = -w.sum(axis=0)
    return w


def build_population_generator(table: RateTable) -> np.ndarray:
    """Population rate generator W with dp/dt = W p and zero column sums."""
    return generator_from_gain(jump_rate_matrix(table))


def _connectivity_blocks(w: np.ndarray) -> list[list[int]]:
    adj = (np.abs(w) + np.abs(w.T)) > 0.0
    np.fill_diagonal(adj, False)
    n_comp, membership = connected_components(adj, directed=False)
    blocks: list[list[int]] = [[] for _ in range(n_comp)]
    for state, comp in enumerate(membership):
        blocks[comp].append(state)
    return blocks


def solve_steady_state(w: np.ndarray) -> PopulationVector:
    """Unique normalized null vector of a zero-column-sum generator.

    Raises ``SteadyStateError`` when the null space is degenerate, listing
    the disconnected blocks of the rate graph that make the steady state
    non-unique.
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ValueError("generator must be square")
    scale = np.abs(w).max()
    if n == 1:
        return PopulationVector(p=np.ones(1))
    colsum = np.abs(w.sum(axis=0)).max()
    if colsum > 1e-10 * max(1.0, scale):
        raise ValueError("generator columns must sum to zero")

    _, s, vt = np.linalg.svd(w)
    if scale == 0.0:
        nullity = n
    else:
        nullity = int(np.count_nonzero(s <= _NULLSPACE_RTOL * s[0]))
    if nullity != 1:
        blocks = _connectivity_blocks(w)
        detail = "; ".join("{" + ", ".join(map(str, b)) + "}" for b in blocks)
        raise SteadyStateError(
            f"rate graph is reducible: {max(nullity, len(blocks))} independent "
            f"steady states over state blocks {detail}")

    p = vt[-1]
    total = p.sum()
    if abs(total) < 1e-8:
        raise SteadyStateError("null vector has vanishing total weight")
    p = p / total
    if np.any(p < -NEGATIVE_POPULATION_TOL):
        raise SteadyStateError(
            f"steady state has negative occupations down to {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    return PopulationVector(p=p / p.sum())


def energy_current(table: RateTable, populations: PopulationVector,
                   label: str) -> float:
    """Energy flow into reservoir ``label``, weighted by the table channels."""
    if label not in table.labels:
        raise ValueError(f"no reservoir {label!r} in table")
    p = populations.p
    flux = table.minus[label] * p[None, :] - table.plus[label] * p[:, None]
    return float(np.sum(table.channels * flux))


def pump_current(j_left: float, j_right: float) -> float:
    """Energy flow accounted to the drive: exact negation of the bath total."""
    return -(j_left + j_right)


def dressed_current_report(system: RotatedSystem, reservoirs: list[Reservoir],
                           drive: DriveSpec,
                           traditional: bool = False) -> CurrentReport:
    """Full pipeline for one parameter point: eigenbasis -> rates -> currents."""
    es = hermitian_eigendecompose(system.hamiltonian)
    build = build_rate_table_traditional if traditional else build_rate_table
    table = build(system, es, reservoirs, drive)
    pops = solve_steady_state(build_population_generator(table))
    j_l = energy_current(table, pops, "left")
    j_r = energy_current(table, pops, "right")
    return CurrentReport(j_left=j_l, j_right=j_r,
                         j_pump=pump_current(j_l, j_r),
                         method="dme" if traditional else "dqme")
