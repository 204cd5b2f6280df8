"""Built-in system models and their rotating-frame Hamiltonians.

Each model couples to two Ohmic reservoirs through lowering operators and
is driven coherently on the left coupling with amplitude eta at frequency
omega_d.  In the frame co-rotating with the drive the Hamiltonian becomes
time independent,

    H = H_S - omega_d * N + (drive term),

because the excitation number N commutes with the bare H_S for every model
here.  Builders return that static rotated Hamiltonian together with the
two bath coupling operators; ``lab_frame_hamiltonian`` gives the original
time-periodic Hamiltonian for propagator-based methods.

Models:

* ``NesbModel``          -- one qubit, both baths couple via sigma_minus
* ``CoupledSpinsModel``  -- two exchange-coupled qubits, one bath each
* ``KerrModel``          -- driven Kerr resonator, both baths via a
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .operators import (boson_annihilation, pauli_lowering, require_hermitian,
                        tensor_product)

__all__ = [
    "CoupledSpinsModel",
    "DriveSpec",
    "KerrModel",
    "ModelSpec",
    "NesbModel",
    "RotatedSystem",
    "bare_hamiltonian",
    "build_coupled_spins",
    "build_kerr",
    "build_nesb",
    "build_rotated",
    "coupling_operators",
    "excitation_number",
    "lab_frame_hamiltonian",
]


@dataclass(frozen=True)
class DriveSpec:
    """Coherent drive: amplitude eta >= 0 at frequency omega_d >= 0."""

    eta: float
    omega_d: float

    def __post_init__(self):
        if self.eta < 0.0:
            raise ValueError(f"drive amplitude must be >= 0, got {self.eta}")
        if self.omega_d < 0.0:
            raise ValueError(f"drive frequency must be >= 0, got {self.omega_d}")


@dataclass(frozen=True)
class NesbModel:
    """Single qubit with bare splitting epsilon, both baths on sigma_minus."""

    epsilon: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class CoupledSpinsModel:
    """Two qubits with excitation hopping t; left/right bath on its own qubit."""

    epsilon_left: float = 1.0
    epsilon_right: float = 1.0
    hopping: float = 0.2

    def __post_init__(self):
        if not self.epsilon_left > 0.0 or not self.epsilon_right > 0.0:
            raise ValueError("qubit splittings must be positive")


@dataclass(frozen=True)
class KerrModel:
    """Kerr resonator: frequency epsilon, anharmonicity chi, n_max Fock states."""

    epsilon: float = 1.0
    chi: float = 0.4
    n_max: int = 20

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.chi < 0.0:
            raise ValueError(f"chi must be >= 0, got {self.chi}")
        if self.n_max < 2:
            raise ValueError(f"n_max must be >= 2, got {self.n_max}")


ModelSpec = Union[NesbModel, CoupledSpinsModel, KerrModel]


@dataclass(frozen=True)
class RotatedSystem:
    """Static rotated-frame Hamiltonian plus the two bath couplings."""

    hamiltonian: np.ndarray
    coupling_left: np.ndarray
    coupling_right: np.ndarray

    def __post_init__(self):
        require_hermitian(self.hamiltonian)
        dim = self.hamiltonian.shape[0]
        for name, op in (("coupling_left", self.coupling_left),
                         ("coupling_right", self.coupling_right)):
            if op.shape != (dim, dim):
                raise ValueError(f"{name} has shape {op.shape}, expected {(dim, dim)}")

    @property
    def dim(self) -> int:
        return int(self.hamiltonian.shape[0])

    def coupling(self, label: str) -> np.ndarray:
        if label == "left":
            return self.coupling_left
        if label == "right":
            return self.coupling_right
        raise ValueError(f"unknown reservoir label {label!r}")


def build_nesb(model: NesbModel, drive: DriveSpec) -> RotatedSystem:
    """Rotated qubit: H = Delta |up><up| - (eta/2) (s+ + s-), Delta = eps - w_d."""
    sm = pauli_lowering()
    sp = sm.conj().T
    delta = model.epsilon - drive.omega_d
    h = delta * (sp @ sm) - 0.5 * drive.eta * (sp + sm)
    return RotatedSystem(hamiltonian=h, coupling_left=sm, coupling_right=sm)


def build_coupled_spins(model: CoupledSpinsModel, drive: DriveSpec) -> RotatedSystem:
    """Two detuned qubits with hopping; the drive acts on the left qubit only."""
    sm = pauli_lowering()
    sp = sm.conj().T
    eye = np.eye(2, dtype=complex)
    sm_l = tensor_product(sm, eye)
    sm_r = tensor_product(eye, sm)
    sp_l = sm_l.conj().T
    sp_r = sm_r.conj().T
    delta_l = model.epsilon_left - drive.omega_d
    delta_r = model.epsilon_right - drive.omega_d
    h = (delta_l * (sp_l @ sm_l) + delta_r * (sp_r @ sm_r)
         + model.hopping * (sp_l @ sm_r + sp_r @ sm_l)
         - 0.5 * drive.eta * (sp_l + sm_l))
    return RotatedSystem(hamiltonian=h, coupling_left=sm_l, coupling_right=sm_r)


def build_kerr(model: KerrModel, drive: DriveSpec) -> RotatedSystem:
    """Kerr resonator: H = Delta a^dag a + chi a^dag a^dag a a - (eta/2)(a^dag + a)."""
    a = boson_annihilation(model.n_max)
    adag = a.conj().T
    delta = model.epsilon - drive.omega_d
    h = (delta * (adag @ a) + model.chi * (adag @ adag @ a @ a)
         - 0.5 * drive.eta * (adag + a))
    return RotatedSystem(hamiltonian=h, coupling_left=a, coupling_right=a)


def build_rotated(model: ModelSpec, drive: DriveSpec) -> RotatedSystem:
    if isinstance(model, NesbModel):
        return build_nesb(model, drive)
    if isinstance(model, CoupledSpinsModel):
        return build_coupled_spins(model, drive)
    if isinstance(model, KerrModel):
        return build_kerr(model, drive)
    raise TypeError(f"unknown model type {type(model).__name__}")


def coupling_operators(model: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Bath coupling operators (left, right); they are frame independent."""
    sys = build_rotated(model, DriveSpec(eta=0.0, omega_d=0.0))
    return sys.coupling_left, sys.coupling_right


def bare_hamiltonian(model: ModelSpec) -> np.ndarray:
    """Undriven lab-frame Hamiltonian H_S."""
    sys = build_rotated(model, DriveSpec(eta=0.0, omega_d=0.0))
    return sys.hamiltonian


def excitation_number(model: ModelSpec) -> np.ndarray:
    """Total excitation number operator N (integer spectrum, [N, H_S] = 0)."""
    if isinstance(model, NesbModel):
        sm = pauli_lowering()
        return sm.conj().T @ sm
    if isinstance(model, CoupledSpinsModel):
        sm = pauli_lowering()
        num = sm.conj().T @ sm
        eye = np.eye(2, dtype=complex)
        return tensor_product(num, eye) + tensor_product(eye, num)
    if isinstance(model, KerrModel):
        a = boson_annihilation(model.n_max)
        return a.conj().T @ a
    raise TypeError(f"unknown model type {type(model).__name__}")


def lab_frame_hamiltonian(model: ModelSpec, drive: DriveSpec, t: float) -> np.ndarray:
    """Time-periodic lab-frame Hamiltonian at time ``t``.

    H(t) = H_S - (eta/2) (exp(-i w_d t) A_l^dag + exp(+i w_d t) A_l)
    with the drive acting on the left coupling operator.
    """
    h = bare_hamiltonian(model)
    a_l, _ = coupling_operators(model)
    phase = np.exp(-1j * drive.omega_d * t)
    return h - 0.5 * drive.eta * (phase * a_l.conj().T + np.conj(phase) * a_l)
