"""Dense complex operator algebra on small Hilbert spaces.

All operators are plain numpy arrays of complex dtype; the systems treated
here stay below a few tens of levels, so dense linear algebra is both
simpler and faster than anything sparse.

Basis conventions used throughout this package:

* spin-1/2 basis order is ``(|down>, |up>)`` -> indices ``(0, 1)``
* Fock basis order is ``(|0>, |1>, ..., |n_max - 1>)``
* composite spaces use Kronecker ordering, the left factor varying slowest
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EigenSystem",
    "boson_annihilation",
    "hermitian_eigendecompose",
    "matrix_element",
    "pauli_lowering",
    "require_hermitian",
    "tensor_product",
]

# absolute tolerance for Hermiticity checks
HERMITICITY_TOL = 1e-12

# absolute tolerance used to cluster degenerate eigenvalues
DEGENERACY_TOL = 1e-12


def require_hermitian(op: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    """Raise ``ValueError`` when ``op`` is not Hermitian within ``tol``."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    deviation = float(np.max(np.abs(op - op.conj().T))) if op.size else 0.0
    if deviation >= tol:
        raise ValueError(
            f"matrix is not Hermitian: max |A - A^dag| = {deviation:.3e} >= {tol:.1e}"
        )


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a Hermitian operator.

    ``energies`` are ascending and ``vectors[:, m]`` is the eigenvector of
    ``energies[m]``.  The gauge is fixed deterministically: the
    largest-magnitude component of every eigenvector is made real and
    positive, and members of a degenerate group are ordered by the basis
    index of that dominant component.
    """

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.energies.size)


def fix_eigenvector_gauge(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = np.array(vectors, dtype=complex, copy=True)
    for col in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, col])))
        pivot = out[k, col]
        mag = abs(pivot)
        if mag > 0.0:
            out[:, col] *= pivot.conjugate() / mag
            # kill the residual imaginary dust on the pivot itself
            out[k, col] = out[k, col].real
    return out


def order_degenerate_columns(keys: np.ndarray, vectors: np.ndarray,
                             atol: float) -> tuple[np.ndarray, np.ndarray]:
    """Reorder columns inside near-degenerate groups of ``keys``.

    Groups are runs of consecutive keys closer than ``atol``; within a group
    columns are sorted by the index of their dominant component, which makes
    the output independent of whatever basis the eigensolver picked.
    """
    keys = np.asarray(keys, dtype=float)
    vectors = np.asarray(vectors)
    dim = keys.size
    order = np.arange(dim)
    start = 0
    while start < dim:
        stop = start + 1
        while stop < dim and abs(keys[stop] - keys[stop - 1]) <= atol:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            dominant = [int(np.argmax(np.abs(vectors[:, c]))) for c in block]
            order[start:stop] = block[np.argsort(dominant, kind="stable")]
        start = stop
    return keys[order], vectors[:, order]


def hermitian_eigendecompose(h: np.ndarray,
                             tol: float = HERMITICITY_TOL) -> EigenSystem:
    """Diagonalize a Hermitian operator with a deterministic gauge.

    Raises ``ValueError`` if ``h`` deviates from Hermiticity by more than
    ``tol`` in any entry.
    """
    h = np.asarray(h, dtype=complex)
    require_hermitian(h, tol)
    energies, vectors = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(energies)))) if energies.size else 1.0
    energies, vectors = order_degenerate_columns(
        energies, vectors, DEGENERACY_TOL * scale)
    vectors = fix_eigenvector_gauge(vectors)
    return EigenSystem(energies=energies, vectors=vectors)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor varying slowest."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("tensor_product expects two matrices")
    return np.kron(a, b)


def pauli_lowering() -> np.ndarray:
    """Spin-1/2 lowering operator |down><up| in the (|down>, |up>) basis."""
    return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def boson_annihilation(n_max: int) -> np.ndarray:
    """Truncated bosonic annihilation operator on ``n_max`` Fock states.

    ``a|n> = sqrt(n)|n-1>``, so the nonzero entries sit one place above the
    diagonal and ``a^dag a`` has eigenvalues ``0 .. n_max - 1``.
    """
    if n_max < 2:
        raise ValueError(f"need at least two Fock states, got n_max={n_max}")
    return np.diag(np.sqrt(np.arange(1.0, n_max)), k=1).astype(complex)


def matrix_element(es: EigenSystem, op: np.ndarray, m: int, mp: int) -> complex:
    """Return ``<phi_m| op |phi_mp>`` in the eigenbasis ``es``."""
    dim = es.dim
    if not (0 <= m < dim and 0 <= mp < dim):
        raise IndexError(
            f"eigenstate index out of range: ({m}, {mp}) for dim {dim}")
    op = np.asarray(op, dtype=complex)
    if op.shape != (dim, dim):
        raise ValueError(f"operator shape {op.shape} does not match dim {dim}")
    return complex(es.vectors[:, m].conj() @ op @ es.vectors[:, mp])
