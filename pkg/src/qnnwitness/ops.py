"""Operator zoo for three qubits in the charge basis.

Basis ordering is |q_A q_B q_C> -> index 4*q_A + 2*q_B + q_C, so qubit A is
the leftmost (most significant) tensor factor and |000> sits at index 0.
All operators are dense 8x8; at this dimension sparsity buys nothing.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, ImaginaryTraceError

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
E2 = np.eye(2)

QUBITS = ("A", "B", "C")

HERM_TOL = 1e-10


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the |q_A q_B q_C> index convention."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron3(a, b, c) -> np.ndarray:
    return np.kron(np.kron(np.asarray(a), np.asarray(b)), np.asarray(c))


def embed_pauli(axis: str, qubit: str) -> np.ndarray:
    """8x8 matrix with the named 2x2 Pauli at one tensor slot.

    axis is "x" or "z", qubit is "A", "B" or "C".
    """
    pauli = {"x": SX, "z": SZ}[axis]
    slot = QUBITS.index(qubit)
    factors = [E2, E2, E2]
    factors[slot] = pauli
    return kron3(*factors)


# The four measured correlation operators. All diagonal with entries +-1,
# so they commute pairwise and their expectations live in [-1, 1].
OBSERVABLES = {
    "AB": kron3(SZ, SZ, E2),
    "AC": kron3(SZ, E2, SZ),
    "BC": kron3(E2, SZ, SZ),
    "ABC": kron3(SZ, SZ, SZ),
}

OBSERVABLE_IDS = ("AB", "AC", "BC", "ABC")


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Re tr(rho obs), guarding against a corrupted (non-Hermitian) state."""
    tr = np.trace(rho @ obs)
    if abs(tr.imag) >= HERM_TOL:
        raise ImaginaryTraceError(
            f"imaginary trace {tr.imag:.3e} exceeds {HERM_TOL:.0e}")
    return float(tr.real)


def commutator(h: np.ndarray, rho: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    rho = np.asarray(rho)
    if h.shape[-1] != rho.shape[-2]:
        raise DimensionMismatch(f"cannot commute {h.shape} with {rho.shape}")
    return h @ rho - rho @ h


def dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.asarray(m), -1, -2).conj()


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return bool(np.max(np.abs(m - dagger(m))) < tol)
