"""Dense symmetric eigendecomposition with ordering and sign conventions.

The numerical kernel is LAPACK's symmetric solver via numpy.linalg.eigh; the
contract enforced here (ascending energies, orthonormal rows, deterministic
signs) is what the rest of the package relies on, not the provider.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oscbasis import BasisConfig, HamiltonianMatrix

__all__ = ["EigenSolution", "DiagonalizationError", "diagonalize"]


class DiagonalizationError(RuntimeError):
    """The eigensolver failed to converge on the given matrix."""


@dataclass(frozen=True)
class EigenSolution:
    """Energies in ascending order; row n of `vectors` holds the components
    of eigenstate n in the basis."""

    energies: np.ndarray
    vectors: np.ndarray
    config: BasisConfig

    def __post_init__(self):
        self.energies.flags.writeable = False
        self.vectors.flags.writeable = False


def diagonalize(h: HamiltonianMatrix) -> EigenSolution:
    """Full eigendecomposition of a symmetric Hamiltonian block.

    Energies come back sorted ascending (guaranteed by the symmetric LAPACK
    driver).  Each eigenvector row is rescaled so its largest-magnitude entry
    is positive, making the output deterministic; downstream projections rely
    only on orthonormality, so any fixed convention works.
    """
    a = np.asarray(h.entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("Hamiltonian block is not exactly symmetric")
    try:
        energies, columns = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise DiagonalizationError(f"eigensolver did not converge: {exc}") from exc
    vectors = columns.T.copy()
    lead = np.abs(vectors).argmax(axis=1)
    signs = np.sign(vectors[np.arange(vectors.shape[0]), lead])
    signs[signs == 0] = 1.0
    vectors *= signs[:, None]
    return EigenSolution(energies=energies, vectors=vectors, config=h.config)
