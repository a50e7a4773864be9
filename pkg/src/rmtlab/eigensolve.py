"""Full eigendecomposition of dense real symmetric matrices.

Backed by LAPACK's divide-and-conquer solver through numpy; the contract
(orthonormality and residual within 1e-9, ascending eigenvalues, fixed
eigenvector signs) is what this module owns and what the tests verify.
"""

from dataclasses import dataclass

import numpy as np

from .ensembles import SymmetricMatrix


class EigensolveError(RuntimeError):
    """Raised when the solver fails to converge."""


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column alpha pairs with eigenvalues[alpha]

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def n_dim(self) -> int:
        return self.eigenvalues.shape[0]


def eigh(matrix) -> EigenDecomposition:
    """All eigenpairs of a symmetric matrix, deterministically signed.

    Each eigenvector's largest-magnitude entry is made positive; the sign is
    irrelevant downstream but pins byte-level reproducibility.
    """
    h = matrix.entries if isinstance(matrix, SymmetricMatrix) else np.asarray(matrix, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.isfinite(h).all():
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(h, h.T):
        raise ValueError("matrix is not exactly symmetric")
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigensolveError(f"symmetric eigensolver failed to converge: {exc}") from exc
    n = w.shape[0]
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[lead, np.arange(n)])
    signs[signs == 0.0] = 1.0
    v = v * signs
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)
