"""Eigendecomposition contract: accuracy, ordering, signs, invariances."""

import numpy as np
import pytest

from rmtlab.eigensolve import eigh
from rmtlab.ensembles import EnsembleSpec, MatrixKind, sample_matrix


def random_plbm(n=128, seed=9):
    return sample_matrix(EnsembleSpec(MatrixKind.PLBM, n, 0.7, 1.0, seed), 0)


def test_scalar_matrix():
    dec = eigh(2.0 * np.eye(8))
    assert np.allclose(dec.eigenvalues, 2.0, atol=1e-14)
    gram = dec.eigenvectors.T @ dec.eigenvectors
    assert np.max(np.abs(gram - np.eye(8))) <= 1e-12


def test_diagonal_matrix():
    dec = eigh(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(dec.eigenvalues, [1.0, 2.0, 3.0], atol=1e-14)
    # permutation eigenvectors with positive leading entries
    expected = np.zeros((3, 3))
    expected[1, 0] = expected[2, 1] = expected[0, 2] = 1.0
    assert np.allclose(dec.eigenvectors, expected, atol=1e-14)


def test_orthonormality_and_residual_on_random_draw():
    m = random_plbm()
    dec = eigh(m)
    h = m.entries
    n = m.n_dim
    gram = dec.eigenvectors.T @ dec.eigenvectors
    assert np.max(np.abs(gram - np.eye(n))) <= 1e-9

    # independent residual oracle in extended precision
    h_l = h.astype(np.longdouble)
    v_l = dec.eigenvectors.astype(np.longdouble)
    w_l = dec.eigenvalues.astype(np.longdouble)
    resid = h_l @ v_l - v_l * w_l
    norms = np.sqrt(np.sum(resid * resid, axis=0))
    fro = np.sqrt(np.sum(h_l * h_l))
    scaled = norms / (fro + np.abs(w_l))
    assert float(np.max(scaled)) <= 1e-9


def test_trace_and_frobenius_identities():
    m = random_plbm(96, seed=12)
    h = m.entries
    dec = eigh(m)
    fro = np.linalg.norm(h)
    assert abs(np.trace(h) - dec.eigenvalues.sum()) <= 1e-8 * fro
    assert abs(np.sum(h * h) - np.sum(dec.eigenvalues ** 2)) <= 1e-8 * fro ** 2


def test_eigenvalues_nondecreasing():
    dec = eigh(random_plbm(64, seed=3))
    assert np.all(np.diff(dec.eigenvalues) >= 0.0)


def test_permutation_invariance_of_spectrum():
    m = random_plbm(64, seed=4)
    h = m.entries
    rng = np.random.default_rng(0)
    perm = rng.permutation(64)
    p = np.eye(64)[perm]
    dec_a = eigh(h)
    dec_b = eigh(p.T @ h @ p)
    fro = np.linalg.norm(h)
    assert np.max(np.abs(dec_a.eigenvalues - dec_b.eigenvalues)) <= 1e-9 * fro


def test_sign_convention():
    dec = eigh(random_plbm(64, seed=5))
    v = dec.eigenvectors
    lead = np.argmax(np.abs(v), axis=0)
    assert np.all(v[lead, np.arange(64)] > 0.0)


def test_non_finite_rejected():
    h = np.eye(4)
    h[1, 2] = h[2, 1] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        eigh(h)


def test_asymmetric_rejected():
    h = np.eye(4)
    h[0, 1] = 1e-3
    with pytest.raises(ValueError, match="symmetric"):
        eigh(h)


def test_results_read_only():
    dec = eigh(random_plbm(16, seed=6))
    with pytest.raises(ValueError):
        dec.eigenvalues[0] = 0.0
