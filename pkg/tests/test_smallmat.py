import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from repeaterc.smallmat import (
    ConvergenceError,
    as_matrix,
    from_pairs,
    hermitian_eigen,
    mat_sqrt_psd,
    partial_trace,
    tensor,
    to_pairs,
)
import repeaterc.smallmat as smallmat

from conftest import random_density

SX = np.array([[0, 1], [1, 0]])
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0]) / np.sqrt(2)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def hermitian_from(re, im):
    z = re + 1j * im
    return z + z.conj().T


# -- tensor -----------------------------------------------------------------


def test_tensor_identity():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_projectors():
    p0 = np.diag([1, 0])
    assert np.array_equal(tensor(p0, p0), np.diag([1, 0, 0, 0]))


def test_tensor_xx_fixes_phi_plus():
    assert np.allclose(tensor(SX, SX) @ PHI_PLUS, PHI_PLUS, atol=1e-15)


def test_tensor_matches_kron_on_rectangular():
    a = np.arange(6).reshape(2, 3) + 1j
    b = np.arange(2).reshape(2, 1)
    assert np.array_equal(tensor(a, b), np.kron(a, b))


@given(arrays(float, (2, 2), elements=finite), arrays(float, (2, 2), elements=finite))
def test_trace_of_tensor_is_product_of_traces(a, b):
    assert np.trace(tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b), abs=1e-9)


# -- partial trace ----------------------------------------------------------


def test_partial_trace_of_bell_is_maximally_mixed():
    assert np.allclose(partial_trace(np.outer(PHI_PLUS, PHI_PLUS), 1), np.eye(2) / 2)


def test_partial_trace_of_product():
    assert np.allclose(partial_trace(np.diag([1, 0, 0, 0]), 2), np.diag([1, 0]))


def test_partial_trace_of_conditional_watched_state():
    # (|00> + 1/2 |11>) normalized: squared amplitudes (1, 1/4) / (5/4)
    psi = np.array([1, 0, 0, 0.5]) / np.sqrt(1.25)
    assert np.allclose(partial_trace(np.outer(psi, psi), 1), np.diag([0.8, 0.2]), atol=1e-15)


def test_partial_trace_keeps_the_right_qubit():
    a = np.array([[0.7, 0.1j], [-0.1j, 0.3]])
    b = np.array([[0.2, 0.05], [0.05, 0.8]])
    rho = tensor(a, b)
    assert np.allclose(partial_trace(rho, 1), a)
    assert np.allclose(partial_trace(rho, 2), b)


def test_partial_trace_rejects_wrong_shape():
    with pytest.raises(ValueError):
        partial_trace(np.eye(2), 1)
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), 3)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_partial_trace_of_tensor_recovers_factor(seed):
    rng = np.random.default_rng(seed)
    ra = random_density(rng, 2)
    rb = 2.5 * random_density(rng, 2)
    assert np.allclose(partial_trace(tensor(ra, rb), 1), ra * np.trace(rb), atol=1e-12)


def test_partial_trace_preserves_trace_and_hermiticity(rng):
    for _ in range(20):
        rho = random_density(rng)
        for keep in (1, 2):
            r = partial_trace(rho, keep)
            assert np.trace(r) == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(r, r.conj().T, atol=1e-15)


# -- eigensolver ------------------------------------------------------------


def test_eigen_diagonal():
    assert np.allclose(hermitian_eigen(np.diag([0.25, 0.75])).eigenvalues, [0.25, 0.75])


def test_eigen_pauli_x():
    assert np.allclose(hermitian_eigen(SX).eigenvalues, [-1, 1], atol=1e-15)


def test_eigen_orthogonal_projector_mixture():
    rho = 0.5 * np.outer(PSI_PLUS, PSI_PLUS) + 0.5 * np.diag([1, 0, 0, 0])
    assert np.allclose(hermitian_eigen(rho).eigenvalues, [0, 0, 0.5, 0.5], atol=1e-14)


def test_eigen_ascending_and_matches_numpy(rng):
    for n in (1, 2, 3, 4, 8):
        for _ in range(25):
            h = hermitian_from(rng.normal(size=(n, n)), rng.normal(size=(n, n)))
            w = hermitian_eigen(h).eigenvalues
            assert np.all(np.diff(w) >= 0)
            assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-11)


@settings(max_examples=200)
@given(arrays(float, (4, 4), elements=finite), arrays(float, (4, 4), elements=finite))
def test_eigen_reconstruction_and_orthonormality(re, im):
    h = hermitian_from(re, im)
    eig = hermitian_eigen(h)
    v = eig.eigenvectors
    assert np.linalg.norm(eig.reconstruct() - h) < 1e-10 * max(1.0, np.linalg.norm(h))
    assert np.linalg.norm(v.conj().T @ v - np.eye(4)) < 1e-10


def test_eigen_degenerate_spectrum():
    eig = hermitian_eigen(np.eye(4))
    assert np.allclose(eig.eigenvalues, 1)
    assert np.linalg.norm(eig.reconstruct() - np.eye(4)) < 1e-12


def test_eigen_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigen(np.array([[0, 1], [0, 0]]))


def test_eigen_reports_non_convergence(monkeypatch):
    monkeypatch.setattr(smallmat, "JACOBI_MAX_SWEEPS", 0)
    with pytest.raises(ConvergenceError):
        hermitian_eigen(SX)


def test_as_matrix_rejects_non_finite():
    with pytest.raises(ValueError):
        as_matrix([[1, np.nan], [0, 1]])


def test_pairs_round_trip():
    m = np.array([[1 + 2j, 3], [4j, -5]])
    pairs = to_pairs(m)
    assert pairs[0] == (1.0, 2.0) and pairs[2] == (0.0, 4.0)
    assert np.array_equal(from_pairs(2, 2, pairs), m)
    with pytest.raises(ValueError):
        from_pairs(2, 2, pairs[:3])


# -- PSD square root ----------------------------------------------------------


def test_sqrt_identity():
    assert np.allclose(mat_sqrt_psd(np.eye(4)), np.eye(4))


def test_sqrt_diagonal():
    assert np.allclose(mat_sqrt_psd(np.diag([4, 9, 0, 1])), np.diag([2, 3, 0, 1]), atol=1e-14)


def test_sqrt_scalar_matrix():
    assert np.allclose(mat_sqrt_psd(np.eye(2) / 2), np.eye(2) / np.sqrt(2))


def test_sqrt_clamps_roundoff_negatives():
    root = mat_sqrt_psd(np.diag([1.0, -5e-11]))
    assert np.allclose(root, np.diag([1.0, 0.0]))


def test_sqrt_rejects_indefinite():
    with pytest.raises(ValueError):
        mat_sqrt_psd(np.diag([1.0, -1e-6]))


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_sqrt_of_square_recovers_psd(seed):
    rng = np.random.default_rng(seed)
    x = random_density(rng, 4) * rng.uniform(0.1, 3.0)
    root = mat_sqrt_psd(x @ x)
    assert np.linalg.norm(root - x) < 1e-8
    assert np.linalg.norm(root @ root - x @ x) < 1e-8


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_sqrt_squares_back_for_singular_input(seed, rank):
    # sqrt is only sqrt(eps)-accurate near zero eigenvalues, so check root^2
    rng = np.random.default_rng(seed)
    h = random_density(rng, 4, rank)
    root = mat_sqrt_psd(h)
    assert np.linalg.norm(root @ root - h) < 1e-8
    assert np.linalg.eigvalsh(root).min() > -1e-8
