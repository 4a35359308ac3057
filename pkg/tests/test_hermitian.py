import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antidist.hermitian import (
    MalformedInputError,
    NotPositiveDefiniteError,
    as_hermitian,
    hermitian_eigen,
    is_psd,
    min_eigenvalue,
    solve_hermitian_linear_system,
    trace,
)
from antidist.states import density, PureState


def random_hermitian(d, rng, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


@st.composite
def hermitians(draw, max_dim=8):
    d = draw(st.integers(1, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    scale = draw(st.sampled_from([1e-6, 1.0, 1e3]))
    return random_hermitian(d, np.random.default_rng(seed), scale)


def test_canonical_form_is_exactly_hermitian():
    rng = np.random.default_rng(0)
    h = random_hermitian(5, rng)
    h[1, 2] += 1e-14
    c = as_hermitian(h)
    assert np.array_equal(c, c.conj().T)
    assert np.all(c.diagonal().imag == 0)


@pytest.mark.parametrize(
    "bad",
    [
        np.array([[1.0, 1.0], [0.0, 1.0]]),
        np.array([[np.nan, 0], [0, 1]]),
        np.ones((2, 3)),
        np.array([[1j, 0], [0, 1]]),
    ],
)
def test_rejects_malformed(bad):
    with pytest.raises(MalformedInputError):
        hermitian_eigen(bad)


def test_identity_spectrum():
    np.testing.assert_array_equal(hermitian_eigen(np.eye(3)).eigenvalues, [1, 1, 1])


def test_diagonal_spectrum():
    np.testing.assert_allclose(hermitian_eigen(np.diag([5.0, -2.0])).eigenvalues, [-2, 5])


def test_paper_slack_spectrum(paper_states, paper_y):
    expected = [0.000000000780951, 0.000159290602031, 0.007593054347881, 0.991853848824242]
    w = hermitian_eigen(density(paper_states[0]) - paper_y).eigenvalues
    np.testing.assert_allclose(w, expected, rtol=0, atol=1e-6)


def test_min_eigenvalue_examples(paper_states, paper_y):
    assert min_eigenvalue(np.zeros((3, 3))) == 0
    assert min_eigenvalue(-np.eye(4)) == pytest.approx(-1, abs=1e-15)
    assert min_eigenvalue(density(paper_states[3]) - paper_y) == pytest.approx(0.000000000905010, abs=1e-8)


def test_is_psd_examples(paper_states, paper_y):
    assert is_psd(np.eye(3), 0)
    assert not is_psd(np.diag([1.0, -1e-6]), 1e-9)
    assert all(is_psd(density(s) - paper_y, 1e-9) for s in paper_states)
    with pytest.raises(ValueError):
        is_psd(np.eye(2), -1.0)


def test_trace_examples(paper_y):
    assert trace(np.eye(4)) == 4
    assert trace(np.zeros((2, 2))) == 0
    assert trace(paper_y) == pytest.approx(0.000393813028863, abs=1e-12)


def test_jacobi_agrees_with_lapack():
    rng = np.random.default_rng(7)
    for d in (2, 3, 4, 7, 12):
        h = random_hermitian(d, rng)
        np.testing.assert_allclose(hermitian_eigen(h).eigenvalues, np.linalg.eigvalsh(h), atol=1e-12)


def test_degenerate_and_clustered_spectra():
    rng = np.random.default_rng(3)
    q = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))[0]
    w = np.array([1, 1, 1, 1 + 1e-13, -2, -2])
    h = (q * w) @ q.conj().T
    spec = hermitian_eigen(h)
    np.testing.assert_allclose(spec.eigenvalues, np.sort(w), atol=1e-13)
    assert np.linalg.norm(h - spec.reconstruct()) <= 1e-10 * max(1, np.linalg.norm(h))


@settings(max_examples=60, deadline=None)
@given(hermitians())
def test_reconstruction_and_orthonormality(h):
    spec = hermitian_eigen(h)
    d = h.shape[0]
    norm = np.linalg.norm(h)
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    assert np.linalg.norm(h - spec.reconstruct()) <= 1e-10 * max(1.0, norm)
    v = spec.eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(d)).max() <= 1e-10
    assert abs(trace(h) - spec.eigenvalues.sum()) <= 1e-10 * max(1.0, norm)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_rank_one_projector_spectrum(d, seed):
    rng = np.random.default_rng(seed)
    s = PureState(rng.normal(size=d) + 1j * rng.normal(size=d))
    w = hermitian_eigen(density(s)).eigenvalues
    np.testing.assert_allclose(w, [0.0] * (d - 1) + [1.0], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(hermitians(max_dim=5), st.floats(0, 10))
def test_psd_monotone_under_shift(h, eps):
    h = h - min_eigenvalue(h) * np.eye(h.shape[0])  # PSD up to rounding
    h = h + 1e-9 * np.linalg.norm(h) * np.eye(h.shape[0])
    assert is_psd(h, 0)
    assert is_psd(h + eps * np.eye(h.shape[0]), 0)


def test_linear_solve_examples():
    b = np.arange(6.0).reshape(3, 2)
    np.testing.assert_array_equal(solve_hermitian_linear_system(np.eye(3), b), b)
    np.testing.assert_allclose(solve_hermitian_linear_system(np.diag([2.0, 4.0]), np.eye(2)), np.diag([0.5, 0.25]))


def test_linear_solve_forward_multiplication():
    rng = np.random.default_rng(11)
    for d in (3, 8, 16):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = a @ a.conj().T + d * np.eye(d)
        x0 = rng.normal(size=(d, 3)) + 1j * rng.normal(size=(d, 3))
        b = h @ x0
        x = solve_hermitian_linear_system(h, b)
        np.testing.assert_allclose(x, x0, atol=1e-9)
        assert np.linalg.norm(h @ x - b) <= 1e-10 * max(1, np.linalg.norm(b))


def test_linear_solve_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError):
        solve_hermitian_linear_system(np.diag([1.0, -1.0]), np.ones(2))
