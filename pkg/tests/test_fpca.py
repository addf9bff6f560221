import numpy as np
import pytest

from curvecast import (
    FunctionalDataset,
    Grid,
    InsufficientDataError,
    eigensystem,
    l2_norm,
    make_fourier_basis,
    pve_dimension,
    reconstruct,
    sample_covariance_kernel,
    sample_mean,
    scores,
    synthesize,
)


def rank3_dataset(T=48):
    """Exact-rank dataset with known component variances 4, 1, 0."""
    grid = Grid(T)
    basis = make_fourier_basis(3, grid)
    coeffs = np.array(
        [[2.0, 1.0, 0.0], [-2.0, 1.0, 0.0], [2.0, -1.0, 0.0], [-2.0, -1.0, 0.0]]
    )
    return synthesize(coeffs, basis), basis


def test_sample_mean_hand():
    data = FunctionalDataset(grid=Grid(2), values=np.array([[1.0, 3.0], [3.0, 1.0]]))
    assert np.array_equal(sample_mean(data), [2.0, 2.0])


def test_covariance_kernel_hand():
    data = FunctionalDataset(grid=Grid(2), values=np.array([[1.0, 3.0], [3.0, 1.0]]))
    kernel = sample_covariance_kernel(data)
    assert np.allclose(kernel, [[1.0, -1.0], [-1.0, 1.0]])


def test_covariance_needs_two_curves():
    data = FunctionalDataset(grid=Grid(2), values=np.array([[1.0, 2.0]]))
    with pytest.raises(InsufficientDataError):
        sample_covariance_kernel(data)


def test_known_spectrum():
    data, basis = rank3_dataset()
    eig = eigensystem(data, 3)
    assert np.allclose(eig.eigenvalues, [4.0, 1.0, 0.0], atol=1e-10)
    # leading eigenfunctions match the generating basis up to sign
    for row, ref in zip(eig.eigenfunctions[:2], basis.values[:2]):
        align = abs(float(row @ ref) / data.grid.T)
        assert align == pytest.approx(1.0, abs=1e-8)


def test_eigenfunctions_orthonormal(noise_dataset):
    data = noise_dataset(n=40, T=32, seed=5)
    eig = eigensystem(data, 10)
    gram = eig.eigenfunctions @ eig.eigenfunctions.T / data.grid.T
    assert np.abs(gram - np.eye(10)).max() < 1e-8


def test_score_covariance_is_diagonal(noise_dataset):
    data = noise_dataset(n=60, T=32, seed=9)
    eig = eigensystem(data, 8)
    smat = scores(data, eig).scores
    assert np.abs(smat.mean(axis=0)).max() < 1e-10
    cov = smat.T @ smat / data.n
    assert np.allclose(cov, np.diag(eig.eigenvalues), atol=1e-8)


def test_variance_decomposition(noise_dataset):
    data = noise_dataset(n=30, T=24, seed=2)
    full = min(data.n - 1, data.T)
    eig = eigensystem(data, full)
    assert eig.eigenvalues.sum() == pytest.approx(eig.total_variance, abs=1e-10)
    assert eig.tail_variance() == pytest.approx(0.0, abs=1e-10)


def test_reconstruction_error_equals_tail(noise_dataset):
    data = noise_dataset(n=40, T=32, seed=4)
    eig = eigensystem(data, 5)
    smat = scores(data, eig)
    approx = reconstruct(smat, eig)
    err = np.mean([l2_norm(r, data.grid) ** 2 for r in data.values - approx.values])
    assert err == pytest.approx(eig.tail_variance(), abs=1e-8)


def test_exact_rank_reconstruction():
    data, _ = rank3_dataset()
    eig = eigensystem(data, 2)
    approx = reconstruct(scores(data, eig), eig)
    assert np.abs(approx.values - data.values).max() < 1e-8


def test_truncate_matches_smaller_fit(noise_dataset):
    data = noise_dataset(n=25, T=24, seed=8)
    big = eigensystem(data, 6)
    small = eigensystem(data, 2)
    cut = big.truncate(2)
    assert np.allclose(cut.eigenvalues, small.eigenvalues, atol=1e-12)
    assert np.allclose(cut.eigenfunctions, small.eigenfunctions, atol=1e-12)
    assert cut.total_variance == small.total_variance


def test_eigensystem_determinism(noise_dataset):
    data = noise_dataset(n=30, T=24, seed=3)
    a = eigensystem(data, 4)
    b = eigensystem(data, 4)
    assert np.array_equal(a.eigenfunctions, b.eigenfunctions)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)


def test_sign_convention(noise_dataset):
    data = noise_dataset(n=30, T=24, seed=6)
    eig = eigensystem(data, 4)
    for row in eig.eigenfunctions:
        assert row[int(np.argmax(np.abs(row)))] > 0.0


def test_dimension_bounds(noise_dataset):
    data = noise_dataset(n=10, T=24, seed=1)
    with pytest.raises(ValueError):
        eigensystem(data, 0)
    with pytest.raises(ValueError):
        eigensystem(data, 10)  # exceeds n - 1


def test_pve_dimension_thresholds():
    data, _ = rank3_dataset()
    # variance split is 4 / 1 / 0, so one component explains exactly 80%
    assert pve_dimension(data, 0.8) == 1
    assert pve_dimension(data, 0.8 + 1e-6) == 2
    assert pve_dimension(data, 1.0) == 2
    with pytest.raises(ValueError):
        pve_dimension(data, 0.0)
    with pytest.raises(ValueError):
        pve_dimension(data, 1.2)
