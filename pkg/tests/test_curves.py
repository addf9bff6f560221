import numpy as np
import pytest

from curvecast import (
    DimensionMismatchError,
    FunctionalDataset,
    Grid,
    IngestError,
    ResolutionError,
    inner_product,
    l2_norm,
    load_curves_csv,
    make_fourier_basis,
    save_curves_csv,
    synthesize,
)


def test_grid_midpoints():
    grid = Grid(4)
    assert np.allclose(grid.points, [0.125, 0.375, 0.625, 0.875])
    assert grid.spacing == 0.25


def test_grid_rejects_nonpositive():
    with pytest.raises(ValueError):
        Grid(0)


def test_inner_product_constant():
    grid = Grid(32)
    ones = np.ones(32)
    assert inner_product(ones, ones, grid) == pytest.approx(1.0)
    assert l2_norm(2.0 * ones, grid) == pytest.approx(2.0)


def test_inner_product_shape_mismatch():
    grid = Grid(8)
    with pytest.raises(DimensionMismatchError):
        inner_product(np.ones(8), np.ones(9), grid)


def test_fourier_basis_orthonormal_to_machine_precision():
    # on the midpoint grid the discrete Gram of the first D rows is exactly
    # the identity as long as T >= 8 D
    grid = Grid(64)
    basis = make_fourier_basis(8, grid)
    gram = basis.values @ basis.values.T / grid.T
    assert np.abs(gram - np.eye(8)).max() < 1e-12


def test_fourier_resolution_guard():
    with pytest.raises(ResolutionError):
        make_fourier_basis(9, Grid(64))


def test_synthesize_round_trip():
    grid = Grid(48)
    basis = make_fourier_basis(5, grid)
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=(10, 5))
    data = synthesize(coeffs, basis)
    recovered = data.values @ basis.values.T / grid.T
    assert np.abs(recovered - coeffs).max() < 1e-12


def test_dataset_validation():
    grid = Grid(4)
    with pytest.raises(ValueError):
        FunctionalDataset(grid=grid, values=np.ones((2, 5)))
    bad = np.ones((2, 4))
    bad[1, 2] = np.nan
    with pytest.raises(ValueError):
        FunctionalDataset(grid=grid, values=bad)


def test_dataset_values_read_only():
    data = FunctionalDataset(grid=Grid(4), values=np.ones((2, 4)))
    with pytest.raises(ValueError):
        data.values[0, 0] = 2.0


def test_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(11)
    data = FunctionalDataset(grid=Grid(6), values=rng.normal(size=(5, 6)))
    path = tmp_path / "curves.csv"
    save_curves_csv(data, path)
    back = load_curves_csv(path)
    assert back.grid.T == 6
    assert np.array_equal(back.values, data.values)


def test_load_without_header(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("1.0,2.0\n3.0,4.0\n")
    data = load_curves_csv(path)
    assert data.n == 2 and data.T == 2
    assert np.array_equal(data.values, [[1.0, 2.0], [3.0, 4.0]])


def test_load_rejects_missing_cells(tmp_path):
    path = tmp_path / "holes.csv"
    path.write_text("t_1,t_2\n1.0,\n2.0,3.0\n")
    with pytest.raises(IngestError):
        load_curves_csv(path)


def test_load_rejects_ragged_rows(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(IngestError):
        load_curves_csv(path)
