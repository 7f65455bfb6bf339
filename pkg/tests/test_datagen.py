import numpy as np
import pytest

from dpcp.datagen import (
    Dataset,
    basis_path,
    random_subspace,
    read_basis_csv,
    read_dataset_csv,
    synthesize,
    unit_sphere_sample,
    write_dataset_csv,
)
from dpcp.numerics import orthonormal_complement, principal_angles


def test_sphere_columns_unit_norm():
    x = unit_sphere_sample(5, 40, seed=0)
    assert np.allclose(np.linalg.norm(x, axis=0), 1.0, atol=1e-12)


def test_sphere_reproducible():
    a = unit_sphere_sample(4, 17, seed=99)
    b = unit_sphere_sample(4, 17, seed=99)
    assert np.array_equal(a, b)
    c = unit_sphere_sample(4, 17, seed=100)
    assert not np.array_equal(a, c)


def test_sphere_mean_abs_first_coordinate():
    # Monte-Carlo check of the hemisphere-height constant c_3 = 1/2
    x = unit_sphere_sample(3, 100_000, seed=1)
    assert abs(np.mean(np.abs(x[0])) - 0.5) < 0.01


def test_subspace_orthonormal():
    B = random_subspace(7, 3, seed=2)
    assert np.allclose(B.T @ B, np.eye(3), atol=1e-12)


def test_subspace_full_dimension_is_orthogonal_matrix():
    B = random_subspace(4, 4, seed=3)
    assert np.allclose(B @ B.T, np.eye(4), atol=1e-12)


def test_subspaces_from_different_seeds_differ():
    B1 = random_subspace(6, 2, seed=4)
    B2 = random_subspace(6, 2, seed=5)
    assert principal_angles(B1, B2).max() > 1e-3


def test_synthesize_noise_free_inliers_on_subspace():
    ds = synthesize(D=8, d=3, N=50, M=20, sigma=0.0, seed=6)
    comp = orthonormal_complement(ds.true_basis, 8)
    dist = np.linalg.norm(comp.T @ ds.inliers, axis=0)
    assert dist.max() <= 1e-12


def test_synthesize_label_counts():
    ds = synthesize(D=6, d=2, N=33, M=11, sigma=0.0, seed=7)
    assert int(ds.labels.sum()) == 33
    assert ds.labels.size == 44
    assert ds.data.shape == (6, 44)


def test_synthesize_noise_std_in_complement():
    ds = synthesize(D=10, d=5, N=2000, M=0, sigma=0.1, seed=8)
    comp = orthonormal_complement(ds.true_basis, 10)
    residues = comp.T @ ds.inliers
    assert abs(residues.std() - 0.1) < 0.01


def test_synthesize_noise_stays_in_complement():
    ds = synthesize(D=7, d=4, N=40, M=10, sigma=0.3, seed=9)
    # removing the complement component must land exactly on the sphere
    proj = ds.true_basis @ (ds.true_basis.T @ ds.inliers)
    assert np.allclose(np.linalg.norm(proj, axis=0), 1.0, atol=1e-9)


def test_synthesize_inlier_rank():
    ds = synthesize(D=9, d=4, N=30, M=5, sigma=0.0, seed=10)
    assert np.linalg.matrix_rank(ds.inliers) == 4


def test_synthesize_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        synthesize(D=5, d=6, N=10, M=2, sigma=0.0, seed=0)
    with pytest.raises(ValueError):
        synthesize(D=5, d=2, N=2, M=2, sigma=0.0, seed=0)


def test_synthesize_warns_on_too_few_outliers():
    with pytest.warns(UserWarning):
        synthesize(D=10, d=2, N=20, M=3, sigma=0.0, seed=0)


def test_column_order_is_seeded_permutation():
    ds1 = synthesize(D=5, d=2, N=10, M=5, sigma=0.0, seed=11)
    ds2 = synthesize(D=5, d=2, N=10, M=5, sigma=0.0, seed=11)
    assert np.array_equal(ds1.data, ds2.data)
    assert np.array_equal(ds1.labels, ds2.labels)
    # labels are genuinely interleaved for this seed, not a block
    assert ds1.labels.min() == 0 and ds1.labels.max() == 1


def test_csv_round_trip(tmp_path):
    ds = synthesize(D=4, d=2, N=12, M=6, sigma=0.05, seed=12)
    path = str(tmp_path / "data.csv")
    write_dataset_csv(ds, path)
    data, labels = read_dataset_csv(path)
    assert np.array_equal(labels, ds.labels)
    assert np.array_equal(data, ds.data)  # .17g round-trips doubles exactly
    basis = read_basis_csv(basis_path(path))
    assert np.array_equal(basis, ds.true_basis)


def test_read_rejects_missing_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_dataset_csv(str(path))
