"""Dense eigen-analysis helpers."""
import numpy as np
import pytest

from gossiplab.errors import NotSimple, SizeOverflow
from gossiplab.spectra import (
    eigenvalues, kron, left_eigenvector, multiset_distance, sort_spectrum,
    spectral_radius,
)


def test_sort_spectrum_order():
    vals = [1 + 1j, -2, 1 - 1j, 0.5, -2 + 0.1j]
    s = sort_spectrum(vals)
    assert np.array_equal(s.real, np.sort(s.real))
    # ties on the real axis break by imaginary part, conjugates lower first
    assert s[0] == -2 and s[1] == -2 + 0.1j
    assert s[-2] == 1 - 1j and s[-1] == 1 + 1j


def test_eigenvalues_directed_cycle():
    # three nodes in a directed ring, each hearing exactly one neighbor:
    # the in-degree weighted Laplacian is I minus a cyclic permutation,
    # so its spectrum is 1 minus the cube roots of unity
    p = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    lam = eigenvalues(np.eye(3) - p)
    expected = sort_spectrum(1.0 - np.exp(2j * np.pi * np.arange(3) / 3))
    assert np.max(np.abs(lam - expected)) < 1e-12


def test_eigenvalues_rejects_bad_matrices():
    with pytest.raises(ValueError):
        eigenvalues(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        eigenvalues(np.zeros((2, 2, 2)))


def test_spectral_radius():
    assert spectral_radius(np.diag([0.5, -3.0, 2.0])) == pytest.approx(3.0)
    assert spectral_radius(np.zeros((3, 3))) == 0.0


def test_left_eigenvector_uniform_for_doubly_stochastic():
    m = np.array([[0.5, 0.5, 0.0], [0.25, 0.5, 0.25], [0.25, 0.0, 0.75]])
    u = left_eigenvector(m, 1.0, mask=np.ones(3))
    assert np.allclose(u @ m, u, atol=1e-12)
    assert u.sum() == pytest.approx(1.0)
    assert u.dtype.kind == "f"


def test_left_eigenvector_known_stationary_weights():
    # row-stochastic chain: station weights solve u^T B = u^T, sum 1
    b = np.array([[0.0, 0.5, 0.5], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    u = left_eigenvector(b, 1.0, mask=np.ones(3))
    assert np.allclose(u, [0.4, 0.2, 0.4], atol=1e-12)


def test_left_eigenvector_default_normalization():
    m = np.diag([2.0, 1.0, 0.5])
    u = left_eigenvector(m, 2.0)
    # unit inner product with the matching right eigenvector
    assert abs(u @ np.array([1.0, 0.0, 0.0]) - 1.0) < 1e-12


def test_left_eigenvector_rejects_repeated_eigenvalue():
    with pytest.raises(NotSimple):
        left_eigenvector(np.eye(3), 1.0, mask=np.ones(3))


def test_left_eigenvector_rejects_absent_eigenvalue():
    with pytest.raises(ValueError):
        left_eigenvector(np.diag([0.1, 0.2]), 5.0)


def test_left_eigenvector_rejects_orthogonal_mask():
    m = np.diag([2.0, 1.0])
    with pytest.raises(ValueError):
        left_eigenvector(m, 2.0, mask=np.array([0.0, 1.0]))


def test_kron_matches_numpy_and_caps_size():
    a = np.arange(4.0).reshape(2, 2)
    b = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(kron(a, b), np.kron(a, b))
    with pytest.raises(SizeOverflow):
        kron(a, b, entry_cap=35)


def test_multiset_distance():
    s = np.array([1 + 1j, -2.0, 0.5])
    assert multiset_distance(s, s[::-1]) == 0.0
    shifted = s + 1e-9
    assert multiset_distance(s, shifted) == pytest.approx(1e-9, rel=1e-3)
    assert multiset_distance([0.0, 1.0], [0.0, 3.0]) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        multiset_distance([1.0], [1.0, 2.0])
