import numpy as np
import pytest

from spinwitness import linalg
from spinwitness.errors import ResourceError, ValidationError


def random_hermitian(dim, rng):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (m + m.conj().T)


def test_kron_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 4))
    b = rng.standard_normal((2, 5))
    np.testing.assert_allclose(linalg.kron(a, b), np.kron(a, b))


def test_kron_budget_enforced():
    a = np.eye(300)
    with pytest.raises(ResourceError):
        linalg.kron(a, a, budget_bytes=10**6)


def test_require_hermitian():
    rng = np.random.default_rng(1)
    h = random_hermitian(6, rng)
    linalg.require_hermitian(h)
    with pytest.raises(ValidationError):
        linalg.require_hermitian(h + 1e-6 * 1j * np.eye(6))
    with pytest.raises(ValidationError):
        linalg.require_hermitian(np.ones((2, 3)))


def test_fix_phase_pivot_real_positive():
    rng = np.random.default_rng(2)
    v = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    v /= np.linalg.norm(v, axis=0)
    fixed = linalg.fix_phase(v)
    for j in range(3):
        pivot = fixed[int(np.argmax(np.abs(fixed[:, j]))), j]
        assert abs(pivot.imag) < 1e-14 and pivot.real > 0
        # phase change only: same ray
        assert abs(abs(np.vdot(v[:, j], fixed[:, j])) - 1.0) < 1e-12


def test_group_degenerate():
    vals = [0.0, 0.0, 0.0 + 5e-10, 1.0, 2.0, 2.0]
    assert linalg.group_degenerate(vals) == [(0, 3), (3, 4), (4, 6)]
    assert linalg.group_degenerate([]) == []
    with pytest.raises(ValidationError):
        linalg.group_degenerate([1.0, 0.0])


def test_eigh_dense_matches_numpy():
    rng = np.random.default_rng(3)
    h = random_hermitian(30, rng)
    eig = linalg.eigh_dense(h)
    np.testing.assert_allclose(eig.values, np.linalg.eigvalsh(h), atol=1e-12)
    # eigenvector residuals
    res = h @ eig.vectors - eig.vectors * eig.values
    assert np.max(np.abs(res)) < 1e-10
    assert eig.manifolds[0] == (0, 1)


def test_eig_lowest_k_matches_dense():
    rng = np.random.default_rng(4)
    dim, k = 200, 8
    h = random_hermitian(dim, rng)
    op = linalg.MatrixFreeOperator(dim, lambda v: h @ v)
    eig = linalg.eig_lowest_k(op, k, seed=11)
    exact = np.linalg.eigvalsh(h)[:k]
    np.testing.assert_allclose(eig.values, exact, atol=1e-8)
    res = h @ eig.vectors - eig.vectors * eig.values
    assert np.max(np.linalg.norm(res, axis=0)) < 1e-7


def test_eig_lowest_k_degenerate_multiplets():
    # block-diagonal spectrum with a 4-fold degenerate ground level
    rng = np.random.default_rng(5)
    diag = np.concatenate([np.full(4, -2.0), np.linspace(-1.0, 3.0, 60)])
    q, _ = np.linalg.qr(
        rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    )
    h = (q * diag) @ q.conj().T
    op = linalg.MatrixFreeOperator(64, lambda v: h @ v)
    eig = linalg.eig_lowest_k(op, 6, seed=0)
    np.testing.assert_allclose(eig.values[:4], -2.0, atol=1e-8)
    assert eig.manifolds[0] == (0, 4)


def test_eig_lowest_k_deterministic():
    rng = np.random.default_rng(6)
    h = random_hermitian(80, rng)
    op = linalg.MatrixFreeOperator(80, lambda v: h @ v)
    a = linalg.eig_lowest_k(op, 5, seed=123)
    b = linalg.eig_lowest_k(op, 5, seed=123)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.vectors, b.vectors)


def test_eig_lowest_k_validates_k():
    op = linalg.MatrixFreeOperator(4, lambda v: v)
    with pytest.raises(ValidationError):
        linalg.eig_lowest_k(op, 0)
    with pytest.raises(ValidationError):
        linalg.eig_lowest_k(op, 5)
