"""Dense and matrix-free complex Hermitian linear algebra.

Provides Kronecker assembly, full eigendecomposition, an iterative
lowest-k eigensolver (Lanczos with full reorthogonalization and
deflated restarts), and grouping of near-degenerate eigenvalues into
manifolds. All energies are in GHz throughout the package.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NumericError, ResourceError, ValidationError

HERMITICITY_ATOL = 1e-10
DEGENERACY_TOL_GHZ = 1e-9

# Dense Kronecker products beyond this many bytes are refused.
KRON_BUDGET_BYTES = 4 * 1024**3


@dataclass
class EigenSystem:
    """Eigenvalues sorted ascending with unit-norm eigenvectors.

    Attributes
    ----------
    values : (k,) real array
        Energies in GHz, ascending.
    vectors : (dim, k) complex array
        Eigenvectors as columns, phase-fixed so the largest-magnitude
        component of each column is real and positive.
    manifolds : list of (start, stop)
        Half-open index ranges grouping eigenvalues that are equal
        within the degeneracy tolerance; the ranges partition 0..k.
    """

    values: np.ndarray
    vectors: np.ndarray
    manifolds: list = field(default_factory=list)


class MatrixFreeOperator:
    """Hermitian linear operator given by its action on a vector."""

    def __init__(self, dimension, apply_fn):
        self.dimension = dimension
        self._apply = apply_fn

    def apply(self, vec):
        return self._apply(vec)


def kron(a, b, budget_bytes=KRON_BUDGET_BYTES):
    """Kronecker product with an explicit memory budget.

    Raises ResourceError if the result would exceed ``budget_bytes``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    out_bytes = a.shape[0] * a.shape[1] * b.shape[0] * b.shape[1] * 16
    if out_bytes > budget_bytes:
        raise ResourceError(
            f"kron result would need {out_bytes} bytes, budget is {budget_bytes}"
        )
    return np.kron(a, b)


def require_hermitian(m, atol=HERMITICITY_ATOL):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > atol:
        raise ValidationError(f"matrix is not Hermitian: max|M - M^H| = {dev:g}")
    return m


def fix_phase(vectors):
    """Make the largest-magnitude component of each column real positive."""
    vectors = np.array(vectors, dtype=complex)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if np.abs(pivot) > 0:
            col *= np.conj(pivot) / np.abs(pivot)
        vectors[:, j] = col
    return vectors


def group_degenerate(values, tol=DEGENERACY_TOL_GHZ):
    """Group ascending values into maximal runs with consecutive gaps <= tol.

    Returns a list of half-open (start, stop) index ranges.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    if np.any(np.diff(values) < -tol):
        raise ValidationError("values must be ascending")
    ranges = []
    start = 0
    for i in range(1, values.size):
        if values[i] - values[i - 1] > tol:
            ranges.append((start, i))
            start = i
    ranges.append((start, values.size))
    return ranges


def eigh_dense(h, degeneracy_tol=DEGENERACY_TOL_GHZ):
    """Full eigendecomposition of a Hermitian matrix.

    Validates Hermiticity, fixes eigenvector phases and attaches
    degeneracy manifolds.
    """
    h = require_hermitian(h)
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(
        values=values,
        vectors=fix_phase(vectors),
        manifolds=group_degenerate(values, degeneracy_tol),
    )


def _orthogonalize(w, basis):
    """Project ``w`` orthogonal to the columns of ``basis`` (two passes)."""
    if basis is not None and basis.shape[1]:
        for _ in range(2):
            w = w - basis @ (basis.conj().T @ w)
    return w


def _lanczos_sweep(op, start, n_steps, deflate, tol_abs):
    """One Lanczos run with full reorthogonalization.

    Returns converged Ritz pairs (residual below ``tol_abs``) plus the
    smallest unconverged Ritz value, used by the caller's stopping rule.
    """
    dim = op.dimension
    v = _orthogonalize(start, deflate)
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        return [], None
    v = v / nrm
    basis = [v]
    alphas, betas = [], []
    for _ in range(n_steps):
        w = op.apply(basis[-1])
        alphas.append(float(np.real(np.vdot(basis[-1], w))))
        vmat = np.column_stack(basis)
        w = _orthogonalize(w, deflate)
        w = _orthogonalize(w, vmat)
        beta = np.linalg.norm(w)
        if beta < tol_abs * 1e-2 or len(basis) >= dim:
            break
        betas.append(float(beta))
        basis.append(w / beta)

    m = len(alphas)
    if m == 0:
        return [], None
    tvals, tvecs = eigh_tridiagonal(np.array(alphas), np.array(betas[: m - 1]))
    beta_last = betas[m - 1] if len(betas) >= m else 0.0
    vmat = np.column_stack(basis[:m])
    converged, lowest_open = [], None
    for j in range(m):
        residual = abs(beta_last * tvecs[-1, j])
        if residual <= tol_abs:
            converged.append((tvals[j], vmat @ tvecs[:, j]))
        elif lowest_open is None or tvals[j] < lowest_open:
            lowest_open = tvals[j]
    return converged, lowest_open


def eig_lowest_k(
    op,
    k,
    seed=0,
    tol=1e-10,
    max_restarts=80,
    degeneracy_tol=DEGENERACY_TOL_GHZ,
):
    """Lowest-k eigenpairs of a Hermitian matrix-free operator.

    Lanczos with full reorthogonalization; converged eigenvectors are
    deflated and the iteration restarts from a fresh seeded random
    vector, which recovers degenerate multiplets one copy per restart.
    Deterministic for a fixed seed.
    """
    dim = op.dimension
    if k < 1 or k > dim:
        raise ValidationError(f"k={k} out of range for dimension {dim}")
    rng = np.random.default_rng(seed)
    n_steps = min(dim, max(2 * k + 30, 60))

    pairs = []  # (value, vector), kept ascending
    deflate = None
    scale = 1.0
    restarts = 0
    while True:
        if restarts >= max_restarts:
            raise NumericError(
                f"lowest-k solver did not settle after {restarts} restarts "
                f"({len(pairs)} of {k} pairs converged)"
            )
        restarts += 1
        start = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        new, lowest_open = _lanczos_sweep(op, start, n_steps, deflate, tol * scale)
        if not new:
            # stagnation: deepen the Krylov sweep before the next restart
            n_steps = min(dim, n_steps + n_steps // 2)
        for val, vec in new:
            vec = _orthogonalize(vec, deflate)
            nrm = np.linalg.norm(vec)
            if nrm < 1e-8:
                continue
            pairs.append((float(val), vec / nrm))
            pairs.sort(key=lambda p: p[0])
            deflate = np.column_stack([p[1] for p in pairs])
        if pairs:
            scale = max(1.0, max(abs(p[0]) for p in pairs))
        if len(pairs) >= dim:
            break
        if len(pairs) >= k and new:
            # Stop once a productive restart finds nothing strictly below
            # the k-th level; further copies of a degenerate manifold that
            # straddles k do not change the lowest-k set.
            thresh = pairs[k - 1][0] - degeneracy_tol
            found_lower = any(v < thresh for v, _ in new)
            open_lower = lowest_open is not None and lowest_open < thresh
            if not found_lower and not open_lower:
                break

    pairs = pairs[: min(k, len(pairs))]
    basis, _ = np.linalg.qr(np.column_stack([p[1] for p in pairs]))
    # Rayleigh-Ritz on the converged span cleans up degenerate mixing.
    hb = np.column_stack([op.apply(basis[:, j]) for j in range(basis.shape[1])])
    small = basis.conj().T @ hb
    small = 0.5 * (small + small.conj().T)
    svals, svecs = np.linalg.eigh(small)
    vectors = basis @ svecs

    residuals = hb @ svecs - vectors * svals
    worst = float(np.max(np.linalg.norm(residuals, axis=0)))
    if worst > 1e-8 * max(1.0, scale):
        raise NumericError(
            f"iterative eigensolver residual {worst:g} after {restarts} restarts"
        )
    return EigenSystem(
        values=svals,
        vectors=fix_phase(vectors),
        manifolds=group_degenerate(svals, degeneracy_tol),
    )
