"""Particle-hole RDM entanglement witness and transition amplitudes.

The particle-hole RDM of an N-site triplet state is the 9N x 9N matrix
of expectation values of products of site-local level-transition
operators E_ab = |a><b|. Subtracting the state-projection contribution
yields the modified RDM, whose largest eigenvalue acts as a witness of
particle-hole condensation: it exceeds 1 only for correlated states
and is bounded by N/2.

Composite index convention: (site p, bra level a, ket level b) maps to
9 p + 3 a + b with levels ordered (|+1>, |0>, |-1>).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import apply_site_operator

NORM_ATOL = 1e-8
AMPLITUDE_FLOOR = 1e-12
BRIGHT_THRESHOLD = 1e-8


@dataclass
class PhRdm:
    """Particle-hole RDM (or its modified form) over composite indices."""

    n_sites: int
    matrix: np.ndarray


@dataclass
class ManifoldAmplitude:
    """One excited manifold's normalized microwave transition amplitude."""

    manifold: int
    energy: float
    amplitude: float
    representative: np.ndarray


@dataclass
class AmplitudeTable:
    rows: list

    def max_row(self):
        """Row with the largest amplitude; ties go to the lowest energy."""
        if not self.rows:
            raise ValidationError("amplitude table is empty")
        best = self.rows[0]
        for row in self.rows[1:]:
            if row.amplitude > best.amplitude:
                best = row
        return best


@dataclass
class CollectiveOperator:
    """One-body operator sum_pab c[p,a,b] |a><b|_p with unit-norm c."""

    n_sites: int
    coefficients: np.ndarray

    def apply(self, state):
        n = self.n_sites
        out = np.zeros_like(np.asarray(state, dtype=complex))
        for p in range(n):
            block = self.coefficients[9 * p : 9 * p + 9].reshape(3, 3)
            out += apply_site_operator(state, block, p, n)
        return out


@dataclass
class SqrtRelationReport:
    """Both sides of the sqrt(lambda) amplitude relation plus the
    fraction of the collective transition that lands on the ground state."""

    sqrt_lambda: float
    ground_amplitude: float
    ground_fraction: float


def _check_state(state, n):
    state = np.asarray(state, dtype=complex).reshape(-1)
    if state.shape[0] != 3**n:
        raise ValidationError(
            f"state has dimension {state.shape[0]}, expected {3 ** n}"
        )
    nrm = np.linalg.norm(state)
    if abs(nrm - 1.0) > NORM_ATOL:
        raise ValidationError(f"state norm is {nrm:.3e}, expected 1")
    return state


def _level_matrix(a, b):
    e = np.zeros((3, 3), dtype=complex)
    e[a, b] = 1.0
    return e


def _transition_columns(state, n):
    """Columns v[p,a,b] = E_ba |state> stacked as a 3^N x 9N matrix.

    The particle-hole RDM is the Gram matrix of these columns.
    """
    cols = np.empty((state.shape[0], 9 * n), dtype=complex)
    for p in range(n):
        for a in range(3):
            for b in range(3):
                cols[:, 9 * p + 3 * a + b] = apply_site_operator(
                    state, _level_matrix(b, a), p, n
                )
    return cols


def one_body_rdm(state, n):
    """Site-local blocks D_p[a, b] = <state| (|a><b|)_p |state>."""
    state = _check_state(state, n)
    t = state.reshape((3,) * n)
    blocks = np.empty((n, 3, 3), dtype=complex)
    for p in range(n):
        m = np.moveaxis(t, p, 0).reshape(3, -1)
        rho = m @ m.conj().T  # site density matrix rho[b, a']
        blocks[p] = rho.T  # <|a><b|> = rho[b, a]
    return blocks


def ph_rdm(state, n):
    """Particle-hole RDM over composite site/level-pair indices.

    Evaluated on the state vector via single-site operator applications,
    never through dense many-body operator products.
    """
    state = _check_state(state, n)
    cols = _transition_columns(state, n)
    return PhRdm(n_sites=n, matrix=cols.conj().T @ cols)


def modified_ph_rdm(g, d1):
    """Remove the state-projection contribution from the particle-hole RDM.

    Subtracts the product of one-body terms, which equals inserting the
    complement projector Q = I - |state><state| between the transition
    operators; the result is positive semidefinite.
    """
    n = g.n_sites
    if d1.shape != (n, 3, 3):
        raise ValidationError("one-body blocks do not match the RDM site count")
    u = np.empty(9 * n, dtype=complex)
    for p in range(n):
        u[9 * p : 9 * p + 9] = d1[p].T.reshape(-1)  # u[p,a,b] = D_p[b, a]
    return PhRdm(n_sites=n, matrix=g.matrix - np.outer(np.conj(u), u))


def lambda_witness(gt):
    """Largest eigenvalue and eigenvector of the modified RDM."""
    m = 0.5 * (gt.matrix + gt.matrix.conj().T)
    values, vectors = np.linalg.eigh(m)
    return float(values[-1]), vectors[:, -1]


def witness_for_state(state, n):
    """Convenience pipeline: state -> modified RDM -> (lambda, eigenvector)."""
    g = ph_rdm(state, n)
    gt = modified_ph_rdm(g, one_body_rdm(state, n))
    return lambda_witness(gt)


def _site_weight_diagonal(n):
    """Diagonal of sum_p (p+1) Sz_p in the product basis, used to fix a
    canonical basis inside degenerate manifolds (it reproduces the
    product basis in the non-interacting limit)."""
    ms = np.array([1.0, 0.0, -1.0])
    t = np.zeros((3,) * n)
    for p in range(n):
        shape = [1] * n
        shape[p] = 3
        t = t + ((p + 1) * ms).reshape(shape)
    return t.reshape(-1)


def transition_amplitudes(eig, t_op, ground, n=None, ground_manifold=None):
    """Normalized transition amplitudes per excited manifold.

    Within each degenerate manifold the eigenbasis is made canonical by
    re-diagonalizing the projected site-weighted Sz operator; the
    amplitude is the maximum |<basis vector| T |ground>| and the
    maximizing vector is kept as the manifold representative.
    """
    if n is None:
        n = round(np.log(eig.vectors.shape[0]) / np.log(3))
    ground = _check_state(ground, n)
    tg = t_op.apply(ground)
    w = _site_weight_diagonal(n)
    if ground_manifold is None:
        ground_manifold = 0
    rows = []
    for m_idx, (start, stop) in enumerate(eig.manifolds):
        if m_idx == ground_manifold:
            continue
        block = eig.vectors[:, start:stop]
        proj = (block.conj().T * w) @ block
        proj = 0.5 * (proj + proj.conj().T)
        _, rot = np.linalg.eigh(proj)
        basis = block @ rot
        amps = np.abs(basis.conj().T @ tg)
        best = int(np.argmax(amps))
        rows.append(
            ManifoldAmplitude(
                manifold=m_idx,
                energy=float(np.mean(eig.values[start:stop])),
                amplitude=float(amps[best]),
                representative=basis[:, best],
            )
        )
    return AmplitudeTable(rows=rows)


def max_amplitude_state(table, eig=None):
    """Representative state of the brightest manifold and its amplitude.

    Signals the "no bright state" condition when every amplitude is
    below the floor.
    """
    row = table.max_row()
    if row.amplitude < AMPLITUDE_FLOOR:
        raise ValidationError("no bright state: all transition amplitudes vanish")
    return row.representative, row.amplitude


def collective_operator(top_eigvec, n=None):
    """One-body transition operator built from a witness eigenvector.

    The RDM rows pair the bra level with the first composite index, so
    each site's 3x3 coefficient block is the transpose of the matching
    eigenvector slice; with this arrangement <e| T^+ Q T^ |e> equals the
    witness eigenvalue exactly.
    """
    vec = np.asarray(top_eigvec, dtype=complex).reshape(-1)
    if n is None:
        if vec.shape[0] % 9:
            raise ValidationError("eigenvector length is not a multiple of 9")
        n = vec.shape[0] // 9
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValidationError("zero eigenvector")
    vec = vec / nrm
    coeffs = np.empty_like(vec)
    for p in range(n):
        coeffs[9 * p : 9 * p + 9] = vec[9 * p : 9 * p + 9].reshape(3, 3).T.reshape(-1)
    return CollectiveOperator(n_sites=n, coefficients=coeffs)


def sqrt_relation_check(e, g, t_hat):
    """Compare sqrt(lambda) against the collective-operator matrix element.

    lambda is evaluated as <e| T^ Q T^ |e> with Q the complement of |e>;
    ground_fraction = |<g| T^ |e>|^2 / lambda measures how much of the
    collective transition strength goes through the ground state.
    """
    n = t_hat.n_sites
    e = _check_state(e, n)
    g = _check_state(g, n)
    te = t_hat.apply(e)
    qte = te - e * np.vdot(e, te)
    lam = float(np.real(np.vdot(qte, qte)))
    ground_amp = abs(np.vdot(g, te))
    fraction = ground_amp**2 / lam if lam > 0 else 0.0
    return SqrtRelationReport(
        sqrt_lambda=float(np.sqrt(max(lam, 0.0))),
        ground_amplitude=float(ground_amp),
        ground_fraction=float(fraction),
    )
