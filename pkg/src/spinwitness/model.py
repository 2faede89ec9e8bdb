"""Triplet-spin model assembly.

Spin-1 operators, site embeddings into the 3^N product space,
zero-field and magnetic dipole Hamiltonians, the microwave transition
operator, chain and two-row geometries, and Gaussian noise channels.

Conventions: hbar = 1, energies in GHz, positions in Angstrom. The
dipole coupling is J(r) = kappa / r^3 with r in nm and kappa in
GHz nm^3; the default kappa is the SI evaluation of the point-dipole
prefactor for two electron spins.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ValidationError

ZFS_DEFAULT_GHZ = 2.87
DIPOLE_KAPPA_GHZ_NM3 = 0.05204
SPACING_DEFAULT_ANGSTROM = 5.125

# Largest site count for which dense 3^N x 3^N operators are built.
DENSE_SITE_LIMIT = 7

MIN_SITE_DISTANCE_ANGSTROM = 1e-3

_ANGSTROM_PER_NM = 10.0


@dataclass
class SpinGeometry:
    """Site positions (Angstrom) and per-site zero-field splittings (GHz)."""

    positions: np.ndarray
    zfs: np.ndarray

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.zfs = np.atleast_1d(np.asarray(self.zfs, dtype=float))
        n = self.positions.shape[0]
        if n < 1 or self.positions.shape[1] != 3:
            raise ValidationError("positions must be an (N, 3) array with N >= 1")
        if self.zfs.shape != (n,):
            raise ValidationError("zfs must provide one D value per site")
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(self.positions[i] - self.positions[j]) <= 0.0:
                    raise ValidationError(f"sites {i} and {j} coincide")

    @property
    def n_sites(self):
        return self.positions.shape[0]


@dataclass
class ModelParams:
    d0: float = ZFS_DEFAULT_GHZ
    kappa: float = DIPOLE_KAPPA_GHZ_NM3
    spacing: float = SPACING_DEFAULT_ANGSTROM

    def __post_init__(self):
        if self.d0 <= 0:
            raise ValidationError("d0 must be positive")
        if self.kappa < 0:
            raise ValidationError("kappa must be non-negative")
        if self.spacing <= 0:
            raise ValidationError("spacing must be positive")


@dataclass
class MicrowaveSpec:
    """Microwave drive parameters; b1 = 1 gives amplitudes normalized to
    a single-spin |0> -> |+-1> matrix element of 1."""

    b1: float = 1.0
    phase: float = 0.0
    frequency: float = 0.0

    def __post_init__(self):
        if self.b1 <= 0:
            raise ValidationError("b1 must be positive")


@dataclass
class NoiseSpec:
    """Gaussian noise widths: sigma_d on zero-field D (GHz), sigma_r on
    each position coordinate (Angstrom)."""

    sigma_d: float = 0.0
    sigma_r: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_d < 0 or self.sigma_r < 0:
            raise ValidationError("noise widths must be non-negative")


class ManyBodyOperator:
    """Hermitian operator on the 3^N product space.

    Materialized dense for N <= DENSE_SITE_LIMIT, otherwise held as a
    sum of one- and two-site terms applied matrix-free.
    """

    def __init__(self, n_sites, site_terms=(), pair_terms=(), dense=None):
        self.n_sites = n_sites
        self.dimension = 3**n_sites
        self.site_terms = list(site_terms)  # (site, 3x3 matrix)
        self.pair_terms = list(pair_terms)  # (i, j, 9x9 matrix)
        self._dense = dense

    @property
    def is_dense(self):
        return self._dense is not None

    def to_dense(self):
        if self._dense is None:
            self._dense = _assemble_dense(self.n_sites, self.site_terms, self.pair_terms)
        return self._dense

    def apply(self, vec):
        if self._dense is not None:
            return self._dense @ vec
        out = np.zeros(self.dimension, dtype=complex)
        for site, op3 in self.site_terms:
            out += apply_site_operator(vec, op3, site, self.n_sites)
        for i, j, op9 in self.pair_terms:
            out += apply_pair_operator(vec, op9, i, j, self.n_sites)
        return out


def spin1_operators():
    """Spin-1 matrices (Sx, Sy, Sz) in the (|+1>, |0>, |-1>) basis."""
    s = 1.0 / np.sqrt(2.0)
    sx = np.array([[0, s, 0], [s, 0, s], [0, s, 0]], dtype=complex)
    sy = np.array([[0, -1j * s, 0], [1j * s, 0, -1j * s], [0, 1j * s, 0]], dtype=complex)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sx, sy, sz


def single_site_h(d):
    """Zero-field Hamiltonian D (Sz^2 - S^2 / 3) of a single triplet."""
    _, _, sz = spin1_operators()
    s2 = 2.0 * np.eye(3, dtype=complex)  # S(S+1) with S = 1
    return d * (sz @ sz - s2 / 3.0)


def apply_site_operator(vec, op3, site, n):
    """Apply a 3x3 operator at one site of an N-site product-state vector."""
    t = np.asarray(vec, dtype=complex).reshape((3,) * n)
    t = np.tensordot(np.asarray(op3, dtype=complex), t, axes=([1], [site]))
    return np.moveaxis(t, 0, site).reshape(-1)


def apply_pair_operator(vec, op9, site_i, site_j, n):
    """Apply a 9x9 two-site operator (acting on sites i then j) matrix-free."""
    t = np.asarray(vec, dtype=complex).reshape((3,) * n)
    # kron layout: reshape axes are (i_out, j_out, i_in, j_in)
    op4 = np.asarray(op9, dtype=complex).reshape(3, 3, 3, 3)
    t = np.tensordot(op4, t, axes=([2, 3], [site_i, site_j]))
    return np.moveaxis(t, [0, 1], [site_i, site_j]).reshape(-1)


def _embed_dense_site(op3, site, n):
    left = np.eye(3**site, dtype=complex)
    right = np.eye(3 ** (n - site - 1), dtype=complex)
    return linalg.kron(linalg.kron(left, np.asarray(op3, dtype=complex)), right)


def _embed_dense_pair(op9, site_i, site_j, n):
    """Embed a 9x9 two-site operator by expanding its first factor in the
    |a><b| basis: op9 = sum_ab E_ab (x) M_ab."""
    op9 = np.asarray(op9, dtype=complex)
    dim = 3**n
    h = np.zeros((dim, dim), dtype=complex)
    for a in range(3):
        for b in range(3):
            e_ab = np.zeros((3, 3), dtype=complex)
            e_ab[a, b] = 1.0
            m_ab = op9[3 * a : 3 * a + 3, 3 * b : 3 * b + 3]
            left = np.eye(3**site_i, dtype=complex)
            mid = np.eye(3 ** (site_j - site_i - 1), dtype=complex)
            right = np.eye(3 ** (n - site_j - 1), dtype=complex)
            term = linalg.kron(left, e_ab)
            term = linalg.kron(term, mid)
            term = linalg.kron(term, m_ab)
            h += linalg.kron(term, right)
    return h


def _assemble_dense(n, site_terms, pair_terms):
    dim = 3**n
    h = np.zeros((dim, dim), dtype=complex)
    for site, op3 in site_terms:
        h += _embed_dense_site(op3, site, n)
    for i, j, op9 in pair_terms:
        h += _embed_dense_pair(op9, i, j, n)
    return h


def embed(op3, site, n):
    """I x ... x op3 x ... x I with op3 at position ``site``."""
    if not 0 <= site < n:
        raise ValidationError(f"site {site} out of range for {n} sites")
    op = ManyBodyOperator(n, site_terms=[(site, np.asarray(op3, dtype=complex))])
    if n <= DENSE_SITE_LIMIT:
        op.to_dense()
    return op


def dipole_coupling(kappa, r_angstrom):
    """Point-dipole prefactor J(r) = kappa / r^3, r converted to nm."""
    r_nm = r_angstrom / _ANGSTROM_PER_NM
    return kappa / r_nm**3


def _dipole_pair_matrix(r_vec, kappa):
    """9x9 dipole Hamiltonian for one pair given its displacement (Angstrom)."""
    r = np.linalg.norm(r_vec)
    if r < MIN_SITE_DISTANCE_ANGSTROM:
        raise ValidationError("coincident sites in dipole coupling")
    unit = np.asarray(r_vec, dtype=float) / r
    sx, sy, sz = spin1_operators()
    spins = (sx, sy, sz)
    sdots = sum(np.kron(s, s) for s in spins)
    sn = sum(u * s for u, s in zip(unit, spins))
    h9 = dipole_coupling(kappa, r) * (sdots - 3.0 * np.kron(sn, sn))
    return h9


def dipole_h(geom, i, j, kappa):
    """Magnetic dipole interaction between sites i and j."""
    if i == j:
        raise ValidationError("dipole term requires two distinct sites")
    n = geom.n_sites
    h9 = _dipole_pair_matrix(geom.positions[j] - geom.positions[i], kappa)
    op = ManyBodyOperator(n, pair_terms=[(i, j, h9)])
    if n <= DENSE_SITE_LIMIT:
        op.to_dense()
    return op


def total_h(geom, kappa):
    """Full Hamiltonian: per-site zero-field terms plus all dipole pairs."""
    n = geom.n_sites
    site_terms = [(i, single_site_h(geom.zfs[i])) for i in range(n)]
    pair_terms = []
    if kappa != 0.0:
        for i in range(n):
            for j in range(i + 1, n):
                h9 = _dipole_pair_matrix(
                    geom.positions[j] - geom.positions[i], kappa
                )
                pair_terms.append((i, j, h9))
    op = ManyBodyOperator(n, site_terms=site_terms, pair_terms=pair_terms)
    if n <= DENSE_SITE_LIMIT:
        op.to_dense()
    return op


def microwave_t(n, spec=None):
    """Microwave transition operator b1 * sum_i (Sx + Sy)_i."""
    spec = spec or MicrowaveSpec()
    sx, sy, _ = spin1_operators()
    local = spec.b1 * (sx + sy)
    op = ManyBodyOperator(n, site_terms=[(i, local) for i in range(n)])
    if n <= DENSE_SITE_LIMIT:
        op.to_dense()
    return op


def microwave_rotating(spec, n):
    """Rotating-frame drive -w * sum Sz + b1 * sum (cos(phi) Sx + sin(phi) Sy)."""
    sx, sy, sz = spin1_operators()
    local = -spec.frequency * sz + spec.b1 * (
        np.cos(spec.phase) * sx + np.sin(spec.phase) * sy
    )
    op = ManyBodyOperator(n, site_terms=[(i, local) for i in range(n)])
    if n <= DENSE_SITE_LIMIT:
        op.to_dense()
    return op


def chain_y(n, spacing=SPACING_DEFAULT_ANGSTROM, d0=ZFS_DEFAULT_GHZ):
    """N sites spaced equidistantly along the Y axis."""
    if n < 1:
        raise ValidationError("need at least one site")
    positions = np.zeros((n, 3))
    positions[:, 1] = spacing * np.arange(n)
    return SpinGeometry(positions=positions, zfs=np.full(n, d0))


def grid_2d(n, spacing=SPACING_DEFAULT_ANGSTROM, plane="ZY", d0=ZFS_DEFAULT_GHZ):
    """Two-row arrangement filled row-alternating along Y.

    Qubit k sits in row k mod 2, column k // 2; columns advance along
    Y and the second row is offset by ``spacing`` along Z (plane "ZY")
    or X (plane "XY").
    """
    if n < 1:
        raise ValidationError("need at least one site")
    if plane not in ("ZY", "XY"):
        raise ValidationError(f"plane must be 'ZY' or 'XY', got {plane!r}")
    offset_axis = 2 if plane == "ZY" else 0
    positions = np.zeros((n, 3))
    for k in range(n):
        positions[k, 1] = spacing * (k // 2)
        positions[k, offset_axis] = spacing * (k % 2)
    return SpinGeometry(positions=positions, zfs=np.full(n, d0))


def perturb(geom, noise, rng, max_resamples=1000):
    """Gaussian-perturbed copy of a geometry.

    Draw order is fixed: sites ascending, the zero-field shift before
    the position shifts, position shifts in x, y, z order. Draws that
    produce near-coincident sites are rejected and redrawn; the number
    of rejected attempts is returned alongside the geometry.
    """
    n = geom.n_sites
    resamples = 0
    while True:
        zfs = np.empty(n)
        positions = np.empty((n, 3))
        for i in range(n):
            zfs[i] = geom.zfs[i] + noise.sigma_d * rng.standard_normal()
            for axis in range(3):
                positions[i, axis] = (
                    geom.positions[i, axis] + noise.sigma_r * rng.standard_normal()
                )
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                if (
                    np.linalg.norm(positions[i] - positions[j])
                    < MIN_SITE_DISTANCE_ANGSTROM
                ):
                    ok = False
        if ok:
            return SpinGeometry(positions=positions, zfs=zfs), resamples
        resamples += 1
        if resamples > max_resamples:
            raise ValidationError(
                "could not draw a non-coincident geometry; sigma_r too large"
            )
