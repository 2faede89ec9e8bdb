"""Experiment families: distance scan, size scaling, 2D grids, noise maps.

Each scan point builds a geometry, solves for the low spectrum, finds
the brightest microwave transition and evaluates the condensation
witness for that state. Noise cells repeat this over seeded Gaussian
perturbations; every repetition gets an independent, reproducible
random stream derived from the base seed.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg, model, witness
from .errors import NumericError, ValidationError

DEFAULT_REPETITIONS = 100
DEFAULT_SEED = 20250824

_MASK64 = (1 << 64) - 1


def split_seed(base, *indices):
    """Derive an independent 64-bit stream seed from (base, indices).

    SplitMix64 finalizer applied per index; repetitions and cells get
    uncorrelated streams without sharing state.
    """
    x = base & _MASK64
    for idx in indices:
        x = (x + 0x9E3779B97F4A7C15 * (idx + 1)) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        x = z ^ (z >> 31)
    return x


@dataclass
class ScanConfig:
    """Configuration shared by all experiment families."""

    family: str = "distance"
    n: int = 3
    n_min: int = 2
    n_max: int = 9
    d0: float = model.ZFS_DEFAULT_GHZ
    kappa: float = model.DIPOLE_KAPPA_GHZ_NM3
    spacing: float = model.SPACING_DEFAULT_ANGSTROM
    r_min: float = 2.0
    r_max: float = 22.0
    r_step: float = 0.5
    plane: str = "ZY"
    grid_n_min: int = 3
    grid_n_max: int = 8
    sigma_d_max: float = 1.5 * model.ZFS_DEFAULT_GHZ
    sigma_r_max: float = 2.5
    sigma_d_steps: int = 11
    sigma_r_steps: int = 11
    repetitions: int = DEFAULT_REPETITIONS
    base_seed: int = DEFAULT_SEED
    ground_reference: str = "eigenstate"
    lowest_k: int = 0  # 0 = automatic
    threads: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValidationError("repetitions must be >= 1")
        if self.r_min <= 0 or self.r_max < self.r_min or self.r_step <= 0:
            raise ValidationError("invalid distance grid")
        if self.ground_reference not in ("eigenstate", "product"):
            raise ValidationError(
                "ground_reference must be 'eigenstate' or 'product'"
            )
        if self.plane not in ("ZY", "XY"):
            raise ValidationError("plane must be 'ZY' or 'XY'")

    def r_values(self):
        count = int(np.floor((self.r_max - self.r_min) / self.r_step + 0.5)) + 1
        return [self.r_min + i * self.r_step for i in range(count)]

    def sigma_d_values(self):
        return list(np.linspace(0.0, self.sigma_d_max, self.sigma_d_steps))

    def sigma_r_values(self):
        return list(np.linspace(0.0, self.sigma_r_max, self.sigma_r_steps))


@dataclass
class PointResult:
    amplitude: float
    lam: float
    excited_energy: float


@dataclass
class DistanceRecord:
    r_angstrom: float
    amplitude: float = np.nan
    lam: float = np.nan
    excited_energy: float = np.nan
    status: str = "ok"


@dataclass
class SizeRecord:
    n: int
    interacting: bool
    amplitude: float = np.nan
    lam: float = np.nan
    status: str = "ok"


@dataclass
class Grid2dRecord:
    n: int
    plane: str
    amplitude: float = np.nan
    lam: float = np.nan
    status: str = "ok"


@dataclass
class NoiseRecord:
    sigma_d: float
    sigma_r: float
    mean_amplitude: float = np.nan
    std_amplitude: float = np.nan
    mean_lam: float = np.nan
    std_lam: float = np.nan
    reps: int = 0
    resamples: int = 0
    status: str = "ok"


@dataclass
class PowerFit:
    prefactor: float
    exponent: float
    residual_norm: float
    iterations: int


def product_zero_state(n):
    """|0, 0, ..., 0> in the (|+1>, |0>, |-1>) product ordering."""
    state = np.zeros(3**n, dtype=complex)
    state[(3**n - 1) // 2] = 1.0
    return state


def evaluate_geometry(geom, kappa, *, ground_reference="eigenstate",
                      seed=0, lowest_k=0):
    """Brightest transition amplitude and witness for one geometry.

    Dense diagonalization up to the dense site limit, the deflated
    Lanczos solver above it; on the iterative path the topmost
    (possibly truncated) manifold is dropped from the amplitude table.
    """
    n = geom.n_sites
    h = model.total_h(geom, kappa)
    if n <= model.DENSE_SITE_LIMIT:
        eig = linalg.eigh_dense(h.to_dense())
    else:
        k = lowest_k or (2 * n + 8)
        eig = linalg.eig_lowest_k(h, k, seed=seed)
        if len(eig.manifolds) > 2:
            eig.manifolds = eig.manifolds[:-1]
    t = model.microwave_t(n)
    if ground_reference == "eigenstate":
        ground = eig.vectors[:, 0]
    else:
        ground = product_zero_state(n)
    table = witness.transition_amplitudes(eig, t, ground, n)
    row = table.max_row()
    state, amplitude = witness.max_amplitude_state(table)
    lam, _ = witness.witness_for_state(state, n)
    return PointResult(amplitude=amplitude, lam=lam, excited_energy=row.energy)


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def run_distance_scan(cfg):
    """Fixed-N chain swept over inter-site distances."""

    def point(r):
        try:
            res = evaluate_geometry(
                model.chain_y(cfg.n, r, d0=cfg.d0),
                cfg.kappa,
                ground_reference=cfg.ground_reference,
                seed=split_seed(cfg.base_seed, 0),
                lowest_k=cfg.lowest_k,
            )
            return DistanceRecord(r, res.amplitude, res.lam, res.excited_energy)
        except NumericError:
            return DistanceRecord(r, status="failed")

    return _map(point, cfg.r_values(), cfg.threads)


def run_size_scan(cfg, interacting=True):
    """Chain at fixed spacing with growing site count."""
    kappa = cfg.kappa if interacting else 0.0

    def point(n):
        try:
            res = evaluate_geometry(
                model.chain_y(n, cfg.spacing, d0=cfg.d0),
                kappa,
                ground_reference=cfg.ground_reference,
                seed=split_seed(cfg.base_seed, n),
                lowest_k=cfg.lowest_k,
            )
            return SizeRecord(n, interacting, res.amplitude, res.lam)
        except NumericError:
            return SizeRecord(n, interacting, status="failed")

    return _map(point, range(cfg.n_min, cfg.n_max + 1), cfg.threads)


def run_grid2d_scan(cfg, plane=None):
    """Two-row arrangement with row-alternating fill along Y."""
    plane = plane or cfg.plane

    def point(n):
        try:
            res = evaluate_geometry(
                model.grid_2d(n, cfg.spacing, plane=plane, d0=cfg.d0),
                cfg.kappa,
                ground_reference=cfg.ground_reference,
                seed=split_seed(cfg.base_seed, n),
                lowest_k=cfg.lowest_k,
            )
            return Grid2dRecord(n, plane, res.amplitude, res.lam)
        except NumericError:
            return Grid2dRecord(n, plane, status="failed")

    return _map(point, range(cfg.grid_n_min, cfg.grid_n_max + 1), cfg.threads)


def _noise_cell(cfg, cell_index, sigma_d, sigma_r):
    base = model.chain_y(cfg.n, cfg.spacing, d0=cfg.d0)
    spec = model.NoiseSpec(sigma_d=sigma_d, sigma_r=sigma_r, seed=cfg.base_seed)
    amps, lams = [], []
    resamples = 0
    failures = 0
    for rep in range(cfg.repetitions):
        rng = np.random.default_rng(split_seed(cfg.base_seed, cell_index, rep))
        try:
            geom, res = model.perturb(base, spec, rng)
            resamples += res
            point = evaluate_geometry(
                geom,
                cfg.kappa,
                ground_reference=cfg.ground_reference,
                seed=split_seed(cfg.base_seed, cell_index, rep, 1),
                lowest_k=cfg.lowest_k,
            )
            amps.append(point.amplitude)
            lams.append(point.lam)
        except (NumericError, ValidationError):
            failures += 1
    rec = NoiseRecord(sigma_d, sigma_r, reps=cfg.repetitions, resamples=resamples)
    if failures > 0.1 * cfg.repetitions or not amps:
        rec.status = "failed"
        return rec
    ddof = 1 if len(amps) > 1 else 0
    rec.mean_amplitude = float(np.mean(amps))
    rec.std_amplitude = float(np.std(amps, ddof=ddof))
    rec.mean_lam = float(np.mean(lams))
    rec.std_lam = float(np.std(lams, ddof=ddof))
    return rec


def run_noise_map(cfg):
    """Monte Carlo heat-map grid over (sigma_d, sigma_r) noise widths."""
    cells = []
    for i, sd in enumerate(cfg.sigma_d_values()):
        for j, sr in enumerate(cfg.sigma_r_values()):
            cells.append((i * cfg.sigma_r_steps + j, sd, sr))
    return _map(lambda c: _noise_cell(cfg, *c), cells, cfg.threads)


def fit_power_law(xs, ys, max_iter=200, step_tol=1e-10):
    """Least-squares fit of y = a * x^b.

    Damped Gauss-Newton with Levenberg-style damping, initialized from
    the log-log linear regression.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValidationError("need at least 3 points to fit a power law")
    if np.any(xs <= 0):
        raise ValidationError("power-law fit requires positive x values")
    if np.ptp(xs) == 0:
        raise ValidationError("degenerate data: all x values equal")

    slope, intercept = np.polyfit(np.log(xs), np.log(np.maximum(ys, 1e-300)), 1)
    a, b = float(np.exp(intercept)), float(slope)
    mu = 1e-3
    cost = float(np.sum((ys - a * xs**b) ** 2))
    iterations = 0
    for iterations in range(1, max_iter + 1):
        fx = a * xs**b
        r = ys - fx
        jac = np.column_stack([xs**b, fx * np.log(xs)])
        g = jac.T @ r
        h = jac.T @ jac
        step = np.linalg.solve(h + mu * np.diag(np.diag(h) + 1e-30), g)
        a_new, b_new = a + step[0], b + step[1]
        cost_new = float(np.sum((ys - a_new * xs**b_new) ** 2))
        if cost_new <= cost:
            a, b, cost = a_new, b_new, cost_new
            mu = max(mu / 3.0, 1e-12)
        else:
            mu *= 10.0
            if mu > 1e12:
                break
        if np.linalg.norm(step) < step_tol:
            break
    return PowerFit(
        prefactor=a,
        exponent=b,
        residual_norm=float(np.sqrt(cost)),
        iterations=iterations,
    )
