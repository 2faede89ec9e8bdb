import dataclasses

import numpy as np
import pytest

from spinwitness import experiments as ex
from spinwitness import model
from spinwitness.errors import ValidationError


def small_cfg(**kw):
    defaults = dict(n=3, r_min=5.0, r_max=6.0, r_step=0.5)
    defaults.update(kw)
    return ex.ScanConfig(**defaults)


def test_split_seed_deterministic_and_distinct():
    assert ex.split_seed(42, 1, 2) == ex.split_seed(42, 1, 2)
    seen = {ex.split_seed(42, c, r) for c in range(10) for r in range(10)}
    assert len(seen) == 100
    assert ex.split_seed(42, 1, 2) != ex.split_seed(43, 1, 2)


def test_fit_power_law_exact_cases():
    fit = ex.fit_power_law([1, 4, 9], [1, 2, 3])
    assert fit.prefactor == pytest.approx(1.0, abs=1e-10)
    assert fit.exponent == pytest.approx(0.5, abs=1e-10)
    fit = ex.fit_power_law([1, 2, 3], [2, 2, 2])
    assert fit.prefactor == pytest.approx(2.0, abs=1e-10)
    assert fit.exponent == pytest.approx(0.0, abs=1e-10)


def test_fit_power_law_recovers_noisy_exponent():
    rng = np.random.default_rng(0)
    xs = np.linspace(1, 10, 30)
    ys = 1.7 * xs**0.42 * (1 + 0.01 * rng.standard_normal(30))
    fit = ex.fit_power_law(xs, ys)
    assert fit.exponent == pytest.approx(0.42, abs=0.02)
    assert np.isfinite(fit.residual_norm)


def test_fit_power_law_validation():
    with pytest.raises(ValidationError):
        ex.fit_power_law([1, 2], [1, 2])
    with pytest.raises(ValidationError):
        ex.fit_power_law([0, 1, 2], [1, 1, 1])
    with pytest.raises(ValidationError):
        ex.fit_power_law([2, 2, 2], [1, 2, 3])


def test_scan_config_validation():
    with pytest.raises(ValidationError):
        ex.ScanConfig(repetitions=0)
    with pytest.raises(ValidationError):
        ex.ScanConfig(r_min=5.0, r_max=4.0)
    with pytest.raises(ValidationError):
        ex.ScanConfig(ground_reference="mixed")
    with pytest.raises(ValidationError):
        ex.ScanConfig(plane="YZ")


def test_distance_scan_row_count_and_anchor():
    cfg = ex.ScanConfig(n=3, r_min=4.625, r_max=5.625, r_step=0.5)
    records = ex.run_distance_scan(cfg)
    assert len(records) == len(cfg.r_values()) == 3
    anchor = records[1]
    assert anchor.r_angstrom == pytest.approx(5.125)
    assert anchor.lam == pytest.approx(1.36, abs=0.05)
    assert all(r.amplitude >= 0 and r.lam >= 0 for r in records)


def test_size_scan_non_interacting_flat():
    cfg = ex.ScanConfig(n_min=1, n_max=4)
    for rec in ex.run_size_scan(cfg, interacting=False):
        assert rec.amplitude == pytest.approx(1.0, abs=1e-9)
        assert rec.lam == pytest.approx(1.0, abs=1e-9)
        assert rec.interacting is False


def test_size_scan_matches_distance_scan_at_anchor():
    size = ex.run_size_scan(ex.ScanConfig(n_min=3, n_max=3))
    dist = ex.run_distance_scan(
        ex.ScanConfig(n=3, r_min=5.125, r_max=5.125, r_step=1.0)
    )
    assert size[0].amplitude == pytest.approx(dist[0].amplitude, abs=1e-10)
    assert size[0].lam == pytest.approx(dist[0].lam, abs=1e-10)


def test_grid2d_scan_small():
    cfg = ex.ScanConfig(grid_n_min=3, grid_n_max=4)
    for plane in ("ZY", "XY"):
        records = ex.run_grid2d_scan(cfg, plane=plane)
        assert [r.n for r in records] == [3, 4]
        assert all(r.plane == plane for r in records)
        assert all(r.lam > 1.0 for r in records)


def test_noise_map_zero_cell_matches_noiseless():
    cfg = ex.ScanConfig(
        n=3,
        sigma_d_max=0.5,
        sigma_r_max=0.5,
        sigma_d_steps=2,
        sigma_r_steps=2,
        repetitions=3,
    )
    records = ex.run_noise_map(cfg)
    assert len(records) == 4
    zero = records[0]
    assert (zero.sigma_d, zero.sigma_r) == (0.0, 0.0)
    noiseless = ex.evaluate_geometry(model.chain_y(3, cfg.spacing), cfg.kappa)
    assert zero.mean_amplitude == pytest.approx(noiseless.amplitude, abs=1e-12)
    assert zero.mean_lam == pytest.approx(noiseless.lam, abs=1e-12)
    assert zero.std_lam == pytest.approx(0.0, abs=1e-12)
    assert zero.reps == 3 and zero.resamples == 0


def test_noise_map_deterministic():
    cfg = ex.ScanConfig(
        n=2, sigma_d_steps=2, sigma_r_steps=2, repetitions=4, base_seed=77
    )
    a = ex.run_noise_map(cfg)
    b = ex.run_noise_map(dataclasses.replace(cfg))
    assert a == b


def test_threaded_results_match_serial():
    cfg = small_cfg(threads=1)
    threaded = dataclasses.replace(cfg, threads=3)
    assert ex.run_distance_scan(cfg) == ex.run_distance_scan(threaded)


def test_noise_standard_error_shrinks_with_reps():
    # standard error of the cell mean should shrink roughly like 1/sqrt(reps)
    def spread(reps, seeds):
        cfg = ex.ScanConfig(
            n=2,
            sigma_d_max=0.0,
            sigma_r_max=0.5,
            sigma_d_steps=1,
            sigma_r_steps=2,
            repetitions=reps,
        )
        means = []
        for seed in seeds:
            rec = ex.run_noise_map(dataclasses.replace(cfg, base_seed=seed))[1]
            means.append(rec.mean_lam)
        return np.std(means)

    seeds = range(12)
    ratio = spread(4, seeds) / spread(16, seeds)
    assert 1.2 < ratio < 3.5  # ideal ratio 2, allow Monte Carlo slack
