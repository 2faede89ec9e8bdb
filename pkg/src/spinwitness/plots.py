"""Optional SVG rendering of scan results.

Plots are conveniences only; nothing downstream reads them. Output is
byte-deterministic for a fixed input (fixed hash salt, no embedded
timestamps).
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ValidationError

matplotlib.rcParams["svg.hashsalt"] = "spinwitness"

_KINDS = ("distance", "size", "grid2d", "noise")


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _line_plot(xs, amplitude, lam, xlabel, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, amplitude, "o-", label="amplitude")
    ax.plot(xs, lam, "s-", label="lambda")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("value")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def emit_plot(records, kind, path):
    """Render a scan as a line plot, or a noise grid as two heat maps."""
    if kind not in _KINDS:
        raise ValidationError(f"unsupported plot kind {kind!r}")
    if not records:
        raise ValidationError("nothing to plot: empty record list")
    if kind == "distance":
        ok = [r for r in records if r.status == "ok"]
        _line_plot(
            [r.r_angstrom for r in ok],
            [r.amplitude for r in ok],
            [r.lam for r in ok],
            "r_angstrom",
            path,
        )
    elif kind in ("size", "grid2d"):
        ok = [r for r in records if r.status == "ok"]
        _line_plot(
            [r.n for r in ok],
            [r.amplitude for r in ok],
            [r.lam for r in ok],
            "n",
            path,
        )
    else:
        _noise_maps(records, path)
    return path


def _noise_maps(records, path):
    sds = sorted({r.sigma_d for r in records})
    srs = sorted({r.sigma_r for r in records})
    amp = np.full((len(sds), len(srs)), np.nan)
    lam = np.full((len(sds), len(srs)), np.nan)
    for r in records:
        i, j = sds.index(r.sigma_d), srs.index(r.sigma_r)
        if r.status == "ok":
            amp[i, j] = r.mean_amplitude
            lam[i, j] = r.mean_lam
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    extent = [min(srs), max(srs), min(sds), max(sds)]
    for ax, grid, title in (
        (axes[0], amp, "mean_amplitude"),
        (axes[1], lam, "mean_lambda"),
    ):
        im = ax.imshow(grid, origin="lower", aspect="auto", extent=extent)
        ax.set_xlabel("sigma_r_angstrom")
        ax.set_ylabel("sigma_d_ghz")
        ax.set_title(title)
        fig.colorbar(im, ax=ax)
    fig.tight_layout()
    _save(fig, path)
