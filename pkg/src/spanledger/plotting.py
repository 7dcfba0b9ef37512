"""Figures written next to the CSV reports.

Only file output is supported; the Agg backend is selected on import.
"""
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["pretty_plot", "save", "plot_estimate", "plot_profile", "plot_sweep", "plot_validation"]

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.5,
    "lines.markersize": 4,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

MODE_STYLE = {
    "incoherent": dict(color="tab:blue", linestyle="--"),
    "coherent": dict(color="tab:red", linestyle="-"),
    "equivalent": dict(color="black", linestyle=":"),
    "simulation": dict(color="tab:green", linestyle="none", marker="o"),
}


def pretty_plot(width=6.0, height=None, nrows=1, ncols=1):
    golden_ratio = (math.sqrt(5) - 1.0) / 2.0
    if height is None:
        height = width * golden_ratio * nrows / ncols
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(nrows, ncols, figsize=(width, height), squeeze=False)
    return fig, axes


def save(fig, path):
    with plt.rc_context(STYLE):
        fig.savefig(path)
    plt.close(fig)
    return path


def _finite(values):
    values = np.asarray(values, dtype=float)
    return np.where(np.isfinite(values), values, np.nan)


def plot_estimate(tables, path):
    """GSNR and SNR_SPM against span count, one curve per accumulation mode."""
    fig, axes = pretty_plot(7.0, 3.0, ncols=2)
    for table in tables:
        mode = table.meta["mode"]
        n = table.column("span_index")
        axes[0, 0].plot(n, _finite(table.column("gsnr_db")), label=mode, **MODE_STYLE[mode])
        axes[0, 1].plot(n, _finite(table.column("snr_spm_db")), label=mode, **MODE_STYLE[mode])
    axes[0, 0].set_ylabel("GSNR [dB]")
    axes[0, 1].set_ylabel(r"SNR$_{SPM}$ [dB]")
    for ax in axes[0]:
        ax.set_xlabel("span")
        ax.legend()
    fig.tight_layout()
    return save(fig, path)


def plot_profile(table, path):
    fig, axes = pretty_plot(7.0, 3.0, ncols=2)
    n = np.asarray(table.column("n"))
    axes[0, 0].plot(n, table.column("c_n"), marker="o", label=r"$C^{(n)}$")
    axes[0, 0].plot(n, n * table.footer["c_inf"], **MODE_STYLE["equivalent"], label=r"$n\,C^{(\infty)}$")
    axes[0, 1].plot(n, table.column("delta_c_n"), marker="o", label=r"$\Delta C^{(n)}$")
    axes[0, 1].axhline(table.footer["c_inf"], **MODE_STYLE["equivalent"], label=r"$C^{(\infty)}$")
    for ax in axes[0]:
        ax.set_xlabel("span")
        ax.legend()
    axes[0, 0].set_title(rf"$\theta$ = {table.meta['theta']:.3g}", fontsize=9)
    fig.tight_layout()
    return save(fig, path)


def plot_sweep(table, n, path):
    fig, axes = pretty_plot(5.0)
    ax = axes[0, 0]
    theta = table.column("theta")
    ax.semilogx(theta, table.column(f"c_at_n{n}"), marker="o", label=rf"$C^{{({n})}}$")
    ax.semilogx(theta, np.asarray(table.column("c_inf")) * n, **MODE_STYLE["equivalent"], label=rf"${n}\,C^{{(\infty)}}$")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel("coherence coefficient")
    ax.legend()
    fig.tight_layout()
    return save(fig, path)


def plot_validation(table, path):
    """Simulated vs predicted SNR_SPM and its per-span change."""
    fig, axes = pretty_plot(7.0, 3.0, ncols=2)
    n = table.column("n")
    snr_ax, delta_ax = axes[0]
    snr_ax.plot(n, _finite(table.column("snr_sim_db")), label="SSFM", **MODE_STYLE["simulation"])
    for mode in ("incoherent", "coherent", "equivalent"):
        snr_ax.plot(n, _finite(table.column(f"snr_{mode}_db")), label=mode, **MODE_STYLE[mode])
    delta_ax.plot(n, _finite(table.column("delta_snr_sim_db")), label="SSFM", **MODE_STYLE["simulation"])
    delta_ax.plot(n, _finite(table.column("delta_snr_model_db")), label="coherent", **MODE_STYLE["coherent"])
    snr_ax.set_ylabel(r"SNR$_{SPM}$ [dB]")
    delta_ax.set_ylabel(r"$\Delta$SNR$_{SPM}$ [dB]")
    for ax in axes[0]:
        ax.set_xlabel("span")
        ax.legend()
    fig.tight_layout()
    return save(fig, path)
