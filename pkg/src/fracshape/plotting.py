"""PNG figures drawn from a report's tables (optional; needs matplotlib).

Each subcommand has one figure function reading only ``report.tables``, so a
figure can be redrawn from a saved JSON report.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "figure.figsize": (6.4, 2.8),
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("figures need matplotlib: pip install 'artifact[plot]'") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _col(rows, key):
    return np.array([r[key] for r in rows], dtype=float)


def _save(fig, path: Path, plt):
    # no Software/creation-time metadata, so equal inputs give equal bytes
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def torsion1d(tables, path, plt):
    fig, (ax1, ax2) = plt.subplots(1, 2)
    prof = tables["profile"]
    x = _col(prof, "x")
    ax1.plot(x, _col(prof, "exact"), "k-", label="exact")
    ax1.plot(x, _col(prof, "discrete"), "C0--", label="discrete")
    ax1.set_xlabel("x")
    ax1.set_ylabel("torsion function")
    ax1.legend()
    conv = tables["convergence"]
    ax2.loglog(_col(conv, "h"), _col(conv, "max_error"), "o-")
    ax2.set_xlabel("h")
    ax2.set_ylabel("max error")
    return _save(fig, path, plt)


def kappa(tables, path, plt):
    fig, ax = plt.subplots()
    rows = tables["kappa"]
    s = _col(rows, "s")
    for key, mark in (("rel_err_bump", "o"), ("rel_err_beta", "s")):
        ax.semilogy(s, np.maximum(_col(rows, key), 1e-16), mark + "-", label=key)
    ax.set_xlabel("s")
    ax.set_ylabel("relative error")
    ax.legend()
    return _save(fig, path, plt)


def hadamard(tables, path, plt):
    rows = tables["reports"]
    fig, axes = plt.subplots(1, len(rows), squeeze=False)
    for ax, r in zip(axes[0], rows):
        eps = np.array(r["eps_ladder"], dtype=float)
        ax.plot(eps, r["quotients_plus"], "o-", label="forward quotients")
        if r["quotients_minus"]:
            ax.plot(-eps, r["quotients_minus"], "s-", label="backward quotients")
        ax.axhline(r["boundary_formula"], color="C2", label="boundary formula")
        if r["closed_form"] is not None:
            ax.axhline(r["closed_form"], color="k", ls=":", label="closed form")
        ax.set_xlabel("eps")
        ax.set_title(f"s={r['s']}, p={r['p']}")
    axes[0][0].set_ylabel("d lambda / d eps")
    axes[0][0].legend()
    return _save(fig, path, plt)


def annulus_sweep(tables, path, plt):
    fig, (ax1, ax2) = plt.subplots(1, 2)
    for key, rows in sorted(tables.items()):
        if not key.startswith("sweep_"):
            continue
        t = _col(rows, "t")
        lam = _col(rows, "lam")
        ax1.plot(t, lam / lam[0], "o-", label=key.removeprefix("sweep_"))
        ax2.plot(t, _col(rows, "dlam") / lam[0], "o-", label=key.removeprefix("sweep_"))
    ax1.set_xlabel("t")
    ax1.set_ylabel("lambda(t) / lambda(0)")
    ax2.set_xlabel("t")
    ax2.set_ylabel("d lambda / lambda(0)")
    ax1.legend()
    return _save(fig, path, plt)


def _ratio_bars(ax, rows, value, bound, label):
    ratio = np.abs(_col(rows, value)) / _col(rows, bound)
    names = [f"s={r['s']:g} {r[label]}" for r in rows]
    ax.barh(np.arange(len(rows)), ratio, color="C0")
    ax.axvline(1.0, color="k", ls=":")
    ax.set_yticks(np.arange(len(rows)), names)
    ax.grid(axis="y", visible=False)


def ball_stationarity(tables, path, plt):
    fig, ax = plt.subplots()
    _ratio_bars(ax, tables["stationarity"], "derivative", "bound", "field")
    ax.set_xlabel("|derivative| / bound")
    return _save(fig, path, plt)


def identities(tables, path, plt):
    fig, ax = plt.subplots()
    rows = [dict(r, tol=2e-2) for r in tables["lemma"]]
    _ratio_bars(ax, rows, "gap", "tol", "field")
    ax.set_xlabel("pullback-derivative gap / tolerance")
    return _save(fig, path, plt)


FIGURES = {
    "torsion1d": torsion1d,
    "kappa": kappa,
    "hadamard-interval": hadamard,
    "hadamard-disc": hadamard,
    "annulus-sweep": annulus_sweep,
    "ball-stationarity": ball_stationarity,
    "identities": identities,
}


def render(subcommand: str, tables: dict, stem: Path) -> list[Path]:
    """Draw the subcommand's figure to ``<stem>.png``; returns the written paths."""
    plt = _pyplot()
    with plt.rc_context(STYLE):
        return [FIGURES[subcommand](tables, stem.with_suffix(".png"), plt)]
