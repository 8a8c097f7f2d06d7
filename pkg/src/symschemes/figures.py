"""Matplotlib renderings written next to the delimited report files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_MARKERS = ("o", "s", "^", "d", "v")


def render_report(report, out_dir, stem):
    """Convergence plot (error vs h) and solution overlays for one report."""
    out = Path(out_dir)
    written = []

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    plotted = False
    for mk, scheme in zip(_MARKERS, ("invariant", "standard")):
        rows = [r for r in report.rows_for(scheme)
                if r.status == "ok" and r.max_error]
        if not rows:
            continue
        hs = [r.h for r in rows]
        ax.loglog(hs, [r.max_error for r in rows], mk + "-", label=f"{scheme} (max)")
        ax.loglog(hs, [r.endpoint_error for r in rows], mk + "--", alpha=0.6,
                  label=f"{scheme} (endpoint)")
        plotted = True
    if plotted:
        ax.set_xlabel("h")
        ax.set_ylabel("error")
        ax.set_title(f"Example {report.example}"
                     + (f" ({report.variant})" if report.variant else ""))
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out / f"{stem}_convergence.png"
        fig.savefig(path, dpi=110)
        written.append(path)
    plt.close(fig)

    if report.trajectories:
        fig, ax = plt.subplots(figsize=(6.0, 4.2))
        for (scheme, h), traj in sorted(report.trajectories.items()):
            style = "-" if scheme == "invariant" else "--"
            ax.plot(traj.xs, traj.ys, style, lw=1.0, label=f"{scheme} h={h:g}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(f"Example {report.example}: computed solutions")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7)
        fig.tight_layout()
        path = out / f"{stem}_solutions.png"
        fig.savefig(path, dpi=110)
        written.append(path)
        plt.close(fig)
    return written


def render_singularity(bundle, out_dir, stem):
    """Log-scale |y| overlay across resolutions, baseline and pole marker."""
    out = Path(out_dir)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for h, traj in sorted(bundle.trajectories.items(), reverse=True):
        ax.semilogy(traj.xs, abs(traj.ys) + 1e-300, lw=0.9, label=f"invariant h={h:g}")
    std = bundle.standard
    ok = [i for i, f in enumerate(std.flags) if f == "ok"]
    ax.semilogy(std.xs[ok], abs(std.ys[ok]) + 1e-300, "k--", lw=1.0,
                label=f"standard h={bundle.hs[-1]:g}")
    ax.axvline(bundle.pole_x, color="gray", ls=":", lw=1.0,
               label=f"pole ~ {bundle.pole_x:.3f}")
    ax.set_xlabel("x")
    ax.set_ylabel("|y|")
    ax.set_title("Pole crossing: invariant scheme vs baseline")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out / f"{stem}.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return [path]
