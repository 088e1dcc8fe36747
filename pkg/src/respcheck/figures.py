"""Figure rendering for sweep reports.

Sweeps produce one row per time bound; the companion figure shows the
language measures and the responsibility degrees over that range, mirroring
the CSV columns.  Rendering uses the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["render_sweep_figure"]


def render_sweep_figure(rows: list[dict], title: str, path: str | Path) -> Path:
    """Render the two-panel sweep figure (measures, degrees) to ``path``."""
    path = Path(path)
    ts = [row["t"] for row in rows]
    fig, (ax_meas, ax_deg) = plt.subplots(1, 2, figsize=(9.6, 3.6))

    ax_meas.plot(ts, [float(r["prob_denominator"]) for r in rows], label="P(reference)")
    ax_meas.plot(ts, [r["entropy_denominator"] for r in rows], label="H(reference)")
    ax_meas.plot(ts, [float(r["prob_numerator"]) for r in rows], label="P(responsible)")
    ax_meas.plot(ts, [r["entropy_numerator"] for r in rows], label="H(responsible)")
    ax_meas.set_xlabel("time bound")
    ax_meas.set_ylabel("language measure")
    ax_meas.legend(fontsize=8)

    ax_deg.plot(ts, [float(r["count_degree"]) for r in rows], label="count degree")
    ax_deg.plot(ts, [float(r["prob_degree"]) for r in rows], label="probability degree")
    ax_deg.plot(ts, [r["entropy_degree"] for r in rows], label="entropy degree")
    ax_deg.set_xlabel("time bound")
    ax_deg.set_ylabel("degree")
    ax_deg.set_ylim(-0.05, 1.05)
    ax_deg.legend(fontsize=8)

    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
