"""Figure rendering for sweep CSVs and histogram dumps.

Every CLI run that writes delimited output can also render the matching
matplotlib figure next to it; the CSV stays the canonical artifact and the
figures are regenerable from it at any time.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _read_records(csv_path: Path) -> list[dict]:
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_ber_csv(csv_path: str | Path, png_path: str | Path | None = None) -> Path:
    """Semilog BER curves, one line per (scheme, iteration), vs the swept SNR."""
    csv_path = Path(csv_path)
    rows = _read_records(csv_path)
    if not rows:
        raise ValueError(f"no data rows in {csv_path}")

    axes_candidates = ("snr_sr_db", "snr_sd_db", "snr_rd_db")
    sweep_axis = "snr_sr_db"
    for cand in axes_candidates:
        values = {row[cand] for row in rows if row[cand] != ""}
        if len(values) > 1:
            sweep_axis = cand
            break

    series: dict[tuple[str, str], list[tuple[float, float]]] = defaultdict(list)
    max_iter = max(int(row["iteration"]) for row in rows)
    for row in rows:
        if row[sweep_axis] == "":
            continue
        it = int(row["iteration"])
        label = row["scheme"] if max_iter == 1 else f"{row['scheme']} it{it}"
        series[(label, it)].append((float(row[sweep_axis]), float(row["ber"])))

    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for (label, _), pts in sorted(series.items()):
        pts.sort()
        xs, ys = zip(*pts)
        ax.semilogy(xs, np.maximum(ys, 1e-12), marker="o", label=label)
    ax.set_xlabel(f"{sweep_axis.replace('_db', '').replace('snr_', 'SNR ')} [dB]")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    if png_path is None:
        png_path = csv_path.with_suffix(".png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return Path(png_path)


def plot_hist_dir(dump_dir: str | Path, png_path: str | Path | None = None) -> Path:
    """Panel grid of every two-column histogram file in a dump directory."""
    dump_dir = Path(dump_dir)
    files = sorted(dump_dir.glob("*_pos.txt")) + sorted(dump_dir.glob("*_neg.txt"))
    if not files:
        raise ValueError(f"no histogram files in {dump_dir}")
    cols = 2
    rows = (len(files) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(10, 2.6 * rows), squeeze=False)
    for ax in axes.ravel():
        ax.set_visible(False)
    for ax, path in zip(axes.ravel(), files):
        data = np.loadtxt(path)
        ax.set_visible(True)
        ax.fill_between(data[:, 0], data[:, 1], step="mid", alpha=0.6)
        ax.set_title(path.stem, fontsize=8)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    if png_path is None:
        png_path = dump_dir / "histograms.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return Path(png_path)


def plot_analysis_csv(csv_path: str | Path, png_path: str | Path | None = None) -> Path:
    """Mutual-information and equivalent-SNR curves from an analyze CSV."""
    csv_path = Path(csv_path)
    rows = _read_records(csv_path)
    if not rows:
        raise ValueError(f"no data rows in {csv_path}")
    fig, (ax_mi, ax_snr) = plt.subplots(1, 2, figsize=(10, 4))
    by_scheme: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        by_scheme[row["scheme"]].append(row)
    for scheme, srows in sorted(by_scheme.items()):
        srows.sort(key=lambda r: float(r["snr_sr_db"]))
        xs = [float(r["snr_sr_db"]) for r in srows]
        ax_mi.plot(xs, [float(r["I_data"]) for r in srows], "o-", label=f"{scheme} I(U;U~)")
        ax_mi.plot(xs, [float(r["I_code"]) for r in srows], "s--", label=f"{scheme} I(C;C~)")
        snr_rows = [(x, r["gamma_eq_db"]) for x, r in zip(xs, srows) if r["gamma_eq_db"]]
        if snr_rows:
            ax_snr.plot(
                [x for x, _ in snr_rows],
                [float(g) for _, g in snr_rows],
                "o-",
                label=scheme,
            )
    ax_mi.set_xlabel("SNR sr [dB]")
    ax_mi.set_ylabel("mutual information [bit]")
    ax_mi.grid(True, alpha=0.3)
    ax_mi.legend(fontsize=7)
    ax_snr.set_xlabel("SNR sr [dB]")
    ax_snr.set_ylabel("equivalent SNR [dB]")
    ax_snr.grid(True, alpha=0.3)
    ax_snr.legend(fontsize=7)
    fig.tight_layout()
    if png_path is None:
        png_path = csv_path.with_suffix(".png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return Path(png_path)
