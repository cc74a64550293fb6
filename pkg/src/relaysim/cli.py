"""Batch command-line interface.

Subcommands: ``case1`` and ``case2`` run the Monte Carlo sweeps and write
plot-ready CSV (plus rendered figures unless disabled), ``analyze`` turns
recorded histogram/statistics dumps into the mutual-information and
equivalent-SNR table, and ``fit-snrmap`` measures and fits the decoder's
input-to-output LLR quality map.  ``--config FILE`` merges with explicit
flags, flags winning.  Exit codes: 0 success, 2 config error, 3 runtime
error.  ``RELAYSIM_THREADS`` caps the worker pool.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import plots, runner
from .analysis import (
    CondPdf,
    SnrMap,
    ber_from_gamma,
    fit_snr_map,
    invert_snr_map,
    mutual_info_bsc,
    mutual_info_soft,
)
from .config import CASE1, CASE2, ConfigError, ExperimentConfig, parse_config
from .trellis import build_trellis, parse_code_string

ANALYSIS_HEADER = "snr_sr_db,scheme,I_data,I_code,gamma_eq_db,ber_est,ber_sim,ci_halfwidth"


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="config file merged with flags (flags win)")
    sub.add_argument("--code", help="code spec, e.g. ff:7,5 or rsc:1,5/7")
    sub.add_argument("--fading", choices=["awgn", "rayleigh"])
    sub.add_argument("--frame-length", "-K", type=int, dest="frame_length")
    sub.add_argument("--frames", type=int, help="maximum frames per sweep point")
    sub.add_argument("--target-errors", type=int, help="bit errors per sweep point")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", help="output CSV path")
    sub.add_argument("--dump-llr-hist", help="directory for histogram dumps")
    sub.add_argument("--all-zero", action="store_true", default=None,
                     help="transmit the all-zero data word (diagnostics)")
    sub.add_argument("--no-plot", action="store_true", default=None,
                     help="skip figure rendering next to the CSV")


def _snr_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaysim",
        description="hard/soft decode-and-forward relaying simulator",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p1 = subs.add_parser("case1", help="two-hop relay chain without direct link")
    p1.add_argument("--variant", choices=["hard", "bcjr-llr", "bcjr-tanh", "avg"])
    p1.add_argument("--snr-sr", type=_snr_list, help="source-relay SNRs in dB")
    p1.add_argument("--snr-rd", type=_snr_list, help="relay-destination SNR in dB")
    _add_common_flags(p1)

    p2 = subs.add_parser("case2", help="distributed turbo code with direct link")
    p2.add_argument("--variant", choices=["hard", "bcjr-llr", "bcjr-tanh"])
    p2.add_argument("--crc", choices=["off", "genie"])
    p2.add_argument("--iters", type=int, help="turbo iterations")
    p2.add_argument("--snr-sr", type=_snr_list)
    p2.add_argument("--snr-rd", type=_snr_list)
    p2.add_argument("--snr-sd", type=_snr_list, help="source-destination SNRs in dB")
    _add_common_flags(p2)

    pa = subs.add_parser("analyze", help="mutual information / equivalent SNR from dumps")
    pa.add_argument("--dumps", required=True, help="dump directory from a case1 run")
    pa.add_argument("--out", required=True, help="analysis CSV path")
    pa.add_argument("--snr-map", help="fitted map JSON from fit-snrmap")
    pa.add_argument("--no-plot", action="store_true")

    pf = subs.add_parser("fit-snrmap", help="fit the decoder LLR quality map")
    pf.add_argument("--code", default="ff:7,5")
    pf.add_argument("--gamma-in", type=_snr_list, default=tuple(np.arange(1.0, 13.0)),
                    help="input LLR quality targets (linear)")
    pf.add_argument("--frames", type=int, default=20)
    pf.add_argument("--frame-length", type=int, default=2000)
    pf.add_argument("--seed", type=int, default=1)
    pf.add_argument("--out", required=True, help="map JSON path")
    return parser


def _overrides_from_args(args: argparse.Namespace, case: str) -> dict:
    mapping = {
        "variant": ("experiment", "variant"),
        "crc": ("experiment", "crc"),
        "code": ("experiment", "code"),
        "frame_length": ("experiment", "frame_length"),
        "iters": ("experiment", "iterations"),
        "seed": ("experiment", "seed"),
        "fading": ("channel", "fading"),
        "snr_sr": ("channel", "snr_sr_db"),
        "snr_rd": ("channel", "snr_rd_db"),
        "snr_sd": ("channel", "snr_sd_db"),
        "frames": ("stopping", "frames_max"),
        "target_errors": ("stopping", "target_bit_errors"),
        "out": ("output", "out"),
        "dump_llr_hist": ("output", "dump_llr_hist"),
    }
    overrides: dict = {("experiment", "case"): case}
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "all_zero", None):
        overrides[("output", "all_zero_mode")] = True
    if getattr(args, "no_plot", None):
        overrides[("output", "plot")] = False
    return overrides


def _load_config(args: argparse.Namespace, case: str) -> ExperimentConfig:
    text = ""
    if args.config:
        text = Path(args.config).read_text()
    return parse_config(text, overrides=_overrides_from_args(args, case))


def _run_case(args: argparse.Namespace, case: str) -> int:
    cfg = _load_config(args, case)
    records = runner.run_sweep(cfg)
    if not cfg.out:
        print(runner.records_to_csv(records), end="")
    else:
        print(f"wrote {cfg.out} ({len(records)} records)")
        if cfg.plot:
            png = plots.plot_ber_csv(cfg.out)
            print(f"wrote {png}")
    if cfg.dump_llr_hist and cfg.plot:
        png = plots.plot_hist_dir(cfg.dump_llr_hist)
        print(f"wrote {png}")
    return 0


def _read_hist_pair(dump_dir: Path, stem: str) -> CondPdf | None:
    pos = dump_dir / f"{stem}_pos.txt"
    neg = dump_dir / f"{stem}_neg.txt"
    if not pos.exists() or not neg.exists():
        return None
    dpos = np.loadtxt(pos)
    dneg = np.loadtxt(neg)
    centers = dpos[:, 0]
    width = centers[1] - centers[0]
    edges = np.concatenate([centers - width / 2, [centers[-1] + width / 2]])
    return CondPdf(bin_edges=edges, mass_pos=dpos[:, 1], mass_neg=dneg[:, 1])


def _load_snr_map(path: str | None) -> SnrMap | None:
    if not path:
        return None
    blob = json.loads(Path(path).read_text())
    return SnrMap(coeffs=np.asarray(blob["coeffs"]), fit_range=tuple(blob["fit_range"]))


def _run_analyze(args: argparse.Namespace) -> int:
    dump_dir = Path(args.dumps)
    stats_files = sorted(dump_dir.glob("*_stats.json"))
    if not stats_files:
        print(f"no *_stats.json dumps found in {dump_dir}", file=sys.stderr)
        return 3
    snr_map = _load_snr_map(args.snr_map)
    lines = [ANALYSIS_HEADER]
    for stats_file in stats_files:
        stats = json.loads(stats_file.read_text())
        if "relay_data" not in stats:
            continue  # case2 stats carry no analysis taps
        prefix = stats_file.name[: -len("_stats.json")]
        scheme = stats["scheme"]
        if scheme == "hard":
            i_data = mutual_info_bsc(stats["data_flip"]["q"])
            i_code = mutual_info_bsc(stats["code_flip"]["q"])
        else:
            hist_data = _read_hist_pair(dump_dir, f"{prefix}_datallr")
            hist_code = _read_hist_pair(dump_dir, f"{prefix}_codesym")
            i_data = mutual_info_soft(hist_data) if hist_data else float("nan")
            i_code = mutual_info_soft(hist_code) if hist_code else float("nan")
        gamma_out = stats["dest_data"]["gamma"]
        ber_est = ber_from_gamma(gamma_out)
        gamma_eq_db = ""
        if snr_map is not None:
            try:
                gamma_eq = invert_snr_map(snr_map, gamma_out)
                gamma_eq_db = f"{10.0 * np.log10(gamma_eq):.4f}"
            except ValueError:
                gamma_eq_db = ""
        ber_sim = stats["ber_sim"]
        bits = stats["bits_sent"]
        ci = 1.96 * np.sqrt(max(ber_sim * (1 - ber_sim), 0.0) / bits)
        lines.append(
            f"{stats['snr_sr_db']:g},{scheme},{i_data:.6f},{i_code:.6f},"
            f"{gamma_eq_db},{ber_est:.6e},{ber_sim:.6e},{ci:.6e}"
        )
    out = Path(args.out)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(lines) - 1} rows)")
    if not args.no_plot and len(lines) > 1:
        png = plots.plot_analysis_csv(out)
        print(f"wrote {png}")
    return 0


def _run_fit_snrmap(args: argparse.Namespace) -> int:
    trellis = build_trellis(parse_code_string(args.code))
    gamma_in, gamma_out = runner.measure_snr_map(
        trellis,
        np.asarray(args.gamma_in),
        frames=args.frames,
        frame_length=args.frame_length,
        seed=args.seed,
    )
    snr_map = fit_snr_map(gamma_in, gamma_out)
    blob = {
        "code": args.code,
        "coeffs": list(snr_map.coeffs),
        "fit_range": list(snr_map.fit_range),
        "gamma_in": list(gamma_in),
        "gamma_out": list(gamma_out),
    }
    Path(args.out).write_text(json.dumps(blob, indent=2))
    print(f"wrote {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "case1":
            return _run_case(args, CASE1)
        if args.command == "case2":
            return _run_case(args, CASE2)
        if args.command == "analyze":
            return _run_analyze(args)
        if args.command == "fit-snrmap":
            return _run_fit_snrmap(args)
        parser.error(f"unknown command {args.command}")
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
