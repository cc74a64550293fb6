"""Sweep orchestration: Monte Carlo stopping, worker pool, CSV and dumps.

Frames are simulated in fixed-size batches in frame-index order; the
stopping rule is evaluated only at batch boundaries and every (frame, link)
pair draws from its own seeded substream, so the emitted records are
byte-identical no matter how many workers ran the batch.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, dtc, relay, seeds
from .bcjr import bcjr_decode
from .channel import LinkConfig, bpsk_modulate, channel_llrs, transmit
from .config import CASE1, ExperimentConfig
from .trellis import Trellis, build_trellis, encode_hard

_BATCH = 32

CSV_HEADER = (
    "scheme,snr_sr_db,snr_rd_db,snr_sd_db,iteration,bits_sent,bit_errors,"
    "frames_sent,frame_errors,ber,fer,ci95_halfwidth,seed"
)


@dataclass
class BerRecord:
    """One Monte Carlo sweep point (per turbo iteration for case2)."""

    scheme: str
    snr_sr_db: float
    snr_rd_db: float
    snr_sd_db: float
    iteration: int
    bits_sent: int
    bit_errors: int
    frames_sent: int
    frame_errors: int
    seed: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames_sent

    @property
    def ci95_halfwidth(self) -> float:
        p = self.ber
        return 1.96 * np.sqrt(max(p * (1.0 - p), 0.0) / self.bits_sent)

    def to_csv_row(self) -> str:
        sd = "" if np.isnan(self.snr_sd_db) else format(self.snr_sd_db, "g")
        return ",".join(
            [
                self.scheme,
                format(self.snr_sr_db, "g"),
                format(self.snr_rd_db, "g"),
                sd,
                str(self.iteration),
                str(self.bits_sent),
                str(self.bit_errors),
                str(self.frames_sent),
                str(self.frame_errors),
                f"{self.ber:.8e}",
                f"{self.fer:.8e}",
                f"{self.ci95_halfwidth:.8e}",
                str(self.seed),
            ]
        )


def records_to_csv(records: list[BerRecord]) -> str:
    return "\n".join([CSV_HEADER] + [r.to_csv_row() for r in records]) + "\n"


def write_csv(records: list[BerRecord], path: str | Path) -> None:
    Path(path).write_text(records_to_csv(records))


def resolve_workers(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("RELAYSIM_THREADS")
    return max(1, int(env)) if env else 1


class _HistAccum:
    """Mergeable histogram counts per condition; finalizes to a CondPdf."""

    def __init__(self, bins: int, lo: float, hi: float):
        self.edges = np.linspace(lo, hi, bins + 1)
        self.lo, self.hi, self.bins = lo, hi, bins
        self.counts_pos = np.zeros(bins)
        self.counts_neg = np.zeros(bins)

    def add(self, values: np.ndarray, truth: np.ndarray) -> None:
        values = np.clip(np.asarray(values, dtype=float), self.lo, self.hi)
        truth = np.asarray(truth)
        for sign, counts in ((1, self.counts_pos), (-1, self.counts_neg)):
            sel = values[truth * sign > 0]
            if sel.size:
                counts += np.histogram(sel, bins=self.bins, range=(self.lo, self.hi))[0]

    def mass(self, condition: int) -> np.ndarray | None:
        counts = self.counts_pos if condition > 0 else self.counts_neg
        total = counts.sum()
        return counts / total if total > 0 else None

    def write(self, directory: Path, stem: str) -> None:
        """Two-column (bin_center, mass) text file per non-empty condition."""
        centers = 0.5 * (self.edges[:-1] + self.edges[1:])
        for cond, tag in ((1, "pos"), (-1, "neg")):
            mass = self.mass(cond)
            if mass is None:
                continue
            lines = [f"{c:.6f} {m:.8e}" for c, m in zip(centers, mass)]
            (directory / f"{stem}_{tag}.txt").write_text("\n".join(lines) + "\n")


class _StatsAccum:
    """Streaming folded-moment accumulator for L-value taps."""

    def __init__(self):
        self.n = 0
        self.s1 = 0.0
        self.s2 = 0.0

    def add(self, values: np.ndarray, truth: np.ndarray) -> None:
        folded = np.asarray(values, dtype=float) * np.asarray(truth, dtype=float)
        self.n += folded.size
        self.s1 += folded.sum()
        self.s2 += (folded**2).sum()

    def summary(self) -> dict:
        if self.n == 0:
            return {"n": 0}
        mu = self.s1 / self.n
        var = max(self.s2 / self.n - mu * mu, 0.0)
        gamma = float("inf") if var == 0 else mu * mu / var
        return {"n": self.n, "mu": mu, "sigma2": var, "gamma": gamma}


def _point_prefix(scheme: str, sr: float, rd: float, sd: float) -> str:
    parts = [scheme, f"sr{sr:g}", f"rd{rd:g}"]
    if not np.isnan(sd):
        parts.append(f"sd{sd:g}")
    return "_".join(parts)


def _frame_data(cfg: ExperimentConfig, frame_idx: int) -> np.ndarray:
    if cfg.all_zero_mode:
        return np.zeros(cfg.frame_length, dtype=np.int8)
    rng = seeds.substream(cfg.seed, frame_idx, seeds.STREAM_DATA)
    return rng.integers(0, 2, size=cfg.frame_length).astype(np.int8)


def _run_point_case1(cfg, trellis, sr, rd, sd, pool, dump_dir):
    link_sr = LinkConfig.from_snr_db(sr, cfg.fading)
    link_rd = LinkConfig.from_snr_db(rd, cfg.fading)
    collect = dump_dir is not None
    accums = None
    if collect:
        accums = {
            "datallr": _HistAccum(analysis.HIST_BINS, *analysis.LLR_HIST_RANGE),
            "codesym": _HistAccum(analysis.HIST_BINS, *analysis.SYMBOL_HIST_RANGE),
            "destllr": _HistAccum(analysis.HIST_BINS, *analysis.LLR_HIST_RANGE),
            "stats_data": _StatsAccum(),
            "stats_dest": _StatsAccum(),
        }
        code_flips = 0
        code_bits = 0
        data_flips = 0
        data_bits = 0

    def one(frame_idx: int):
        return relay.run_case1_frame(
            trellis,
            cfg.variant,
            link_sr,
            link_rd,
            _frame_data(cfg, frame_idx),
            seeds.substream(cfg.seed, frame_idx, seeds.LINK_SR),
            seeds.substream(cfg.seed, frame_idx, seeds.LINK_RD),
            collect_taps=collect,
        )

    bits = errors = frames = frame_errs = 0
    next_frame = 0
    while frames < cfg.frames_max and (
        cfg.target_bit_errors == 0 or errors < cfg.target_bit_errors
    ):
        batch = list(range(next_frame, min(next_frame + _BATCH, cfg.frames_max)))
        if not batch:
            break
        next_frame = batch[-1] + 1
        results = list(pool.map(one, batch)) if pool else [one(i) for i in batch]
        for res in results:
            bits += res.k_data
            errors += res.bit_errors
            frames += 1
            frame_errs += int(res.frame_error)
            if collect:
                d = res.diagnostics
                accums["datallr"].add(d["relay_data_llr"], d["relay_data_truth"])
                accums["codesym"].add(d["relay_symbols"], d["relay_code_truth"])
                accums["destllr"].add(d["dest_data_llr"], d["dest_data_truth"])
                accums["stats_data"].add(d["relay_data_llr"], d["relay_data_truth"])
                accums["stats_dest"].add(d["dest_data_llr"], d["dest_data_truth"])
                signs = np.sign(d["relay_symbols"])
                code_flips += int(np.sum(signs * d["relay_code_truth"] < 0))
                code_bits += signs.size
                data_signs = 1.0 - 2.0 * d["relay_hard_bits"]
                data_flips += int(np.sum(data_signs * d["relay_data_truth"] < 0))
                data_bits += data_signs.size

    record = BerRecord(
        scheme=cfg.variant.scheme_id,
        snr_sr_db=sr,
        snr_rd_db=rd,
        snr_sd_db=sd,
        iteration=1,
        bits_sent=bits,
        bit_errors=errors,
        frames_sent=frames,
        frame_errors=frame_errs,
        seed=cfg.seed,
    )
    if collect:
        prefix = _point_prefix(cfg.variant.scheme_id, sr, rd, sd)
        for tag in ("datallr", "codesym", "destllr"):
            accums[tag].write(dump_dir, f"{prefix}_{tag}")
        stats = {
            "scheme": cfg.variant.scheme_id,
            "snr_sr_db": sr,
            "snr_rd_db": rd,
            "relay_data": accums["stats_data"].summary(),
            "dest_data": accums["stats_dest"].summary(),
            "code_flip": {"q": code_flips / code_bits, "n": code_bits},
            "data_flip": {"q": data_flips / data_bits, "n": data_bits},
            "ber_sim": record.ber,
            "bits_sent": bits,
        }
        (dump_dir / f"{prefix}_stats.json").write_text(json.dumps(stats, indent=2))
    return [record]


def _run_point_case2(cfg, trellis, sr, rd, sd, pool, dump_dir):
    link_sr = LinkConfig.from_snr_db(sr, cfg.fading)
    link_sd = LinkConfig.from_snr_db(sd, cfg.fading)
    link_rd = LinkConfig.from_snr_db(rd, cfg.fading)
    perm = dtc.make_interleaver(
        cfg.frame_length, seeds.seed_schedule(cfg.seed, 0, seeds.STREAM_PERM)
    )
    collect = dump_dir is not None
    accums = None
    if collect:
        accums = {
            "ysd": _HistAccum(analysis.HIST_BINS, -5.0, 5.0),
            "yrd": _HistAccum(analysis.HIST_BINS, -5.0, 5.0),
        }
        for it in range(cfg.iterations):
            accums[f"llr_iter{it + 1}"] = _HistAccum(
                analysis.HIST_BINS, *analysis.LLR_HIST_RANGE
            )
        relay_failures = 0

    def one(frame_idx: int):
        return dtc.run_case2_frame(
            trellis,
            cfg.variant,
            link_sr,
            link_sd,
            link_rd,
            _frame_data(cfg, frame_idx),
            perm,
            cfg.iterations,
            seeds.substream(cfg.seed, frame_idx, seeds.LINK_SR),
            seeds.substream(cfg.seed, frame_idx, seeds.LINK_SD),
            seeds.substream(cfg.seed, frame_idx, seeds.LINK_RD),
            collect_taps=collect,
        )

    iters = cfg.iterations
    bits = frames = 0
    errors = np.zeros(iters, dtype=np.int64)
    frame_errs = np.zeros(iters, dtype=np.int64)
    next_frame = 0
    while frames < cfg.frames_max and (
        cfg.target_bit_errors == 0 or errors[-1] < cfg.target_bit_errors
    ):
        batch = list(range(next_frame, min(next_frame + _BATCH, cfg.frames_max)))
        if not batch:
            break
        next_frame = batch[-1] + 1
        results = list(pool.map(one, batch)) if pool else [one(i) for i in batch]
        for res in results:
            bits += res.k_data
            frames += 1
            errors += res.per_iter_errors
            frame_errs += (res.per_iter_errors > 0).astype(np.int64)
            if collect:
                d = res.diagnostics
                accums["ysd"].add(d["ysd_matched"], d["ysd_truth"])
                accums["yrd"].add(d["yrd_matched"], d["yrd_truth"])
                for it, llrs in enumerate(d["per_iter_llrs"]):
                    accums[f"llr_iter{it + 1}"].add(llrs, d["data_truth"])
                relay_failures += int(res.relay_failed)

    records = [
        BerRecord(
            scheme=cfg.variant.scheme_id,
            snr_sr_db=sr,
            snr_rd_db=rd,
            snr_sd_db=sd,
            iteration=it + 1,
            bits_sent=bits,
            bit_errors=int(errors[it]),
            frames_sent=frames,
            frame_errors=int(frame_errs[it]),
            seed=cfg.seed,
        )
        for it in range(iters)
    ]
    if collect:
        prefix = _point_prefix(cfg.variant.scheme_id, sr, rd, sd)
        for tag, acc in accums.items():
            acc.write(dump_dir, f"{prefix}_{tag}")
        stats = {
            "scheme": cfg.variant.scheme_id,
            "snr": {"sr": sr, "rd": rd, "sd": sd},
            "frames": frames,
            "relay_failures": relay_failures,
            "ber_final": records[-1].ber,
        }
        (dump_dir / f"{prefix}_stats.json").write_text(json.dumps(stats, indent=2))
    return records


def run_sweep(cfg: ExperimentConfig, workers: int | None = None) -> list[BerRecord]:
    """Simulate every sweep point of the config; write CSV/dumps if asked."""
    trellis = build_trellis(cfg.code)
    n_workers = resolve_workers(workers)
    dump_dir = None
    if cfg.dump_llr_hist:
        dump_dir = Path(cfg.dump_llr_hist)
        dump_dir.mkdir(parents=True, exist_ok=True)

    point_runner = _run_point_case1 if cfg.case == CASE1 else _run_point_case2
    records: list[BerRecord] = []
    pool = ThreadPoolExecutor(max_workers=n_workers) if n_workers > 1 else None
    try:
        for sr, rd, sd in cfg.sweep_points():
            records.extend(point_runner(cfg, trellis, sr, rd, sd, pool, dump_dir))
    finally:
        if pool:
            pool.shutdown()
    if cfg.out:
        write_csv(records, cfg.out)
    return records


def measure_snr_map(
    trellis: Trellis,
    gamma_in_targets: np.ndarray,
    frames: int,
    frame_length: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Measure the decoder's input->output LLR quality transfer on AWGN.

    For each target input quality, the channel SNR is set so the expected
    folded channel-LLR gamma matches it; both gammas are then measured from
    the simulation (input over all code-bit L-values, output over the data
    APPs).
    """
    gamma_in_meas = []
    gamma_out_meas = []
    for idx, target in enumerate(np.asarray(gamma_in_targets, dtype=float)):
        link = LinkConfig.from_snr_db(10.0 * np.log10(target / 2.0))
        in_acc = _StatsAccum()
        out_acc = _StatsAccum()
        for f in range(frames):
            rng_data = seeds.substream(seed, f, seeds.STREAM_DATA)
            data = rng_data.integers(0, 2, size=frame_length).astype(np.int8)
            code = encode_hard(trellis, data, terminate=True)
            rng_ch = seeds.substream(seed + 1000003 * (idx + 1), f, seeds.LINK_SR)
            rx = transmit(bpsk_modulate(code), link, rng_ch)
            llrs = channel_llrs(rx)
            out = bcjr_decode(trellis, llrs, terminated=True)
            in_acc.add(llrs, bpsk_modulate(code))
            out_acc.add(out.raw_data_app, bpsk_modulate(data))
        gamma_in_meas.append(in_acc.summary()["gamma"])
        gamma_out_meas.append(out_acc.summary()["gamma"])
    return np.asarray(gamma_in_meas), np.asarray(gamma_out_meas)
