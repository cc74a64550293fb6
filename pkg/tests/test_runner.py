"""Sweep orchestration: seeding, stopping, CSV schema, determinism."""

import numpy as np
import pytest

from relaysim.config import parse_config
from relaysim.runner import CSV_HEADER, records_to_csv, resolve_workers, run_sweep
from relaysim.seeds import LINK_RD, LINK_SR, seed_schedule, substream


class TestSeedSchedule:
    def test_same_inputs_same_seed(self):
        assert seed_schedule(7, 123, LINK_SR) == seed_schedule(7, 123, LINK_SR)

    def test_distinct_links_distinct_seeds(self):
        assert seed_schedule(7, 123, LINK_SR) != seed_schedule(7, 123, LINK_RD)

    def test_master_seed_avalanche(self):
        a = seed_schedule(1, 0, 0)
        b = seed_schedule(2, 0, 0)
        assert bin(a ^ b).count("1") > 16  # roughly half the bits flip

    def test_no_collisions_over_ten_million_pairs(self):
        # Vectorized SplitMix64 over (frame, link) packs; the mapping is a
        # composition of bijections so any collision would be a bug.
        mask = np.uint64(0xFFFFFFFFFFFFFFFF)

        def mix(z):
            z = (z + np.uint64(0x9E3779B97F4A7C15)) & mask
            z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & mask
            z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & mask
            return z ^ (z >> np.uint64(31))

        frames = np.arange(10_000_000 // 8, dtype=np.uint64)
        links = np.arange(8, dtype=np.uint64)
        packs = ((frames[:, None] << np.uint64(4)) | links[None, :]).ravel()
        with np.errstate(over="ignore"):  # uint64 wraparound is the point
            master = mix(np.uint64(12345))
            seeds = mix(master ^ packs)
        assert np.unique(seeds).size == seeds.size
        # Spot-check the vectorized mix against the scalar implementation.
        assert int(seeds[4242]) == seed_schedule(12345, 4242 // 8, 4242 % 8)

    def test_link_id_range_enforced(self):
        with pytest.raises(ValueError):
            seed_schedule(1, 0, 16)

    def test_substreams_are_independent_generators(self):
        a = substream(1, 0, 0).normal(size=4)
        b = substream(1, 1, 0).normal(size=4)
        assert not np.allclose(a, b)


CASE1_SMALL = """
[experiment]
case = case1
variant = hard
frame_length = 200
seed = 3
[channel]
snr_sr_db = 2,6
snr_rd_db = 4
[stopping]
frames_max = 8
target_bit_errors = 40
"""

CASE2_SMALL = """
[experiment]
case = case2
variant = bcjr-llr
frame_length = 200
iterations = 3
seed = 3
[channel]
fading = rayleigh
snr_sr_db = 12
snr_rd_db = 12
snr_sd_db = 2
[stopping]
frames_max = 6
target_bit_errors = 40
"""


class TestRunSweep:
    def test_case1_record_per_point(self):
        records = run_sweep(parse_config(CASE1_SMALL))
        assert len(records) == 2
        for rec in records:
            assert rec.bits_sent >= 200
            assert rec.scheme == "hard"
            assert 0.0 <= rec.ber <= 1.0
            assert rec.bits_sent == rec.frames_sent * 200

    def test_stopping_rule_reaches_target_or_max(self):
        records = run_sweep(parse_config(CASE1_SMALL))
        for rec in records:
            assert rec.bit_errors >= 40 or rec.frames_sent == 8

    def test_case2_records_per_iteration(self):
        records = run_sweep(parse_config(CASE2_SMALL))
        assert [r.iteration for r in records] == [1, 2, 3]
        assert len({r.bits_sent for r in records}) == 1

    def test_csv_schema_golden(self):
        assert CSV_HEADER == (
            "scheme,snr_sr_db,snr_rd_db,snr_sd_db,iteration,bits_sent,bit_errors,"
            "frames_sent,frame_errors,ber,fer,ci95_halfwidth,seed"
        )
        records = run_sweep(parse_config(CASE1_SMALL))
        text = records_to_csv(records)
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "hard"
        assert first[3] == ""  # no direct link in case1
        assert first[4] == "1"

    def test_deterministic_across_worker_counts(self):
        cfg = parse_config(CASE2_SMALL)
        csv_serial = records_to_csv(run_sweep(cfg, workers=1))
        csv_parallel = records_to_csv(run_sweep(cfg, workers=4))
        assert csv_serial == csv_parallel

    def test_deterministic_repeat_same_seed(self):
        cfg = parse_config(CASE1_SMALL)
        assert records_to_csv(run_sweep(cfg)) == records_to_csv(run_sweep(cfg))

    def test_seed_changes_results(self):
        cfg = parse_config(CASE1_SMALL)
        cfg2 = parse_config(CASE1_SMALL, overrides={("experiment", "seed"): 4})
        assert records_to_csv(run_sweep(cfg)) != records_to_csv(run_sweep(cfg2))


class TestResolveWorkers:
    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv("RELAYSIM_THREADS", "7")
        assert resolve_workers(2) == 2

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv("RELAYSIM_THREADS", "3")
        assert resolve_workers() == 3

    def test_default_serial(self, monkeypatch):
        monkeypatch.delenv("RELAYSIM_THREADS", raising=False)
        assert resolve_workers() == 1


class TestDumps:
    def test_case2_dump_layout(self, tmp_path):
        cfg = parse_config(
            CASE2_SMALL,
            overrides={
                ("output", "dump_llr_hist"): str(tmp_path),
                ("output", "all_zero_mode"): True,
                ("stopping", "frames_max"): 3,
                ("stopping", "target_bit_errors"): 0,
            },
        )
        run_sweep(cfg)
        names = {p.name for p in tmp_path.iterdir()}
        prefix = "bcjr-llr_sr12_rd12_sd2"
        assert f"{prefix}_ysd_pos.txt" in names
        assert f"{prefix}_yrd_pos.txt" in names
        for it in (1, 2, 3):
            assert f"{prefix}_llr_iter{it}_pos.txt" in names
        assert f"{prefix}_stats.json" in names
        # All-zero mode conditions only on +1, so no _neg files.
        assert not any(n.endswith("_neg.txt") for n in names)
        data = np.loadtxt(tmp_path / f"{prefix}_ysd_pos.txt")
        assert data.shape[1] == 2
        assert data[:, 1].sum() == pytest.approx(1.0, abs=1e-9)

    def test_case1_dump_stats_json(self, tmp_path):
        cfg = parse_config(
            CASE1_SMALL,
            overrides={
                ("output", "dump_llr_hist"): str(tmp_path),
                ("channel", "snr_sr_db"): (4.0,),
                ("stopping", "frames_max"): 3,
                ("stopping", "target_bit_errors"): 0,
            },
        )
        run_sweep(cfg)
        import json

        stats = json.loads((tmp_path / "hard_sr4_rd4_stats.json").read_text())
        assert stats["scheme"] == "hard"
        assert stats["relay_data"]["n"] == 600
        assert 0.0 <= stats["data_flip"]["q"] <= 1.0
        assert "gamma" in stats["dest_data"]
