"""CLI surface: subcommands, config merging, exit codes, artifacts."""

import json

import numpy as np
import pytest

from relaysim.cli import ANALYSIS_HEADER, main


def test_case1_writes_csv_and_figure(tmp_path, capsys):
    out = tmp_path / "c1.csv"
    rc = main(
        [
            "case1",
            "--variant", "hard",
            "--snr-sr", "2,4",
            "--snr-rd", "4",
            "--frame-length", "200",
            "--frames", "4",
            "--target-errors", "0",
            "--seed", "5",
            "--out", str(out),
        ]
    )
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 3
    assert out.with_suffix(".png").exists()


def test_case1_stdout_when_no_out(capsys):
    rc = main(
        [
            "case1",
            "--variant", "hard",
            "--snr-sr", "2",
            "--snr-rd", "4",
            "--frame-length", "100",
            "--frames", "2",
            "--target-errors", "0",
            "--no-plot",
        ]
    )
    assert rc == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("scheme,")


def test_case2_with_dump_dir(tmp_path):
    dumps = tmp_path / "dumps"
    out = tmp_path / "c2.csv"
    rc = main(
        [
            "case2",
            "--variant", "bcjr-llr",
            "--snr-sr", "12",
            "--snr-rd", "12",
            "--snr-sd", "2",
            "--iters", "2",
            "--frame-length", "150",
            "--frames", "2",
            "--target-errors", "0",
            "--seed", "9",
            "--out", str(out),
            "--dump-llr-hist", str(dumps),
            "--all-zero",
        ]
    )
    assert rc == 0
    assert (dumps / "histograms.png").exists()
    assert any(p.name.endswith("_llr_iter2_pos.txt") for p in dumps.iterdir())


def test_config_file_merges_with_flag_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "[experiment]\ncase = case1\nvariant = avg\nframe_length = 100\n"
        "[channel]\nsnr_sr_db = 2\nsnr_rd_db = 4\n"
        "[stopping]\nframes_max = 2\ntarget_bit_errors = 0\n"
    )
    out = tmp_path / "o.csv"
    rc = main(
        ["case1", "--config", str(cfg), "--variant", "hard", "--out", str(out),
         "--no-plot"]
    )
    assert rc == 0
    assert ",hard," not in out.read_text().split("\n")[0]
    assert out.read_text().split("\n")[1].startswith("hard,")


def test_config_error_exit_code_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[experiment]\nbogus = 1\n")
    rc = main(["case1", "--config", str(cfg)])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_runtime_error_exit_code_3(tmp_path, capsys):
    rc = main(["analyze", "--dumps", str(tmp_path / "missing"), "--out", "x.csv"])
    assert rc == 3


def test_fit_snrmap_then_analyze_pipeline(tmp_path):
    # Tiny end-to-end: dump taps, fit a map, run analyze against the dumps.
    dumps = tmp_path / "dumps"
    for variant in ("hard", "bcjr-llr"):
        rc = main(
            [
                "case1",
                "--variant", variant,
                "--snr-sr", "4",
                "--snr-rd", "6",
                "--frame-length", "400",
                "--frames", "6",
                "--target-errors", "0",
                "--seed", "3",
                "--dump-llr-hist", str(dumps),
                "--no-plot",
            ]
        )
        assert rc == 0

    map_path = tmp_path / "map.json"
    rc = main(
        [
            "fit-snrmap",
            "--code", "ff:7,5",
            "--gamma-in", "1,2,3,4,6,8,10,12",
            "--frames", "4",
            "--frame-length", "400",
            "--seed", "2",
            "--out", str(map_path),
        ]
    )
    assert rc == 0
    blob = json.loads(map_path.read_text())
    assert len(blob["coeffs"]) == 4
    assert np.all(np.diff(blob["gamma_out"]) > 0)

    analysis_csv = tmp_path / "analysis.csv"
    rc = main(
        [
            "analyze",
            "--dumps", str(dumps),
            "--out", str(analysis_csv),
            "--snr-map", str(map_path),
        ]
    )
    assert rc == 0
    lines = analysis_csv.read_text().strip().split("\n")
    assert lines[0] == ANALYSIS_HEADER
    assert len(lines) == 3
    by_scheme = {line.split(",")[1]: line.split(",") for line in lines[1:]}
    for scheme, cols in by_scheme.items():
        i_data, i_code = float(cols[2]), float(cols[3])
        assert 0.0 <= i_code <= i_data <= 1.0
    assert analysis_csv.with_suffix(".png").exists()
