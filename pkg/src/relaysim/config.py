"""Experiment configuration: line-oriented key=value files with sections.

The grammar is deliberately small: ``[section]`` headers, one ``key =
value`` pair per line, ``#`` comments and blank lines.  Lists are
comma-separated.  Parsing validates everything and reports *all* problems
with their line numbers instead of stopping at the first.

Sections and keys::

    [experiment]
    case = case1 | case2
    variant = hard | bcjr-llr | bcjr-tanh | avg
    crc = off | genie              (case2 hard only)
    code = ff:7,5 | rsc:1,5/7      (defaults per case)
    frame_length = 2000
    iterations = 5                 (case2)
    seed = 1
    [channel]
    fading = awgn | rayleigh
    snr_sr_db = 2,4,6,8
    snr_rd_db = 4
    snr_sd_db = 0,2,4              (case2)
    [stopping]
    frames_max = 5000
    target_bit_errors = 200
    [output]
    out = results.csv
    dump_llr_hist =                (directory; empty disables)
    all_zero_mode = false
    plot = true
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .relay import ALL_VARIANTS, CRC_GENIE, CRC_OFF, RelayVariant, VARIANT_HARD
from .trellis import CodeSpec, format_code_string, parse_code_string

CASE1 = "case1"
CASE2 = "case2"

_DEFAULT_CODES = {CASE1: "ff:7,5", CASE2: "rsc:1,5/7"}
_DEFAULT_FADING = {CASE1: "awgn", CASE2: "rayleigh"}


class ConfigError(ValueError):
    """Carries every validation problem found in a config text."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class ExperimentConfig:
    case: str = CASE1
    variant: RelayVariant = field(default_factory=RelayVariant)
    code: CodeSpec = field(default_factory=lambda: parse_code_string("ff:7,5"))
    frame_length: int = 2000
    iterations: int = 5
    seed: int = 1
    fading: str = "awgn"
    snr_sr_db: tuple[float, ...] = (4.0,)
    snr_rd_db: tuple[float, ...] = (4.0,)
    snr_sd_db: tuple[float, ...] = ()
    frames_max: int = 5000
    target_bit_errors: int = 200
    out: str = ""
    dump_llr_hist: str = ""
    all_zero_mode: bool = False
    plot: bool = True

    def sweep_points(self) -> list[tuple[float, float, float]]:
        """(snr_sr, snr_rd, snr_sd) tuples; sd is NaN for case1."""
        points = []
        if self.case == CASE1:
            for rd in self.snr_rd_db:
                for sr in self.snr_sr_db:
                    points.append((sr, rd, float("nan")))
        else:
            for sd in self.snr_sd_db:
                for rd in self.snr_rd_db:
                    for sr in self.snr_sr_db:
                        points.append((sr, rd, sd))
        return points


_SCHEMA = {
    ("experiment", "case"): "str",
    ("experiment", "variant"): "str",
    ("experiment", "crc"): "str",
    ("experiment", "code"): "str",
    ("experiment", "frame_length"): "int",
    ("experiment", "iterations"): "int",
    ("experiment", "seed"): "int",
    ("channel", "fading"): "str",
    ("channel", "snr_sr_db"): "floats",
    ("channel", "snr_rd_db"): "floats",
    ("channel", "snr_sd_db"): "floats",
    ("stopping", "frames_max"): "int",
    ("stopping", "target_bit_errors"): "int",
    ("output", "out"): "str",
    ("output", "dump_llr_hist"): "str",
    ("output", "all_zero_mode"): "bool",
    ("output", "plot"): "bool",
}


def _parse_value(kind: str, raw: str):
    if kind == "str":
        return raw
    if kind == "int":
        return int(raw)
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "floats":
        if not raw:
            return ()
        return tuple(float(tok) for tok in raw.split(","))
    raise AssertionError(kind)


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse and validate a config text; raises ConfigError listing every
    problem (with line numbers) rather than only the first one."""
    problems: list[str] = []
    seen: dict[tuple[str, str], object] = {}
    section = ""
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in {s for s, _ in _SCHEMA}:
                problems.append(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected key = value, got {line!r}")
            continue
        key, _, raw = line.partition("=")
        key = key.strip().lower()
        raw = raw.strip()
        kind = _SCHEMA.get((section, key))
        if kind is None:
            problems.append(f"line {lineno}: unknown key {key!r} in [{section}]")
            continue
        try:
            seen[(section, key)] = _parse_value(kind, raw)
        except ValueError:
            problems.append(
                f"line {lineno}: bad value {raw!r} for {key} (expected {kind})"
            )

    if overrides:
        seen.update(overrides)
    cfg, extra = _build_config(seen)
    problems.extend(extra)
    if problems:
        raise ConfigError(problems)
    return cfg


def _build_config(seen: dict) -> tuple[ExperimentConfig, list[str]]:
    problems: list[str] = []

    def get(section, key, default):
        return seen.get((section, key), default)

    case = get("experiment", "case", CASE1)
    if case not in (CASE1, CASE2):
        problems.append(f"case must be case1 or case2, got {case!r}")
        case = CASE1
    kind = get("experiment", "variant", VARIANT_HARD)
    crc = get("experiment", "crc", CRC_OFF)
    try:
        variant = RelayVariant(kind=kind, crc=crc)
    except ValueError as exc:
        problems.append(str(exc))
        variant = RelayVariant()
    if case == CASE1 and variant.crc != CRC_OFF:
        problems.append("case1 does not use a CRC at the relay")
    code_str = get("experiment", "code", _DEFAULT_CODES[case])
    try:
        code = parse_code_string(code_str)
    except ValueError as exc:
        problems.append(str(exc))
        code = parse_code_string(_DEFAULT_CODES[case])
    if case == CASE2 and not code.systematic:
        problems.append("case2 requires a recursive systematic code")

    frame_length = get("experiment", "frame_length", 2000)
    iterations = get("experiment", "iterations", 5)
    seed = get("experiment", "seed", 1)
    fading = get("channel", "fading", _DEFAULT_FADING[case])
    if fading not in ("awgn", "rayleigh"):
        problems.append(f"fading must be awgn or rayleigh, got {fading!r}")
        fading = "awgn"
    snr_sr = get("channel", "snr_sr_db", (4.0,))
    snr_rd = get("channel", "snr_rd_db", (4.0,))
    snr_sd = get("channel", "snr_sd_db", () if case == CASE1 else (0.0,))
    frames_max = get("stopping", "frames_max", 5000)
    target = get("stopping", "target_bit_errors", 200)

    if frame_length < 1:
        problems.append("frame_length must be >= 1")
    if iterations < 1:
        problems.append("iterations must be >= 1")
    if frames_max < 1:
        problems.append("frames_max must be >= 1")
    if target < 0:
        problems.append("target_bit_errors must be >= 0")
    if not snr_sr:
        problems.append("snr_sr_db must not be empty")
        snr_sr = (4.0,)
    if not snr_rd:
        problems.append("snr_rd_db must not be empty")
        snr_rd = (4.0,)
    if case == CASE2 and not snr_sd:
        problems.append("snr_sd_db must not be empty for case2")
        snr_sd = (0.0,)

    cfg = ExperimentConfig(
        case=case,
        variant=variant,
        code=code,
        frame_length=frame_length,
        iterations=iterations,
        seed=seed,
        fading=fading,
        snr_sr_db=tuple(snr_sr),
        snr_rd_db=tuple(snr_rd),
        snr_sd_db=tuple(snr_sd),
        frames_max=frames_max,
        target_bit_errors=target,
        out=get("output", "out", ""),
        dump_llr_hist=get("output", "dump_llr_hist", ""),
        all_zero_mode=get("output", "all_zero_mode", False),
        plot=get("output", "plot", True),
    )
    return cfg, problems


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; parse(serialize(cfg)) == cfg."""
    fmt = lambda xs: ",".join(format(x, "g") for x in xs)
    lines = [
        "[experiment]",
        f"case = {cfg.case}",
        f"variant = {cfg.variant.kind}",
        f"crc = {cfg.variant.crc}",
        f"code = {format_code_string(cfg.code)}",
        f"frame_length = {cfg.frame_length}",
        f"iterations = {cfg.iterations}",
        f"seed = {cfg.seed}",
        "[channel]",
        f"fading = {cfg.fading}",
        f"snr_sr_db = {fmt(cfg.snr_sr_db)}",
        f"snr_rd_db = {fmt(cfg.snr_rd_db)}",
        f"snr_sd_db = {fmt(cfg.snr_sd_db)}",
        "[stopping]",
        f"frames_max = {cfg.frames_max}",
        f"target_bit_errors = {cfg.target_bit_errors}",
        "[output]",
        f"out = {cfg.out}",
        f"dump_llr_hist = {cfg.dump_llr_hist}",
        f"all_zero_mode = {str(cfg.all_zero_mode).lower()}",
        f"plot = {str(cfg.plot).lower()}",
    ]
    return "\n".join(lines) + "\n"


def with_updates(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    return replace(cfg, **kwargs)
