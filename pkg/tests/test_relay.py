"""Case-1 two-hop decode-and-forward chain."""

import numpy as np
import pytest

from relaysim.bcjr import bcjr_decode
from relaysim.channel import LinkConfig, RxFrame, bpsk_modulate, channel_llrs, transmit
from relaysim.relay import (
    ALL_VARIANTS,
    RelayVariant,
    relay_forward,
    run_case1_frame,
)
from relaysim.softenc import hard_decisions
from relaysim.trellis import encode_hard

HIGH_SNR = 25.0


def _links(snr_sr, snr_rd):
    return LinkConfig.from_snr_db(snr_sr), LinkConfig.from_snr_db(snr_rd)


class TestRelayVariant:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            RelayVariant(kind="amplify")

    def test_genie_crc_requires_hard(self):
        with pytest.raises(ValueError):
            RelayVariant(kind="bcjr-llr", crc="genie")

    def test_scheme_ids(self):
        assert RelayVariant("hard").scheme_id == "hard"
        assert RelayVariant("hard", "genie").scheme_id == "hard+crc"


class TestRelayForward:
    def test_hard_variant_unit_amplitudes(self, ff_trellis, rng):
        data = rng.integers(0, 2, 100)
        code = encode_hard(ff_trellis, data, terminate=True)
        link = LinkConfig.from_snr_db(HIGH_SNR)
        y_sr = transmit(bpsk_modulate(code), link, rng)
        block = relay_forward(y_sr, RelayVariant("hard"), ff_trellis)
        assert set(np.unique(block.symbols)) <= {-1.0, 1.0}
        assert block.beta == 1.0

    @pytest.mark.parametrize("kind", ALL_VARIANTS)
    def test_noiseless_first_hop_decodes_clean(self, kind, ff_trellis, rng):
        data = rng.integers(0, 2, 200)
        code = encode_hard(ff_trellis, data, terminate=True)
        link = LinkConfig.from_snr_db(HIGH_SNR)
        y_sr = transmit(bpsk_modulate(code), link, rng)
        block = relay_forward(y_sr, RelayVariant(kind), ff_trellis)
        # Destination with a clean second hop sees the exact block.
        clean = RxFrame(samples=block.symbols, h=1.0, link=LinkConfig(power=1.0, n0=0.02))
        dest = bcjr_decode(ff_trellis, channel_llrs(clean), terminated=False)
        np.testing.assert_array_equal(hard_decisions(dest.data_app), data)

    def test_soft_block_is_unit_power(self, ff_trellis, rng):
        data = rng.integers(0, 2, 500)
        code = encode_hard(ff_trellis, data, terminate=True)
        y_sr = transmit(bpsk_modulate(code), LinkConfig.from_snr_db(2.0), rng)
        for kind in ("bcjr-llr", "bcjr-tanh", "avg"):
            block = relay_forward(y_sr, RelayVariant(kind), ff_trellis)
            assert block.mean_power == pytest.approx(1.0, rel=1e-12)

    def test_all_zero_llrs_hit_normalization_error(self, ff_trellis):
        link = LinkConfig(power=1.0, n0=1.0)
        y_sr = RxFrame(samples=np.zeros(2 * 12), h=1.0, link=link)
        with pytest.raises(ValueError, match="all-zero"):
            relay_forward(y_sr, RelayVariant("bcjr-llr"), ff_trellis)


class TestRunCase1Frame:
    def test_high_snr_both_hops_error_free(self, ff_trellis, rng):
        link_sr, link_rd = _links(HIGH_SNR, HIGH_SNR)
        for kind in ALL_VARIANTS:
            res = run_case1_frame(
                ff_trellis,
                RelayVariant(kind),
                link_sr,
                link_rd,
                rng.integers(0, 2, 500),
                np.random.default_rng(1),
                np.random.default_rng(2),
            )
            assert res.bit_errors == 0
            assert not res.frame_error

    def test_fixed_seed_reproducible(self, ff_trellis):
        link_sr, link_rd = _links(3.0, 3.0)
        data = np.random.default_rng(5).integers(0, 2, 300)

        def run():
            return run_case1_frame(
                ff_trellis,
                RelayVariant("bcjr-tanh"),
                link_sr,
                link_rd,
                data,
                np.random.default_rng(11),
                np.random.default_rng(22),
            )

        a, b = run(), run()
        assert a.bit_errors == b.bit_errors
        assert a.frame_error == b.frame_error

    def test_diagnostics_taps_present_and_sized(self, ff_trellis, rng):
        link_sr, link_rd = _links(4.0, 4.0)
        res = run_case1_frame(
            ff_trellis,
            RelayVariant("avg"),
            link_sr,
            link_rd,
            rng.integers(0, 2, 100),
            np.random.default_rng(1),
            np.random.default_rng(2),
            collect_taps=True,
        )
        d = res.diagnostics
        assert d["relay_data_llr"].size == 100
        assert d["relay_symbols"].size == 200
        assert d["dest_data_llr"].size == 100

    def test_perfect_first_hop_matches_single_hop_hard(self, ff_trellis):
        # With an error-free source-relay link, hard DF is exactly a single
        # coded hop at SNR_rd (same noise draws, same decisions).
        snr_rd = 3.0
        errors_relay = 0
        errors_single = 0
        for f in range(40):
            data = np.random.default_rng(1000 + f).integers(0, 2, 500)
            link_sr, link_rd = _links(HIGH_SNR, snr_rd)
            res = run_case1_frame(
                ff_trellis,
                RelayVariant("hard"),
                link_sr,
                link_rd,
                data,
                np.random.default_rng(2 * f),
                np.random.default_rng(2 * f + 1),
            )
            errors_relay += res.bit_errors
            # One-hop baseline: same code, same rd-noise stream, but the
            # relay transmits an unterminated re-encoding, so mirror that.
            code = encode_hard(ff_trellis, data, terminate=False)
            rx = transmit(
                bpsk_modulate(code), link_rd, np.random.default_rng(2 * f + 1)
            )
            dec = bcjr_decode(ff_trellis, channel_llrs(rx), terminated=False)
            errors_single += int(np.sum(hard_decisions(dec.data_app) != data))
        assert errors_relay == errors_single
