import numpy as np
import pytest

from relaysim.analysis import fit_snr_map
from relaysim.runner import measure_snr_map
from relaysim.trellis import FF_7_5, RSC_1_5_7, build_trellis


@pytest.fixture(scope="session")
def ff_trellis():
    return build_trellis(FF_7_5)


@pytest.fixture(scope="session")
def rsc_trellis():
    return build_trellis(RSC_1_5_7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ff_snr_map(ff_trellis):
    """Measured-and-fitted decoder quality map for the feed-forward code.

    Shared by the analysis examples and the acceptance suite; moderate
    statistics keep it to a few seconds.
    """
    targets = np.array([0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.5, 8.0, 10.0, 12.0, 16.0])
    gamma_in, gamma_out = measure_snr_map(
        ff_trellis, targets, frames=8, frame_length=2000, seed=424242
    )
    return fit_snr_map(gamma_in, gamma_out)
