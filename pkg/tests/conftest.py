import numpy as np
import pytest

from dlgibbs import RngStream


@pytest.fixture
def stream():
    """Fresh deterministic stream factory; distinct ids per call site."""
    def make(seed=1234, stream_id=0):
        return RngStream(seed, stream_id)
    return make


def mc_se(x: np.ndarray) -> float:
    """Monte Carlo standard error of the sample mean."""
    return float(np.std(x, ddof=1) / np.sqrt(x.size))
