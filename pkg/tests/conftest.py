import os
import sys

import numpy as np
import pytest

# allow running the suite from a source checkout without installation
# (the compiled kernels then fall back to the NumPy implementations)
_SRC = os.path.join(os.path.dirname(__file__), "..", "src")
try:
    import cellbench  # noqa: F401
except ImportError:
    sys.path.insert(0, os.path.abspath(_SRC))

sys.path.insert(0, os.path.dirname(__file__))  # for `oracles`


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_disk_map(shape, centers, radii):
    """Label map with one disk per (center, radius), labeled 1..n."""
    labels = np.zeros(shape, np.int32)
    yy, xx = np.mgrid[0 : shape[0], 0 : shape[1]]
    for k, ((cy, cx), r) in enumerate(zip(centers, radii), start=1):
        labels[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = k
    return labels


@pytest.fixture
def disk_map_factory():
    return make_disk_map
