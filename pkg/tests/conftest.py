import numpy as np
import pytest
from hypothesis import settings

from bthowen.datasets import LabeledDataset
from support import ACCEPTANCE_LINES

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])


@pytest.fixture
def blobs():
    """Three well separated Gaussian classes in 4 dimensions."""
    rng = np.random.default_rng(7)
    centers = np.array([[0, 0, 0, 0], [4, 4, 0, 0], [0, 4, 4, 4]], dtype=float)
    labels = np.repeat(np.arange(3), 60)
    features = centers[labels] + rng.normal(scale=0.6, size=(labels.size, 4))
    order = rng.permutation(labels.size)
    return LabeledDataset(features[order], labels[order], 3, ["a", "b", "c"])
