import numpy as np
import pytest

from iomhash.dataio import SyntheticSpec, synth_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_dataset():
    return synth_dataset(SyntheticSpec(users=12, samples_per_user=4, dim=32, within_noise=0.33, seed=5))


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
