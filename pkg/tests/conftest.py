import logging

import pytest

from lpderham.utils.utils import reseed


@pytest.fixture
def rng():
    return reseed(5)


@pytest.fixture(autouse=True)
def quiet_logger():
    logging.getLogger('logger').setLevel(logging.WARNING)
    yield
