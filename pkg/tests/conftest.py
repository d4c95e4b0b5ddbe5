import pytest

from quadstack import data
from quadstack.config import load_config


@pytest.fixture(scope="session")
def config_2j():
    return load_config(data.config_path("locoquad-2j"))


@pytest.fixture(scope="session")
def config_3j():
    return load_config(data.config_path("locoquad-3j"))
