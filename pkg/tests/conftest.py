from __future__ import annotations

import pytest

from relaysched.channel import default_radio_config
from relaysched.mobility import BasePosition
from relaysched.service import Period, QuadratureSpec


@pytest.fixture(scope="session")
def cfg():
    return default_radio_config()


@pytest.fixture(scope="session")
def bs():
    return BasePosition(0.0, -15.0)


@pytest.fixture(scope="session")
def period():
    return Period(0.0, 5.0)


@pytest.fixture(scope="session")
def quad():
    return QuadratureSpec()
