import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from steane_cec.circuit import build_fig1, build_fig2  # noqa: E402


@pytest.fixture(scope="session")
def fig1():
    return build_fig1()


@pytest.fixture(scope="session")
def fig2():
    return build_fig2()
