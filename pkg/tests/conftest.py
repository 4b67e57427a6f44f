from __future__ import annotations

import pytest

from tracerecon.evalharness import run_all
from tracerecon.synthgen import generate_suite


@pytest.fixture(scope="session")
def suite():
    return generate_suite(42)


@pytest.fixture(scope="session")
def evaluation():
    return run_all(42)
