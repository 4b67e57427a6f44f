from __future__ import annotations

import pytest

from .properties import ALL_CHECKS


@pytest.mark.parametrize("name", sorted(ALL_CHECKS))
def test_property(name):
    ALL_CHECKS[name]()
