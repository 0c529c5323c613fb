import pytest

from oracles import FROZEN, compute_all


def test_frozen_oracles_reproduce():
    fresh = compute_all()
    assert set(fresh) == set(FROZEN)
    for key, value in FROZEN.items():
        assert fresh[key] == pytest.approx(value, rel=1e-10), key
