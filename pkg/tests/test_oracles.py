import json

import numpy as np
import oracles


def test_frozen_oracles_are_reproducible():
    frozen = json.loads(oracles.FROZEN.read_text())
    fresh = oracles.compute()
    assert set(fresh) == set(frozen)
    for key, value in frozen.items():
        assert np.allclose(fresh[key], value, rtol=1e-10, atol=1e-12), key
