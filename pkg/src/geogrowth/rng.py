"""Counter-based random streams shared by simulation and resampling.

All stochastic code in the package draws from Philox streams keyed by
``(seed, index)``. Philox is counter-based, so a given key yields the same
sequence on every platform and every execution order, which is what makes
parallel resampling bit-identical to serial runs.
"""

from __future__ import annotations

import numpy as np

_MAX_SEED = 2**64


def substream(seed: int, index: int) -> np.random.Generator:
    """Return the generator for substream ``index`` of master seed ``seed``."""
    if not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if not 0 <= index < _MAX_SEED:
        raise ValueError(f"substream index out of range: {index}")
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
