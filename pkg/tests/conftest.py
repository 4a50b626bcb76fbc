"""Shared helpers for the test suite."""

import numpy as np

from kitaevwire import WireConfig


def random_config(rng, n_max=12, closed_ok=True):
    """Random wire with parameters in [-2, 2] and up to two defects."""
    n = int(rng.integers(3, n_max + 1))
    boundary = "closed" if (closed_ok and rng.random() < 0.5) else "open"
    n_defects = int(rng.integers(0, 3))
    sites = rng.choice(np.arange(1, n + 1), size=n_defects, replace=False)
    defects = tuple((int(s), float(rng.uniform(-2, 2))) for s in sites)
    return WireConfig(
        n_sites=n,
        hopping=float(rng.uniform(-2, 2)),
        pairing=complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
        chem_potential=float(rng.uniform(-2, 2)),
        boundary=boundary,
        defects=defects,
    )
