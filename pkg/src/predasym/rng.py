"""Seeded random number generation.

Every stochastic routine in the package draws from numpy's PCG64 generator,
seeded through a SeedSequence so that one 64-bit master seed plus an integer
path ("spawn key") identifies each stream. Same seed and path, same platform
or not: bit-identical output.
"""

import numpy as np

from .exceptions import InvalidParams

Seed = int


def _as_int(value, name):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 0:
        raise InvalidParams(f"{name} must be a nonnegative integer, got {value!r}")
    return int(value)


def make_rng(seed: Seed, *path: int) -> np.random.Generator:
    """Return a PCG64 generator for `seed`, optionally at a derived path.

    `path` entries separate independent streams derived from one master seed
    (per realization, per column, per worker) without statistical overlap.
    """
    ss = np.random.SeedSequence(
        entropy=_as_int(seed, "seed"),
        spawn_key=tuple(_as_int(p, "path entry") for p in path),
    )
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: Seed, *path: int) -> Seed:
    """Collapse (seed, path) into a single integer child seed.

    Used where an API accepts one seed (e.g. a SystemSpec) but the caller
    manages a whole grid of them, as in ensemble sweeps.
    """
    ss = np.random.SeedSequence(
        entropy=_as_int(seed, "seed"),
        spawn_key=tuple(_as_int(p, "path entry") for p in path),
    )
    return int(ss.generate_state(1, np.uint64)[0])
