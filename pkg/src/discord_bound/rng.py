"""Seeded random streams.

Every random draw in the package goes through :func:`stream`, which wraps
numpy's Philox counter-based bit generator.  Distinct ``(seed, *labels)``
tuples give statistically independent streams, so per-item randomness does
not depend on evaluation order or worker count.
"""

import numpy as np


def stream(seed, *labels):
    """Return a ``numpy.random.Generator`` for the key ``(seed, *labels)``."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(x) & 0xFFFFFFFFFFFFFFFF for x in labels]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def complex_gaussian(rng, shape):
    """Independent standard complex normals (unit variance per entry)."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def haar_unitary(dim, rng):
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    z = complex_gaussian(rng, (dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
