"""Vector operations on the unit hypersphere.

Weight maps are plain 1-D float arrays. Anything returned by
:func:`normalize` has unit 2-norm.
"""

import numpy as np

from .errors import DimensionMismatch, ZeroVector

ZERO_NORM = 1e-12


def normalize(v):
    """Scale ``v`` to unit 2-norm.

    Raises :class:`ZeroVector` if ``||v|| < 1e-12``.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"expected a non-empty 1-D vector, got shape {v.shape}")
    norm = np.linalg.norm(v)
    if not norm >= ZERO_NORM:
        raise ZeroVector(f"vector norm {norm:.3g} is below {ZERO_NORM}")
    return v / norm


def is_zero(v):
    return not np.linalg.norm(v) >= ZERO_NORM


def cosine_similarity(a, b):
    """Dot product of two unit vectors, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.clip(np.dot(a, b), -1.0, 1.0))


def angle(a, b):
    """Angle in radians between two unit vectors."""
    return float(np.arccos(cosine_similarity(a, b)))


def random_unit_vectors(rng, count, p):
    """``count`` independent uniform draws from the unit sphere in R^p."""
    z = rng.standard_normal((count, p))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def null_similarity_stats(p, samples, seed, chunk=2000):
    """Mean and std of the cosine similarity of independent random unit vectors.

    For large ``p`` the similarity is approximately N(0, 1/p).

    Parameters
    ----------
    p : int
        Dimension, at least 2.
    samples : int
        Number of independent pairs, at least 1000.
    seed : int
        Seed for the generator; the result is deterministic given it.

    Returns
    -------
    (mean, std) : tuple of float
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    rng = np.random.default_rng(seed)
    sims = np.empty(samples)
    # chunked so p=10^4, samples=10^4 does not allocate 2 * 800 MB at once
    for start in range(0, samples, chunk):
        k = min(chunk, samples - start)
        a = random_unit_vectors(rng, k, p)
        b = random_unit_vectors(rng, k, p)
        sims[start:start + k] = np.einsum("ij,ij->i", a, b)
    return float(sims.mean()), float(sims.std())
