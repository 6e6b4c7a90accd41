"""Seeded random objects.

All randomness goes through a Philox (counter-based) generator keyed by a
master seed plus an arbitrary path of integers, so trial ``i`` draws the same
stream no matter how many trials run before or after it.
"""

from __future__ import annotations

import numpy as np

from .linalg import Subspace, gram_schmidt


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in keys]])
    return np.random.Generator(np.random.Philox(ss))


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(0 if rng is None else int(rng))


def complex_gaussian(rng, *shape) -> np.ndarray:
    rng = as_rng(rng)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_state(dim: int, rng) -> np.ndarray:
    v = complex_gaussian(rng, dim)
    return v / np.linalg.norm(v)


def random_state_in(sub: Subspace, rng) -> np.ndarray:
    """Haar-random unit vector inside ``sub``."""
    return sub.vectors @ random_state(sub.dim, rng)


def random_unitary(n: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def random_subspace(ambient: int, dim: int, rng) -> Subspace:
    if not 0 <= dim <= ambient:
        raise ValueError(f"cannot draw a {dim}-dimensional subspace of C^{ambient}")
    if dim == 0:
        return Subspace.zero(ambient)
    return gram_schmidt(complex_gaussian(rng, ambient, dim), tol=1e-6)


def random_hermitian(n: int, rng) -> np.ndarray:
    a = complex_gaussian(rng, n, n)
    return (a + a.conj().T) / 2
