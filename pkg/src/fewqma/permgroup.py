"""Symmetric group S_t and the register-permutation unitaries on (C^K)^{⊗t}.

Permutations are stored 0-based: ``images[i]`` is the image of position ``i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

MAX_T = 6
MAX_DIM = 4096


class PermutationError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise PermutationError(f"{imgs} is not a bijection of range({len(imgs)})")
        object.__setattr__(self, "images", imgs)

    @property
    def t(self) -> int:
        return len(self.images)

    @cached_property
    def sign(self) -> int:
        inv = sum(
            1
            for i in range(self.t)
            for j in range(i + 1, self.t)
            if self.images[i] > self.images[j]
        )
        return -1 if inv % 2 else 1

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Permutation":
        inv = [0] * self.t
        for i, img in enumerate(self.images):
            inv[img] = i
        return Permutation(tuple(inv))

    def __matmul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    @classmethod
    def identity(cls, t: int) -> "Permutation":
        return cls(tuple(range(t)))

    @classmethod
    def transposition(cls, t: int, i: int, j: int) -> "Permutation":
        if i == j:
            raise PermutationError("a transposition needs two distinct positions")
        imgs = list(range(t))
        imgs[i], imgs[j] = imgs[j], imgs[i]
        return cls(tuple(imgs))


def _check_t(t: int) -> None:
    if not 1 <= t <= MAX_T:
        raise PermutationError(f"t={t} outside supported range 1..{MAX_T}")


@lru_cache(maxsize=None)
def enumerate_perms(t: int) -> tuple[Permutation, ...]:
    """All t! permutations in lexicographic order of their image sequences."""
    _check_t(t)
    return tuple(Permutation(p) for p in itertools.permutations(range(t)))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """(a ∘ b)(i) = a(b(i))."""
    if a.t != b.t:
        raise PermutationError(f"cannot compose permutations of {a.t} and {b.t} points")
    return Permutation(tuple(a.images[b.images[i]] for i in range(a.t)))


def sign(p: Permutation) -> int:
    return p.sign


def perm_index(p: Permutation) -> int:
    """Rank of ``p`` in the lexicographic enumeration (Lehmer code)."""
    t = p.t
    remaining = list(range(t))
    idx = 0
    for pos, img in enumerate(p.images):
        k = remaining.index(img)
        idx += k * math.factorial(t - 1 - pos)
        remaining.pop(k)
    return idx


def perm_from_index(t: int, index: int) -> Permutation:
    _check_t(t)
    if not 0 <= index < math.factorial(t):
        raise PermutationError(f"index {index} outside [0, {t}!)")
    remaining = list(range(t))
    imgs = []
    for pos in range(t):
        f = math.factorial(t - 1 - pos)
        k, index = divmod(index, f)
        imgs.append(remaining.pop(k))
    return Permutation(tuple(imgs))


def _check_dim(t: int, local_dim: int) -> int:
    if local_dim < 1:
        raise PermutationError("local dimension must be positive")
    dim = local_dim**t
    if dim > MAX_DIM:
        raise PermutationError(f"{local_dim}^{t} = {dim} exceeds the {MAX_DIM} cap")
    return dim


def permute_registers(p: Permutation, state, local_dim: int) -> np.ndarray:
    """Apply U_p to a vector (or to the columns of a matrix) on (C^local_dim)^{⊗t}.

    U_p sends the content of register i to register p(i):
    U_p (e_{s_1} ⊗ ... ⊗ e_{s_t}) = e_{s'_1} ⊗ ... ⊗ e_{s'_t} with s'_{p(i)} = s_i.
    This is the action for which U_{a∘b} = U_a U_b.
    """
    dim = _check_dim(p.t, local_dim)
    arr = np.asarray(state)
    extra = arr.shape[1:]
    if arr.shape[0] != dim:
        raise PermutationError(f"state dimension {arr.shape[0]} != {local_dim}^{p.t}")
    tens = arr.reshape((local_dim,) * p.t + extra)
    axes = list(p.inverse().images) + list(range(p.t, p.t + len(extra)))
    return np.transpose(tens, axes).reshape(arr.shape)


@lru_cache(maxsize=256)
def _perm_targets(images: tuple[int, ...], local_dim: int) -> np.ndarray:
    p = Permutation(images)
    dim = local_dim**p.t
    # entry s of the result is the basis index that e_s is mapped to
    src = permute_registers(p, np.arange(dim), local_dim)
    targets = np.empty(dim, dtype=int)
    targets[src] = np.arange(dim)
    return targets


def perm_unitary(p: Permutation, local_dim: int) -> np.ndarray:
    """0/1 permutation matrix of U_p on (C^local_dim)^{⊗t}."""
    dim = _check_dim(p.t, local_dim)
    u = np.zeros((dim, dim), dtype=complex)
    u[_perm_targets(p.images, local_dim), np.arange(dim)] = 1.0
    return u
