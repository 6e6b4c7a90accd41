"""Dense complex linear algebra shared by every other module.

Matrices are plain ``numpy`` complex arrays. States and subspaces get thin
dataclass wrappers so that layouts and orthonormality travel with the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

# Tolerance tiers: structural checks, reconstruction checks, rank decisions.
STRUCT_TOL = 1e-9
RECON_TOL = 1e-8
RANK_TOL = 1e-7

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60


class LinalgError(ValueError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise LinalgError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def frob(a) -> float:
    return float(np.linalg.norm(a))


def is_hermitian(a, tol: float = STRUCT_TOL) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and frob(a - a.conj().T) <= tol * max(1.0, frob(a))


def is_unitary(a, tol: float = STRUCT_TOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return frob(a.conj().T @ a - np.eye(a.shape[0])) <= tol


def is_projector(a, tol: float = STRUCT_TOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return frob(a @ a - a) <= tol and frob(a - a.conj().T) <= tol


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors)."""
    if not ops:
        raise LinalgError("kron needs at least one operand")
    return reduce(np.kron, [np.asarray(o, dtype=complex) for o in ops])


def kron_power(a, n: int) -> np.ndarray:
    if n < 1:
        raise LinalgError("tensor power must be >= 1")
    return kron(*([a] * n))


@dataclass(frozen=True)
class PureState:
    """Unit vector over an explicit tensor-factor layout."""

    amplitudes: np.ndarray
    layout: tuple[int, ...] = ()

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        layout = tuple(int(x) for x in self.layout) or (amp.size,)
        if int(np.prod(layout)) != amp.size:
            raise LinalgError(f"layout {layout} does not match dimension {amp.size}")
        if abs(np.linalg.norm(amp) - 1.0) > STRUCT_TOL:
            raise LinalgError(f"state is not normalized (norm {np.linalg.norm(amp)!r})")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "layout", layout)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, vec, layout: Sequence[int] = ()) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        n = np.linalg.norm(vec)
        if n == 0:
            raise LinalgError("cannot normalize the zero vector")
        return cls(vec / n, tuple(layout))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, as_vector(other)))


def as_vector(x) -> np.ndarray:
    """Accept a PureState or anything array-like and return a flat complex vector."""
    if isinstance(x, PureState):
        return x.amplitudes
    return np.asarray(x, dtype=complex).reshape(-1)


@dataclass(frozen=True)
class Subspace:
    """Orthonormal column basis of a subspace of C^ambient_dim.

    ``vectors`` has shape (ambient_dim, dim); a zero-dimensional subspace is
    stored as an (ambient_dim, 0) array.
    """

    vectors: np.ndarray
    ambient_dim: int = field(default=-1)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        n = v.shape[0] if self.ambient_dim < 0 else self.ambient_dim
        if v.size == 0:
            v = np.zeros((n, 0), dtype=complex)
        if v.shape[0] != n:
            raise LinalgError(f"basis rows {v.shape[0]} != ambient dimension {n}")
        gram = v.conj().T @ v
        if v.shape[1] and np.max(np.abs(gram - np.eye(v.shape[1]))) > STRUCT_TOL:
            raise LinalgError("basis vectors are not orthonormal")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "ambient_dim", n)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.vectors.T)

    def projector(self) -> np.ndarray:
        return projector(self)

    def complement(self) -> "Subspace":
        return orth_complement(self)

    def contains(self, vec, tol: float = RECON_TOL) -> bool:
        v = as_vector(vec)
        return np.linalg.norm(v - self.vectors @ (self.vectors.conj().T @ v)) <= tol * max(
            1.0, np.linalg.norm(v)
        )

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex), n)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex), n)


def _round_robin(n: int):
    """Yield n-1 (or n) rounds of disjoint index pairs covering every pair once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                pairs.append((min(a, b), max(a, b)))
        yield pairs
        players = [players[0], players[-1]] + players[1:-1]


def _offdiag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return frob(off)


def _rotate_rows(m, p, q, r_pp, r_pq, r_qp, r_qq):
    """Return R^dag m for the block rotation R acting on index pairs (p, q)."""
    mp, mq = m[p, :], m[q, :]
    m[p, :] = np.conj(r_pp)[:, None] * mp + np.conj(r_qp)[:, None] * mq
    m[q, :] = np.conj(r_pq)[:, None] * mp + np.conj(r_qq)[:, None] * mq
    return m


def jacobi_eigh(h, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Each sweep visits every (p, q) pair once, grouped into rounds of disjoint
    pairs so that a whole round is applied as one block-diagonal rotation.
    Iteration stops when the off-diagonal Frobenius mass falls below
    ``tol * max(1, ||h||_F)``. Returns unsorted ``(eigenvalues, eigenvectors)``.
    """
    a = np.array(as_matrix(h), dtype=complex)
    n = a.shape[0]
    vh = np.eye(n, dtype=complex)  # V^dagger, kept row-major for cheap updates
    if n <= 1:
        return np.real(np.diag(a)).copy(), vh
    target = tol * max(1.0, frob(a))
    rounds = [np.array(r, dtype=int) for r in _round_robin(n)]
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= target:
            break
        for pairs in rounds:
            if pairs.size == 0:
                continue
            p, q = pairs[:, 0], pairs[:, 1]
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > 1e-300
            if not active.any():
                continue
            p, q, apq, mag = p[active], q[active], apq[active], mag[active]
            phase = apq / mag
            app = a[p, p].real
            aqq = a[q, q].real
            tau = (aqq - app) / (2.0 * mag)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # R = diag-phase then real rotation; columns p, q of R restricted to the pair.
            r_pp = c
            r_pq = s
            r_qp = -s * np.conj(phase)
            r_qq = c * np.conj(phase)
            # A' = R^dag A R computed as two row passes: R^dag A, then R^dag (R^dag A)^dag.
            a = _rotate_rows(a, p, q, r_pp, r_pq, r_qp, r_qq)
            a = _rotate_rows(np.ascontiguousarray(a.conj().T), p, q, r_pp, r_pq, r_qp, r_qq)
            a[p, q] = 0.0
            a[q, p] = 0.0
            vh = _rotate_rows(vh, p, q, r_pp, r_pq, r_qp, r_qq)
    else:
        if _offdiag_norm(a) > target:
            raise LinalgError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.real(np.diag(a)).copy(), vh.conj().T


def eigh(h, tol: float = STRUCT_TOL) -> tuple[np.ndarray, Subspace]:
    """Hermitian eigendecomposition, eigenvalues sorted in descending order.

    Raises ``LinalgError`` if ``h`` is not Hermitian within ``tol``. Within a
    degenerate cluster the returned eigenvectors are an arbitrary orthonormal
    basis of the eigenspace.
    """
    a = as_matrix(h)
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"eigh needs a square matrix, got {a.shape}")
    if not is_hermitian(a, tol):
        raise LinalgError("eigh input is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    vals, vecs = jacobi_eigh(a)
    order = np.argsort(-vals, kind="stable")
    vecs = vecs[:, order]
    # One pass of re-orthonormalization removes accumulated rotation drift.
    q, r = np.linalg.qr(vecs)
    q = q * (np.diag(r) / np.abs(np.diag(r)))[None, :]
    return vals[order], Subspace(q, a.shape[0])


def eigvalsh(h) -> np.ndarray:
    return eigh(h)[0]


def gram_schmidt(vs, tol: float = RANK_TOL, ambient_dim: int | None = None) -> Subspace:
    """Orthonormal basis of span(vs) by modified Gram-Schmidt with one re-orthogonalization.

    ``vs`` is a sequence of vectors or a matrix whose columns are the vectors.
    Vectors whose residual norm drops below ``tol`` are discarded.
    """
    if isinstance(vs, np.ndarray) and vs.ndim == 2:
        cols = [vs[:, j] for j in range(vs.shape[1])]
        n = vs.shape[0]
    else:
        cols = [as_vector(v) for v in vs]
        n = cols[0].size if cols else ambient_dim
    if n is None:
        raise LinalgError("ambient dimension unknown for an empty vector list")
    basis = np.zeros((n, min(n, len(cols))), dtype=complex)
    r = 0
    for v in cols:
        if r == n:
            break
        w = np.array(v, dtype=complex)
        if w.size != n:
            raise LinalgError("vectors have inconsistent dimensions")
        for _ in range(2):
            if r:
                w = w - basis[:, :r] @ (basis[:, :r].conj().T @ w)
        nrm = np.linalg.norm(w)
        if nrm < tol:
            continue
        basis[:, r] = w / nrm
        r += 1
    return Subspace(basis[:, :r], n)


def range_basis(m, tol: float = RANK_TOL) -> Subspace:
    """Column space of ``m`` via SVD; singular values below ``tol`` are treated as zero."""
    m = as_matrix(m)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    return Subspace(u[:, s > tol], m.shape[0])


def rank(m, tol: float = RANK_TOL) -> int:
    return int(np.sum(np.linalg.svd(as_matrix(m), compute_uv=False) > tol))


def complete_unitary(columns: Mapping[int, Sequence[complex]], dim: int) -> np.ndarray:
    """Unitary whose column ``j`` equals ``columns[j]`` for every assigned position.

    The remaining columns are an orthonormal completion, filled in position
    order from the computational basis.
    """
    for j in columns:
        if not 0 <= j < dim:
            raise LinalgError(f"column position {j} out of range for dim {dim}")
    pos = sorted(columns)
    assigned = np.zeros((dim, len(pos)), dtype=complex)
    for i, j in enumerate(pos):
        col = as_vector(columns[j])
        if col.size != dim:
            raise LinalgError(f"column {j} has length {col.size}, expected {dim}")
        assigned[:, i] = col
    gram = assigned.conj().T @ assigned
    if pos and np.max(np.abs(gram - np.eye(len(pos)))) > STRUCT_TOL:
        raise LinalgError("assigned columns are not orthonormal")
    free = [j for j in range(dim) if j not in columns]
    u = np.zeros((dim, dim), dtype=complex)
    u[:, pos] = assigned
    if free:
        seeds = [assigned[:, i] for i in range(len(pos))] + list(np.eye(dim, dtype=complex))
        filler = gram_schmidt(seeds, tol=1e-6).vectors[:, len(pos):]
        if filler.shape[1] != len(free):
            raise LinalgError("could not complete the unitary")
        u[:, free] = filler
    return u


def _check_same_ambient(*subspaces: Subspace) -> int:
    dims = {s.ambient_dim for s in subspaces}
    if len(dims) != 1:
        raise LinalgError(f"ambient dimension mismatch: {sorted(dims)}")
    return dims.pop()


def projector(b: Subspace) -> np.ndarray:
    v = b.vectors
    p = v @ v.conj().T
    return 0.5 * (p + p.conj().T)


def orth_complement(b: Subspace) -> Subspace:
    n = b.ambient_dim
    if b.dim == 0:
        return Subspace.full(n)
    seeds = list(b.vectors.T) + list(np.eye(n, dtype=complex))
    return Subspace(gram_schmidt(seeds, tol=1e-6).vectors[:, b.dim:], n)


def intersect(a: Subspace, b: Subspace, tol: float = RANK_TOL) -> Subspace:
    """Intersection via principal angles: cross-Gram singular values within ``tol`` of 1."""
    n = _check_same_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(a.vectors.conj().T @ b.vectors)
    keep = s >= 1.0 - tol
    if not keep.any():
        return Subspace.zero(n)
    return gram_schmidt(a.vectors @ u[:, : s.size][:, keep], tol=1e-6)


def subspace_sum(*subs: Subspace, tol: float = RANK_TOL) -> Subspace:
    """span of the union, S1 + S2 + ..."""
    n = _check_same_ambient(*subs)
    vecs = [v for s in subs for v in s.vectors.T]
    if not vecs:
        return Subspace.zero(n)
    return gram_schmidt(vecs, tol=tol)


def tensor_subspace(a: Subspace, b: Subspace) -> Subspace:
    return Subspace(np.kron(a.vectors, b.vectors), a.ambient_dim * b.ambient_dim)


def projector_distance(a: Subspace, b: Subspace) -> float:
    _check_same_ambient(a, b)
    return frob(projector(a) - projector(b))
