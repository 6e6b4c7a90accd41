"""Eigenvalue/diagonal majorization and the vector-basis witness bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg


class MajorizationError(ValueError):
    pass


@dataclass(frozen=True)
class MajorizationInput:
    eigenvalues: tuple[float, ...]
    diagonal: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.eigenvalues)
        mu = tuple(float(x) for x in self.diagonal)
        if len(lam) != len(mu):
            raise MajorizationError(f"length mismatch: {len(lam)} eigenvalues, {len(mu)} diagonal entries")
        for name, seq in (("eigenvalues", lam), ("diagonal", mu)):
            if any(a < b for a, b in zip(seq, seq[1:])):
                raise MajorizationError(f"{name} must be sorted in descending order")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "diagonal", mu)

    @classmethod
    def from_matrix(cls, h) -> "MajorizationInput":
        h = linalg.as_matrix(h)
        vals, _ = linalg.eigh(h)
        diag = np.sort(np.real(np.diag(h)))[::-1]
        return cls(tuple(vals), tuple(diag))


def check_majorization(inp: MajorizationInput, tol: float = 1e-8) -> tuple[bool, np.ndarray]:
    """Partial sums s_t = Σ_{i<=t} (λ_i - μ_i); ok iff every s_t >= -tol and |s_R| <= tol."""
    slacks = np.cumsum(np.asarray(inp.eigenvalues) - np.asarray(inp.diagonal))
    if slacks.size == 0:
        return True, slacks
    ok = bool(np.all(slacks >= -tol) and abs(slacks[-1]) <= tol)
    return ok, slacks


@dataclass
class VectorWitnessBounds:
    lower: float  # lower bound on λ_d
    upper: float  # upper bound on λ_{d+1}
    certified: bool
    shape_ok: bool
    message: str = ""


def vfqma_bounds(mu, d: int, q: int, k: int) -> VectorWitnessBounds:
    """Eigenvalue bounds implied by acceptance probabilities of an orthonormal witness basis.

    ``mu`` lists the acceptance probabilities of the 2^k basis vectors with
    the d accepted ones first. They must meet mu_i >= 1 - 1/(3q) for i <= d
    and mu_i <= 1/(3 * 2^k) otherwise. Then
    λ_d >= -(d - 1) + Σ_{i<=d} mu_i and λ_{d+1} <= Σ_{i>d} mu_i.
    A shape violation is reported in the result, never repaired.
    """
    mu = np.asarray(mu, dtype=float)
    n = 2**k
    if mu.size != n:
        raise MajorizationError(f"expected {n} values, got {mu.size}")
    if not 1 <= d <= q <= n:
        raise MajorizationError(f"need 1 <= d <= q <= 2^k, got d={d}, q={q}, k={k}")
    hi = 1.0 - 1.0 / (3 * q)
    lo = 1.0 / (3 * n)
    problems = []
    if np.any(mu[:d] < hi):
        problems.append(f"accepted values below {hi:.6g}: {mu[:d][mu[:d] < hi].tolist()}")
    if np.any(mu[d:] > lo):
        problems.append(f"rejected values above {lo:.6g}: {mu[d:][mu[d:] > lo].tolist()}")
    lower = -(d - 1) + float(np.sum(mu[:d]))
    upper = float(np.sum(mu[d:]))
    shape_ok = not problems
    certified = shape_ok and lower >= 2 / 3 and upper <= 1 / 3
    return VectorWitnessBounds(lower, upper, certified, shape_ok, "; ".join(problems))


def no_instance_bound(mu) -> float:
    """Upper bound on λ_1 from the diagonal: the trace, since E is PSD."""
    return float(np.sum(np.asarray(mu, dtype=float)))


def basis_diagonal(e, basis) -> np.ndarray:
    """Diagonal of ``e`` in the orthonormal columns of ``basis`` (in column order)."""
    b = basis.vectors if isinstance(basis, linalg.Subspace) else np.asarray(basis)
    return np.real(np.einsum("ij,ik,kj->j", b.conj(), linalg.as_matrix(e), b))


@dataclass
class VectorWitnessInstance:
    instance: object  # verifier.PlantedInstance
    basis: np.ndarray  # columns: the witness basis, accepted directions first
    mu: np.ndarray
    mix: float


def make_vector_witness_instance(
    k: int, m: int, d: int, q: int, seed: int, trial: int = 0, r: int = 8, mix: float = 0.5
) -> VectorWitnessInstance:
    """Planted yes instance plus a basis that is *not* the eigenbasis but still has the vector shape.

    The eigenbasis of E is rotated by exp(i * mix * H) for a random unit-norm
    Hermitian H; ``mix`` is halved until the rotated diagonal meets the shape
    constraints.
    """
    from .rng import make_rng, random_hermitian
    from .verifier import acceptance_operator, make_instance

    n = 2**k
    if 2.0**-r > min(1 / (3 * n), 1 / (3 * q)):
        raise MajorizationError(f"r={r} too small for k={k}, q={q}")
    inst = make_instance("yes", k, m, d, q, r, seed, trial)
    e = acceptance_operator(inst.spec)
    _, vecs = linalg.eigh(e)
    rng = make_rng(seed, 0x40A9, trial)
    h = random_hermitian(n, rng)
    h /= linalg.frob(h)
    hv, hvec = linalg.eigh(h)
    for _ in range(40):
        rot = (hvec.vectors * np.exp(1j * mix * hv)) @ hvec.vectors.conj().T
        basis = vecs.vectors @ rot
        mu = basis_diagonal(e, basis)
        if vfqma_bounds(mu, d, q, k).shape_ok:
            return VectorWitnessInstance(inst, basis, mu, mix)
        mix /= 2
    raise MajorizationError("could not find a rotation meeting the vector shape")
