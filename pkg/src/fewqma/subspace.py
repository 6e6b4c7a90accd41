"""Symmetric and alternating subspaces of H^{⊗t} and the Slater witness state."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg
from .linalg import PureState, Subspace
from .permgroup import (
    MAX_DIM,
    Permutation,
    PermutationError,
    enumerate_perms,
    perm_unitary,
    permute_registers,
)
from .rng import make_rng, random_state, random_subspace, random_unitary

CLAIM_TOL = 1e-8
OVERLAP_TOL = 1e-9
TRACE_TOL = 1e-6


def _check(t: int, K: int) -> None:
    if t < 1 or K < 1:
        raise PermutationError("t and K must be positive")
    if K**t > MAX_DIM:
        raise PermutationError(f"{K}^{t} exceeds the {MAX_DIM} cap")


@lru_cache(maxsize=64)
def _group_average(t: int, K: int, signed: bool) -> np.ndarray:
    _check(t, K)
    perms = enumerate_perms(t)
    acc = np.zeros((K**t, K**t), dtype=complex)
    for p in perms:
        acc += (p.sign if signed else 1) * perm_unitary(p, K)
    acc /= len(perms)
    acc.setflags(write=False)
    return acc


def antisymmetrizer(t: int, K: int) -> np.ndarray:
    """(1/t!) Σ_π sgn(π) U_π, the projector onto Alt(H^{⊗t}) for H = C^K."""
    return _group_average(t, K, True)


def symmetrizer(t: int, K: int) -> np.ndarray:
    """(1/t!) Σ_π U_π, the projector onto Sym(H^{⊗t})."""
    return _group_average(t, K, False)


def pair_projector(kind: str, i: int, j: int, t: int, K: int) -> np.ndarray:
    """(I ± U_{(i j)})/2 on H^{⊗t}; ``kind`` is ``"sym"`` or ``"alt"``, positions 0-based."""
    _check(t, K)
    if kind not in ("sym", "alt"):
        raise ValueError(f"kind must be 'sym' or 'alt', not {kind!r}")
    u = perm_unitary(Permutation.transposition(t, i, j), K)
    eye = np.eye(K**t)
    return (eye + u) / 2 if kind == "sym" else (eye - u) / 2


@dataclass(frozen=True)
class AltSymContext:
    t: int
    K: int
    antisym: np.ndarray = field(repr=False)
    sym: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, t: int, K: int) -> "AltSymContext":
        return cls(t, K, antisymmetrizer(t, K), symmetrizer(t, K))

    def trace_residuals(self) -> dict[str, float]:
        return {
            "alt": abs(np.trace(self.antisym).real - math.comb(self.K, self.t)),
            "sym": abs(np.trace(self.sym).real - math.comb(self.K + self.t - 1, self.t)),
        }


def tensor_power(w: Subspace, t: int) -> Subspace:
    """Orthonormal basis of W^{⊗t} (product of basis vectors)."""
    return Subspace(linalg.kron_power(w.vectors, t), w.ambient_dim**t)


def alternating_part(w: Subspace, t: int) -> Subspace:
    """Alt(H^{⊗t}) ∩ W^{⊗t}, computed as the intersection of the two ranges."""
    alt = linalg.range_basis(antisymmetrizer(t, w.ambient_dim))
    return linalg.intersect(alt, tensor_power(w, t))


def slater(w: Subspace) -> PureState:
    """Antisymmetrized product of the columns of ``w``.

    For an orthonormal basis ψ_1..ψ_d of W this is
    (1/√d!) Σ_π sgn(π) U_π ψ_1 ⊗ ... ⊗ ψ_d, a unit vector spanning
    Alt(W^{⊗d}).
    """
    if not isinstance(w, Subspace):
        w = Subspace(np.asarray(w, dtype=complex))
    d, K = w.dim, w.ambient_dim
    if d == 0:
        raise ValueError("slater state of a zero-dimensional subspace is undefined")
    _check(d, K)
    prod = linalg.kron(*[w.vectors[:, i] for i in range(d)])
    out = np.zeros_like(prod)
    for p in enumerate_perms(d):
        out += p.sign * permute_registers(p, prod, K)
    out /= math.sqrt(math.factorial(d))
    return PureState(out, (K,) * d)


def sum_of_pair_symmetric(w: Subspace, t: int) -> Subspace:
    """Σ_{i≠j} Sym_ij(W^{⊗t}) as the span of the union of the pairwise ranges."""
    wt = tensor_power(w, t)
    vecs = []
    for i in range(t):
        for j in range(i + 1, t):
            img = pair_projector("sym", i, j, t, w.ambient_dim) @ wt.vectors
            vecs.extend(linalg.gram_schmidt(img).vectors.T)
    if not vecs:
        return Subspace.zero(wt.ambient_dim)
    return linalg.gram_schmidt(vecs)


@dataclass
class ClaimCheck:
    name: str
    anchor: str
    value: float
    tol: float
    passed: bool


@dataclass
class ClaimReport:
    d: int
    t: int
    K: int
    seed: int
    checks: list[ClaimCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, anchor: str, value: float, tol: float, passed: bool | None = None):
        ok = bool(value <= tol) if passed is None else bool(passed)
        self.checks.append(ClaimCheck(name, anchor, float(value), tol, ok))

    def __getitem__(self, name: str) -> ClaimCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _random_orthonormal_basis_of(w: Subspace, rng) -> Subspace:
    return Subspace(w.vectors @ random_unitary(w.dim, rng), w.ambient_dim)


def verify_claims(
    d: int,
    t: int,
    K: int,
    seed: int,
    trial: int = 0,
    *,
    n_perp_samples: int = 20,
    alt_override: np.ndarray | None = None,
) -> ClaimReport:
    """Check the subspace identities for a random d-dimensional W ⊂ C^K.

    ``alt_override`` replaces the antisymmetrizer everywhere it is used; it
    exists so that a corrupted projector can serve as a negative control.
    """
    if not 2 <= t <= d <= K:
        raise ValueError(f"need 2 <= t <= d <= K, got t={t}, d={d}, K={K}")
    if K ** max(t, d) > MAX_DIM:
        raise ValueError(f"{K}^{max(t, d)} exceeds the {MAX_DIM} cap")
    rng = make_rng(seed, d, t, K, trial)
    w = random_subspace(K, d, rng)
    rep = ClaimReport(d, t, K, seed)

    ctx = AltSymContext.build(t, K)
    a_t = ctx.antisym if alt_override is None else np.asarray(alt_override, dtype=complex)
    a_d = a_t if d == t else antisymmetrizer(d, K)

    rep.add("alt_trace", "dimension of the alternating subspace",
            abs(np.trace(a_t).real - math.comb(K, t)), TRACE_TOL)
    rep.add("sym_trace", "dimension of the symmetric subspace",
            abs(np.trace(ctx.sym).real - math.comb(K + t - 1, t)), TRACE_TOL)
    rep.add("alt_idempotent", "alternating projector is Hermitian idempotent",
            max(linalg.frob(a_t @ a_t - a_t), linalg.frob(a_t - a_t.conj().T)), linalg.STRUCT_TOL)

    wt = tensor_power(w, t)
    p_wt = wt.projector()
    rep.add("alt_w_trace", "dimension of Alt(W^t)",
            abs(np.trace(a_t @ p_wt).real - math.comb(d, t)), TRACE_TOL)
    rep.add("sym_w_trace", "dimension of Sym(W^t)",
            abs(np.trace(ctx.sym @ p_wt).real - math.comb(d + t - 1, t)), TRACE_TOL)

    # complement of Alt inside W^t equals the sum of pairwise symmetric parts
    alt_w = linalg.intersect(linalg.range_basis(a_t), wt)
    lhs = linalg.intersect(alt_w.complement(), wt)
    rhs = sum_of_pair_symmetric(w, t)
    rep.add("perp_alt_equals_sum_sym", "Alt(W^t)-perp inside W^t = sum of Sym_ij(W^t)",
            linalg.projector_distance(lhs, rhs), CLAIM_TOL)

    # Alt(W^d) is one-dimensional and spanned by the Slater state
    wd = tensor_power(w, d)
    p_wd = wd.projector()
    comp = a_d @ p_wd
    r = linalg.rank(comp)
    rep.add("alt_wd_rank_one", "Alt(W^d) is one-dimensional",
            abs(np.trace(comp).real - 1.0), TRACE_TOL, passed=r == 1 and abs(np.trace(comp).real - 1.0) <= TRACE_TOL)
    s1 = slater(_random_orthonormal_basis_of(w, rng))
    s2 = slater(_random_orthonormal_basis_of(w, rng))
    rep.add("slater_basis_independent", "Slater state independent of basis up to phase",
            abs(1.0 - abs(np.vdot(s1.amplitudes, s2.amplitudes))), OVERLAP_TOL)
    rep.add("slater_is_alternating", "Slater state lies in Alt(H^d)",
            float(np.linalg.norm(a_d @ s1.amplitudes - s1.amplitudes)), OVERLAP_TOL)

    rep.add("alt_commutes_with_w_power", "Alt(H^t) and W^t projectors commute",
            linalg.frob(a_t @ p_wt - p_wt @ a_t), CLAIM_TOL)

    worst = 0.0
    wd_alt = s1.amplitudes
    for _ in range(n_perp_samples):
        phi = random_state(K**d, rng)
        phi = phi - wd_alt * np.vdot(wd_alt, phi)
        phi /= np.linalg.norm(phi)
        worst = max(worst, float(np.linalg.norm(p_wd @ (a_d @ phi))))
    rep.add("alt_maps_slater_perp_outside_wd", "A_d maps states orthogonal to Alt(W^d) into (W^d)-perp",
            worst, CLAIM_TOL)
    return rep


def intersection_identity_residual(s1: Subspace, s2: Subspace) -> float:
    """|| Π_{(S1∩S2)⊥} - Π_{S1⊥ + S2⊥} ||_F"""
    left = linalg.intersect(s1, s2).complement()
    right = linalg.subspace_sum(s1.complement(), s2.complement())
    return linalg.projector_distance(left, right)


def tensor_complement_residual(s1: Subspace, s2: Subspace) -> float:
    """|| Π_{(S1⊗S2)⊥} - Π_{(S1⊥⊗H2) ⊕ (S1⊗S2⊥)} ||_F, plus the non-orthogonal sum form."""
    h1 = Subspace.full(s1.ambient_dim)
    h2 = Subspace.full(s2.ambient_dim)
    left = linalg.tensor_subspace(s1, s2).complement()
    a = linalg.tensor_subspace(s1.complement(), h2)
    b = linalg.tensor_subspace(s1, s2.complement())
    b_loose = linalg.tensor_subspace(h1, s2.complement())
    direct = linalg.projector(a) + linalg.projector(b)
    return max(
        linalg.frob(left.projector() - direct),
        linalg.projector_distance(left, linalg.subspace_sum(a, b_loose)),
    )
