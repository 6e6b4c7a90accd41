"""Verification procedures: acceptance operators, planted instances, class membership.

Qubit order is big-endian with the k witness qubits first and the m
auxiliary qubits last; the output qubit is qubit 0 (the most significant bit).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import linalg
from .linalg import Subspace
from .rng import make_rng, random_state_in, random_subspace, random_unitary

MAX_DIM = 4096
CMP_TOL = 1e-9


class VerifierError(ValueError):
    pass


@dataclass(frozen=True)
class VerifierSpec:
    k: int
    m: int
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.k < 1 or self.m < 0:
            raise VerifierError(f"need k >= 1 and m >= 0, got k={self.k}, m={self.m}")
        if self.k + self.m < 1 or 2 ** (self.k + self.m) > MAX_DIM:
            raise VerifierError(f"2^(k+m) = {2 ** (self.k + self.m)} exceeds the {MAX_DIM} cap")
        v = np.array(self.v, dtype=complex)
        if v.shape != (self.dim, self.dim):
            raise VerifierError(f"V has shape {v.shape}, expected {(self.dim, self.dim)}")
        if not linalg.is_unitary(v):
            raise VerifierError("V is not unitary within 1e-9")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return 2 ** (self.k + self.m)

    @property
    def witness_dim(self) -> int:
        return 2**self.k

    def to_json(self) -> dict:
        flat = self.v.reshape(-1)
        return {
            "k": self.k,
            "m": self.m,
            "v": [[float(z.real), float(z.imag)] for z in flat],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VerifierSpec":
        try:
            k, m = int(obj["k"]), int(obj["m"])
            pairs = np.asarray(obj["v"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise VerifierError(f"malformed verifier object: {exc}") from exc
        n = 2 ** (k + m)
        if pairs.shape != (n * n, 2):
            raise VerifierError(f"'v' must hold {n * n} [re, im] pairs, got shape {pairs.shape}")
        return cls(k, m, (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "VerifierSpec":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise VerifierError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json(obj)


def pi_acc(k: int, m: int) -> np.ndarray:
    """|1><1| on the output qubit, identity elsewhere."""
    one = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(one, np.eye(2 ** (k + m - 1)))


def pi_init(k: int, m: int) -> np.ndarray:
    zero = np.zeros((2**m, 2**m), dtype=complex)
    zero[0, 0] = 1.0
    return np.kron(np.eye(2**k), zero)


def pi_x(v: VerifierSpec) -> np.ndarray:
    """Π_init V† Π_acc V Π_init on all k+m qubits."""
    p_init = pi_init(v.k, v.m)
    out = p_init @ v.v.conj().T @ pi_acc(v.k, v.m) @ v.v @ p_init
    return 0.5 * (out + out.conj().T)


def init_embedding(k: int, m: int) -> np.ndarray:
    """Isometry |ψ> -> |ψ> ⊗ |0^m>, shape (2^(k+m), 2^k)."""
    zero = np.zeros((2**m, 1), dtype=complex)
    zero[0, 0] = 1.0
    return np.kron(np.eye(2**k), zero)


def accept_branch(v: VerifierSpec) -> np.ndarray:
    """Π_acc V (· ⊗ |0^m>) as a 2^(k+m) x 2^k matrix."""
    cols = v.v[:, :: 2**v.m]
    return pi_acc(v.k, v.m) @ cols


def acceptance_operator(v: VerifierSpec) -> np.ndarray:
    """E on the witness space with <ψ|E|ψ> = ||Π_acc V (|ψ> ⊗ |0^m>)||^2."""
    b = accept_branch(v)
    e = b.conj().T @ b
    return 0.5 * (e + e.conj().T)


def acceptance_probability(v: VerifierSpec, psi) -> float:
    psi = linalg.as_vector(psi)
    if psi.size != v.witness_dim:
        raise VerifierError(f"witness has dimension {psi.size}, expected {v.witness_dim}")
    out = pi_acc(v.k, v.m) @ (v.v @ (init_embedding(v.k, v.m) @ psi))
    return float(np.vdot(out, out).real)


def plant_verifier(
    k: int,
    m: int,
    basis: Subspace,
    accepted_eigs: Sequence[float],
    background_eigs: Sequence[float],
    seed: int = 0,
) -> VerifierSpec:
    """Build a unitary V whose acceptance operator has a prescribed eigendecomposition.

    The d columns of ``basis`` get ``accepted_eigs``; an orthonormal
    completion of them (randomized by ``seed``) gets ``background_eigs``.
    Each direction v_i is mapped to
    √λ_i |1>|tail_i> + √(1-λ_i) |0>|tail_i>, with the tails orthonormal, so
    the image set stays orthonormal and the rest of V is a unitary completion.
    """
    if m < 1:
        raise VerifierError("planting needs at least one auxiliary qubit")
    n_w = 2**k
    if basis.ambient_dim != n_w:
        raise VerifierError(f"planted basis lives in dim {basis.ambient_dim}, expected {n_w}")
    d = basis.dim
    accepted = [float(x) for x in accepted_eigs]
    background = [float(x) for x in background_eigs]
    if len(accepted) != d or len(background) != n_w - d:
        raise VerifierError(
            f"need {d} accepted and {n_w - d} background eigenvalues, "
            f"got {len(accepted)} and {len(background)}"
        )
    lams = np.array(accepted + background)
    if np.any(lams < 0) or np.any(lams > 1):
        raise VerifierError("eigenvalues must lie in [0, 1]")
    rng = make_rng(seed, k, m, d)

    comp = basis.complement()
    if comp.dim:
        comp = Subspace(comp.vectors @ random_unitary(comp.dim, rng), n_w)
    q = np.hstack([basis.vectors, comp.vectors])

    half = 2 ** (k + m - 1)
    tails = random_unitary(half, rng)[:, :n_w]
    dim = 2 ** (k + m)
    cols = {}
    for i in range(n_w):
        img = np.zeros(dim, dtype=complex)
        img[half:] = math.sqrt(lams[i]) * tails[:, i]
        img[:half] = math.sqrt(1.0 - lams[i]) * tails[:, i]
        cols[i * 2**m] = img
    # orthonormal by construction; guard against a broken tail scheme anyway
    gram = np.array([[np.vdot(cols[a], cols[b]) for b in cols] for a in cols])
    assert np.max(np.abs(gram - np.eye(n_w))) < 1e-9, "planted images not orthonormal"
    v0 = linalg.complete_unitary(cols, dim)
    v = v0 @ np.kron(q.conj().T, np.eye(2**m))
    return VerifierSpec(k, m, v)


@dataclass(frozen=True)
class SpectralProfile:
    eigenvalues: tuple[float, ...]
    c: float = 2 / 3
    w: float = 1 / 3
    s: float = 1 / 3
    q: int = 1

    def __post_init__(self):
        vals = tuple(sorted((float(x) for x in self.eigenvalues), reverse=True))
        object.__setattr__(self, "eigenvalues", vals)
        if not self.c > max(self.w, self.s):
            raise VerifierError(f"need c > max(w, s), got c={self.c}, w={self.w}, s={self.s}")
        if vals and (vals[0] > 1 + CMP_TOL or vals[-1] < -CMP_TOL):
            raise VerifierError("eigenvalues must lie in [0, 1]")

    def with_eigenvalues(self, vals) -> "SpectralProfile":
        return SpectralProfile(tuple(vals), self.c, self.w, self.s, self.q)


def spectral_profile(v: VerifierSpec, c=2 / 3, w=1 / 3, s=1 / 3, q=1) -> SpectralProfile:
    vals, _ = linalg.eigh(acceptance_operator(v))
    return SpectralProfile(tuple(np.clip(vals, 0.0, 1.0)), c, w, s, q)


@dataclass(frozen=True)
class PlantedInstance:
    spec: VerifierSpec
    planted_basis: Subspace
    kind: str
    profile: SpectralProfile

    @property
    def d(self) -> int:
        return self.planted_basis.dim


def make_instance(
    kind: str,
    k: int,
    m: int,
    d: int,
    q: int,
    r: int,
    seed: int,
    trial: int = 0,
    accepted: Sequence[float] | None = None,
    background: Sequence[float] | None = None,
) -> PlantedInstance:
    """Random planted instance with thresholds (1 - 2^-r, 2^-r, 2^-r).

    Yes instances accept a random d-dimensional W; accepted eigenvalues are
    drawn from [1 - 2^-r, 1] and background ones from [0, 2^-r] unless given.
    No instances have every eigenvalue in [0, 2^-r] and an empty planted basis.
    """
    if kind not in ("yes", "no"):
        raise VerifierError(f"kind must be 'yes' or 'no', not {kind!r}")
    n_w = 2**k
    eps = 2.0**-r
    rng = make_rng(seed, 0x51A7, trial, d)
    if kind == "yes":
        if not 1 <= d <= q:
            raise VerifierError(f"yes instance needs 1 <= d <= q, got d={d}, q={q}")
        if d > n_w:
            raise VerifierError(f"d={d} exceeds the witness dimension {n_w}")
        basis = random_subspace(n_w, d, rng)
        acc = list(accepted) if accepted is not None else list(1.0 - eps * rng.random(d))
    else:
        basis = Subspace.zero(n_w)
        acc = []
    n_bg = n_w - basis.dim
    bg = list(background) if background is not None else list(eps * rng.random(n_bg))
    spec = plant_verifier(k, m, basis, acc, bg, seed=int(rng.integers(2**63)))
    profile = SpectralProfile(tuple(acc + bg), 1.0 - eps, eps, eps, q)
    return PlantedInstance(spec, basis, kind, profile)


@dataclass
class Classification:
    verdict: str  # "yes", "no" or "violation"
    d: int | None
    details: str = ""
    offending: tuple[float, ...] = ()


def classify_spectrum(p: SpectralProfile, tol: float = CMP_TOL) -> Classification:
    """Eigenvalue-count membership test; never guesses outside the promise."""
    vals = np.asarray(p.eigenvalues)
    high = vals[vals >= p.c - tol]
    gap = vals[(vals > p.w + tol) & (vals < p.c - tol)]
    if 1 <= high.size <= p.q and gap.size == 0:
        return Classification("yes", int(high.size))
    if np.all(vals <= p.s + tol):
        return Classification("no", None)
    reasons = []
    if gap.size:
        reasons.append(f"eigenvalues inside ({p.w:.6g}, {p.c:.6g})")
    if high.size > p.q:
        reasons.append(f"{high.size} eigenvalues >= c exceeds q={p.q}")
    if high.size == 0:
        reasons.append(f"no eigenvalue >= c but some exceed s={p.s:.6g}")
    offending = tuple(float(x) for x in (gap if gap.size else vals[vals > p.s + tol]))
    return Classification("violation", None, "; ".join(reasons), offending)


@dataclass
class SubspaceSemantics:
    verdict: str
    d: int | None
    min_in_wc: float | None
    max_perp_wc: float | None
    max_overall: float
    wc_ww_distance: float | None


def _extremes(e: np.ndarray, sub: Subspace) -> tuple[float, float]:
    if sub.dim == 0:
        return math.nan, math.nan
    vals, _ = linalg.eigh(sub.vectors.conj().T @ e @ sub.vectors)
    return float(vals[-1]), float(vals[0])


def subspace_semantics(
    v: VerifierSpec,
    c=2 / 3,
    w=1 / 3,
    s=1 / 3,
    q=1,
    n_samples: int = 50,
    seed: int = 0,
    tol: float = CMP_TOL,
) -> SubspaceSemantics:
    """Membership in the subspace formulation, checked on W_c directly.

    Acceptance probabilities are evaluated by running V on the witness
    (not through E): random states in W_c, random states in W_c-perp and
    random states overall, plus the exact extremes of E compressed to each
    region.
    """
    e = acceptance_operator(v)
    vals, vecs = linalg.eigh(e)
    wc = Subspace(vecs.vectors[:, vals >= c - tol], v.witness_dim)
    ww = Subspace(vecs.vectors[:, vals > w + tol], v.witness_dim)
    perp = wc.complement()
    rng = make_rng(seed, 0xDEF2)

    def probs(sub):
        return [acceptance_probability(v, random_state_in(sub, rng)) for _ in range(n_samples)] if sub.dim else []

    in_wc, out_wc = probs(wc), probs(perp)
    overall = probs(Subspace.full(v.witness_dim))
    lo_wc = min(in_wc + [_extremes(e, wc)[0]]) if wc.dim else None
    hi_perp = max(out_wc + [_extremes(e, perp)[1]]) if perp.dim else 0.0
    hi_all = max(overall + [_extremes(e, Subspace.full(v.witness_dim))[1]])
    dist = linalg.projector_distance(wc, ww)

    if 1 <= wc.dim <= q and lo_wc >= c - tol and hi_perp <= w + tol:
        verdict = "yes"
    elif hi_all <= s + tol:
        verdict = "no"
    else:
        verdict = "violation"
    return SubspaceSemantics(verdict, wc.dim if verdict == "yes" else None, lo_wc, hi_perp, hi_all, dist)


@dataclass
class ClassifyResult:
    spectral: Classification
    semantic: SubspaceSemantics

    @property
    def verdict(self) -> str:
        return self.spectral.verdict

    @property
    def agree(self) -> bool:
        return self.spectral.verdict == self.semantic.verdict and self.spectral.d == self.semantic.d


def classify(v: VerifierSpec, p: SpectralProfile, n_samples: int = 50, seed: int = 0) -> ClassifyResult:
    """Classify V under thresholds of ``p`` two ways and report both.

    The eigenvalues used are recomputed from V; those stored in ``p`` are ignored.
    """
    spectral = classify_spectrum(spectral_profile(v, p.c, p.w, p.s, p.q))
    semantic = subspace_semantics(v, p.c, p.w, p.s, p.q, n_samples=n_samples, seed=seed)
    return ClassifyResult(spectral, semantic)


def binomial_tail(lam, n: int, threshold: int):
    """P[Bin(n, lam) >= threshold], elementwise for arrays."""
    if n < 1 or not 0 <= threshold <= n:
        raise VerifierError(f"need n >= 1 and 0 <= threshold <= n, got n={n}, threshold={threshold}")
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    for j in range(threshold, n + 1):
        out = out + math.comb(n, j) * lam**j * (1.0 - lam) ** (n - j)
    return out


def binomial_tail_exact(lam: Fraction, n: int, threshold: int) -> Fraction:
    lam = Fraction(lam)
    return sum(
        (Fraction(math.comb(n, j)) * lam**j * (1 - lam) ** (n - j) for j in range(threshold, n + 1)),
        Fraction(0),
    )


def amplify_spectral(x, n: int, threshold: int | None = None):
    """Apply λ -> P[Bin(n, λ) >= threshold] to a profile, eigenvalue array or operator.

    ``threshold`` defaults to a strict majority, (n + 1) // 2, which requires
    odd ``n``. Operators keep their eigenvectors. Profiles get their
    thresholds c, w, s mapped as well.
    """
    if threshold is None:
        if n % 2 == 0:
            raise VerifierError("majority amplification needs an odd repetition count")
        threshold = (n + 1) // 2
    if isinstance(x, SpectralProfile):
        f = lambda z: float(binomial_tail(z, n, threshold))  # noqa: E731
        return SpectralProfile(
            tuple(binomial_tail(np.array(x.eigenvalues), n, threshold)),
            f(x.c), f(x.w), f(x.s), x.q,
        )
    arr = np.asarray(x)
    if arr.ndim == 2:
        vals, vecs = linalg.eigh(arr)
        mapped = binomial_tail(np.clip(vals, 0.0, 1.0), n, threshold)
        out = (vecs.vectors * mapped) @ vecs.vectors.conj().T
        return 0.5 * (out + out.conj().T)
    return binomial_tail(arr, n, threshold)


def amplify_verifier(v: VerifierSpec, n: int, threshold: int | None = None, seed: int = 0) -> VerifierSpec:
    """Re-plant a verifier (same k, m) whose acceptance operator is the amplified E."""
    vals, vecs = linalg.eigh(acceptance_operator(v))
    mapped = amplify_spectral(np.clip(vals, 0.0, 1.0), n, threshold)
    return plant_verifier(v.k, v.m, vecs, list(np.clip(mapped, 0.0, 1.0)), [], seed=seed)


def choose_r(q: int) -> int:
    """Smallest r with q * 2^-r <= 1/3."""
    r = 1
    while q * 2.0**-r > 1 / 3:
        r += 1
    return r
