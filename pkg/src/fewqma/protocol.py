"""AltTest, WitTest, the combined circuit A^t and the oracle-driven reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .linalg import PureState, Subspace
from .permgroup import enumerate_perms, permute_registers
from .rng import make_rng, random_state
from .subspace import antisymmetrizer, slater
from .verifier import (
    PlantedInstance,
    VerifierSpec,
    accept_branch,
    acceptance_operator,
)

MAX_DIM = 4096
POST_STATE_CUTOFF = 1e-12


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # keep pytest from collecting this

    accept_probability: float
    post_state: PureState | None = None


def _local_dim(state, t: int, local_dim: int | None) -> int:
    vec = linalg.as_vector(state)
    if local_dim is None:
        if isinstance(state, PureState) and len(state.layout) == t:
            local_dim = state.layout[0]
        else:
            local_dim = round(vec.size ** (1.0 / t))
    if local_dim**t != vec.size:
        raise ProtocolError(f"state of dimension {vec.size} is not on {t} registers of size {local_dim}")
    return local_dim


def alt_test_exact(state, t: int, local_dim: int | None = None) -> TestOutcome:
    """Accept with probability <ψ|A_t|ψ>; on accept the register holds A_t|ψ> normalized."""
    K = _local_dim(state, t, local_dim)
    psi = linalg.as_vector(state)
    proj = antisymmetrizer(t, K) @ psi
    p = float(np.vdot(proj, proj).real)
    post = PureState.normalized(proj, (K,) * t) if p > POST_STATE_CUTOFF else None
    return TestOutcome(p, post)


def perm_state(t: int) -> np.ndarray:
    """(1/√t!) Σ_π sgn(π)|π>, indexed by the lexicographic enumeration."""
    perms = enumerate_perms(t)
    return np.array([p.sign for p in perms], dtype=complex) / math.sqrt(len(perms))


def alt_test_circuit(state, t: int, local_dim: int | None = None) -> TestOutcome:
    """Run AltTest on a control register of size t! and the input register S.

    1. prepare (1/√t!) Σ_π |π> ⊗ |ψ>
    2. apply the controlled permutation |π>|ψ> -> |π> U_π|ψ>
    3. measure |perm_t><perm_t| ⊗ I and keep the S register
    """
    K = _local_dim(state, t, local_dim)
    psi = linalg.as_vector(state)
    perms = enumerate_perms(t)
    nf = len(perms)
    if nf * psi.size > MAX_DIM * 6:
        raise ProtocolError(f"control ⊗ input dimension {nf * psi.size} too large")
    joint = np.outer(np.full(nf, 1 / math.sqrt(nf)), psi)  # rows: control basis |π>
    for i, p in enumerate(perms):
        joint[i] = permute_registers(p, joint[i], K)
    s_reg = perm_state(t).conj() @ joint
    prob = float(np.vdot(s_reg, s_reg).real)
    post = PureState.normalized(s_reg, (K,) * t) if prob > POST_STATE_CUTOFF else None
    return TestOutcome(prob, post)


def wit_test(v: VerifierSpec, state, t: int) -> float:
    """Probability that all t parallel runs of V accept.

    Each register T_i is paired with a fresh |0^m> and V followed by the
    accept projection is applied pair by pair, giving
    ||(Π_acc V)^{⊗t} (|ψ> ⊗ |0^{tm}>)||^2.
    """
    psi = linalg.as_vector(state)
    if psi.size != v.witness_dim**t:
        raise ProtocolError(f"state has dimension {psi.size}, expected {v.witness_dim}^{t}")
    if (2 ** (v.k + v.m)) ** t > MAX_DIM * 64:
        raise ProtocolError("parallel register space too large")
    b = accept_branch(v)  # (2^(k+m), 2^k)
    tens = psi.reshape((v.witness_dim,) * t)
    for axis in range(t):
        tens = np.moveaxis(np.tensordot(b, tens, axes=([1], [axis])), 0, axis)
    return float(np.vdot(tens, tens).real)


@dataclass(frozen=True)
class CombinedOperator:
    t: int
    g: np.ndarray = field(repr=False)
    source: VerifierSpec = field(repr=False)

    def __post_init__(self):
        g = self.g
        if not linalg.is_hermitian(g, linalg.RECON_TOL):
            raise ProtocolError("combined operator is not Hermitian")

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.g)

    def acceptance(self, state) -> float:
        psi = linalg.as_vector(state)
        return float(np.vdot(psi, self.g @ psi).real)


def combined_operator(v: VerifierSpec, t: int) -> CombinedOperator:
    """G = A_t E^{⊗t} A_t: accept probability of AltTest followed by WitTest."""
    n = v.witness_dim**t
    if n > MAX_DIM:
        raise ProtocolError(f"(2^k)^t = {n} exceeds the {MAX_DIM} cap")
    a = antisymmetrizer(t, v.witness_dim)
    g = a @ linalg.kron_power(acceptance_operator(v), t) @ a
    return CombinedOperator(t, 0.5 * (g + g.conj().T), v)


@dataclass(frozen=True)
class OracleVerdict:
    verdict: str  # "yes", "no" or "promise_violation"
    lambda1: float
    lambda2: float


def uqma_oracle(g, accept_threshold: float = 2 / 3, reject_threshold: float = 1 / 3) -> OracleVerdict:
    """Decide the unique-witness promise problem for G by exact diagonalization."""
    mat = g.g if isinstance(g, CombinedOperator) else np.asarray(g)
    vals = linalg.eigvalsh(mat)
    l1 = float(vals[0])
    l2 = float(vals[1]) if vals.size > 1 else 0.0
    if l1 >= accept_threshold and l2 <= reject_threshold:
        verdict = "yes"
    elif l1 <= reject_threshold:
        verdict = "no"
    else:
        verdict = "promise_violation"
    return OracleVerdict(verdict, l1, l2)


@dataclass(frozen=True)
class TraceEntry:
    t: int
    lambda1: float
    lambda2: float
    verdict: str


@dataclass
class ReductionResult:
    decision: str  # "accept" or "reject"
    trace: list[TraceEntry]

    @property
    def accepted_at(self) -> int | None:
        for e in self.trace:
            if e.verdict == "yes":
                return e.t
        return None


def algorithm_a(inst, q: int, accept_threshold: float = 2 / 3, reject_threshold: float = 1 / 3) -> ReductionResult:
    """Query the oracle on A^t for t = 1..q and accept at the first yes.

    A promise violation carries no guaranteed oracle answer; it is recorded
    in the trace and treated as a reject for that query.
    """
    v = inst.spec if isinstance(inst, PlantedInstance) else inst
    if q < 1:
        raise ProtocolError("q must be at least 1")
    if v.witness_dim**q > MAX_DIM:
        raise ProtocolError(f"(2^k)^q = {v.witness_dim ** q} exceeds the {MAX_DIM} cap")
    trace = []
    for t in range(1, q + 1):
        res = uqma_oracle(combined_operator(v, t), accept_threshold, reject_threshold)
        trace.append(TraceEntry(t, res.lambda1, res.lambda2, res.verdict))
        if res.verdict == "yes":
            return ReductionResult("accept", trace)
    return ReductionResult("reject", trace)


@dataclass
class UniqueWitnessCheck:
    """Spectral facts about G_d for a planted yes instance with d = dim W."""

    d: int
    slater_acceptance: float
    lambda1: float
    lambda2: float
    top_overlap: float
    worst_perp_acceptance: float


def unique_witness_check(inst: PlantedInstance, n_perp: int = 20, seed: int = 0) -> UniqueWitnessCheck:
    d = inst.d
    if d < 1:
        raise ProtocolError("needs a yes instance with a nonempty planted basis")
    g = combined_operator(inst.spec, d)
    w_alt = slater(inst.planted_basis).amplitudes
    vals, vecs = linalg.eigh(g.g)
    top = vecs.vectors[:, 0]
    rng = make_rng(seed, 0x6E6, d)
    worst = 0.0
    for _ in range(n_perp):
        phi = random_state(w_alt.size, rng)
        phi = phi - w_alt * np.vdot(w_alt, phi)
        phi /= np.linalg.norm(phi)
        worst = max(worst, g.acceptance(phi))
    return UniqueWitnessCheck(
        d,
        g.acceptance(w_alt),
        float(vals[0]),
        float(vals[1]) if vals.size > 1 else 0.0,
        float(abs(np.vdot(top, w_alt)) ** 2),
        worst,
    )


def random_perp_state(sub: Subspace, rng) -> np.ndarray:
    """Random unit vector orthogonal to ``sub``."""
    comp = sub.complement()
    return comp.vectors @ random_state(comp.dim, rng)
