import math

import numpy as np
import pytest

from fewqma import linalg, protocol, subspace, verifier
from fewqma.linalg import PureState
from fewqma.permgroup import Permutation, perm_unitary
from fewqma.protocol import ProtocolError
from fewqma.rng import make_rng, random_state, random_subspace


@pytest.mark.parametrize("t,K", [(2, 2), (2, 4), (3, 2), (3, 4)])
def test_alt_test_circuit_matches_exact(t, K):
    rng = make_rng(8, t, K)
    for _ in range(5):
        psi = random_state(K**t, rng)
        a = protocol.alt_test_exact(psi, t, K)
        b = protocol.alt_test_circuit(psi, t, K)
        assert abs(a.accept_probability - b.accept_probability) < 1e-9
        if a.post_state is not None:
            assert abs(abs(a.post_state.overlap(b.post_state)) - 1) < 1e-9


def test_alt_test_on_special_inputs():
    slater = subspace.slater(random_subspace(4, 2, make_rng(1)))
    assert protocol.alt_test_circuit(slater, 2).accept_probability > 1 - 1e-9
    prod = np.kron([1, 0, 0, 0], [1, 0, 0, 0]).astype(complex)
    out = protocol.alt_test_exact(prod, 2, 4)
    assert out.accept_probability < 1e-12 and out.post_state is None
    # |01> accepted with probability 1/2; post-state is the singlet
    ket01 = np.array([0, 1, 0, 0], dtype=complex)
    out = protocol.alt_test_circuit(ket01, 2)
    assert abs(out.accept_probability - 0.5) < 1e-12
    np.testing.assert_allclose(out.post_state.amplitudes, np.array([0, 1, -1, 0]) / math.sqrt(2), atol=1e-12)


def test_alt_test_layout_inference():
    state = PureState.normalized(random_state(27, make_rng(3)), (3, 3, 3))
    assert protocol.alt_test_exact(state, 3).post_state.layout == (3, 3, 3)
    with pytest.raises(ProtocolError):
        protocol.alt_test_exact(np.ones(10) / math.sqrt(10), 2)


def test_perm_state_is_normalized_and_signed():
    p = protocol.perm_state(3)
    assert abs(np.linalg.norm(p) - 1) < 1e-15
    assert np.sum(p > 0) == 3 and np.sum(p < 0) == 3


@pytest.mark.parametrize("t", [1, 2, 3])
def test_wit_test_matches_tensor_power_quadratic_form(t):
    inst = verifier.make_instance("yes", 2, 1, 2, 3, 3, seed=6)
    e = verifier.acceptance_operator(inst.spec)
    et = linalg.kron_power(e, t)
    rng = make_rng(6, t)
    for _ in range(4):
        psi = random_state(4**t, rng)
        assert abs(protocol.wit_test(inst.spec, psi, t) - np.vdot(psi, et @ psi).real) < 1e-12
    with pytest.raises(ProtocolError):
        protocol.wit_test(inst.spec, np.ones(5), t)


def test_combined_operator_properties():
    inst = verifier.make_instance("yes", 2, 1, 2, 3, 8, seed=1)
    for t in (1, 2, 3):
        g = protocol.combined_operator(inst.spec, t)
        vals = g.eigenvalues()
        assert vals[0] <= 1 + 1e-8 and vals[-1] >= -1e-8
        a = subspace.antisymmetrizer(t, 4)
        assert linalg.frob(a @ g.g - g.g) < 1e-10
    # the transposition acts as -1 on the range of G_2
    g2 = protocol.combined_operator(inst.spec, 2).g
    swap = perm_unitary(Permutation.transposition(2, 0, 1), 4)
    assert linalg.frob(swap @ g2 + g2) < 1e-10


def test_uqma_oracle_cases():
    assert protocol.uqma_oracle(np.diag([0.9, 0.1, 0.0])).verdict == "yes"
    assert protocol.uqma_oracle(np.diag([0.2, 0.1, 0.0])).verdict == "no"
    assert protocol.uqma_oracle(np.diag([0.9, 0.9, 0.0])).verdict == "promise_violation"
    assert protocol.uqma_oracle(np.diag([0.5, 0.0])).verdict == "promise_violation"


@pytest.mark.parametrize("d", [1, 2, 3])
def test_algorithm_a_accepts_yes_at_t_equal_d(d):
    inst = verifier.make_instance("yes", 2, 1, d, 3, 8, seed=2)
    res = protocol.algorithm_a(inst, 3)
    assert res.decision == "accept" and res.accepted_at == d
    at_d = res.trace[-1]
    assert at_d.t == d and at_d.lambda1 >= 2 / 3 and at_d.lambda2 <= 1 / 3


def test_algorithm_a_rejects_no_instances():
    inst = verifier.make_instance("no", 2, 1, 0, 3, 8, seed=2)
    res = protocol.algorithm_a(inst, 3)
    assert res.decision == "reject" and res.accepted_at is None
    assert [e.verdict for e in res.trace] == ["no", "no", "no"]


def test_algorithm_a_limits():
    inst = verifier.make_instance("no", 2, 1, 0, 3, 8, seed=2)
    with pytest.raises(ProtocolError):
        protocol.algorithm_a(inst, 0)
    with pytest.raises(ProtocolError):
        protocol.algorithm_a(inst, 7)


def test_unique_witness_check():
    inst = verifier.make_instance("yes", 2, 1, 3, 3, 8, seed=4)
    uw = protocol.unique_witness_check(inst)
    assert uw.slater_acceptance >= 1 - 3 * 2**-8
    assert uw.lambda1 >= 2 / 3 and uw.lambda2 <= 1 / 3
    assert uw.top_overlap >= 0.999
    assert uw.worst_perp_acceptance <= 1 / 3
    no = verifier.make_instance("no", 2, 1, 0, 3, 8, seed=4)
    with pytest.raises(ProtocolError):
        protocol.unique_witness_check(no)


def test_random_perp_state():
    rng = make_rng(5)
    sub = random_subspace(6, 2, rng)
    v = protocol.random_perp_state(sub, rng)
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert np.linalg.norm(sub.vectors.conj().T @ v) < 1e-12
