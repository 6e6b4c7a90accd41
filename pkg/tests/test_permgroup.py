import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewqma.permgroup import (
    Permutation,
    PermutationError,
    compose,
    enumerate_perms,
    perm_from_index,
    perm_index,
    perm_unitary,
    permute_registers,
)


def digits(s, K, t):
    return [(s // K ** (t - 1 - i)) % K for i in range(t)]


def undigits(ds, K):
    out = 0
    for d in ds:
        out = out * K + d
    return out


def oracle_unitary(p, K):
    """Direct index arithmetic: content of register i moves to register p(i)."""
    t = p.t
    u = np.zeros((K**t, K**t))
    for s in range(K**t):
        ds = digits(s, K, t)
        out = [0] * t
        for i in range(t):
            out[p(i)] = ds[i]
        u[undigits(out, K), s] = 1
    return u


perms = st.integers(1, 5).flatmap(lambda t: st.permutations(list(range(t))).map(Permutation))


def test_enumeration_is_lexicographic_and_complete():
    for t in range(1, 6):
        ps = enumerate_perms(t)
        assert len(ps) == math.factorial(t)
        assert [p.images for p in ps] == sorted(itertools.permutations(range(t)))


def test_sign_matches_transposition_count():
    assert Permutation((0, 1, 2)).sign == 1
    assert Permutation((1, 0, 2)).sign == -1
    assert Permutation((1, 2, 0)).sign == 1
    for t in range(2, 6):
        assert sum(p.sign for p in enumerate_perms(t)) == 0


@settings(max_examples=50, deadline=None)
@given(p=perms)
def test_index_round_trip(p):
    assert perm_from_index(p.t, perm_index(p)) == p
    assert enumerate_perms(p.t)[perm_index(p)] == p


@settings(max_examples=50, deadline=None)
@given(data=st.data(), t=st.integers(1, 5))
def test_group_laws(data, t):
    a = Permutation(data.draw(st.permutations(list(range(t)))))
    b = Permutation(data.draw(st.permutations(list(range(t)))))
    assert compose(a, a.inverse()) == Permutation.identity(t)
    assert (a @ b).sign == a.sign * b.sign
    assert (a @ b)(0) == a(b(0))


@pytest.mark.parametrize("t,K", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_unitary_matches_index_oracle_and_is_homomorphism(t, K):
    ps = enumerate_perms(t)
    us = {p: perm_unitary(p, K) for p in ps}
    for p in ps:
        np.testing.assert_array_equal(us[p].real, oracle_unitary(p, K))
    for a in ps:
        for b in ps:
            np.testing.assert_array_equal(us[a @ b], us[a] @ us[b])


def test_swap_on_two_qubits():
    swap = Permutation.transposition(2, 0, 1)
    ket01 = np.zeros(4)
    ket01[1] = 1
    out = permute_registers(swap, ket01, 2)
    assert out[2] == 1 and out.sum() == 1


def test_permute_registers_on_matrix_columns(rng):
    p = Permutation((2, 0, 1))
    m = rng.standard_normal((8, 3))
    np.testing.assert_allclose(permute_registers(p, m, 2), perm_unitary(p, 2) @ m)


def test_errors():
    with pytest.raises(PermutationError):
        Permutation((0, 0))
    with pytest.raises(PermutationError):
        Permutation.transposition(3, 1, 1)
    with pytest.raises(PermutationError):
        enumerate_perms(7)
    with pytest.raises(PermutationError):
        perm_unitary(Permutation.identity(5), 6)
    with pytest.raises(PermutationError):
        compose(Permutation.identity(2), Permutation.identity(3))
    with pytest.raises(PermutationError):
        permute_registers(Permutation.identity(2), np.ones(5), 2)
