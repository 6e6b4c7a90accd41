from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewqma import linalg, majorization, verifier
from fewqma.majorization import MajorizationError, MajorizationInput
from fewqma.rng import make_rng, random_hermitian


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 20), seed=st.integers(0, 2**32))
def test_eigenvalues_majorize_diagonal(n, seed):
    h = random_hermitian(n, make_rng(seed))
    ok, slacks = majorization.check_majorization(MajorizationInput.from_matrix(h))
    assert ok
    # oracle: numpy eigenvalues and sorted diagonal
    lam = np.sort(np.linalg.eigvalsh(h))[::-1]
    mu = np.sort(np.diag(h).real)[::-1]
    np.testing.assert_allclose(slacks, np.cumsum(lam - mu), atol=1e-9)


def test_majorization_failure_and_validation():
    ok, _ = majorization.check_majorization(MajorizationInput((1.0, 0.0), (1.5, -0.5)))
    assert not ok
    ok, _ = majorization.check_majorization(MajorizationInput((1.0, 0.0), (0.5, 0.4)))
    assert not ok  # traces differ
    with pytest.raises(MajorizationError):
        MajorizationInput((0.0, 1.0), (0.5, 0.5))
    with pytest.raises(MajorizationError):
        MajorizationInput((1.0,), (0.5, 0.5))
    assert majorization.check_majorization(MajorizationInput((), ()))[0]


def test_vector_bounds_worked_example():
    mu = [Fraction(8, 9), Fraction(8, 9), Fraction(1, 12), Fraction(1, 12)]
    b = majorization.vfqma_bounds([float(x) for x in mu], d=2, q=3, k=2)
    # -(d-1) + 8/9 + 8/9 = 7/9 and 1/12 + 1/12 = 1/6, derived by hand
    assert abs(b.lower - float(Fraction(7, 9))) < 1e-15
    assert abs(b.upper - float(Fraction(1, 6))) < 1e-15
    assert b.shape_ok and b.certified


def test_vector_bounds_shape_violation_is_reported():
    b = majorization.vfqma_bounds([0.8, 0.8, 0.05, 0.05], d=2, q=3, k=2)
    assert not b.shape_ok and not b.certified and "below" in b.message
    b = majorization.vfqma_bounds([0.95, 0.95, 0.2, 0.0], d=2, q=3, k=2)
    assert not b.shape_ok and "above" in b.message
    with pytest.raises(MajorizationError):
        majorization.vfqma_bounds([1, 0, 0], 1, 1, 2)
    with pytest.raises(MajorizationError):
        majorization.vfqma_bounds([1, 0, 0, 0], 3, 2, 2)


def test_no_instance_bound_and_basis_diagonal():
    inst = verifier.make_instance("no", 2, 1, 0, 3, 8, seed=1)
    e = verifier.acceptance_operator(inst.spec)
    mu = majorization.basis_diagonal(e, np.eye(4))
    np.testing.assert_allclose(mu, np.diag(e).real)
    assert linalg.eigvalsh(e)[0] <= majorization.no_instance_bound(mu) + 1e-12


@pytest.mark.parametrize("trial", range(4))
def test_vector_witness_instances_bound_the_spectrum(trial):
    d = 1 + trial % 3
    vi = majorization.make_vector_witness_instance(2, 1, d, 3, seed=3, trial=trial)
    b = majorization.vfqma_bounds(vi.mu, d, 3, 2)
    assert b.certified
    lam = linalg.eigvalsh(verifier.acceptance_operator(vi.instance.spec))
    assert lam[d - 1] >= b.lower - 1e-8
    assert (lam[d] if d < 4 else 0.0) <= b.upper + 1e-8
    # the basis really is rotated away from the eigenbasis
    assert linalg.is_unitary(vi.basis)
    assert vi.mix > 0
