import numpy as np
import pytest

from coreep import fixtures
from coreep.acute import equivalence_audit
from coreep.errors import PreconditionError
from coreep.geninv import core_ep_inverse, core_inverse
from coreep.kernel import spectral_norm
from coreep.special import (
    NormGuardError,
    RangeMisalignedError,
    corollary_5_2_apply,
    remark_5_3_dual_apply,
    theorem_5_1_apply,
)


def test_range_aligned_closed_form(rng):
    for _ in range(20):
        a, e = fixtures.range_aligned_fixture(rng)
        bcep, ok = theorem_5_1_apply(a, e)
        assert ok
        assert np.allclose(bcep, core_ep_inverse(a + e), atol=1e-9)
        assert spectral_norm((a + e) @ bcep - a @ core_ep_inverse(a)) <= 1e-9
        assert all(equivalence_audit(a, a + e)[:5])


def test_index_one_specialization(rng):
    a, e = fixtures.range_aligned_fixture(rng, n=5)
    assert np.allclose(corollary_5_2_apply(a, e), core_inverse(a + e), atol=1e-9)


def test_index_one_specialization_rejects_higher_index(worked_a):
    with pytest.raises(PreconditionError):
        corollary_5_2_apply(worked_a, np.zeros((4, 4)))


def test_guards(rng):
    a, e = fixtures.range_aligned_fixture(rng, n=4, target=1.5)
    with pytest.raises(NormGuardError):
        theorem_5_1_apply(a, e)
    a, e = fixtures.range_aligned_fixture(rng, n=4)
    with pytest.raises(RangeMisalignedError):
        theorem_5_1_apply(a, e + 0.1 * rng.standard_normal((4, 4)))
    with pytest.raises(PreconditionError):
        theorem_5_1_apply(np.eye(3) + 0j, np.zeros((3, 3)))


def test_dual_agrees_on_hermitian(rng):
    for _ in range(20):
        a, e = fixtures.range_aligned_fixture(rng, hermitian=True)
        b1, _ = theorem_5_1_apply(a, e)
        b2, ok = remark_5_3_dual_apply(a, e)
        assert spectral_norm(b1 - b2) <= 1e-8
        assert ok


def test_dual_projector_flag_is_honest(rng):
    # off the Hermitian case the flag reports what the computed inverse does
    a, f = fixtures.range_aligned_fixture(rng, n=5)
    bcep, ok = remark_5_3_dual_apply(a, f)
    L = a.conj().T + f
    actual = spectral_norm(L @ bcep - a @ core_ep_inverse(a)) <= 1e-9
    assert ok == actual


def test_dual_formula_needs_self_dual_input(rng):
    # for generic non-Hermitian A the dual expression is not the core-EP inverse
    # of A* + F, and the flag says so
    for _ in range(10):
        a, f = fixtures.range_aligned_fixture(rng, n=5)
        bcep, ok = remark_5_3_dual_apply(a, f)
        assert not ok
        assert not np.allclose(bcep, core_ep_inverse(a.conj().T + f), atol=1e-8)
