import numpy as np
import pytest

import exact_oracle as ex
from conftest import WORKED_A, WORKED_ACEP, WORKED_API, arr
from coreep import fixtures
from coreep.errors import PreconditionError
from coreep.geninv import (
    core_ep_decompose,
    core_ep_inverse,
    core_ep_residuals,
    core_inverse,
    decomposition_residuals,
    drazin,
    drazin_residuals,
    group_inverse,
    lemma_2_2_audit,
    matrix_index,
    moore_penrose,
    moore_penrose_residuals,
    pi_projector,
)
from coreep.kernel import random_unitary


def test_worked_example_inverse_and_index(worked_a):
    idx = matrix_index(worked_a)
    assert idx.k == 2
    assert idx.rank_chain == [3, 2, 2]
    assert np.allclose(core_ep_inverse(worked_a), arr(WORKED_ACEP), atol=1e-12)
    assert np.allclose(pi_projector(worked_a), arr(WORKED_API), atol=1e-12)


def test_worked_example_decomposition(worked_a):
    d = core_ep_decompose(worked_a)
    assert (d.r, d.k) == (2, 2)
    assert np.allclose(np.sort(np.linalg.eigvals(d.T).real), [-1.0, 3.0])
    assert max(decomposition_residuals(worked_a, d).values()) < 1e-12


def test_index_conventions():
    assert matrix_index(np.eye(3) + 0j).k == 0
    assert matrix_index(np.zeros((3, 3))).k == 1
    j = np.diag([1.0, 1.0, 1.0], 1) + 0j
    assert matrix_index(j).k == 4
    assert matrix_index(j).rank_chain == [3, 2, 1, 0, 0]


def test_moore_penrose_rank_one_exact():
    a = np.array([[1, 2], [2, 4]], complex)
    assert np.allclose(moore_penrose(a), np.array([[1, 2], [2, 4]]) / 25, atol=1e-15)
    assert np.allclose(moore_penrose(a), np.linalg.pinv(a), atol=1e-14)


def test_core_inverse_requires_index_one(worked_a):
    with pytest.raises(PreconditionError):
        core_inverse(worked_a)
    with pytest.raises(PreconditionError):
        group_inverse(worked_a)


def test_nilpotent_has_zero_core_ep_and_drazin(rng):
    fix = fixtures.random_matrix("nilpotent", rng, n=5)
    assert np.allclose(core_ep_inverse(fix.A), 0)
    assert np.allclose(drazin(fix.A), 0)


def test_nonsingular_reduces_to_inverse(rng):
    a = fixtures.random_matrix("nonsingular", rng, n=4).A
    inv = np.linalg.inv(a)
    assert np.allclose(core_ep_inverse(a), inv, atol=1e-12)
    assert np.allclose(drazin(a), inv, atol=1e-12)


def test_index_one_core_and_group(rng):
    fix = fixtures.random_matrix("index1", rng, n=5)
    a = fix.A
    x = core_inverse(a)
    g = group_inverse(a)
    assert max(core_ep_residuals(a, x, 1).values()) < 1e-12
    assert np.allclose(a @ g @ a, a, atol=1e-12)
    assert np.allclose(a @ g, g @ a, atol=1e-12)


@pytest.mark.parametrize("kind", fixtures.MATRIX_KINDS)
def test_defining_equations(kind, rng):
    for _ in range(10):
        fix = fixtures.random_matrix(kind, rng)
        a = fix.A
        d = core_ep_decompose(a)
        assert (d.r, d.k) == (fix.r, fix.k)
        assert max(moore_penrose_residuals(a, moore_penrose(a)).values()) < 1e-11
        assert max(drazin_residuals(a, drazin(a), d.k).values()) < 1e-11
        assert max(core_ep_residuals(a, d.core_ep_inverse(), d.k).values()) < 1e-11


@pytest.mark.parametrize("m", [1, 2, 3])
def test_identity_audit(m, rng):
    for kind in ("index2", "index3", "mixed"):
        a = fixtures.random_matrix(kind, rng).A
        assert max(lemma_2_2_audit(a, m).values()) < 1e-10
    with pytest.raises(ValueError):
        lemma_2_2_audit(a, 0)


def test_unitary_similarity_covariance(rng):
    fix = fixtures.random_matrix("mixed", rng, n=6)
    v = random_unitary(6, rng)
    lhs = core_ep_inverse(v @ fix.A @ v.conj().T)
    rhs = v @ core_ep_inverse(fix.A) @ v.conj().T
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_small_integer_matrices_match_oracle():
    cases = [
        WORKED_A,
        [[0, 1], [0, 0]],
        [[1, 1], [0, 0]],
        [[2, 0, 1], [0, 0, 1], [0, 0, 0]],
    ]
    for rows in cases:
        a = arr(rows)
        exact = ex.to_numpy(ex.core_ep(ex.mat(rows)))
        assert np.allclose(core_ep_inverse(a), exact, atol=1e-10)
        assert matrix_index(a).k == ex.index(ex.mat(rows))
