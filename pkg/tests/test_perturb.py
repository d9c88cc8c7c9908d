import numpy as np
import pytest

from conftest import WORKED_B1, WORKED_BCEP, WORKED_BPI, WORKED_EB, WORKED_FB, WORKED_P, WORKED_Q, arr
from coreep import fixtures
from coreep.blockcore import assemble_w
from coreep.errors import ExtractionError, GuardError, PreconditionError
from coreep.geninv import core_ep_decompose, core_ep_inverse
from coreep.kernel import numerical_rank, random_unitary, spectral_norm
from coreep.perturb import (
    PairContext,
    bounds_report,
    extract_block_form,
    l_matrix,
    perturbation_data,
    reconstruct_theorem_3_4,
    remark_3_7_guards,
    stability_report,
)


def test_l_matrix_index_one_is_b_times_projector(rng):
    b = fixtures.random_matrix("index1", rng, n=5).A
    L = l_matrix(b)
    assert np.allclose(L, b @ b @ core_ep_inverse(b), atol=1e-12)
    assert numerical_rank(L) == numerical_rank(b)


def test_l_matrix_is_range_hermitian(rng):
    # L_B and L_B* share a range, so every L_B has P = Q* in its own frame
    b = fixtures.random_matrix("mixed", rng, n=6).A
    L = l_matrix(b)
    x = core_ep_inverse(L)
    assert np.allclose(L @ x, x @ L, atol=1e-10)


def test_l_matrix_rank_equals_rank_of_power(rng):
    for kind in ("index2", "index3", "mixed"):
        fix = fixtures.random_matrix(kind, rng)
        ak = np.linalg.matrix_power(fix.A, max(fix.k, 1))
        assert numerical_rank(l_matrix(fix.A)) == numerical_rank(ak, scale=spectral_norm(fix.A) ** max(fix.k, 1))


def test_l_matrix_independent_of_frame(rng):
    fix = fixtures.random_matrix("index2", rng, n=6)
    d = core_ep_decompose(fix.A)
    L = l_matrix(fix.A)
    # rotate inside the core and nilpotent blocks: a different valid frame
    r, m = d.r, d.n - d.r
    v = np.zeros((d.n, d.n), complex)
    v[:r, :r] = random_unitary(r, rng)
    v[r:, r:] = random_unitary(m, rng)
    u2 = d.U @ v
    t = v.conj().T @ np.block([[d.T, d.S], [np.zeros((m, r)), d.N]]) @ v
    x2 = u2[:, :r] @ np.linalg.solve(t[:r, :r], u2[:, :r].conj().T)
    assert np.allclose(fix.A @ fix.A @ x2, L, atol=1e-10 * spectral_norm(L))


def test_worked_core_part_all_conditions(worked_a, worked_lb):
    rep = stability_report(worked_a, worked_lb, b_is_core_part=True)
    assert rep.stable and rep.consistent
    assert all(rep.conditions.values())
    assert rep.scalars["rank_A^k"] == rep.scalars["rank_B^s"] == 2
    # the block form lives in the computed Schur frame; compare invariants
    spec = rep.block_spec
    u = core_ep_decompose(worked_a).U
    assert np.allclose(u @ assemble_w(spec) @ u.conj().T, worked_lb, atol=1e-12)
    assert np.allclose(np.sort(np.linalg.eigvals(spec.B1).real),
                       np.sort(np.linalg.eigvals(arr(WORKED_B1)).real))
    pq = arr(WORKED_P) @ arr(WORKED_Q)
    assert np.allclose(np.linalg.eigvals(spec.P @ spec.Q).sum(), np.trace(pq))


def test_worked_core_part_data_and_reconstruction(worked_a, worked_lb):
    pd = perturbation_data(worked_a, worked_lb, b_is_core_part=True)
    assert np.allclose(pd.E_B, arr(WORKED_EB), atol=1e-12)
    assert np.allclose(pd.F_B, arr(WORKED_FB), atol=1e-12)
    bcep, bpi = reconstruct_theorem_3_4(worked_a, worked_lb, b_is_core_part=True)
    assert np.allclose(bcep, arr(WORKED_BCEP), atol=1e-6)
    assert np.allclose(bpi, arr(WORKED_BPI), atol=1e-12)


def test_worked_literal_mode_differs(worked_a, worked_lb):
    # the printed core part is not range-Hermitian, so taken as B itself its
    # own core part differs and the printed E_B is not reproduced
    c = PairContext(worked_a, worked_lb)
    assert not np.allclose(c.L, worked_lb, atol=1e-3)
    assert spectral_norm(c.EA) == pytest.approx(0.22552, abs=1e-4)
    assert stability_report(None, None, ctx=c).stable
    assert np.allclose(c.b_cep, arr(WORKED_BCEP), atol=1e-6)


def test_worked_bounds(worked_a, worked_lb):
    br = bounds_report(worked_a, worked_lb, b_is_core_part=True)
    assert br.z_guard and br.yz_guard and br.z_lt_1 and br.yz_lt_1
    assert br.actual_relative_error <= br.bound_3_1
    assert br.actual_projector_error == pytest.approx(769 / 3524, rel=1e-4)
    assert br.actual_projector_error <= br.bound_3_6
    assert br.alpha == pytest.approx(1 + br.z_norm + br.yz_norm)
    assert br.beta == pytest.approx(1 + br.z_norm + br.z_norm**2)
    assert remark_3_7_guards(worked_a, worked_lb, b_is_core_part=True) == (True, True)


def test_nonsingular_a_rejected(rng):
    a = fixtures.random_matrix("nonsingular", rng, n=3).A
    with pytest.raises(PreconditionError):
        stability_report(a, a)


def test_unstable_pair_has_no_data(rng):
    p = fixtures.pair("rank_excess", rng)
    rep = stability_report(p.A.A, p.B)
    assert not rep.stable and rep.consistent and rep.block_spec is None
    with pytest.raises(PreconditionError):
        perturbation_data(p.A.A, p.B)
    with pytest.raises(PreconditionError):
        reconstruct_theorem_3_4(p.A.A, p.B)


def test_nilpotent_a_has_no_relative_bound(rng):
    a = fixtures.random_matrix("nilpotent", rng, n=4).A
    with pytest.raises(PreconditionError):
        bounds_report(a, a)


def test_guarded_bound_require():
    from coreep.perturb import BoundReport
    br = BoundReport(np.zeros((1, 1)), np.zeros((1, 1)), 1, 1, 2.0, 2.0, 1.0,
                     None, None, None, 0.0, 0.0, False, False, False, False)
    with pytest.raises(GuardError):
        br.require("bound_3_2")
    assert br.require("bound_3_1") == 1.0


def test_extract_block_form_errors(rng):
    fix = fixtures.singular_matrix(rng, n=5, min_rank=2)
    d = core_ep_decompose(fix.A)
    with pytest.raises(ExtractionError):
        extract_block_form(d, np.zeros((5, 5)))
    b = fixtures.block_partner(fix, rng)
    spec = extract_block_form(d, l_matrix(b))
    assert spec.m == fix.r


@pytest.mark.parametrize("kind", ["stable", "stable_near", "stable_nilpotent_enriched"])
def test_stable_fixtures_reconstruct(kind, rng):
    for _ in range(15):
        p = fixtures.pair(kind, rng)
        c = PairContext(p.A.A, p.B)
        rep = stability_report(None, None, ctx=c)
        assert rep.stable and rep.consistent
        bcep, bpi = reconstruct_theorem_3_4(None, None, ctx=c)
        assert spectral_norm(bcep - c.b_cep) <= 1e-8 * max(spectral_norm(c.b_cep), 1)
        assert spectral_norm(bpi - c.b_pi) <= 1e-8


@pytest.mark.parametrize("kind", ["rank_deficient", "rank_excess", "equal_rank_unstable"])
def test_unstable_fixtures(kind, rng):
    for _ in range(15):
        p = fixtures.pair(kind, rng)
        rep = stability_report(p.A.A, p.B)
        assert not rep.stable and rep.consistent
