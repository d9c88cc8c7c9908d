import numpy as np
import pytest

from coreep import fixtures
from coreep.geninv import matrix_index
from coreep.kernel import spectral_norm
from coreep.perturb import l_matrix


@pytest.mark.parametrize("kind", fixtures.MATRIX_KINDS)
def test_matrix_kinds_have_declared_structure(kind, rng):
    for _ in range(10):
        fix = fixtures.random_matrix(kind, rng)
        n = fix.A.shape[0]
        assert 2 <= n <= 8
        idx = matrix_index(fix.A)
        assert idx.k == fix.k
        if kind == "index2":
            assert fix.k == 2
        if kind == "index3":
            assert fix.k == 3
        if kind == "nilpotent":
            assert fix.r == 0


def test_unknown_kinds(rng):
    with pytest.raises(ValueError):
        fixtures.random_matrix("bogus", rng)
    with pytest.raises(ValueError):
        fixtures.pair("bogus", rng)


def test_block_partner_core_part_is_not_b_in_general(rng):
    # B = U[[B1, B1 P], [Q B1, Q B1 P]]U* has index one but B^2 B^cep differs
    # from B unless P = Q*
    fix = fixtures.singular_matrix(rng, n=6, min_rank=2)
    b = fixtures.block_partner(fix, rng)
    assert matrix_index(b).k == 1
    assert spectral_norm(l_matrix(b) - b) > 1e-6


def test_enrichment_keeps_core_part(rng):
    fix = fixtures.singular_matrix(rng, n=7, min_rank=2)
    b = fixtures.block_partner(fix, rng)
    rich = fixtures.enrich_with_nilpotent(b, rng)
    assert np.allclose(l_matrix(rich), l_matrix(b), atol=1e-9)


def test_stream_is_reproducible():
    a = [p.B for p in fixtures.pair_stream(12, np.random.default_rng(3))]
    b = [p.B for p in fixtures.pair_stream(12, np.random.default_rng(3))]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
