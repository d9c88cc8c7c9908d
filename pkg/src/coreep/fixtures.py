"""Random test matrices with a prescribed core-EP structure.

``A = U [[T, S], [0, N]] U*`` with Haar ``U``, ``T`` having singular values in
``[0.5, 2]`` and ``N`` nilpotent with chosen Jordan block sizes; stable
partners come from the block form ``[[B1, B1 P], [Q B1, Q B1 P]]`` in the
same frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from .geninv import core_ep_decompose
from .kernel import conjugate_transpose, random_unitary

ct = conjugate_transpose

MATRIX_KINDS = ("nonsingular", "index1", "index2", "index3", "nilpotent", "mixed")
PAIR_KINDS = ("stable", "stable_near", "stable_nilpotent_enriched",
              "rank_deficient", "rank_excess", "equal_rank_unstable")


@dataclass
class MatrixFixture:
    A: np.ndarray
    U: np.ndarray
    T: np.ndarray
    S: np.ndarray
    N: np.ndarray
    r: int
    k: int
    kind: str = ""


@dataclass
class PairFixture:
    A: MatrixFixture
    B: np.ndarray
    kind: str
    expected_stable: Optional[bool]


def _cgauss(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def well_conditioned(m: int, rng: np.random.Generator, lo=0.5, hi=2.0) -> np.ndarray:
    if m == 0:
        return np.zeros((0, 0), complex)
    s = rng.uniform(lo, hi, m)
    return random_unitary(m, rng) @ np.diag(s) @ ct(random_unitary(m, rng))


def nilpotent(blocks: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    """Nilpotent matrix whose Jordan blocks have the given sizes, in a
    random unitary basis."""
    m = int(sum(blocks))
    n = np.zeros((m, m), complex)
    at = 0
    for b in blocks:
        blk = np.triu(_cgauss(rng, (b, b), 0.5), 2)
        sup = rng.uniform(0.5, 1.5, b - 1) * np.exp(2j * np.pi * rng.uniform(size=b - 1))
        blk += np.diag(sup, 1)
        n[at:at + b, at:at + b] = blk
        at += b
    if m:
        v = random_unitary(m, rng)
        n = v @ n @ ct(v)
    return n


def _partition(m: int, top: int, rng) -> List[int]:
    """Random composition of ``m`` whose largest part is exactly ``top``."""
    parts = [top]
    left = m - top
    while left > 0:
        p = int(rng.integers(1, min(top, left) + 1))
        parts.append(p)
        left -= p
    return parts


def core_ep_matrix(n: int, r: int, blocks: Sequence[int], rng: np.random.Generator,
                   kind: str = "") -> MatrixFixture:
    if r + sum(blocks) != n:
        raise ValueError("r + sum(blocks) must equal n")
    u = random_unitary(n, rng)
    t = well_conditioned(r, rng)
    s = _cgauss(rng, (r, n - r), 0.5)
    nn = nilpotent(blocks, rng)
    a = u @ np.block([[t, s], [np.zeros((n - r, r)), nn]]) @ ct(u)
    if r == n:
        k = 0
    else:
        k = max(blocks)
    return MatrixFixture(a, u, t, s, nn, r, k, kind)


def random_matrix(kind: str, rng: np.random.Generator, n: Optional[int] = None) -> MatrixFixture:
    """One matrix of the named class with ``n`` in ``2..8`` unless given."""
    lo = {"index2": 2, "index3": 3}.get(kind, 2)
    if n is None:
        n = int(rng.integers(max(lo, 2), 9))
    if kind == "nonsingular":
        return core_ep_matrix(n, n, [], rng, kind)
    if kind == "index1":
        r = int(rng.integers(1, n))
        return core_ep_matrix(n, r, [1] * (n - r), rng, kind)
    if kind in ("index2", "index3"):
        top = 2 if kind == "index2" else 3
        r = int(rng.integers(0, n - top + 1))
        return core_ep_matrix(n, r, _partition(n - r, top, rng), rng, kind)
    if kind == "nilpotent":
        top = int(rng.integers(1, n + 1))
        return core_ep_matrix(n, 0, _partition(n, top, rng), rng, kind)
    if kind == "mixed":
        r = int(rng.integers(0, n))
        top = int(rng.integers(1, min(n - r, 3) + 1))
        return core_ep_matrix(n, r, _partition(n - r, top, rng), rng, kind)
    raise ValueError(f"unknown matrix kind {kind!r}")


def singular_matrix(rng: np.random.Generator, n: Optional[int] = None,
                    min_rank: int = 1) -> MatrixFixture:
    """Singular ``A`` with ``rk(A^k) >= min_rank`` and index at most 3."""
    if n is None:
        n = int(rng.integers(max(3, min_rank + 1), 9))
    r = int(rng.integers(min_rank, n))
    top = int(rng.integers(1, min(n - r, 3) + 1))
    return core_ep_matrix(n, r, _partition(n - r, top, rng), rng, "singular")


def _scaled(x: np.ndarray, bound: float, rng) -> np.ndarray:
    nx = np.linalg.norm(x, 2)
    return x if nx == 0 else x * (bound * rng.uniform(0.2, 1.0) / nx)


def block_partner(fix: MatrixFixture, rng, near: bool = False, pq_bound: float = 0.3):
    """``B = U [[B1, B1 P], [Q B1, Q B1 P]] U*`` in ``A``'s frame."""
    r, m = fix.r, fix.A.shape[0] - fix.r
    if near:
        b1 = fix.T + _scaled(_cgauss(rng, (r, r)), 0.05, rng)
        p = np.linalg.solve(fix.T, fix.S) + _scaled(_cgauss(rng, (r, m)), 0.05, rng)
        q = _scaled(_cgauss(rng, (m, r)), 0.15, rng)
    else:
        b1 = well_conditioned(r, rng)
        p = _scaled(_cgauss(rng, (r, m)), pq_bound, rng)
        q = _scaled(_cgauss(rng, (m, r)), pq_bound, rng)
    w = np.block([[b1, b1 @ p], [q @ b1, q @ b1 @ p]])
    return fix.U @ w @ ct(fix.U)


def _own_frame(n: int, r: int, rng, v: Optional[np.ndarray] = None, nil_top: int = 2):
    """Random ``V [[T, S], [0, N]] V*`` with rank ``r`` core part."""
    if v is None:
        v = random_unitary(n, rng)
    t = well_conditioned(r, rng)
    s = _cgauss(rng, (r, n - r), 0.5)
    top = min(nil_top, n - r)
    nn = nilpotent(_partition(n - r, top, rng), rng) if n > r else np.zeros((0, 0))
    return v @ np.block([[t, s], [np.zeros((n - r, r)), nn]]) @ ct(v)


def enrich_with_nilpotent(b: np.ndarray, rng, tol=None) -> np.ndarray:
    """Give an index-one ``b`` a nilpotent tail in its own core-EP frame.

    The core part ``B^2 B^cep`` is unchanged.
    """
    d = core_ep_decompose(b) if tol is None else core_ep_decompose(b, tol)
    n, r = b.shape[0], d.r
    if n - r < 2:
        return b
    nn = nilpotent(_partition(n - r, min(3, n - r), rng), rng)
    return d.block(d.T, d.S, np.zeros((n - r, r)), nn)


def pair(kind: str, rng: np.random.Generator, fix: Optional[MatrixFixture] = None) -> PairFixture:
    """One ``(A, B)`` pair of the named class."""
    if kind == "rank_deficient":
        fix = fix or singular_matrix(rng, min_rank=1)
        rb = int(rng.integers(0, fix.r))
        return PairFixture(fix, _own_frame(fix.A.shape[0], rb, rng), kind, False)
    fix = fix or singular_matrix(rng, min_rank=1)
    n, r = fix.A.shape[0], fix.r
    if kind in ("stable", "stable_near"):
        b = block_partner(fix, rng, near=kind == "stable_near")
        return PairFixture(fix, b, kind, True)
    if kind == "stable_nilpotent_enriched":
        b = enrich_with_nilpotent(block_partner(fix, rng), rng)
        return PairFixture(fix, b, kind, True)
    if kind == "rank_excess":
        rb = int(rng.integers(r + 1, n + 1))
        return PairFixture(fix, _own_frame(n, rb, rng), kind, False)
    if kind == "equal_rank_unstable":
        # R(B^s) contains a direction of R(A^k)^perp
        basis = np.concatenate([fix.U[:, : r - 1], fix.U[:, r:r + 1]], axis=1)
        rest = np.linalg.qr(np.concatenate(
            [basis, _cgauss(rng, (n, n - r))], axis=1))[0][:, r:]
        v = np.concatenate([basis, rest], axis=1) @ np.diag(np.exp(1j * rng.uniform(0, 6, n)))
        v[:, :r] = v[:, :r] @ random_unitary(r, rng) if r > 1 else v[:, :r]
        return PairFixture(fix, _own_frame(n, r, rng, v=v), kind, False)
    raise ValueError(f"unknown pair kind {kind!r}")


def pair_stream(count: int, rng: np.random.Generator,
                kinds: Sequence[str] = PAIR_KINDS) -> Iterator[PairFixture]:
    for i in range(count):
        yield pair(kinds[i % len(kinds)], rng)


def range_aligned_fixture(rng, n: Optional[int] = None, hermitian: bool = False,
                          target: float = 0.5):
    """Index-one ``A`` and ``E = A A^cep R`` scaled so ``||E A^cep|| = target``.

    With ``hermitian=True`` both ``A`` and ``E`` are Hermitian, so the dual
    closed form with ``F = E`` describes the same matrix ``A + E``.
    """
    if n is None:
        n = int(rng.integers(2, 9))
    r = int(rng.integers(1, n))
    u = random_unitary(n, rng)
    if hermitian:
        t = np.diag(rng.uniform(0.5, 2.0, r) * rng.choice([-1.0, 1.0], r))
        w = random_unitary(r, rng)
        t = w @ t @ ct(w)
        s = np.zeros((r, n - r))
    else:
        t = well_conditioned(r, rng)
        s = _cgauss(rng, (r, n - r), 0.5)
    a = u @ np.block([[t, s], [np.zeros((n - r, n))]]) @ ct(u)
    u1 = u[:, :r]
    if hermitian:
        h = _cgauss(rng, (r, r))
        e = u1 @ (h + ct(h)) @ ct(u1)
    else:
        e = u1 @ ct(u1) @ _cgauss(rng, (n, n))
    acep = u1 @ np.linalg.solve(t, ct(u1))
    e *= target / np.linalg.norm(e @ acep, 2)
    return a, e
