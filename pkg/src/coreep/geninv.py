"""Index, Moore-Penrose, Drazin, group, core and core-EP inverses.

The core-EP inverse is computed from a unitary triangularization
``A = U [[T, S], [0, N]] U*`` whose leading ``r x r`` block carries the
nonzero spectrum (``r = rk(A^k)``).  Then ``A^cep = U [[T^-1, 0], [0, 0]] U*``
and ``A^pi = I - A A^cep``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import scipy.linalg

from .errors import NumericBreakdownError, PreconditionError
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    conjugate_transpose,
    identity,
    rank_decision,
    relative_residual,
    require_square,
    solve_left,
    spectral_norm,
    unitary_nilpotent_split,
)

ct = conjugate_transpose


@dataclass(frozen=True)
class IndexResult:
    k: int
    rank_chain: List[int]
    # smallest RankDecision.margin seen along the chain
    margin: float = np.inf


@dataclass(frozen=True)
class CoreEPDecomposition:
    """``A = U [[T, S], [0, N]] U*`` with ``T`` nonsingular and ``N`` nilpotent."""

    U: np.ndarray
    T: np.ndarray
    S: np.ndarray
    N: np.ndarray
    r: int
    k: int = field(default=0)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def U1(self) -> np.ndarray:
        return self.U[:, : self.r]

    @property
    def U2(self) -> np.ndarray:
        return self.U[:, self.r:]

    def block(self, top_left, top_right, bottom_left, bottom_right) -> np.ndarray:
        """Assemble ``U [[tl, tr], [bl, br]] U*`` in this decomposition's frame."""
        return self.U @ np.block([[top_left, top_right], [bottom_left, bottom_right]]) @ ct(self.U)

    def _zeros(self):
        r, m = self.r, self.n - self.r
        return (np.zeros((r, r), complex), np.zeros((r, m), complex),
                np.zeros((m, r), complex), np.zeros((m, m), complex))

    @property
    def core_part(self) -> np.ndarray:
        """``A1 = U [[T, S], [0, 0]] U*`` (index at most one)."""
        _, _, z21, z22 = self._zeros()
        return self.block(self.T, self.S, z21, z22)

    @property
    def nilpotent_part(self) -> np.ndarray:
        """``A2 = U [[0, 0], [0, N]] U*``."""
        z11, z12, z21, _ = self._zeros()
        return self.block(z11, z12, z21, self.N)

    def reassemble(self) -> np.ndarray:
        return self.block(self.T, self.S, np.zeros((self.n - self.r, self.r)), self.N)

    def core_ep_inverse(self) -> np.ndarray:
        if self.r == 0:
            return np.zeros((self.n, self.n), complex)
        return self.U1 @ solve_left(self.T, ct(self.U1))

    def range_projector(self) -> np.ndarray:
        """Orthogonal projector onto ``R(A^k)``, i.e. ``A A^cep``."""
        return self.U1 @ ct(self.U1)


def moore_penrose(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = as_matrix(a, "A")
    try:
        u, s, vh = scipy.linalg.svd(a, full_matrices=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericBreakdownError(f"SVD failed: {exc}") from exc
    r = rank_decision(a, tol).rank
    return ct(vh[:r]) @ (ct(u[:, :r]) / s[:r, None])


def matrix_index(a, tol: Tolerances = DEFAULT_TOL) -> IndexResult:
    """Smallest ``k`` with ``rk(A^{k+1}) = rk(A^k)``; 0 for nonsingular ``A``.

    The zero matrix has index 1.
    """
    a = as_matrix(a, "A")
    n = require_square(a, "A")
    norm = spectral_norm(a)
    chain: List[int] = []
    margin = np.inf
    power = a.copy()
    for j in range(1, n + 2):
        d = rank_decision(power, tol, scale=norm**j)
        chain.append(d.rank)
        margin = min(margin, d.margin)
        if j == 1 and d.rank == n:
            return IndexResult(0, chain, margin)
        if j >= 2 and chain[-1] == chain[-2]:
            return IndexResult(j - 1, chain, margin)
        power = power @ a
    raise NumericBreakdownError(f"rank chain {chain} failed to stabilize")


def core_ep_decompose(a, tol: Tolerances = DEFAULT_TOL) -> CoreEPDecomposition:
    a = as_matrix(a, "A")
    n = require_square(a, "A")
    idx = matrix_index(a, tol)
    r = n if idx.k == 0 else idx.rank_chain[idx.k - 1]
    u, rr = unitary_nilpotent_split(a, tol, nonzero_count=r)
    return CoreEPDecomposition(U=u, T=rr[:r, :r], S=rr[:r, r:], N=rr[r:, r:], r=r, k=idx.k)


def core_ep_inverse(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return core_ep_decompose(a, tol).core_ep_inverse()


def core_inverse(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Core inverse; requires ``ind(A) <= 1``."""
    d = core_ep_decompose(a, tol)
    if d.k > 1:
        raise PreconditionError(f"core inverse needs index <= 1, got {d.k}")
    return d.core_ep_inverse()


def pi_projector(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = as_matrix(a, "A")
    return identity(a.shape[0]) - a @ core_ep_inverse(a, tol)


def drazin_from_decomposition(d: CoreEPDecomposition) -> np.ndarray:
    # A^D = U [[T^-1, X], [0, 0]] U*  with  T X - X N = T^-1 S
    if d.r == 0:
        return np.zeros((d.n, d.n), complex)
    tinv = solve_left(d.T, identity(d.r))
    if d.r == d.n:
        return d.U @ tinv @ ct(d.U)
    try:
        x = scipy.linalg.solve_sylvester(d.T, -d.N, tinv @ d.S)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericBreakdownError(f"Sylvester solve failed: {exc}") from exc
    m = d.n - d.r
    return d.block(tinv, x, np.zeros((m, d.r)), np.zeros((m, m)))


def drazin(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return drazin_from_decomposition(core_ep_decompose(a, tol))


def group_inverse(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    d = core_ep_decompose(a, tol)
    if d.k > 1:
        raise PreconditionError(f"group inverse needs index <= 1, got {d.k}")
    return drazin_from_decomposition(d)


# -- residual audits ---------------------------------------------------------

def _res(lhs, rhs, scale) -> float:
    return relative_residual(lhs, rhs, scale)


def moore_penrose_residuals(a, x) -> Dict[str, float]:
    ax, xa = a @ x, x @ a
    return {
        "AXA=A": _res(ax @ a, a, spectral_norm(a)),
        "XAX=X": _res(xa @ x, x, spectral_norm(x)),
        "(AX)*=AX": _res(ct(ax), ax, spectral_norm(ax)),
        "(XA)*=XA": _res(ct(xa), xa, spectral_norm(xa)),
    }


def drazin_residuals(a, x, k: int) -> Dict[str, float]:
    ak = np.linalg.matrix_power(a, k)
    na = spectral_norm(a)
    return {
        "A^{k+1}X=A^k": _res(ak @ a @ x, ak, na**k),
        "XAX=X": _res(x @ a @ x, x, spectral_norm(x)),
        "AX=XA": _res(a @ x, x @ a, na * spectral_norm(x)),
    }


def core_ep_residuals(a, x, k: int) -> Dict[str, float]:
    """Residuals of ``X A^{k+1} = A^k``, ``A X^2 = X``, ``(AX)* = AX``.

    With ``k = 1`` these are the core-inverse equations.
    """
    ak = np.linalg.matrix_power(a, k)
    ax = a @ x
    return {
        "XA^{k+1}=A^k": _res(x @ ak @ a, ak, spectral_norm(a) ** k),
        "AX^2=X": _res(ax @ x, x, spectral_norm(x)),
        "(AX)*=AX": _res(ct(ax), ax, spectral_norm(ax)),
    }


def lemma_2_2_audit(a, m: int, tol: Tolerances = DEFAULT_TOL) -> Dict[str, float]:
    """Residuals of the four standard core-EP identities.

    (i)   A A^cep = A^m (A^cep)^m
    (ii)  A^cep = A^D A^k (A^k)^+
    (iii) (A^cep)^cep = A^2 A^cep, which is also the core inverse of A^cep
    (iv)  ((A^cep)^cep)^cep = A^cep
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    a = as_matrix(a, "A")
    d = core_ep_decompose(a, tol)
    x = d.core_ep_inverse()
    k = d.k
    ak = np.linalg.matrix_power(a, k)
    ax = a @ x
    lhs_i = np.linalg.matrix_power(a, m) @ np.linalg.matrix_power(x, m)
    rhs_ii = drazin_from_decomposition(d) @ ak @ moore_penrose(ak, tol)
    xx = core_ep_inverse(x, tol)
    a2x = a @ a @ x
    xxx = core_ep_inverse(xx, tol)
    nx = spectral_norm(x)
    return {
        "i": _res(ax, lhs_i, max(spectral_norm(ax), 1.0)),
        "ii": _res(x, rhs_ii, nx),
        "iii": _res(xx, a2x, spectral_norm(a2x)),
        "iii_core": _res(xx, core_inverse(x, tol), spectral_norm(a2x)),
        "iv": _res(xxx, x, nx),
    }


def decomposition_residuals(a, d: CoreEPDecomposition) -> Dict[str, float]:
    """Unitarity, reassembly and the A1/A2 structure of the decomposition."""
    na = spectral_norm(a)
    a1, a2 = d.core_part, d.nilpotent_part
    k = max(d.k, 1)
    out = {
        "U*U=I": spectral_norm(ct(d.U) @ d.U - identity(d.n)),
        "reassembly": _res(d.reassemble(), a, na),
        "A2^k=0": spectral_norm(np.linalg.matrix_power(a2, k)) / max(na**k, 1e-300),
        "A1*A2=0": spectral_norm(ct(a1) @ a2) / max(na**2, 1e-300),
        "A2A1=0": spectral_norm(a2 @ a1) / max(na**2, 1e-300),
    }
    return out
