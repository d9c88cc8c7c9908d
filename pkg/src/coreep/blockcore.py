"""Core inverse of the structured block matrix ``W = [[B1, B1 P], [Q B1, Q B1 P]]``.

``W`` is core invertible exactly when ``I + PQ`` is nonsingular, and then

    W^core = [[K, K Q*], [Q K, Q K Q*]],   K = ((I + Q*Q) B1 (I + PQ))^-1
    W W^core = [[H, H Q*], [Q H, Q H Q*]], H = (I + Q*Q)^-1
    W^pi = I - W W^core
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotCoreInvertibleError, PreconditionError
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    conjugate_transpose,
    identity,
    singularity_margin,
    solve_left,
    spectral_norm,
)

ct = conjugate_transpose


@dataclass(frozen=True)
class BlockCoreSpec:
    B1: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        b1 = as_matrix(self.B1, "B1")
        p = as_matrix(self.P, "P")
        q = as_matrix(self.Q, "Q")
        m = b1.shape[0]
        if b1.shape != (m, m):
            raise DimensionError(f"B1 must be square, got {b1.shape}")
        if p.shape[0] != m or q.shape[1] != m or p.shape[1] != q.shape[0]:
            raise DimensionError(
                f"incompatible shapes B1 {b1.shape}, P {p.shape}, Q {q.shape}")
        object.__setattr__(self, "B1", b1)
        object.__setattr__(self, "P", p)
        object.__setattr__(self, "Q", q)

    @property
    def m(self) -> int:
        return self.B1.shape[0]

    @property
    def n(self) -> int:
        return self.P.shape[1]


def assemble_w(spec: BlockCoreSpec) -> np.ndarray:
    b1p = spec.B1 @ spec.P
    return np.block([[spec.B1, b1p], [spec.Q @ spec.B1, spec.Q @ b1p]])


def block_core_inverse(spec: BlockCoreSpec, tol: Tolerances = DEFAULT_TOL):
    """Return ``(W^core, W W^core, W^pi)`` from the closed forms.

    Raises ``NotCoreInvertibleError`` if ``I + PQ`` is singular and
    ``PreconditionError`` if ``B1`` is.
    """
    b1, p, q = spec.B1, spec.P, spec.Q
    m, n = spec.m, spec.n
    if singularity_margin(b1, tol) <= 1.0:
        raise PreconditionError("B1 is singular")
    ipq = identity(m) + p @ q
    scale = 1.0 + spectral_norm(p) * spectral_norm(q)
    if singularity_margin(ipq, tol, scale=scale) <= 1.0:
        raise NotCoreInvertibleError("I + PQ is singular; W is not core invertible")
    iqq = identity(m) + ct(q) @ q
    # K = (iqq B1 ipq)^-1 by three solves, never an explicit inverse per factor
    k = solve_left(ipq, solve_left(b1, solve_left(iqq, identity(m))))
    h = solve_left(iqq, identity(m))
    qs = ct(q)
    wcore = np.block([[k, k @ qs], [q @ k, q @ k @ qs]])
    wwcore = np.block([[h, h @ qs], [q @ h, q @ h @ qs]])
    wpi = identity(m + n) - wwcore
    return wcore, wwcore, wpi
