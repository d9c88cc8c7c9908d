"""Closed forms for range-aligned perturbations.

If ``A A^cep E = E`` and ``||E A^cep|| < 1`` then ``L = A + E`` has
``L^cep = A^cep (I + E A^cep)^-1`` and ``L L^cep = A A^cep``.  The dual
statement uses ``F`` with ``L = A* + F`` and
``L^cep = (I + (A^cep)* F)^-1 (A^cep)*``.
"""

from __future__ import annotations

import numpy as np

from .errors import GuardError, PreconditionError
from .geninv import core_ep_decompose
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    conjugate_transpose,
    identity,
    relative_residual,
    solve_left,
    solve_right,
    spectral_norm,
)

ct = conjugate_transpose


class RangeMisalignedError(GuardError):
    pass


class NormGuardError(GuardError):
    pass


def _setup(a, e, tol, name):
    a = as_matrix(a, "A")
    e = as_matrix(e, name)
    if e.shape != a.shape:
        raise PreconditionError(f"{name} has shape {e.shape}, A has {a.shape}")
    d = core_ep_decompose(a, tol)
    if d.k == 0:
        raise PreconditionError("requires ind(A) = k > 0; A is nonsingular")
    return a, e, d


def _check_range(proj, e, tol, name):
    ne = spectral_norm(e)
    if spectral_norm(proj @ e - e) > tol.residual_tol * max(ne, 1.0):
        raise RangeMisalignedError(f"A A^cep {name} != {name}")


def theorem_5_1_apply(a, e, tol: Tolerances = DEFAULT_TOL):
    """Return ``(L^cep, projector_equal)`` for ``L = A + E``."""
    a, e, d = _setup(a, e, tol, "E")
    x = d.core_ep_inverse()
    proj = d.range_projector()
    _check_range(proj, e, tol, "E")
    ex = e @ x
    if not spectral_norm(ex) < 1.0:
        raise NormGuardError(f"||E A^cep|| = {spectral_norm(ex):.6g} is not < 1")
    n = a.shape[0]
    bcep = solve_right(identity(n) + ex, x)
    L = a + e
    equal = relative_residual(L @ bcep, a @ x, 1.0) <= tol.residual_tol
    return bcep, bool(equal)


def corollary_5_2_apply(a, e, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Index-one specialization: the core inverse of ``A + E``."""
    a = as_matrix(a, "A")
    k = core_ep_decompose(a, tol).k
    if k != 1:
        raise PreconditionError(f"requires ind(A) = 1, got {k}")
    return theorem_5_1_apply(a, e, tol)[0]


def remark_5_3_dual_apply(a, f, tol: Tolerances = DEFAULT_TOL):
    """Return ``(L^cep, projector_equal)`` for ``L = A* + F``.

    ``projector_equal`` reports whether ``L L^cep = A A^cep`` actually holds
    for the computed inverse; callers should not assume it.
    """
    a, f, d = _setup(a, f, tol, "F")
    x = d.core_ep_inverse()
    proj = d.range_projector()
    _check_range(proj, f, tol, "F")
    xs = ct(x)
    xf = xs @ f
    if not spectral_norm(xf) < 1.0:
        raise NormGuardError(f"||(A^cep)* F|| = {spectral_norm(xf):.6g} is not < 1")
    n = a.shape[0]
    bcep = solve_left(identity(n) + xf, xs)
    L = ct(a) + f
    equal = relative_residual(L @ bcep, a @ x, 1.0) <= tol.residual_tol
    return bcep, bool(equal)
