"""Stable perturbations of the core-EP inverse.

For a pair ``(A, B)`` the analysis works with the core part
``L_B = B^2 B^cep`` and the derived quantities

    E_B = L_B - A,   F_B = L_B - A*,
    Y   = (I + (A^cep)* F_B)^-1 (A^cep)* F_B A^pi,
    Z   = A^pi E_B A^cep (I + E_B A^cep)^-1,
    W1  = (I + YZ)(I - Z),   W2 = (I - Z*)(I + Z*Z).

Every pair function accepts ``b_is_core_part=True`` to treat the supplied
``B`` as ``L_B`` itself (useful when only the block form of ``L_B`` is known).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Optional

import numpy as np

from .blockcore import BlockCoreSpec
from .errors import ExtractionError, GuardError, InconsistencyError, PreconditionError
from .geninv import CoreEPDecomposition, core_ep_decompose
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    conjugate_transpose,
    identity,
    rank_decision,
    require_square,
    singularity_margin,
    solve_left,
    solve_right,
    spectral_norm,
)

ct = conjugate_transpose

# decisions whose controlling scalar is within this factor of its threshold
# are reported as lying in the tolerance-boundary band
BAND = 10.0


def _in_band(margin: float) -> bool:
    return 1.0 / BAND < margin < BAND


class NotBlockFormError(ExtractionError):
    """``U* L U`` has a nonsingular corner but violates ``X22 = Q B1 P``."""


def l_matrix(b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``L_B = B^2 B^cep``."""
    b = as_matrix(b, "B")
    require_square(b, "B")
    return b @ b @ core_ep_decompose(b, tol).core_ep_inverse()


class PairContext:
    """Lazily computed shared quantities for a pair ``(A, B)``."""

    def __init__(self, a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False):
        self.A = as_matrix(a, "A")
        self.B = as_matrix(b, "B")
        n = require_square(self.A, "A")
        if self.B.shape != (n, n):
            raise PreconditionError(f"A is {self.A.shape} but B is {self.B.shape}")
        self.n = n
        self.tol = tol
        self.b_is_core_part = b_is_core_part
        self.I = identity(n)

    # -- A side
    @cached_property
    def da(self) -> CoreEPDecomposition:
        return core_ep_decompose(self.A, self.tol)

    @property
    def k(self) -> int:
        return self.da.k

    def require_singular_a(self):
        if self.k == 0:
            raise PreconditionError("the analysis requires ind(A) = k > 0; A is nonsingular")

    @cached_property
    def a_cep(self) -> np.ndarray:
        return self.da.core_ep_inverse()

    @cached_property
    def a_pi(self) -> np.ndarray:
        return self.I - self.A @ self.a_cep

    @cached_property
    def a_k(self) -> np.ndarray:
        return np.linalg.matrix_power(self.A, self.k)

    # -- B side
    @cached_property
    def db(self) -> CoreEPDecomposition:
        return core_ep_decompose(self.B, self.tol)

    @property
    def s(self) -> int:
        return self.db.k

    @cached_property
    def b_cep(self) -> np.ndarray:
        return self.db.core_ep_inverse()

    @cached_property
    def b_pi(self) -> np.ndarray:
        return self.I - self.B @ self.b_cep

    @cached_property
    def L(self) -> np.ndarray:
        if self.b_is_core_part:
            if self.s > 1:
                raise PreconditionError(
                    f"a core part has index <= 1; supplied matrix has index {self.s}")
            return self.B
        return self.B @ self.B @ self.b_cep

    @cached_property
    def b_s(self) -> np.ndarray:
        # R(L_B) = R(B^s); for a supplied core part L stands in for B^s
        if self.b_is_core_part:
            return self.L
        return np.linalg.matrix_power(self.B, self.s)

    # -- perturbation quantities
    @cached_property
    def E(self) -> np.ndarray:
        return self.L - self.A

    @cached_property
    def F(self) -> np.ndarray:
        return self.L - ct(self.A)

    @cached_property
    def EA(self) -> np.ndarray:
        return self.E @ self.a_cep

    @cached_property
    def AF(self) -> np.ndarray:
        return ct(self.a_cep) @ self.F

    @cached_property
    def M1(self) -> np.ndarray:
        """``I + E_B A^cep``."""
        return self.I + self.EA

    @cached_property
    def M2(self) -> np.ndarray:
        """``I + (A^cep)* F_B``."""
        return self.I + self.AF

    @cached_property
    def m1_margin(self) -> float:
        return singularity_margin(self.M1, self.tol, scale=1.0 + spectral_norm(self.EA))

    @cached_property
    def m2_margin(self) -> float:
        return singularity_margin(self.M2, self.tol, scale=1.0 + spectral_norm(self.AF))

    @cached_property
    def M1inv(self) -> np.ndarray:
        return solve_left(self.M1, self.I)

    @cached_property
    def Y(self) -> np.ndarray:
        return solve_left(self.M2, self.AF @ self.a_pi)

    @cached_property
    def Z(self) -> np.ndarray:
        return solve_right(self.M1, self.a_pi @ self.EA)


@dataclass
class StabilityReport:
    """Verdicts of the seven equivalent stability conditions.

    ``conditions`` maps a roman numeral to its boolean verdict, and ``scalars``
    holds the quantities each verdict was decided on.  ``stable`` is the
    definitional verdict (condition i).
    """

    conditions: Dict[str, bool]
    scalars: Dict[str, float]
    block_spec: Optional[BlockCoreSpec]
    near_boundary: bool
    stable: bool = field(init=False)
    consistent: bool = field(init=False)

    def __post_init__(self):
        self.stable = self.conditions["i"]
        self.consistent = len(set(self.conditions.values())) == 1

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "consistent": self.consistent,
            "near_boundary": self.near_boundary,
            "conditions": dict(self.conditions),
            "scalars": dict(self.scalars),
            "block_spec": None if self.block_spec is None else {
                "B1": self.block_spec.B1, "P": self.block_spec.P, "Q": self.block_spec.Q},
        }


def extract_block_form(decomp: CoreEPDecomposition, L, tol: Tolerances = DEFAULT_TOL,
                       return_margins: bool = False):
    """Write ``U* L U = [[B1, B1 P], [Q B1, Q B1 P]]`` in ``A``'s frame.

    Raises ``ExtractionError`` when the leading block is singular and
    ``NotBlockFormError`` when the trailing block is inconsistent.
    """
    L = as_matrix(L, "L")
    r = decomp.r
    if r == 0 or r == decomp.n:
        raise ExtractionError(f"block form needs 0 < r < n, got r={r}")
    x = ct(decomp.U) @ L @ decomp.U
    x11, x12, x21, x22 = x[:r, :r], x[:r, r:], x[r:, :r], x[r:, r:]
    margin = singularity_margin(x11, tol, scale=spectral_norm(L))
    if margin <= 1.0:
        raise ExtractionError("leading block U1* L U1 is singular")
    p = solve_left(x11, x12)
    q = solve_right(x11, x21)
    nl = spectral_norm(L)
    dev = spectral_norm(x22 - q @ x11 @ p)
    fit = dev / (tol.residual_tol * nl) if nl > 0 else 0.0
    if fit > 1.0:
        raise NotBlockFormError(
            f"trailing block deviates from Q B1 P by {dev:.3e} (relative {dev / nl:.3e})")
    spec = BlockCoreSpec(x11, p, q)
    if return_margins:
        return spec, margin, fit
    return spec


def _condition_vi(c: PairContext, margins, sc):
    try:
        spec, m_x11, fit = extract_block_form(c.da, c.L, c.tol, return_margins=True)
    except ExtractionError:
        return False, None
    margins += [m_x11, fit]
    ipq = identity(spec.m) + spec.P @ spec.Q
    m_ipq = singularity_margin(
        ipq, c.tol, scale=1.0 + spectral_norm(spec.P) * spectral_norm(spec.Q))
    margins.append(m_ipq)
    sc["sigma_min_I+PQ"] = m_ipq * c.tol.singularity_tol
    return m_ipq > 1.0, spec


def stability_report(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                     ctx: Optional[PairContext] = None) -> StabilityReport:
    """Evaluate each stability condition independently.

    (i)   I - (B^pi - A^pi)^2 nonsingular
    (ii)  the same with L_B in place of B
    (iii) rk(B^s) = rk(A^k) = rk((A^k)* L_B A^k)
    (iv)  rk((B^s)* A^k) = rk(A^k) and rk((A^k)* B^s) = rk(B^s)
    (v)   I + E_B A^cep nonsingular and A^pi (I + E_B A^cep)^-1 L_B = 0
    (vi)  L_B has the block form with B1 and I + PQ nonsingular
    (vii) rk(B^s) = rk(A^k) and I + E_B A^cep nonsingular
    """
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    c.require_singular_a()
    tol = c.tol
    margins = []
    sc: Dict[str, float] = {}
    cond: Dict[str, bool] = {}

    d = c.b_pi - c.a_pi
    m_i = singularity_margin(c.I - d @ d, tol, scale=1.0)
    cond["i"] = m_i > 1.0
    sc["sigma_min_I-(Bpi-Api)^2"] = m_i * tol.singularity_tol
    margins.append(m_i)

    if c.b_is_core_part:
        l_pi = c.b_pi
    else:
        l_pi = c.I - c.L @ core_ep_decompose(c.L, tol).core_ep_inverse()
    dl = l_pi - c.a_pi
    m_ii = singularity_margin(c.I - dl @ dl, tol, scale=1.0)
    cond["ii"] = m_ii > 1.0
    margins.append(m_ii)

    na, nb, nl = spectral_norm(c.a_k), spectral_norm(c.b_s), spectral_norm(c.L)
    rk_a = rank_decision(c.a_k, tol, scale=spectral_norm(c.A) ** c.k)
    rk_b = rank_decision(c.b_s, tol, scale=spectral_norm(c.B) ** max(c.s, 1))
    rk_alla = rank_decision(ct(c.a_k) @ c.L @ c.a_k, tol, scale=na * nl * na)
    sc.update({"rank_A^k": rk_a.rank, "rank_B^s": rk_b.rank,
               "rank_(A^k)*L_B A^k": rk_alla.rank, "k": c.k, "s": c.s})
    margins += [rk_a.margin, rk_b.margin, rk_alla.margin]
    cond["iii"] = rk_a.rank == rk_b.rank == rk_alla.rank

    rk_ba = rank_decision(ct(c.b_s) @ c.a_k, tol, scale=nb * na)
    rk_ab = rank_decision(ct(c.a_k) @ c.b_s, tol, scale=na * nb)
    sc.update({"rank_(B^s)*A^k": rk_ba.rank, "rank_(A^k)*B^s": rk_ab.rank})
    margins += [rk_ba.margin, rk_ab.margin]
    cond["iv"] = rk_ba.rank == rk_a.rank and rk_ab.rank == rk_b.rank

    m1 = c.m1_margin
    sc["sigma_min_I+E_B A^cep"] = m1 * tol.singularity_tol * (1.0 + spectral_norm(c.EA))
    margins.append(m1)
    if m1 > 1.0:
        res = spectral_norm(c.a_pi @ c.M1inv @ c.L)
        scale = spectral_norm(c.M1inv) * nl
        sc["residual_A^pi(I+E_B A^cep)^-1 L_B"] = res / scale if scale > 0 else res
        fit = res / (tol.residual_tol * scale) if scale > 0 else 0.0
        margins.append(fit)
        cond["v"] = fit <= 1.0
    else:
        sc["residual_A^pi(I+E_B A^cep)^-1 L_B"] = float("nan")
        cond["v"] = False

    spec = None
    if c.da.r == 0:
        # empty leading block: the form degenerates to L_B = 0
        cond["vi"] = rank_decision(c.L, tol, scale=spectral_norm(c.B) ** 2).rank == 0
    else:
        cond["vi"], spec = _condition_vi(c, margins, sc)

    cond["vii"] = rk_a.rank == rk_b.rank and m1 > 1.0

    near = any(_in_band(m) for m in margins if np.isfinite(m))
    return StabilityReport(conditions=cond, scalars=sc, block_spec=spec, near_boundary=near)


@dataclass
class PerturbationData:
    L_B: np.ndarray
    E_B: np.ndarray
    F_B: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    W1_inv: np.ndarray
    W2_inv: np.ndarray
    M1_inv: np.ndarray
    m1_nonsingular: bool
    m2_nonsingular: bool

    def to_dict(self) -> dict:
        return {
            "L_B": self.L_B, "E_B": self.E_B, "F_B": self.F_B, "Y": self.Y, "Z": self.Z,
            "W1": self.W1, "W2": self.W2,
            "m1_nonsingular": self.m1_nonsingular, "m2_nonsingular": self.m2_nonsingular,
        }


def _perturbation_data(c: PairContext) -> PerturbationData:
    if c.m1_margin <= 1.0 or c.m2_margin <= 1.0:
        raise InconsistencyError(
            "stable verdict but I + E_B A^cep or I + (A^cep)* F_B is numerically singular")
    y, z, i = c.Y, c.Z, c.I
    iyz = i + y @ z
    if singularity_margin(iyz, c.tol, scale=1.0 + spectral_norm(y @ z)) <= 1.0:
        raise InconsistencyError("stable verdict but I + YZ is numerically singular")
    zs = ct(z)
    izz = i + zs @ z
    return PerturbationData(
        L_B=c.L, E_B=c.E, F_B=c.F, Y=y, Z=z,
        W1=iyz @ (i - z),
        W2=(i - zs) @ izz,
        W1_inv=solve_right(iyz, i + z),
        W2_inv=solve_left(izz, i + zs),
        M1_inv=c.M1inv,
        m1_nonsingular=True, m2_nonsingular=True,
    )


def _require_stable(c: PairContext) -> StabilityReport:
    rep = stability_report(None, None, ctx=c)
    if not rep.stable:
        raise PreconditionError("B is not a stable perturbation of A")
    return rep


def perturbation_data(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                      ctx: Optional[PairContext] = None) -> PerturbationData:
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    _require_stable(c)
    return _perturbation_data(c)


def reconstruct_theorem_3_4(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                            ctx: Optional[PairContext] = None):
    """Closed-form ``(B^cep, B^pi)`` from ``A^cep``, ``A^pi`` and the pair data.

        B^cep = W1^-1 A^cep (I + E_B A^cep)^-1 W2^-1
        B^pi  = W2 A^pi (I + E_B A^cep)^-1 W2^-1
    """
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    pd = perturbation_data(None, None, ctx=c)
    b_cep = pd.W1_inv @ c.a_cep @ pd.M1_inv @ pd.W2_inv
    b_pi = pd.W2 @ c.a_pi @ pd.M1_inv @ pd.W2_inv
    return b_cep, b_pi


@dataclass
class BoundReport:
    G1: np.ndarray
    G2: np.ndarray
    alpha: float
    beta: float
    z_norm: float
    yz_norm: float
    bound_3_1: float
    bound_3_2_intermediate: Optional[float]
    bound_3_2: Optional[float]
    bound_3_6: Optional[float]
    actual_relative_error: float
    actual_projector_error: float
    z_lt_1: bool
    yz_lt_1: bool
    z_guard: bool
    yz_guard: bool

    def require(self, name: str) -> float:
        """Return a guarded bound, raising ``GuardError`` if its guard failed."""
        value = getattr(self, name)
        if value is None:
            raise GuardError(f"{name} is undefined: ||Z|| < 1 and/or ||YZ|| < 1 failed")
        return value

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _guards(c: PairContext):
    ea = spectral_norm(c.EA)
    pea = spectral_norm(c.a_pi @ c.EA)
    af = spectral_norm(c.AF)
    api = spectral_norm(c.a_pi)
    z_guard = bool(ea + pea < 1.0)
    yz_guard = bool(max(ea, af) < 1.0 / (1.0 + np.sqrt(api)))
    return z_guard, yz_guard


def remark_3_7_guards(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                      ctx: Optional[PairContext] = None):
    """Sufficient conditions for ``||Z|| < 1`` and ``||YZ|| < 1``.

    ``z_guard``:  ||E_B A^cep|| + ||A^pi E_B A^cep|| < 1
    ``yz_guard``: max(||E_B A^cep||, ||(A^cep)* F_B||) < 1 / (1 + sqrt(||A^pi||))
    """
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    return _guards(c)


def bounds_report(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                  ctx: Optional[PairContext] = None) -> BoundReport:
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    pd = perturbation_data(None, None, ctx=c)
    if c.da.r == 0:
        raise PreconditionError("relative bounds need A^cep != 0; A is nilpotent")
    i, z, y, x = c.I, pd.Z, pd.Y, c.a_cep
    zs = ct(z)
    yz = y @ z
    g1 = x - (i + yz - z) @ x @ (i + zs @ z - zs)
    g2 = pd.M1_inv - i
    nz, nyz = spectral_norm(z), spectral_norm(yz)
    nx, ng1, ng2 = spectral_norm(x), spectral_norm(g1), spectral_norm(g2)
    alpha = 1.0 + nz + nyz
    beta = 1.0 + nz + nz**2
    b31 = spectral_norm(pd.W1_inv) * spectral_norm(pd.W2_inv) / nx * (ng1 + nx * ng2)
    z_lt, yz_lt = bool(nz < 1.0), bool(nyz < 1.0)
    b32i = b32 = b36 = None
    if z_lt and yz_lt:
        lead = (1.0 + nz) / ((1.0 - nz) * (1.0 - nyz))
        b32i = lead / nx * (ng1 + nx * ng2)
        b32 = lead * (1.0 + alpha * beta + ng2)
    if z_lt:
        b36 = 2.0 * nz / (1.0 - nz)
    zg, yzg = _guards(c)
    return BoundReport(
        G1=g1, G2=g2, alpha=alpha, beta=beta, z_norm=nz, yz_norm=nyz,
        bound_3_1=b31, bound_3_2_intermediate=b32i, bound_3_2=b32, bound_3_6=b36,
        actual_relative_error=spectral_norm(c.b_cep - x) / nx,
        actual_projector_error=spectral_norm(c.b_pi - c.a_pi),
        z_lt_1=z_lt, yz_lt_1=yz_lt, z_guard=zg, yz_guard=yzg,
    )
