"""Acute perturbations of the core-EP inverse.

``B`` is acute for ``A`` when ``rho(B^pi - A^pi) < 1``.  Because both
projectors are orthogonal, that spectral radius equals the spectral norm of
the difference, and acuteness turns out to coincide with stability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from .errors import NumericBreakdownError, PreconditionError
from .kernel import (
    DEFAULT_TOL,
    Tolerances,
    conjugate_transpose,
    is_nonsingular,
    spectral_norm,
    spectral_radius,
)
from .perturb import PairContext, stability_report

ct = conjugate_transpose

# rho comparisons: absolute slack on top of relative slack
RHO_ABS = 1e-8
RHO_REL = 1e-6


def rho_less(a: float, b: float) -> bool:
    """``a < b`` with the slack appropriate for computed spectral radii."""
    return a < b - (RHO_ABS + RHO_REL * abs(b))


@dataclass
class AcuteReport:
    rho_zstarz: Optional[float]
    rho_bbAA: float
    rho_aaBB: float
    rho_pi_diff: float
    rho_pi_diff_sq: float
    pi_diff_norm: float
    threshold: float
    e_norm: float
    ranks_equal: bool
    nonsingular_I_minus_BBcep_Api: bool
    nonsingular_I_minus_AAcep_Bpi: bool
    nonsingular_I_minus_pi_diff: bool
    nonsingular_I_minus_pi_diff_sq: bool
    verdict: bool

    @property
    def hypotheses_hold(self) -> bool:
        """Equal ranks and ``||E_B A^cep|| < 1/(1 + sqrt(2 ||A^pi||))``."""
        return bool(self.ranks_equal and self.e_norm < self.threshold)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["hypotheses_hold"] = self.hypotheses_hold
        return d


def acute_report(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                 ctx: Optional[PairContext] = None) -> AcuteReport:
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    c.require_singular_a()
    i = c.I
    aa = i - c.a_pi
    bb = i - c.b_pi
    d = c.b_pi - c.a_pi
    rho_zz = None
    if c.m1_margin > 1.0:
        rho_zz = spectral_radius(ct(c.Z) @ c.Z)
    rho_d = spectral_radius(d)
    return AcuteReport(
        rho_zstarz=rho_zz,
        rho_bbAA=spectral_radius(bb @ (i - aa)),
        rho_aaBB=spectral_radius(aa @ (i - bb)),
        rho_pi_diff=rho_d,
        rho_pi_diff_sq=spectral_radius(d @ d),
        pi_diff_norm=spectral_norm(d),
        threshold=float(1.0 / (1.0 + np.sqrt(2.0 * spectral_norm(c.a_pi)))),
        e_norm=spectral_norm(c.EA),
        ranks_equal=c.da.r == c.db.r,
        nonsingular_I_minus_BBcep_Api=is_nonsingular(i - bb @ c.a_pi, c.tol),
        nonsingular_I_minus_AAcep_Bpi=is_nonsingular(i - aa @ c.b_pi, c.tol),
        nonsingular_I_minus_pi_diff=is_nonsingular(i - d, c.tol),
        nonsingular_I_minus_pi_diff_sq=is_nonsingular(i - d @ d, c.tol),
        verdict=rho_less(rho_d, 1.0),
    )


class EquivalenceAudit(NamedTuple):
    acute: bool
    c_star: bool
    stable: bool
    rank_triplet: bool
    consistent: bool
    near_boundary: bool = False


def equivalence_audit(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                      ctx: Optional[PairContext] = None) -> EquivalenceAudit:
    """Evaluate acuteness, condition (C_{s,*}), stability and the rank triplet
    independently and report whether they agree."""
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    acute = acute_report(None, None, ctx=c).verdict
    st = stability_report(None, None, ctx=c)
    flags = (acute, st.conditions["iv"], st.conditions["i"], st.conditions["iii"])
    return EquivalenceAudit(*flags, consistent=len(set(flags)) == 1,
                            near_boundary=st.near_boundary)


def rank_excess_certificate(a, b, tol: Tolerances = DEFAULT_TOL, b_is_core_part: bool = False,
                            ctx: Optional[PairContext] = None) -> np.ndarray:
    """Unit vector ``x`` in ``R(B^s)`` orthogonal to ``R(A^k)``.

    Such ``x`` satisfies ``B B^cep x = x`` and ``A A^cep x = 0``, so
    ``||B^pi - A^pi|| >= 1``.  Requires ``rk(A^k) < rk(B^s)``.
    """
    c = ctx or PairContext(a, b, tol, b_is_core_part)
    ra, rb = c.da.r, c.db.r
    if not ra < rb:
        raise PreconditionError(
            f"no certificate: rk(A^k) = {ra} is not below rk(B^s) = {rb}")
    v1 = c.db.U1
    if ra == 0:
        x = v1[:, 0]
    else:
        # null vector of U1* V1 picks the part of R(B^s) orthogonal to R(A^k)
        _, _, vh = scipy.linalg.svd(ct(c.da.U1) @ v1)
        x = v1 @ np.conj(vh[-1])
    x = x / np.linalg.norm(x)
    bb = c.I - c.b_pi
    aa = c.I - c.a_pi
    err = max(np.linalg.norm(bb @ x - x), np.linalg.norm(aa @ x))
    if err > c.tol.residual_tol:
        raise NumericBreakdownError(f"certificate residual {err:.3e} too large")
    return x
