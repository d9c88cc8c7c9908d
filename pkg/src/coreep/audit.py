"""Seeded end-to-end self test over generated fixtures."""

from __future__ import annotations

from typing import Dict

import numpy as np

from . import fixtures
from .acute import acute_report, equivalence_audit, rho_less
from .geninv import (
    core_ep_decompose,
    core_ep_residuals,
    drazin_from_decomposition,
    drazin_residuals,
    lemma_2_2_audit,
    moore_penrose,
    moore_penrose_residuals,
)
from .kernel import DEFAULT_TOL, Tolerances, spectral_norm
from .perturb import PairContext, bounds_report, reconstruct_theorem_3_4, stability_report


def inverse_residuals(a, tol: Tolerances = DEFAULT_TOL) -> Dict[str, float]:
    """Worst defining-equation residual of each inverse of ``a``."""
    d = core_ep_decompose(a, tol)
    x = d.core_ep_inverse()
    out = {
        "moore_penrose": max(moore_penrose_residuals(a, moore_penrose(a, tol)).values()),
        "drazin": max(drazin_residuals(a, drazin_from_decomposition(d), d.k).values()),
        "core_ep": max(core_ep_residuals(a, x, d.k).values()),
    }
    if d.k <= 1:
        out["core"] = max(core_ep_residuals(a, x, 1).values())
    return out


def pair_checks(a, b, tol: Tolerances = DEFAULT_TOL) -> Dict[str, object]:
    """Equivalence, reconstruction, bound and acute-chain checks for one pair."""
    c = PairContext(a, b, tol)
    st = stability_report(None, None, ctx=c)
    au = equivalence_audit(None, None, ctx=c)
    out: Dict[str, object] = {
        "near_boundary": st.near_boundary,
        "consistent": st.consistent and au.consistent,
        "stable": st.stable,
    }
    if not st.stable or st.near_boundary:
        return out
    bcep, bpi = reconstruct_theorem_3_4(None, None, ctx=c)
    out["reconstruction_error"] = max(
        spectral_norm(bcep - c.b_cep) / max(spectral_norm(c.b_cep), 1.0),
        spectral_norm(bpi - c.b_pi),
    )
    if c.da.r:
        br = bounds_report(None, None, ctx=c)
        ok = br.actual_relative_error <= br.bound_3_1 * (1 + 1e-10) + 1e-12
        if br.bound_3_6 is not None:
            ok = ok and br.actual_projector_error <= br.bound_3_6 * (1 + 1e-10) + 1e-12
        if br.bound_3_2 is not None:
            ok = ok and br.bound_3_1 <= br.bound_3_2_intermediate + 1e-10
            ok = ok and br.bound_3_2_intermediate <= br.bound_3_2 + 1e-10
        if br.z_guard:
            ok = ok and br.z_norm < 1
        if br.yz_guard:
            ok = ok and br.yz_norm < 1
        out["bounds_ok"] = bool(ok)
    ar = acute_report(None, None, ctx=c)
    out["radius_norm_gap"] = abs(ar.rho_pi_diff - ar.pi_diff_norm)
    if ar.hypotheses_hold:
        out["acute_chain_ok"] = acute_chain_holds(ar)
    return out


def acute_chain_holds(ar) -> bool:
    return bool(
        ar.rho_zstarz is not None
        and ar.rho_zstarz < 0.5
        and abs(ar.rho_bbAA - ar.rho_aaBB) <= 1e-8
        and ar.rho_bbAA <= ar.rho_zstarz / (1 - ar.rho_zstarz) + 1e-10
        and abs(ar.rho_pi_diff**2 - ar.rho_aaBB) <= 1e-8
        and rho_less(ar.rho_pi_diff, 1.0)
        and ar.nonsingular_I_minus_BBcep_Api
        and ar.nonsingular_I_minus_AAcep_Bpi
        and ar.nonsingular_I_minus_pi_diff
        and ar.nonsingular_I_minus_pi_diff_sq
    )


def self_test(count: int = 30, seed: int = 0, tol: Tolerances = DEFAULT_TOL) -> dict:
    rng = np.random.default_rng(seed)
    worst: Dict[str, float] = {}
    identity_worst = 0.0
    for kind in fixtures.MATRIX_KINDS:
        for _ in range(count):
            a = fixtures.random_matrix(kind, rng).A
            for name, v in inverse_residuals(a, tol).items():
                worst[name] = max(worst.get(name, 0.0), v)
            identity_worst = max(identity_worst, max(lemma_2_2_audit(a, int(rng.integers(1, 4)), tol).values()))
    stats = {"pairs": 0, "skipped_near_boundary": 0, "inconsistent": 0,
             "max_reconstruction_error": 0.0, "bound_violations": 0,
             "acute_chain_checked": 0, "acute_chain_violations": 0, "max_radius_norm_gap": 0.0}
    for p in fixtures.pair_stream(count * len(fixtures.PAIR_KINDS), rng):
        res = pair_checks(p.A.A, p.B, tol)
        stats["pairs"] += 1
        if res["near_boundary"]:
            stats["skipped_near_boundary"] += 1
            continue
        stats["inconsistent"] += not res["consistent"]
        stats["max_reconstruction_error"] = max(
            stats["max_reconstruction_error"], res.get("reconstruction_error", 0.0))
        stats["bound_violations"] += not res.get("bounds_ok", True)
        stats["max_radius_norm_gap"] = max(stats["max_radius_norm_gap"], res.get("radius_norm_gap", 0.0))
        if "acute_chain_ok" in res:
            stats["acute_chain_checked"] += 1
            stats["acute_chain_violations"] += not res["acute_chain_ok"]
    passed = (
        all(v <= 1e-9 for v in worst.values())
        and identity_worst <= 1e-8
        and stats["inconsistent"] == 0
        and stats["max_reconstruction_error"] <= 1e-8
        and stats["bound_violations"] == 0
        and stats["acute_chain_violations"] == 0
        and stats["max_radius_norm_gap"] <= 1e-8
    )
    return {"seed": seed, "count": count, "max_defining_residual": worst,
            "max_identity_residual": identity_worst, **stats, "passed": bool(passed)}
