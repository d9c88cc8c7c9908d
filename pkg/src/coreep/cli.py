"""Command-line front end.

Every command prints one JSON report of the form
``{"command", "status", "error", "tolerances", "result"}``.  Exit status is 0
on success, 1 when the analysis stopped on a precondition or guard (the
report names the failure) and 2 when input could not be read.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .acute import acute_report, equivalence_audit, rank_excess_certificate
from .audit import inverse_residuals, self_test
from .errors import CoreEPError, DimensionError, ParseError
from .geninv import (
    core_ep_decompose,
    core_inverse,
    decomposition_residuals,
    drazin_from_decomposition,
    lemma_2_2_audit,
    matrix_index,
    moore_penrose,
)
from .io import parse_matrix_file, to_jsonable
from .kernel import Tolerances
from .perturb import (
    PairContext,
    bounds_report,
    perturbation_data,
    reconstruct_theorem_3_4,
    stability_report,
)
from .special import corollary_5_2_apply, remark_5_3_dual_apply, theorem_5_1_apply

COMMANDS = ("invert", "decompose", "stable", "acute", "bounds", "audit")
NEEDS_B = {"stable", "acute", "bounds"}


@dataclass
class AnalysisRequest:
    command: str
    a: Optional[str] = None
    b: Optional[str] = None
    e: Optional[str] = None
    f: Optional[str] = None
    format: str = "json"
    tolerances: Tolerances = field(default_factory=Tolerances)
    b_is_core_part: bool = False
    m: int = 1
    self_test: bool = False
    count: int = 30
    seed: Optional[int] = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv-summary"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.command == "audit" and self.self_test:
            return
        if self.a is None:
            raise ValueError(f"{self.command} needs --a")
        if self.command in NEEDS_B and self.b is None:
            raise ValueError(f"{self.command} compares two matrices and needs --b")
        if self.e is not None and self.f is not None:
            raise ValueError("--e and --f are mutually exclusive")
        if (self.e is not None or self.f is not None) and self.command != "invert":
            raise ValueError("--e/--f apply to the invert command only")


def _invert(a, tol, e=None, f=None) -> dict:
    d = core_ep_decompose(a, tol)
    idx = matrix_index(a, tol)
    out = {
        "index": d.k,
        "rank_chain": idx.rank_chain,
        "core_ep_inverse": d.core_ep_inverse(),
        "pi_projector": np.eye(d.n) - a @ d.core_ep_inverse(),
        "moore_penrose": moore_penrose(a, tol),
        "drazin": drazin_from_decomposition(d),
        "core_inverse": core_inverse(a, tol) if d.k <= 1 else None,
        "group_inverse": drazin_from_decomposition(d) if d.k <= 1 else None,
        "residuals": inverse_residuals(a, tol),
    }
    if e is not None:
        bcep, ok = theorem_5_1_apply(a, e, tol)
        out["range_perturbation"] = {"B_cep": bcep, "projector_equal": ok}
        if d.k == 1:
            out["range_perturbation"]["core_inverse"] = corollary_5_2_apply(a, e, tol)
    if f is not None:
        bcep, ok = remark_5_3_dual_apply(a, f, tol)
        out["dual_perturbation"] = {"B_cep": bcep, "projector_equal": ok}
    return out


def _decompose(a, tol) -> dict:
    d = core_ep_decompose(a, tol)
    cond = None
    if d.r:
        s = np.linalg.svd(d.T, compute_uv=False)
        cond = float(s[0] / s[-1])
    return {"U": d.U, "T": d.T, "S": d.S, "N": d.N, "r": d.r, "k": d.k,
            "T_condition": cond, "residuals": decomposition_residuals(a, d)}


def _stable(c: PairContext) -> dict:
    rep = stability_report(None, None, ctx=c)
    out = {"verdict": rep.stable, **rep.to_dict()}
    if rep.stable:
        out["perturbation_data"] = perturbation_data(None, None, ctx=c).to_dict()
        bcep, bpi = reconstruct_theorem_3_4(None, None, ctx=c)
        out["reconstruction"] = {
            "B_cep": bcep, "B_pi": bpi,
            "error_B_cep": float(np.linalg.norm(bcep - c.b_cep, 2)),
            "error_B_pi": float(np.linalg.norm(bpi - c.b_pi, 2)),
        }
    return out


def _acute(c: PairContext) -> dict:
    out = acute_report(None, None, ctx=c).to_dict()
    out["equivalence"] = equivalence_audit(None, None, ctx=c)._asdict()
    out["rank_excess_certificate"] = (
        rank_excess_certificate(None, None, ctx=c) if c.da.r < c.db.r else None)
    return out


def _audit(req: AnalysisRequest, a, b, tol) -> dict:
    out = {"defining_residuals": inverse_residuals(a, tol),
           "identities": lemma_2_2_audit(a, req.m, tol)}
    if b is not None:
        c = PairContext(a, b, tol, req.b_is_core_part)
        out["equivalence"] = equivalence_audit(None, None, ctx=c)._asdict()
    return out


def _seed(req: AnalysisRequest) -> int:
    if req.seed is not None:
        return req.seed
    env = os.environ.get("COREEP_SEED")
    return int(env) if env else 0


def _dispatch(req: AnalysisRequest, mats: Dict[str, np.ndarray]) -> dict:
    tol = req.tolerances
    if req.command == "audit" and req.self_test:
        return self_test(req.count, _seed(req), tol)
    a = mats["a"]
    if req.command == "invert":
        return _invert(a, tol, mats.get("e"), mats.get("f"))
    if req.command == "decompose":
        return _decompose(a, tol)
    if req.command == "audit":
        return _audit(req, a, mats.get("b"), tol)
    c = PairContext(a, mats["b"], tol, req.b_is_core_part)
    if req.command == "stable":
        return _stable(c)
    if req.command == "acute":
        return _acute(c)
    return bounds_report(None, None, ctx=c).to_dict()


def run(req: AnalysisRequest):
    """Execute a request; return ``(exit_status, report)``."""
    tol = req.tolerances
    report = {
        "command": req.command,
        "status": "ok",
        "error": None,
        "tolerances": {"rank_tol": tol.rank_tol, "residual_tol": tol.residual_tol,
                       "singularity_tol": tol.singularity_tol},
        "result": None,
    }
    mats = {}
    try:
        req.validate()
        for name in ("a", "b", "e", "f"):
            path = getattr(req, name)
            if path is not None:
                mats[name] = parse_matrix_file(path)
    except (OSError, ParseError, DimensionError, ValueError) as exc:
        report["status"] = "input_error"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return 2, to_jsonable(report)
    try:
        report["result"] = _dispatch(req, mats)
    except CoreEPError as exc:
        report["status"] = "failed"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return 1, to_jsonable(report)
    status = 0
    if req.command == "audit" and req.self_test and not report["result"]["passed"]:
        report["status"] = "failed"
        report["error"] = {"type": "SelfTestFailure", "message": "self test found violations"}
        status = 1
    return status, to_jsonable(report)


def _flatten(obj, prefix="") -> List[tuple]:
    rows = []
    if isinstance(obj, dict):
        if {"rows", "cols", "data"} <= obj.keys():
            return [(prefix, f"matrix {obj['rows']}x{obj['cols']}")]
        for k, v in obj.items():
            rows += _flatten(v, f"{prefix}.{k}" if prefix else k)
    elif isinstance(obj, list) and all(not isinstance(v, (dict, list)) for v in obj):
        rows.append((prefix, " ".join(json.dumps(v) for v in obj)))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows += _flatten(v, f"{prefix}[{i}]")
    else:
        rows.append((prefix, json.dumps(obj)))
    return rows


def render(report: dict, fmt: str) -> str:
    if fmt == "csv-summary":
        lines = ["key,value"] + [f"{k},{v}" for k, v in _flatten(report)]
        return "\n".join(lines) + "\n"
    return json.dumps(report, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coreep", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--a", help="matrix A (JSON or CSV)")
    p.add_argument("--b", help="perturbed matrix B")
    p.add_argument("--e", help="range-aligned perturbation E (invert only)")
    p.add_argument("--f", help="dual perturbation F (invert only)")
    p.add_argument("--format", choices=("json", "csv-summary"), default="json")
    p.add_argument("--rank-tol", type=float, default=None)
    p.add_argument("--residual-tol", type=float, default=1e-9)
    p.add_argument("--singularity-tol", type=float, default=1e-9)
    p.add_argument("--b-is-core-part", action="store_true",
                   help="treat B as the core part B^2 B^cep of a perturbation")
    p.add_argument("--m", type=int, default=1, help="power used by the audit command")
    p.add_argument("--self-test", action="store_true",
                   help="audit generated fixtures (seed from COREEP_SEED)")
    p.add_argument("--count", type=int, default=30, help="fixtures per class for --self-test")
    p.add_argument("--seed", type=int, default=None, help="overrides COREEP_SEED")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = Tolerances(args.rank_tol, args.residual_tol, args.singularity_tol)
    except ValueError as exc:
        print(f"coreep: {exc}", file=sys.stderr)
        return 2
    req = AnalysisRequest(
        command=args.command, a=args.a, b=args.b, e=args.e, f=args.f,
        format=args.format, tolerances=tol, b_is_core_part=args.b_is_core_part,
        m=args.m, self_test=args.self_test, count=args.count, seed=args.seed,
    )
    status, report = run(req)
    text = render(report, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
