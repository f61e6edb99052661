"""Command-line driver.

Exit status: 0 success, 1 a verification did not pass, 2 bad input, 3 a
mathematical error (its code is written into the report).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable

from . import deformation as dfm
from . import difference_eq as deq
from . import drinfeld_core as core
from . import extended_log as ext
from .errors import DrinlogError
from .local_field import FIELD_PRESETS, WElem, WorkingField
from .suites import SUITES, run_suite
from .tate_series import TateMat

REPORT_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_MATH = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass
class JobSpec:
    field: str = "2,1,1,1"
    preset: str | None = None
    theta: str | None = None
    module: str = "carlitz"
    power_wrap: bool = False
    op: str | None = None
    xi: str | None = None
    prec: int = 50
    tdeg: int = 40
    order: int = 10
    n: int = 3
    height: int = 6
    policy: str = "least"
    psi: str | None = None
    out: str | None = None
    suite: str | None = None

    @classmethod
    def from_mapping(cls, data: dict) -> "JobSpec":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown job keys: {unknown}")
        return cls(**data)

    def params(self) -> dict:
        return {
            "xi": self.xi,
            "prec": self.prec,
            "tdeg": self.tdeg,
            "order": self.order,
            "n": self.n,
            "height": self.height,
            "policy": self.policy,
        }


# -- parsing --------------------------------------------------------------------


def build_field(job: JobSpec) -> WorkingField:
    if job.preset:
        if job.preset not in FIELD_PRESETS:
            raise UsageError(f"unknown field preset {job.preset!r}; known: {sorted(FIELD_PRESETS)}")
        return WorkingField.preset(job.preset)
    try:
        parts = [int(x) for x in job.field.split(",")]
    except ValueError:
        raise UsageError(f"--field expects p,m,s,e integers, got {job.field!r}") from None
    if len(parts) != 4:
        raise UsageError("--field expects four integers p,m,s,e")
    p, m, s, e = parts
    terms = None
    if job.theta:
        try:
            terms = {int(k): int(c) for k, c in (item.split(":") for item in job.theta.split(","))}
        except ValueError:
            raise UsageError("--theta expects exponent:code pairs such as -2:1,-1:1") from None
    return WorkingField.build(p, m, s, e, theta_terms=terms)


def build_module(W: WorkingField, job: JobSpec) -> core.DrinfeldModule:
    spec = job.module.strip()
    if spec.lower() == "carlitz":
        return core.DrinfeldModule.carlitz(W)
    head, _, rest = spec.partition(",")
    try:
        r = int(head)
    except ValueError:
        raise UsageError(f"--module expects r,kappa_1,...,kappa_r or 'carlitz', got {spec!r}") from None
    exprs = [x for x in rest.split(",") if x.strip()]
    if len(exprs) != r:
        raise UsageError(f"rank {r} needs {r} kappa expressions, got {len(exprs)}")
    kappa = [W.parse(x) for x in exprs]
    if job.power_wrap:
        kappa = [k.twist(r) for k in kappa]
    return core.DrinfeldModule(W, kappa)


def parse_xi(W: WorkingField, job: JobSpec, default: str = "theta^-1") -> WElem:
    return W.parse(job.xi if job.xi is not None else default)


def load_psi(W: WorkingField, E: core.DrinfeldModule, job: JobSpec) -> TateMat:
    if job.psi:
        try:
            with open(job.psi, encoding="utf-8") as fh:
                return TateMat.from_dict(W, json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UsageError(f"cannot read Psi from {job.psi}: {exc}") from None
    if E.r != 1:
        raise UsageError("rank >= 2 operations need a trivialization via --psi")
    return deq.psi_rank1(E, max(job.tdeg, 64 if W.q == 2 else job.tdeg), job.prec + 20)


def policy_of(job: JobSpec) -> deq.BranchPolicy:
    if job.policy == "least":
        return deq.BranchPolicy.least()
    if job.policy == "kinfty":
        return deq.BranchPolicy.kinfty()
    raise UsageError(f"unknown policy {job.policy!r}")


# -- operations ---------------------------------------------------------------


def _verification(fn):
    def run(W, E, job):
        Psi = load_psi(W, E, job)
        lattice = ext.period_lattice_from_psi(E, Psi, prec=job.prec)
        rep = fn(E, Psi, parse_xi(W, job), prec=job.prec, lattice=lattice, policy=policy_of(job))
        return rep.to_dict(), rep.passed

    return run


def _op_partitions(W, E, job):
    parts = dfm.enumerate_P_r_n(E.r, job.n)
    return {"r": E.r, "n": job.n, "count": len(parts), "partitions": [str(p) for p in parts]}, None


def _op_b_direct(W, E, job):
    return dfm.b_record(E, job.n, min(job.tdeg, 8)), None


def _op_b_recursive(W, E, job):
    return {"n": job.n, "rational_form": dfm.b_series_recursive(E, job.n).to_dict()}, None


def _op_deformation(W, E, job):
    xi = parse_xi(W, job)
    series = dfm.deformation_series(E, xi, None, job.tdeg, prec=job.prec)
    return {"series": series.to_dict()}, None


def _op_specialize(W, E, job):
    return {"value": dfm.specialize_log(E, parse_xi(W, job), None, job.prec, job.tdeg).to_dict()}, None


def _op_phi_j(W, E, job):
    return {"j": job.n, "value": dfm.frobenius_inverse_phi_j(E, parse_xi(W, job), job.n).to_dict()}, None


def _op_exp_coeffs(W, E, job):
    return {"coeffs": [c.to_dict() for c in core.exp_coeffs(E, job.order).coeffs]}, None


def _op_log_coeffs(W, E, job):
    return {"coeffs": [c.to_dict() for c in core.log_coeffs(E, job.order).coeffs]}, None


def _op_exp(W, E, job):
    return {"value": core.exp_eval(E, parse_xi(W, job), job.order, job.prec * W.e).to_dict()}, None


def _op_log(W, E, job):
    return {"value": core.log_eval(E, parse_xi(W, job), job.order, job.prec * W.e).to_dict()}, None


def _op_radius(W, E, job):
    return core.radius_estimate(E, job.order).to_dict(), None


def _op_anderson(W, E, job):
    res = core.anderson_exp_check(E, parse_xi(W, job), job.order, job.tdeg, job.prec)
    return res.to_dict(), res.passed


def _op_omega(W, E, job):
    omega = deq.omega_series(W, job.tdeg, job.prec)
    return {"omega": omega.to_dict(), "gauss_norm": omega.gauss_norm().to_dict()}, None


def _op_psi(W, E, job):
    Psi = load_psi(W, E, job)
    residual = deq.validate_psi(E, Psi)
    return {"psi": Psi.to_dict(), "residual": residual.to_dict()}, None


def _op_ext_log(W, E, job):
    Psi = load_psi(W, E, job)
    value = ext.ext_log(E, Psi, parse_xi(W, job), policy_of(job), job.prec)
    return value.to_dict(), None


def _op_lattice(W, E, job):
    Psi = load_psi(W, E, job)
    return ext.period_lattice_from_psi(E, Psi, prec=job.prec).to_dict(), None


def _op_kinfty(W, E, job):
    if not E.is_carlitz():
        raise UsageError("kinfty_branch is defined for the Carlitz module")
    steps: list = []
    value = ext.carlitz_kinfty_branch(parse_xi(W, job), max(job.tdeg, 64 if W.q == 2 else job.tdeg), job.prec, steps)
    return {"value": value.to_dict(), "steps": steps}, None


def _op_exp_product(W, E, job):
    Psi = load_psi(W, E, job)
    lattice = ext.period_lattice_from_psi(E, Psi, prec=job.prec)
    value = ext.exp_from_lattice_product(lattice, parse_xi(W, job), job.height, job.prec)
    return {"value": value.to_dict(), "height": job.height}, None


OPERATIONS: dict[str, Callable] = {
    "partitions": _op_partitions,
    "b_series_direct": _op_b_direct,
    "b_series_recursive": _op_b_recursive,
    "deformation_series": _op_deformation,
    "specialize_log": _op_specialize,
    "phi_j": _op_phi_j,
    "exp_coeffs": _op_exp_coeffs,
    "log_coeffs": _op_log_coeffs,
    "exp": _op_exp,
    "log": _op_log,
    "radius": _op_radius,
    "anderson": _op_anderson,
    "omega": _op_omega,
    "psi": _op_psi,
    "ext_log": _op_ext_log,
    "period_lattice": _op_lattice,
    "kinfty_branch": _op_kinfty,
    "exp_product": _op_exp_product,
    "verify_inside_radius": _verification(ext.verify_inside_radius),
    "verify_functional_equation": _verification(ext.verify_functional_equation),
    "verify_inverse_of_exp": _verification(ext.verify_inverse_of_exp),
}


# -- driver -------------------------------------------------------------------


def run(job: JobSpec) -> tuple[dict, int]:
    """Execute one job; returns (report, exit status)."""
    if job.suite is not None:
        if job.suite not in SUITES:
            raise UsageError(f"unknown suite {job.suite!r}; known: {sorted(SUITES)}")
        checks = run_suite(job.suite)
        passed = all(c.passed for c in checks)
        report = {
            "report_version": REPORT_VERSION,
            "suite": job.suite,
            "checks": [c.to_dict() for c in checks],
            "pass": passed,
        }
        return report, EXIT_OK if passed else EXIT_FAIL
    if job.op not in OPERATIONS:
        raise UsageError(f"unknown or missing --op; known: {sorted(OPERATIONS)}")
    W = build_field(job)
    E = build_module(W, job)
    result, passed = OPERATIONS[job.op](W, E, job)
    report: dict[str, Any] = {
        "report_version": REPORT_VERSION,
        "field": W.header(),
        "module": E.to_dict(),
        "op": job.op,
        "params": job.params(),
        "result": result,
    }
    if passed is not None:
        report["pass"] = passed
        return report, EXIT_OK if passed else EXIT_FAIL
    return report, EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="drinlog", description="Drinfeld module logarithms over local fields.")
    ap.add_argument("--job", help="JSON file holding a job description (flags override it)")
    ap.add_argument("--field", help="p,m,s,e (default 2,1,1,1)")
    ap.add_argument("--preset", choices=sorted(FIELD_PRESETS), help="named working field")
    ap.add_argument("--theta", help="theta expansion as exponent:code pairs, e.g. -2:1,-1:1")
    ap.add_argument("--module", help="'carlitz' or r,kappa_1,...,kappa_r")
    ap.add_argument("--power-wrap", action="store_true", default=None, help="replace each kappa by kappa^(q^r)")
    ap.add_argument("--op", choices=sorted(OPERATIONS))
    ap.add_argument("--xi", help="input element, e.g. 'theta^3 + 1/theta'")
    ap.add_argument("--prec", type=int, help="target precision in theta-units (default 50)")
    ap.add_argument("--tdeg", type=int, help="t-degree of truncated series (default 40)")
    ap.add_argument("--order", type=int, help="series order N (default 10)")
    ap.add_argument("--n", type=int, help="index for b_series_* / partitions / phi_j (default 3)")
    ap.add_argument("--height", type=int, help="degree bound of lattice multipliers (default 6)")
    ap.add_argument("--policy", choices=["least", "kinfty"])
    ap.add_argument("--psi", help="JSON file with a trivialization matrix")
    ap.add_argument("--suite", help=f"run a built-in suite: {', '.join(sorted(SUITES))}")
    ap.add_argument("--out", help="write the report here instead of stdout")
    return ap


def job_from_args(args: argparse.Namespace) -> JobSpec:
    data: dict = {}
    if args.job:
        try:
            with open(args.job, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read job file: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("job file must hold a JSON object")
    for key, value in vars(args).items():
        if key != "job" and value is not None:
            data[key] = value
    return JobSpec.from_mapping(data)


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    out = args.out
    try:
        job = job_from_args(args)
        out = job.out
        report, status = run(job)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"drinlog: {exc}\n")
        return EXIT_PARSE
    except DrinlogError as exc:
        _emit({"report_version": REPORT_VERSION, "error": exc.code, "message": str(exc)}, out)
        return EXIT_MATH
    _emit(report, out)
    return status


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
