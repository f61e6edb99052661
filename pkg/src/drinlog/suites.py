"""Built-in verification batteries.

Each check is a function returning a :class:`Check`; the command line groups
them into suites and the acceptance tests run them one by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .deformation import (
    b_series_direct,
    b_series_recursive,
    deformation_series,
    enumerate_P_r_n,
    frobenius_inverse_phi_j,
    r_matrix,
    specialize_log,
)
from .difference_eq import (
    BranchPolicy,
    L0_series,
    omega_recursion_residuals,
    omega_series,
    psi_rank1,
    wp,
    wp_inverse,
)
from .drinfeld_core import DrinfeldModule, anderson_exp_check, exp_coeffs, log_coeffs
from .extended_log import (
    carlitz_kinfty_branch,
    exp_from_lattice_product,
    period_lattice_from_psi,
    verify_functional_equation,
    verify_inside_radius,
    verify_inverse_of_exp,
)
from .local_field import Norm, WElem, WorkingField
from .tate_series import RationalTate, TateElem, gauss_norm

SEED = 20240607


@dataclass
class Check:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "details": self.details}


# -- shared fixtures ----------------------------------------------------------


def _q2() -> WorkingField:
    return WorkingField.preset("q2")


def rank2_q2(W: WorkingField) -> DrinfeldModule:
    """phi_t = theta + (1 + 1/theta)^4 tau + theta^4 tau^2 over q = 2."""
    return DrinfeldModule(W, [W.parse("(1 + theta^-1)^4"), W.theta**4])


def rank2_q2_alt(W: WorkingField) -> DrinfeldModule:
    return DrinfeldModule(W, [W.theta**4, W.parse("(1 + theta^-1)^4")])


def rank3_q2(W: WorkingField) -> DrinfeldModule:
    return DrinfeldModule(W, [W.theta**8, W.parse("(1 + theta^-1)^8"), W.parse("theta^-8")])


def twist_module(W: WorkingField) -> DrinfeldModule:
    """Carlitz twisted by gamma = 1 + theta^-q: kappa = gamma^(q-1)."""
    gamma = W.one() + W.theta.twist(1).inverse()
    return DrinfeldModule(W, [gamma ** (W.q - 1)])


def random_kinf(W: WorkingField, rng: np.random.Generator, top: int, low: int) -> WElem:
    """sum_{j=low}^{top} c_j theta^j with random F_q digits and a nonzero top digit."""
    fq = sorted(W.F.fq_codes)
    nonzero = [c for c in fq if c]
    acc = W.theta_power(top).scale(int(rng.choice(nonzero)))
    for j in range(low, top):
        c = int(rng.choice(fq))
        if c:
            acc = acc + W.theta_power(j).scale(c)
    return acc


def _norm(x) -> dict:
    return (x if isinstance(x, Norm) else Norm.of(x)).to_dict()


def _zero_at(x: WElem, digits: int) -> bool:
    """Apparent zero known to at least ``digits`` u-digits."""
    return x.is_zero() and (x.prec is None or x.prec >= digits)


# -- the fifteen checks ---------------------------------------------------------


def check_partition_counts() -> Check:
    p2 = [len(enumerate_P_r_n(2, n)) for n in range(6)]
    p3 = [len(enumerate_P_r_n(3, n)) for n in range(11)]
    c = [1, 1, 2]
    while len(c) < 11:
        c.append(c[-1] + c[-2] + c[-3])
    ok = p2 == [1, 1, 2, 3, 5, 8] and p3 == c
    return Check("shadowed partition counts", ok, {"P2": p2, "P3": p3, "recurrence": c})


def check_b_series_forms() -> Check:
    W = _q2()
    rows = []
    for E in (DrinfeldModule.carlitz(W), rank2_q2(W), rank3_q2(W)):
        for n in range(8):
            same = b_series_direct(E, n).normalized().equals(b_series_recursive(E, n).normalized())
            rows.append({"r": E.r, "n": n, "equal": same})
    return Check("direct vs recursive B_n", all(x["equal"] for x in rows), {"cases": rows})


def check_frame_first_column() -> Check:
    W = _q2()
    rows = []
    for E in (DrinfeldModule.carlitz(W), rank2_q2(W), rank3_q2(W)):
        for m in range(7):
            R = r_matrix(E, m)
            ok = True
            for i in range(E.r):
                k = m - i
                target = b_series_direct(E, k) if k >= 0 else RationalTate.zero(W)
                ok = ok and R.entry(i, 0).equals(target)
            rows.append({"r": E.r, "m": m, "equal": ok})
    return Check("first column of R_m", all(x["equal"] for x in rows), {"cases": rows})


def check_b_at_theta() -> Check:
    W = WorkingField.preset("q2", default_prec=400)
    rows = []
    for E in (DrinfeldModule.carlitz(W), rank2_q2(W)):
        Q = log_coeffs(E, 8, rel_prec=300).coeffs
        for n in range(9):
            value = b_series_direct(E, n).eval_at_theta(300)
            diff = value - Q[n]
            tracked = (diff.prec - Q[n].v) if diff.prec is not None else None
            ok = diff.is_zero() and (tracked is None or tracked >= 150)
            rows.append({"r": E.r, "n": n, "zero": diff.is_zero(), "tracked_digits": tracked, "ok": ok})
    return Check("B_n(theta) = Q_n", all(x["ok"] for x in rows), {"cases": rows})


def check_carlitz_closed_forms() -> Check:
    details: dict = {}
    W = _q2()
    C = DrinfeldModule.carlitz(W)
    forms = []
    for n in range(1, 7):
        den = list(range(1, n + 1))
        forms.append(b_series_direct(C, n).equals(RationalTate(W, [W.one()], den)))
    details["closed_forms"] = forms
    ok = all(forms)
    for name in ("q2", "q3"):
        Wf = WorkingField.preset(name)
        q = Wf.q
        omega = omega_series(Wf, 30, 60)
        norm = gauss_norm(omega)
        norm_ok = norm.log_q == Fraction(-q, q - 1)
        residuals = omega_recursion_residuals(omega)
        rec_ok = all(x.is_zero() for x in residuals[:31])
        # Omega^(-1) - (t - theta) Omega, coefficientwise through degree 30
        tm = TateElem(Wf, [-Wf.theta, Wf.one()])
        diff = omega.twist(-1) - tm * omega
        frob_ok = all(c.is_zero() for c in diff.coeffs[:31])
        details[name] = {"norm": norm.to_dict(), "norm_ok": norm_ok, "recursion_ok": rec_ok, "frobenius_ok": frob_ok}
        ok = ok and norm_ok and rec_ok and frob_ok
    return Check("Carlitz closed forms and Omega", ok, details)


def check_exp_log_inverse() -> Check:
    W = _q2()
    rows = []
    for E in (DrinfeldModule.carlitz(W), rank2_q2(W), rank2_q2_alt(W)):
        ex, lg = exp_coeffs(E, 6), log_coeffs(E, 6)
        for label, comp in (("exp.log", ex.compose(lg)), ("log.exp", lg.compose(ex))):
            c = comp.coeffs
            ok = (c[0] - W.one()).is_zero() and all(x.is_zero() for x in c[1:]) and len(c) == 7
            rows.append({"r": E.r, "composition": label, "identity": ok})
    return Check("exp/log inversion", all(x["identity"] for x in rows), {"cases": rows})


def check_wp_machinery(samples: int = 50) -> Check:
    W = WorkingField.preset("q2-wide")
    rng = np.random.default_rng(SEED)
    prec = 20
    D = 6

    def elem(lo, hi):
        return W.from_terms({k: int(rng.integers(0, W.F.size)) for k in range(lo, hi)})

    round_trip = True
    for _ in range(samples):
        # h = wp(g) + small keeps every residue equation solvable in W
        g = TateElem(W, [elem(-6, 6) for _ in range(D + 1)])
        h = wp(g) + TateElem(W, [elem(1, 10) for _ in range(D + 1)])
        f = wp_inverse(h, BranchPolicy.least(), prec, theta_aware=False)
        round_trip = round_trip and all(c.is_zero() for c in (wp(f) - h).coeffs)
    # two branches: least versus the scaled k_infinity policy
    g = TateElem(W, [elem(-6, 6) for _ in range(D + 1)])
    h = wp(g)
    f1 = wp_inverse(h, BranchPolicy.least(), prec, theta_aware=False)
    f2 = wp_inverse(h, BranchPolicy.kinfty(W.theta.inverse()), prec, theta_aware=False)
    diff = f1 - f2
    branch_ok = True
    consts = []
    for c in diff.coeffs:
        if c.is_zero():
            consts.append(0)
            continue
        lead = c.lead()
        const_ok = c.v == 0 and W.F.in_fq(lead) and (c - W.const(lead)).is_zero()
        branch_ok = branch_ok and const_ok
        consts.append(lead)
    # small h: wp^-1 agrees with the contracting series
    small = TateElem(W, [elem(1, 12) for _ in range(D + 1)])
    gap = gauss_norm(L0_series(small, prec) - wp_inverse(small, BranchPolicy.least(), prec, theta_aware=False))
    l0_ok = gap.at_most_exponent(-prec)
    return Check(
        "wp machinery",
        round_trip and branch_ok and l0_ok,
        {"round_trip": round_trip, "branch_difference": consts, "branch_ok": branch_ok, "L0_gap": gap.to_dict()},
    )


def check_anderson() -> Check:
    rows = []
    W3 = WorkingField.preset("q3")
    res = anderson_exp_check(DrinfeldModule.carlitz(W3), W3.theta.inverse(), N=10, D=40, prec=50)
    rows.append({"module": "carlitz q=3", "residual": res.residual.to_dict(), "pass": res.passed})
    # kappa entries are 9th powers; with |kappa_2| > 1 the t-tail does not settle by degree 40
    E = DrinfeldModule(W3, [W3.parse("(1 + theta^-1)^9"), W3.parse("theta^-9")])
    res = anderson_exp_check(E, W3.theta**-1, N=10, D=40, prec=50)
    rows.append({"module": "rank 2 q=3", "residual": res.residual.to_dict(), "pass": res.passed})
    return Check("Anderson exponentiation", all(x["pass"] for x in rows), {"cases": rows})


def check_period_recovery() -> Check:
    rows = []
    for name, D in (("q2", 64), ("q3", 40)):
        W = WorkingField.preset(name)
        C = DrinfeldModule.carlitz(W)
        Psi = psi_rank1(C, D, 70)
        lattice = period_lattice_from_psi(C, Psi, prec=50)
        pi = lattice.generators[0]
        q = W.q
        val_ok = Norm.of(pi).log_q == Fraction(q, q - 1)
        img = exp_coeffs(C, 12).evaluate(pi, 56 * W.e)
        exp_ok = Norm.of(img).at_most_exponent(-50)
        rows.append({"field": name, "D": D, "norm": _norm(pi), "exp_norm": _norm(img), "pass": val_ok and exp_ok})
    return Check("Carlitz period", all(x["pass"] for x in rows), {"cases": rows})


def _lattice_check_ok(report, prec: int = 50) -> bool:
    w = report.witnesses
    return report.passed and "residual" in w and _residual_ok(w, prec)


def _residual_ok(witness: dict, prec: int) -> bool:
    log_q = witness["residual"]["log_q"]
    return log_q is None or Fraction(log_q) <= -prec


def check_inside_radius(samples: int = 10) -> Check:
    W = _q2()
    rng = np.random.default_rng(SEED + 1)
    rows = []
    for label, E in (("carlitz", DrinfeldModule.carlitz(W)), ("twist", twist_module(W))):
        Psi = psi_rank1(E, 64, 70)
        lattice = period_lattice_from_psi(E, Psi, prec=50)
        for _ in range(samples // 2):
            # |xi| <= 1, a factor q inside the radius q^(q/(q-1)) = q^2
            xi = random_kinf(W, rng, 0, -12)
            rep = verify_inside_radius(E, Psi, xi, prec=50, lattice=lattice)
            rows.append(
                {"module": label, "xi": str(xi), "pass": _lattice_check_ok(rep), "witness": rep.witnesses.get("witness")}
            )
    return Check("extended log inside the radius", all(x["pass"] for x in rows), {"cases": rows})


def _carlitz_setups():
    for name, D in (("q2-wide", 64), ("q3-wide", 40)):
        W = WorkingField.preset(name)
        C = DrinfeldModule.carlitz(W)
        Psi = psi_rank1(C, D, 70)
        yield name, W, C, Psi, period_lattice_from_psi(C, Psi, prec=50)


def check_functional_equation() -> Check:
    rng = np.random.default_rng(SEED + 2)
    rows = []
    for name, W, C, Psi, lattice in _carlitz_setups():
        xis = [W.theta**3, W.theta**3 + W.theta.inverse(), random_kinf(W, rng, 3, -8)]
        for xi in xis:
            rep = verify_functional_equation(C, Psi, xi, prec=50, lattice=lattice)
            rows.append({"field": name, "xi": str(xi), "pass": _lattice_check_ok(rep), "witness": rep.witnesses.get("witness")})
    return Check("functional equation", all(x["pass"] for x in rows), {"cases": rows})


def check_inverse_of_exp(samples: int = 5) -> Check:
    rng = np.random.default_rng(SEED + 3)
    name, W, C, Psi, lattice = next(_carlitz_setups())
    rows = []
    rep = verify_inverse_of_exp(C, Psi, W.theta**3, prec=50, lattice=lattice)
    rt = rep.residuals["exp_round_trip"]["log_q"]
    rows.append({"xi": "theta^3", "round_trip": rep.residuals["exp_round_trip"], "pass": rt is None or Fraction(rt) <= -50})
    for _ in range(samples):
        xi = random_kinf(W, rng, 1, -8)
        rep = verify_inverse_of_exp(C, Psi, xi, prec=50, lattice=lattice)
        rows.append({"xi": str(xi), "pass": _lattice_check_ok(rep), "witness": rep.witnesses.get("witness")})
    return Check("inverse of exp", all(x["pass"] for x in rows), {"field": name, "cases": rows})


def check_kinfty_branch() -> Check:
    W = _q2()
    C = DrinfeldModule.carlitz(W)
    rng = np.random.default_rng(SEED + 4)
    omega = omega_series(W, 64, 60)
    alphas = [W.theta + W.one(), W.theta.inverse()] + [random_kinf(W, rng, 1, -10) for _ in range(3)]
    rows = []
    for alpha in alphas:
        steps: list = []
        value = carlitz_kinfty_branch(alpha, 64, 50, trace=steps, omega=omega)
        direct = log_coeffs(C, 9).evaluate(alpha, 60 * W.e)
        ok = _zero_at(value - direct, 50 * W.e)
        edges = all(s["length"] == 1 and s["integral"] for s in steps)
        rows.append({"alpha": str(alpha), "equal": ok, "length_one_edges": edges, "steps": len(steps)})
    return Check("k_infinity branch", all(x["equal"] and x["length_one_edges"] for x in rows), {"cases": rows})


def check_phi_j() -> Check:
    W = _q2()
    rows = []
    for E, xi in ((DrinfeldModule.carlitz(W), W.theta.inverse() + W.one()), (rank2_q2(W), W.theta**-2)):
        Q = log_coeffs(E, 5).coeffs
        for j in range(6):
            diff = frobenius_inverse_phi_j(E, xi, j) - Q[j] * xi.twist(j)
            rows.append({"r": E.r, "j": j, "zero": diff.is_zero()})
    return Check("phi_j = Q_j xi^(q^j)", all(x["zero"] for x in rows), {"cases": rows})


def check_lattice_product() -> Check:
    W = WorkingField.preset("q2")
    C = DrinfeldModule.carlitz(W)
    Psi = psi_rank1(C, 64, 70)
    lattice = period_lattice_from_psi(C, Psi, prec=50)
    rows = []
    for z in (W.theta.inverse(), W.one(), W.one() + W.theta**-3):
        prod = exp_from_lattice_product(lattice, z, 6, 20)
        series = exp_coeffs(C, 12).evaluate(z, 40 * W.e)
        gap = Norm.of(prod - series)
        rows.append({"z": str(z), "gap": gap.to_dict(), "pass": gap.at_most_exponent(-20)})
    return Check("lattice product exponential", all(x["pass"] for x in rows), {"cases": rows})


CRITERIA: dict[int, Callable[[], Check]] = {
    1: check_partition_counts,
    2: check_b_series_forms,
    3: check_frame_first_column,
    4: check_b_at_theta,
    5: check_carlitz_closed_forms,
    6: check_exp_log_inverse,
    7: check_wp_machinery,
    8: check_anderson,
    9: check_period_recovery,
    10: check_inside_radius,
    11: check_functional_equation,
    12: check_inverse_of_exp,
    13: check_kinfty_branch,
    14: check_phi_j,
    15: check_lattice_product,
}


def check_rank2_smallxi() -> Check:
    """Rank-2 deformation pipeline at a small xi: series forms agree and match log_E."""
    W = _q2()
    E = rank2_q2(W)
    xi = W.theta**-2
    direct = deformation_series(E, xi, None, 40, "direct", prec=40)
    matrix = deformation_series(E, xi, None, 40, "matrix", prec=40)
    agree = all(c.is_zero() for c in (direct - matrix).coeffs)
    value = specialize_log(E, xi, None, 40, 40)
    ref = log_coeffs(E, 10).evaluate(xi, 45 * W.e)
    match = _zero_at(value - ref, 40 * W.e)
    return Check("rank-2 small xi", agree and match, {"series_agree": agree, "log_match": match})


SUITES: dict[str, list[Callable[[], Check]]] = {
    "identities": [CRITERIA[k] for k in (1, 2, 3, 4, 5, 6, 7, 14)],
    "carlitz_e2e": [CRITERIA[k] for k in (8, 9, 10, 11, 12, 13, 15)],
    "rank2_smallxi": [check_rank2_smallxi, CRITERIA[6], CRITERIA[8], CRITERIA[14]],
}


def run_suite(name: str) -> list[Check]:
    try:
        checks = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; known: {sorted(SUITES)}") from None
    return [fn() for fn in checks]
