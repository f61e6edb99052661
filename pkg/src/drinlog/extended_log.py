"""The extended (analytically continued) logarithm, period lattices and the
verification routines built on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .base_arith import CoeffPoly
from .deformation import specialize_log
from .difference_eq import BranchPolicy, omega_series, wp_inverse
from .drinfeld_core import DrinfeldModule, apply_skew, exp_coeffs
from .errors import DimensionError, PrecisionError, StallError, UnexpectedEdgeError
from .local_field import Norm, WElem, WorkingField
from .tate_series import DEFAULT_DEGREE, TateElem, TateMat, eval_at_theta, mat_inverse

PRODUCT_CANDIDATE_CAP = 4096


@dataclass
class LatticeBasis:
    W: WorkingField
    generators: list[WElem]
    prec: int  # certified theta-units

    @property
    def r(self) -> int:
        return len(self.generators)

    def to_dict(self) -> dict:
        return {"rank": self.r, "prec": self.prec, "generators": [g.to_dict() for g in self.generators]}


@dataclass
class CosetValue:
    representative: WElem
    lattice: LatticeBasis | None
    branch: dict

    def to_dict(self) -> dict:
        return {"representative": self.representative.to_dict(), "branch": self.branch}


@dataclass
class Membership:
    member: bool
    witness: list[CoeffPoly] | None
    residual: Norm

    def __bool__(self) -> bool:
        return self.member

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "witness": [str(w) for w in self.witness] if self.witness is not None else None,
            "residual": self.residual.to_dict(),
        }


@dataclass
class Report:
    claim: str
    inputs: dict
    passed: bool
    residuals: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "inputs": self.inputs,
            "residuals": self.residuals,
            "witnesses": self.witnesses,
            "pass": self.passed,
        }


# ---------------------------------------------------------------------------


class _PsiData:
    """Psi with its inverse, computed once per trivialization."""

    def __init__(self, E: DrinfeldModule, Psi: TateMat):
        if Psi.rows != E.r or Psi.cols != E.r:
            raise DimensionError("Psi must be r x r")
        self.E = E
        self.Psi = Psi
        self.inverse = mat_inverse(Psi)


_PSI_CACHE: dict[int, _PsiData] = {}


def _psi_data(E: DrinfeldModule, Psi: TateMat) -> _PsiData:
    key = id(Psi)
    data = _PSI_CACHE.get(key)
    if data is None or data.Psi is not Psi:
        data = _PsiData(E, Psi)
        _PSI_CACHE.clear()
        _PSI_CACHE[key] = data
    return data


def ext_LE(
    E: DrinfeldModule, Psi: TateMat, Z: TateElem, policy: BranchPolicy | None = None, prec: int = 50
) -> TateElem:
    """A representative of wp^-1(Z e_1 Psi) Psi^-1 e_1^tr."""
    data = _psi_data(E, Psi)
    W = E.W
    row = [(Z * x).theta_truncate((prec + 8) * W.e) for x in Psi.entries[0]]
    f = wp_inverse(TateMat(W, [row]), policy, prec + 8)
    acc = None
    for j in range(E.r):
        term = (f.entries[0][j] * data.inverse.entries[j][0]).theta_truncate((prec + 8) * W.e)
        acc = term if acc is None else acc + term
    return acc


def ext_log(
    E: DrinfeldModule,
    Psi: TateMat,
    xi: WElem,
    policy: BranchPolicy | None = None,
    prec: int = 50,
    lattice: LatticeBasis | None = None,
) -> CosetValue:
    policy = policy or BranchPolicy.least()
    D = Psi.D
    Z = TateElem.constant(xi, D)
    series = ext_LE(E, Psi, Z, policy, prec)
    value = eval_at_theta(series)
    return CosetValue(value, lattice, policy.to_dict())


# ---------------------------------------------------------------------------


def _poly_theta(W: WorkingField, digits: dict[int, int]) -> WElem:
    acc = W.zero()
    for j, c in digits.items():
        acc = acc + W.theta_power(j).scale(c)
    return acc


def _coeff_poly(W: WorkingField, digits: dict[int, int]) -> CoeffPoly:
    deg = max(digits) if digits else -1
    return CoeffPoly(W.F, tuple(digits.get(j, 0) for j in range(deg + 1)), "theta")


def lattice_membership(w: WElem, lattice: LatticeBasis, prec: int = 50) -> Membership:
    """Is w in the F_q[theta]-span of the generators, up to q^-prec?"""
    W = w.W
    F = W.F
    target = prec * W.e
    if w.is_zero() and (w.prec is None or w.prec >= target):
        bound = Norm.of(w)
        return Membership(True, [CoeffPoly(F, (), "theta") for _ in lattice.generators], bound)
    if lattice.r == 1:
        lam = lattice.generators[0]
        rel = max(target - w.v, 1) + 2 * W.e
        ratio = w * lam.inverse(rel)
        digits, rem, ok = W.theta_digits(ratio, 1)
        if not ok or any(j < 0 or not F.in_fq(c) for j, c in digits.items()):
            return Membership(False, None, Norm.of(rem))
        residual = w - _poly_theta(W, digits) * lam
        res_norm = Norm.of(residual)
        if not residual.is_zero():
            return Membership(residual.v >= target, [_coeff_poly(W, digits)], res_norm)
        if residual.prec is not None and residual.prec < target:
            raise StallError(f"membership inconclusive: residual only known modulo u^{residual.prec}")
        return Membership(True, [_coeff_poly(W, digits)], res_norm)
    return _membership_greedy(w, lattice, target)


def _membership_greedy(w: WElem, lattice: LatticeBasis, target: int) -> Membership:
    W = w.W
    F = W.F
    digits: list[dict[int, int]] = [{} for _ in lattice.generators]
    rem = w
    for _ in range(64 * (target + 1)):
        if rem.is_zero() or rem.v >= target:
            break
        best = None
        for k, lam in enumerate(lattice.generators):
            j, rest = divmod(lam.v - rem.v, W.e)
            if rest or j < 0:
                continue
            ratio_lead = F.div(rem.lead(), F.mul(lam.lead(), F.pow(int(W.theta.c[0]), j)))
            if not F.in_fq(ratio_lead):
                continue
            cand = rem - W.theta_power(j) * lam.scale(ratio_lead)
            gain = cand.v if not cand.is_zero() else (cand.prec if cand.prec is not None else 10**9)
            if best is None or gain > best[0]:
                best = (gain, k, j, ratio_lead, cand)
        if best is None or best[0] <= rem.v:
            return Membership(False, None, Norm.of(rem))
        _, k, j, c, rem = best
        digits[k][j] = F.add(digits[k].get(j, 0), c)
    if rem.is_zero() and rem.prec is not None and rem.prec < target:
        raise StallError("greedy reduction ran out of precision")
    if not rem.is_zero() and rem.v < target:
        raise StallError("greedy reduction did not reach the target")
    return Membership(True, [_coeff_poly(W, d) for d in digits], Norm.of(rem))


def period_lattice_from_psi(
    E: DrinfeldModule, Psi: TateMat, d: int | None = None, prec: int = 50
) -> LatticeBasis:
    """Values of the first entry of a Psi^-1 at t = theta for a in F_q[t]^r of
    degree <= d, reduced greedily to r generators."""
    W = E.W
    r = E.r
    if d is None:
        d = r + 2
    data = _psi_data(E, Psi)
    base = [eval_at_theta(data.inverse.entries[j][0]) for j in range(r)]
    fq = sorted(int(x) for x in W.F.fq_codes)
    # a(theta) e_j Psi^-1 e_1^tr evaluates to a(theta) * base[j]
    while W.q ** (r * (d + 1)) > PRODUCT_CANDIDATE_CAP and d > 0:
        d -= 1
    values = []
    for combo in itertools.product(fq, repeat=r * (d + 1)):
        if not any(combo):
            continue
        val = W.zero()
        for j in range(r):
            digits = {k: combo[j * (d + 1) + k] for k in range(d + 1) if combo[j * (d + 1) + k]}
            if digits:
                val = val + _poly_theta(W, digits) * base[j]
        if val.is_zero():
            continue
        values.append(val)
    values.sort(key=lambda x: -x.v)
    chosen: list[WElem] = []
    for val in values:
        if len(chosen) == r:
            break
        if chosen:
            try:
                if lattice_membership(val, LatticeBasis(W, chosen, prec), prec).member:
                    continue
            except StallError:
                pass
        chosen.append(val)
    if len(chosen) < r:
        raise PrecisionError("period lattice is rank-deficient at this precision")
    certified = min((x.prec - x.v) // W.e for x in chosen if x.prec is not None) if any(
        x.prec is not None for x in chosen
    ) else prec
    return LatticeBasis(W, chosen, certified)


# ---------------------------------------------------------------------------


def _membership_report(claim, inputs, diff: WElem, lattice: LatticeBasis, prec: int, extra=None) -> Report:
    try:
        mem = lattice_membership(diff, lattice, prec)
        passed = mem.member
        witnesses = mem.to_dict()
    except StallError as exc:
        passed = False
        witnesses = {"stall": str(exc)}
    residuals = {"difference": Norm.of(diff).to_dict()}
    if extra:
        residuals.update(extra)
    return Report(claim, inputs, passed, residuals, witnesses)


def verify_inside_radius(
    E: DrinfeldModule,
    Psi: TateMat,
    xi: WElem,
    prec: int = 50,
    lattice: LatticeBasis | None = None,
    policy: BranchPolicy | None = None,
    N: int | None = None,
) -> Report:
    """ext_log(xi) - log_E(xi) lies in the period lattice."""
    lattice = lattice or period_lattice_from_psi(E, Psi, prec=prec)
    value = ext_log(E, Psi, xi, policy, prec).representative
    direct = specialize_log(E, xi, N, prec, D=Psi.D)
    return _membership_report(
        "ext_log(xi) = log_E(xi) mod lattice", {"xi": xi.to_dict()}, value - direct, lattice, prec
    )


def verify_functional_equation(
    E: DrinfeldModule,
    Psi: TateMat,
    xi: WElem,
    prec: int = 50,
    lattice: LatticeBasis | None = None,
    policy: BranchPolicy | None = None,
) -> Report:
    """ext_log(phi_t(xi)) - theta * ext_log(xi) lies in the period lattice."""
    lattice = lattice or period_lattice_from_psi(E, Psi, prec=prec)
    image = apply_skew(E.phi_t(), xi)
    left = ext_log(E, Psi, image, policy, prec).representative
    right = ext_log(E, Psi, xi, policy, prec).representative
    return _membership_report(
        "ext_log(phi_t(xi)) = theta ext_log(xi) mod lattice",
        {"xi": xi.to_dict()},
        left - E.W.theta * right,
        lattice,
        prec,
    )


def verify_inverse_of_exp(
    E: DrinfeldModule,
    Psi: TateMat,
    xi: WElem,
    prec: int = 50,
    lattice: LatticeBasis | None = None,
    policy: BranchPolicy | None = None,
    N: int = 12,
) -> Report:
    """exp_E(ext_log(xi)) = xi and ext_log(exp_E(xi)) = xi mod lattice."""
    W = E.W
    lattice = lattice or period_lattice_from_psi(E, Psi, prec=prec)
    expser = exp_coeffs(E, N)
    value = ext_log(E, Psi, xi, policy, prec).representative
    back = expser.evaluate(value, (prec + 2) * W.e)
    res_a = Norm.of(back - xi)
    ok_a = res_a.at_most_exponent(-prec)
    img = expser.evaluate(xi, (prec + 8) * W.e)
    value_b = ext_log(E, Psi, img, policy, prec).representative
    rep = _membership_report(
        "exp_E(ext_log(xi)) = xi and ext_log(exp_E(xi)) = xi mod lattice",
        {"xi": xi.to_dict(), "N": N},
        value_b - xi,
        lattice,
        prec,
        {"exp_round_trip": res_a.to_dict()},
    )
    rep.passed = rep.passed and ok_a
    return rep


# ---------------------------------------------------------------------------


def carlitz_kinfty_branch(
    alpha: WElem, D: int = DEFAULT_DEGREE, prec: int = 50, trace: list | None = None, omega: TateElem | None = None
) -> WElem:
    """(f / Omega)(theta) for the k_infinity-rational solution f of f - f^(1) = alpha Omega."""
    W = alpha.W
    P = (prec + 8) * W.e
    if omega is None:
        omega = omega_series(W, D, prec + 8 + W.q)
    if alpha.is_zero() and alpha.prec is None:
        return W.zero()
    a0 = omega.coeffs[0]
    h = (omega * alpha).theta_truncate(P)
    policy = BranchPolicy.kinfty(a0)
    steps: list = []
    f = wp_inverse(h, policy, prec + 8, trace=steps)
    if trace is not None:
        trace.extend(steps)
    # inside the Carlitz radius every step must be a length-one integral edge
    if alpha.v * (W.q - 1) > -W.e * W.q:
        bad = [st for st in steps if st["length"] != 1 or not st["integral"]]
        if bad:
            raise UnexpectedEdgeError(f"{len(bad)} steps left the length-one edge: {bad[0]}")
    inv = mat_inverse(TateMat(W, [[omega]])).entries[0][0]
    return eval_at_theta((f * inv).theta_truncate(P))


def exp_from_lattice_product(lattice: LatticeBasis, z: WElem, H: int = 6, prec: int = 20) -> WElem:
    """z * prod (1 - z / (a lambda)) over nonzero a in F_q[theta] of degree <= H."""
    if lattice.r != 1:
        raise DimensionError("the lattice product is implemented for rank one")
    W = z.W
    lam = lattice.generators[0]
    if z.is_zero():
        return z
    rel = (prec + 8) * W.e + abs(z.v)
    fq = sorted(int(x) for x in W.F.fq_codes)
    acc = z
    for combo in itertools.product(fq, repeat=H + 1):
        if not any(combo):
            continue
        digits = {k: c for k, c in enumerate(combo) if c}
        period = _poly_theta(W, digits) * lam
        acc = acc * (W.one() - z * period.inverse(rel))
        acc = acc.truncate(acc.v + rel)
    return acc
