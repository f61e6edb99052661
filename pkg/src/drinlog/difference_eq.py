"""The difference operator Z -> Z - Z^(1), its inverse via Artin-Schreier
equations solved coefficientwise with Newton polygons, and the Anderson-Thakur
series Omega with the rank-one trivialization built from it."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .base_arith import residue_artin_schreier
from .drinfeld_core import DrinfeldModule, phi_E_matrix
from .errors import (
    DimensionError,
    NoIntegralSlopeError,
    NormNotContractingError,
    PrecisionError,
    ResidueUnsolvableError,
    StallError,
)
from .local_field import Norm, WElem, WorkingField, _min_prec, root_q_minus_1
from .tate_series import DEFAULT_DEGREE, TateElem, TateMat, gauss_norm, mat_mul


@dataclass(frozen=True)
class BranchPolicy:
    """How Artin-Schreier roots are chosen.

    ``least``: at every step take the residue solution with the smallest code.
    ``kinfty``: solve for f/scale instead of f and prefer residue solutions in
    F_q; with scale = a_0 this reproduces the k_infinity-rational choice for
    the Carlitz module.
    """

    mode: str = "least"
    scale: WElem | None = None

    def __post_init__(self):
        if self.mode not in ("least", "kinfty"):
            raise ValueError(f"unknown branch policy {self.mode!r}")

    @classmethod
    def least(cls) -> "BranchPolicy":
        return cls("least")

    @classmethod
    def kinfty(cls, scale: WElem | None = None) -> "BranchPolicy":
        return cls("kinfty", scale)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "scaled": self.scale is not None}


# ---------------------------------------------------------------------------


def _as_row(Z) -> tuple[TateMat, bool]:
    if isinstance(Z, TateElem):
        return TateMat(Z.W, [[Z]]), True
    if isinstance(Z, TateMat):
        if Z.rows != 1:
            raise DimensionError("expected a row vector")
        return Z, False
    row = list(Z)
    return TateMat(row[0].W, [row]), False


def _unwrap(M: TateMat, scalar: bool):
    return M.entries[0][0] if scalar else M


def wp(Z: TateElem, cap: int | None = None) -> TateElem:
    """Z - Z^(1)."""
    return Z - Z.twist(1, cap)


def wp_r(Zvec, cap: int | None = None):
    M, scalar = _as_row(Zvec)
    out = TateMat(M.W, [[wp(z, cap) for z in M.entries[0]]])
    return _unwrap(out, scalar)


def L0_series(Zvec, prec: int = 50):
    """sum_{i>=0} Z^(i) for Gauss norm ||Z|| < 1, summed until the twists fall
    below q^(-prec)."""
    M, scalar = _as_row(Zvec)
    W = M.W
    for z in M.entries[0]:
        n = gauss_norm(z, "1")
        if n.log_q is not None and not n.bound and n.log_q >= 0:
            raise NormNotContractingError(f"Gauss norm {n} is not below 1")
    P = prec * W.e
    out = []
    for z in M.entries[0]:
        acc = z.truncate_prec(P)
        cur = z
        for i in range(1, 64):
            cur = z.twist(i, P)
            if cur.is_zero():
                break
            acc = acc + cur
        out.append(acc)
    return _unwrap(TateMat(W, [out]), scalar)


# ---------------------------------------------------------------------------


@dataclass
class NewtonPolygonData:
    points: list[tuple[int, int]]
    edges: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"points": [list(p) for p in self.points], "edges": self.edges}


def newton_polygon(coeffs: Sequence[WElem | None]) -> NewtonPolygonData:
    """Lower convex hull of (i, u-valuation of coefficient i)."""
    pts = [(i, c.v) for i, c in enumerate(coeffs) if c is not None and not c.is_zero()]
    if not pts:
        raise PrecisionError("Newton polygon of the zero polynomial")
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> p
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    edges = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        edges.append(
            {"from": x1, "to": x2, "slope": str(slope), "length": x2 - x1, "integral": slope.denominator == 1}
        )
    return NewtonPolygonData(pts, edges)


def _residue_roots(F, a: int, c: int) -> list[int]:
    """All b in F_(q^s) with b^q + a b = c, ascending by code."""
    allb = np.arange(F.size, dtype=np.int64)
    vals = F.add_tab[F.frob_q[allb], F.mul_tab[a, allb]]
    return [int(b) for b in np.flatnonzero(vals == c)]


def solve_artin_schreier(
    a: WElem,
    c: WElem,
    policy: BranchPolicy | None = None,
    prec: int = 50,
    root_prec: int | None = None,
    trace: list | None = None,
) -> WElem:
    """A root of Y^q + a Y = c by repeated leading-term extraction.

    ``prec`` (theta-units) is the residual target |Y^q + aY - c| <= q^-prec;
    ``root_prec`` optionally asks for the root itself modulo u^root_prec.  Each
    step reads the Newton polygon of Y^q + aY - c': a length-one edge from
    (0, v(c')) to (1, v(a)) gives the root's next digit linearly, otherwise
    the edge (0, v(c')) -> (q, 0) needs an integral slope and a residue
    Artin-Schreier solve.  ``trace`` collects one record per step.
    """
    policy = policy or BranchPolicy.least()
    W = a.W
    F = W.F
    q = W.q
    if a.is_zero():
        raise PrecisionError("Artin-Schreier coefficient a is an apparent zero")
    va = a.v
    lead_a = a.lead()
    stop = prec * W.e
    if root_prec is not None:
        stop = max(stop, root_prec + va, root_prec * q)
    Y = W.zero()
    rem = c
    cap = 4 * max(stop, 1) + 4 * abs(va) + 64
    steps = 0
    while not rem.is_zero() and rem.v < stop:
        steps += 1
        if steps > cap:
            raise StallError("Newton-polygon iteration did not terminate")
        vc = rem.v
        # is (1, v(a)) strictly below the segment (0, vc) -> (q, 0)?
        linear = q * va < vc * (q - 1)
        if linear:
            w = vc - va
            b = F.div(rem.lead(), lead_a)
            kind = {"edge": "linear", "slope": -w, "length": 1, "integral": True}
        else:
            if vc % q:
                raise NoIntegralSlopeError(
                    f"edge from (0,{vc}) to ({q},0) has slope {Fraction(-vc, q)}; enlarge the ramification index e"
                )
            w = vc // q
            res_a = lead_a if va + w == vc else 0
            if policy.mode == "kinfty":
                roots = _residue_roots(F, res_a, rem.lead())
                in_fq = [x for x in roots if F.in_fq(x)]
                b = (in_fq or roots or [None])[0]
            else:
                b = residue_artin_schreier(F, res_a, rem.lead())
            if b is None:
                raise ResidueUnsolvableError(
                    f"y^q + {res_a} y = {rem.lead()} has no root in F_(q^s); enlarge s"
                )
            kind = {"edge": "full", "slope": str(Fraction(-vc, q)), "length": q, "integral": True}
        if trace is not None:
            kind["points"] = [(0, vc), (1, va), (q, 0)]
            trace.append(kind)
        y = W.from_terms({w: b})
        Y = Y + y
        rem = rem - (y.twist(1) + a * y)
    # precision of the root from the size of the last residual
    eps = rem.prec if rem.is_zero() else rem.v
    if eps is None:
        return Y
    if q * va < eps * (q - 1):
        rp = eps - va
    else:
        rp = -((-eps) // q)
    return Y.truncate(rp)


def wp_inverse(
    h, policy: BranchPolicy | None = None, prec: int = 50, theta_aware: bool = True, trace: list | None = None
):
    """A representative f with f - f^(1) = h, solved per t-coefficient.

    Coefficient i is solved to absolute precision prec*e (+ e*i when
    ``theta_aware``, which is what evaluation at t = theta needs).
    """
    policy = policy or BranchPolicy.least()
    M, scalar = _as_row(h)
    W = M.W
    q = W.q
    s = policy.scale
    if s is not None:
        a = -(s.twist(1) * s.inverse()).inverse()  # -s^(1-q)
        s_q_inv = s.twist(1).inverse()
    else:
        a = -W.one()
    out = []
    for z in M.entries[0]:
        coeffs = []
        for i, hc in enumerate(z.coeffs):
            target = prec * W.e + (W.e * i if theta_aware else 0)
            if hc.is_zero() and hc.prec is None:
                coeffs.append(W.zero())
                continue
            if s is None:
                f = solve_artin_schreier(a, -hc, policy, 0, root_prec=target, trace=trace)
            else:
                Y = solve_artin_schreier(a, -(hc * s_q_inv), policy, 0, root_prec=target - s.v, trace=trace)
                f = Y * s
            coeffs.append(f.truncate(target) if f.prec is None or f.prec > target else f)
        out.append(TateElem(W, coeffs, z.tail))
    return _unwrap(TateMat(W, [out]), scalar)


# ---------------------------------------------------------------------------


def omega_a0(W: WorkingField, rel_prec: int | None = None) -> WElem:
    """a_0 = (-theta)^(-q/(q-1)) = -1 / (theta * (-theta)^(1/(q-1)))."""
    root = root_q_minus_1(-W.theta, rel_prec=rel_prec)
    return -(W.theta * root).inverse(rel_prec)


def omega_series(W: WorkingField, D: int = DEFAULT_DEGREE, prec: int | None = None) -> TateElem:
    """Omega = sum a_i t^i from a_i + theta^q a_i^q = a_(i-1)^q.

    Each a_i (i >= 1) is the unique root of Y^q + theta^(-q) Y =
    theta^(-q) a_(i-1)^q smaller than |a_0|.  ``prec`` is in theta-units
    (default: the working precision).
    """
    P = prec * W.e if prec is not None else W.default_prec
    a0 = omega_a0(W, P + W.e * 4)
    a0 = a0.truncate(P)
    coeffs = [a0]
    inv_theta_q = W.theta.twist(1).inverse(P + W.e * (W.q + D) + 8)
    for i in range(1, D + 1):
        Pi = P + W.e * i  # theta-aware: evaluation at theta costs e digits per degree
        prev_q = coeffs[-1].twist(1, Pi + 2 * W.e * W.q)
        c = inv_theta_q * prev_q
        if c.is_zero():
            coeffs.append(W.zero(Pi))
            continue
        a_i = solve_artin_schreier(inv_theta_q, c, BranchPolicy.least(), 0, root_prec=Pi)
        coeffs.append(a_i.truncate(Pi))
    return TateElem(W, coeffs, tail=True)


def omega_recursion_residuals(omega: TateElem) -> list[WElem]:
    W = omega.W
    out = []
    prev = None
    for a in omega.coeffs:
        lhs = a + W.theta.twist(1) * a.twist(1)
        rhs = prev.twist(1) if prev is not None else W.zero()
        out.append(lhs - rhs)
        prev = a
    return out


def psi_rank1(E: DrinfeldModule, D: int = DEFAULT_DEGREE, prec: int | None = None) -> TateMat:
    """Psi = gamma * Omega with gamma^(q-1) = kappa_1 (1 x 1 matrix)."""
    if E.r != 1:
        raise DimensionError("psi_rank1 needs a rank-one module")
    W = E.W
    omega = omega_series(W, D, prec)
    if E.is_carlitz():
        return TateMat(W, [[omega]])
    P = prec * W.e if prec is not None else W.default_prec
    gamma = root_q_minus_1(E.kappa[0], rel_prec=P + 8)
    return TateMat(W, [[(omega * gamma).theta_truncate(P)]])


def validate_psi(E: DrinfeldModule, Psi: TateMat, prec: int | None = None) -> Norm:
    """Gauss norm of Psi^(-1) - Phi_E Psi over the known coefficients."""
    W = E.W
    if Psi.rows != E.r or Psi.cols != E.r:
        raise DimensionError("Psi must be r x r")
    D = Psi.D
    lhs = Psi.twist(-1)
    rhs = mat_mul(phi_E_matrix(E, D), Psi)
    diff = lhs - rhs
    norms = [gauss_norm(x, "1") for row in diff.entries for x in row]
    worst = None
    for n in norms:
        if n.log_q is None:
            continue
        if worst is None or n.log_q > worst.log_q:
            worst = n
    return worst if worst is not None else Norm(W.q, None)
