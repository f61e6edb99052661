"""Drinfeld F_q[t]-modules over W: skew polynomials, exponential and logarithm
series, the companion t-frame and the dual t-motive maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .base_arith import CoeffPoly
from .errors import DimensionError, NotAPowerError, PrecisionError
from .local_field import Norm, WElem, WorkingField, _min_prec
from .tate_series import (
    DEFAULT_DEGREE,
    RationalMat,
    TateElem,
    TateMat,
    eval_at_theta,
    inverse_linear_expansion,
    linear_factor,
)

SIGMA_DEGREE_CAP = 16


class DrinfeldModule:
    """phi_t = theta + kappa_1 tau + ... + kappa_r tau^r."""

    def __init__(self, W: WorkingField, kappa: Sequence[WElem]):
        if not kappa:
            raise DimensionError("a Drinfeld module needs rank r >= 1")
        if kappa[-1].is_zero():
            raise PrecisionError("leading coefficient kappa_r must be nonzero")
        self.W = W
        self.kappa = tuple(kappa)

    @property
    def r(self) -> int:
        return len(self.kappa)

    @classmethod
    def carlitz(cls, W: WorkingField) -> "DrinfeldModule":
        return cls(W, [W.one()])

    def is_carlitz(self) -> bool:
        return self.r == 1 and self.kappa[0].is_exact() and (self.kappa[0] - self.W.one()).is_zero()

    def kappa_root(self, i: int, n: int) -> WElem:
        """kappa_i^(-n), the q^n-th root of kappa_i."""
        try:
            return self.kappa[i - 1].twist(-n)
        except NotAPowerError as exc:
            raise NotAPowerError(f"kappa_{i} is not a q^{n}-th power in W: {exc}") from None

    def phi_t(self) -> "SkewPoly":
        return SkewPoly(self.W, [self.W.theta, *self.kappa])

    def to_dict(self) -> dict:
        return {"r": self.r, "kappa": [k.to_dict() for k in self.kappa]}

    @classmethod
    def from_dict(cls, W: WorkingField, d: dict) -> "DrinfeldModule":
        kappa = [WElem.from_dict(W, k) for k in d["kappa"]]
        if len(kappa) != int(d["r"]):
            raise DimensionError("rank does not match the number of kappa entries")
        return cls(W, kappa)

    def __repr__(self) -> str:
        return f"DrinfeldModule(r={self.r}, kappa={list(self.kappa)})"


class SkewPoly:
    """sum a_i tau^i with tau * alpha = alpha^q * tau."""

    __slots__ = ("W", "coeffs")

    def __init__(self, W: WorkingField, coeffs: Sequence[WElem]):
        cs = list(coeffs)
        while cs and cs[-1].is_zero() and cs[-1].prec is None:
            cs.pop()
        self.W = W
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c: WElem) -> "SkewPoly":
        return cls(c.W, [c])

    def __add__(self, other: "SkewPoly") -> "SkewPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.W.zero()
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = other.coeffs + (z,) * (n - len(other.coeffs))
        return SkewPoly(self.W, [x + y for x, y in zip(a, b)])

    def __neg__(self) -> "SkewPoly":
        return SkewPoly(self.W, [-x for x in self.coeffs])

    def __sub__(self, other: "SkewPoly") -> "SkewPoly":
        return self + (-other)

    def __mul__(self, other: "SkewPoly") -> "SkewPoly":
        if not self.coeffs or not other.coeffs:
            return SkewPoly(self.W, [])
        out = [self.W.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b.twist(i)
        return SkewPoly(self.W, out)

    def __call__(self, z: WElem) -> WElem:
        return apply_skew(self, z)

    def equals(self, other: "SkewPoly") -> bool:
        d = self - other
        return all(c.is_zero() for c in d.coeffs)

    def __repr__(self) -> str:
        return f"SkewPoly({list(self.coeffs)})"


def phi_of(E: DrinfeldModule, a: CoeffPoly) -> SkewPoly:
    """Image of a in F_q[t] under t -> phi_t (Horner in the skew ring)."""
    W = E.W
    phi_t = E.phi_t()
    acc = SkewPoly(W, [])
    for c in reversed(a.coeffs):
        acc = acc * phi_t + SkewPoly.constant(W.const(c))
    return acc


def apply_skew(f: SkewPoly, z: WElem) -> WElem:
    acc = f.W.zero()
    for i, a in enumerate(f.coeffs):
        if a.is_zero() and a.prec is None:
            continue
        acc = acc + a * z.twist(i)
    return acc


# ---------------------------------------------------------------------------


class FqLinearSeries:
    """sum_{i<=N} c_i X^(q^i)."""

    __slots__ = ("W", "coeffs")

    def __init__(self, W: WorkingField, coeffs: Sequence[WElem]):
        self.W = W
        self.coeffs = tuple(coeffs)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def term(self, i: int, z: WElem, prec: int | None = None) -> WElem:
        c = self.coeffs[i]
        cap = None if prec is None or c.is_zero() else prec - c.v
        return c * z.twist(i, cap)

    def evaluate(self, z: WElem, prec: int | None = None) -> WElem:
        """Sum of the N+1 terms at z, with a tail bound from the last two terms.

        ``prec`` caps the absolute precision (in u-digits) of the result and
        of every intermediate power of z.
        """
        if prec is None:
            prec = self.W.default_prec
        acc = self.W.zero()
        vals = []
        for i in range(self.N + 1):
            t = self.term(i, z, prec)
            acc = acc + t
            vals.append(t.v if not t.is_zero() else None)
        tail = None
        seen = [(i, v) for i, v in enumerate(vals) if v is not None]
        if len(seen) >= 2 and seen[-1][0] == self.N:
            (i1, v1), (i2, v2) = seen[-2], seen[-1]
            step = (v2 - v1) // (i2 - i1)
            tail = v2 + step if step > 0 else v2
        out = acc.truncate(prec)
        return out.truncate(tail) if tail is not None else out

    def __call__(self, z: WElem, prec: int | None = None) -> WElem:
        return self.evaluate(z, prec)

    def compose(self, other: "FqLinearSeries", rel_prec: int | None = None) -> "FqLinearSeries":
        """self o other, truncated at the smaller order."""
        W = self.W
        rel = rel_prec if rel_prec is not None else W.default_prec
        N = min(self.N, other.N)
        out = []
        for n in range(N + 1):
            acc = W.zero()
            for i in range(n + 1):
                f, g = self.coeffs[i], other.coeffs[n - i]
                if f.is_zero() or g.is_zero():
                    continue
                cap = g.v * W.q**i + rel
                acc = acc + f * g.twist(i, cap)
            out.append(acc)
        return FqLinearSeries(W, out)

    def __repr__(self) -> str:
        return f"FqLinearSeries(N={self.N})"


def exp_coeffs(E: DrinfeldModule, N: int, rel_prec: int | None = None) -> FqLinearSeries:
    """alpha_n (theta^(q^n) - theta) = sum_j kappa_j alpha_(n-j)^(q^j), alpha_0 = 1."""
    W = E.W
    rel = rel_prec if rel_prec is not None else W.default_prec
    alphas = [W.one()]
    for n in range(1, N + 1):
        acc = W.zero()
        for j in range(1, min(E.r, n) + 1):
            prev = alphas[n - j]
            cap = prev.v * W.q**j + rel
            acc = acc + E.kappa[j - 1] * prev.twist(j, cap)
        denom = W.theta.twist(n) - W.theta
        alphas.append(acc * denom.inverse(rel))
    return FqLinearSeries(W, alphas)


def log_coeffs(E: DrinfeldModule, N: int, rel_prec: int | None = None) -> FqLinearSeries:
    """Q_n (theta - theta^(q^n)) = sum_j Q_(n-j) kappa_j^(q^(n-j)), Q_0 = 1."""
    W = E.W
    rel = rel_prec if rel_prec is not None else W.default_prec
    Q = [W.one()]
    for n in range(1, N + 1):
        acc = W.zero()
        for j in range(1, min(E.r, n) + 1):
            acc = acc + Q[n - j] * E.kappa[j - 1].twist(n - j)
        denom = W.theta - W.theta.twist(n)
        Q.append(acc * denom.inverse(rel))
    return FqLinearSeries(W, Q)


def exp_eval(E: DrinfeldModule, z: WElem, N: int = 10, prec: int | None = None) -> WElem:
    return exp_coeffs(E, N).evaluate(z, prec)


def log_eval(E: DrinfeldModule, z: WElem, N: int = 10, prec: int | None = None) -> WElem:
    return log_coeffs(E, N).evaluate(z, prec)


@dataclass
class RadiusEstimate:
    """Empirical radius q^log_q of the logarithm series."""

    norm: Norm
    stabilized: bool
    exponents: list[Fraction] = field(default_factory=list)

    @property
    def log_q(self) -> Fraction:
        return self.norm.log_q

    def to_dict(self) -> dict:
        return {
            "radius": self.norm.to_dict(),
            "stabilized": self.stabilized,
            "per_n": [str(x) for x in self.exponents],
        }


def radius_estimate(E: DrinfeldModule, N: int = 8) -> RadiusEstimate:
    """min_n |Q_n|^(-1/(q^n - 1)) over n <= N."""
    if N < 2:
        raise ValueError("radius_estimate needs N >= 2")
    W = E.W
    Q = log_coeffs(E, N)
    exps = []
    for n in range(1, N + 1):
        if Q.coeffs[n].is_zero():
            continue
        exps.append(Q.coeffs[n].ord() / (W.q**n - 1))
    best = min(exps)
    running = [min(exps[: k + 1]) for k in range(len(exps))]
    half = max(1, len(running) // 2)
    stabilized = len(set(running[-half:])) == 1
    return RadiusEstimate(Norm(W.q, best), stabilized, exps)


# ---------------------------------------------------------------------------
# t-frame


def phi_E_rational(E: DrinfeldModule) -> RationalMat:
    """The companion-form t-frame matrix as a polynomial matrix in t."""
    W, r = E.W, E.r
    lead_inv = E.kappa_root(r, r).inverse()
    polys: list[list[list[WElem]]] = [[[] for _ in range(r)] for _ in range(r)]
    for i in range(r - 1):
        polys[i][i + 1] = [W.one()]
    t_minus_theta = linear_factor(W, 0)
    polys[r - 1][0] = [c * lead_inv for c in t_minus_theta]
    for j in range(1, r):
        polys[r - 1][j] = [-(E.kappa_root(j, j) * lead_inv)]
    return RationalMat(W, polys)


def phi_E_matrix(E: DrinfeldModule, D: int = DEFAULT_DEGREE) -> TateMat:
    return phi_E_rational(E).to_tate(D)


def phi_E_inverse(E: DrinfeldModule) -> RationalMat:
    """Inverse of the t-frame: (1/(t - theta)) [kappa_j^(-j) in row 1; t - theta below the diagonal]."""
    W, r = E.W, E.r
    polys: list[list[list[WElem]]] = [[[] for _ in range(r)] for _ in range(r)]
    for j in range(r):
        polys[0][j] = [E.kappa_root(j + 1, j + 1)]
    for i in range(1, r):
        polys[i][i - 1] = linear_factor(W, 0)
    return RationalMat(W, polys, (0,))


def frame_products(E: DrinfeldModule, m: int) -> list[RationalMat]:
    """[R_0, ..., R_m] with R_0 = Id and R_k = (Phi^-1)^(k) R_(k-1)."""
    inv = phi_E_inverse(E)
    out = [RationalMat.identity(E.W, E.r)]
    for k in range(1, m + 1):
        out.append(inv.twist(k) @ out[-1])
    return out


# ---------------------------------------------------------------------------
# dual t-motive


class SigmaPoly:
    """sum alpha_i sigma^i with sigma * f = f^(-1) * sigma."""

    __slots__ = ("W", "coeffs")

    def __init__(self, W: WorkingField, coeffs: Sequence[WElem]):
        cs = list(coeffs)
        while cs and cs[-1].is_zero() and cs[-1].prec is None:
            cs.pop()
        if len(cs) - 1 > SIGMA_DEGREE_CAP:
            raise DimensionError(f"sigma-degree is capped at {SIGMA_DEGREE_CAP}")
        self.W = W
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "SigmaPoly") -> "SigmaPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.W.zero()
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = other.coeffs + (z,) * (n - len(other.coeffs))
        return SigmaPoly(self.W, [x + y for x, y in zip(a, b)])

    def __neg__(self) -> "SigmaPoly":
        return SigmaPoly(self.W, [-x for x in self.coeffs])

    def __sub__(self, other: "SigmaPoly") -> "SigmaPoly":
        return self + (-other)

    def __mul__(self, other: "SigmaPoly") -> "SigmaPoly":
        if not self.coeffs or not other.coeffs:
            return SigmaPoly(self.W, [])
        out = [self.W.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b.twist(-i)
        return SigmaPoly(self.W, out)

    @classmethod
    def sigma(cls, W: WorkingField) -> "SigmaPoly":
        return cls(W, [W.zero(), W.one()])

    def __repr__(self) -> str:
        return f"SigmaPoly({list(self.coeffs)})"


def epsilon0(m: SigmaPoly) -> WElem:
    return m.coeffs[0] if m.coeffs else m.W.zero()


def epsilon1(m: SigmaPoly) -> WElem:
    acc = m.W.zero()
    for i, a in enumerate(m.coeffs):
        acc = acc + a.twist(i)
    return acc


def phi_t_star(E: DrinfeldModule) -> SigmaPoly:
    """theta + kappa_1^(-1) sigma + ... + kappa_r^(-r) sigma^r."""
    return SigmaPoly(E.W, [E.W.theta] + [E.kappa_root(j, j) for j in range(1, E.r + 1)])


def t_action(E: DrinfeldModule, m: SigmaPoly) -> SigmaPoly:
    return m * phi_t_star(E)


def script_E0(vec, prec: int | None = None) -> WElem:
    """Evaluate the first entry of a row vector in T_theta at t = theta."""
    first = vec.entries[0][0] if isinstance(vec, TateMat) else vec[0]
    return eval_at_theta(first, prec)


# ---------------------------------------------------------------------------


@dataclass
class AndersonCheck:
    residual: Norm
    value: WElem
    passed: bool
    target: int

    def to_dict(self) -> dict:
        return {"residual": self.residual.to_dict(), "passed": self.passed, "target_log_q": -self.target}


def anderson_g_vector(
    E: DrinfeldModule, xi: WElem, N: int = 10, D: int = DEFAULT_DEGREE, theta_prec: int | None = None
) -> TateMat:
    """g_xi = sum_{i=1}^N (xi^(q^i), 0, ..., 0) R_i as a 1 x r row of Tate elements.

    Coefficients are kept only to the precision that matters at t = theta
    (``theta_prec`` u-digits, default the field's working precision).
    """
    W, r = E.W, E.r
    P = theta_prec if theta_prec is not None else W.default_prec
    products = frame_products(E, N)
    prefix = TateElem.constant(W.one(), D)
    row = [TateElem.zero(W, D) for _ in range(r)]
    for i in range(1, N + 1):
        prefix = (prefix * inverse_linear_expansion(W, i, D, theta_prec=P)).theta_truncate(P)
        R = products[i]
        if R.den != tuple(range(1, i + 1)):  # pragma: no cover - structural invariant
            raise DimensionError("unexpected denominator in the frame product")
        power = xi.twist(i, P + W.e * D)
        for j in range(r):
            num = R.polys[0][j]
            if not num:
                continue
            row[j] = row[j] + (TateElem.poly(W, [c * power for c in num], D) * prefix).theta_truncate(P)
    return TateMat(W, [row])


def anderson_exp_check(
    E: DrinfeldModule, xi: WElem, N: int = 10, D: int = DEFAULT_DEGREE, prec: int = 50
) -> AndersonCheck:
    """|exp_E(E_0(g_xi + h_xi)) - xi| where h_xi = (xi, 0, ..., 0).

    ``prec`` is the target in theta-units: success means the residual is at
    most q^(-prec).
    """
    W = E.W
    if xi.is_zero() and xi.prec is None:
        return AndersonCheck(Norm(W.q, None), W.zero(), True, prec)
    target = prec * W.e
    g = anderson_g_vector(E, xi, N, D, target + 4 * W.e)
    first = g.entries[0][0] + TateElem.constant(xi, D)
    value = eval_at_theta(first)
    back = exp_coeffs(E, N).evaluate(value, target + W.e)
    diff = back - xi
    res = Norm.of(diff)
    return AndersonCheck(res, value, res.at_most_exponent(-prec), prec)
