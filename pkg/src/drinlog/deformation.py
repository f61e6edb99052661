"""Shadowed partitions, the coefficients B_n(t) and the deformation series of
the logarithm."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .drinfeld_core import DrinfeldModule, frame_products, log_coeffs
from .local_field import WElem
from .tate_series import (
    DEFAULT_DEGREE,
    RationalMat,
    RationalTate,
    TateElem,
    eval_at_theta,
    inverse_linear_expansion,
)

ORDER_CAP = 64


@dataclass(frozen=True)
class ShadowedPartition:
    """Sets S_1..S_r whose translates S_i + j (0 <= j < i) tile {0, ..., n-1}."""

    sets: tuple[frozenset[int], ...]

    @property
    def r(self) -> int:
        return len(self.sets)

    def covers(self, n: int) -> bool:
        seen: set[int] = set()
        for i, S in enumerate(self.sets, start=1):
            for x in S:
                for j in range(i):
                    if x + j in seen:
                        return False
                    seen.add(x + j)
        return seen == set(range(n))

    def membership(self, n: int) -> tuple[int, ...]:
        return tuple(int(k in S) for S in self.sets for k in range(n))

    def __str__(self) -> str:
        return "(" + ", ".join("{" + ",".join(map(str, sorted(S))) + "}" for S in self.sets) + ")"


@lru_cache(maxsize=None)
def _compositions(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for part in range(1, min(r, n) + 1):
        out.extend((part, *rest) for rest in _compositions(n - part, r))
    return tuple(out)


def enumerate_P_r_n(r: int, n: int) -> list[ShadowedPartition]:
    """All of P_r(n), ordered by the membership vectors of S_1, ..., S_r.

    A tiling of {0..n-1} by blocks of lengths 1..r is a composition of n; a
    block of length i starting at x puts x into S_i.
    """
    if r < 1 or n < 0:
        raise ValueError("need r >= 1 and n >= 0")
    out = []
    for comp in _compositions(n, r):
        sets: list[set[int]] = [set() for _ in range(r)]
        start = 0
        for part in comp:
            sets[part - 1].add(start)
            start += part
        out.append(ShadowedPartition(tuple(frozenset(S) for S in sets)))
    out.sort(key=lambda P: P.membership(n))
    return out


def b_series_direct(E: DrinfeldModule, n: int) -> RationalTate:
    """sum over P_r(n) of prod_i prod_{j in S_i} kappa_i^(q^j) / (t - theta^(q^(i+j)))."""
    W = E.W
    total = RationalTate.zero(W) if n > 0 else RationalTate.const(W.one())
    if n == 0:
        return total
    for P in enumerate_P_r_n(E.r, n):
        coef = W.one()
        den = []
        for i, S in enumerate(P.sets, start=1):
            for j in S:
                coef = coef * E.kappa[i - 1].twist(j)
                den.append(i + j)
        total = total + RationalTate(W, [coef], den)
    return total


def b_series_recursive(E: DrinfeldModule, n: int) -> RationalTate:
    """B_m = sum_j kappa_j^(q^(m-j)) / (t - theta^(q^m)) * B_(m-j), B_0 = 1."""
    W = E.W
    B = [RationalTate.const(W.one())]
    for m in range(1, n + 1):
        acc = RationalTate.zero(W)
        for j in range(1, min(E.r, m) + 1):
            step = RationalTate(W, [E.kappa[j - 1].twist(m - j)], [m])
            acc = acc + step * B[m - j]
        B.append(acc)
    return B[n]


def r_matrix(E: DrinfeldModule, m: int) -> RationalMat:
    """R_m = (Phi^-1)^(m) ... (Phi^-1)^(1), with R_0 the identity."""
    return frame_products(E, m)[m]


def b_record(E: DrinfeldModule, n: int, D: int = 8) -> dict:
    B = b_series_direct(E, n)
    return {
        "n": n,
        "partitions_count": len(enumerate_P_r_n(E.r, n)),
        "partitions": [str(P) for P in enumerate_P_r_n(E.r, n)],
        "rational_form": B.to_dict(),
        "expansion": B.expand(D).to_dict(),
    }


def default_order(E: DrinfeldModule, xi: WElem, prec: int) -> int:
    """Smallest n with |Q_n xi^(q^n)| < q^(-prec-10), capped at 64.

    Q_n = B_n(theta), so the log-recursion gives the term sizes.
    """
    W = E.W
    if xi.is_zero():
        return 0
    target = (prec + 10) * W.e
    Q = log_coeffs(E, 1).coeffs
    Qs = [Q[0], Q[1]]
    for n in range(1, ORDER_CAP + 1):
        if n >= len(Qs):
            Qs = list(log_coeffs(E, n).coeffs)
        if Qs[n].is_zero():
            continue
        if Qs[n].v + xi.v * W.q**n >= target:
            return n
    return ORDER_CAP


def deformation_series(
    E: DrinfeldModule,
    xi: WElem,
    N: int | None = None,
    D: int = DEFAULT_DEGREE,
    method: str = "direct",
    prec: int | None = None,
) -> TateElem:
    """sum_{n<=N} B_n(t) xi^(q^n) expanded to t-degree D.

    ``method`` is "direct" (shadowed-partition B_n) or "matrix" (first entry of
    (xi^(q^n), 0, ..., 0) R_n).  ``prec`` (theta-units) bounds the digits kept
    for evaluation at t = theta.
    """
    W = E.W
    if prec is None:
        prec = W.default_prec // W.e
    if N is None:
        N = default_order(E, xi, prec)
    P = (prec + 4) * W.e
    total = TateElem.constant(xi, D).theta_truncate(P)
    if xi.is_zero() and xi.prec is None:
        return TateElem(W, total.coeffs, tail=True)
    products = frame_products(E, N) if method == "matrix" else None
    numerators = []
    for n in range(1, N + 1):
        if method == "direct":
            B = b_series_direct(E, n)
        elif method == "matrix":
            B = products[n].entry(0, 0)
        else:
            raise ValueError(f"unknown method {method!r}")
        # every B_n has denominator exactly prod_{k=1}^n (t - theta^(q^k))
        if B.den != tuple(range(1, n + 1)):
            B = RationalTate(W, B._lift(Counter(range(1, n + 1))), range(1, n + 1))
        numerators.append(B.num)
    # large |xi|^(q^n) or numerator coefficients eat absolute precision of the expansions
    guard = 0
    for n, num in enumerate(numerators, start=1):
        low = min((c.v for c in num if not c.is_zero()), default=0)
        guard = max(guard, -(low + xi.v * W.q**n))
    Pg = P + guard
    prefix = TateElem.constant(W.one(), D)
    for n, num_coeffs in enumerate(numerators, start=1):
        prefix = (prefix * inverse_linear_expansion(W, n, D, theta_prec=Pg)).theta_truncate(Pg)
        power = xi.twist(n, Pg + W.e * D)
        num = TateElem.poly(W, [c * power for c in num_coeffs] or [W.zero()], D)
        total = total + (num * prefix).theta_truncate(P)
    return total


def specialize_log(E: DrinfeldModule, xi: WElem, N: int | None = None, prec: int = 50, D: int = DEFAULT_DEGREE) -> WElem:
    """Deformation series evaluated at t = theta (equal to log_E(xi) inside the radius)."""
    series = deformation_series(E, xi, N, D, prec=prec)
    return eval_at_theta(series, prec * E.W.e)


def frobenius_inverse_phi_j(E: DrinfeldModule, xi: WElem, j: int, rel_prec: int | None = None) -> WElem:
    """phi_j(xi): first entry of (xi^(q^j), 0, ..., 0) R_j cleared of its
    denominator, evaluated at theta and multiplied by P_0(theta)...P_j(theta)
    with P_k = (theta - theta^(q^k))^-1."""
    W = E.W
    if j == 0:
        return xi
    R = r_matrix(E, j)
    num = R.polys[0][0]
    value = W.zero()
    for c in reversed(num):
        value = value * W.theta + c
    value = value * xi.twist(j)
    scale = W.one()
    for k in range(1, j + 1):
        scale = scale * (W.theta - W.theta.twist(k))
    # R_j has denominator prod_{k=1}^j (t - theta^(q^k)), so the cleared
    # numerator is y_j and only the P_k factors remain
    assert R.den == tuple(range(1, j + 1))
    return value * scale.inverse(rel_prec)
