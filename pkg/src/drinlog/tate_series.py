"""Truncated Tate-algebra elements: power series in t with coefficients in W.

A :class:`TateElem` keeps the coefficients of t^0..t^D.  ``tail`` records
whether the true element may continue beyond degree D (a truncation) or is an
exact polynomial.  Matrices of such series are :class:`TateMat`.

Rational functions of t whose denominators are products of factors
(t - theta^(q^k)) are kept exactly as :class:`RationalTate`; they can be
compared exactly, evaluated exactly at t = theta, or expanded into a
:class:`TateElem` (the poles lie outside the closed unit disc because
|theta^(q^k)| > 1, so the geometric expansion is legitimate).
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, PrecisionError, SingularError, TailNotConvergedError
from .local_field import Norm, WElem, WorkingField, _min_prec

DEFAULT_DEGREE = 40


class TateElem:
    __slots__ = ("W", "coeffs", "tail")

    def __init__(self, W: WorkingField, coeffs: Sequence[WElem], tail: bool = False):
        self.W = W
        self.coeffs = tuple(coeffs)
        self.tail = tail
        if not self.coeffs:
            raise ValueError("a TateElem needs at least the constant coefficient")

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, W: WorkingField, D: int = 0) -> "TateElem":
        z = W.zero()
        return cls(W, [z] * (D + 1), tail=False)

    @classmethod
    def constant(cls, c: WElem, D: int = 0) -> "TateElem":
        z = c.W.zero()
        return cls(c.W, [c] + [z] * D, tail=False)

    @classmethod
    def poly(cls, W: WorkingField, coeffs: Sequence[WElem], D: int | None = None) -> "TateElem":
        """Exact polynomial sum coeffs[i] t^i, padded (or truncated) to degree D."""
        coeffs = list(coeffs) or [W.zero()]
        if D is None:
            D = len(coeffs) - 1
        tail = any(not c.is_zero() for c in coeffs[D + 1 :])
        coeffs = coeffs[: D + 1] + [W.zero()] * (D + 1 - len(coeffs))
        return cls(W, coeffs, tail=tail)

    def resize(self, D: int) -> "TateElem":
        if D <= self.D:
            dropped = any(not c.is_zero() for c in self.coeffs[D + 1 :])
            return TateElem(self.W, self.coeffs[: D + 1], self.tail or dropped)
        if self.tail:
            raise PrecisionError(f"cannot extend a degree-{self.D} truncation to degree {D}")
        return TateElem(self.W, self.coeffs + (self.W.zero(),) * (D - self.D), False)

    def _common(self, other: "TateElem") -> tuple["TateElem", "TateElem"]:
        if self.tail and other.tail:
            D = min(self.D, other.D)
        elif self.tail:
            D = self.D
        elif other.tail:
            D = other.D
        else:
            D = max(self.D, other.D)
        return self.resize(D), other.resize(D)

    def __add__(self, other: "TateElem") -> "TateElem":
        a, b = self._common(other)
        return TateElem(self.W, [x + y for x, y in zip(a.coeffs, b.coeffs)], a.tail or b.tail)

    def __sub__(self, other: "TateElem") -> "TateElem":
        a, b = self._common(other)
        return TateElem(self.W, [x - y for x, y in zip(a.coeffs, b.coeffs)], a.tail or b.tail)

    def __neg__(self) -> "TateElem":
        return TateElem(self.W, [-x for x in self.coeffs], self.tail)

    def __mul__(self, other) -> "TateElem":
        if isinstance(other, WElem):
            return TateElem(self.W, [x * other for x in self.coeffs], self.tail)
        a, b = self._common(other)
        D = a.D
        tail = a.tail or b.tail
        if not tail:
            # exact polynomials: keep the full product degree
            da = max((i for i, c in enumerate(a.coeffs) if not c.is_zero()), default=0)
            db = max((i for i, c in enumerate(b.coeffs) if not c.is_zero()), default=0)
            D = max(D, da + db)
        out = []
        for n in range(D + 1):
            acc = None
            for i in range(max(0, n - b.D), min(n, a.D) + 1):
                x, y = a.coeffs[i], b.coeffs[n - i]
                if x.is_zero() and x.prec is None or y.is_zero() and y.prec is None:
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else self.W.zero())
        return TateElem(self.W, out, tail)

    __rmul__ = __mul__

    def mul_t(self, k: int = 1) -> "TateElem":
        """Multiply by t^k, keeping the same degree bound."""
        z = self.W.zero()
        coeffs = [z] * k + list(self.coeffs)
        dropped = any(not c.is_zero() for c in coeffs[self.D + 1 :])
        return TateElem(self.W, coeffs[: self.D + 1], self.tail or dropped)

    def twist(self, n: int, cap: int | None = None) -> "TateElem":
        return TateElem(self.W, [c.twist(n, cap) for c in self.coeffs], self.tail)

    def truncate_prec(self, prec: int) -> "TateElem":
        return TateElem(self.W, [c.truncate(prec) for c in self.coeffs], self.tail)

    def theta_truncate(self, prec: int) -> "TateElem":
        """Drop digits that cannot affect the value at t = theta below u^prec."""
        e = self.W.e
        return TateElem(self.W, [c.truncate(prec + e * i) for i, c in enumerate(self.coeffs)], self.tail)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def gauss_norm(self, alpha: str = "1") -> Norm:
        return gauss_norm(self, alpha)

    def eval_at_theta(self, target_prec: int | None = None) -> WElem:
        return eval_at_theta(self, target_prec)

    def to_dict(self) -> dict:
        return {"D": self.D, "tail": self.tail, "coeffs": [c.to_dict() for c in self.coeffs]}

    @classmethod
    def from_dict(cls, W: WorkingField, d: dict) -> "TateElem":
        return cls(W, [WElem.from_dict(W, c) for c in d["coeffs"]], bool(d["tail"]))

    def __repr__(self) -> str:
        return f"TateElem(D={self.D}, tail={self.tail}, c0={self.coeffs[0]!r})"


def tate_arith(a: TateElem, b: TateElem, op: str) -> TateElem:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op in ("*", "×"):
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def tate_twist(a, n: int, cap: int | None = None):
    return a.twist(n, cap)


def gauss_norm(a: TateElem, alpha: str = "1") -> Norm:
    """sup_i |c_i| |alpha|^i for alpha in {1, theta}; a lower bound if truncated."""
    if alpha not in ("1", "theta"):
        raise ValueError("alpha must be '1' or 'theta'")
    best: Fraction | None = None
    bound_only = True
    weight = 1 if alpha == "theta" else 0
    for i, c in enumerate(a.coeffs):
        if c.is_zero():
            continue
        bound_only = False
        val = -c.ord() + weight * i
        if best is None or val > best:
            best = val
    if best is None:
        lbs = [c.ord_lower_bound() for c in a.coeffs]
        finite = [-lb + weight * i for i, lb in enumerate(lbs) if lb is not None]
        if not finite:
            return Norm(a.W.q, None)
        return Norm(a.W.q, max(finite), bound=True, lower=False)
    return Norm(a.W.q, best, bound=bound_only, lower=a.tail)


def tail_exponent(a: TateElem) -> int | None:
    """Extrapolated u-valuation of the terms c_i theta^i beyond degree D.

    Geometric extrapolation from the last two nonzero observed terms.  Returns
    None for an exact polynomial (no tail).
    """
    if not a.tail:
        return None
    W = a.W
    e = W.e
    observed = [(i, c.v - e * i) for i, c in enumerate(a.coeffs) if not c.is_zero()]
    if len(observed) >= 2:
        (i1, o1), (i2, o2) = observed[-2], observed[-1]
        slope = Fraction(o2 - o1, i2 - i1)
        if slope <= 0:
            raise TailNotConvergedError(
                f"terms c_i theta^i are not decaying (slope {slope} u-digits per degree at D={a.D})"
            )
        return math.floor(o2 + slope * (a.D + 1 - i2))
    # nothing to extrapolate from: use the precision bound of the last coefficient
    last = a.coeffs[-1]
    lb = last.ord_lower_bound()
    if lb is None:
        return None
    return math.floor(lb * e) - e * a.D


def eval_at_theta(a: TateElem, target_prec: int | None = None) -> WElem:
    """sum_{i<=D} c_i theta^i with the precision capped by the tail estimate."""
    W = a.W
    acc = W.zero()
    for i, c in enumerate(a.coeffs):
        if c.is_zero() and c.prec is None:
            continue
        acc = acc + c * W.theta_power(i)
    tail = tail_exponent(a)
    prec = _min_prec(acc.prec, tail)
    if target_prec is not None and (prec is None or prec >= target_prec):
        prec = _min_prec(prec, None)
    if target_prec is not None and prec is not None and prec < target_prec:
        raise TailNotConvergedError(
            f"evaluation at t=theta only reaches u^{prec} (wanted u^{target_prec}); raise D or the working precision"
        )
    if prec is not None:
        acc = acc.truncate(prec)
    return acc


# ---------------------------------------------------------------------------


class TateMat:
    __slots__ = ("W", "rows", "cols", "entries")

    def __init__(self, W: WorkingField, entries: Sequence[Sequence[TateElem]]):
        self.W = W
        self.entries = tuple(tuple(r) for r in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if any(len(r) != self.cols for r in self.entries):
            raise DimensionError("ragged matrix")

    @classmethod
    def identity(cls, W: WorkingField, r: int, D: int = 0) -> "TateMat":
        one, z = TateElem.constant(W.one(), D), TateElem.zero(W, D)
        return cls(W, [[one if i == j else z for j in range(r)] for i in range(r)])

    @classmethod
    def scalar(cls, a: TateElem) -> "TateMat":
        return cls(a.W, [[a]])

    def __getitem__(self, ij: tuple[int, int]) -> TateElem:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> "TateMat":
        return TateMat(self.W, [self.entries[i]])

    def col(self, j: int) -> "TateMat":
        return TateMat(self.W, [[r[j]] for r in self.entries])

    def __matmul__(self, other: "TateMat") -> "TateMat":
        return mat_mul(self, other)

    def __add__(self, other: "TateMat") -> "TateMat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch in matrix sum")
        return TateMat(self.W, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "TateMat") -> "TateMat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch in matrix difference")
        return TateMat(self.W, [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def scale(self, c) -> "TateMat":
        return TateMat(self.W, [[a * c for a in r] for r in self.entries])

    def twist(self, n: int, cap: int | None = None) -> "TateMat":
        return TateMat(self.W, [[a.twist(n, cap) for a in r] for r in self.entries])

    def resize(self, D: int) -> "TateMat":
        return TateMat(self.W, [[a.resize(D) for a in r] for r in self.entries])

    @property
    def D(self) -> int:
        return min(a.D for r in self.entries for a in r)

    def gauss_norm(self, alpha: str = "1") -> Norm:
        norms = [gauss_norm(a, alpha) for r in self.entries for a in r]
        return max(norms, key=lambda n: (n.log_q is not None, n.log_q if n.log_q is not None else 0))

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [[a.to_dict() for a in r] for r in self.entries]}

    @classmethod
    def from_dict(cls, W: WorkingField, d: dict) -> "TateMat":
        return cls(W, [[TateElem.from_dict(W, a) for a in r] for r in d["entries"]])


def mat_mul(A: TateMat, B: TateMat) -> TateMat:
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = None
            for k in range(A.cols):
                term = A.entries[i][k] * B.entries[k][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return TateMat(A.W, out)


def w_matrix_inverse(M: list[list[WElem]], rel_prec: int | None = None) -> list[list[WElem]]:
    """Gauss-Jordan inverse over W with pivots of least valuation."""
    n = len(M)
    if any(len(r) != n for r in M):
        raise DimensionError("matrix inverse needs a square matrix")
    W = M[0][0].W
    if rel_prec is None:
        # never cap below what the inputs themselves carry
        known = [x.rel_prec for r in M for x in r if x.prec is not None and not x.is_zero()]
        rel_prec = max([W.default_prec, *known])
    aug = [list(r) + [W.one() if i == j else W.zero() for j in range(n)] for i, r in enumerate(M)]
    for col in range(n):
        cands = [(aug[i][col].v, i) for i in range(col, n) if not aug[i][col].is_zero()]
        if not cands:
            raise SingularError("constant term of the matrix is singular at this precision")
        _, piv = min(cands)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse(rel_prec)
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and not aug[i][col].is_zero():
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [r[n:] for r in aug]


def mat_inverse(A: TateMat, rel_prec: int | None = None) -> TateMat:
    """Inverse of a square TateMat as a power series in t, up to degree D."""
    if A.rows != A.cols:
        raise DimensionError("mat_inverse needs a square matrix")
    n, D, W = A.rows, A.D, A.W
    A = A.resize(D)
    blocks = [[[A.entries[i][j].coeffs[k] for j in range(n)] for i in range(n)] for k in range(D + 1)]
    B0 = w_matrix_inverse(blocks[0], rel_prec)
    out = [B0]
    for k in range(1, D + 1):
        S = [[W.zero() for _ in range(n)] for _ in range(n)]
        for j in range(1, k + 1):
            Aj = blocks[j]
            if all(x.is_zero() and x.prec is None for r in Aj for x in r):
                continue
            Bk = out[k - j]
            for a in range(n):
                for b in range(n):
                    acc = S[a][b]
                    for c in range(n):
                        acc = acc + Aj[a][c] * Bk[c][b]
                    S[a][b] = acc
        out.append([[-sum((B0[a][c] * S[c][b] for c in range(1, n)), B0[a][0] * S[0][b]) for b in range(n)] for a in range(n)])
    entries = [[TateElem(W, [out[k][i][j] for k in range(D + 1)], tail=True) for j in range(n)] for i in range(n)]
    return TateMat(W, entries)


# ---------------------------------------------------------------------------
# polynomials in t over W (little-endian lists of WElem)


def poly_trim(a: list[WElem]) -> list[WElem]:
    a = list(a)
    while a and a[-1].is_zero() and a[-1].prec is None:
        a.pop()
    return a


def poly_add(a: Sequence[WElem], b: Sequence[WElem], W: WorkingField) -> list[WElem]:
    n = max(len(a), len(b))
    z = W.zero()
    return poly_trim([(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)])


def poly_neg(a: Sequence[WElem]) -> list[WElem]:
    return [-x for x in a]


def poly_mul(a: Sequence[WElem], b: Sequence[WElem], W: WorkingField) -> list[WElem]:
    if not a or not b:
        return []
    out: list[WElem | None] = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero() and x.prec is None:
            continue
        for j, y in enumerate(b):
            if y.is_zero() and y.prec is None:
                continue
            t = x * y
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    return poly_trim([o if o is not None else W.zero() for o in out])


def poly_scale(a: Sequence[WElem], c: WElem) -> list[WElem]:
    return poly_trim([x * c for x in a])


def poly_eval(a: Sequence[WElem], x: WElem, W: WorkingField) -> WElem:
    acc = W.zero()
    for c in reversed(list(a)):
        acc = acc * x + c
    return acc


def linear_factor(W: WorkingField, k: int) -> list[WElem]:
    """The polynomial t - theta^(q^k)."""
    return [-W.theta.twist(k), W.one()]


class RationalTate:
    """numerator(t) / prod_k (t - theta^(q^k)) with the k's kept as a sorted tuple."""

    __slots__ = ("W", "num", "den")

    def __init__(self, W: WorkingField, num: Sequence[WElem], den: Sequence[int] = ()):
        self.W = W
        self.num = tuple(poly_trim(list(num)))
        self.den = tuple(sorted(den))

    @classmethod
    def const(cls, c: WElem) -> "RationalTate":
        return cls(c.W, [c], ())

    @classmethod
    def zero(cls, W: WorkingField) -> "RationalTate":
        return cls(W, [], ())

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.num)

    def _lift(self, den: Counter) -> list[WElem]:
        """Numerator rewritten over the (larger) denominator ``den``."""
        mine = Counter(self.den)
        num = list(self.num)
        for k, cnt in den.items():
            for _ in range(cnt - mine.get(k, 0)):
                num = poly_mul(num, linear_factor(self.W, k), self.W)
        return num

    def __add__(self, other: "RationalTate") -> "RationalTate":
        den = Counter(self.den) | Counter(other.den)
        num = poly_add(self._lift(den), other._lift(den), self.W)
        return RationalTate(self.W, num, list(den.elements()))

    def __neg__(self) -> "RationalTate":
        return RationalTate(self.W, poly_neg(self.num), self.den)

    def __sub__(self, other: "RationalTate") -> "RationalTate":
        return self + (-other)

    def __mul__(self, other) -> "RationalTate":
        if isinstance(other, WElem):
            return RationalTate(self.W, poly_scale(self.num, other), self.den)
        return RationalTate(self.W, poly_mul(self.num, other.num, self.W), self.den + other.den)

    def twist(self, n: int) -> "RationalTate":
        if self.den and min(self.den) + n < 0:
            raise ValueError("twisting would produce a factor t - theta^(q^k) with k < 0")
        return RationalTate(self.W, [c.twist(n) for c in self.num], [k + n for k in self.den])

    def equals(self, other: "RationalTate") -> bool:
        """Exact equality as rational functions (cross-multiplied numerators)."""
        den = Counter(self.den) | Counter(other.den)
        diff = poly_add(self._lift(den), poly_neg(other._lift(den)), self.W)
        return all(c.is_zero() for c in diff)

    def normalized(self) -> "RationalTate":
        """Cancel denominator factors that divide the numerator."""
        num = list(self.num)
        den = list(self.den)
        changed = True
        while changed and num:
            changed = False
            for k in sorted(set(den)):
                root = self.W.theta.twist(k)
                quot, rem = _divide_linear(num, root, self.W)
                if rem.is_zero():
                    num = quot
                    den.remove(k)
                    changed = True
                    break
        return RationalTate(self.W, num, den)

    def eval_at_theta(self, rel_prec: int | None = None) -> WElem:
        W = self.W
        if 0 in self.den:
            raise PrecisionError("pole at t = theta")
        val = poly_eval(self.num, W.theta, W)
        denom = W.one()
        for k in self.den:
            denom = denom * (W.theta - W.theta.twist(k))
        if denom.prec is None and len(denom.c) == 1:
            return val * denom.inverse()
        rel = rel_prec if rel_prec is not None else W.default_prec
        return val * denom.inverse(rel)

    def expand(self, D: int = DEFAULT_DEGREE, rel_prec: int | None = None) -> TateElem:
        """Geometric expansion in t up to degree D."""
        W = self.W
        out = TateElem.poly(W, list(self.num) or [W.zero()], D)
        out = out.resize(D) if not out.tail else out
        for k in self.den:
            out = out * inverse_linear_expansion(W, k, D, rel_prec)
        return out

    def to_dict(self) -> dict:
        return {"numerator": [c.to_dict() for c in self.num], "denominator_twists": list(self.den)}

    def __repr__(self) -> str:
        return f"RationalTate(deg num={len(self.num) - 1}, den={self.den})"


def _divide_linear(num: list[WElem], root: WElem, W: WorkingField) -> tuple[list[WElem], WElem]:
    """Synthetic division of num(t) by (t - root): (quotient, remainder)."""
    if not num:
        return [], W.zero()
    n = len(num) - 1
    quot: list[WElem] = [W.zero()] * n
    carry = num[n]
    for i in range(n - 1, -1, -1):
        quot[i] = carry
        carry = num[i] + carry * root
    return poly_trim(quot), carry


def inverse_linear_expansion(
    W: WorkingField, k: int, D: int, rel_prec: int | None = None, theta_prec: int | None = None
) -> TateElem:
    """1/(t - c) = -sum_i c^(-(i+1)) t^i with c = theta^(q^k), to degree D.

    With ``theta_prec`` the coefficient of t^i is only kept modulo
    u^(theta_prec + e*i), enough for evaluation at t = theta.
    """
    c = W.theta.twist(k)
    inv = c.inverse(rel_prec)
    coeffs = []
    cur = -inv
    for i in range(D + 1):
        coeffs.append(cur if theta_prec is None else cur.truncate(theta_prec + W.e * i))
        cur = cur * inv
        if theta_prec is not None:
            cur = cur.truncate(theta_prec + W.e * (i + 1))
    return TateElem(W, coeffs, tail=True)


class RationalMat:
    """Matrix of polynomials in t over a common denominator prod (t - theta^(q^k))."""

    __slots__ = ("W", "polys", "den")

    def __init__(self, W: WorkingField, polys: Sequence[Sequence[Sequence[WElem]]], den: Sequence[int] = ()):
        self.W = W
        self.polys = tuple(tuple(tuple(poly_trim(list(p))) for p in row) for row in polys)
        self.den = tuple(sorted(den))

    @property
    def rows(self) -> int:
        return len(self.polys)

    @property
    def cols(self) -> int:
        return len(self.polys[0]) if self.polys else 0

    @classmethod
    def identity(cls, W: WorkingField, r: int) -> "RationalMat":
        return cls(W, [[[W.one()] if i == j else [] for j in range(r)] for i in range(r)])

    def entry(self, i: int, j: int) -> RationalTate:
        return RationalTate(self.W, self.polys[i][j], self.den)

    def __matmul__(self, other: "RationalMat") -> "RationalMat":
        if self.cols != other.rows:
            raise DimensionError("shape mismatch in rational matrix product")
        W = self.W
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc: list[WElem] = []
                for k in range(self.cols):
                    acc = poly_add(acc, poly_mul(self.polys[i][k], other.polys[k][j], W), W)
                row.append(acc)
            out.append(row)
        return RationalMat(W, out, self.den + other.den)

    def twist(self, n: int) -> "RationalMat":
        polys = [[[c.twist(n) for c in p] for p in row] for row in self.polys]
        return RationalMat(self.W, polys, [k + n for k in self.den])

    def to_tate(self, D: int = DEFAULT_DEGREE, rel_prec: int | None = None) -> TateMat:
        return TateMat(self.W, [[self.entry(i, j).expand(D, rel_prec) for j in range(self.cols)] for i in range(self.rows)])

    def is_identity(self) -> bool:
        for i in range(self.rows):
            for j in range(self.cols):
                target = RationalTate.const(self.W.one()) if i == j else RationalTate.zero(self.W)
                if not self.entry(i, j).equals(target):
                    return False
        return True
