"""Truncated Laurent series over F_{q^s}: the working field W = F_{q^s}((u)).

W stands in for the completion of F_q(theta) at infinity (and for finite
extensions of it).  By default theta = u^(-e); a more general Laurent
polynomial in u with leading term u^(-e) may be supplied to model ramified
extensions in which theta is no longer a pure power of the uniformizer.

A :class:`WElem` is stored as a valuation ``v``, a numpy array of residue-field
codes for u^v, u^(v+1), ..., and an absolute precision ``prec``: the element is
known modulo u^prec.  ``prec=None`` marks an exact element (a Laurent
polynomial).  Digits between the stored coefficients and ``prec`` are known to
be zero.  Norms are normalised by |theta| = q, so ord(x) = v(x)/e.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import Iterable

import numpy as np

from .base_arith import ResidueField, residue_field
from .errors import (
    NotAPowerError,
    PrecisionError,
    RamificationError,
    ResidueTooSmallError,
)

DEFAULT_PREC = 200

_EMPTY = np.zeros(0, dtype=np.int64)


def _min_prec(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_prec(a: int | None, shift: int) -> int | None:
    return None if a is None else a + shift


# Fields in which the Carlitz Artin-Schreier steps for theta^3 have integral
# slopes and solvable residue equations: (p, m, s, e, theta expansion).
FIELD_PRESETS: dict[str, tuple] = {
    "q2": (2, 1, 1, 1, None),
    "q2-wide": (2, 1, 2, 2, {-2: 1, -1: 1}),
    "q3": (3, 1, 2, 2, None),
    "q3-wide": (3, 1, 3, 6, {-6: 2, -4: 2, -2: 2}),
}


class WorkingField:
    """F_{q^s}((u)) together with the chosen expansion of theta."""

    def __init__(
        self,
        field: ResidueField,
        e: int = 1,
        theta_terms: dict[int, int] | None = None,
        default_prec: int | None = None,
    ):
        if e < 1:
            raise RamificationError("ramification index e must be positive")
        self.F = field
        self.e = e
        self.p = field.p
        self.q = field.q
        # u-digits; scaled with e so that a fixed theta-precision stays affordable
        self.default_prec = default_prec if default_prec is not None else max(DEFAULT_PREC, 100 * e)
        if theta_terms is None:
            theta_terms = {-e: 1}
        lead = min(exp for exp, c in theta_terms.items() if c)
        if lead != -e:
            raise RamificationError(f"theta must have u-valuation {-e}, got {lead}")
        self.theta_terms = {int(k): int(c) for k, c in sorted(theta_terms.items()) if c}
        self.theta = self.from_terms(self.theta_terms)
        self._theta_pow: dict[int, WElem] = {0: self.one(), 1: self.theta}

    @classmethod
    def build(cls, p: int, m: int = 1, s: int = 1, e: int = 1, **kw) -> "WorkingField":
        return cls(residue_field(p, m, s), e, **kw)

    @classmethod
    def preset(cls, name: str, **kw) -> "WorkingField":
        try:
            p, m, s, e, terms = FIELD_PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown field preset {name!r}; known: {sorted(FIELD_PRESETS)}") from None
        return cls.build(p, m, s, e, theta_terms=dict(terms) if terms else None, **kw)

    @property
    def theta_is_monomial(self) -> bool:
        return len(self.theta_terms) == 1 and self.theta_terms[-self.e] == 1

    def header(self) -> dict:
        cfg = self.F.config
        return {
            "p": cfg.p,
            "m": cfg.m,
            "s": cfg.s,
            "e": self.e,
            "modulus_qs": list(cfg.modulus_qs),
            "theta": {str(k): self.F.coords(c) for k, c in self.theta_terms.items()},
        }

    def __repr__(self) -> str:
        cfg = self.F.config
        return f"WorkingField(p={cfg.p}, m={cfg.m}, s={cfg.s}, e={self.e})"

    # -- constructors --------------------------------------------------------

    def zero(self, prec: int | None = None) -> "WElem":
        return WElem(self, prec if prec is not None else 0, _EMPTY, prec)

    def one(self) -> "WElem":
        return WElem(self, 0, np.array([1], dtype=np.int64), None)

    def const(self, code: int) -> "WElem":
        return WElem.make(self, 0, np.array([code], dtype=np.int64), None)

    def integer(self, n: int) -> "WElem":
        return self.const(self.F.from_int(n))

    def u(self, k: int = 1) -> "WElem":
        return WElem(self, k, np.array([1], dtype=np.int64), None)

    def from_terms(self, terms: dict[int, int], prec: int | None = None) -> "WElem":
        """Element sum code * u^exp from a {exp: code} mapping."""
        terms = {k: c for k, c in terms.items() if c and (prec is None or k < prec)}
        if not terms:
            return self.zero(prec)
        lo, hi = min(terms), max(terms)
        arr = np.zeros(hi - lo + 1, dtype=np.int64)
        for k, c in terms.items():
            arr[k - lo] = c
        return WElem.make(self, lo, arr, prec)

    def theta_power(self, k: int, rel_prec: int | None = None) -> "WElem":
        """theta^k; exact for k >= 0 (or for a monomial theta)."""
        if k in self._theta_pow and (k >= 0 or self.theta_is_monomial):
            return self._theta_pow[k]
        if self.theta_is_monomial:
            val = self.u(-self.e * k)
        elif k > 0:
            val = self.theta_power(k - 1) * self.theta
        else:
            val = self.theta_power(-k).inverse(rel_prec)
            return val
        self._theta_pow[k] = val
        return val

    def from_theta_poly(self, coeffs: Iterable[int], low: int = 0, rel_prec: int | None = None) -> "WElem":
        """sum_j coeffs[j] * theta^(low + j) with residue-field codes as coefficients."""
        acc = self.zero()
        for j, c in enumerate(coeffs):
            if c:
                acc = acc + self.theta_power(low + j, rel_prec).scale(c)
        return acc

    def parse(self, text: str, rel_prec: int | None = None) -> "WElem":
        """Parse an arithmetic expression in theta (or θ), u and the residue
        generator g, e.g. ``theta^3 + 1/theta``.  Integers map to F_p."""
        return _ExprEval(self, rel_prec).run(text)

    # -- k_infinity digits ---------------------------------------------------

    def theta_digits(self, x: "WElem", stop: int) -> tuple[dict[int, int], "WElem", bool]:
        """Greedy theta-adic expansion of x down to u-valuation ``stop``.

        Returns ({j: c_j}, remainder, ok) with x = sum c_j theta^j + remainder
        and remainder of valuation >= stop when ok is True.  ok is False when a
        leading exponent is not a multiple of e (x is not in F_{q^s}((1/theta))
        at that digit).
        """
        digits: dict[int, int] = {}
        rem = x
        lead_theta = int(self.theta.c[0])
        guard = 0
        while not rem.is_zero() and rem.v < stop:
            guard += 1
            if guard > 100000:  # pragma: no cover - defensive
                raise PrecisionError("theta-adic expansion did not terminate")
            if rem.v % self.e:
                return digits, rem, False
            j = -rem.v // self.e
            coef = self.F.div(int(rem.c[0]), self.F.pow(lead_theta, j))
            digits[j] = coef
            rem = rem - self.theta_power(j, max(stop - rem.v, 1) + self.e).scale(coef)
        return digits, rem, True


class WElem:
    """Element of W known modulo u^prec (prec None means exact)."""

    __slots__ = ("W", "v", "c", "prec")

    def __init__(self, W: WorkingField, v: int, c: np.ndarray, prec: int | None):
        self.W = W
        self.v = v
        self.c = c
        self.prec = prec

    @staticmethod
    def make(W: WorkingField, v: int, c: np.ndarray, prec: int | None) -> "WElem":
        """Normalise: drop leading/trailing zeros and digits beyond prec."""
        if prec is not None and v + len(c) > prec:
            c = c[: max(prec - v, 0)]
        nz = np.flatnonzero(c)
        if len(nz) == 0:
            return WElem(W, prec if prec is not None else 0, _EMPTY, prec)
        first, last = int(nz[0]), int(nz[-1])
        return WElem(W, v + first, c[first : last + 1], prec)

    # -- inspection ------------------------------------------------------------

    def is_zero(self) -> bool:
        """True when no known digit is nonzero (apparent zero)."""
        return len(self.c) == 0

    def is_exact(self) -> bool:
        return self.prec is None

    @property
    def rel_prec(self) -> int | None:
        if self.prec is None:
            return None
        return self.prec - self.v

    def ord(self) -> Fraction:
        if self.is_zero():
            raise PrecisionError("valuation of an apparent zero is indeterminate")
        return Fraction(self.v, self.W.e)

    def ord_lower_bound(self) -> Fraction | None:
        """ord if known, else the bound implied by the precision; None for exact 0."""
        if not self.is_zero():
            return Fraction(self.v, self.W.e)
        if self.prec is None:
            return None
        return Fraction(self.prec, self.W.e)

    def lead(self) -> int:
        if self.is_zero():
            raise PrecisionError("leading coefficient of an apparent zero")
        return int(self.c[0])

    def coeff(self, k: int) -> int:
        if self.prec is not None and k >= self.prec:
            raise PrecisionError(f"digit u^{k} is beyond the precision u^{self.prec}")
        idx = k - self.v
        if 0 <= idx < len(self.c):
            return int(self.c[idx])
        return 0

    def terms(self) -> dict[int, int]:
        return {self.v + i: int(x) for i, x in enumerate(self.c) if x}

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "WElem":
        if isinstance(other, WElem):
            return other
        if isinstance(other, int):
            return self.W.integer(other)
        return NotImplemented

    def __add__(self, other) -> "WElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _combine(self, other, subtract=False)

    __radd__ = __add__

    def __sub__(self, other) -> "WElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _combine(self, other, subtract=True)

    def __rsub__(self, other) -> "WElem":
        return self._coerce(other) - self

    def __neg__(self) -> "WElem":
        return WElem(self.W, self.v, self.W.F.vneg(self.c), self.prec)

    def __mul__(self, other) -> "WElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        W = a.W
        if (a.is_zero() and a.prec is None) or (b.is_zero() and b.prec is None):
            return W.zero()
        prec = _min_prec(_add_prec(a.prec, b.v), _add_prec(b.prec, a.v))
        v = a.v + b.v
        if a.is_zero() or b.is_zero():
            return W.zero(prec)
        limit = None if prec is None else prec - v
        if limit is not None and limit <= 0:
            return W.zero(prec)
        c = W.F.convolve(a.c, b.c, limit)
        return WElem.make(W, v, c, prec)

    __rmul__ = __mul__

    def scale(self, code: int) -> "WElem":
        """Multiply by a residue-field constant."""
        if code == 0:
            return self.W.zero(self.prec) if self.prec is not None else self.W.zero()
        return WElem(self.W, self.v, self.W.F.vscale(code, self.c), self.prec)

    def shift(self, k: int) -> "WElem":
        """Multiply by u^k."""
        return WElem(self.W, self.v + k, self.c, _add_prec(self.prec, k))

    def inverse(self, rel_prec: int | None = None) -> "WElem":
        if self.is_zero():
            raise PrecisionError("division by an apparent zero")
        W = self.W
        if self.prec is None and len(self.c) == 1:
            return WElem(W, -self.v, np.array([W.F.inv(int(self.c[0]))], dtype=np.int64), None)
        n = self.rel_prec if self.prec is not None else None
        cap = rel_prec if rel_prec is not None else W.default_prec
        n = cap if n is None else min(n, cap)
        inv = _series_inverse(W.F, self.c, n)
        return WElem.make(W, -self.v, inv, -self.v + n)

    def __truediv__(self, other) -> "WElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise PrecisionError("division by an apparent zero")
        rel = self.rel_prec
        if rel is None:
            rel = self.W.default_prec
        return self * other.inverse(max(rel, 1))

    def div(self, other: "WElem", rel_prec: int) -> "WElem":
        return self * other.inverse(rel_prec)

    def __pow__(self, n: int) -> "WElem":
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self.W.one()
        q = self.W.q
        k, m = 0, n
        while m % q == 0:
            m //= q
            k += 1
        base = self.twist(k) if k else self
        result = None
        while m:
            if m & 1:
                result = base if result is None else result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def twist(self, n: int, cap: int | None = None) -> "WElem":
        """Frobenius twist a -> a^(q^n); for n < 0 the unique q^|n|-th root.

        ``cap`` optionally limits the absolute precision of the result, which
        keeps large positive twists of inexact elements affordable.
        """
        W = self.W
        if n == 0:
            return self if cap is None else self.truncate(cap)
        Q = W.q ** abs(n)
        tab = W.F.frob_table(n)
        if n > 0:
            prec = None if self.prec is None else self.prec * Q
            prec = _min_prec(prec, cap)
            if self.is_zero():
                return W.zero(prec) if prec is not None else W.zero()
            v = self.v * Q
            count = len(self.c)
            if prec is not None:
                count = min(count, -(-(prec - v) // Q)) if prec > v else 0
            if count <= 0:
                return W.zero(prec)
            out = np.zeros((count - 1) * Q + 1, dtype=np.int64)
            out[::Q] = tab[self.c[:count]]
            return WElem.make(W, v, out, prec)
        # negative twist
        if self.prec is None:
            prec = None
        else:
            prec = -((-self.prec) // Q)  # ceil(prec / Q)
        prec = _min_prec(prec, cap)
        if self.is_zero():
            return W.zero(prec) if prec is not None else W.zero()
        idx = np.flatnonzero(self.c) + self.v
        bad = idx[idx % Q != 0]
        if len(bad):
            raise NotAPowerError(
                f"element is not a q^{abs(n)}-th power: digit at u^{int(bad[0])} is not divisible by {Q}"
            )
        v = self.v // Q
        out = tab[self.c[::Q]]
        return WElem.make(W, v, out, prec)

    def truncate(self, prec: int) -> "WElem":
        new = prec if self.prec is None else min(prec, self.prec)
        return WElem.make(self.W, self.v, self.c, new)

    def with_prec(self, prec: int | None) -> "WElem":
        """Reinterpret the digits with a different precision claim (used for
        exact inputs whose digits are all known)."""
        return WElem.make(self.W, self.v, self.c, prec)

    def agrees_with(self, other: "WElem") -> bool:
        return (self - other).is_zero()

    def same_as(self, other: "WElem") -> bool:
        return (
            self.v == other.v
            and self.prec == other.prec
            and len(self.c) == len(other.c)
            and bool(np.array_equal(self.c, other.c))
        )

    def residue_rational(self) -> bool:
        """All known digits lie in F_q."""
        F = self.W.F
        return bool(np.all(F.frob_q[self.c] == self.c))

    # -- serialisation -----------------------------------------------------------

    def to_dict(self) -> dict:
        F = self.W.F
        return {
            "v": self.v,
            "prec": self.prec,
            "coeffs": [list(F.coords(int(x))) for x in self.c],
        }

    @classmethod
    def from_dict(cls, W: WorkingField, d: dict) -> "WElem":
        F = W.F
        codes = np.array([F.from_coords(cs) for cs in d["coeffs"]], dtype=np.int64)
        return cls.make(W, int(d["v"]), codes, d["prec"])

    def __repr__(self) -> str:
        parts = []
        shown = 0
        for i, x in enumerate(self.c):
            if x:
                parts.append(f"{int(x)}*u^{self.v + i}")
                shown += 1
                if shown >= 6:
                    parts.append("...")
                    break
        body = " + ".join(parts) if parts else "0"
        tail = "" if self.prec is None else f" + O(u^{self.prec})"
        return f"<{body}{tail}>"


def _combine(a: WElem, b: WElem, subtract: bool) -> WElem:
    W = a.W
    F = W.F
    prec = _min_prec(a.prec, b.prec)
    if b.is_zero():
        return a.truncate(prec) if prec is not None else a
    if a.is_zero():
        nb = -b if subtract else b
        return nb.truncate(prec) if prec is not None else nb
    v = min(a.v, b.v)
    end = max(a.v + len(a.c), b.v + len(b.c))
    if prec is not None:
        end = min(end, prec)
    if end <= v:
        return W.zero(prec)
    out = np.zeros(end - v, dtype=np.int64)
    la = max(0, min(len(a.c), end - a.v))
    out[a.v - v : a.v - v + la] = a.c[:la]
    lb = max(0, min(len(b.c), end - b.v))
    sl = slice(b.v - v, b.v - v + lb)
    if subtract:
        out[sl] = F.vsub(out[sl], b.c[:lb])
    else:
        out[sl] = F.vadd(out[sl], b.c[:lb])
    return WElem.make(W, v, out, prec)


def _series_inverse(F: ResidueField, c: np.ndarray, n: int) -> np.ndarray:
    """First n coefficients of 1/(c_0 + c_1 u + ...) by Newton iteration."""
    y = np.array([F.inv(int(c[0]))], dtype=np.int64)
    two = F.from_int(2)
    length = 1
    while length < n:
        length = min(2 * length, n)
        prod = F.convolve(c[:length], y, limit=length)
        t = np.zeros(length, dtype=np.int64)
        t[: len(prod)] = F.vneg(prod)
        t[0] = F.add(int(t[0]), two)
        y = F.convolve(y, t, limit=length)
    if len(y) < n:
        y = np.concatenate([y, np.zeros(n - len(y), dtype=np.int64)])
    return y


# ---------------------------------------------------------------------------


def w_arith(a: WElem, b: WElem, op: str) -> WElem:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def frobenius_twist(a: WElem, n: int, cap: int | None = None) -> WElem:
    return a.twist(n, cap)


def ord_and_norm(a: WElem) -> tuple[Fraction, "Norm"]:
    """(ord_inf(a), |a|) with |theta| = q."""
    o = a.ord()
    return o, Norm(a.W.q, -o)


class Norm:
    """The real number q^log_q, kept exactly as a rational exponent.

    ``log_q`` None encodes the value 0.  ``bound`` marks an upper bound
    (apparent zeros) and ``lower`` a lower bound (truncated series).
    """

    __slots__ = ("q", "log_q", "bound", "lower")

    def __init__(self, q: int, log_q: Fraction | None, bound: bool = False, lower: bool = False):
        self.q = q
        self.log_q = log_q
        self.bound = bound
        self.lower = lower

    @classmethod
    def of(cls, x: WElem) -> "Norm":
        lb = x.ord_lower_bound()
        if lb is None:
            return cls(x.W.q, None)
        return cls(x.W.q, -lb, bound=x.is_zero())

    def __float__(self) -> float:
        return 0.0 if self.log_q is None else float(self.q) ** float(self.log_q)

    def at_most_exponent(self, k) -> bool:
        """Is the value <= q^k?"""
        return self.log_q is None or self.log_q <= k

    def __lt__(self, other: "Norm") -> bool:
        if self.log_q is None:
            return other.log_q is not None
        if other.log_q is None:
            return False
        return self.log_q < other.log_q

    def __eq__(self, other) -> bool:
        return isinstance(other, Norm) and self.log_q == other.log_q and self.q == other.q

    def __hash__(self):
        return hash((self.q, self.log_q))

    def __str__(self) -> str:
        if self.log_q is None:
            return "0"
        prefix = "<= " if self.bound else (">= " if self.lower else "")
        return f"{prefix}q^({self.log_q})"

    __repr__ = __str__

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "log_q": None if self.log_q is None else str(self.log_q),
            "upper_bound": self.bound,
            "lower_bound": self.lower,
        }


def root_q_minus_1(a: WElem, policy="least", rel_prec: int | None = None) -> WElem:
    """y with y^(q-1) = a.

    The residue root is the one with the smallest code (the only rule either
    branch policy needs here); the rest of the expansion is a Hensel lift,
    which is unique because q-1 is prime to p.
    """
    W = a.W
    n = W.q - 1
    if n == 1:
        return a
    if a.is_zero():
        raise PrecisionError("root of an apparent zero")
    if a.v % n:
        raise RamificationError(f"u-valuation {a.v} is not divisible by q-1={n}; enlarge e")
    F = W.F
    roots = F.roots_of_unity_root(a.lead(), n)
    if not roots:
        raise ResidueTooSmallError(f"residue {a.lead()} has no (q-1)-st root in F_(q^s); enlarge s")
    y0 = roots[0]
    rel = a.rel_prec
    if rel is None:
        rel = rel_prec if rel_prec is not None else W.default_prec
    # b = a / (y0^n u^v) = 1 + O(u); solve z^n = b by Newton iteration
    b = a.shift(-a.v).scale(F.inv(F.pow(y0, n)))
    if len(b.c) == 1:
        z = W.one() if b.prec is None else W.one().truncate(b.prec)
    else:
        b = b.truncate(rel)
        z = W.one().truncate(rel)
        inv_n = W.integer(n).inverse()
        for _ in range(64):
            zn1 = z ** (n - 1)
            step = (b - zn1 * z) * (zn1.inverse(rel) * inv_n)
            z = z + step
            if step.is_zero():
                break
    return z.shift(a.v // n).scale(y0)


# ---------------------------------------------------------------------------


class _ExprEval:
    names_theta = ("theta", "θ", "T")

    def __init__(self, W: WorkingField, rel_prec: int | None):
        self.W = W
        self.rel = rel_prec

    def run(self, text: str) -> WElem:
        text = text.replace("^", "**").replace("θ", "theta")
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise ValueError(f"cannot parse expression {text!r}: {exc.msg}") from None
        return self._eval(tree.body)

    def _int(self, node) -> int:
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -self._int(node.operand)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
            return self._int(node.operand)
        raise ValueError("exponents must be integer literals")

    def _eval(self, node) -> WElem:
        W = self.W
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return W.integer(node.value)
        if isinstance(node, ast.Name):
            if node.id in self.names_theta:
                return W.theta
            if node.id == "u":
                return W.u()
            if node.id == "g":
                return W.const(W.F.p if W.F.k > 1 else W.F.from_int(1))
            raise ValueError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp):
            val = self._eval(node.operand)
            if isinstance(node.op, ast.USub):
                return -val
            if isinstance(node.op, ast.UAdd):
                return val
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = self._eval(node.left)
                k = self._int(node.right)
                if k < 0:
                    return base.inverse(self.rel) ** (-k)
                return base**k
            left, right = self._eval(node.left), self._eval(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                rel = self.rel if self.rel is not None else W.default_prec
                return left * right.inverse(rel)
        raise ValueError(f"unsupported expression element {ast.dump(node)[:40]}")
