"""Exact arithmetic in F_q = F_{p^m}, its extension F_{q^s}, and F_q[x].

An element of F_{q^s} is encoded as a non-negative integer: its coordinate
vector (c_0, ..., c_{k-1}) over F_p in the power basis of the defining modulus
(k = m*s) is stored as c_0 + c_1 p + ... + c_{k-1} p^{k-1}.  The fields used
here are tiny, so every operation is a table lookup; the tables are numpy arrays
so whole coefficient vectors can be combined at once.

F_q is realised inside F_{q^s} through a stored embedding (the image of the
generator of F_q), so F_q elements are simply codes of F_{q^s} fixed by x -> x^q.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FieldError

MAX_FIELD_SIZE = 4096


# ---------------------------------------------------------------------------
# polynomials over F_p as little-endian integer lists


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], mod: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(mod):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: list[int], exp: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, mod, p)
    while exp:
        if exp & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        exp >>= 1
    return result


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def is_irreducible(poly: list[int], p: int) -> bool:
    """Rabin-style test: no factor of degree <= deg/2 divides ``poly``."""
    poly = _trim([c % p for c in poly])
    k = len(poly) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    xp = x
    for _ in range(k // 2):
        xp = _ppowmod(xp, p, poly, p)
        g = _pgcd(poly, _psub(xp, x, p), p)
        if len(g) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k over F_p whose lower coefficients, read as
    a base-p integer (little-endian), are smallest."""
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        poly = low + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldConfig:
    """Defining data for F_q and F_{q^s}; moduli are little-endian over F_p."""

    p: int
    m: int
    s: int
    modulus_q: tuple[int, ...]
    modulus_qs: tuple[int, ...]
    embedding: tuple[int, ...]  # coordinates in F_{q^s} of the generator of F_q

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def degree(self) -> int:
        return self.m * self.s

    @classmethod
    def build(cls, p: int, m: int = 1, s: int = 1) -> "FieldConfig":
        if not is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if m < 1 or s < 1:
            raise FieldError("m and s must be positive")
        if p ** (m * s) > MAX_FIELD_SIZE:
            raise FieldError(f"F_{{{p}^{m * s}}} exceeds the table size limit {MAX_FIELD_SIZE}")
        mod_q = least_irreducible(p, m)
        mod_qs = least_irreducible(p, m * s)
        big = ResidueField._bare(p, mod_qs)
        root = None
        for code in range(big.size):
            if big.poly_eval(mod_q, code) == 0:
                root = code
                break
        if root is None:  # pragma: no cover - impossible for m | m*s
            raise FieldError("modulus of F_q has no root in F_{q^s}")
        emb = tuple(int(c) for c in big.coords(root))
        return cls(p, m, s, mod_q, mod_qs, emb)

    def to_text(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "m": self.m,
                "s": self.s,
                "modulus_q": list(self.modulus_q),
                "modulus_qs": list(self.modulus_qs),
                "embedding": list(self.embedding),
            },
            sort_keys=True,
        )

    @classmethod
    def from_text(cls, text: str) -> "FieldConfig":
        d = json.loads(text)
        cfg = cls(
            d["p"], d["m"], d["s"], tuple(d["modulus_q"]), tuple(d["modulus_qs"]), tuple(d["embedding"])
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not is_prime(self.p):
            raise FieldError("p is not prime")
        if len(self.modulus_q) != self.m + 1 or not is_irreducible(list(self.modulus_q), self.p):
            raise FieldError("modulus_q is not an irreducible polynomial of degree m")
        if len(self.modulus_qs) != self.m * self.s + 1 or not is_irreducible(list(self.modulus_qs), self.p):
            raise FieldError("modulus_qs is not an irreducible polynomial of degree m*s")
        big = ResidueField._bare(self.p, self.modulus_qs)
        gen = big.from_coords(self.embedding)
        if big.poly_eval(self.modulus_q, gen) != 0:
            raise FieldError("embedding does not send the generator of F_q to a root of modulus_q")


class ResidueField:
    """The finite field F_{q^s} with lookup tables on integer codes."""

    def __init__(self, config: FieldConfig):
        config.validate()
        self.config = config
        self.p = config.p
        self.q = config.q
        self.k = config.degree
        self.size = self.p**self.k
        self._build_tables(list(config.modulus_qs))
        self._build_subfield()

    # -- construction -----------------------------------------------------

    @classmethod
    def _bare(cls, p: int, modulus: tuple[int, ...]) -> "ResidueField":
        """Field with tables only (no F_q data); used while building configs."""
        obj = cls.__new__(cls)
        obj.p = p
        obj.k = len(modulus) - 1
        obj.size = p**obj.k
        obj.q = p
        obj._build_tables(list(modulus))
        return obj

    def _build_tables(self, modulus: list[int]) -> None:
        p, k, size = self.p, self.k, self.size
        self.modulus = tuple(modulus)
        powers = p ** np.arange(k, dtype=np.int64)
        codes = np.arange(size, dtype=np.int64)
        self.coord_tab = (codes[:, None] // powers[None, :]) % p
        self._pow_vec = powers
        # reduction matrix: row j holds the coordinates of w^(k+j)
        red = []
        cur = [0] * k + [1]
        for _ in range(max(k - 1, 0)):
            r = _pmod(cur, modulus, p)
            red.append(r + [0] * (k - len(r)))
            cur = [0] + cur
        self._reduce = np.array(red, dtype=np.int64).reshape(max(k - 1, 0), k)
        # addition
        if p == 2:
            self.add_tab = codes[:, None] ^ codes[None, :]
            self.neg_tab = codes.copy()
        else:
            summed = (self.coord_tab[:, None, :] + self.coord_tab[None, :, :]) % p
            self.add_tab = summed @ powers
            self.neg_tab = ((-self.coord_tab) % p) @ powers
        self.sub_tab = self.add_tab[:, self.neg_tab]
        # multiplication through discrete logarithms
        gen = self._find_primitive(modulus)
        order = size - 1
        exp = np.zeros(order, dtype=np.int64)
        log = np.zeros(size, dtype=np.int64)
        cur_code = 1
        for i in range(order):
            exp[i] = cur_code
            log[cur_code] = i
            cur_code = self._slow_mul(cur_code, gen, modulus)
        self._exp, self._log = exp, log
        idx = (log[:, None] + log[None, :]) % order
        mul = exp[idx]
        mul[0, :] = 0
        mul[:, 0] = 0
        self.mul_tab = mul
        inv = np.zeros(size, dtype=np.int64)
        inv[1:] = exp[(-log[1:]) % order]
        self.inv_tab = inv
        self.frob_p = np.array([self.pow(int(c), p) for c in codes], dtype=np.int64)

    def _slow_mul(self, a: int, b: int, modulus: list[int]) -> int:
        ca = [(a // self.p**i) % self.p for i in range(self.k)]
        cb = [(b // self.p**i) % self.p for i in range(self.k)]
        r = _pmod(_pmul(_trim(ca), _trim(cb), self.p), modulus, self.p)
        return sum(c * self.p**i for i, c in enumerate(r))

    def _find_primitive(self, modulus: list[int]) -> int:
        order = self.size - 1
        if order == 1:
            return 1
        factors = _prime_factors(order)
        for g in range(2, self.size):
            ok = True
            for ell in factors:
                x, e, base = 1, order // ell, g
                while e:
                    if e & 1:
                        x = self._slow_mul(x, base, modulus)
                    base = self._slow_mul(base, base, modulus)
                    e >>= 1
                if x == 1:
                    ok = False
                    break
            if ok:
                return g
        raise FieldError("no primitive element found")  # pragma: no cover

    def _build_subfield(self) -> None:
        # Frobenius x -> x^q and its inverse, plus powers of it
        frob = np.arange(self.size, dtype=np.int64)
        for _ in range(self.config.m):
            frob = self.frob_p[frob]
        self.frob_q = frob
        self.ifrob_q = np.argsort(frob)
        self.fq_codes = tuple(int(c) for c in np.flatnonzero(frob == np.arange(self.size)))
        cfg = self.config
        gen = self.from_coords(cfg.embedding)
        self.fq_generator = gen
        # image of each F_q code (coordinates over F_p w.r.t. modulus_q) in F_{q^s}
        self._embed = []
        for code in range(self.q):
            coords = [(code // self.p**i) % self.p for i in range(cfg.m)]
            acc, power = 0, 1
            for c in coords:
                acc = self.add(acc, self.mul(self.from_int(c), power))
                power = self.mul(power, gen)
            self._embed.append(acc)
        if sorted(self._embed) != sorted(self.fq_codes):
            raise FieldError("embedding of F_q does not land in the fixed field of Frobenius")

    # -- scalar operations --------------------------------------------------

    def coords(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coord_tab[a])

    def from_coords(self, coords) -> int:
        return int(sum((int(c) % self.p) * self.p**i for i, c in enumerate(coords)))

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_{q^s}."""
        return n % self.p

    def embed_fq(self, code: int) -> int:
        """Image in F_{q^s} of an F_q element given in its own coordinates."""
        return self._embed[code]

    def add(self, a: int, b: int) -> int:
        return int(self.add_tab[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_tab[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_tab[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_tab[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return int(self.inv_tab[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if n == 0 else 0
        order = self.size - 1
        return int(self._exp[(int(self._log[a]) * n) % order]) if order else 1

    def frob(self, a: int, n: int = 1) -> int:
        """x -> x^(q^n); n may be negative."""
        tab = self.frob_q if n >= 0 else self.ifrob_q
        for _ in range(abs(n) % self.config.s):
            a = int(tab[a])
        return a

    def frob_table(self, n: int) -> np.ndarray:
        tab = np.arange(self.size, dtype=np.int64)
        step = self.frob_q if n >= 0 else self.ifrob_q
        for _ in range(abs(n) % self.config.s):
            tab = step[tab]
        return tab

    def in_fq(self, a: int) -> bool:
        return int(self.frob_q[a]) == a

    def trace_to_fq(self, a: int) -> int:
        acc, cur = 0, a
        for _ in range(self.config.s):
            acc = self.add(acc, cur)
            cur = int(self.frob_q[cur])
        return acc

    def poly_eval(self, poly, x: int) -> int:
        """Evaluate a polynomial with F_p integer coefficients at x."""
        acc = 0
        for c in reversed(list(poly)):
            acc = self.add(self.mul(acc, x), self.from_int(c))
        return acc

    def roots_of_unity_root(self, a: int, n: int) -> list[int]:
        """All y with y^n = a, sorted by code."""
        return [y for y in range(self.size) if self.pow(y, n) == a]

    def format(self, a: int) -> str:
        return str(a)

    # -- vector operations on code arrays -----------------------------------

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return a ^ b
        return self.add_tab[a, b]

    def vsub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return a ^ b
        return self.sub_tab[a, b]

    def vneg(self, a: np.ndarray) -> np.ndarray:
        return a if self.p == 2 else self.neg_tab[a]

    def vscale(self, c: int, a: np.ndarray) -> np.ndarray:
        return self.mul_tab[c][a]

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.mul_tab[a, b]

    def convolve(self, a: np.ndarray, b: np.ndarray, limit: int | None = None) -> np.ndarray:
        """Product of two coefficient sequences (polynomial multiplication).

        Uses Kronecker substitution: coordinates are packed into Python
        integers, multiplied once, and unpacked.  Only the first ``limit``
        coefficients are returned when ``limit`` is given.
        """
        if limit is not None:
            a = a[:limit]
            b = b[:limit]
        na, nb = len(a), len(b)
        if na == 0 or nb == 0:
            return np.zeros(0, dtype=np.int64)
        if na == 1:
            out = self.vscale(int(a[0]), b)
            return out if limit is None else out[:limit]
        if nb == 1:
            out = self.vscale(int(b[0]), a)
            return out if limit is None else out[:limit]
        p, k = self.p, self.k
        width = 2 * k - 1
        bound = min(na, nb) * k * (p - 1) ** 2
        if bound < 1 << 16:
            dt = np.dtype("<u2")
        elif bound < 1 << 32:
            dt = np.dtype("<u4")
        else:
            dt = np.dtype("<u8")
        ca = self.coord_tab[a]
        cb = self.coord_tab[b]
        if width > k:
            pa = np.zeros((na, width), dtype=dt)
            pa[:, :k] = ca
            pb = np.zeros((nb, width), dtype=dt)
            pb[:, :k] = cb
        else:
            pa, pb = ca.astype(dt), cb.astype(dt)
        ia = int.from_bytes(pa.tobytes(), "little")
        ib = int.from_bytes(pb.tobytes(), "little")
        nout = na + nb - 1
        raw = (ia * ib).to_bytes(nout * width * dt.itemsize, "little")
        c = np.frombuffer(raw, dtype=dt).reshape(nout, width).astype(np.int64) % p
        if width > k:
            c = (c[:, :k] + c[:, k:] @ self._reduce) % p
        out = c @ self._pow_vec
        return out if limit is None else out[:limit]


@lru_cache(maxsize=None)
def residue_field(p: int, m: int = 1, s: int = 1) -> ResidueField:
    """Cached F_{q^s} for q = p^m built from the least irreducible moduli."""
    return ResidueField(FieldConfig.build(p, m, s))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FqsElem:
    """A single element of F_{q^s}, mostly for interactive and test use."""

    field: ResidueField
    code: int

    def __add__(self, other: "FqsElem") -> "FqsElem":
        return FqsElem(self.field, self.field.add(self.code, other.code))

    def __sub__(self, other: "FqsElem") -> "FqsElem":
        return FqsElem(self.field, self.field.sub(self.code, other.code))

    def __neg__(self) -> "FqsElem":
        return FqsElem(self.field, self.field.neg(self.code))

    def __mul__(self, other: "FqsElem") -> "FqsElem":
        return FqsElem(self.field, self.field.mul(self.code, other.code))

    def __truediv__(self, other: "FqsElem") -> "FqsElem":
        return FqsElem(self.field, self.field.div(self.code, other.code))

    def __pow__(self, n: int) -> "FqsElem":
        return FqsElem(self.field, self.field.pow(self.code, n))

    def frobenius(self, n: int = 1) -> "FqsElem":
        return FqsElem(self.field, self.field.frob(self.code, n))

    @property
    def coords(self) -> tuple[int, ...]:
        return self.field.coords(self.code)

    def __repr__(self) -> str:
        return f"FqsElem({self.coords})"


def fq_arith(a: FqsElem, b: FqsElem, op: str) -> FqsElem:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        if b.code == 0:
            raise ZeroDivisionError("division by zero in F_{q^s}")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# linear algebra over F_p


def _solve_mod_p(mat: list[list[int]], rhs: list[int], p: int):
    """Solve mat @ x = rhs over F_p.  Returns (particular solution, kernel basis)
    or (None, kernel basis) when inconsistent."""
    rows, cols = len(mat), len(mat[0]) if mat else 0
    aug = [list(r) + [b] for r, b in zip(mat, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] % p), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], p - 2, p)
        aug[r] = [(x * inv) % p for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] % p:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    kernel = []
    for fcol in free:
        vec = [0] * cols
        vec[fcol] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-aug[i][fcol]) % p
        kernel.append(vec)
    for i in range(r, rows):
        if aug[i][cols] % p:
            return None, kernel
    sol = [0] * cols
    for i, pc in enumerate(pivots):
        sol[pc] = aug[i][cols] % p
    return sol, kernel


def residue_artin_schreier(field: ResidueField, a: int, c: int) -> int | None:
    """Solve y^q + a*y = c in F_{q^s}.

    The map y -> y^q + a*y is F_p-linear, so this is a linear system over F_p.
    Among all solutions the one with the smallest integer code is returned;
    ``None`` means there is no root in this residue field.
    """
    k, p = field.k, field.p
    cols = []
    for j in range(k):
        basis = p**j
        img = field.add(int(field.frob_q[basis]), field.mul(a, basis))
        cols.append(field.coords(img))
    mat = [[cols[j][i] for j in range(k)] for i in range(k)]
    sol, kernel = _solve_mod_p(mat, list(field.coords(c)), p)
    if sol is None:
        return None
    best = None
    dim = len(kernel)
    for combo in range(p**dim):
        vec = list(sol)
        for idx, kv in enumerate(kernel):
            coef = (combo // p**idx) % p
            if coef:
                vec = [(x + coef * y) % p for x, y in zip(vec, kv)]
        code = field.from_coords(vec)
        if best is None or code < best:
            best = code
    return best


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoeffPoly:
    """A polynomial over F_q in the variable ``var`` ('theta' or 't').

    Coefficients are F_{q^s} codes lying in F_q, lowest degree first, with
    trailing zeros stripped.
    """

    field: ResidueField
    coeffs: tuple[int, ...]
    var: str = "t"

    def __post_init__(self):
        cs = list(self.coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        for c in cs:
            if not self.field.in_fq(c):
                raise FieldError(f"coefficient {c} is not in F_q")
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "CoeffPoly") -> "CoeffPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        f = self.field
        out = [
            f.add(self.coeffs[i] if i < len(self.coeffs) else 0, other.coeffs[i] if i < len(other.coeffs) else 0)
            for i in range(n)
        ]
        return CoeffPoly(f, tuple(out), self.var)

    def __neg__(self) -> "CoeffPoly":
        return CoeffPoly(self.field, tuple(self.field.neg(c) for c in self.coeffs), self.var)

    def __sub__(self, other: "CoeffPoly") -> "CoeffPoly":
        return self + (-other)

    def __mul__(self, other: "CoeffPoly") -> "CoeffPoly":
        f = self.field
        if self.is_zero() or other.is_zero():
            return CoeffPoly(f, (), self.var)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = f.add(out[i + j], f.mul(x, y))
        return CoeffPoly(f, tuple(out), self.var)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            coef = "" if (c == 1 and i > 0) else str(c)
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            terms.append(f"{coef}{'*' if coef and mono else ''}{mono}")
        return " + ".join(reversed(terms))

    def to_text(self) -> str:
        return json.dumps({"var": self.var, "coeffs": list(self.coeffs)})
