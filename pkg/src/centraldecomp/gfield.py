"""Finite fields GF(p^e) as F_p[x]/(f), polynomial factorization and Frobenius data."""
from __future__ import annotations

import math
import random
from functools import cached_property, total_ordering
from typing import Iterable, Sequence

import numpy as np

from .zlinalg import fp_left_kernel, fp_solve_left

RANDOMIZED = "randomized"
DETERMINISTIC = "deterministic"


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


@total_ordering
class FpPoly:
    """Polynomial over F_p with little-endian coefficients."""

    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs: Iterable[int]):
        self.p = p
        self.c: tuple[int, ...] = tuple(_trim([int(a) % p for a in coeffs]))

    @classmethod
    def x(cls, p: int) -> "FpPoly":
        return cls(p, [0, 1])

    @classmethod
    def const(cls, p: int, a: int) -> "FpPoly":
        return cls(p, [a])

    def __repr__(self) -> str:
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if not a:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(a))
            else:
                terms.append(mono if a == 1 else f"{a}*{mono}")
        return " + ".join(terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, FpPoly) and self.p == other.p and self.c == other.c

    def __lt__(self, other: "FpPoly") -> bool:
        return (self.degree, self.c[::-1]) < (other.degree, other.c[::-1])

    def __hash__(self) -> int:
        return hash((self.p, self.c))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    @property
    def lead(self) -> int:
        return self.c[-1] if self.c else 0

    def __add__(self, o: "FpPoly") -> "FpPoly":
        n = max(len(self.c), len(o.c))
        a = self.c + (0,) * (n - len(self.c))
        b = o.c + (0,) * (n - len(o.c))
        return FpPoly(self.p, [x + y for x, y in zip(a, b)])

    def __neg__(self) -> "FpPoly":
        return FpPoly(self.p, [-x for x in self.c])

    def __sub__(self, o: "FpPoly") -> "FpPoly":
        return self + (-o)

    def __mul__(self, o) -> "FpPoly":
        if isinstance(o, int):
            return FpPoly(self.p, [o * x for x in self.c])
        if not self.c or not o.c:
            return FpPoly(self.p, [])
        out = [0] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    out[i + j] += a * b
        return FpPoly(self.p, out)

    __rmul__ = __mul__

    def __divmod__(self, o: "FpPoly") -> tuple["FpPoly", "FpPoly"]:
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.c)
        inv = pow(o.lead, -1, p)
        dq = len(r) - len(o.c)
        if dq < 0:
            return FpPoly(p, []), self
        q = [0] * (dq + 1)
        for k in range(dq, -1, -1):
            a = (r[k + len(o.c) - 1] * inv) % p
            q[k] = a
            if a:
                for j, b in enumerate(o.c):
                    r[k + j] = (r[k + j] - a * b) % p
        return FpPoly(p, q), FpPoly(p, r)

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def __mod__(self, o):
        return divmod(self, o)[1]

    def monic(self) -> "FpPoly":
        if not self.c:
            return self
        return self * pow(self.lead, -1, self.p)

    def derivative(self) -> "FpPoly":
        return FpPoly(self.p, [i * a for i, a in enumerate(self.c)][1:])

    def pow_mod(self, n: int, m: "FpPoly") -> "FpPoly":
        out = FpPoly(self.p, [1]) % m
        b = self % m
        while n:
            if n & 1:
                out = (out * b) % m
            b = (b * b) % m
            n >>= 1
        return out

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.c):
            acc = (acc * x + a) % self.p
        return acc


def poly_gcd(a: FpPoly, b: FpPoly) -> FpPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: FpPoly, b: FpPoly) -> tuple[FpPoly, FpPoly, FpPoly]:
    """Return (g, s, t) with ``s a + t b = g`` monic."""
    p = a.p
    r0, r1 = a, b
    s0, s1 = FpPoly(p, [1]), FpPoly(p, [])
    t0, t1 = FpPoly(p, []), FpPoly(p, [1])
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    u = pow(r0.lead, -1, p)
    return r0 * u, s0 * u, t0 * u


def _pth_root(f: FpPoly) -> FpPoly:
    # coefficients of g(x^p); a^(1/p) = a in F_p
    return FpPoly(f.p, f.c[:: f.p])


def squarefree_decomposition(f: FpPoly) -> list[tuple[FpPoly, int]]:
    """Pairs (g, m) with ``f = lead * prod g^m`` and each g squarefree monic."""
    p = f.p
    f = f.monic()
    if f.degree <= 0:
        return []
    out: dict[FpPoly, int] = {}
    d = f.derivative()
    if d.is_zero():
        for g, m in squarefree_decomposition(_pth_root(f)):
            out[g] = out.get(g, 0) + m * p
        return sorted(out.items())
    c = poly_gcd(f, d)
    w = f // c
    i = 1
    while w.degree > 0:
        y = poly_gcd(w, c)
        z = w // y
        if z.degree > 0:
            out[z] = out.get(z, 0) + i
        i += 1
        w = y
        c = c // y
    if c.degree > 0:
        for g, m in squarefree_decomposition(_pth_root(c)):
            out[g] = out.get(g, 0) + m * p
    return sorted(out.items())


def distinct_degree(f: FpPoly) -> list[tuple[FpPoly, int]]:
    """Split a squarefree monic f into products of equal-degree irreducibles."""
    p = f.p
    x = FpPoly.x(p)
    out = []
    h = x % f if f.degree > 0 else x
    d = 0
    g = f
    while g.degree >= 2 * (d + 1):
        d += 1
        h = h.pow_mod(p, g)
        q = poly_gcd(h - x, g)
        if q.degree > 0:
            out.append((q, d))
            g = g // q
            h = h % g
    if g.degree > 0:
        out.append((g, g.degree))
    return out


def _equal_degree_random(f: FpPoly, d: int, rng: random.Random) -> list[FpPoly]:
    p = f.p
    if f.degree == d:
        return [f]
    while True:
        a = FpPoly(p, [rng.randrange(p) for _ in range(f.degree)])
        if a.degree <= 0:
            continue
        if p == 2:
            t = a % f
            acc = t
            for _ in range(d - 1):
                t = (t * t) % f
                acc = acc + t
            b = acc
        else:
            b = a.pow_mod((p**d - 1) // 2, f) - FpPoly(p, [1])
        g = poly_gcd(b, f)
        if 0 < g.degree < f.degree:
            return _equal_degree_random(g, d, rng) + _equal_degree_random(f // g, d, rng)


def berlekamp_basis(f: FpPoly) -> np.ndarray:
    """Basis (rows, coefficient vectors) of ``{g : g^p = g mod f}``."""
    p, n = f.p, f.degree
    x = FpPoly.x(p)
    Q = np.zeros((n, n), dtype=np.int64)
    xp = x.pow_mod(p, f)
    cur = FpPoly(p, [1])
    for i in range(n):
        for j, a in enumerate(cur.c):
            Q[i, j] = a
        cur = (cur * xp) % f
    return fp_left_kernel((Q - np.eye(n, dtype=np.int64)) % p, p)


def _berlekamp_split(f: FpPoly) -> list[FpPoly]:
    p = f.p
    B = berlekamp_basis(f)
    k = B.shape[0]
    factors = [f]
    if k == 1:
        return factors
    for row in B:
        v = FpPoly(p, row.tolist())
        if v.degree <= 0:
            continue
        nxt = []
        for g in factors:
            if g.degree == 1:
                nxt.append(g)
                continue
            rest = g
            for s in range(p):
                h = poly_gcd(rest, v - FpPoly(p, [s]))
                if 0 < h.degree:
                    nxt.append(h)
                    rest = rest // h
                    if rest.degree == 0:
                        break
            if rest.degree > 0:
                nxt.append(rest)
        factors = nxt
        if len(factors) == k:
            break
    return factors


def factor_poly(f: FpPoly, mode: str = RANDOMIZED, rng: random.Random | None = None) -> list[FpPoly]:
    """Monic irreducible factors of ``f`` with multiplicity, sorted."""
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if rng is None:
        rng = random.Random(0)
    out = []
    for g, m in squarefree_decomposition(f):
        if mode == DETERMINISTIC:
            parts = _berlekamp_split(g)
        else:
            parts = []
            for h, d in distinct_degree(g):
                parts += _equal_degree_random(h, d, rng)
        out += [h.monic() for h in parts] * m
    return sorted(out)


def is_irreducible(f: FpPoly) -> bool:
    """Rabin's test."""
    p, n = f.p, f.degree
    if n <= 0:
        return False
    if n == 1:
        return True
    f = f.monic()
    x = FpPoly.x(p)
    if (x.pow_mod(p**n, f) - x) % f != FpPoly(p, []):
        return False
    for r in _prime_divisors(n):
        if poly_gcd(x.pow_mod(p ** (n // r), f) - x, f).degree > 0:
            return False
    return True


def _prime_divisors(n: int) -> list[int]:
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


class Field:
    """GF(p^e) = F_p[x]/(f); elements are coefficient tuples of length e."""

    def __init__(self, p: int, modulus: FpPoly, check: bool = True):
        if check and not is_irreducible(modulus):
            raise ValueError(f"{modulus} is not irreducible over F_{p}")
        self.p = p
        self.modulus = modulus.monic()
        self.e = self.modulus.degree
        self.order = p**self.e

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e}) mod ({self.modulus})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash(self.modulus)

    def _from_poly(self, g: FpPoly) -> tuple[int, ...]:
        g = g % self.modulus
        return tuple(g.c) + (0,) * (self.e - len(g.c))

    def _to_poly(self, a: Sequence[int]) -> FpPoly:
        return FpPoly(self.p, a)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.e

    @property
    def one(self) -> tuple[int, ...]:
        return self.scalar(1)

    def scalar(self, a: int) -> tuple[int, ...]:
        return self._from_poly(FpPoly(self.p, [a]))

    @cached_property
    def gen(self) -> tuple[int, ...]:
        return self._from_poly(FpPoly.x(self.p))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        if self.e == 1:
            return ((a[0] * b[0]) % self.p,)
        return self._from_poly(self._to_poly(a) * self._to_poly(b))

    def smul(self, c: int, a):
        return tuple((c * x) % self.p for x in a)

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        out = self.one
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        if self.e == 1:
            return (pow(a[0], -1, self.p),)
        g, s, _ = poly_xgcd(self._to_poly(a), self.modulus)
        return self._from_poly(s)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return not any(a)

    def frobenius(self, a, k: int = 1):
        return self.pow(a, self.p ** (k % self.e))

    def elements(self):
        """All elements in lexicographic order of coefficient tuples (high degree first)."""
        import itertools

        for t in itertools.product(range(self.p), repeat=self.e):
            yield tuple(reversed(t))

    def random(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.e))

    def mult_matrix(self, a) -> np.ndarray:
        """F_p matrix of ``x -> x a`` on the power basis (rows = images)."""
        rows = []
        for i in range(self.e):
            b = [0] * self.e
            b[i] = 1
            rows.append(self.mul(tuple(b), a))
        return np.array(rows, dtype=np.int64)

    def __contains__(self, a) -> bool:
        return isinstance(a, tuple) and len(a) == self.e and all(0 <= x < self.p for x in a)


def build_field(p: int, e: int, mode: str = DETERMINISTIC, rng: random.Random | None = None) -> Field:
    """GF(p^e) with the lexicographically least monic irreducible of degree e.

    Irreducibility is certified with :func:`factor_poly` in the requested mode.
    """
    for n in range(p**e):
        coeffs = [(n // p**i) % p for i in range(e)] + [1]
        f = FpPoly(p, coeffs)
        if is_irreducible(f) and factor_poly(f, mode, rng) == [f]:
            return Field(p, f, check=False)
    raise AssertionError("no irreducible polynomial found")


class FieldAut:
    """The automorphism ``a -> a^(p^k)`` of a Field."""

    def __init__(self, field: Field, k: int):
        self.field = field
        self.k = k % field.e

    def __repr__(self) -> str:
        return f"FieldAut(k={self.k} on {self.field})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldAut) and (self.field, self.k) == (other.field, other.k)

    def __hash__(self) -> int:
        return hash((self.field, self.k))

    def __call__(self, a):
        return self.field.frobenius(a, self.k) if self.k else a

    @property
    def order(self) -> int:
        return self.field.e // math.gcd(self.k, self.field.e) if self.k else 1

    def is_identity(self) -> bool:
        return self.k == 0

    def compose(self, other: "FieldAut") -> "FieldAut":
        return FieldAut(self.field, self.k + other.k)

    def inverse(self) -> "FieldAut":
        return FieldAut(self.field, -self.k)

    @classmethod
    def identify(cls, field: Field, image_of_gen) -> "FieldAut":
        """The automorphism sending the generator to ``image_of_gen``."""
        for k in range(field.e):
            if field.frobenius(field.gen, k) == tuple(image_of_gen):
                return cls(field, k)
        raise ValueError("image is not a Galois conjugate of the generator")


class SubfieldEmbedding:
    """A subfield ``sub`` of ``parent`` given by the image of its generator."""

    def __init__(self, sub: Field, parent: Field, root):
        self.sub = sub
        self.parent = parent
        self.root = tuple(root)
        self._powers = [parent.pow(self.root, i) for i in range(sub.e)]

    def __call__(self, a):
        out = self.parent.zero
        for c, r in zip(a, self._powers):
            if c:
                out = self.parent.add(out, self.parent.smul(c, r))
        return out


def fixed_subfield(sigma: FieldAut) -> SubfieldEmbedding:
    """The fixed field of ``sigma`` (order ``p^gcd(k, e)``) embedded in its field."""
    K = sigma.field
    g = math.gcd(sigma.k, K.e) if sigma.k else K.e
    L = build_field(K.p, g)
    rows = []
    for i in range(K.e):
        b = [0] * K.e
        b[i] = 1
        img = sigma(tuple(b))
        rows.append([(x - y) % K.p for x, y in zip(img, b)])
    basis = fp_left_kernel(np.array(rows, dtype=np.int64), K.p)
    assert basis.shape[0] == g
    import itertools

    f = L.modulus
    for cs in itertools.product(range(K.p), repeat=g):
        z = tuple(int(v) for v in (np.array(cs, dtype=np.int64) @ basis) % K.p) if g else K.zero
        if _poly_eval_field(K, f, z) == K.zero:
            emb = SubfieldEmbedding(L, K, z)
            return emb
    raise AssertionError("fixed field contains no root of the subfield modulus")


def _poly_eval_field(K: Field, f: FpPoly, z):
    acc = K.zero
    for a in reversed(f.c):
        acc = K.add(K.mul(acc, z), K.scalar(a))
    return acc


def minimal_polynomial(obj, field: Field | None = None, p: int | None = None):
    """Monic least-degree annihilating polynomial.

    * a Field element (with ``field``) -> FpPoly over F_p;
    * an integer matrix (with ``p``) -> FpPoly over F_p;
    * a matrix of Field elements (with ``field``) -> coefficient list over ``field``.
    """
    if field is not None and isinstance(obj, tuple) and obj in field:
        return minimal_polynomial(field.mult_matrix(obj), p=field.p)
    if field is not None:
        return _minpoly_over_field(obj, field)
    A = np.array(obj, dtype=np.int64) % p
    n = A.shape[0]
    powers = [np.eye(n, dtype=np.int64)]
    while True:
        nxt = (powers[-1] @ A) % p
        M = np.array([P.reshape(-1) for P in powers])
        x = fp_solve_left(M, nxt.reshape(-1), p)
        if x is not None:
            return FpPoly(p, [(-int(v)) % p for v in x] + [1])
        powers.append(nxt)


def _minpoly_over_field(A, K: Field) -> list:
    n = len(A)
    powers = [kmat_identity(K, n)]
    while True:
        nxt = kmat_mul(K, powers[-1], A)
        vecs = [[a for row in P for a in row] for P in powers]
        x = kmat_solve_left(K, vecs, [a for row in nxt for a in row])
        if x is not None:
            return [K.neg(v) for v in x] + [K.one]
        powers.append(nxt)


# Matrices over a Field: lists of rows of field elements.


def kmat_zero(K: Field, r: int, c: int) -> list[list]:
    return [[K.zero] * c for _ in range(r)]


def kmat_identity(K: Field, n: int) -> list[list]:
    return [[K.one if i == j else K.zero for j in range(n)] for i in range(n)]


def kmat_unit(K: Field, n: int, i: int, j: int, a=None) -> list[list]:
    M = kmat_zero(K, n, n)
    M[i][j] = K.one if a is None else a
    return M


def kmat_mul(K: Field, A, B) -> list[list]:
    m = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [K.zero] * m
        for a, brow in zip(row, B):
            if any(a):
                for j, b in enumerate(brow):
                    if any(b):
                        acc[j] = K.add(acc[j], K.mul(a, b))
        out.append(acc)
    return out


def kmat_add(K: Field, A, B) -> list[list]:
    return [[K.add(a, b) for a, b in zip(r, s)] for r, s in zip(A, B)]


def kmat_sub(K: Field, A, B) -> list[list]:
    return [[K.sub(a, b) for a, b in zip(r, s)] for r, s in zip(A, B)]


def kmat_scale(K: Field, c, A) -> list[list]:
    return [[K.mul(c, a) for a in r] for r in A]


def kmat_transpose(A) -> list[list]:
    return [list(r) for r in zip(*A)] if A else []


def kmat_map(f, A) -> list[list]:
    return [[f(a) for a in r] for r in A]


def kmat_rref(K: Field, A) -> tuple[list[list], list[int]]:
    R = [list(r) for r in A]
    rows = len(R)
    cols = len(R[0]) if R else 0
    piv = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, rows) if any(R[i][c])), None)
        if k is None:
            continue
        R[r], R[k] = R[k], R[r]
        inv = K.inv(R[r][c])
        R[r] = [K.mul(inv, a) for a in R[r]]
        for i in range(rows):
            if i != r and any(R[i][c]):
                f = R[i][c]
                R[i] = [K.sub(a, K.mul(f, b)) for a, b in zip(R[i], R[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return R[:r], piv


def kmat_rank(K: Field, A) -> int:
    return len(kmat_rref(K, A)[1]) if A else 0


def kmat_solve_left(K: Field, rows, b):
    """Some ``x`` with ``sum_i x_i rows[i] = b``, or ``None``."""
    m = len(rows)
    n = len(b)
    aug = [[rows[i][j] for i in range(m)] + [b[j]] for j in range(n)]
    R, piv = kmat_rref(K, aug)
    if m in piv:
        return None
    x = [K.zero] * m
    for i, c in enumerate(piv):
        x[c] = R[i][m]
    return x


def kmat_left_kernel(K: Field, rows) -> list[list]:
    m = len(rows)
    n = len(rows[0]) if rows else 0
    T = [[rows[i][j] for i in range(m)] for j in range(n)]
    R, piv = kmat_rref(K, T) if n else ([], [])
    free = [j for j in range(m) if j not in piv]
    out = []
    for f in free:
        x = [K.zero] * m
        x[f] = K.one
        for i, c in enumerate(piv):
            x[c] = K.neg(R[i][f])
        out.append(x)
    return out


def kmat_inverse(K: Field, A) -> list[list]:
    n = len(A)
    aug = [list(r) + e for r, e in zip(A, kmat_identity(K, n))]
    R, piv = kmat_rref(K, aug)
    if piv[:n] != list(range(n)) or len(R) < n:
        raise ValueError("matrix is singular")
    return [r[n:] for r in R]


def kmat_is_scalar(K: Field, A) -> bool:
    n = len(A)
    return all(A[i][j] == (A[0][0] if i == j else K.zero) for i in range(n) for j in range(n))
