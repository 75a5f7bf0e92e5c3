"""Structure of adjoint *-rings: radical, complements, simple quotients, *-pairing."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from .gfield import (
    DETERMINISTIC,
    Field,
    FieldAut,
    FpPoly,
    factor_poly,
    kmat_identity,
    kmat_inverse,
    kmat_left_kernel,
    kmat_map,
    kmat_mul,
    kmat_transpose,
    kmat_unit,
)
from .zlinalg import (
    AbelianModule,
    NoSolutionError,
    SubModule,
    fp_inverse,
    fp_left_kernel,
    fp_rank,
    fp_rref,
    fp_solve_left,
    fp_span,
    hom_kernel,
)

Mat = tuple[tuple[int, ...], ...]
Pair = tuple[Mat, Mat]


def _matmul(A: Mat, B: Mat, exps: Sequence[int], p: int) -> Mat:
    n = len(exps)
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(n)) % p ** exps[j] for j in range(n)) for i in range(n)
    )


class StarRing:
    """An additive subgroup of ``End V + End(V)^op`` closed under product, swap as involution.

    Elements are pairs ``(F, G)`` of integer matrices acting on row vectors of
    ``V``; the product is ``(F, G)(F', G') = (F F', G' G)``.
    """

    def __init__(self, V: AbelianModule, pairs: Sequence[Pair], degenerate: bool = False):
        self.V = V
        self.p = V.p
        self.degenerate = degenerate
        r = V.rank
        self._amb = AbelianModule(self.p, [e for _ in range(r) for e in V.exps] * 2)
        self.additive = SubModule(self._amb, [self.flatten(x) for x in pairs])
        self.basis: list[Pair] = [self.unflatten(b) for b in self.additive.basis]
        self.basis_exps: list[int] = list(self.additive.basis_exps)

    def __repr__(self) -> str:
        return f"StarRing(V={self.V.exps}, additive rank={self.rank})"

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        return self.additive.order

    def flatten(self, x: Pair) -> tuple[int, ...]:
        return tuple(a for M in x for row in M for a in row)

    def unflatten(self, v: Sequence[int]) -> Pair:
        r = self.V.rank
        v = self._amb.reduce(v)
        F = tuple(tuple(v[i * r + j] for j in range(r)) for i in range(r))
        o = r * r
        G = tuple(tuple(v[o + i * r + j] for j in range(r)) for i in range(r))
        return F, G

    def reduce(self, x: Pair) -> Pair:
        return self.unflatten(self.flatten(x))

    @cached_property
    def one(self) -> Pair:
        r = self.V.rank
        I = tuple(tuple(int(i == j) for j in range(r)) for i in range(r))
        return I, I

    @cached_property
    def zero(self) -> Pair:
        return self.unflatten(self._amb.zero())

    def add(self, x: Pair, y: Pair) -> Pair:
        return self.unflatten(self._amb.add(self.flatten(x), self.flatten(y)))

    def sub(self, x: Pair, y: Pair) -> Pair:
        return self.add(x, self.scale(-1, y))

    def scale(self, c: int, x: Pair) -> Pair:
        return self.unflatten(self._amb.scale(c, self.flatten(x)))

    def mul(self, x: Pair, y: Pair) -> Pair:
        e, p = self.V.exps, self.p
        return _matmul(x[0], y[0], e, p), _matmul(y[1], x[1], e, p)

    def star(self, x: Pair) -> Pair:
        return x[1], x[0]

    def is_zero(self, x: Pair) -> bool:
        return not any(self.flatten(x))

    def coords(self, x: Pair) -> list[int]:
        return self.additive.coords(self.flatten(x))

    def element(self, coeffs: Sequence[int]) -> Pair:
        return self.unflatten(self.additive.element(coeffs))

    def contains(self, x: Pair) -> bool:
        return self.additive.contains(self.flatten(x))

    def is_idempotent(self, e: Pair) -> bool:
        return self.reduce(self.mul(e, e)) == self.reduce(e)

    def is_self_adjoint(self, x: Pair) -> bool:
        return self.reduce(self.star(x)) == self.reduce(x)

    def check_closure(self) -> None:
        """Raises if a basis product or swap leaves the additive span, or 1 is missing."""
        if not self.contains(self.one):
            raise ValueError("ring does not contain 1")
        for a in self.basis:
            if not self.contains(self.star(a)):
                raise ValueError("swap leaves the ring")
            for b in self.basis:
                if not self.contains(self.mul(a, b)):
                    raise ValueError("ring is not closed under products")

    def structure_constants(self) -> np.ndarray:
        """``c[i, j]`` = coordinates of ``basis[i] * basis[j]`` (integers)."""
        n = self.rank
        c = np.zeros((n, n, n), dtype=np.int64)
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                c[i, j] = self.coords(self.mul(a, b))
        return c


# F_p-algebras on a fixed basis; elements are int64 coordinate rows.


class _Span:
    """Coordinates on an independent list of rows over F_p."""

    def __init__(self, rows, p: int, dim: int):
        self.p = p
        self.basis = np.array(rows, dtype=np.int64).reshape(-1, dim) % p
        piv = fp_rref(self.basis, p)[1] if len(self.basis) else []
        if len(piv) != len(self.basis):
            raise ValueError("rows are dependent")
        self.piv = piv
        self._inv = fp_inverse(self.basis[:, piv], p) if piv else np.zeros((0, 0), dtype=np.int64)

    def __len__(self) -> int:
        return len(self.basis)

    def coords(self, v, check: bool = True):
        """Coordinates of ``v`` (or of each row of a 2-d array); ``None`` when outside."""
        v = np.asarray(v, dtype=np.int64) % self.p
        c = (v[..., self.piv] @ self._inv) % self.p
        if check and ((c @ self.basis - v) % self.p).any():
            return None
        return c

    def contains(self, v) -> bool:
        return self.coords(v) is not None


class FpAlgebra:
    """Associative unital F_p-algebra given by structure constants.

    ``consts[i, j]`` holds the coordinates of ``b_i b_j``. The optional ``star``
    matrix sends the coordinate row of ``x`` to that of ``x*``.
    """

    def __init__(self, p: int, consts, one, star=None):
        self.p = p
        self.dim = len(one)
        d = self.dim
        self.c = np.array(consts, dtype=np.int64).reshape(d, d, d) % p
        self.one = np.array(one, dtype=np.int64) % p
        self.star_matrix = None if star is None else np.array(star, dtype=np.int64).reshape(d, d) % p

    def __repr__(self) -> str:
        return f"FpAlgebra(p={self.p}, dim={self.dim})"

    @classmethod
    def from_matrices(cls, p: int, mats, star: Callable | None = None) -> "FpAlgebra":
        """The F_p-span of square matrices ``mats``, which must be closed and contain I.

        ``star`` (optional) maps a matrix to its image under an involution.
        The matrix of each basis element is kept in ``basis_matrices``.
        """
        mats = [np.array(m, dtype=np.int64) % p for m in mats]
        n = mats[0].shape[0]
        basis = fp_span([m.reshape(-1) for m in mats], p, n * n)
        sp = _Span(basis, p, n * n)
        d = len(basis)
        c = np.zeros((d, d, d), dtype=np.int64)
        M = [b.reshape(n, n) for b in basis]
        for i in range(d):
            for j in range(d):
                co = sp.coords((M[i] @ M[j] % p).reshape(-1))
                if co is None:
                    raise ValueError("span is not closed under products")
                c[i, j] = co
        one = sp.coords(np.eye(n, dtype=np.int64).reshape(-1))
        if one is None:
            raise ValueError("span does not contain the identity")
        S = None
        if star is not None:
            S = np.array([sp.coords(np.array(star(m), dtype=np.int64).reshape(-1) % p) for m in M])
        A = cls(p, c, one, S)
        A.basis_matrices = M
        return A

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def unit(self, i: int) -> np.ndarray:
        v = self.zero
        v[i] = 1
        return v

    def vec(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.int64) % self.p

    def add(self, x, y) -> np.ndarray:
        return (np.asarray(x) + np.asarray(y)) % self.p

    def sub(self, x, y) -> np.ndarray:
        return (np.asarray(x) - np.asarray(y)) % self.p

    def scale(self, a: int, x) -> np.ndarray:
        return (a * np.asarray(x)) % self.p

    def mul(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.c) % self.p

    def star(self, x) -> np.ndarray:
        if self.star_matrix is None:
            raise ValueError("algebra has no involution")
        return (np.asarray(x) @ self.star_matrix) % self.p

    def is_zero(self, x) -> bool:
        return not (np.asarray(x) % self.p).any()

    def equal(self, x, y) -> bool:
        return self.is_zero(self.sub(x, y))

    def power(self, x, k: int) -> np.ndarray:
        out, x = self.one, self.vec(x)
        while k:
            if k & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            k >>= 1
        return out

    def left_matrix(self, x) -> np.ndarray:
        """``y @ L = x y``."""
        return np.einsum("i,ijk->jk", x, self.c) % self.p

    def right_matrix(self, y) -> np.ndarray:
        """``x @ R = x y``."""
        return np.einsum("j,ijk->ik", y, self.c) % self.p

    def is_idempotent(self, e) -> bool:
        return self.equal(self.mul(e, e), e)

    def is_self_adjoint(self, x) -> bool:
        return self.equal(self.star(x), x)

    def products(self, X, Y) -> np.ndarray:
        """Echelon basis of the span of all products ``x y``."""
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.dim)
        Y = np.asarray(Y, dtype=np.int64).reshape(-1, self.dim)
        if not len(X) or not len(Y):
            return np.zeros((0, self.dim), dtype=np.int64)
        P = np.einsum("ai,bj,ijk->abk", X, Y, self.c, optimize=True) % self.p
        return fp_span(P.reshape(-1, self.dim), self.p, self.dim)

    def check(self) -> None:
        """Raises unless associative on basis triples, unital, and ``star`` an involution."""
        p, c = self.p, self.c
        for i in range(self.dim):
            lhs = np.einsum("jm,mkl->jkl", c[i], c) % p
            rhs = np.einsum("jkm,ml->jkl", c, c[i]) % p
            if (lhs != rhs).any():
                raise ValueError("structure constants are not associative")
        I = np.eye(self.dim, dtype=np.int64)
        if (self.left_matrix(self.one) != I).any() or (self.right_matrix(self.one) != I).any():
            raise ValueError("distinguished element is not a unit")
        if self.star_matrix is not None:
            S = self.star_matrix
            if ((S @ S) % p != I).any():
                raise ValueError("star does not square to the identity")
            for i in range(self.dim):
                for j in range(self.dim):
                    x, y = self.unit(i), self.unit(j)
                    if not self.equal(self.star(self.mul(x, y)), self.mul(self.star(y), self.star(x))):
                        raise ValueError("star is not an anti-automorphism")

    def subalgebra(self, rows, one) -> tuple["FpAlgebra", _Span]:
        """The subalgebra spanned by ``rows`` with unit ``one`` (star kept when it preserves the span)."""
        sp = _Span(rows, self.p, self.dim)
        B = sp.basis
        if not len(B):
            raise ValueError("empty subalgebra")
        P = np.einsum("ai,bj,ijk->abk", B, B, self.c, optimize=True) % self.p
        c = sp.coords(P.reshape(-1, self.dim))
        if c is None:
            raise ValueError("span is not closed under products")
        u = sp.coords(one)
        if u is None:
            raise ValueError("unit lies outside the span")
        star = None
        if self.star_matrix is not None:
            star = sp.coords(B @ self.star_matrix % self.p)
        return FpAlgebra(self.p, c.reshape(len(B), len(B), len(B)), u, star), sp

    def quotient(self, ideal) -> tuple["FpAlgebra", np.ndarray, np.ndarray]:
        """``(A/I, proj, lift)`` with ``lift`` a linear section made of basis vectors."""
        p, d = self.p, self.dim
        J = fp_span(ideal, p, d)
        piv = [int(np.nonzero(r)[0][0]) for r in J]
        rest = [i for i in range(d) if i not in piv]
        S = np.zeros((d, len(J)), dtype=np.int64)
        for i, c in enumerate(piv):
            S[c, i] = 1
        proj = ((np.eye(d, dtype=np.int64) - S @ J) % p)[:, rest]
        lift = np.eye(d, dtype=np.int64)[rest]
        c = self.c[np.ix_(rest, rest)] @ proj % p
        star = None if self.star_matrix is None else lift @ self.star_matrix @ proj % p
        return FpAlgebra(p, c, self.one @ proj % p, star), proj, lift


def _candidates(rows, p: int, mode: str, rng: random.Random | None, limit: int = 100000) -> Iterator[np.ndarray]:
    """Nonzero combinations of ``rows``: by support size then lexicographically, or at random."""
    rows = np.asarray(rows, dtype=np.int64)
    k = len(rows)
    if mode == DETERMINISTIC:
        for w in range(1, k + 1):
            for pos in itertools.combinations(range(k), w):
                for cs in itertools.product(range(1, p), repeat=w):
                    yield np.array(cs, dtype=np.int64) @ rows[list(pos)] % p
        return
    rng = rng or random.Random(0)
    for _ in range(limit):
        v = np.array([rng.randrange(p) for _ in range(k)], dtype=np.int64) @ rows % p
        if v.any():
            yield v
    raise RuntimeError("random search exhausted its budget")


def _minpoly(A: FpAlgebra, x, unit) -> FpPoly:
    """Minimal polynomial of ``x`` in the algebra with identity ``unit``."""
    powers = [A.vec(unit)]
    while True:
        nxt = A.mul(powers[-1], x)
        sol = fp_solve_left(np.array(powers), nxt, A.p)
        if sol is not None:
            return FpPoly(A.p, [(-int(v)) % A.p for v in sol] + [1])
        powers.append(nxt)


def _poly_eval(A: FpAlgebra, f: FpPoly, x, unit) -> np.ndarray:
    acc = A.zero
    for a in reversed(f.c):
        acc = A.add(A.mul(acc, x), A.scale(a, unit))
    return acc


@dataclass
class Reduction:
    """``R -> R/pR`` with coset representatives given by basis combinations."""

    ring: StarRing
    algebra: FpAlgebra

    def to_algebra(self, r: Pair) -> np.ndarray:
        return np.array(self.ring.coords(r), dtype=np.int64) % self.ring.p

    def lift(self, v) -> Pair:
        return self.ring.element([int(a) for a in v])


def reduce_mod_p(R: StarRing) -> Reduction:
    """The F_p-algebra ``R/pR`` on the images of the additive basis, with the induced swap."""
    p = R.p
    c = R.structure_constants() % p
    one = np.array(R.coords(R.one), dtype=np.int64) % p
    star = np.array([R.coords(R.star(b)) for b in R.basis], dtype=np.int64).reshape(R.rank, R.rank) % p
    return Reduction(R, FpAlgebra(p, c, one, star))


def _trace_power(M: np.ndarray, k: int, q: int) -> int:
    R = np.eye(len(M), dtype=np.int64)
    B = M % q
    while k:
        if k & 1:
            R = R @ B % q
        B = B @ B % q
        k >>= 1
    return int(np.trace(R)) % q


def jacobson_radical(A: FpAlgebra) -> np.ndarray:
    """Echelon basis of J(A), by the trace filtration for characteristic p.

    ``I_i = {a in I_{i-1} : g_i(ab) = 0 for all b}`` with
    ``g_i(x) = (Tr(L~(x)^(p^i)) mod p^(i+1)) / p^i`` for an integer lift ``L~``
    of the regular representation; ``J(A) = I_l`` with ``l = floor(log_p dim A)``.
    """
    p, d = A.p, A.dim
    I = np.eye(d, dtype=np.int64)
    if d == 0:
        return I
    l = 0
    while p ** (l + 1) <= d:
        l += 1
    tr = np.einsum("ijj->i", A.c) % p
    for i in range(l + 1):
        if not len(I):
            break
        G = np.zeros((len(I), d), dtype=np.int64)
        for k, a in enumerate(I):
            prods = A.left_matrix(a)
            if i == 0:
                G[k] = prods @ tr % p
                continue
            for j in range(d):
                t = _trace_power(A.left_matrix(prods[j]), p**i, p ** (i + 1))
                if t % p**i:
                    raise AssertionError("trace filtration: value not divisible by p^i")
                G[k, j] = t // p**i
        I = fp_span(fp_left_kernel(G, p, nrows=len(I)) @ I % p, p, d)
    return I


def nilpotency_index(A: FpAlgebra, J) -> int:
    """Least ``k`` with ``J^k = 0``."""
    P = fp_span(J, A.p, A.dim)
    k = 1
    while len(P):
        P = A.products(P, J)
        k += 1
        if k > A.dim + 1:
            raise ValueError("ideal is not nilpotent")
    return k


@dataclass
class Wedderburn:
    """``A = S + J`` with ``S`` the image of a multiplicative section of ``A -> A/J``."""

    quotient: FpAlgebra
    proj: np.ndarray
    section: np.ndarray
    radical: np.ndarray

    @property
    def complement(self) -> np.ndarray:
        return self.section


def wedderburn_complement(A: FpAlgebra, J=None) -> Wedderburn:
    """Lift a linear section of ``A -> A/J`` to an algebra map, modulo J^2, J^4, ..."""
    p = A.p
    if J is None:
        J = jacobson_radical(A)
    Q, proj, lift = A.quotient(J)
    k = Q.dim
    sec = lift.copy()
    Jt = fp_span(J, p, A.dim)
    while len(Jt):
        J2 = A.products(Jt, Jt)
        _, pb, _ = A.quotient(J2)
        S = np.einsum("ai,bj,ijk->abk", sec, sec, A.c, optimize=True) % p
        delta = (S - Q.c @ sec) @ pb % p
        if delta.any():
            imgs = Jt @ pb % p
            keep, span = [], np.zeros((0, pb.shape[1]), dtype=np.int64)
            for i, v in enumerate(imgs):
                if fp_rank(np.vstack([span, v]), p) > len(span):
                    keep.append(i)
                    span = np.vstack([span, v])
            U = Jt[keep]
            r = len(U)
            db = pb.shape[1]
            M = np.zeros((k, r, k, k, db), dtype=np.int64)
            for a in range(k):
                for m in range(r):
                    u = U[m]
                    for b in range(k):
                        M[a, m, a, b] += A.mul(u, sec[b]) @ pb
                        M[a, m, b, a] += A.mul(sec[b], u) @ pb
                    M[a, m] -= np.einsum("xy,k->xyk", Q.c[:, :, a], u @ pb)
            y = fp_solve_left(M.reshape(k * r, -1) % p, (-delta).reshape(-1) % p, p)
            if y is None:
                raise AssertionError("complement correction has no solution")
            sec = (sec + y.reshape(k, r) @ U) % p
        Jt = J2
    return Wedderburn(Q, proj, sec % p, fp_span(J, p, A.dim))


@dataclass
class Center:
    """Center of an algebra; for a simple algebra also ``K = F_p[z]`` for a primitive ``z``."""

    algebra: FpAlgebra
    basis: np.ndarray
    field: Field | None = None
    primitive: np.ndarray | None = None
    powers: np.ndarray | None = None

    @cached_property
    def _powers_span(self) -> _Span:
        return _Span(self.powers, self.algebra.p, self.algebra.dim)

    def to_field(self, v) -> tuple[int, ...]:
        c = self._powers_span.coords(v)
        if c is None:
            raise ValueError("element is not central")
        return tuple(int(a) for a in c)

    def from_field(self, a) -> np.ndarray:
        return np.asarray(a, dtype=np.int64) @ self.powers % self.algebra.p


def center_of(A: FpAlgebra, simple: bool = False, mode: str = DETERMINISTIC,
              rng: random.Random | None = None) -> Center:
    """Basis of ``{z : za = az}``; with ``simple`` also a primitive element and its Field."""
    p, d = A.p, A.dim
    M = np.concatenate([(A.c[:, j, :] - A.c[j]) % p for j in range(d)], axis=1) if d else np.zeros((0, 0))
    Z = fp_span(fp_left_kernel(M, p, nrows=d), p, d)
    C = Center(A, Z)
    if not simple:
        return C
    f = len(Z)
    if f == 1:
        C.field, C.primitive = Field(p, FpPoly.x(p), check=False), A.one
        C.powers = A.one.reshape(1, -1)
        return C
    for z in _candidates(Z, p, mode, rng):
        m = _minpoly(A, z, A.one)
        if m.degree == f:
            C.field = Field(p, m)
            C.primitive = z
            C.powers = np.array([A.power(z, t) for t in range(f)])
            return C
    raise ValueError("center is not a field")


def central_idempotents(A: FpAlgebra) -> list[np.ndarray]:
    """Primitive central idempotents of a semisimple algebra, from the Berlekamp subalgebra of the center."""
    p = A.p
    Z = center_of(A).basis
    if not len(Z):
        return []
    sp = _Span(Z, p, A.dim)
    F = sp.coords(np.array([A.power(z, p) for z in Z]))
    if F is None:
        raise AssertionError("center is not closed under powers")
    B = fp_left_kernel((F - np.eye(len(Z), dtype=np.int64)) % p, p, nrows=len(Z)) @ Z % p
    idems = [A.one]
    for b in B:
        nxt = []
        for e in idems:
            be = A.mul(b, e)
            for lam in range(p):
                x = A.sub(be, A.scale(lam, e))
                part = A.sub(e, A.power(x, p - 1))
                if not A.is_zero(part):
                    nxt.append(part)
        idems = nxt
    return idems


def _corner(A: FpAlgebra, u) -> np.ndarray:
    return fp_span(A.right_matrix(u) @ A.left_matrix(u) % A.p, A.p, A.dim)


def primitive_idempotent(A: FpAlgebra, unit=None, fdim: int = 1, mode: str = DETERMINISTIC,
                         rng: random.Random | None = None) -> np.ndarray:
    """A primitive idempotent of the simple algebra ``uAu`` (``u = unit``), whose center has dimension ``fdim``.

    Certificate: the corner ``eAe`` has dimension ``fdim``.
    """
    p = A.p
    u = A.one if unit is None else A.vec(unit)
    while True:
        corner = _corner(A, u)
        if len(corner) == fdim:
            return u
        if len(corner) < fdim:
            raise ValueError("corner smaller than the center: algebra is not simple")
        for a in _candidates(corner, p, mode, rng):
            facs = factor_poly(_minpoly(A, a, u), mode, rng)
            if len(facs) >= 2:
                break
        y = _poly_eval(A, facs[0], a, u)
        imgs = np.array([A.mul(A.mul(y, c), y) for c in corner])
        x = fp_solve_left(imgs, y, p)
        if x is None:
            raise ValueError("zero divisor is not regular: algebra is not semisimple")
        u = A.mul(x @ corner % p, y)


class MatrixIso:
    """An explicit isomorphism of a simple F_p-algebra ``B`` onto ``M_n(K)``.

    ``K`` is the center of ``B``; ``M = B f`` for a primitive idempotent ``f`` is
    given a greedy K-basis and ``s`` maps to the matrix of ``m -> s m`` (column
    convention: ``s m_j = sum_i X[i][j] m_i``).
    """

    def __init__(self, B: FpAlgebra, mode: str = DETERMINISTIC, rng: random.Random | None = None):
        self.B = B
        p, d = B.p, B.dim
        self.center = center_of(B, simple=True, mode=mode, rng=rng)
        K = self.K = self.center.field
        f = K.e
        n = math.isqrt(d // f)
        if n * n * f != d:
            raise ValueError("algebra is not simple")
        self.n = n
        self.idempotent = primitive_idempotent(B, None, f, mode, rng)
        M = fp_span(B.right_matrix(self.idempotent), p, d)
        kb, rows = [], np.zeros((0, d), dtype=np.int64)
        for v in M:
            if fp_rank(np.vstack([rows, v]), p) > len(rows):
                kb.append(v)
                rows = np.vstack([rows] + [B.mul(z, v) for z in self.center.powers])
        if len(kb) != n:
            raise AssertionError("module dimension does not match the matrix degree")
        self.kbasis = np.array(kb)
        self._module = _Span(rows, p, d)
        self._phi = np.array([self._act(B.unit(i)) for i in range(d)], dtype=np.int64).reshape(d, -1)
        self._phinv = fp_inverse(self._phi, p)

    def _act(self, s) -> np.ndarray:
        n, f = self.n, self.K.e
        C = self._module.coords(self.kbasis @ self.B.left_matrix(s) % self.B.p)
        return C.reshape(n, n, f).transpose(1, 0, 2).reshape(-1)

    def flatten(self, X) -> np.ndarray:
        return np.array([a for row in X for x in row for a in x], dtype=np.int64)

    def unflatten(self, v) -> list[list[tuple[int, ...]]]:
        n, f = self.n, self.K.e
        return [[tuple(int(a) for a in v[(i * n + j) * f:(i * n + j + 1) * f]) for j in range(n)] for i in range(n)]

    def forward(self, s) -> list[list[tuple[int, ...]]]:
        return self.unflatten(np.asarray(s, dtype=np.int64) @ self._phi % self.B.p)

    def preimage(self, X) -> np.ndarray:
        return self.flatten(X) @ self._phinv % self.B.p

    def check(self) -> None:
        B, K = self.B, self.K
        imgs = [self.forward(B.unit(i)) for i in range(B.dim)]
        if self.forward(B.one) != kmat_identity(K, self.n):
            raise AssertionError("unit does not map to the identity")
        for i in range(B.dim):
            for j in range(B.dim):
                if self.forward(B.mul(B.unit(i), B.unit(j))) != kmat_mul(K, imgs[i], imgs[j]):
                    raise AssertionError("matrix image is not multiplicative")


@dataclass
class Component:
    """A simple component ``Qc`` of ``Q = A/J`` for a central primitive idempotent ``c``."""

    idempotent: np.ndarray
    span: _Span
    algebra: FpAlgebra
    iso: MatrixIso


class RingStructure:
    """Reduction, radical, complement and simple components of a StarRing or an FpAlgebra."""

    def __init__(self, R, mode: str = DETERMINISTIC, rng: random.Random | None = None):
        self.source = R
        self.mode, self.rng = mode, rng
        if isinstance(R, StarRing):
            self.reduction = reduce_mod_p(R)
            A = self.reduction.algebra
        else:
            self.reduction = None
            A = R
        self.p = A.p
        self.algebra = A
        self.radical = jacobson_radical(A)
        self.radical_index = nilpotency_index(A, self.radical)
        self.wedderburn = wedderburn_complement(A, self.radical)
        Q = self.quotient = self.wedderburn.quotient
        self.components: list[Component] = []
        for c in central_idempotents(Q):
            B, sp = Q.subalgebra(fp_span(Q.right_matrix(c), self.p, Q.dim), c)
            self.components.append(Component(c, sp, B, MatrixIso(B, mode, rng)))

    @property
    def lift_bound(self) -> int:
        """``n`` with ``x^n = 0`` for every ``x`` in the radical of the source."""
        if self.reduction is None:
            return self.radical_index
        return self.radical_index * max(self.source.V.exps, default=1)

    def to_algebra(self, r) -> np.ndarray:
        return self.reduction.to_algebra(r) if self.reduction else self.algebra.vec(r)

    def from_algebra(self, v):
        return self.reduction.lift(v) if self.reduction else self.algebra.vec(v)

    def to_quotient(self, r) -> np.ndarray:
        return self.to_algebra(r) @ self.wedderburn.proj % self.p

    def from_quotient(self, q):
        """Representative in the complement: zero outside the blocks where ``q`` lives."""
        return self.from_algebra(np.asarray(q, dtype=np.int64) @ self.wedderburn.section % self.p)

    def component_coords(self, i: int, q) -> np.ndarray:
        comp = self.components[i]
        return comp.span.coords(self.quotient.mul(q, comp.idempotent))

    def component_vector(self, i: int, v) -> np.ndarray:
        return np.asarray(v, dtype=np.int64) @ self.components[i].span.basis % self.p

    def partner(self, i: int) -> int:
        """Index of the component whose idempotent is the star of component ``i``'s."""
        Q = self.quotient
        cs = Q.star(self.components[i].idempotent)
        for j, comp in enumerate(self.components):
            if Q.equal(cs, comp.idempotent):
                return j
        raise AssertionError("star does not permute the central idempotents")

    def radical_power_ideals(self) -> list[np.ndarray]:
        """``J, J^2, ...`` down to 0, as echelon bases in ``A = R/pR``."""
        out, P = [], self.radical
        while len(P):
            out.append(P)
            P = self.algebra.products(P, self.radical)
        return out

    @cached_property
    def hermitian_basis(self) -> list:
        """Generators of the self-adjoint part ``{s : s* = s}`` of the source."""
        R = self.source
        if self.reduction is None:
            ker = fp_left_kernel((np.eye(R.dim, dtype=np.int64) - R.star_matrix) % R.p, R.p, nrows=R.dim)
            return [R.vec(v) for v in ker]
        dom = AbelianModule(R.p, R.basis_exps)
        images = [R.flatten(R.sub(b, R.star(b))) for b in R.basis]
        K = hom_kernel(images, dom, R._amb)
        return [R.element(v) for v in K.basis]

    @cached_property
    def total(self) -> "QuotientMap":
        return QuotientMap(self)

    def summary(self) -> dict:
        out = {
            "additive_rank": self.algebra.dim,
            "radical_dim": len(self.radical),
            "quotients": [
                {"n": c.iso.n, "field_order": c.iso.K.order, "partner": self.partner(i)}
                for i, c in enumerate(self.components)
            ],
        }
        if self.reduction is not None:
            out["additive_order"] = self.source.order
        return out


class QuotientMap:
    """The map from the source onto ``R/J(R) = Q`` (flat targets are Q coordinates)."""

    def __init__(self, structure: RingStructure):
        self.structure = structure

    def forward_flat(self, r) -> np.ndarray:
        return self.structure.to_quotient(r)

    def flat(self, t) -> np.ndarray:
        return np.asarray(t, dtype=np.int64) % self.structure.p

    def is_self_adjoint(self, t) -> bool:
        return self.structure.quotient.is_self_adjoint(t)


class EffectiveEpi:
    """``pi: R -> M_n(K)`` through ``R/pR``, ``R/J`` and one simple component.

    Preimages are block-supported representatives from the Wedderburn complement.
    """

    def __init__(self, structure: RingStructure, index: int):
        self.structure = structure
        self.index = index
        self.iso = structure.components[index].iso
        self.n, self.K = self.iso.n, self.iso.K

    def __repr__(self) -> str:
        return f"EffectiveEpi(n={self.n}, K=GF({self.K.order}))"

    @property
    def target_dim(self) -> int:
        return self.n * self.n * self.K.e

    def forward(self, r) -> list[list[tuple[int, ...]]]:
        S = self.structure
        return self.iso.forward(S.component_coords(self.index, S.to_quotient(r)))

    def forward_flat(self, r) -> np.ndarray:
        return self.iso.flatten(self.forward(r))

    def preimage(self, X):
        S = self.structure
        return S.from_quotient(S.component_vector(self.index, self.iso.preimage(X)))

    def kernel_in_quotient(self) -> np.ndarray:
        """Echelon basis of the kernel inside ``Q``: the other components."""
        Q = self.structure.quotient
        c = self.structure.components[self.index].idempotent
        return fp_span(Q.right_matrix(Q.sub(Q.one, c)), Q.p, Q.dim)

    @cached_property
    def images(self) -> list:
        src = self.structure.source
        basis = src.basis if isinstance(src, StarRing) else [src.unit(i) for i in range(src.dim)]
        return [self.forward(b) for b in basis]


def simple_quotients(R, mode: str = DETERMINISTIC, rng: random.Random | None = None,
                     structure: RingStructure | None = None) -> list[EffectiveEpi]:
    """One epimorphism onto ``M_n(K)`` per maximal ideal of ``R``."""
    S = structure or RingStructure(R, mode, rng)
    return [EffectiveEpi(S, i) for i in range(len(S.components))]


@dataclass
class StarSimpleDescriptor:
    kind: str
    n: int
    field: Field
    form: object | None = None

    def label(self) -> str:
        if self.kind == "exchange":
            return "exchange"
        return self.form.kind


class StarEpi:
    """A *-epimorphism onto a *-simple ring.

    classical: ``r -> r pi`` into ``(M_n(K), adjoint of form)``;
    exchange: ``r -> (r pi, (r* pi)^t)`` into ``M_n(K) + M_n(K)`` with ``(X, Y)* = (Y^t, X^t)``.
    """

    def __init__(self, kind: str, epi: EffectiveEpi, partner: EffectiveEpi | None, descriptor: StarSimpleDescriptor):
        self.kind = kind
        self.epi = epi
        self.partner = partner
        self.descriptor = descriptor
        self.structure = epi.structure

    def __repr__(self) -> str:
        return f"StarEpi({self.descriptor.label()}, n={self.epi.n}, K=GF({self.epi.K.order}))"

    def forward(self, r):
        X = self.epi.forward(r)
        if self.kind == "classical":
            return X
        return X, kmat_transpose(self.epi.forward(self.structure.source.star(r)))

    def flat(self, t) -> np.ndarray:
        f = self.epi.iso.flatten
        return f(t) if self.kind == "classical" else np.concatenate([f(t[0]), f(t[1])])

    def forward_flat(self, r) -> np.ndarray:
        return self.flat(self.forward(r))

    def target_star(self, t):
        if self.kind == "classical":
            return self.descriptor.form.adjoint(t)
        return kmat_transpose(t[1]), kmat_transpose(t[0])

    def is_self_adjoint(self, t) -> bool:
        return self.target_star(t) == (t if self.kind == "classical" else tuple(t))


def star_pair(structure: RingStructure, omega: list[EffectiveEpi] | None = None) -> list[StarEpi]:
    """One *-epimorphism per maximal *-ideal, pairing components swapped by the involution."""
    S = structure
    left = list(omega if omega is not None else simple_quotients(S.source, structure=S))
    Q = S.quotient
    out = []
    while left:
        pi = left.pop(0)
        i = pi.index
        j = S.partner(i)
        if j == i:
            def inv(X, i=i, iso=pi.iso):
                v = S.component_vector(i, iso.preimage(X))
                return iso.forward(S.component_coords(i, Q.star(v)))

            form = realize_form(inv, pi.K, pi.n, S.mode, S.rng)
            out.append(StarEpi("classical", pi, None, StarSimpleDescriptor("classical", pi.n, pi.K, form)))
        else:
            partner = next(o for o in left if o.index == j)
            left.remove(partner)
            out.append(StarEpi("exchange", pi, partner, StarSimpleDescriptor("exchange", pi.n, pi.K)))
    return out


def _kmat_units(K: Field, n: int):
    for i in range(n):
        for j in range(n):
            yield (i, j), kmat_unit(K, n, i, j)


def _random_kmat(K: Field, n: int, rng: random.Random):
    return [[K.random(rng) for _ in range(n)] for _ in range(n)]


def skolem_noether(phi: Callable, K: Field, n: int, mode: str = DETERMINISTIC,
                   rng: random.Random | None = None, samples: int = 8):
    """``(D, sigma)`` with ``phi(X) = D^-1 X^sigma D`` for an automorphism ``phi`` of ``M_n(K)``."""
    rng = rng or random.Random(0)
    gI = [[K.gen if i == j else K.zero for j in range(n)] for i in range(n)]
    img = phi(gI)
    if any(img[i][j] != (img[0][0] if i == j else K.zero) for i in range(n) for j in range(n)):
        raise ValueError(f"not an automorphism: scalar {K.gen} maps to {img}")
    try:
        sigma = FieldAut.identify(K, img[0][0])
    except ValueError:
        raise ValueError(f"not an automorphism: the generator maps to {img[0][0]}") from None
    # unknown D[a][c] sits at row a*n+c; D phi(E_ij) - E_ij D = 0 for all units
    rows = [[K.zero] * (n**4) for _ in range(n * n)]
    for (i, j), E in _kmat_units(K, n):
        P = phi(E)
        base = (i * n + j) * n * n
        for a in range(n):
            for b in range(n):
                col = base + a * n + b
                for c in range(n):
                    rows[a * n + c][col] = K.add(rows[a * n + c][col], P[c][b])
                if a == i:
                    rows[j * n + b][col] = K.sub(rows[j * n + b][col], K.one)
    ker = kmat_left_kernel(K, rows)
    if not ker:
        raise ValueError("not an automorphism: no conjugating matrix")
    if mode == DETERMINISTIC:
        vec = ker[0]
    else:
        vec = [K.zero] * (n * n)
        while not any(any(x) for x in vec):
            for k in ker:
                a = K.random(rng)
                vec = [K.add(x, K.mul(a, y)) for x, y in zip(vec, k)]
    D = [vec[a * n:(a + 1) * n] for a in range(n)]
    try:
        Dinv = kmat_inverse(K, D)
    except ValueError:
        raise ValueError("not an automorphism: conjugating matrix is singular") from None
    tests = [E for _, E in _kmat_units(K, n)] + [_random_kmat(K, n, rng) for _ in range(samples)]
    for X in tests:
        if phi(X) != kmat_mul(K, kmat_mul(K, Dinv, kmat_map(sigma, X)), D):
            raise ValueError(f"not an automorphism: relation fails at {X}")
    return D, sigma


def realize_form(inv: Callable, K: Field, n: int, mode: str = DETERMINISTIC, rng: random.Random | None = None):
    """A ClassicalForm whose adjoint involution is ``inv`` on ``M_n(K)``.

    With ``(X^inv)^t = D^-1 X^sigma D`` the Gram matrix is ``D^sigma``; the kind is
    read off ``G^t = c G^sigma`` and a Hermitian rescaling is applied when sigma != 1.
    """
    from .frames import ClassicalForm

    units = [E for _, E in _kmat_units(K, n)]
    for X in units:
        if inv(inv(X)) != X:
            raise ValueError("not an involution: order exceeds 2")
    for X in units:
        for Y in units:
            if inv(kmat_mul(K, X, Y)) != kmat_mul(K, inv(Y), inv(X)):
                raise ValueError("not an involution: not an anti-automorphism")
    D0, sigma = skolem_noether(lambda X: kmat_transpose(inv(X)), K, n, mode, rng)
    G = kmat_map(sigma, D0)
    Gt, Gs = kmat_transpose(G), kmat_map(sigma, G)
    a, b = next((a, b) for a in range(n) for b in range(n) if any(Gs[a][b]))
    c = K.div(Gt[a][b], Gs[a][b])
    if Gt != [[K.mul(c, x) for x in row] for row in Gs]:
        raise AssertionError("Gram matrix is not sigma-symmetric up to a scalar")
    if sigma.is_identity():
        if c == K.one and not (K.p == 2 and all(not any(G[i][i]) for i in range(n))):
            kind = "symmetric"
        elif c == K.one or c == K.neg(K.one):
            kind = "alternating"
        else:
            raise AssertionError("sign of the Gram matrix is not +-1")
    else:
        if sigma.order != 2:
            raise ValueError("not an involution: field automorphism of order > 2")
        cs = sigma(c)
        for g in K.elements():
            lam = K.add(g, K.mul(cs, sigma(g)))
            if any(lam):
                break
        G = [[K.mul(lam, x) for x in row] for row in G]
        kind = "hermitian"
    form = ClassicalForm(kind, K, sigma, G)
    for X in units:
        if form.adjoint(X) != inv(X):
            raise AssertionError("realized form does not reproduce the involution")
    return form


def pullback_selfadjoint(gamma, t):
    """A self-adjoint ``s`` with ``s gamma = t``, combining the self-adjoint basis of the source.

    ``gamma`` is a StarEpi or a QuotientMap. Raises NoSolutionError when ``t`` is not
    reached by self-adjoint elements (possible in characteristic 2).
    """
    if not gamma.is_self_adjoint(t):
        raise ValueError("target element is not self-adjoint")
    S = gamma.structure
    R = S.source
    H = S.hermitian_basis
    target = gamma.flat(t)
    x = fp_solve_left(np.array([gamma.forward_flat(h) for h in H]), target, S.p) if H else None
    if x is None:
        raise NoSolutionError("target is not the image of a self-adjoint element")
    s = R.zero
    for a, h in zip(x, H):
        if a:
            s = R.add(s, R.scale(int(a), h))
    if not _ring_equal(R, R.star(s), s):
        raise AssertionError("pullback is not self-adjoint")
    if ((gamma.forward_flat(s) - target) % S.p).any():
        raise AssertionError("pullback misses the target")
    return s


def _ring_equal(R, x, y) -> bool:
    return R.is_zero(R.sub(x, y))


def _rpow(R, x, k: int):
    out = R.one
    for _ in range(k):
        out = R.mul(out, x)
    return out


def lift_idempotent(R, e, n: int):
    """``e^n * sum_{j<n} C(2n-1, j) e^(n-1-j) (1-e)^j``, exact idempotent when ``(e^2-e)^n = 0``."""
    d = R.sub(R.mul(e, e), e)
    if not R.is_zero(_rpow(R, d, n)):
        raise ValueError(f"nilpotency bound wrong: (e^2-e)^{n} != 0")
    f = R.sub(R.one, e)
    acc = R.zero
    for j in range(n):
        acc = R.add(acc, R.scale(math.comb(2 * n - 1, j), R.mul(_rpow(R, e, n - 1 - j), _rpow(R, f, j))))
    out = R.mul(_rpow(R, e, n), acc)
    if not _ring_equal(R, R.mul(out, out), out):
        raise AssertionError("lifted element is not idempotent")
    return out


def selfadjoint_projection(R, e, bound: int):
    """``e e* z^-1`` with ``z = 1 + (e - e*)(e* - e)``: self-adjoint idempotent when ``e - e*`` is nilpotent."""
    es = R.star(e)
    w = R.mul(R.sub(e, es), R.sub(es, e))
    zinv, term = R.one, R.one
    for _ in range(bound):
        term = R.scale(-1, R.mul(term, w))
        if R.is_zero(term):
            break
        zinv = R.add(zinv, term)
    else:
        raise ValueError("e - e* is not nilpotent within the bound")
    return R.mul(R.mul(e, es), zinv)


def module_chop(S: FpAlgebra, action, mode: str = DETERMINISTIC, rng: random.Random | None = None):
    """Irreducible summands of ``V = F_p^m`` under a semisimple ``S`` acting on rows.

    ``action[i]`` is the matrix of basis element ``i`` (``v -> v @ action[i]``).
    Returns ``(summands, T)``: echelon bases of a direct decomposition and the
    stacked basis change ``T`` in which every action matrix is block diagonal.
    """
    p = S.p
    if len(jacobson_radical(S)):
        raise ValueError("algebra is not semisimple")
    act = [np.array(a, dtype=np.int64) % p for a in action]
    m = act[0].shape[0] if act else 0

    def rep(x):
        return sum(int(x[i]) * act[i] for i in range(S.dim)) % p

    summands = []
    total = np.zeros((0, m), dtype=np.int64)
    for c in central_idempotents(S):
        B, sp = S.subalgebra(fp_span(S.right_matrix(c), p, S.dim), c)
        fdim = len(center_of(B).basis)
        f = primitive_idempotent(B, None, fdim, mode, rng) @ sp.basis % p
        # v S is isomorphic to the minimal right ideal f S for every nonzero v in V f
        simple_dim = fp_rank(S.left_matrix(f), p)
        for v in fp_span(rep(f), p, m):
            W = fp_span(np.array([v @ act[i] % p for i in range(S.dim)]), p, m)
            if len(W) != simple_dim:
                raise AssertionError("spun module fails the irreducibility certificate")
            if fp_rank(np.vstack([total, W]), p) == len(total) + len(W):
                summands.append(W)
                total = np.vstack([total, W])
    if len(total) != m:
        raise AssertionError("irreducible summands do not span the module")
    return summands, total
