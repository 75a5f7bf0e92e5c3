"""Exact linear algebra over Z/p^e and finite abelian p-groups.

A module ``Z/p^{e_1} + ... + Z/p^{e_s}`` is handled by scaling coordinate ``i``
by ``p^(E - e_i)`` into ``(Z/p^E)^s``, where ``E`` is the largest exponent.  All
row reduction then happens over the single local ring ``Z/p^E``.  Matrices act
on row vectors from the right.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Row = tuple[int, ...]


class NoSolutionError(ValueError):
    """The linear system has no solution."""


class DependentInputError(ValueError):
    """The input list is not linearly independent or cannot be extended."""


class AmbientMismatchError(ValueError):
    """Two submodules live in different ambient modules."""


class InvalidHomError(ValueError):
    """A matrix violates the divisibility pattern of a homomorphism."""


def valuation(x: int, p: int, cap: int) -> int:
    """p-adic valuation of ``x`` modulo ``p^cap`` (``cap`` for zero)."""
    x %= p**cap
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def prime_power(modulus: int) -> tuple[int, int]:
    """Split ``modulus = p^e``."""
    if modulus < 2:
        raise ValueError("modulus must be a prime power > 1")
    p = next(d for d in range(2, modulus + 1) if modulus % d == 0)
    e, m = 0, modulus
    while m % p == 0:
        m //= p
        e += 1
    if m != 1:
        raise ValueError(f"{modulus} is not a prime power")
    return p, e


def howell_rows(rows: Iterable[Sequence[int]], p: int, E: int, ncols: int) -> list[Row]:
    """Canonical Howell form of the row span of ``rows`` over ``Z/p^E``.

    Pivots are exact powers ``p^v`` and entries above a pivot lie in
    ``[0, p^v)``.  Every row multiple that kills a pivot is re-reduced, so any
    element of the span can be sifted down the returned rows.
    """
    if E == 0:
        return []
    q = p**E
    work = [[x % q for x in r] for r in rows]
    work = [r for r in work if any(r)]
    out: list[tuple[int, int, list[int]]] = []
    for col in range(ncols):
        cand = [r for r in work if r[col]]
        rest = [r for r in work if not r[col]]
        if not cand:
            work = rest
            continue
        vals = [valuation(r[col], p, E) for r in cand]
        k = min(range(len(cand)), key=lambda i: vals[i])
        v = vals[k]
        pv = p**v
        unit = pow(cand[k][col] // pv, -1, q)
        piv = [(x * unit) % q for x in cand[k]]
        for i, r in enumerate(cand):
            if i == k:
                continue
            f = r[col] // pv
            r2 = [(a - f * b) % q for a, b in zip(r, piv)]
            if any(r2):
                rest.append(r2)
        ann = [(x * p ** (E - v)) % q for x in piv]
        if any(ann):
            rest.append(ann)
        out.append((col, v, piv))
        work = rest
    for i, (col, v, piv) in enumerate(out):
        pv = p**v
        for j in range(i):
            r = out[j][2]
            f = r[col] // pv
            if f:
                out[j] = (out[j][0], out[j][1], [(a - f * b) % q for a, b in zip(r, piv)])
    return [tuple(r) for _, _, r in out]


def _pivot(row: Sequence[int]) -> int:
    return next(i for i, x in enumerate(row) if x)


class AbelianModule:
    """The finite abelian p-group ``+_i Z/p^{e_i}`` with a fixed basis.

    Exponents are normally ascending; unsorted exponents are accepted so that
    hand-written examples can keep their natural coordinate order.
    """

    __slots__ = ("p", "exps", "E")

    def __init__(self, p: int, exps: Sequence[int]):
        if any(e < 0 for e in exps):
            raise ValueError("exponents must be non-negative")
        self.p = p
        self.exps = tuple(exps)
        self.E = max(self.exps, default=0)

    def __repr__(self) -> str:
        return f"AbelianModule({self.p}, {list(self.exps)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianModule) and (self.p, self.exps) == (other.p, other.exps)

    def __hash__(self) -> int:
        return hash((self.p, self.exps))

    @property
    def rank(self) -> int:
        return len(self.exps)

    @property
    def order(self) -> int:
        return self.p ** sum(self.exps)

    def reduce(self, x: Sequence[int]) -> Row:
        if len(x) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(x)}")
        return tuple(int(a) % self.p**e for a, e in zip(x, self.exps))

    def zero(self) -> Row:
        return (0,) * self.rank

    def unit(self, i: int) -> Row:
        r = [0] * self.rank
        r[i] = 1 % self.p ** self.exps[i]
        return tuple(r)

    def add(self, x: Sequence[int], y: Sequence[int]) -> Row:
        return self.reduce([a + b for a, b in zip(x, y)])

    def scale(self, c: int, x: Sequence[int]) -> Row:
        return self.reduce([c * a for a in x])

    def embed(self, x: Sequence[int]) -> Row:
        """Coordinates in ``(Z/p^E)^s``."""
        q = self.p**self.E
        return tuple((a * self.p ** (self.E - e)) % q for a, e in zip(x, self.exps))

    def unembed(self, y: Sequence[int]) -> Row:
        return tuple((a // self.p ** (self.E - e)) % self.p**e for a, e in zip(y, self.exps))

    def element_order(self, x: Sequence[int]) -> int:
        """Exponent ``k`` with ``|<x>| = p^k``."""
        y = self.embed(x)
        return self.E - min((valuation(a, self.p, self.E) for a in y), default=self.E)

    def elements(self):
        """All elements, lexicographically (desk scale only)."""
        import itertools

        return itertools.product(*[range(self.p**e) for e in self.exps])

    def whole(self) -> "SubModule":
        return SubModule(self, [self.unit(i) for i in range(self.rank)])

    def zero_sub(self) -> "SubModule":
        return SubModule(self, [])


class SubModule:
    """A subgroup of an :class:`AbelianModule` in canonical Howell form.

    Two submodules are equal exactly when their generator matrices agree.
    """

    def __init__(self, ambient: AbelianModule, gens: Iterable[Sequence[int]]):
        self.ambient = ambient
        emb = [ambient.embed(ambient.reduce(g)) for g in gens]
        self.rows: tuple[Row, ...] = tuple(howell_rows(emb, ambient.p, ambient.E, ambient.rank))

    def __repr__(self) -> str:
        return f"SubModule({self.ambient!r}, basis={self.basis})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubModule)
            and self.ambient == other.ambient
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.rows))

    @cached_property
    def order_exp(self) -> int:
        E, p = self.ambient.E, self.ambient.p
        return sum(E - valuation(r[_pivot(r)], p, E) for r in self.rows)

    @property
    def order(self) -> int:
        return self.ambient.p**self.order_exp

    def is_zero(self) -> bool:
        return not self.rows

    @cached_property
    def _full_pivot(self) -> list[tuple[int, int, Row]]:
        """Independent generators by full pivoting: (column, valuation, row)."""
        p, E = self.ambient.p, self.ambient.E
        q = p**E
        work = [list(r) for r in self.rows]
        out = []
        while work:
            best = None
            for ri, r in enumerate(work):
                for c, a in enumerate(r):
                    if a:
                        key = (valuation(a, p, E), c, ri)
                        if best is None or key < best:
                            best = key
            v, c, ri = best
            piv = work.pop(ri)
            unit = pow(piv[c] // p**v, -1, q)
            piv = [(x * unit) % q for x in piv]
            nxt = []
            for r in work:
                f = r[c] // p**v
                r2 = [(a - f * b) % q for a, b in zip(r, piv)]
                if any(r2):
                    nxt.append(r2)
            work = nxt
            out.append((c, v, tuple(piv)))
        return out

    @cached_property
    def basis(self) -> list[Row]:
        """Linearly independent generators; the sum of their cyclic spans is direct."""
        return [self.ambient.unembed(r) for _, _, r in self._full_pivot]

    @cached_property
    def basis_exps(self) -> list[int]:
        return [self.ambient.E - v for _, v, _ in self._full_pivot]

    @property
    def rank(self) -> int:
        return len(self._full_pivot)

    def coords(self, x: Sequence[int]) -> list[int]:
        """Coefficients of ``x`` on :attr:`basis`; raises if ``x`` is outside."""
        p, E = self.ambient.p, self.ambient.E
        q = p**E
        y = list(self.ambient.embed(self.ambient.reduce(x)))
        out = []
        for c, v, r in self._full_pivot:
            if y[c] % p**v:
                raise NoSolutionError("element not in submodule")
            k = (y[c] // p**v) % p ** (E - v)
            y = [(a - k * b) % q for a, b in zip(y, r)]
            out.append(k)
        if any(y):
            raise NoSolutionError("element not in submodule")
        return out

    def contains(self, x: Sequence[int]) -> bool:
        try:
            self.coords(x)
        except NoSolutionError:
            return False
        return True

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def element(self, coeffs: Sequence[int]) -> Row:
        out = self.ambient.zero()
        for c, b in zip(coeffs, self.basis):
            out = self.ambient.add(out, self.ambient.scale(c, b))
        return out

    def le(self, other: "SubModule") -> bool:
        _check_ambient(self, other)
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: "SubModule") -> "SubModule":
        _check_ambient(self, other)
        return SubModule(self.ambient, self.basis + other.basis)

    def elements(self) -> set[Row]:
        """Enumerate the subgroup (desk scale only)."""
        import itertools

        out = set()
        for cs in itertools.product(*[range(self.ambient.p**e) for e in self.basis_exps]):
            out.add(self.element(cs))
        return out


def _check_ambient(a: SubModule, b: SubModule) -> None:
    if a.ambient != b.ambient:
        raise AmbientMismatchError(f"{a.ambient} != {b.ambient}")


def subgroup_basis(gens: Iterable[Sequence[int]], ambient: AbelianModule) -> SubModule:
    return SubModule(ambient, list(gens))


def reduce_echelon(matrix: Sequence[Sequence[int]], modulus: int) -> tuple[list[list[int]], list[list[int]]]:
    """Echelon form ``E`` and transform ``T`` with ``T @ matrix = E`` over ``Z/modulus``.

    ``E`` has exact p-power pivots, each dividing every entry below it, and
    is padded with zero rows to at least the input height.
    """
    p, e = prime_power(modulus)
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    aug = [list(r) + [1 if i == j else 0 for j in range(m)] for i, r in enumerate(matrix)]
    rows = howell_rows(aug, p, e, n + m)
    ech = [list(r[:n]) for r in rows if any(r[:n])]
    tr = [list(r[n:]) for r in rows if any(r[:n])]
    while len(ech) < m:
        ech.append([0] * n)
        tr.append([0] * m)
    return ech, tr


def hom_constraints(domain: AbelianModule, codomain: AbelianModule) -> list[list[int]]:
    """Exponents ``k_ij`` with ``p^k_ij | F_ij`` for every homomorphism matrix."""
    return [[max(c - d, 0) for c in codomain.exps] for d in domain.exps]


def _check_images(images, domain: AbelianModule, codomain: AbelianModule) -> list[Row]:
    if len(images) != domain.rank:
        raise ValueError("one image per domain generator is required")
    out = []
    for d, img in zip(domain.exps, images):
        img = codomain.reduce(img)
        if any(codomain.scale(domain.p**d, img)):
            raise InvalidHomError(f"image {img} has order exceeding p^{d}")
        out.append(img)
    return out


def _hom_howell(images, domain: AbelianModule, codomain: AbelianModule):
    images = _check_images(images, domain, codomain)
    p = domain.p
    E = max(domain.E, codomain.E)
    big = AbelianModule(p, [E] * codomain.rank)
    rows = []
    for i, img in enumerate(images):
        left = [a * p ** (E - w) for a, w in zip(img, codomain.exps)]
        right = [1 if j == i else 0 for j in range(domain.rank)]
        rows.append(left + right)
    return E, howell_rows(rows, p, E, codomain.rank + domain.rank), big


def hom_kernel(images, domain: AbelianModule, codomain: AbelianModule) -> SubModule:
    """Kernel of the homomorphism sending generator ``i`` of ``domain`` to ``images[i]``."""
    if domain.rank == 0:
        return domain.zero_sub()
    _, rows, _ = _hom_howell(images, domain, codomain)
    s = codomain.rank
    return SubModule(domain, [r[s:] for r in rows if not any(r[:s])])


def hom_image(images, domain: AbelianModule, codomain: AbelianModule) -> SubModule:
    return SubModule(codomain, _check_images(images, domain, codomain))


def solve_hom(images, rhs: Sequence[int], domain: AbelianModule, codomain: AbelianModule):
    """Solve ``sum_i x_i images[i] = rhs``; returns (particular, kernel)."""
    if domain.rank == 0:
        if any(codomain.reduce(rhs)):
            raise NoSolutionError("no solution")
        return (), domain.zero_sub()
    E, rows, _ = _hom_howell(images, domain, codomain)
    p = domain.p
    q = p**E
    s = codomain.rank
    t = [a * p ** (E - w) % q for a, w in zip(codomain.reduce(rhs), codomain.exps)]
    x = [0] * domain.rank
    for r in rows:
        if not any(r[:s]):
            continue
        c = _pivot(r[:s])
        v = valuation(r[c], p, E)
        if t[c] % p**v:
            raise NoSolutionError("no solution")
        k = t[c] // p**v
        t = [(a - k * b) % q for a, b in zip(t, r[:s])]
        x = [(a + k * b) % q for a, b in zip(x, r[s:])]
    if any(t):
        raise NoSolutionError("no solution")
    kern = SubModule(domain, [r[s:] for r in rows if not any(r[:s])])
    return domain.reduce(x), kern


def solve_linear(A: Sequence[Sequence[int]], rhs: Sequence[int], modulus: int):
    """Solve ``x A = rhs`` over ``Z/modulus``; returns (particular, kernel SubModule)."""
    p, e = prime_power(modulus)
    m = len(A)
    n = len(rhs)
    dom = AbelianModule(p, [e] * m)
    cod = AbelianModule(p, [e] * n)
    return solve_hom([list(r) for r in A], rhs, dom, cod)


def intersect(a: SubModule, b: SubModule) -> SubModule:
    _check_ambient(a, b)
    M = a.ambient
    if a.is_zero() or b.is_zero():
        return M.zero_sub()
    dom = AbelianModule(M.p, a.basis_exps + b.basis_exps)
    images = list(a.basis) + [M.scale(-1, x) for x in b.basis]
    kern = hom_kernel(images, dom, M)
    k = len(a.basis)
    return SubModule(M, [a.element(c[:k]) for c in kern.basis])


class ModMatrix:
    """A homomorphism ``domain -> codomain`` acting on row vectors."""

    def __init__(self, domain: AbelianModule, codomain: AbelianModule, entries):
        self.domain = domain
        self.codomain = codomain
        rows = [codomain.reduce(r) for r in entries]
        if len(rows) != domain.rank:
            raise ValueError("row count must equal domain rank")
        k = hom_constraints(domain, codomain)
        for i, r in enumerate(rows):
            for j, a in enumerate(r):
                if a % domain.p ** k[i][j]:
                    raise InvalidHomError(f"entry ({i},{j}) must be divisible by p^{k[i][j]}")
        self.entries: tuple[Row, ...] = tuple(rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModMatrix) and (self.domain, self.codomain, self.entries) == (
            other.domain,
            other.codomain,
            other.entries,
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, self.entries))

    def apply(self, x: Sequence[int]) -> Row:
        out = [0] * self.codomain.rank
        for a, r in zip(x, self.entries):
            if a:
                for j, b in enumerate(r):
                    out[j] += a * b
        return self.codomain.reduce(out)

    def compose(self, other: "ModMatrix") -> "ModMatrix":
        """``self`` then ``other``."""
        return ModMatrix(self.domain, other.codomain, [other.apply(r) for r in self.entries])

    def kernel(self) -> SubModule:
        return hom_kernel(self.entries, self.domain, self.codomain)

    def image(self) -> SubModule:
        return hom_image(self.entries, self.domain, self.codomain)

    def is_invertible(self) -> bool:
        return (
            self.domain.order == self.codomain.order
            and self.kernel().is_zero()
        )

    def inverse(self) -> "ModMatrix":
        if not self.is_invertible():
            raise ValueError("matrix is not invertible")
        rows = [solve_hom(self.entries, self.codomain.unit(j), self.domain, self.codomain)[0]
                for j in range(self.codomain.rank)]
        return ModMatrix(self.codomain, self.domain, rows)


class Quotient:
    """The quotient ``ambient / sub`` with an invariant-factor basis.

    ``exps`` are ascending; :meth:`to_coords` and :meth:`lift` are mutually
    inverse on the quotient.
    """

    def __init__(self, ambient: AbelianModule, sub: SubModule):
        self.ambient = ambient
        self.sub = sub
        p = ambient.p
        K = ambient.E + 1
        q = p**K
        s = ambient.rank
        A = [list(r) for r in sub.basis]
        A += [[p**e if j == i else 0 for j in range(s)] for i, e in enumerate(ambient.exps)]
        V = [[int(i == j) for j in range(s)] for i in range(s)]
        Vi = [[int(i == j) for j in range(s)] for i in range(s)]
        diag = []
        for t in range(s):
            best = None
            for i in range(t, len(A)):
                for j in range(t, s):
                    if A[i][j] % q:
                        key = (valuation(A[i][j], p, K), j, i)
                        if best is None or key < best:
                            best = key
            if best is None:
                break
            v, j, i = best
            A[t], A[i] = A[i], A[t]
            for r in A:
                r[t], r[j] = r[j], r[t]
            for r in V:
                r[t], r[j] = r[j], r[t]
            Vi[t], Vi[j] = Vi[j], Vi[t]
            unit = pow(A[t][t] // p**v, -1, q)
            A[t] = [(x * unit) % q for x in A[t]]
            for i2 in range(len(A)):
                if i2 != t and A[i2][t] % q:
                    f = A[i2][t] // p**v
                    A[i2] = [(x - f * y) % q for x, y in zip(A[i2], A[t])]
            for j2 in range(t + 1, s):
                f = A[t][j2] // p**v
                if f:
                    for r in A:
                        r[j2] = (r[j2] - f * r[t]) % q
                    for r in V:
                        r[j2] = (r[j2] - f * r[t]) % q
                    Vi[t] = [(x + f * y) % q for x, y in zip(Vi[t], Vi[j2])]
            diag.append(v)
        keep = sorted((k for k in range(len(diag)) if diag[k] > 0), key=lambda k: diag[k])
        self._cols = keep
        self._V = V
        self._Vi = Vi
        self.module = AbelianModule(p, [diag[k] for k in keep])
        self.exps = self.module.exps

    def to_coords(self, x: Sequence[int]) -> Row:
        x = self.ambient.reduce(x)
        y = [sum(a * self._V[i][k] for i, a in enumerate(x)) for k in self._cols]
        return self.module.reduce(y)

    def lift(self, u: Sequence[int]) -> Row:
        s = self.ambient.rank
        y = [0] * s
        for k, a in zip(self._cols, u):
            y[k] = a
        return self.ambient.reduce([sum(y[i] * self._Vi[i][j] for i in range(s)) for j in range(s)])


def _basis_module(sub: SubModule) -> AbelianModule:
    return AbelianModule(sub.ambient.p, sub.basis_exps)


def minimal_direct_factor(ambient: AbelianModule, n: SubModule) -> tuple[SubModule, SubModule]:
    """Decomposition ``ambient = X + Y`` (direct) with ``n <= X`` and ``X`` minimal.

    Cyclic summands are split off while some functional ``K -> Z/p^k`` kills
    ``n`` and takes a unit value on an element of order ``p^k``.
    """
    p = ambient.p
    K = ambient.whole()
    ys: list[Row] = []
    while True:
        kmod = _basis_module(K)
        nk = [K.coords(x) for x in n.basis]
        found = None
        for k in sorted(set(kmod.exps)):
            h = [max(k - o, 0) for o in kmod.exps]
            dom = AbelianModule(p, [min(o, k) for o in kmod.exps])
            cod = AbelianModule(p, [k] * len(nk))
            images = [[(p ** h[j] * c[j]) for c in nk] for j in range(kmod.rank)]
            sols = hom_kernel(images, dom, cod)
            for t in sols.basis:
                phi = [p ** h[j] * t[j] % p**k for j in range(kmod.rank)]
                for j, o in enumerate(kmod.exps):
                    if o == k and phi[j] % p:
                        found = (k, j, phi)
                        break
                if found:
                    break
            if found:
                break
        if not found:
            break
        k, j, phi = found
        y = ambient.scale(pow(phi[j], -1, p**k), K.basis[j])
        ys.append(y)
        kern = hom_kernel([[a] for a in phi], kmod, AbelianModule(p, [k]))
        K = SubModule(ambient, [K.element(c) for c in kern.basis])
    return K, SubModule(ambient, ys)


def extend_to_basis(independent: Sequence[Sequence[int]], ambient: AbelianModule) -> list[Row]:
    S = [ambient.reduce(x) for x in independent]
    span = SubModule(ambient, S)
    if span.order_exp != sum(ambient.element_order(x) for x in S) or any(not any(x) for x in S):
        raise DependentInputError("input is not linearly independent")
    X, Y = minimal_direct_factor(ambient, span)
    if X != span:
        raise DependentInputError("independent set does not span a direct summand")
    return S + Y.basis


def adapted_basis(ambient: AbelianModule, n: SubModule) -> tuple[list[Row], list[int]]:
    """Basis ``a_i`` of ``ambient`` and ``c_i`` with ``n = +<p^{c_i} a_i>`` (direct).

    Such a basis need not exist for finite abelian groups (for instance
    ``Z/p + Z/p^3`` with ``n = <(1, p)>``); a ``DependentInputError`` is raised then.
    Candidates are searched exhaustively, so this is a desk-scale routine.
    """
    res = _adapted(ambient, ambient.whole(), n)
    if res is None:
        raise DependentInputError("no basis adapted to this subgroup exists")
    return res


def _adapted(M: AbelianModule, K: SubModule, N: SubModule):
    p = M.p
    if N.is_zero():
        return list(K.basis), list(K.basis_exps)
    kmod = _basis_module(K)
    nk = N.elements()
    m = max(M.element_order(x) for x in nk)
    cands = []
    for x in sorted(nk):
        if M.element_order(x) != m:
            continue
        xc = K.coords(x)
        for c in range(max(kmod.exps) - m, -1, -1):
            roots = _roots(kmod, xc, c)
            if roots:
                cands.append((-c, x, c, roots))
                break
    cands.sort(key=lambda t: (t[0], t[1]))
    ncoords = [K.coords(b) for b in N.basis]
    for _, x, c, roots in cands:
        o = m + c
        for a in roots:
            if kmod.element_order(a) != o:
                continue
            h = [max(o - e, 0) for e in kmod.exps]
            dom = AbelianModule(p, [min(e, o) for e in kmod.exps])
            cod = AbelianModule(p, [o] + [c] * len(ncoords))
            images = [[p ** h[j] * a[j]] + [p ** h[j] * v[j] for v in ncoords] for j in range(kmod.rank)]
            try:
                t, _ = solve_hom(images, [1] + [0] * len(ncoords), dom, cod)
            except NoSolutionError:
                continue
            psi = [p ** h[j] * t[j] % p**o for j in range(kmod.rank)]
            kern = hom_kernel([[z] for z in psi], kmod, AbelianModule(p, [o]))
            K2 = SubModule(M, [K.element(z) for z in kern.basis])
            N2 = intersect(N, K2)
            rest = _adapted(M, K2, N2)
            if rest is not None:
                return [K.element(a)] + rest[0], [c] + rest[1]
    return None


def _roots(kmod: AbelianModule, x: Sequence[int], c: int) -> list[Row]:
    """All ``a`` with ``p^c a = x`` in ``kmod`` (desk scale)."""
    p = kmod.p
    if c == 0:
        return [kmod.reduce(x)]
    out = []
    for a in kmod.elements():
        if kmod.scale(p**c, a) == kmod.reduce(x):
            out.append(tuple(a))
    return out


# Dense linear algebra over the prime field F_p.


def fp_rref(M, p: int) -> tuple[np.ndarray, list[int]]:
    A = np.array(M, dtype=np.int64).reshape(len(M), -1) % p if len(M) else np.zeros((0, 0), dtype=np.int64)
    rows, cols = A.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        hit = np.nonzero(A[:, c])[0]
        hit = hit[hit != r]
        if hit.size:
            A[hit] = (A[hit] - np.outer(A[hit, c], A[r])) % p
        piv.append(c)
        r += 1
    return A[:r], piv


def fp_rank(M, p: int) -> int:
    return len(fp_rref(M, p)[1]) if len(M) else 0


def fp_left_kernel(M, p: int, nrows: int | None = None) -> np.ndarray:
    """Basis (rows) of ``{x : x M = 0}``."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim == 1 or A.size == 0:
        m = nrows if nrows is not None else len(M)
        A = A.reshape(m, -1)
    m = A.shape[0]
    R, piv = fp_rref(A.T, p)
    free = [j for j in range(m) if j not in piv]
    out = np.zeros((len(free), m), dtype=np.int64)
    for t, f in enumerate(free):
        out[t, f] = 1
        for i, c in enumerate(piv):
            out[t, c] = (-R[i, f]) % p
    return out


def fp_solve_left(M, b, p: int):
    """Some ``x`` with ``x M = b``, or ``None``."""
    A = np.array(M, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64) % p
    m = A.shape[0]
    aug = np.concatenate([A.T, b.reshape(-1, 1)], axis=1)
    R, piv = fp_rref(aug, p)
    if m in piv:
        return None
    x = np.zeros(m, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, m]
    return x


def fp_inverse(M, p: int) -> np.ndarray:
    A = np.array(M, dtype=np.int64) % p
    n = A.shape[0]
    R, piv = fp_rref(np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1), p)
    if piv[:n] != list(range(n)) or len(piv) < n or piv[n - 1] >= n:
        raise ValueError("matrix is singular")
    return R[:, n:]


def fp_span(rows, p: int, dim: int) -> np.ndarray:
    """Reduced row-echelon basis of the span."""
    if len(rows) == 0:
        return np.zeros((0, dim), dtype=np.int64)
    R, _ = fp_rref(np.array(rows, dtype=np.int64).reshape(-1, dim), p)
    return R


def fp_coords(basis: np.ndarray, x, p: int):
    """Coordinates of ``x`` on independent rows ``basis`` (``None`` if outside)."""
    if basis.shape[0] == 0:
        return np.zeros(0, dtype=np.int64) if not (np.array(x) % p).any() else None
    return fp_solve_left(basis, x, p)
