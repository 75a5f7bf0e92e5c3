"""Shared generators and brute-force oracles for the test suite."""
import itertools

import numpy as np

from centraldecomp.bilinear import BilinearMap
from centraldecomp.pgroup import ClassTwoGroup
from centraldecomp.starring import FpAlgebra, StarRing
from centraldecomp.zlinalg import AbelianModule, ModMatrix, fp_inverse, fp_rank, fp_span


def alt_tensor(V, W, rng):
    """A random alternating tensor compatible with the orders of V."""
    r = V.rank
    B = [[W.zero() for _ in range(r)] for _ in range(r)]
    for x in range(r):
        for y in range(x + 1, r):
            k = min(V.exps[x], V.exps[y])
            c = W.reduce([rng.randrange(W.p**w) * W.p ** max(w - k, 0) for w in W.exps])
            B[x][y] = c
            B[y][x] = W.scale(-1, c)
    return B


def random_nondegenerate(rng, p=None, ranks=(2, 4), wrank=(1, 3), exps=(1,)):
    """A random nondegenerate alternating map (retries until the radical is 0)."""
    while True:
        q = p or rng.choice([2, 3])
        V = AbelianModule(q, sorted(rng.choices(exps, k=rng.randint(*ranks))))
        W = AbelianModule(q, [1] * rng.randint(*wrank))
        b = BilinearMap(V, W, alt_tensor(V, W, rng))
        if not b.is_degenerate():
            return b


def random_invertible(V: AbelianModule, rng) -> ModMatrix:
    while True:
        rows = []
        for i in range(V.rank):
            row = []
            for j in range(V.rank):
                # entry (i, j) must be divisible by p^(e_j - e_i) when e_j > e_i
                k = max(V.exps[j] - V.exps[i], 0)
                row.append(rng.randrange(V.p ** V.exps[j]) * V.p**k)
            rows.append(row)
        try:
            T = ModMatrix(V, V, rows)
        except ValueError:
            continue
        if T.is_invertible():
            return T


def fp_elements(A: FpAlgebra):
    for cs in itertools.product(range(A.p), repeat=A.dim):
        yield np.array(cs, dtype=np.int64)


def is_nilpotent(A: FpAlgebra, x) -> bool:
    y = A.vec(x)
    for _ in range(A.dim + 1):
        if A.is_zero(y):
            return True
        y = A.mul(y, x)
    return A.is_zero(y)


def brute_radical_size(A: FpAlgebra) -> int:
    """``|{a : ab nilpotent for every b}|``, the radical of a finite algebra."""
    els = list(fp_elements(A))
    return sum(1 for a in els if all(is_nilpotent(A, A.mul(a, b)) for b in els))


def star_elements(R):
    """All self-adjoint idempotents of a small StarRing."""
    out = []
    for v in R.additive.elements():
        e = R.unflatten(v)
        if e[0] == e[1] and R.is_idempotent(e):
            out.append(e)
    return out


def brute_max_frame(R) -> int:
    """Largest set of nonzero, pairwise orthogonal, self-adjoint idempotents."""
    idems = [e for e in star_elements(R) if not R.is_zero(e)]
    n = len(idems)
    orth = [[R.is_zero(R.mul(idems[i], idems[j])) and R.is_zero(R.mul(idems[j], idems[i])) for j in range(n)]
            for i in range(n)]
    best = 0

    def grow(chosen, cands):
        nonlocal best
        best = max(best, len(chosen))
        for k, c in enumerate(cands):
            if len(chosen) + len(cands) - k <= best:
                return
            grow(chosen + [c], [d for d in cands[k + 1:] if orth[c][d]])

    grow([], list(range(n)))
    return best


def upper_triangular_star_ring(p: int, E: int, k: int) -> StarRing:
    """Upper-triangular ``k x k`` matrices over ``Z/p^E`` paired with their flip-transpose."""
    V = AbelianModule(p, [E] * k)
    flip = lambda X: tuple(tuple(X[k - 1 - j][k - 1 - i] for j in range(k)) for i in range(k))
    pairs = []
    for i in range(k):
        for j in range(i, k):
            X = tuple(tuple(int(a == i and b == j) for b in range(k)) for a in range(k))
            pairs.append((X, flip(X)))
    return StarRing(V, pairs)


def group_closure(P, gens) -> frozenset:
    """Subgroup generated by ``gens``, by closing under multiplication."""
    out = {P.identity}
    frontier = [P.identity]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = P.mul(x, g)
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(out)


class _Table:
    """Elements of a small group as indices, subgroups as bitmasks."""

    def __init__(self, P):
        self.els = list(P.elements())
        idx = {g: i for i, g in enumerate(self.els)}
        self.mul = [[idx[P.mul(x, y)] for y in self.els] for x in self.els]
        self.one = idx[P.identity]
        self.full = (1 << len(self.els)) - 1

    def members(self, mask: int) -> list[int]:
        return [i for i in range(len(self.els)) if mask >> i & 1]

    def closure(self, mask: int) -> int:
        gens = self.members(mask)
        out = 1 << self.one
        frontier = [self.one]
        while frontier:
            nxt = []
            for x in frontier:
                row = self.mul[x]
                for g in gens:
                    y = row[g]
                    if not out >> y & 1:
                        out |= 1 << y
                        nxt.append(y)
            frontier = nxt
        return out


def all_subgroups(P) -> list[frozenset]:
    """Every subgroup of a small group: cyclic subgroups closed under pairwise joins."""
    T = _Table(P)
    return [frozenset(T.els[i] for i in T.members(m)) for m in _subgroup_masks(T)]


def _subgroup_masks(T: _Table) -> list[int]:
    subs = {T.closure(1 << i) for i in range(len(T.els))}
    frontier = set(subs)
    while frontier:
        new = set()
        for A in frontier:
            for B in list(subs):
                if A & B != A and A & B != B:
                    C = T.closure(A | B)
                    if C not in subs:
                        new.add(C)
        subs |= new
        frontier = new
    return sorted(subs, key=lambda m: (bin(m).count("1"), m))


def brute_central_size(P) -> int:
    """Maximum size of a central decomposition, searching over all subgroups."""
    T = _Table(P)
    subs = [m for m in _subgroup_masks(T) if m != 1 << T.one]
    n = len(subs)
    mem = [T.members(m) for m in subs]
    commute = [[all(T.mul[x][y] == T.mul[y][x] for x in mem[i] for y in mem[j]) for j in range(n)]
               for i in range(n)]
    join_cache: dict[frozenset, int] = {}

    def join(idx) -> int:
        key = frozenset(idx)
        if key not in join_cache:
            m = 0
            for i in idx:
                m |= subs[i]
            join_cache[key] = T.closure(m)
        return join_cache[key]

    best = 1

    # an irredundant family stays irredundant on every subfamily, so grow irredundant families only
    def grow(chosen, start):
        nonlocal best
        if chosen and join(chosen) == T.full:
            best = max(best, len(chosen))
            return
        for k in range(start, n):
            if not all(commute[k][c] for c in chosen):
                continue
            fam = chosen + [k]
            whole = join(fam)
            if all(join([c for c in fam if c != d]) != whole for d in fam):
                grow(fam, k + 1)

    grow([], 0)
    return best


def random_class2(p, k, c, rng, with_powers=True):
    """Random presentation: k top generators, c central ones, all of order p."""
    n = k + c
    comms = {}
    for j in range(k):
        for i in range(j):
            w = [0] * k + [rng.randrange(p) for _ in range(c)]
            comms[(j, i)] = w
    powers = {}
    if with_powers:
        for i in range(k):
            powers[i] = [0] * k + [rng.randrange(p) for _ in range(c)]
    return ClassTwoGroup(p, [1] * n, powers, comms)


def random_matrix_algebra(rng, p, n):
    """The algebra generated by I and a few random block-upper-triangular matrices, conjugated."""
    cut = rng.randint(1, n)
    gens = []
    for _ in range(rng.randint(1, 3)):
        M = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        M[cut:, :cut] = 0
        gens.append(M)
    while True:
        T = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if fp_rank(T, p) == n:
            break
    Ti = fp_inverse(T, p)
    gens = [Ti @ M @ T % p for M in gens]
    span = [np.eye(n, dtype=np.int64).reshape(-1)]
    basis = fp_span(span, p, n * n)
    while True:
        new = list(basis) + [(b.reshape(n, n) @ g % p).reshape(-1) for b in basis for g in gens]
        nb = fp_span(new, p, n * n)
        if len(nb) == len(basis):
            break
        basis = nb
    return FpAlgebra.from_matrices(p, [b.reshape(n, n) for b in basis])
