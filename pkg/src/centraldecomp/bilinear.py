"""Bilinear maps ``V x V -> W`` over Z/p^e and their adjoint *-rings."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .starring import Pair, StarRing
from .zlinalg import (
    AbelianModule,
    ModMatrix,
    NoSolutionError,
    SubModule,
    hom_kernel,
    minimal_direct_factor,
    solve_hom,
)


class NotThetaSymmetricError(ValueError):
    pass


class BilinearMap:
    """``b(u, v) = sum_xy u_x v_y B[x][y]`` with ``B[x][y]`` a vector of ``W``."""

    def __init__(self, V: AbelianModule, W: AbelianModule, tensor):
        if V.p != W.p:
            raise ValueError("V and W must share the prime")
        self.V, self.W, self.p = V, W, V.p
        r = V.rank
        if len(tensor) != r or any(len(row) != r for row in tensor):
            raise ValueError(f"tensor must be {r} x {r} x {W.rank}")
        self.B = tuple(tuple(W.reduce(tensor[x][y]) for y in range(r)) for x in range(r))
        for x in range(r):
            for y in range(r):
                c = self.B[x][y]
                if any(W.scale(self.p ** min(V.exps[x], V.exps[y]), c)):
                    raise ValueError(f"B[{x}][{y}] is not compatible with the orders of V")

    def __repr__(self) -> str:
        return f"BilinearMap(V={self.V.exps}, W={self.W.exps})"

    def __eq__(self, other) -> bool:
        return isinstance(other, BilinearMap) and (self.V, self.W, self.B) == (other.V, other.W, other.B)

    @property
    def r(self) -> int:
        return self.V.rank

    def evaluate(self, u: Sequence[int], v: Sequence[int]):
        if len(u) != self.r or len(v) != self.r:
            raise ValueError("dimension mismatch")
        out = [0] * self.W.rank
        for x, a in enumerate(u):
            if a:
                for y, c in enumerate(v):
                    if c:
                        for z, t in enumerate(self.B[x][y]):
                            out[z] += a * c * t
        return self.W.reduce(out)

    def is_alternating(self) -> bool:
        r = self.r
        return all(not any(self.B[x][x]) for x in range(r)) and all(
            self.W.add(self.B[x][y], self.B[y][x]) == self.W.zero() for x in range(r) for y in range(r)
        )

    def is_symmetric(self) -> bool:
        return all(self.B[x][y] == self.B[y][x] for x in range(self.r) for y in range(self.r))

    @cached_property
    def image_span(self) -> SubModule:
        return SubModule(self.W, [c for row in self.B for c in row])

    @cached_property
    def radical(self) -> SubModule:
        """``{v : b(v, V) = 0 = b(V, v)}``."""
        r, W = self.r, self.W
        cod = AbelianModule(self.p, W.exps * (2 * r))
        images = []
        for v in range(r):
            row = []
            for y in range(r):
                row += list(self.B[v][y])
            for x in range(r):
                row += list(self.B[x][v])
            images.append(row)
        return hom_kernel(images, self.V, cod)

    def is_degenerate(self) -> bool:
        return not self.radical.is_zero()

    def change_basis(self, T: ModMatrix) -> "BilinearMap":
        """``b'(u, v) = b(uT, vT)``."""
        if T.domain != self.V or T.codomain != self.V or not T.is_invertible():
            raise ValueError("T must be an invertible endomorphism of V")
        rows = T.entries
        tensor = [[self.evaluate(rows[x], rows[y]) for y in range(self.r)] for x in range(self.r)]
        return BilinearMap(self.V, self.W, tensor)

    def orthogonal(self, X: SubModule, Y: SubModule) -> bool:
        return all(not any(self.evaluate(u, v)) for u in X.basis for v in Y.basis)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "v_invariants": list(self.V.exps),
            "w_invariants": list(self.W.exps),
            "tensor": [[list(c) for c in row] for row in self.B],
        }

    @classmethod
    def from_json(cls, data) -> "BilinearMap":
        try:
            p = int(data["p"])
            V = AbelianModule(p, [int(e) for e in data["v_invariants"]])
            W = AbelianModule(p, [int(e) for e in data["w_invariants"]])
            tensor = data["tensor"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed bilinear map: {exc}") from exc
        return cls(V, W, tensor)


def load_bilinear(path: str) -> BilinearMap:
    with open(path) as fh:
        return BilinearMap.from_json(json.load(fh))


def evaluate(b: BilinearMap, u, v):
    return b.evaluate(u, v)


def radical_of_map(b: BilinearMap) -> SubModule:
    return b.radical


# -- theta ------------------------------------------------------------------


@dataclass
class ThetaSymmetry:
    theta: ModMatrix | None
    flags: list[str] = field(default_factory=list)

    @property
    def canonical(self) -> bool:
        return "non-canonical extension" not in self.flags


def _basis_change(W: AbelianModule, basis: Sequence[Sequence[int]], images: Sequence[Sequence[int]]) -> ModMatrix:
    """The endomorphism of ``W`` sending ``basis[i]`` to ``images[i]``."""
    dom = AbelianModule(W.p, [W.element_order(b) for b in basis])
    rows = []
    for j in range(W.rank):
        c = solve_hom(basis, W.unit(j), dom, W)[0]
        out = W.zero()
        for a, im in zip(c, images):
            out = W.add(out, W.scale(a, im))
        rows.append(out)
    return ModMatrix(W, W, rows)


def theta_symmetry(b: BilinearMap) -> ThetaSymmetry:
    """``theta`` of order <= 2 with ``b(u, v) = b(v, u) theta`` on basis pairs."""
    W, r = b.W, b.r
    s = W.rank
    if s == 0 or b.image_span.is_zero():
        return ThetaSymmetry(ModMatrix(W, W, [W.unit(i) for i in range(s)]), ["zero map"] if s else [])
    p = b.p
    h = [[max(wj - wi, 0) for wj in W.exps] for wi in W.exps]
    dom = AbelianModule(p, [min(wi, wj) for wi in W.exps for wj in W.exps])
    pairs = [(x, y) for x in range(r) for y in range(r)]
    cod = AbelianModule(p, W.exps * len(pairs))
    images = []
    for i in range(s):
        for j in range(s):
            row = [0] * (len(pairs) * s)
            for t, (x, y) in enumerate(pairs):
                row[t * s + j] = b.B[y][x][i] * p ** h[i][j]
            images.append(row)
    rhs = [a for (x, y) in pairs for a in b.B[x][y]]
    try:
        sol, _ = solve_hom(images, rhs, dom, cod)
    except NoSolutionError:
        raise NotThetaSymmetricError("not theta-symmetric") from None
    theta = ModMatrix(W, W, [[sol[i * s + j] * p ** h[i][j] for j in range(s)] for i in range(s)])
    S = b.image_span
    if S.order_exp == sum(W.exps):
        return ThetaSymmetry(theta)
    X, Y = minimal_direct_factor(W, S)
    if X == S:
        basis = list(S.basis) + list(Y.basis)
        images = [theta.apply(v) for v in S.basis] + list(Y.basis)
        theta = _basis_change(W, basis, images)
        return ThetaSymmetry(theta, ["non-canonical extension"])
    flags = ["non-canonical extension", "image span is not a direct summand"]
    if theta.compose(theta) != ModMatrix(W, W, [W.unit(i) for i in range(s)]):
        flags.append("theta is not an involution off the image")
    return ThetaSymmetry(theta, flags)


# -- adjoints -----------------------------------------------------------------


def _hom_params(V: AbelianModule):
    e = V.exps
    h = [[max(ej - ei, 0) for ej in e] for ei in e]
    dom_exps = [min(ei, ej) for ei in e for ej in e]
    return h, dom_exps


def _adj_images(b: BilinearMap, eqs, roles):
    """Images of the parameter generators in the equation codomain.

    ``eqs`` lists triples ``(a, c, swapped)``; equation ``(a, c)`` reads
    ``b(e_a F, e_c) = b(e_a, e_c G)`` with ``(F, G)`` exchanged when swapped.
    ``roles`` selects the unknown blocks: ("F", "G") or ("F",) for F = G.
    """
    V, W, p = b.V, b.W, b.p
    r, s = V.rank, W.rank
    h, _ = _hom_params(V)
    nblocks = len(roles)
    images = []
    for blk in range(nblocks):
        for i in range(r):
            for j in range(r):
                row = [0] * (len(eqs) * s)
                scale = p ** h[i][j]
                for t, (a, c, swapped) in enumerate(eqs):
                    left_block = 0 if not swapped else nblocks - 1
                    right_block = nblocks - 1 if not swapped else 0
                    if blk == left_block and a == i:
                        for k in range(s):
                            row[t * s + k] += scale * b.B[j][c][k]
                    if blk == right_block and c == i:
                        for k in range(s):
                            row[t * s + k] -= scale * b.B[a][j][k]
                images.append(row)
    return images


def _solve_adjoint_system(b: BilinearMap, eqs, roles) -> list[list[tuple[tuple[int, ...], ...]]]:
    V, p = b.V, b.p
    r = V.rank
    h, dom_exps = _hom_params(V)
    dom = AbelianModule(p, dom_exps * len(roles))
    cod = AbelianModule(p, b.W.exps * len(eqs))
    images = _adj_images(b, eqs, roles)
    ker = hom_kernel(images, dom, cod) if eqs else dom.whole()
    out = []
    for v in ker.basis:
        mats = []
        for blk in range(len(roles)):
            off = blk * r * r
            M = tuple(
                tuple(v[off + i * r + j] * p ** h[i][j] % p ** V.exps[j] for j in range(r)) for i in range(r)
            )
            mats.append(M)
        out.append(mats)
    return out


def adjoint_algebra(b: BilinearMap, fast: bool = False) -> StarRing:
    """All pairs ``(F, G)`` with ``b(uF, v) = b(u, vG)``.

    The fast path requires theta-symmetry and solves the triangle ``a <= c``
    for both ``(F, G)`` and ``(G, F)``, which is equivalent to the full system.
    """
    r = b.r
    if fast:
        theta_symmetry(b)
        eqs = [(a, c, False) for a in range(r) for c in range(a, r)]
        eqs += [(a, c, True) for a in range(r) for c in range(a + 1, r)]
    else:
        eqs = [(a, c, False) for a in range(r) for c in range(r)]
    sols = _solve_adjoint_system(b, eqs, ("F", "G"))
    R = StarRing(b.V, [(F, G) for F, G in sols] or [], degenerate=b.is_degenerate())
    return R


def sym_elements(b: BilinearMap, fast: bool = False) -> list:
    """Basis of ``{f : b(uf, v) = b(u, vf)}``; the fast path uses ``a <= c`` only."""
    r = b.r
    if fast:
        theta_symmetry(b)
        eqs = [(a, c, False) for a in range(r) for c in range(a, r)]
    else:
        eqs = [(a, c, False) for a in range(r) for c in range(r)]
    return [m[0] for m in _solve_adjoint_system(b, eqs, ("F",))]


def in_sym(b: BilinearMap, f) -> bool:
    V = b.V
    for a in range(b.r):
        for c in range(b.r):
            if b.evaluate(V.reduce(f[a]), V.unit(c)) != b.evaluate(V.unit(a), V.reduce(f[c])):
                return False
    return True


# -- perp decompositions ---------------------------------------------------------


@dataclass
class PerpDecomposition:
    parts: list[SubModule]

    def __len__(self) -> int:
        return len(self.parts)


def is_direct_decomposition(V: AbelianModule, parts: Sequence[SubModule]) -> bool:
    basis = [x for U in parts for x in U.basis]
    total = sum(U.order_exp for U in parts)
    return total == sum(V.exps) and SubModule(V, basis).order_exp == total if basis else total == sum(V.exps)


def projections_of(b: BilinearMap, parts: Sequence[SubModule]):
    """Projection idempotents ``e_U`` (as matrices) and whether each lies in ``Sym(b)``."""
    V = b.V
    if not is_direct_decomposition(V, parts):
        raise ValueError("not a direct decomposition")
    basis = [x for U in parts for x in U.basis]
    dom = AbelianModule(V.p, [e for U in parts for e in U.basis_exps])
    coords = [solve_hom(basis, V.unit(i), dom, V)[0] for i in range(V.rank)]
    out = []
    start = 0
    for U in parts:
        idx = range(start, start + U.rank)
        start += U.rank
        rows = []
        for c in coords:
            v = V.zero()
            for k in idx:
                v = V.add(v, V.scale(c[k], basis[k]))
            rows.append(v)
        e = tuple(tuple(r) for r in rows)
        out.append((e, in_sym(b, e)))
    return out


def idempotents_to_perp(b: BilinearMap, frame: Sequence[Pair]) -> PerpDecomposition:
    """``{V e : e in frame}`` for a frame of self-adjoint idempotents."""
    V = b.V
    parts = []
    for e in frame:
        F, G = e
        if F != G:
            raise ValueError("frame element is not self-adjoint")
        parts.append(SubModule(V, F))
    if not is_direct_decomposition(V, parts):
        raise ValueError("frame images do not form a direct decomposition")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if not (b.orthogonal(parts[i], parts[j]) and b.orthogonal(parts[j], parts[i])):
                raise ValueError(f"frame images {i} and {j} are not orthogonal")
    return PerpDecomposition(parts)
