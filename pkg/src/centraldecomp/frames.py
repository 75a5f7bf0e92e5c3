"""Classical forms, orthogonal and hyperbolic bases, and self-adjoint frames of adjoint *-rings."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .gfield import (
    DETERMINISTIC,
    Field,
    FieldAut,
    kmat_add,
    kmat_identity,
    kmat_inverse,
    kmat_map,
    kmat_mul,
    kmat_rank,
    kmat_transpose,
    kmat_unit,
    kmat_zero,
)
from .starring import (
    NoSolutionError,
    RingStructure,
    lift_idempotent,
    pullback_selfadjoint,
    selfadjoint_projection,
    star_pair,
)

SYMMETRIC, ALTERNATING, HERMITIAN = "symmetric", "alternating", "hermitian"


class ClassicalForm:
    """``d(u, v) = u D (v^sigma)^t`` on row vectors of ``K^n``."""

    def __init__(self, kind: str, K: Field, sigma: FieldAut | None, gram, check: bool = True):
        if kind not in (SYMMETRIC, ALTERNATING, HERMITIAN):
            raise ValueError(f"unknown form kind {kind!r}")
        self.kind = kind
        self.K = K
        self.sigma = sigma if sigma is not None else FieldAut(K, 0)
        self.gram = [[tuple(x) for x in row] for row in gram]
        self.n = len(self.gram)
        if check:
            self.validate()

    def __repr__(self) -> str:
        return f"ClassicalForm({self.kind}, n={self.n}, K=GF({self.K.order}))"

    def validate(self) -> None:
        K, G = self.K, self.gram
        if self.n and kmat_rank(K, G) < self.n:
            raise ValueError("form is degenerate")
        Gt = kmat_transpose(G)
        if self.kind == SYMMETRIC:
            if not self.sigma.is_identity() or Gt != G:
                raise ValueError("symmetric form needs D^t = D and trivial sigma")
        elif self.kind == ALTERNATING:
            if not self.sigma.is_identity() or Gt != kmat_map(K.neg, G) or any(any(G[i][i]) for i in range(self.n)):
                raise ValueError("alternating form needs D^t = -D with zero diagonal")
        else:
            if self.sigma.order != 2 or Gt != kmat_map(self.sigma, G):
                raise ValueError("hermitian form needs D^t = D^sigma with sigma of order 2")

    def value(self, u, v):
        K = self.K
        acc = K.zero
        for i, a in enumerate(u):
            if any(a):
                for j, b in enumerate(v):
                    if any(b) and any(self.gram[i][j]):
                        acc = K.add(acc, K.mul(K.mul(a, self.gram[i][j]), self.sigma(b)))
        return acc

    def gram_of(self, basis) -> list[list]:
        """Gram matrix on the rows of ``basis``."""
        return [[self.value(u, v) for v in basis] for u in basis]

    @property
    def _adj_conj(self):
        """``C = (D^sigma)^t``, so that ``X^ad = C (X^sigma)^t C^-1``."""
        C = kmat_transpose(kmat_map(self.sigma, self.gram))
        return C, kmat_inverse(self.K, C)

    def adjoint(self, X) -> list[list]:
        """The unique ``Y`` with ``d(uX, v) = d(u, vY)``."""
        C, Ci = self._adj_conj
        K = self.K
        return kmat_mul(K, kmat_mul(K, C, kmat_transpose(kmat_map(self.sigma, X))), Ci)

    def is_alternating(self) -> bool:
        return self.kind == ALTERNATING


def _vectors(K: Field, m: int):
    """Nonzero vectors of ``K^m``, by support size then lexicographically."""
    nonzero = [a for a in K.elements() if any(a)]
    for w in range(1, m + 1):
        for pos in itertools.combinations(range(m), w):
            for cs in itertools.product(nonzero, repeat=w):
                v = [K.zero] * m
                for i, c in zip(pos, cs):
                    v[i] = c
                yield v


def _combine(K: Field, coeffs, rows):
    out = [K.zero] * len(rows[0])
    for a, r in zip(coeffs, rows):
        if any(a):
            out = [K.add(x, K.mul(a, y)) for x, y in zip(out, r)]
    return out


def _perp(d: ClassicalForm, W, xs):
    """Basis of ``{w in span W : d(w, x) = 0 for x in xs}``."""
    from .gfield import kmat_left_kernel

    K = d.K
    rows = [[d.value(w, x) for x in xs] for w in W]
    return [_combine(K, k, W) for k in kmat_left_kernel(K, rows)]


def orthogonal_basis(d: ClassicalForm) -> list[list]:
    """Basis of ``K^n`` with diagonal Gram matrix, for symmetric or hermitian ``d``.

    In characteristic 2 a symmetric non-alternating form can have an alternating
    complement to an anisotropic vector, so each chosen ``x`` must also leave a
    non-alternating complement.
    """
    if d.kind == ALTERNATING:
        raise ValueError("alternating forms have no orthogonal basis")
    K = d.K
    char2_sym = K.p == 2 and d.kind == SYMMETRIC
    W = kmat_identity(K, d.n)
    out = []
    while W:
        chosen = None
        for c in _vectors(K, len(W)):
            x = _combine(K, c, W)
            if not any(d.value(x, x)):
                continue
            rest = _perp(d, W, [x])
            if char2_sym and rest and all(not any(d.value(w, w)) for w in rest):
                continue
            chosen = x
            break
        if chosen is None:
            raise ValueError("form is alternating or degenerate on a subspace")
        out.append(chosen)
        W = rest
    return out


def hyperbolic_basis(d: ClassicalForm) -> list[tuple[list, list]]:
    """Pairs ``(x, y)`` with ``d(x, y) = 1`` spanning mutually orthogonal planes."""
    if d.kind != ALTERNATING:
        raise ValueError("hyperbolic bases are for alternating forms")
    if d.n % 2:
        raise ValueError("alternating form of odd dimension is degenerate")
    K = d.K
    W = kmat_identity(K, d.n)
    pairs = []
    while W:
        x = W[0]
        y = next((w for w in W[1:] if any(d.value(x, w))), None)
        if y is None:
            raise ValueError("form is degenerate")
        inv = K.inv(d.value(x, y))
        y = [K.mul(inv, a) for a in y]
        pairs.append((x, y))
        W = _perp(d, W, [x, y])
    return pairs


@dataclass
class Frame:
    """Pairwise orthogonal self-adjoint idempotents summing to 1, with primitivity witnesses."""

    idempotents: list
    certificates: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.idempotents)

    def __iter__(self):
        return iter(self.idempotents)


def _projection(K: Field, X, idx) -> list[list]:
    """Projection of ``K^n`` onto the span of rows ``idx`` of ``X`` along the others."""
    n = len(X)
    E = kmat_zero(K, n, n)
    for i in idx:
        E = kmat_add(K, E, kmat_unit(K, n, i, i))
    return kmat_mul(K, kmat_mul(K, kmat_inverse(K, X), E), X)


def check_matrix_frame(d: ClassicalForm, frame) -> None:
    K, n = d.K, d.n
    total = kmat_zero(K, n, n)
    for i, P in enumerate(frame):
        if kmat_mul(K, P, P) != P:
            raise AssertionError("frame member is not idempotent")
        if d.adjoint(P) != P:
            raise AssertionError("frame member is not self-adjoint")
        for Q in frame[i + 1:]:
            if any(any(x) for row in kmat_mul(K, P, Q) for x in row):
                raise AssertionError("frame members are not orthogonal")
        total = kmat_add(K, total, P)
    if total != kmat_identity(K, n):
        raise AssertionError("frame does not sum to 1")


def frame_of_classical(d: ClassicalForm) -> Frame:
    """Maximum self-adjoint frame of ``Adj(d)``: lines of an orthogonal basis or hyperbolic planes."""
    K = d.K
    if d.kind == ALTERNATING:
        pairs = hyperbolic_basis(d)
        X = [v for pr in pairs for v in pr]
        idems = [_projection(K, X, (2 * k, 2 * k + 1)) for k in range(len(pairs))]
        certs = ["projection onto a hyperbolic plane; a 2-dim alternating adjoint ring has no proper self-adjoint idempotent"] * len(idems)
    else:
        X = orthogonal_basis(d)
        idems = [_projection(K, X, (k,)) for k in range(len(X))]
        certs = ["rank-1 projection onto an anisotropic line"] * len(idems)
    check_matrix_frame(d, idems)
    return Frame(idems, certs)


def frame_of_exchange(n: int, K: Field) -> Frame:
    """``{(E_ii, E_ii)}`` in ``M_n(K) + M_n(K)`` with ``(X, Y)* = (Y^t, X^t)``."""
    idems = [(kmat_unit(K, n, i, i), kmat_unit(K, n, i, i)) for i in range(n)]
    certs = ["diagonal pair; its only idempotent parts (E_ii, 0) and (0, E_ii) are not self-adjoint"] * n
    return Frame(idems, certs)


def check_frame(R, frame) -> None:
    """Frame axioms inside a StarRing or FpAlgebra with involution."""
    eq = lambda x, y: R.is_zero(R.sub(x, y))
    total = R.zero
    for i, e in enumerate(frame):
        if not eq(R.mul(e, e), e):
            raise AssertionError(f"member {i} is not idempotent")
        if not eq(R.star(e), e):
            raise AssertionError(f"member {i} is not self-adjoint")
        for j, f in enumerate(frame):
            if j != i and not R.is_zero(R.mul(e, f)):
                raise AssertionError(f"members {i} and {j} are not orthogonal")
        total = R.add(total, e)
    if not eq(total, R.one):
        raise AssertionError("frame does not sum to 1")


def semisimple_frame(S: RingStructure) -> list[tuple]:
    """Self-adjoint frame of ``R/J`` (Q coordinates) assembled from each *-simple quotient."""
    Q = S.quotient
    out = []
    for g in star_pair(S):
        i, iso = g.epi.index, g.epi.iso
        if g.kind == "classical":
            fr = frame_of_classical(g.descriptor.form)
            for P, cert in zip(fr.idempotents, fr.certificates):
                out.append((S.component_vector(i, iso.preimage(P)), f"{g.descriptor.label()}: {cert}"))
        else:
            fr = frame_of_exchange(g.epi.n, g.epi.K)
            for (E, _), cert in zip(fr.idempotents, fr.certificates):
                f = S.component_vector(i, iso.preimage(E))
                out.append((Q.add(f, Q.star(f)), f"exchange: {cert}"))
    return out


def find_frame(R, mode: str = DETERMINISTIC, rng: random.Random | None = None,
               structure: RingStructure | None = None) -> Frame:
    """Self-adjoint frame of maximum size of ``R``: frames of the *-simple quotients,
    self-adjoint pullbacks, and idempotent lifting with sequential orthogonalization."""
    if getattr(R, "degenerate", False):
        raise ValueError("degenerate bilinear map: the swap is not an involution of a nondegenerate adjoint ring")
    S = structure or RingStructure(R, mode, rng)
    targets = semisimple_frame(S)
    bound = S.lift_bound
    s = R.zero
    idems, certs = [], []
    for k, (q, cert) in enumerate(targets):
        if k == len(targets) - 1:
            e = R.sub(R.one, s)
        else:
            try:
                f = pullback_selfadjoint(S.total, q)
            except NoSolutionError:
                # characteristic 2: lift any preimage, then make it self-adjoint
                f = selfadjoint_projection(R, lift_idempotent(R, S.from_quotient(q), bound), bound)
            c = R.sub(R.one, s)
            e = lift_idempotent(R, R.mul(R.mul(c, f), c), bound)
        idems.append(e)
        certs.append(cert)
        s = R.add(s, e)
    check_frame(R, idems)
    for e, (q, _) in zip(idems, targets):
        if ((S.to_quotient(e) - q) % S.p).any():
            raise AssertionError("lifted frame does not reduce to the semisimple frame")
    return Frame(idems, certs)
