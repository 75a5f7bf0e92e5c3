"""Maximum central decompositions of class-2 p-groups and nilpotent Lie rings of class 2.

The route is ``Bi(P) -> Adj -> self-adjoint frame -> perp-decomposition ->
central decomposition``, followed by nonabelian cores and cyclic central
members. Indecomposability, types, characteristic subgroups and an
exhaustive oracle live here as well.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bilinear import BilinearMap, PerpDecomposition, adjoint_algebra, idempotents_to_perp, is_direct_decomposition
from .frames import find_frame
from .gfield import DETERMINISTIC, RANDOMIZED, Field, build_field
from .pgroup import (
    AbelianSection,
    CentralDecomposition,
    ClassTwoGroup,
    GroupSubgroup,
    Verdict,
    is_central_decomposition,
)
from .starring import RingStructure, StarRing, star_pair
from .zlinalg import AbelianModule, Quotient, SubModule, fp_rank, fp_span, hom_kernel, intersect, minimal_direct_factor

TYPE_NAMES = {"symmetric": "orthogonal", "hermitian": "unitary", "alternating": "symplectic", "exchange": "exchange"}
ORACLE_BOUNDS = {2: 2**8, 3: 3**6}
ORACLE_HARD_CAP = 2**16


def _rng(mode: str, seed: int | None, rng: random.Random | None) -> random.Random | None:
    if mode == DETERMINISTIC:
        return None
    return rng or random.Random(seed)


def _as_subgroup(P) -> GroupSubgroup:
    return P.whole if isinstance(P, ClassTwoGroup) else P


def _v_image(P: ClassTwoGroup, H: GroupSubgroup) -> SubModule:
    V = P.V
    return SubModule(V.module, [V.coords(g) for g in H.igs])


def _centre_section(P: ClassTwoGroup) -> AbelianSection:
    return AbelianSection(P.center, P.trivial)


# -- central <-> perp ------------------------------------------------------------


def central_to_perp(P: ClassTwoGroup, H) -> PerpDecomposition:
    """``{HZ(P)/Z(P)} - {0}``; checks directness, orthogonality and the member count."""
    members = list(H)
    v = is_central_decomposition(P, members)
    if not v:
        raise ValueError(f"not a central decomposition: {v.witness}")
    b = P.bi_map()
    images = [_v_image(P, h) for h in members]
    parts = [U for U in images if not U.is_zero()]
    central = [h for h, U in zip(members, images) if U.is_zero()]
    if len(members) != len(parts) + len(central):
        raise AssertionError("member count identity fails")
    if not is_direct_decomposition(b.V, parts):
        raise AssertionError("images in P/Z(P) are not a direct decomposition")
    for i, X in enumerate(parts):
        for Y in parts[i + 1:]:
            if not b.orthogonal(X, Y):
                raise AssertionError("images in P/Z(P) are not orthogonal")
    return PerpDecomposition(parts)


def perp_to_central(P: ClassTwoGroup, parts) -> CentralDecomposition:
    """Pullbacks ``{H >= Z(P) : H/Z(P) in parts}``."""
    parts = list(parts.parts if isinstance(parts, PerpDecomposition) else parts)
    b = P.bi_map()
    if not is_direct_decomposition(b.V, parts):
        raise ValueError("parts are not a direct decomposition of P/Z(P)")
    for i, X in enumerate(parts):
        for Y in parts[i + 1:]:
            if not b.orthogonal(X, Y):
                raise ValueError("parts are not pairwise orthogonal")
    H = [P.pullback_subgroup(U) for U in parts]
    for h, U in zip(H, parts):
        if _v_image(P, h) != U:
            raise AssertionError("pullback does not reduce to its part")
    if H:
        v = is_central_decomposition(P, H)
        if not v:
            raise AssertionError(f"pullbacks do not form a central decomposition: {v.witness}")
    return CentralDecomposition(P, H)


# -- reduction to cores and the central part ------------------------------------------------


def nonabelian_core(P, max_steps: int | None = None) -> GroupSubgroup:
    """A subgroup ``Q`` with ``Z(Q) <= Phi(Q)`` and ``QZ = H`` (so ``Q = H`` or ``{Q, Z(H)}`` is central).

    Each round replaces ``H`` by the span of a complement to ``Z(H)Phi(H)/Phi(H)``
    together with ``Phi(H)``.
    """
    H = _as_subgroup(P)
    if H.is_abelian():
        raise ValueError("abelian groups have no nonabelian core")
    G = H.P
    if max_steps is None:
        max_steps = max(sum(G.f), 1)
    for _ in range(max_steps + 1):
        Z, Phi = H.center, H.frattini
        if Z.le(Phi):
            return H
        A = AbelianSection(H, Phi)
        U = SubModule(A.module, [A.coords(z) for z in Z.igs])
        _, Y = minimal_direct_factor(A.module, U)
        H = G.subgroup([A.lift(y) for y in Y.basis] + Phi.igs)
    raise AssertionError("core reduction did not terminate within the exponent bound")


def _central_members(P: ClassTwoGroup, cores: Sequence[GroupSubgroup]) -> list[GroupSubgroup]:
    """Cyclic subgroups of ``Z(P)`` completing ``cores`` to an irredundant central decomposition."""
    Zs = _centre_section(P)
    Zm = Zs.module
    gen = P.subgroup([g for k in cores for g in k.igs])
    N = SubModule(Zm, [Zs.coords(z) for z in gen.center.igs])
    X, Y = minimal_direct_factor(Zm, N)
    span = N + SubModule(Zm, [Zm.scale(P.p, x) for x in X.basis])
    chosen = []
    # basis vectors of X whose images form a basis of X / (N + pX)
    for x in X.basis:
        new = span + SubModule(Zm, [x])
        if new.order_exp > span.order_exp:
            chosen.append(x)
            span = new
    return [P.subgroup([Zs.lift(x)]) for x in chosen + Y.basis]


def _centre_rank_over(P: ClassTwoGroup, N: GroupSubgroup) -> int:
    """``rank Z(P) - rank (Z(P)^p N) / Z(P)^p`` for ``N <= Z(P)``."""
    Zs = _centre_section(P)
    Zm = Zs.module
    Zp = SubModule(Zm, [Zm.scale(P.p, Zm.unit(i)) for i in range(Zm.rank)])
    big = Zp + SubModule(Zm, [Zs.coords(x) for x in N.igs])
    return Zm.rank - (big.order_exp - Zp.order_exp)


def centre_meet_frattini(P: ClassTwoGroup) -> GroupSubgroup:
    """``Z(P) cap Phi(P)``, intersected in ``P/P'`` (both contain ``P'``)."""
    A = P.abelianization
    Z = SubModule(A.module, [A.coords(z) for z in P.center.igs])
    F = SubModule(A.module, [A.coords(x) for x in P.frattini.igs])
    return P.subgroup([A.lift(v) for v in intersect(Z, F).basis] + P.derived.igs)


def central_count(P: ClassTwoGroup) -> int:
    """Cyclic members of a maximum decomposition: ``rank Z(P) - rank (Z(P) cap Phi(P)) / Z(P)^p``."""
    return _centre_rank_over(P, centre_meet_frattini(P))


def literal_central_count(P: ClassTwoGroup) -> int:
    """``rank Z(P) - rank Z(P)^p P' / Z(P)^p``; equals ``central_count`` when ``Z(P) cap Phi(P) = Z(P)^p P'``."""
    return _centre_rank_over(P, P.derived)


def refine_central(P: ClassTwoGroup, parts) -> CentralDecomposition:
    """Fully refined central decomposition ``J`` with ``JZ(P)/Z(P) = parts``."""
    parts = list(parts.parts if isinstance(parts, PerpDecomposition) else parts)
    H = perp_to_central(P, parts).members if parts else []
    cores = []
    for h in H:
        k = nonabelian_core(h)
        if k.is_abelian() or P.subgroup(k.igs + P.center.igs) != h:
            raise AssertionError("core is not a nonabelian subgroup with KZ(P) = H")
        cores.append(k)
    D = CentralDecomposition(P, cores + _central_members(P, cores))
    for name, ok, detail in verify_decomposition(P, D.members, len(parts)):
        if not ok:
            raise AssertionError(f"{name}: {detail}")
    if [_v_image(P, k) for k in cores] != parts:
        raise AssertionError("cores do not reduce to the given parts")
    return D


def verify_decomposition(P: ClassTwoGroup, members: Sequence[GroupSubgroup],
                         perp_size: int | None = None) -> list[tuple[str, bool, str]]:
    """Checks reproducible from ``P`` and the members alone."""
    out = []
    v = is_central_decomposition(P, members)
    out.append(("central decomposition", bool(v), v.witness))
    if not v:
        return out
    try:
        perp = central_to_perp(P, members)
        out.append(("images form a perp-decomposition", True, f"{len(perp)} parts"))
    except AssertionError as exc:
        out.append(("images form a perp-decomposition", False, str(exc)))
        return out
    Zc = P.center
    central = [h for h in members if h.le(Zc)]
    outer = [h for h in members if not h.le(Zc)]
    out.append(("noncentral members are nonabelian", all(not h.is_abelian() for h in outer), ""))
    Zs = _centre_section(P)
    Zm = Zs.module
    C = SubModule(Zm, [Zs.coords(g) for h in central for g in h.igs])
    direct = C.order_exp == sum(SubModule(Zm, [Zs.coords(g) for g in h.igs]).order_exp for h in central)
    gen = P.subgroup([g for h in outer for g in h.igs])
    N = SubModule(Zm, [Zs.coords(z) for z in gen.center.igs])
    out.append(("central members are a direct decomposition completing Z(<K>) to Z(P)",
                direct and (N + C) == Zm.whole(), ""))
    expected = len(perp) + central_count(P)
    out.append(("size formula", len(members) == expected, f"{len(members)} vs {expected}"))
    if perp_size is not None:
        out.append(("perp-decomposition from the frame", len(perp) == perp_size, f"{len(perp)} vs {perp_size}"))
    return out


# -- the driver ------------------------------------------------------------------------


@dataclass
class DecompositionReport:
    group: ClassTwoGroup
    decomposition: CentralDecomposition
    members: list[dict]
    frame: list
    star_ring: dict
    transcript: list[tuple[str, bool, str]]
    mode: str
    seed: int | None

    @property
    def size(self) -> int:
        return len(self.decomposition)

    @property
    def verified(self) -> bool:
        return all(ok for _, ok, _ in self.transcript)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "order": self.group.order,
            "members": self.members,
            "frame": [[[list(r) for r in M] for M in e] for e in self.frame],
            "star_ring": self.star_ring,
            "transcript": [{"check": n, "ok": ok, "detail": d} for n, ok, d in self.transcript],
            "verified": self.verified,
            "seed": self.seed,
            "mode": self.mode,
        }

    def to_text(self) -> str:
        lines = [f"group of order {self.group.order}: central decomposition of size {self.size}"]
        for m in self.members:
            kind = m["type"] or ("abelian" if m["abelian"] else "nonabelian")
            lines.append(f"  order {m['order']:>6}  {kind:<11} <{', '.join(m['words'])}>")
        sr = self.star_ring
        if sr:
            lines.append(f"adjoint ring: additive rank {sr['additive_rank']}, radical dim {sr['radical_dim']}, "
                         f"*-simple quotients {', '.join(sr.get('labels', [])) or 'none'}")
        lines.append("verified" if self.verified else "VERIFICATION FAILED")
        return "\n".join(lines)


def star_summary(S: RingStructure) -> dict:
    out = S.summary()
    out["labels"] = [TYPE_NAMES[g.descriptor.label()] for g in star_pair(S)]
    return out


def central_decomposition_max(P: ClassTwoGroup, mode: str = DETERMINISTIC, seed: int | None = None,
                              rng: random.Random | None = None, classify_members: bool = True) -> DecompositionReport:
    """Fully refined central decomposition of maximum size."""
    rng = _rng(mode, seed, rng)
    b = P.bi_map()
    if b.V.rank == 0:
        parts, frame, summary = [], [], {}
    else:
        R = adjoint_algebra(b)
        S = RingStructure(R, mode, rng)
        fr = find_frame(R, mode, rng, structure=S)
        frame = list(fr.idempotents)
        parts = idempotents_to_perp(b, frame).parts
        summary = star_summary(S)
    D = refine_central(P, parts)
    members = []
    for h in D.members:
        abelian = h.is_abelian()
        kind = None
        if classify_members and not abelian:
            kind = classify_type(h.presentation, check=False)
        members.append({
            "order": h.order,
            "abelian": abelian,
            "type": kind,
            "generators": [list(g) for g in h.igs],
            "words": [P.format(g) for g in h.igs],
        })
    transcript = verify_decomposition(P, D.members, len(parts))
    return DecompositionReport(P, D, members, frame, summary, transcript, mode,
                               seed if mode == RANDOMIZED else None)


def verify_report_json(P: ClassTwoGroup, data: dict) -> list[tuple[str, bool, str]]:
    """Rebuild the members of an emitted report and rerun the checks."""
    members = [P.subgroup([tuple(g) for g in m["generators"]]) for m in data["members"]]
    out = verify_decomposition(P, members)
    out.append(("reported size", len(members) == data["size"], ""))
    orders = [m["order"] for m in data["members"]]
    out.append(("reported member orders", orders == [h.order for h in members], ""))
    return out


# -- indecomposability and types --------------------------------------------------------------


@dataclass
class IndecomposabilityVerdict:
    ok: bool
    reason: str
    witness: list[GroupSubgroup] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def is_centrally_indecomposable(P: ClassTwoGroup, mode: str = DETERMINISTIC,
                                rng: random.Random | None = None) -> IndecomposabilityVerdict:
    """``Bi(P)`` perp-indecomposable and ``Z(P) <= Phi(P)``; a decomposition witnesses failure."""
    if P.order == 1:
        return IndecomposabilityVerdict(True, "trivial group")
    if P.is_abelian():
        cyc = _central_members(P, [])
        if len(cyc) == 1:
            return IndecomposabilityVerdict(True, "cyclic")
        return IndecomposabilityVerdict(False, f"abelian of rank {len(cyc)}", cyc)
    b = P.bi_map()
    R = adjoint_algebra(b)
    fr = find_frame(R, mode, rng)
    if len(fr) > 1:
        D = perp_to_central(P, idempotents_to_perp(b, fr.idempotents))
        return IndecomposabilityVerdict(False, f"Bi(P) has a perp-decomposition of size {len(fr)}", D.members)
    if not P.center.le(P.frattini):
        Q = nonabelian_core(P)
        return IndecomposabilityVerdict(False, "Z(P) is not contained in Phi(P)", [Q, P.center])
    return IndecomposabilityVerdict(True, "Bi(P) is perp-indecomposable and Z(P) <= Phi(P)")


def classify_type(P: ClassTwoGroup, check: bool = True, mode: str = DETERMINISTIC,
                  rng: random.Random | None = None) -> str:
    """orthogonal, unitary, exchange or symplectic, read off the *-simple quotient of the adjoint ring."""
    if P.is_abelian():
        raise ValueError("abelian groups have no type")
    if check:
        v = is_centrally_indecomposable(P, mode, rng)
        if not v:
            raise ValueError(f"group is centrally decomposable: {v.reason}")
    S = RingStructure(adjoint_algebra(P.bi_map()), mode, rng)
    quotients = star_pair(S)
    if len(quotients) != 1:
        raise ValueError(f"adjoint ring has {len(quotients)} *-simple quotients")
    return TYPE_NAMES[quotients[0].descriptor.label()]


# -- characteristic and fully invariant subgroups ------------------------------------------


@dataclass
class InvariantSubgroup:
    subgroup: GroupSubgroup
    ideal: list
    sources: list[str]

    @property
    def order(self) -> int:
        return self.subgroup.order


def _ideal(R: StarRing, gens) -> SubModule:
    return SubModule(R._amb, [R.flatten(g) for g in gens])


def _pairs(R: StarRing, I: SubModule) -> list:
    return [R.unflatten(v) for v in I.basis]


def _radical_ideal(R: StarRing, S: RingStructure) -> SubModule:
    lifts = [S.reduction.lift(v) for v in S.radical]
    return _ideal(R, lifts + [R.scale(R.p, x) for x in R.basis])


def _radical_flag(R: StarRing, S: RingStructure) -> list[tuple[str, SubModule]]:
    """``J^0 = R, J, J^2, ...`` down to 0, computed in ``R`` itself."""
    whole = _ideal(R, R.basis)
    J = _radical_ideal(R, S)
    out = [("J^0", whole)]
    I, k = whole, 0
    while not I.is_zero():
        k += 1
        nxt = J if k == 1 else _ideal(R, [R.mul(x, y) for x in _pairs(R, I) for y in _pairs(R, J)])
        if nxt == I:
            raise AssertionError("radical powers do not terminate")
        I = nxt
        out.append((f"J^{k}", I))
    return out


def _kmat_det(K: Field, A) -> tuple[int, ...]:
    A = [list(r) for r in A]
    n = len(A)
    det = K.one
    for c in range(n):
        piv = next((r for r in range(c, n) if any(A[r][c])), None)
        if piv is None:
            return K.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = K.neg(det)
        det = K.mul(det, A[c][c])
        inv = K.inv(A[c][c])
        for r in range(c + 1, n):
            if any(A[r][c]):
                f = K.mul(A[r][c], inv)
                A[r] = [K.sub(a, K.mul(f, b)) for a, b in zip(A[r], A[c])]
    return det


def isomorphism_key(g) -> tuple:
    """Invariant separating non-isomorphic *-simple quotients."""
    K, n = g.epi.K, g.epi.n
    label = g.descriptor.label()
    extra = None
    if label == "symmetric" and n % 2 == 0 and K.p != 2:
        d = _kmat_det(K, g.descriptor.form.gram)
        extra = "square" if K.pow(d, (K.order - 1) // 2) == K.one else "nonsquare"
    return label, n, K.order, extra


def _vi(R: StarRing, I: SubModule) -> SubModule:
    """``V I``: spanned by the rows of the first components of a generating set."""
    V = R.V
    return SubModule(V, [V.reduce(row) for F, _ in _pairs(R, I) for row in F])


def _invariant_ideals(R: StarRing, S: RingStructure) -> list[tuple[str, SubModule]]:
    ideals = list(_radical_flag(R, S))
    J = _radical_ideal(R, S)
    Q = S.quotient
    classes: dict[tuple, list] = {}
    for g in star_pair(S):
        classes.setdefault(isomorphism_key(g), []).append(g)
    for key, gs in classes.items():
        c = Q.zero
        for g in gs:
            c = Q.add(c, S.components[g.epi.index].idempotent)
            if g.partner is not None:
                c = Q.add(c, S.components[g.partner.index].idempotent)
        ker = fp_span(Q.right_matrix(Q.sub(Q.one, c)), Q.p, Q.dim)
        gens = [S.from_quotient(q) for q in ker] + _pairs(R, J)
        label = "/".join(str(k) for k in key if k is not None)
        ideals.append((f"kernel of the {label} quotients", _ideal(R, gens)))
    return ideals


def _collect(found: list[InvariantSubgroup], H: GroupSubgroup, ideal, source: str) -> None:
    for item in found:
        if item.subgroup == H:
            item.sources.append(source)
            return
    found.append(InvariantSubgroup(H, ideal, [source]))


def characteristic_subgroups(P: ClassTwoGroup, mode: str = DETERMINISTIC,
                             rng: random.Random | None = None) -> list[InvariantSubgroup]:
    """Pullbacks of ``V I`` for the radical flag and the kernels of isomorphism classes of *-simple quotients."""
    if P.is_abelian():
        return [InvariantSubgroup(P.whole, [], ["J^0"])]
    R = adjoint_algebra(P.bi_map())
    S = RingStructure(R, mode, rng)
    found: list[InvariantSubgroup] = []
    for source, I in _invariant_ideals(R, S):
        _collect(found, P.pullback_subgroup(_vi(R, I)), _pairs(R, I), source)
    return found


def fully_invariant_subgroups(P: ClassTwoGroup, mode: str = DETERMINISTIC,
                              rng: random.Random | None = None) -> list[InvariantSubgroup]:
    """Radical flag of the adjoint ring of ``P/P' x P/P' -> P'``, pulled back through ``P/P'``."""
    A = P.abelianization
    if A.module.rank == 0 or P.is_abelian():
        return [InvariantSubgroup(P.whole, [], ["J^0"])]
    R = adjoint_algebra(P.bi_map_full())
    S = RingStructure(R, mode, rng)
    found: list[InvariantSubgroup] = []
    for source, I in _radical_flag(R, S):
        U = _vi(R, I)
        H = P.subgroup([A.lift(u) for u in U.basis] + P.derived.igs)
        _collect(found, H, _pairs(R, I), source)
    return found


# -- Lie rings ---------------------------------------------------------------------------


class LieRing:
    """Nilpotent Lie ring of class 2 over ``Z/p^e`` or ``F_{p^f}`` on a basis ``x_0..x_{n-1}``.

    ``brackets[(i, j)]`` (``i < j``) lists the coordinates of ``[x_i, x_j]``:
    integers mod ``p^e``, or field elements as coefficient tuples when ``f > 1``.
    Internally the ring is the additive group ``(Z/p^e)^(n f)`` with basis
    ``w^k x_i`` (``w`` the field generator), index ``i f + k``.
    """

    def __init__(self, p: int, n: int, brackets, e: int = 1, f: int = 1, check: bool = True):
        if e > 1 and f > 1:
            raise ValueError("coefficients must be Z/p^e or a finite field")
        self.p, self.n, self.e, self.f = p, n, e, f
        self.K = build_field(p, f) if f > 1 else None
        self.module = AbelianModule(p, [e] * (n * f))
        self.brackets = {}
        for key, c in dict(brackets).items():
            i, j = key
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"bracket index {key} out of range")
            if len(c) != n:
                raise ValueError(f"bracket {key} needs {n} coordinates")
            c = [self._coeff(a) for a in c]
            if i > j:
                i, j = j, i
                c = [self._neg(a) for a in c]
            self.brackets[(i, j)] = c
        N = n * f
        zero = self.module.zero()
        self.T = [[zero for _ in range(N)] for _ in range(N)]
        for (i, j), c in self.brackets.items():
            for k in range(f):
                for l in range(f):
                    v = self._flat_times(c, k + l)
                    self.T[i * f + k][j * f + l] = v
                    self.T[j * f + l][i * f + k] = self.module.scale(-1, v)
        self.omega = self._omega_matrix() if f > 1 else None
        if check:
            self.check()

    def _coeff(self, a):
        if self.f == 1:
            return int(a) % self.p**self.e
        return tuple(int(x) % self.p for x in a)

    def _neg(self, a):
        return (-a) % self.p**self.e if self.f == 1 else self.K.neg(a)

    def _flat_times(self, c, k: int):
        """Flat coordinates of ``w^k c`` for a coordinate list ``c``."""
        if self.f == 1:
            return self.module.reduce(c)
        K = self.K
        wk = K.pow(K.gen, k)
        return self.module.reduce([x for a in c for x in K.mul(wk, a)])

    def _omega_matrix(self) -> list[list[int]]:
        rows = []
        for i in range(self.n):
            for k in range(self.f):
                c = [self.K.zero] * self.n
                c[i] = self.K.one
                rows.append(list(self._flat_times(c, k + 1)))
        return rows

    def times_omega(self, x):
        if self.f == 1:
            return self.module.reduce(x)
        out = self.module.zero()
        for a, row in zip(x, self.omega):
            if a:
                out = self.module.add(out, self.module.scale(a, row))
        return out

    def bracket(self, x, y):
        M = self.module
        out = M.zero()
        for a, u in enumerate(x):
            if u:
                for b, v in enumerate(y):
                    if v and any(self.T[a][b]):
                        out = M.add(out, M.scale(u * v, self.T[a][b]))
        return out

    @property
    def dim(self) -> int:
        return self.module.rank

    def check(self) -> None:
        N, M = self.dim, self.module
        units = [M.unit(i) for i in range(N)]
        for a in range(N):
            if any(self.T[a][a]):
                raise ValueError("bracket is not alternating")
            for b in range(N):
                if M.add(self.T[a][b], self.T[b][a]) != M.zero():
                    raise ValueError("bracket is not antisymmetric")
                for c in range(N):
                    if any(self.bracket(self.T[a][b], units[c])):
                        raise ValueError("Lie ring is not of class 2")
        for a, b, c in itertools.combinations(range(N), 3):
            j = M.add(M.add(self.bracket(self.T[a][b], units[c]), self.bracket(self.T[b][c], units[a])),
                      self.bracket(self.T[c][a], units[b]))
            if any(j):
                raise ValueError("Jacobi identity fails")

    def span(self, gens) -> SubModule:
        """Smallest coefficient-stable subgroup containing ``gens``."""
        gens = [self.module.reduce(g) for g in gens]
        if self.f > 1:
            more = []
            for g in gens:
                for _ in range(self.f):
                    g = self.times_omega(g)
                    more.append(g)
            gens += more
        return SubModule(self.module, gens)

    def centralizer(self, H: SubModule) -> SubModule:
        M = self.module
        images = [[a for h in H.basis for a in self.bracket(M.unit(i), h)] for i in range(self.dim)]
        target = AbelianModule(self.p, list(M.exps) * max(len(H.basis), 1))
        if not H.basis:
            return M.whole()
        return hom_kernel(images, M, target)

    def center_of(self, H: SubModule) -> SubModule:
        return intersect(self.centralizer(H), H)

    @property
    def whole(self) -> SubModule:
        return self.module.whole()

    def center(self) -> SubModule:
        return self.centralizer(self.whole)

    def derived_of(self, H: SubModule) -> SubModule:
        return SubModule(self.module, [self.bracket(x, y) for x in H.basis for y in H.basis])

    def derived(self) -> SubModule:
        return self.derived_of(self.whole)

    def frattini(self, H: SubModule) -> SubModule:
        """``pH + [H, H]``: the radical of the coefficients times ``H`` plus the derived ring."""
        return SubModule(self.module, [self.module.scale(self.p, h) for h in H.basis]) + self.derived_of(H)

    def to_json(self) -> dict:
        def enc(a):
            return list(a) if self.f > 1 else a

        return {
            "p": self.p, "exponent": self.e, "degree": self.f, "dimension": self.n,
            "brackets": {f"{i},{j}": [enc(a) for a in c] for (i, j), c in sorted(self.brackets.items())},
        }

    @classmethod
    def from_json(cls, data) -> "LieRing":
        try:
            p, n = int(data["p"]), int(data["dimension"])
            e, f = int(data.get("exponent", 1)), int(data.get("degree", 1))
            raw = dict(data.get("brackets", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"lie ring: missing or malformed field: {exc}") from exc
        br = {}
        for key, c in raw.items():
            try:
                i, j = (int(s) for s in str(key).split(","))
            except ValueError as exc:
                raise ValueError(f"brackets.{key}: key must be 'i,j'") from exc
            br[(i, j)] = c
        return cls(p, n, br, e, f)


@dataclass
class LieBilinear:
    """``Bi(L): L/Z(L) x L/Z(L) -> [L, L]`` with the coefficient action on ``L/Z(L)``."""

    ring: LieRing
    map: BilinearMap
    quotient: Quotient
    derived: SubModule
    omega: list | None

    def lift(self, u) -> tuple:
        return self.quotient.lift(u)


def lie_bi_map(L: LieRing) -> LieBilinear:
    Z, D = L.center(), L.derived()
    q = Quotient(L.module, Z)
    V, W = q.module, AbelianModule(L.p, D.basis_exps)
    lifts = [q.lift(V.unit(i)) for i in range(V.rank)]
    tensor = [[D.coords(L.bracket(x, y)) for y in lifts] for x in lifts]
    omega = [list(q.to_coords(L.times_omega(x))) for x in lifts] if L.f > 1 else None
    return LieBilinear(L, BilinearMap(V, W, tensor), q, D, omega)


def coefficient_adjoint(bl: LieBilinear) -> StarRing:
    """Adjoints commuting with the coefficient action (all of ``Adj`` over ``Z/p^e``)."""
    b = bl.map
    R = adjoint_algebra(b)
    if bl.omega is None:
        return R
    W = tuple(tuple(r) for r in bl.omega)
    Wp = (W, W)
    dom = AbelianModule(R.p, R.basis_exps)
    images = [R.flatten(R.sub(R.mul(x, Wp), R.mul(Wp, x))) for x in R.basis]
    ker = hom_kernel(images, dom, R._amb)
    return StarRing(b.V, [R.element(c) for c in ker.basis], degenerate=R.degenerate)


@dataclass
class LieDecomposition:
    ring: LieRing
    members: list[SubModule]
    perp_size: int

    def __len__(self) -> int:
        return len(self.members)

    def check(self) -> Verdict:
        L = self.ring
        M = self.members
        for i, X in enumerate(M):
            if L.span(X.basis) != X:
                return Verdict(False, f"member {i} is not closed under the coefficients")
            for Y in M[i + 1:]:
                if any(any(L.bracket(x, y)) for x in X.basis for y in Y.basis):
                    return Verdict(False, "members do not commute")
        total = SubModule(L.module, [x for X in M for x in X.basis])
        if total != L.whole:
            return Verdict(False, "members do not span L")
        for i in range(len(M)):
            rest = SubModule(L.module, [x for j, X in enumerate(M) if j != i for x in X.basis])
            if rest == L.whole:
                return Verdict(False, f"member {i} is redundant")
        return Verdict(True)


def _lie_core(L: LieRing, H: SubModule) -> SubModule:
    for _ in range(L.e + 1):
        Z, Phi = L.center_of(H), L.frattini(H)
        if Z.le(Phi):
            return H
        cur = Z + Phi
        comp = []
        for h in H.basis:
            if not cur.contains(h):
                comp.append(h)
                cur = cur + L.span([h])
        H = L.span(comp) + Phi
    raise AssertionError("core reduction did not terminate")


def lie_decomposition_max(L: LieRing, mode: str = DETERMINISTIC, seed: int | None = None,
                          rng: random.Random | None = None) -> LieDecomposition:
    """Central decomposition of maximum size, members closed under the coefficients."""
    rng = _rng(mode, seed, rng)
    bl = lie_bi_map(L)
    b = bl.map
    Z = L.center()
    if b.V.rank:
        R = coefficient_adjoint(bl)
        fr = find_frame(R, mode, rng)
        parts = idempotents_to_perp(b, fr.idempotents).parts
    else:
        parts = []
    cores = []
    for U in parts:
        H = SubModule(L.module, [bl.lift(u) for u in U.basis]) + Z
        cores.append(_lie_core(L, H))
    K = SubModule(L.module, [x for C in cores for x in C.basis])
    N = L.center_of(K) if cores else SubModule(L.module, [])
    cyclic = []
    if L.f > 1:
        cur = N
        for z in Z.basis:
            if not cur.contains(z):
                cyclic.append(L.span([z]))
                cur = cur + cyclic[-1]
    else:
        Zm = AbelianModule(L.p, Z.basis_exps)
        Nz = SubModule(Zm, [Z.coords(x) for x in N.basis])
        X, Y = minimal_direct_factor(Zm, Nz)
        span = Nz + SubModule(Zm, [Zm.scale(L.p, x) for x in X.basis])
        chosen = []
        for x in X.basis:
            new = span + SubModule(Zm, [x])
            if new.order_exp > span.order_exp:
                chosen.append(x)
                span = new
        cyclic = [SubModule(L.module, [Z.element(x)]) for x in chosen + Y.basis]
    D = LieDecomposition(L, cores + cyclic, len(parts))
    v = D.check()
    if not v:
        raise AssertionError(f"Lie decomposition failed: {v.witness}")
    return D


# -- exhaustive oracle ---------------------------------------------------------------------


def default_oracle_bound(p: int) -> int:
    return ORACLE_BOUNDS.get(p, p**4)


def brute_force_oracle(P: ClassTwoGroup, bound: int | None = None) -> int:
    """Maximum central decomposition size by exhaustive search over Burnside bases.

    Shrinking members to generators shows that a maximum decomposition comes
    from a set of elements mapping onto a basis of ``P/Phi(P)``, split into the
    connected components of its non-commutation graph. Independent central
    elements only add isolated vertices, so a basis of ``Z(P)Phi(P)/Phi(P)`` is
    fixed and the search runs over lifts of a basis of ``P/Z(P)Phi(P)``.
    """
    bound = default_oracle_bound(P.p) if bound is None else bound
    if bound > ORACLE_HARD_CAP:
        raise ValueError(f"oracle bound {bound} exceeds the hard cap {ORACLE_HARD_CAP}")
    if P.order > bound:
        raise ValueError(f"group order {P.order} exceeds the oracle bound {bound}")
    if P.order == 1:
        return 0
    U = AbelianSection(P.whole, P.frattini)
    d = U.module.rank
    if P.is_abelian():
        return d
    c = SubModule(U.module, [U.coords(z) for z in P.center.igs]).order_exp
    T = AbelianSection(P.whole, P.center.join(P.frattini))
    V = P.V
    elts = []
    for u in V.module.elements():
        g = V.lift(u)
        t = np.array(T.coords(g), dtype=np.int64)
        # one representative per line: commutation with x^k (k a unit) matches x
        if t.any() and t[np.flatnonzero(t)[0]] == 1:
            elts.append((g, t))
    m = len(elts)
    clash = [[any(P.comm(elts[i][0], elts[j][0])) for j in range(m)] for i in range(m)]
    dprime = T.module.rank
    best = 0

    def components(idx: list[int]) -> int:
        parent = list(range(len(idx)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                if clash[idx[a]][idx[b]]:
                    parent[find(a)] = find(b)
        return len({find(a) for a in range(len(idx))})

    def rank(rows) -> int:
        return fp_rank(np.array(rows, dtype=np.int64), P.p) if rows else 0

    cap = dprime // 2

    def grow(idx: list[int], rows: list, start: int) -> None:
        nonlocal best
        if best >= cap:
            return
        k = len(idx)
        if k == dprime:
            best = max(best, components(idx))
            return
        if components(idx) + (dprime - k) <= best:
            return
        for i in range(start, m):
            if m - i < dprime - k:
                return
            new = rows + [elts[i][1]]
            if rank(new) == k + 1:
                grow(idx + [i], new, i + 1)

    grow([], [], 0)
    return c + best
