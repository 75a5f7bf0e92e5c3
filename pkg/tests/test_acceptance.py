"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""
import json
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from centraldecomp.bilinear import adjoint_algebra  # noqa: E402
from centraldecomp.corpus import (  # noqa: E402
    corpus_group,
    cyclic,
    d8_d8,
    dihedral8,
    exchange_group,
    extraspecial,
    orthogonal_group,
    quaternion8,
    r_group,
    tang_group,
    unitary_group,
)
from centraldecomp.frames import check_frame, find_frame  # noqa: E402
from centraldecomp.gfield import (  # noqa: E402
    DETERMINISTIC,
    RANDOMIZED,
    FieldAut,
    build_field,
    kmat_inverse,
    kmat_map,
    kmat_mul,
    kmat_unit,
)
from centraldecomp.pgroup import (  # noqa: E402
    central_product,
    direct_product,
    is_central_decomposition,
    quotient_by_central,
)
from centraldecomp.pipeline import (  # noqa: E402
    brute_force_oracle,
    central_decomposition_max,
    classify_type,
    is_centrally_indecomposable,
    star_summary,
)
from centraldecomp.starring import (  # noqa: E402
    RingStructure,
    jacobson_radical,
    lift_idempotent,
    nilpotency_index,
    skolem_noether,
)
from centraldecomp.zlinalg import fp_rank  # noqa: E402
from helpers import (  # noqa: E402
    brute_radical_size,
    random_invertible,
    random_matrix_algebra,
    random_nondegenerate,
    upper_triangular_star_ring,
)

RESULTS: list[str] = []
SEED = 20261014
N_PROPERTY = 200


def report(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def timed(f, *args, **kwargs):
    t = time.perf_counter()
    out = f(*args, **kwargs)
    return out, time.perf_counter() - t


# -- 1 ------------------------------------------------------------------------------


def _adjoint_profile(P):
    R = adjoint_algebra(P.bi_map())
    S = RingStructure(R)
    return R, S, star_summary(S)


def _identity_star(R) -> bool:
    return all(R.is_self_adjoint(x) for x in R.basis)


def test_criterion_1_adjoint_rings():
    bad, slowest = [], 0.0
    for p in (2, 3, 5, 7):
        (R, S, s), t = timed(_adjoint_profile, orthogonal_group(p))
        slowest = max(slowest, t)
        if not (R.rank == 1 and _identity_star(R) and s["labels"] == ["orthogonal"]):
            bad.append(f"Or_{p}")
        (R, S, s), t = timed(_adjoint_profile, exchange_group(p))
        slowest = max(slowest, t)
        q = s["quotients"]
        if not (R.rank == 2 and len(q) == 2 and q[0]["partner"] == 1 and s["labels"] == ["exchange"]):
            bad.append(f"E_{p}")
        if p != 2:
            (R, S, s), t = timed(_adjoint_profile, unitary_group(p))
            slowest = max(slowest, t)
            q = s["quotients"]
            if not (R.rank == 2 and len(q) == 1 and q[0]["field_order"] == p * p and not _identity_star(R)
                    and s["labels"] == ["unitary"]):
                bad.append(f"U_{p}")
        (R, S, s), t = timed(_adjoint_profile, extraspecial(p))
        slowest = max(slowest, t)
        q = s["quotients"]
        if not (R.rank == 4 and len(q) == 1 and q[0]["n"] == 2 and q[0]["field_order"] == p
                and s["labels"] == ["symplectic"]):
            bad.append(f"p^(1+2), p={p}")
    report(1, not bad and slowest < 1.0,
           f"adjoint rings of Or/E/U/p^(1+2) for p in 2,3,5,7 (slowest {slowest:.2f}s < 1s)"
           + (f"; bad: {bad}" if bad else ""))


# -- 2 ------------------------------------------------------------------------------


def test_criterion_2_types():
    expect = [("orthogonal", orthogonal_group), ("exchange", exchange_group), ("unitary", unitary_group),
              ("symplectic", extraspecial)]
    bad, slowest = [], 0.0
    for p in (2, 3, 5, 7):
        for label, build in expect:
            if label == "unitary" and p == 2:
                continue
            got, t = timed(classify_type, build(p))
            slowest = max(slowest, t)
            if got != label:
                bad.append(f"{label} p={p} -> {got}")
    report(2, not bad and slowest < 1.0, f"classify_type on the four families (slowest {slowest:.2f}s < 1s)"
           + (f"; bad: {bad}" if bad else ""))


# -- 3 ------------------------------------------------------------------------------


def test_criterion_3_r_family():
    notes, ok, slowest = [], True, 0.0
    v, t = timed(is_centrally_indecomposable, r_group(2))
    slowest = max(slowest, t)
    ty = classify_type(r_group(2))
    ok &= bool(v) and ty == "symplectic"
    notes.append(f"R2 indecomposable={v.ok} type={ty}")
    for p in (2, 3, 5, 7):
        rep, t = timed(central_decomposition_max, r_group(p))
        slowest = max(slowest, t)
        orders = sorted(m["order"] for m in rep.members)
        ok &= bool(is_central_decomposition(rep.group, rep.decomposition.members))
        if p == 2:
            ok &= rep.size == 1
        elif p == 3:
            ok &= orders == [3, 3, 3, 3**6] and sum(not m["abelian"] for m in rep.members) == 1
        else:
            ok &= orders == [p**6, p**6]
        notes.append(f"R{p} size {rep.size}")
    report(3, ok and slowest < 5.0, f"{'; '.join(notes)} (slowest {slowest:.2f}s < 5s)")


# -- 4 ------------------------------------------------------------------------------


def test_criterion_4_tang():
    t0 = time.perf_counter()
    P = tang_group()
    rep = central_decomposition_max(P)
    ok = rep.size == 3 and all(m["order"] == 2**6 and not m["abelian"] for m in rep.members)
    R = P.subgroup([P.collect([g]) for g in ("a_1", "b_1", "c_1", "d_1", "e_1", "f_1")])
    O = P.subgroup([P.collect([g]) for g in ("s_2", "t_2", "u_2")])
    ok &= R.order == 2**9 and O.order == 2**6
    two = is_central_decomposition(P, [R, O])
    indec = bool(is_centrally_indecomposable(R.presentation)) and bool(is_centrally_indecomposable(O.presentation))
    elapsed = time.perf_counter() - t0
    report(4, ok and bool(two) and indec and elapsed < 30,
           f"Tang: pipeline size {rep.size} (orders {[m['order'] for m in rep.members]}); "
           f"hand-built {{R2, Or2}} valid={two.ok}, indecomposable={indec}; {elapsed:.2f}s < 30s")


# -- 5 ------------------------------------------------------------------------------


def test_criterion_5_d8d8():
    rep, t = timed(central_decomposition_max, d8_d8())
    ok = rep.size == 2 and [m["order"] for m in rep.members] == [8, 8] and not any(m["abelian"] for m in rep.members)
    report(5, ok and t < 1.0, f"D8oD8 size {rep.size}, member orders {[m['order'] for m in rep.members]} ({t:.2f}s < 1s)")


# -- 6 ------------------------------------------------------------------------------


def oracle_corpus():
    """Corpus groups within the oracle bounds (2^8 for p = 2, 3^5 for p = 3)."""
    D = direct_product([extraspecial(3), cyclic(3, 2)])
    return [
        ("D8", dihedral8()), ("Q8", quaternion8()), ("D8oD8", d8_d8()), ("Or2", orthogonal_group(2)),
        ("E2", exchange_group(2)), ("x2", extraspecial(2)), ("x3", extraspecial(3)),
        ("D8xD8", direct_product([dihedral8(), dihedral8()])),
        ("Or2xZ2", direct_product([orthogonal_group(2), cyclic(2, 1)])),
        ("Or2xZ4", direct_product([orthogonal_group(2), cyclic(2, 2)])),
        ("Q8xZ4", direct_product([quaternion8(), cyclic(2, 2)])),
        ("D8oD8oD8", central_product([dihedral8()] * 3, exponents=[1, 1, 1])),
        ("x3xZ3", direct_product([extraspecial(3), cyclic(3, 1)])),
        ("x3xZ9", D),
        ("x3oZ9", quotient_by_central(D, [D.word({"c_1": 1, "g2_2": 1})])),
    ]


def test_criterion_6_oracle_equivalence():
    t0 = time.perf_counter()
    bad = []
    groups = oracle_corpus()
    for name, P in groups:
        assert P.order <= (2**8 if P.p == 2 else 3**5)
        a = central_decomposition_max(P).size
        b = brute_force_oracle(P)
        if a != b:
            bad.append(f"{name}: {a} vs {b}")
    elapsed = time.perf_counter() - t0
    report(6, not bad, f"pipeline = oracle on {len(groups)} groups ({elapsed:.1f}s)"
           + (f"; mismatches {bad}" if bad else ""))


# -- 7 ------------------------------------------------------------------------------


def prop_adjoint_identity(rng) -> bool:
    b = random_nondegenerate(rng, ranks=(1, 4), wrank=(1, 3), exps=rng.choice([(1,), (1, 2)]))
    V = b.V
    R = adjoint_algebra(b)
    return all(
        b.evaluate(V.reduce(F[i]), V.unit(j)) == b.evaluate(V.unit(i), V.reduce(G[j]))
        for F, G in R.basis for i in range(V.rank) for j in range(V.rank))


def prop_frame_axioms(rng) -> bool:
    b = random_nondegenerate(rng, ranks=(2, 4), wrank=(1, 3), exps=rng.choice([(1,), (1, 2)]))
    R = adjoint_algebra(b)
    fr = find_frame(R, RANDOMIZED, random.Random(rng.randrange(2**31)))
    try:
        check_frame(R, fr.idempotents)
    except (AssertionError, ValueError):
        return False
    return all(R.is_idempotent(e) and R.is_self_adjoint(e) for e in fr) and len(fr.certificates) == len(fr)


def prop_lifting(rng) -> bool:
    p, E, k = rng.choice([(2, 1, 3), (2, 2, 2), (3, 1, 3), (3, 2, 2), (2, 1, 4), (5, 1, 2)])
    R = upper_triangular_star_ring(p, E, k)
    q = p**E
    flip = lambda X: tuple(tuple(X[k - 1 - j][k - 1 - i] for j in range(k)) for i in range(k))  # noqa: E731
    diag = [rng.randrange(2) for _ in range(k)]
    if rng.random() < 0.5:
        diag = [diag[min(i, k - 1 - i)] for i in range(k)]
    D = tuple(tuple(diag[i] if i == j else 0 for j in range(k)) for i in range(k))
    N = tuple(tuple((rng.randrange(q) if j > i else p * rng.randrange(q)) % q if j >= i else 0 for j in range(k))
              for i in range(k))
    e = R.add(R.reduce((D, flip(D))), R.reduce((N, flip(N))))
    n = k * E
    hat = lift_idempotent(R, e, n)
    idempotent = R.is_idempotent(hat)
    congruent = all((hat[0][i][i] - e[0][i][i]) % p == 0 for i in range(k))
    complement = R.reduce(lift_idempotent(R, R.sub(R.one, e), n)) == R.reduce(R.sub(R.one, hat))
    self_adjoint = not R.is_self_adjoint(e) or R.is_self_adjoint(hat)
    return idempotent and congruent and complement and self_adjoint


def prop_skolem_noether(rng) -> bool:
    p, e = rng.choice([(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
    K = build_field(p, e)
    n = rng.randint(1, 3)
    while True:
        T = [[K.random(rng) for _ in range(n)] for _ in range(n)]
        try:
            Ti = kmat_inverse(K, T)
            break
        except ValueError:
            pass
    sigma = FieldAut(K, rng.randrange(e))
    phi = lambda X: kmat_mul(K, kmat_mul(K, Ti, kmat_map(sigma, X)), T)  # noqa: E731
    D, s = skolem_noether(phi, K, n, RANDOMIZED, random.Random(rng.randrange(2**31)))
    Di = kmat_inverse(K, D)
    return s == sigma and all(
        phi(kmat_unit(K, n, a, c)) == kmat_mul(K, kmat_mul(K, Di, kmat_unit(K, n, a, c)), D)
        for a in range(n) for c in range(n))


def prop_radical(rng) -> bool:
    p = rng.choice([2, 3])
    A = random_matrix_algebra(rng, p, rng.randint(2, 4))
    J = jacobson_radical(A)
    try:
        nilpotency_index(A, J)
    except ValueError:
        return False
    one = np.eye(A.dim, dtype=np.int64)
    if len(J) and not (fp_rank(np.vstack([J, A.products(J, one)]), p) == len(J)
                       and fp_rank(np.vstack([J, A.products(one, J)]), p) == len(J)):
        return False
    Q, _, _ = A.quotient(J)
    if len(jacobson_radical(Q)):
        return False
    return p ** A.dim > 3**5 or brute_radical_size(A) == p ** len(J)


ISOMETRY_CORPUS = [("Or", 2), ("Or", 3), ("E", 2), ("E", 3), ("U", 3), ("extraspecial", 3), ("R", 2), ("R", 5),
                   ("Tang", None), ("D8oD8", None)]


def test_criterion_7_property_suites():
    rng = random.Random(SEED)
    counts = {}
    for name, prop in [("adjoint identity", prop_adjoint_identity), ("frame axioms", prop_frame_axioms),
                       ("idempotent lifting", prop_lifting), ("skolem-noether", prop_skolem_noether),
                       ("radical", prop_radical)]:
        counts[name] = sum(1 for _ in range(N_PROPERTY) if not prop(rng))
    iso_fail = 0
    for name, p in ISOMETRY_CORPUS:
        b = corpus_group(name, p).bi_map()
        n = len(find_frame(adjoint_algebra(b)))
        for _ in range(20):
            if len(find_frame(adjoint_algebra(b.change_basis(random_invertible(b.V, rng))))) != n:
                iso_fail += 1
    counts["isometry invariance"] = iso_fail
    total = sum(counts.values())
    report(7, total == 0, f"{N_PROPERTY} instances per suite, 20 basis changes x {len(ISOMETRY_CORPUS)} corpus "
           f"entries; failures {counts}")


# -- 8 ------------------------------------------------------------------------------


def test_criterion_8_reproducibility():
    ok = True
    for P in (r_group(5), tang_group(), d8_d8(), r_group(3)):
        a = json.dumps(central_decomposition_max(P, RANDOMIZED, seed=SEED).to_json(), sort_keys=True)
        b = json.dumps(central_decomposition_max(P, RANDOMIZED, seed=SEED).to_json(), sort_keys=True)
        c = json.dumps(central_decomposition_max(P, DETERMINISTIC).to_json(), sort_keys=True)
        d = json.dumps(central_decomposition_max(P, DETERMINISTIC, seed=99).to_json(), sort_keys=True)
        ok &= a == b and c == d
    report(8, ok, "byte-identical reports for equal seeds and for deterministic mode")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

