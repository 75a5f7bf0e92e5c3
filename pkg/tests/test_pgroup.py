import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from centraldecomp.corpus import (
    d8_d8,
    dihedral8,
    exchange_group,
    extraspecial,
    orthogonal_group,
    quaternion8,
    r_group,
    tang_group,
    unitary_group,
    abelian_group,
    cyclic,
)
from centraldecomp.pgroup import (
    ClassTwoGroup,
    PresentationError,
    central_product,
    group_from_json,
    group_to_json,
    is_central_decomposition,
)
from centraldecomp.zlinalg import SubModule
from helpers import random_class2


def brute_center(P):
    els = list(P.elements())
    return [z for z in els if all(P.mul(z, g) == P.mul(g, z) for g in P.gens)]


def brute_subgroup(P, gens):
    seen = {P.identity}
    frontier = [P.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = P.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def mult_table(P):
    els = list(P.elements())
    index = {x: i for i, x in enumerate(els)}
    T = np.array([[index[P.mul(x, y)] for y in els] for x in els], dtype=np.int32)
    return els, T


SMALL = [
    ("D8", dihedral8),
    ("Q8", quaternion8),
    ("D8oD8", d8_d8),
    ("Or2", lambda: orthogonal_group(2)),
    ("ex3", lambda: extraspecial(3)),
    ("E2", lambda: exchange_group(2)),
    ("Or3", lambda: orthogonal_group(3)),
]


@pytest.mark.parametrize("name,build", SMALL)
def test_multiplication_table_is_a_group(name, build):
    P = build()
    els, T = mult_table(P)
    N = len(els)
    assert N == P.order
    # latin square and identity
    assert all(len(set(row)) == N for row in T.tolist())
    e = els.index(P.identity)
    assert (T[e] == np.arange(N)).all()
    if N <= 2**8:
        a = np.arange(N)
        for x in range(N):
            lhs = T[T[x][:, None].repeat(N, 1), a[None, :]]
            rhs = T[x][T]
            assert (lhs == rhs).all()
    else:
        rng = random.Random(3)
        for _ in range(20000):
            x, y, z = (rng.randrange(N) for _ in range(3))
            assert T[T[x, y], z] == T[x, T[y, z]]
    for x in els:
        assert P.mul(x, P.inv(x)) == P.identity


@pytest.mark.parametrize("name,build", SMALL + [("U3", lambda: unitary_group(3)), ("R5", lambda: r_group(5)), ("Tang", tang_group)])
def test_fast_collector_matches_general(name, build):
    P = build()
    rng = random.Random(17)
    for _ in range(150):
        x, y = P.random_element(rng), P.random_element(rng)
        assert P.mul(x, y) == P._mul_general(x, y)


def test_collect_examples():
    for p in (2, 3, 5):
        P = extraspecial(p)
        assert P.collect(["b", "a"]) == P.collect(["a", "b", ("c", p - 1)]) == (1, 1, p - 1)
        assert P.collect([]) == P.identity
        O = orthogonal_group(p)
        assert O.collect([("a", p)]) == O.identity
        assert O.collect(["a^-1", "a"]) == O.identity


def test_orders_and_special_structure():
    for p in (2, 3, 5):
        for build, order in ((orthogonal_group, p**6), (exchange_group, p**8)):
            P = build(p)
            assert P.order == order
            assert P.center == P.derived == P.frattini
        assert extraspecial(p).center.order == p
        assert r_group(p).order == p**9
    for p in (3, 5, 7):
        U = unitary_group(p)
        assert U.order == p**10
        assert U.center == U.derived == U.frattini
    assert tang_group().order == 2**12
    R3 = r_group(3)
    assert R3.center.order == 3**6 and R3.derived.order == 27 and R3.frattini == R3.derived


@pytest.mark.parametrize("name,build", SMALL)
def test_center_matches_brute_force(name, build):
    P = build()
    Z = brute_center(P)
    assert len(Z) == P.center.order
    assert all(P.center.contains(z) for z in Z)


def test_center_abelian_and_cyclic():
    A = abelian_group(3, [1, 2])
    assert A.center.order == A.order
    assert A.derived.order == 1 and A.frattini.order == 3
    C = cyclic(5, 2)
    assert C.order == 25
    assert C.frattini == C.subgroup([C.pow(C.gen(0), 5)])
    assert C.element_order(C.gen(0)) == 25
    b = A.bi_map()
    assert b.V.rank == 0


def test_bi_map_examples():
    for p in (2, 3, 5):
        b = orthogonal_group(p).bi_map()
        assert b.evaluate((1, 0, 0), (0, 1, 0)) == (1, 0, 0)
        assert b.evaluate((1, 0, 0), (0, 0, 1)) == (0, 1, 0)
        assert b.evaluate((0, 1, 0), (0, 0, 1)) == (0, 0, 1)
        assert b.is_alternating()
        E = exchange_group(p).bi_map()
        expect = [[None, None, (1, 0, 0, 0), (0, 1, 0, 0)], [None, None, (0, 0, 1, 0), (0, 0, 0, 1)]]
        for x in range(2):
            for y in range(2, 4):
                assert E.B[x][y] == expect[x][y]
        assert not any(E.B[0][1]) and not any(E.B[2][3])


def test_bi_map_full():
    R3 = r_group(3)
    full = R3.bi_map_full()
    assert full.V.exps == (1,) * 6
    assert full.radical.rank == 3
    O = orthogonal_group(3)
    assert O.bi_map_full() == O.bi_map()
    A = abelian_group(2, [1, 1])
    assert all(not any(c) for row in A.bi_map_full().B for c in row)


def test_pullback_examples():
    P = r_group(5)
    V = P.V.module
    assert P.pullback_subgroup(V.whole()).order == P.order
    assert P.pullback_subgroup(V.zero_sub()) == P.center
    E = SubModule(V, [(1, 0, 0, -1, 0, 0), (0, 1, 0, 0, -1, 0), (0, 0, 1, 0, 0, -1)])
    H = P.pullback_subgroup(E)
    w = lambda s: P.collect(s)
    expect = P.subgroup([w(["a", "d^-1"]), w(["b", "e^-1"]), w(["c", "f^-1"])] + P.center.igs)
    assert H == expect
    assert H.order == 5**6


def test_pullback_round_trip():
    P = r_group(5)
    rng = random.Random(5)
    V = P.V
    for _ in range(20):
        U = SubModule(V.module, [[rng.randrange(5) for _ in range(6)] for _ in range(rng.randint(0, 3))])
        H = P.pullback_subgroup(U)
        back = SubModule(V.module, [V.coords(h) for h in H.igs])
        assert back == U
        assert P.center.le(H)


def test_central_decomposition_checks():
    P = tang_group()
    w = P.collect
    parts = [
        P.subgroup([w(["d_1", "s_2"]), w(["e_1", "t_2"]), w(["f_1", "u_2"])]),
        P.subgroup([w(["a_1", "d_1", "s_2"]), w(["b_1", "e_1", "t_2"]), w(["c_1", "f_1", "u_2"])]),
        P.subgroup([w(["a_1", "s_2"]), w(["b_1", "t_2"]), w(["c_1", "u_2"])]),
    ]
    assert is_central_decomposition(P, parts)
    for H in parts:
        assert H.order == 2**6
        Hg = H.presentation
        assert Hg.center.order == 8 and Hg.derived.order == 8
    assert is_central_decomposition(P, [P.whole])
    v = is_central_decomposition(P, [P.whole, P.center])
    assert not v and "redundant" in v.witness
    v = is_central_decomposition(P, parts[:2])
    assert not v and "generate" in v.witness
    D = dihedral8()
    v = is_central_decomposition(D, [D.subgroup([D.gen(0)]), D.subgroup([D.gen(1)])])
    assert not v and "commute" in v.witness


def test_central_product_examples():
    for p in (2, 3, 5):
        X = extraspecial(p)
        Y = central_product([X, X], exponents=[1, 1])
        assert Y.order == p**5
        assert Y.center.order == p and Y.derived.order == p
        assert central_product([X], exponents=[1]) is X
    O = orthogonal_group(2)
    T = central_product([O, O, O], exponents=[1, 1, 1])
    assert T.order == 2**12 and T.center.order == 8


def test_d8d8_q8q8():
    Q = quaternion8()
    QQ = central_product([Q, Q], exponents=[1, 1])
    DD = d8_d8()
    # same order and the same number of involutions identifies the plus type
    inv = lambda G: sum(1 for x in G.elements() if any(x) and G.element_order(x) == 2)
    assert QQ.order == DD.order == 32
    assert inv(QQ) == inv(DD)


def test_json_round_trip_and_errors():
    P = r_group(3)
    data = group_to_json(P)
    Q = group_from_json(data)
    assert group_to_json(Q) == data
    bad = dict(data, relative_orders=[3] * 8 + [6])
    with pytest.raises(PresentationError, match="relative_orders"):
        group_from_json(bad)
    bad = dict(data, commutators={"a,b": {"x": 1}})
    with pytest.raises(PresentationError, match="later"):
        group_from_json(bad)


def test_inconsistent_presentations_rejected():
    # a^p = b forces [b, a] = 1
    with pytest.raises(PresentationError, match="inconsistent|commute"):
        ClassTwoGroup(3, [1, 1, 1], {0: [0, 1, 0]}, {(1, 0): [0, 0, 1]}, ["a", "b", "c"])
    # class 3
    with pytest.raises(PresentationError, match="class"):
        ClassTwoGroup(3, [1, 1, 1, 1], {}, {(1, 0): [0, 0, 1, 0], (2, 0): [0, 0, 0, 1]}, ["a", "b", "c", "d"])
    with pytest.raises(PresentationError):
        ClassTwoGroup(3, [1, 1], {}, {(1, 0): [1, 0]})


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(2, 4), st.integers(1, 3), st.integers(0, 10**9))
def test_random_presentations(p, k, c, seed):
    rng = random.Random(seed)
    P = random_class2(p, k, c, rng)
    x, y, z = (P.random_element(rng) for _ in range(3))
    assert P.mul(P.mul(x, y), z) == P.mul(x, P.mul(y, z))
    assert P.mul(x, y) == P._mul_general(x, y)
    # class-2 power law (xy)^m = x^m y^m [y, x]^{m(m-1)/2}
    m = rng.randint(2, 6)
    lhs = P.pow(P.mul(x, y), m)
    rhs = P.mul(P.mul(P.pow(x, m), P.pow(y, m)), P.pow(P.comm(y, x), m * (m - 1) // 2))
    assert lhs == rhs
    # commutation is central and bilinear
    cxy = P.comm(x, y)
    assert all(P.mul(cxy, g) == P.mul(g, cxy) for g in P.gens)
    assert P.comm(P.mul(x, z), y) == P.mul(P.comm(x, y), P.comm(z, y))
    b = P.bi_map()
    assert b.is_alternating()
    assert P.center.order * b.V.order == P.order
    if P.order <= 3**5:
        assert len(brute_center(P)) == P.center.order
