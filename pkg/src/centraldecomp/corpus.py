"""Reference presentations used by the tests, the acceptance gate and the CLI."""
from __future__ import annotations

from .pgroup import ClassTwoGroup, central_product, direct_product, quotient_by_central


def _special(p: int, top: list[str], central: list[str], comms: dict[str, dict[str, int]],
             powers: dict[str, dict[str, int]] | None = None, validate: bool = True) -> ClassTwoGroup:
    """Top generators of order p over an elementary abelian central ``central``.

    ``comms["a,b"] = {"x": k}`` means ``[a, b] = x^k`` with ``a`` before ``b``.
    """
    names = top + central
    idx = {nm: i for i, nm in enumerate(names)}
    n = len(names)
    tails = {}
    for key, word in comms.items():
        a, b = key.split(",")
        i, j = idx[a], idx[b]
        if not i < j:
            raise ValueError(f"write commutators with the earlier generator first: {key}")
        w = [0] * n
        for z, k in word.items():
            # [b, a] = [a, b]^-1 and the letters are central of order p
            w[idx[z]] = (-k) % p
        if any(w):
            tails[(j, i)] = w
    pw = {}
    for g, word in (powers or {}).items():
        w = [0] * n
        for z, k in word.items():
            w[idx[z]] = k % p
        pw[idx[g]] = w
    return ClassTwoGroup(p, [1] * n, pw, tails, names, validate=validate)


def orthogonal_group(p: int) -> ClassTwoGroup:
    """The free class-2 exponent-p-type group on three generators, order p^6."""
    return _special(p, ["a", "b", "c"], ["x", "y", "z"], {"a,b": {"x": 1}, "a,c": {"y": 1}, "b,c": {"z": 1}})


def exchange_group(p: int) -> ClassTwoGroup:
    """Order p^8 with [a,c]=x, [a,d]=y, [b,c]=z, [b,d]=w and [a,b]=[c,d]=1."""
    return _special(
        p,
        ["a", "b", "c", "d"],
        ["x", "y", "z", "w"],
        {"a,c": {"x": 1}, "a,d": {"y": 1}, "b,c": {"z": 1}, "b,d": {"w": 1}},
    )


def least_nonsquare(p: int) -> int:
    squares = {a * a % p for a in range(1, p)}
    return next(w for w in range(2, p) if w not in squares)


def unitary_group(p: int, omega: int | None = None) -> ClassTwoGroup:
    """Odd ``p``; order p^10 with commutation matrix of unitary type."""
    if p == 2:
        raise ValueError("p must be odd")
    w = least_nonsquare(p) if omega is None else omega
    return _special(
        p,
        ["a", "b", "c", "d", "e", "f"],
        ["x", "y", "z", "u"],
        {
            "a,b": {"x": 1},
            "a,c": {"y": 1},
            "b,c": {"z": 1},
            "a,d": {"u": 1},
            "d,e": {"x": -w},
            "d,f": {"y": -w},
            "e,f": {"z": -w},
        },
    )


def extraspecial(p: int) -> ClassTwoGroup:
    """``p^{1+2}`` of exponent p (p odd) or ``D_8`` (p = 2): [a,b] = c."""
    return _special(p, ["a", "b"], ["c"], {"a,b": {"c": 1}})


def r_group(p: int) -> ClassTwoGroup:
    """Order p^9; the commutation matrix is [[2,1],[1,2]] tensor the orthogonal block."""
    return _special(
        p,
        ["a", "b", "c", "d", "e", "f"],
        ["x", "y", "z"],
        {
            "a,b": {"x": 2},
            "a,c": {"y": 2},
            "a,e": {"x": 1},
            "a,f": {"y": 1},
            "b,c": {"z": 2},
            "b,d": {"x": -1},
            "b,f": {"z": 1},
            "c,d": {"y": -1},
            "c,e": {"z": -1},
            "d,e": {"x": 2},
            "d,f": {"y": 2},
            "e,f": {"z": 2},
        },
    )


def tang_group() -> ClassTwoGroup:
    """``R_2 x Or_2`` modulo the identification of their derived subgroups (order 2^12)."""
    R = r_group(2)
    O = orthogonal_group(2)
    O = ClassTwoGroup(2, O.f, {}, O.comm_tail, ["s", "t", "u", "x'", "y'", "z'"])
    D = direct_product([R, O])
    # x = [a,e], y = [a,f], z = [b,f] in R_2; [s,t], [s,u], [t,u] in Or_2
    kill = [{"x_1": 1, "x'_2": 1}, {"y_1": 1, "y'_2": 1}, {"z_1": 1, "z'_2": 1}]
    P = quotient_by_central(D, [D.word(w) for w in kill])
    return P


def dihedral8() -> ClassTwoGroup:
    return _special(2, ["a", "b"], ["c"], {"a,b": {"c": 1}})


def quaternion8() -> ClassTwoGroup:
    return _special(2, ["a", "b"], ["c"], {"a,b": {"c": 1}}, powers={"a": {"c": 1}, "b": {"c": 1}})


def d8_d8() -> ClassTwoGroup:
    D = dihedral8()
    return central_product([D, D], exponents=[1, 1])


def abelian_group(p: int, exps: list[int]) -> ClassTwoGroup:
    return ClassTwoGroup(p, exps, {}, {}, [f"g{i + 1}" for i in range(len(exps))])


def cyclic(p: int, e: int) -> ClassTwoGroup:
    """``Z/p^e`` as a chain of e generators of order p."""
    powers = {i: [int(j == i + 1) for j in range(e)] for i in range(e - 1)}
    return ClassTwoGroup(p, [1] * e, powers, {}, [f"g{i + 1}" for i in range(e)])


CORPUS = {
    "Or": orthogonal_group,
    "E": exchange_group,
    "U": unitary_group,
    "extraspecial": extraspecial,
    "R": r_group,
}


def corpus_group(name: str, p: int | None = None) -> ClassTwoGroup:
    """Look up a corpus entry: ``Or``, ``E``, ``U``, ``extraspecial``, ``R`` (need p),
    or ``Tang``, ``D8``, ``Q8``, ``D8oD8``."""
    fixed = {"Tang": tang_group, "D8": dihedral8, "Q8": quaternion8, "D8oD8": d8_d8}
    if name in fixed:
        return fixed[name]()
    if name not in CORPUS:
        raise KeyError(f"unknown corpus group {name!r}")
    if p is None:
        raise ValueError(f"corpus group {name!r} needs a prime")
    return CORPUS[name](p)
