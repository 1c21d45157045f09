"""Dense univariate polynomials over F_p and their roots.

Polynomials are lists of residues, lowest degree first, with no trailing
zeros (the zero polynomial is ``[]``).  Roots are found the usual way:
``gcd(Y^p - Y, f)`` isolates the product of the distinct linear factors,
which is then split by random shifts ``gcd((Y + a)^((p-1)/2) - 1, .)``.
"""

from __future__ import annotations

import random


def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def normalize(a, p: int) -> list[int]:
    return trim([int(c) % p for c in a])


def deg(a: list[int]) -> int:
    return len(a) - 1


def sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return trim(out)


def mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return trim(out)


def divmod_poly(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    inv_lc = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    db = len(b) - 1
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] * inv_lc % p
        if c:
            q[k - db] = c
            for j in range(db + 1):
                r[k - db + j] = (r[k - db + j] - c * b[j]) % p
    return trim(q), trim(r[:db] if db > 0 else [])


def mod(a: list[int], b: list[int], p: int) -> list[int]:
    return divmod_poly(a, b, p)[1]


def monic(a: list[int], p: int) -> list[int]:
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def gcd(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd."""
    a, b = trim(list(a)), trim(list(b))
    while b:
        a, b = b, mod(a, b, p)
    return monic(a, p)


def powmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = mod(base, m, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), m, p)
        base = mod(mul(base, base, p), m, p)
        e >>= 1
    return mod(result, m, p)


def evaluate(a: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def resultant(a: list[int], b: list[int], p: int) -> int:
    """Resultant of two polynomials over F_p by the Euclidean algorithm."""
    a, b = trim(list(a)), trim(list(b))
    if not a or not b:
        return 0
    res = 1
    while True:
        da, db = deg(a), deg(b)
        if db == 0:
            return res * pow(b[0], da, p) % p
        r = mod(a, b, p)
        if not r:
            return 0
        # Res(a, b) = (-1)^(da*db) lc(b)^(da - dr) Res(b, r)
        dr = deg(r)
        if (da * db) % 2:
            res = -res
        res = res * pow(b[-1], da - dr, p) % p
        a, b = b, r


def split_roots(g: list[int], p: int, rng: random.Random) -> list[int]:
    """Roots of a monic squarefree ``g`` that splits into distinct linear factors."""
    if deg(g) <= 0:
        return []
    if deg(g) == 1:
        return [(-g[0]) % p]
    if p == 2:
        return [x for x in range(2) if evaluate(g, x, p) == 0]
    while True:
        a = rng.randrange(p)
        h = powmod([a, 1], (p - 1) // 2, g, p)
        d = gcd(sub(h, [1], p), g, p)
        if 0 < deg(d) < deg(g):
            other = divmod_poly(g, d, p)[0]
            return split_roots(d, p, rng) + split_roots(monic(other, p), p, rng)


def roots_from_frobenius(f: list[int], frob: list[int], p: int, rng: random.Random) -> list[int]:
    """Sorted distinct roots of ``f`` given ``frob = Y^p mod f``."""
    lin = gcd(sub(frob, [0, 1], p), f, p)
    return sorted(split_roots(lin, p, rng))


def roots(f, p: int, rng: random.Random | None = None) -> list[int]:
    """Sorted distinct roots in F_p of the nonzero polynomial ``f``."""
    f = normalize(f, p)
    if not f:
        raise ValueError("the zero polynomial has every residue as a root")
    if deg(f) == 0:
        return []
    rng = rng or random.Random(0)
    f = monic(f, p)
    return roots_from_frobenius(f, powmod([0, 1], p, f, p), p, rng)
