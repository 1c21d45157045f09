"""Prime fields, discrete logarithms and characters mod p.

Characters are stored as integer exponents.  A multiplicative character of
index ``k`` sends ``t`` to ``zeta_{p-1} ** (k * dlog[t])`` and an additive
character of coefficient ``c`` sends ``t`` to ``zeta_p ** (c * t)``; complex
values only appear when the precomputed root-of-unity tables are indexed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MAX_P = 1 << 26

# deterministic Miller-Rabin witnesses for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


def find_primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod an odd prime ``p``."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    cofactors = [(p - 1) // q for q in prime_factors(p - 1)]
    for g in range(2, p):
        if all(pow(g, e, p) != 1 for e in cofactors):
            return g
    raise AssertionError("unreachable: every prime field has a generator")


def mod_pow_vec(a: np.ndarray, e: int, p: int) -> np.ndarray:
    """Elementwise ``a ** e mod p`` for an int64 array (requires p < 2**31)."""
    result = np.ones_like(a, dtype=np.int64)
    base = np.asarray(a, dtype=np.int64) % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def mod_inv_vec(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise inverse mod p; zeros map to zero."""
    return mod_pow_vec(a, p - 2, p)


@dataclass(frozen=True, eq=False)
class PrimeField:
    """The field F_p with a generator, its discrete-log table and root tables."""

    p: int
    g: int = field(init=False)
    dlog: np.ndarray = field(init=False, repr=False)
    zeta_pm1: np.ndarray = field(init=False, repr=False)
    zeta_p: np.ndarray = field(init=False, repr=False)

    def __init__(self, p: int, max_p: int = DEFAULT_MAX_P):
        if p < 3 or not is_prime(p):
            raise ValueError(f"p={p} is not an odd prime")
        if p > max_p:
            raise ValueError(f"p={p} exceeds the table cap {max_p}")
        g = find_primitive_root(p)
        dlog = np.zeros(p, dtype=np.int64)
        t = 1
        for m in range(p - 1):
            dlog[t] = m
            t = t * g % p
        dlog.flags.writeable = False
        zeta_pm1 = np.exp(2j * np.pi * np.arange(p - 1) / (p - 1))
        zeta_p = np.exp(2j * np.pi * np.arange(p) / p)
        zeta_pm1.flags.writeable = False
        zeta_p.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "dlog", dlog)
        object.__setattr__(self, "zeta_pm1", zeta_pm1)
        object.__setattr__(self, "zeta_p", zeta_p)

    def inv(self, t: int) -> int:
        return pow(t % self.p, -1, self.p)


@dataclass(frozen=True, eq=False)
class MultChar:
    """Multiplicative character ``t -> exp(2 pi i k dlog(t) / (p-1))``, chi(0) = 0."""

    field: PrimeField
    k: int

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % (self.field.p - 1))

    @classmethod
    def of_order(cls, F: PrimeField, a: int) -> "MultChar":
        """The canonical character of order ``a``, index (p-1)/a."""
        if a < 1 or (F.p - 1) % a:
            raise ValueError(f"order {a} does not divide p-1={F.p - 1}")
        return cls(F, (F.p - 1) // a)

    @property
    def order(self) -> int:
        n = self.field.p - 1
        return n // math.gcd(self.k, n)

    @property
    def is_trivial(self) -> bool:
        return self.k == 0

    def exponent(self, t: int) -> int:
        """Index of chi(t) as a power of zeta_{p-1}; ``t`` must be nonzero."""
        return self.k * int(self.field.dlog[t % self.field.p]) % (self.field.p - 1)

    def exponents(self, t: np.ndarray) -> np.ndarray:
        return self.k * self.field.dlog[t] % (self.field.p - 1)

    def __call__(self, t: int) -> complex:
        t %= self.field.p
        if t == 0:
            return 0j
        return complex(self.field.zeta_pm1[self.exponent(t)])

    def values(self, t: np.ndarray) -> np.ndarray:
        """Vectorised evaluation, zero where ``t == 0``."""
        t = np.asarray(t, dtype=np.int64) % self.field.p
        out = self.field.zeta_pm1[self.exponents(t)]
        return np.where(t == 0, 0j, out)


@dataclass(frozen=True, eq=False)
class AddChar:
    """Additive character ``t -> exp(2 pi i c t / p)``."""

    field: PrimeField
    c: int

    def __post_init__(self):
        object.__setattr__(self, "c", self.c % self.field.p)

    @property
    def is_trivial(self) -> bool:
        return self.c == 0

    def exponent(self, t: int) -> int:
        return self.c * (t % self.field.p) % self.field.p

    def __call__(self, t: int) -> complex:
        return complex(self.field.zeta_p[self.exponent(t)])

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64) % self.field.p
        return self.field.zeta_p[self.c * t % self.field.p]


def chi_eval(chi: MultChar, t: int) -> complex:
    return chi(t)


def psi_eval(psi: AddChar, t: int) -> complex:
    return psi(t)
