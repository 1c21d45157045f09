"""Empirical moments of a window series and their predicted main terms."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

MAX_COMPLEX_ORDER = 24
MAX_REAL_ORDER = 48
MAX_SJJ_ORDER = 20


class Normalization(str, enum.Enum):
    RAW = "raw"
    COMPLEX_NORM = "complex_norm"  # divided by (H (beta - alpha) / 2)^((r+s)/2)
    REAL_NORM = "real_norm"  # divided by (H (beta - alpha))^(k/2)


@dataclass
class MomentReport:
    label: str
    order: tuple[int, ...]
    empirical: float | complex
    predicted_main: float
    normalization: Normalization = Normalization.RAW
    error_budget: float | None = None
    params: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float | None:
        if self.predicted_main == 0:
            return None
        return complex(self.empirical).real / self.predicted_main


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=complex)


def empirical_Mrs(series, r: int, s: int) -> float:
    """M(r, s) = sum over x of (Re S)^r (Im S)^s, summed with fsum."""
    if r < 0 or s < 0:
        raise ValueError("moment orders must be nonnegative")
    S = _values(series)
    return math.fsum(S.real**r * S.imag**s)


def empirical_Mk(series, k: int) -> float:
    return empirical_Mrs(series, k, 0)


def empirical_Sj1j2(series, j1: int, j2: int) -> complex:
    """S(j1, j2) = sum over x of S^j1 conj(S)^j2."""
    if j1 < 0 or j2 < 0:
        raise ValueError("moment orders must be nonnegative")
    S = _values(series)
    t = S**j1 * np.conj(S) ** j2
    return complex(math.fsum(t.real), math.fsum(t.imag))


def binomial_weights(r: int, s: int) -> dict[int, complex]:
    """Coefficients w_n with M(r, s) = sum_n w_n S(n, r + s - n)."""
    out: dict[int, complex] = {}
    pref = 1 / (2 ** (r + s) * (1j) ** s)
    for j in range(r + 1):
        for l in range(s + 1):
            w = math.comb(r, j) * math.comb(s, l) * (-1) ** (s - l)
            out[j + l] = out.get(j + l, 0) + w * pref
    return out


def bridge_Mrs(series, r: int, s: int) -> float:
    """M(r, s) rebuilt from the S(j1, j2) through the binomial expansion."""
    total = sum(w * empirical_Sj1j2(series, n, r + s - n) for n, w in binomial_weights(r, s).items())
    return complex(total).real


def central_binomial_sum(r: int, s: int) -> int:
    """sum over j + l = (r+s)/2 of C(r, j) C(s, l) (-1)^(s-l)."""
    t = (r + s) // 2
    return sum(
        math.comb(r, j) * math.comb(s, t - j) * (-1) ** (s - (t - j))
        for j in range(max(0, t - s), min(r, t) + 1)
    )


def leading_coefficient(r: int, s: int) -> Fraction:
    """Exact rational c(r, s) with E((Re Z)^r (Im Z)^s) ~ c(r, s) H^t, t = (r+s)/2.

    c = t! * central_binomial_sum / (2^(r+s) i^s); for odd s the central sum
    vanishes, for even s the power of i is the sign (-1)^(s/2).
    """
    if r < 0 or s < 0:
        raise ValueError("moment orders must be nonnegative")
    if r + s > MAX_COMPLEX_ORDER:
        raise ValueError(f"moment order r+s={r + s} exceeds cap {MAX_COMPLEX_ORDER}")
    if (r + s) % 2:
        return Fraction(0)
    t = (r + s) // 2
    cb = central_binomial_sum(r, s)
    if s % 2:
        if cb:
            raise ArithmeticError(f"non-real main term for (r, s)=({r}, {s})")
        return Fraction(0)
    sign = -1 if (s // 2) % 2 else 1
    return Fraction(math.factorial(t) * cb * sign, 2 ** (r + s))


def predicted_main_complex_exact(r: int, s: int, H: int, n_I: int, width) -> Fraction:
    """Main term of M(r, s) for complex-valued sums, as an exact rational."""
    t = (r + s) // 2
    return leading_coefficient(r, s) * H**t * n_I * Fraction(width) ** t


def predicted_main_complex(r: int, s: int, H: int, n_I: int, width: float) -> float:
    """Main term of M(r, s) for complex-valued sums (0 for odd r + s)."""
    return float(predicted_main_complex_exact(r, s, H, n_I, width))


def predicted_main_real(k: int, H: int, n_I: int, width: float) -> float:
    """Main term k! / (2^(k/2) (k/2)!) |I| (H (beta - alpha))^(k/2) of M(k), real sums."""
    if k < 0 or k > MAX_REAL_ORDER:
        raise ValueError(f"order k={k} outside [0, {MAX_REAL_ORDER}]")
    if k % 2:
        return 0.0
    h = k // 2
    mu = math.factorial(k) // (2**h * math.factorial(h))
    return float(mu * n_I * H**h) * width**h


def predicted_Sjj(j: int, H: int, n_I: int, width: float) -> float:
    """Diagonal main term j! H^j |I| (beta - alpha)^j of S(j, j)."""
    if j < 0 or j > MAX_SJJ_ORDER:
        raise ValueError(f"order j={j} outside [0, {MAX_SJJ_ORDER}]")
    return float(math.factorial(j) * H**j * n_I) * width**j


def predicted_Sj1j2_real(j1: int, j2: int, H: int, n_I: int, width: float) -> float:
    """Main term of S(j1, j2) for real sums: mu_{j1+j2} |I| (H (beta - alpha))^((j1+j2)/2)."""
    return predicted_main_real(j1 + j2, H, n_I, width)


def error_budget(r: int, s: int, H: int, n_I: int, d: int, p: int, psi_trivial: bool = False) -> float:
    """Size of the error term attached to M(r, s), implied constants set to 1."""
    n = r + s
    sq = math.sqrt(p) * math.log(p) ** (n + 1)
    if n % 2 == 0:
        t = n // 2
        return (math.factorial(t) ** 2 * H ** (t - 1) * d**n * n_I if t else 0.0) \
            + 2**t * math.factorial(t) * d ** (2 * n) * H**n * sq
    tail = d ** (2 * n) * H**n * sq
    if psi_trivial:
        m = (n - 1) // 2
        tail += math.factorial(m) * d ** (n - 1) * H**m * n_I
    return tail


def empirical_charfun(series, u: float, v: float, H: int, width: float) -> complex:
    """Mean of exp(i u Re S~ + i v Im S~), S~ = S sqrt(2 / (H (beta - alpha)))."""
    if H * width <= 0:
        raise ValueError("normalisation needs H (beta - alpha) > 0")
    S = _values(series) * math.sqrt(2.0 / (H * width))
    return complex(np.mean(np.exp(1j * (u * S.real + v * S.imag)))) if S.size else 1 + 0j


def normalized_Mrs(series, r: int, s: int, H: int, width: float) -> float:
    """M~(r, s): moments of S~ = S / sqrt(H (beta - alpha) / 2)."""
    return empirical_Mrs(series, r, s) / (H * width / 2) ** ((r + s) / 2)
