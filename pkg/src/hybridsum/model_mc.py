"""The random model Z_H = X_1 + ... + X_H, X_j i.i.d. uniform on the unit circle.

Sampling uses the Philox4x32 counter-based generator.  Samples are drawn in
fixed-size chunks, chunk ``k`` keyed by ``SeedSequence((seed, k))``, so the
stream depends only on ``seed`` and never on how chunks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .moments import leading_coefficient

CHUNK = 1 << 13
MAX_GAUSS_ORDER = 48


@dataclass(frozen=True)
class ModelConfig:
    H: int
    n_samples: int
    seed: int = 0

    def __post_init__(self):
        if self.H < 1:
            raise ValueError("model needs H >= 1")
        if self.n_samples < 1:
            raise ValueError("model needs n_samples >= 1")

    @property
    def n_chunks(self) -> int:
        return -(-self.n_samples // CHUNK)


def _chunk(config: ModelConfig, k: int) -> np.ndarray:
    n = min(CHUNK, config.n_samples - k * CHUNK)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((config.seed, k))))
    angles = 2.0 * np.pi * rng.random((n, config.H))
    return np.exp(1j * angles).sum(axis=1)


def sample_ZH(config: ModelConfig) -> Iterator[np.ndarray]:
    """Yield the samples of Z_H chunk by chunk, in order."""
    for k in range(config.n_chunks):
        yield _chunk(config, k)


def _map_chunks(config: ModelConfig, fn, jobs: int = 1) -> list:
    """Apply ``fn`` to every chunk of samples; results in chunk order."""
    ks = range(config.n_chunks)
    if jobs <= 1:
        return [fn(_chunk(config, k)) for k in ks]
    with ThreadPoolExecutor(jobs) as pool:
        return list(pool.map(lambda k: fn(_chunk(config, k)), ks))


def exact_leading_moment_fraction(r: int, s: int, H: int) -> Fraction:
    return leading_coefficient(r, s) * H ** ((r + s) // 2)


def exact_leading_moment(r: int, s: int, H: int) -> float:
    """Leading term of E((Re Z_H)^r (Im Z_H)^s).

    t! H^t / (2^(r+s) i^s) times the central binomial sum for r + s = 2t,
    and 0 for odd r + s.
    """
    return float(exact_leading_moment_fraction(r, s, H))


def mc_moments(config: ModelConfig, orders, jobs: int = 1) -> dict[tuple[int, int], float]:
    """Monte Carlo estimates of E((Re Z)^r (Im Z)^s) for each (r, s) in ``orders``."""
    orders = [tuple(o) for o in orders]

    def partial(z):
        return [math.fsum(z.real**r * z.imag**s) for r, s in orders]

    parts = _map_chunks(config, partial, jobs)
    return {o: math.fsum(p[i] for p in parts) / config.n_samples for i, o in enumerate(orders)}


def mc_charfun(config: ModelConfig, points, jobs: int = 1) -> dict[tuple[float, float], complex]:
    """Monte Carlo E(exp(i u Re Z~ + i v Im Z~)), Z~ = Z_H / sqrt(H / 2)."""
    points = [tuple(map(float, pt)) for pt in points]
    scale = 1.0 / math.sqrt(config.H / 2)

    def partial(z):
        z = z * scale
        out = []
        for u, v in points:
            e = np.exp(1j * (u * z.real + v * z.imag))
            out.append((math.fsum(e.real), math.fsum(e.imag)))
        return out

    parts = _map_chunks(config, partial, jobs)
    res = {}
    for i, pt in enumerate(points):
        re = math.fsum(p[i][0] for p in parts)
        im = math.fsum(p[i][1] for p in parts)
        res[pt] = complex(re, im) / config.n_samples
    return res


@dataclass
class CharfunCheck:
    u: float
    v: float
    mc_value: complex
    target: float

    @property
    def deviation(self) -> float:
        return abs(self.mc_value - self.target)


def model_charfun_check(u: float, v: float, H: int, config: ModelConfig, jobs: int = 1) -> CharfunCheck:
    """Compare the sampled characteristic function with exp(-(u^2 + v^2) / 2)."""
    lim = H**0.25
    if abs(u) > lim or abs(v) > lim:
        raise ValueError(f"|u|, |v| must be <= H^(1/4) = {lim:.4g}")
    if H != config.H:
        raise ValueError("H must match the model configuration")
    if u == 0 and v == 0:
        return CharfunCheck(u, v, 1 + 0j, 1.0)
    mc = mc_charfun(config, [(u, v)], jobs)[(float(u), float(v))]
    return CharfunCheck(u, v, mc, math.exp(-(u * u + v * v) / 2))


def gauss_moment_mu(k: int) -> int:
    """(k-1)!! for even k, 0 for odd k."""
    if k < 0 or k > MAX_GAUSS_ORDER:
        raise ValueError(f"order k={k} outside [0, {MAX_GAUSS_ORDER}]")
    if k % 2:
        return 0
    return math.prod(range(1, k, 2))
