"""Short hybrid sums S(x) = sum of chi(g(P)) psi(f(P)) over a window of columns.

The window after ``x`` is the cyclic run of columns ``x+1, ..., x+H`` (mod p)
and only points with ``y`` in the residue range J count.  Points where ``f``
or ``g`` has a pole are dropped; a zero of ``g`` contributes chi(0) = 0.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .curve_geom import POLE, CurveColumns, RationalMap, interval_J
from .ff_char import AddChar, MultChar

RECOMPUTE_EVERY = 1024


@dataclass(frozen=True)
class WindowParams:
    p: int
    H: int
    i_start: int
    i_len: int
    alpha: float = 0.0
    beta: float = 1.0
    thetas: tuple[float, ...] = (0.0,)
    J: tuple[int, int] = field(init=False)

    def __post_init__(self):
        if not 1 <= self.H <= self.p:
            raise ValueError(f"window length H={self.H} must satisfy 1 <= H <= p")
        if self.i_len < 1:
            raise ValueError("interval I must be nonempty")
        object.__setattr__(self, "J", interval_J(self.alpha, self.beta, self.p))
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))

    @property
    def width(self) -> float:
        """beta - alpha."""
        return self.beta - self.alpha

    @property
    def xs(self) -> np.ndarray:
        return (self.i_start + np.arange(self.i_len, dtype=np.int64)) % self.p


@dataclass(frozen=True, eq=False)
class WindowSeries:
    params: WindowParams
    values: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return self.params.xs

    def __len__(self) -> int:
        return len(self.values)


def column_term_sum(cols: CurveColumns, g: RationalMap, f: RationalMap, chi: MultChar,
                    psi: AddChar, x0: int, J: tuple[int, int]) -> complex:
    """Sum of chi(g) psi(f) over the points of column ``x0`` with y in J."""
    lo, hi = J
    re, im = [], []
    for y in cols[x0]:
        y = int(y)
        if not lo <= y < hi:
            continue
        gv, fv = g(x0, y), f(x0, y)
        if gv is POLE or fv is POLE:
            continue
        t = chi(gv) * psi(fv)
        re.append(t.real)
        im.append(t.imag)
    return complex(math.fsum(re), math.fsum(im))


def naive_window_sum(cols, g, f, chi, psi, x: int, H: int, J) -> complex:
    """Reference value of S(x): one column at a time, no reuse."""
    re, im = [], []
    for h in range(1, H + 1):
        t = column_term_sum(cols, g, f, chi, psi, (x + h) % cols.p, J)
        re.append(t.real)
        im.append(t.imag)
    return complex(math.fsum(re), math.fsum(im))


def point_terms(cols: CurveColumns, g: RationalMap, f: RationalMap, chi: MultChar,
                psi: AddChar, J: tuple[int, int]):
    """Per-point values chi(g(P)) psi(f(P)) for points with y in J.

    Returns ``(xs, ys, terms)``; pole points are omitted, zeros of g give 0.
    """
    lo, hi = J
    xs, ys = cols.xs, cols.ys
    keep = (ys >= lo) & (ys < hi)
    xs, ys = xs[keep], ys[keep]
    gv, gpole = g.evaluate(xs, ys)
    fv, fpole = f.evaluate(xs, ys)
    ok = ~(gpole | fpole)
    xs, ys, gv, fv = xs[ok], ys[ok], gv[ok], fv[ok]
    return xs, ys, chi.values(gv) * psi.values(fv)


def column_sums(cols, g, f, chi, psi, J) -> np.ndarray:
    """Vector of column_term_sum over every x in [0, p)."""
    xs, _, terms = point_terms(cols, g, f, chi, psi, J)
    re = np.bincount(xs, weights=terms.real, minlength=cols.p)
    im = np.bincount(xs, weights=terms.imag, minlength=cols.p)
    return re + 1j * im


def _slide_block(csum: np.ndarray, start: int, n: int, H: int) -> np.ndarray:
    """S at ``start, ..., start + n - 1``: first window from scratch, then slide."""
    p = csum.size
    first = csum[(start + 1 + np.arange(H)) % p].sum()
    steps = np.arange(1, n)
    delta = csum[(start + steps + H) % p] - csum[(start + steps) % p]
    out = np.empty(n, dtype=complex)
    out[0] = first
    out[1:] = first + np.cumsum(delta)
    return out


def sliding_from_column_sums(csum: np.ndarray, params: WindowParams, jobs: int = 1) -> np.ndarray:
    """S(x) for x in I by the update S(x+1) = S(x) - c(x+1) + c(x+H+1).

    The window is recomputed from scratch every RECOMPUTE_EVERY steps, at
    block boundaries fixed relative to the start of I, so the result is
    bitwise the same for any number of workers.
    """
    n, H = params.i_len, params.H
    blocks = [(b, min(RECOMPUTE_EVERY, n - b)) for b in range(0, n, RECOMPUTE_EVERY)]
    out = np.empty(n, dtype=complex)

    def run(chunk):
        for b, m in chunk:
            out[b : b + m] = _slide_block(csum, (params.i_start + b) % csum.size, m, H)

    jobs = max(1, min(jobs, len(blocks)))
    chunks = [blocks[k::jobs] for k in range(jobs)]
    if jobs == 1:
        run(chunks[0])
    else:
        with ThreadPoolExecutor(jobs) as pool:
            list(pool.map(run, chunks))
    return out


def sliding_series(cols, g, f, chi, psi, params: WindowParams, jobs: int = 1) -> WindowSeries:
    csum = column_sums(cols, g, f, chi, psi, params.J)
    return WindowSeries(params, sliding_from_column_sums(csum, params, jobs))


def project_theta(series: WindowSeries, theta: float) -> np.ndarray:
    """u_theta(x) = Re(S(x) e^{-i theta}) / sqrt((beta - alpha) H)."""
    scale = series.params.width * series.params.H
    if scale <= 0:
        raise ValueError("projection needs H (beta - alpha) > 0")
    S = series.values
    rot = np.exp(-1j * theta)
    return (S * rot + np.conj(S) * np.conj(rot)).real / (2.0 * math.sqrt(scale))
