"""Plane curves over F_p: bivariate polynomials, rational maps and columns.

A curve ``P(x, y) = 0`` is stored as its *column table*: for every residue
``x`` the sorted list of ``y`` with ``P(x, y) = 0``.  Every short sum in the
package is a sum over a contiguous run of columns.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import polyroots
from .ff_char import mod_inv_vec

POLE = None  # value returned by rational_eval at a pole


@dataclass(frozen=True)
class BivarPoly:
    """Polynomial ``sum c * x^i * y^j`` with coefficients reduced mod ``p``.

    ``terms`` is a sorted tuple of ``(i, j, c)`` with distinct ``(i, j)``
    and nonzero ``c``; an empty tuple is the zero polynomial.
    """

    p: int
    terms: tuple[tuple[int, int, int], ...]

    @classmethod
    def from_terms(cls, triples: Iterable[Sequence[int]], p: int) -> "BivarPoly":
        acc: dict[tuple[int, int], int] = {}
        for t in triples:
            if len(t) != 3:
                raise ValueError(f"polynomial term must be [i, j, c], got {list(t)!r}")
            i, j, c = (int(v) for v in t)
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term {list(t)!r}")
            acc[i, j] = (acc.get((i, j), 0) + c) % p
        terms = tuple(sorted((i, j, c) for (i, j), c in acc.items() if c))
        return cls(p, terms)

    @classmethod
    def constant(cls, c: int, p: int) -> "BivarPoly":
        return cls.from_terms([(0, 0, c)], p)

    def to_list(self) -> list[list[int]]:
        return [list(t) for t in self.terms]

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((i + j for i, j, _ in self.terms), default=0)

    @property
    def deg_y(self) -> int:
        return max((j for _, j, _ in self.terms), default=0)

    @property
    def deg_x(self) -> int:
        return max((i for i, _, _ in self.terms), default=0)

    def y_coeffs(self) -> list[list[int]]:
        """Coefficients of ``y^0 .. y^degY`` as univariate polynomials in x."""
        out = [[0] * (self.deg_x + 1) for _ in range(self.deg_y + 1)]
        for i, j, c in self.terms:
            out[j][i] = c
        return [polyroots.trim(r) for r in out]

    def shift_x(self, delta: int) -> "BivarPoly":
        """The polynomial ``P(x + delta, y)``."""
        p = self.p
        acc = []
        for i, j, c in self.terms:
            for k in range(i + 1):
                acc.append((k, j, c * math.comb(i, k) * pow(delta, i - k, p)))
        return BivarPoly.from_terms(acc, p)

    def __call__(self, x: int, y: int) -> int:
        return poly_eval(self, x, y)

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Vectorised evaluation on int64 arrays of residues."""
        p = self.p
        x = np.asarray(x, dtype=np.int64) % p
        y = np.asarray(y, dtype=np.int64) % p
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        if not self.terms:
            return out
        xp = _powers(x, self.deg_x, p)
        yp = _powers(y, self.deg_y, p)
        for i, j, c in self.terms:
            out = (out + c * (xp[i] * yp[j] % p)) % p
        return out


def _powers(v: np.ndarray, n: int, p: int) -> list[np.ndarray]:
    out = [np.ones_like(v)]
    for _ in range(n):
        out.append(out[-1] * v % p)
    return out


def poly_eval(q: BivarPoly, x: int, y: int) -> int:
    """Horner in y, with each y-coefficient evaluated by Horner in x."""
    p = q.p
    x %= p
    y %= p
    acc = 0
    for coeff in reversed(q.y_coeffs()):
        acc = (acc * y + polyroots.evaluate(coeff, x, p)) % p
    return acc


def shares_factor(a: BivarPoly, b: BivarPoly) -> bool | None:
    """Whether ``a`` and ``b`` have a nonconstant common factor in F_p[x, y].

    Factors free of y are found from the gcd of the x-contents.  Factors
    involving y exist iff ``Res_y(a, b)`` vanishes identically in x, tested by
    specialising x at points where both leading coefficients survive.  Returns
    None if p is too small to decide.
    """
    p = a.p
    ca, cb = a.y_coeffs(), b.y_coeffs()

    def content(cs):
        g: list[int] = []
        for c in cs:
            g = polyroots.gcd(g, c, p) if g else polyroots.monic(list(c), p)
        return g

    if polyroots.deg(polyroots.gcd(content(ca), content(cb), p)) > 0:
        return True
    if a.deg_y == 0 or b.deg_y == 0:
        return False
    bound = a.degree * b.degree
    checked = 0
    for x0 in range(p):
        if polyroots.evaluate(ca[-1], x0, p) == 0 or polyroots.evaluate(cb[-1], x0, p) == 0:
            continue
        ua = [polyroots.evaluate(c, x0, p) for c in ca]
        ub = [polyroots.evaluate(c, x0, p) for c in cb]
        if polyroots.resultant(ua, ub, p):
            return False
        checked += 1
        if checked > bound:
            return True
    return None


@dataclass(frozen=True)
class RationalMap:
    """``num / den`` as a function on the plane; evaluates to POLE where den = 0."""

    num: BivarPoly
    den: BivarPoly

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("rational map has identically zero denominator")
        if self.num.p != self.den.p:
            raise ValueError("numerator and denominator over different fields")
        if (
            not self.num.is_zero
            and self.den.degree > 0
            and max(self.num.degree, self.den.degree) <= 8
            and shares_factor(self.num, self.den)
        ):
            raise ValueError("numerator and denominator share a common factor")

    @classmethod
    def poly(cls, q: BivarPoly) -> "RationalMap":
        return cls(q, BivarPoly.constant(1, q.p))

    @classmethod
    def constant(cls, c: int, p: int) -> "RationalMap":
        return cls.poly(BivarPoly.constant(c, p))

    @classmethod
    def from_spec(cls, spec, p: int) -> "RationalMap":
        """Parse ``[[i, j, c], ...]`` or ``{"num": [...], "den": [...]}``."""
        if isinstance(spec, dict):
            unknown = set(spec) - {"num", "den"}
            if unknown or "num" not in spec:
                raise ValueError(f"rational map needs keys num[, den], got {sorted(spec)}")
            num = BivarPoly.from_terms(spec["num"], p)
            den = BivarPoly.from_terms(spec.get("den", [[0, 0, 1]]), p)
            return cls(num, den)
        return cls.poly(BivarPoly.from_terms(spec, p))

    def to_spec(self) -> dict:
        return {"num": self.num.to_list(), "den": self.den.to_list()}

    @property
    def p(self) -> int:
        return self.num.p

    @property
    def d_den(self) -> int:
        return self.den.degree

    @property
    def depends_on_y(self) -> bool:
        return self.num.deg_y > 0 or self.den.deg_y > 0

    def shift_x(self, delta: int) -> "RationalMap":
        return RationalMap(self.num.shift_x(delta), self.den.shift_x(delta))

    def __call__(self, x: int, y: int):
        return rational_eval(self, x, y)

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised values and a boolean pole mask (values are 0 at poles)."""
        p = self.p
        n = self.num.evaluate(x, y)
        d = self.den.evaluate(x, y)
        pole = d == 0
        return np.where(pole, 0, n * mod_inv_vec(d, p) % p), pole


def rational_eval(m: RationalMap, x: int, y: int):
    """``num(x, y) / den(x, y)`` mod p, or POLE when the denominator vanishes."""
    d = poly_eval(m.den, x, y)
    if d == 0:
        return POLE
    return poly_eval(m.num, x, y) * pow(d, -1, m.p) % m.p


# ---------------------------------------------------------------------------
# column tables


@dataclass(frozen=True, eq=False)
class CurveColumns:
    """CSR table of the affine F_p-points of a curve, grouped by x.

    Column ``x`` is ``ys[offsets[x]:offsets[x + 1]]``, sorted ascending.
    """

    p: int
    curve: BivarPoly
    offsets: np.ndarray
    ys: np.ndarray
    strategy: str

    def __post_init__(self):
        self.offsets.flags.writeable = False
        self.ys.flags.writeable = False

    def __getitem__(self, x: int) -> np.ndarray:
        x %= self.p
        return self.ys[self.offsets[x] : self.offsets[x + 1]]

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def xs(self) -> np.ndarray:
        """x-coordinate of every stored point, aligned with ``ys``."""
        return np.repeat(np.arange(self.p, dtype=np.int64), self.counts)

    @property
    def n_points(self) -> int:
        return int(self.offsets[-1])

    def as_dict(self) -> dict[int, list[int]]:
        return {x: [int(y) for y in self[x]] for x in range(self.p)}

    def counts_in(self, J: tuple[int, int]) -> np.ndarray:
        """Per-column number of points with ``y`` in the half-open range J."""
        lo, hi = J
        inside = (self.ys >= lo) & (self.ys < hi)
        return np.bincount(self.xs[inside], minlength=self.p).astype(np.int64)


def _columns_from_points(p, curve, xs, ys, strategy) -> CurveColumns:
    order = np.lexsort((ys, xs))
    xs, ys = xs[order], ys[order]
    counts = np.bincount(xs, minlength=p)
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return CurveColumns(p, curve, offsets, ys.astype(np.int64), strategy)


def _is_hyperelliptic(curve: BivarPoly) -> bool:
    return curve.deg_y == 2 and all(j in (0, 2) for _, j, _ in curve.terms) and all(
        i == 0 for i, j, _ in curve.terms if j == 2
    )


def select_strategy(curve: BivarPoly) -> str:
    if curve.deg_y == 1:
        return "graph"
    if _is_hyperelliptic(curve):
        return "hyperelliptic"
    return "generic"


def _coeff_table(curve: BivarPoly) -> np.ndarray:
    """Array ``C[x, j]`` = coefficient of y^j in P(x, y), all x."""
    p = curve.p
    x = np.arange(p, dtype=np.int64)
    table = np.zeros((p, curve.deg_y + 1), dtype=np.int64)
    xp = _powers(x, curve.deg_x, p)
    for i, j, c in curve.terms:
        table[:, j] = (table[:, j] + c * xp[i]) % p
    return table


def _enum_graph(curve: BivarPoly):
    p = curve.p
    C = _coeff_table(curve)
    a, b = C[:, 1], C[:, 0]
    x = np.arange(p, dtype=np.int64)
    ok = a != 0
    y = (-b[ok]) * mod_inv_vec(a[ok], p) % p
    xs, ys = [x[ok]], [y]
    full = np.flatnonzero((a == 0) & (b == 0))
    for x0 in full:
        xs.append(np.full(p, x0, dtype=np.int64))
        ys.append(np.arange(p, dtype=np.int64))
    return np.concatenate(xs), np.concatenate(ys)


def _enum_hyperelliptic(curve: BivarPoly):
    p = curve.p
    C = _coeff_table(curve)
    lead = int(C[0, 2])
    target = (-C[:, 0]) * pow(lead, -1, p) % p
    # square-root table: all y grouped by y^2
    y = np.arange(p, dtype=np.int64)
    sq = y * y % p
    order = np.argsort(sq, kind="stable")
    start = np.searchsorted(sq[order], np.arange(p + 1))
    xs, ys = [], []
    nroots = start[target + 1] - start[target]
    for k in (1, 2):
        sel = np.flatnonzero(nroots >= k)
        xs.append(sel)
        ys.append(order[start[target[sel]] + k - 1])
    return np.concatenate(xs), np.concatenate(ys)


def _frobenius_all(Q: np.ndarray, p: int) -> np.ndarray:
    """``Y^p mod Q_x(Y)`` for a stack of monic polynomials of equal degree n.

    Q has shape (m, n + 1) with Q[:, n] == 1; returns shape (m, n).
    """
    m, n = Q.shape[0], Q.shape[1] - 1

    def reduce(R):
        for k in range(R.shape[1] - 1, n - 1, -1):
            c = R[:, k]
            for j in range(n):
                R[:, k - n + j] = (R[:, k - n + j] - c * Q[:, j]) % p
        return R[:, :n]

    def mulmod(A, B):
        R = np.zeros((m, 2 * n - 1), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                R[:, i + j] = (R[:, i + j] + A[:, i] * B[:, j] % p) % p
        return reduce(R)

    result = np.zeros((m, n), dtype=np.int64)
    result[:, 0] = 1
    base = np.zeros((m, max(n, 2)), dtype=np.int64)
    base[:, 1] = 1
    base = reduce(base) if n <= 1 else base[:, :n]
    e = p
    while e:
        if e & 1:
            result = mulmod(result, base)
        e >>= 1
        if e:
            base = mulmod(base, base)
    return result


def _enum_generic(curve: BivarPoly, rng: random.Random):
    p = curve.p
    n = curve.deg_y
    C = _coeff_table(curve)
    lc = C[:, n]
    good = np.flatnonzero(lc != 0)
    inv = mod_inv_vec(lc[good], p)
    Q = C[good] * inv[:, None] % p
    frob = _frobenius_all(Q, p)
    xs, ys = [], []
    for row, x0 in enumerate(good):
        f = [int(v) for v in Q[row]]
        for y0 in polyroots.roots_from_frobenius(f, polyroots.trim([int(v) for v in frob[row]]), p, rng):
            xs.append(int(x0))
            ys.append(y0)
    for x0 in np.flatnonzero(lc == 0):
        f = polyroots.trim([int(v) for v in C[x0]])
        col = range(p) if not f else polyroots.roots(f, p, rng)
        for y0 in col:
            xs.append(int(x0))
            ys.append(int(y0))
    return np.array(xs, dtype=np.int64), np.array(ys, dtype=np.int64)


def _enum_scan(curve: BivarPoly):
    p = curve.p
    y = np.arange(p, dtype=np.int64)
    xs, ys = [], []
    for x0 in range(p):
        hit = np.flatnonzero(curve.evaluate(np.int64(x0), y) == 0)
        xs.append(np.full(hit.size, x0, dtype=np.int64))
        ys.append(hit)
    return np.concatenate(xs), np.concatenate(ys)


def enumerate_columns(curve: BivarPoly, strategy: str = "auto", seed: int = 0) -> CurveColumns:
    """All affine F_p-points of ``curve``, grouped by x.

    ``strategy`` is one of ``auto``, ``graph``, ``hyperelliptic``, ``generic``,
    ``scan``.  ``seed`` drives the randomized root splitting of ``generic``; the
    output is sorted so it does not depend on the seed.
    """
    if curve.deg_y < 1:
        raise ValueError("curve equation must have degree >= 1 in y")
    if strategy == "auto":
        strategy = select_strategy(curve)
    if strategy == "graph":
        if curve.deg_y != 1:
            raise ValueError("graph strategy needs degY == 1")
        xs, ys = _enum_graph(curve)
    elif strategy == "hyperelliptic":
        if not _is_hyperelliptic(curve):
            raise ValueError("hyperelliptic strategy needs P = c*y^2 + q(x)")
        xs, ys = _enum_hyperelliptic(curve)
    elif strategy == "generic":
        xs, ys = _enum_generic(curve, random.Random(seed))
    elif strategy == "scan":
        xs, ys = _enum_scan(curve)
    else:
        raise ValueError(f"unknown enumeration strategy {strategy!r}")
    return _columns_from_points(curve.p, curve, xs, ys, strategy)


def interval_J(alpha: float, beta: float, p: int) -> tuple[int, int]:
    """Residue range ``[ceil(alpha p), floor(beta p))`` for J = [alpha p, beta p)."""
    if not 0 <= alpha < beta <= 1:
        raise ValueError(f"need 0 <= alpha < beta <= 1, got {alpha}, {beta}")
    return math.ceil(alpha * p), math.floor(beta * p)


def window_residues(xlo: int, H: int, p: int) -> np.ndarray:
    """Cyclic window ``{xlo + 1, ..., xlo + H} mod p``."""
    return (xlo + 1 + np.arange(H, dtype=np.int64)) % p


def count_points_rect(cols: CurveColumns, xlo: int, H: int, J: tuple[int, int]) -> int:
    """Number of curve points with x in the window after ``xlo`` and y in J."""
    if H < 0:
        raise ValueError("window length must be nonnegative")
    if H == 0:
        return 0
    return int(cols.counts_in(J)[window_residues(xlo, H, cols.p)].sum())
