"""Auxiliary curves C_h, C°_h and the splitting of S(j1, j2) over them.

For an offset tuple ``h = (h_1, ..., h_r)`` the system ``P(x + h_i, y_i) = 0``
couples r shifted copies of the curve over a shared x.  An *identification*
assigns a label to every position; positions may share a label only if they
share an offset, and labels sharing an offset must take distinct y-values
(that is C°).  Labels are restricted-growth strings: the first position gets
label 0 and each later one reuses an earlier label or takes the next one.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .curve_geom import POLE, BivarPoly, CurveColumns, RationalMap
from .ff_char import AddChar, MultChar
from .window_sums import WindowParams, point_terms

MAX_ENUM_R = 4
MAX_PROBE_R = 3
MAX_SPLIT_ORDER = 3
MAX_SPLIT_H = 8
MAX_SPLIT_P = 1000


class GuardError(ValueError):
    """A combinatorial size guard was exceeded."""


class Irreducibility(str, enum.Enum):
    IRREDUCIBLE = "IRREDUCIBLE-LIKE"
    REDUCIBLE = "REDUCIBLE-LIKE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class AuxSystem:
    curve: BivarPoly
    h: tuple[int, ...]
    labels: tuple[int, ...]
    distinct: bool = True

    def __post_init__(self):
        if len(self.h) != len(self.labels):
            raise ValueError("one label per offset position is required")
        seen: dict[int, int] = {}
        for pos, (hi, lab) in enumerate(zip(self.h, self.labels)):
            if lab in seen:
                if seen[lab] != hi:
                    raise ValueError(
                        f"label {lab} used for distinct offsets {seen[lab]} and {hi} (position {pos})"
                    )
            elif lab != len(seen):
                raise ValueError("labels must form a restricted-growth string")
            seen[lab] = hi

    @property
    def r(self) -> int:
        return len(self.h)

    @property
    def t(self) -> tuple[int, ...]:
        """Offset of each label, in order of first occurrence."""
        out: dict[int, int] = {}
        for hi, lab in zip(self.h, self.labels):
            out.setdefault(lab, hi)
        return tuple(out[k] for k in range(len(out)))

    @property
    def n_labels(self) -> int:
        return len(self.t)

    @property
    def offset_groups(self) -> dict[int, list[int]]:
        """Labels grouped by their shared offset."""
        groups: dict[int, list[int]] = {}
        for lab, off in enumerate(self.t):
            groups.setdefault(off, []).append(lab)
        return groups

    @property
    def degree_bound(self) -> int:
        return self.curve.degree ** self.n_labels


def build_aux_system(P: BivarPoly, h: Sequence[int], labels: Sequence[int] | None = None,
                     distinct: bool = True) -> AuxSystem:
    """System P(x + t_l, y_l) = 0, one equation per label.

    ``labels`` defaults to all-distinct.  ``distinct=False`` gives C_h (no
    inequality constraints between labels sharing an offset).
    """
    h = tuple(int(v) for v in h)
    if labels is None:
        labels = tuple(range(len(h)))
    return AuxSystem(P, h, tuple(int(v) for v in labels), distinct)


def identifications(h: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Every legal label tuple for ``h``, in restricted-growth-string order."""
    h = tuple(h)
    n = len(h)

    def rec(pos, labels, offsets):
        if pos == n:
            yield tuple(labels)
            return
        for lab, off in enumerate(offsets):
            if off == h[pos]:
                labels.append(lab)
                yield from rec(pos + 1, labels, offsets)
                labels.pop()
        labels.append(len(offsets))
        offsets.append(h[pos])
        yield from rec(pos + 1, labels, offsets)
        offsets.pop()
        labels.pop()

    yield from rec(0, [], [])


def _column_lists(cols: CurveColumns, J) -> list[list[int]]:
    lo, hi = J
    return [[int(y) for y in cols[x] if lo <= y < hi] for x in range(cols.p)]


def _solutions_at(system: AuxSystem, columns: list[list[int]], x: int, p: int):
    choices = [columns[(x + off) % p] for off in system.t]
    groups = [g for g in system.offset_groups.values() if len(g) > 1] if system.distinct else []
    for ys in itertools.product(*choices):
        if all(len({ys[l] for l in g}) == len(g) for g in groups):
            yield ys


def aux_enumerate(system: AuxSystem, cols: CurveColumns, I: Sequence[int] | np.ndarray,
                  J: tuple[int, int]) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Yield ``(x, ys)`` with one y per label, for x in I and every y in J."""
    if system.r > MAX_ENUM_R:
        raise GuardError(f"r={system.r} exceeds the enumeration guard {MAX_ENUM_R}")
    columns = _column_lists(cols, J)
    for x in I:
        x = int(x)
        for ys in _solutions_at(system, columns, x, cols.p):
            yield x, ys


def _falling(n: np.ndarray, m: int) -> np.ndarray:
    out = np.ones_like(n)
    for k in range(m):
        out = out * np.clip(n - k, 0, None)
    return out


def count_points_box(system: AuxSystem, cols: CurveColumns, I, J: tuple[int, int]) -> int:
    """Number of solutions of ``system`` with x in I and all y in J.

    Counted per x as a product over offset groups: a group of m labels over a
    column holding n points contributes n(n-1)...(n-m+1) tuples in C° and
    n^m in C_h.
    """
    if system.r > MAX_ENUM_R:
        raise GuardError(f"r={system.r} exceeds the enumeration guard {MAX_ENUM_R}")
    p = cols.p
    n = cols.counts_in(J)
    I = np.asarray(I, dtype=np.int64)
    total = np.ones(I.size, dtype=np.int64)
    for off, labs in system.offset_groups.items():
        col = n[(I + off) % p]
        m = len(labs)
        total *= _falling(col, m) if system.distinct else col**m
    return int(total.sum())


@dataclass
class ProbeResult:
    h: tuple[int, ...]
    classification: Irreducibility
    count: int
    nearest_multiple: int
    band: float


def irreducibility_probe(system: AuxSystem, cols: CurveColumns) -> ProbeResult:
    """Classify C_h by how close its F_p-point count is to a multiple of p.

    All x and all y are counted on C_h (no distinctness).  A count within
    2 D^(2r) sqrt(p) of p reads as irreducible, within that band of m p for
    m >= 2 as reducible (m components defined over F_p); anything else is
    inconclusive.  A heuristic based on the Weil bound, not a certificate.
    """
    if system.r > MAX_PROBE_R:
        raise GuardError(f"r={system.r} exceeds the probe guard {MAX_PROBE_R}")
    p = cols.p
    open_sys = AuxSystem(system.curve, system.h, system.labels, distinct=False)
    count = count_points_box(open_sys, cols, np.arange(p), (0, p))
    band = 2.0 * system.curve.degree ** (2 * system.r) * math.sqrt(p)
    m = int(round(count / p))
    if abs(count - m * p) <= band and m >= 1:
        cls = Irreducibility.IRREDUCIBLE if m == 1 else Irreducibility.REDUCIBLE
    else:
        cls = Irreducibility.INCONCLUSIVE
    return ProbeResult(system.h, cls, count, m, band)


def sample_distinct_offsets(H: int, r: int, n: int, seed: int) -> list[tuple[int, ...]]:
    """``n`` uniform random r-tuples from (0, H]^r with pairwise distinct entries."""
    if r > H:
        raise ValueError("cannot draw distinct offsets with r > H")
    rng = random.Random(seed)
    return [tuple(rng.sample(range(1, H + 1), r)) for _ in range(n)]


def classify_offsets(cols: CurveColumns, hs, jobs: int = 1) -> list[ProbeResult]:
    """irreducibility_probe over many offset tuples, results in input order."""

    def one(h):
        return irreducibility_probe(build_aux_system(cols.curve, h), cols)

    if jobs <= 1:
        return [one(h) for h in hs]
    with ThreadPoolExecutor(jobs) as pool:
        return list(pool.map(one, hs))


# ---------------------------------------------------------------------------
# F, G and the splitting identity


def _split_positions(system: AuxSystem, j1: int):
    if not 0 <= j1 <= system.r:
        raise ValueError("j1 must lie between 0 and the number of positions")
    return list(zip(system.h, system.labels))[:j1], list(zip(system.h, system.labels))[j1:]


def assemble_F(f: RationalMap, system: AuxSystem, j1: int) -> Callable:
    """F(x, Y) = sum of f over the first j1 positions minus the rest; POLE if any pole."""
    plus, minus = _split_positions(system, j1)
    p = f.p

    def F(x: int, ys: Sequence[int]):
        total = 0
        for sign, part in ((1, plus), (-1, minus)):
            for off, lab in part:
                v = f(x + off, ys[lab])
                if v is POLE:
                    return POLE
                total += sign * v
        return total % p

    return F


def assemble_G(g: RationalMap, system: AuxSystem, j1: int) -> Callable:
    """G(x, Y) = product of g over the first j1 positions over the rest; POLE if undefined."""
    plus, minus = _split_positions(system, j1)
    p = g.p

    def G(x: int, ys: Sequence[int]):
        num = den = 1
        for off, lab in plus:
            v = g(x + off, ys[lab])
            if v is POLE:
                return POLE
            num = num * v % p
        for off, lab in minus:
            v = g(x + off, ys[lab])
            if v is POLE or v == 0:
                return POLE
            den = den * v % p
        return num * pow(den, -1, p) % p

    return G


def decomposed_Sj1j2(cols: CurveColumns, g: RationalMap, f: RationalMap, chi: MultChar,
                     psi: AddChar, params: WindowParams, j1: int, j2: int) -> complex:
    """S(j1, j2) summed over offsets h, identifications Y and points of C°_t(Y).

    Each term is chi(G(x, Y)) psi(F(x, Y)) evaluated with exact residue
    arithmetic; it shares no code with the window-sum path.
    """
    n = j1 + j2
    p = cols.p
    if n > MAX_SPLIT_ORDER or params.H > MAX_SPLIT_H or p > MAX_SPLIT_P:
        raise GuardError(
            f"splitting oracle limited to j1+j2 <= {MAX_SPLIT_ORDER}, H <= {MAX_SPLIT_H}, p <= {MAX_SPLIT_P}"
        )
    columns = _column_lists(cols, params.J)
    zpm1, zp = chi.field.zeta_pm1, psi.field.zeta_p
    re: list[float] = []
    im: list[float] = []
    xs = [int(x) for x in params.xs]
    for h in itertools.product(range(1, params.H + 1), repeat=n):
        for labels in identifications(h):
            system = AuxSystem(cols.curve, h, labels)
            F = assemble_F(f, system, j1)
            G = assemble_G(g, system, j1)
            for x in xs:
                for ys in _solutions_at(system, columns, x, p):
                    gv = G(x, ys)
                    fv = F(x, ys)
                    if gv is POLE or fv is POLE or gv == 0:
                        continue
                    term = zpm1[chi.exponent(gv)] * zp[psi.exponent(fv)]
                    re.append(term.real)
                    im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im))


# ---------------------------------------------------------------------------
# degeneracy


class Degeneracy(str, enum.Enum):
    OK = "OK"
    DEGENERATE = "DEGENERATE-LIKE"


@dataclass
class DegeneracyReport:
    complete_sum_modulus: float
    twisted_max_modulus: float
    twist_argmax: tuple[str, int]
    perelmuter_budget: float
    flag: Degeneracy
    n_points: int

    def as_dict(self) -> dict:
        return {
            "complete_sum_modulus": self.complete_sum_modulus,
            "twisted_max_modulus": self.twisted_max_modulus,
            "twist_argmax": list(self.twist_argmax),
            "perelmuter_budget": self.perelmuter_budget,
            "flag": self.flag.value,
            "n_points": self.n_points,
        }


def degeneracy_probe(cols: CurveColumns, g: RationalMap, f: RationalMap, chi: MultChar,
                     psi: AddChar, J: tuple[int, int] | None = None,
                     factor: float = 10.0) -> DegeneracyReport:
    """Complete sums of chi(g) psi(f) over the curve, untwisted and twisted.

    A short window is completed with the additive twists psi(a x), so the
    probe scans every a in F_p (one FFT over the column sums); when J is a
    proper subrange the y-twists psi(b y) are scanned as well.  The largest
    modulus is compared with D (D + d_g + d_f) sqrt(p) log p and flagged when
    it exceeds ``factor`` times that budget.
    """
    p = cols.p
    xs, ys, terms = point_terms(cols, g, f, chi, psi, (0, p))
    complete = abs(complex(math.fsum(terms.real), math.fsum(terms.imag)))

    def spectrum(coord):
        # |sum_P t(P) e(a coord(P) / p)| for every a
        line = np.bincount(coord, weights=terms.real, minlength=p) \
            + 1j * np.bincount(coord, weights=terms.imag, minlength=p)
        return np.abs(np.fft.ifft(line) * p)

    xspec = spectrum(xs)
    a = int(np.argmax(xspec))
    best, arg = float(xspec[a]), ("x", a)
    if J is not None and tuple(J) != (0, p):
        yspec = spectrum(ys)
        b = int(np.argmax(yspec))
        if yspec[b] > best:
            best, arg = float(yspec[b]), ("y", b)
    D = cols.curve.degree
    budget = D * (D + g.d_den + f.d_den) * math.sqrt(p) * math.log(p)
    flag = Degeneracy.DEGENERATE if best > factor * budget else Degeneracy.OK
    return DegeneracyReport(complete, best, arg, budget, flag, cols.n_points)
