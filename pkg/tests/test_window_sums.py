import cmath
import math
import random

import numpy as np
import pytest

from hybridsum.curve_geom import BivarPoly, RationalMap, count_points_rect, enumerate_columns
from hybridsum.ff_char import AddChar, MultChar, PrimeField
from hybridsum.window_sums import (
    RECOMPUTE_EVERY,
    WindowParams,
    WindowSeries,
    column_sums,
    column_term_sum,
    naive_window_sum,
    project_theta,
    sliding_from_column_sums,
    sliding_series,
)


def poly(terms, p):
    return BivarPoly.from_terms(terms, p)


def rmap(num, p, den=None):
    return RationalMap(poly(num, p), poly(den or [(0, 0, 1)], p))


def direct_S(P, g, f, k, c, x, H, J):
    """Independent oracle: scan every y of every column, plain pow/exp arithmetic."""
    p = P.p
    gen = PrimeField(p).g
    dlog = {pow(gen, m, p): m for m in range(p - 1)}
    total = 0j
    for h in range(1, H + 1):
        x0 = (x + h) % p
        for y in range(*J):
            if sum(cc * pow(x0, i, p) * pow(y, j, p) for i, j, cc in P.terms) % p:
                continue
            gv, fv = g(x0, y), f(x0, y)
            if gv is None or fv is None or gv == 0:
                continue
            total += cmath.exp(2j * math.pi * (k * dlog[gv] / (p - 1) + c * fv / p))
    return total


@pytest.fixture(scope="module")
def F7():
    return PrimeField(7)


def test_column_term_sum_examples(F7):
    p = 7
    cols = enumerate_columns(poly([(0, 1, 1), (2, 0, -1)], p))
    chi, psi = MultChar.of_order(F7, 2), AddChar(F7, 0)
    g = rmap([(0, 1, 1)], p)
    assert column_term_sum(cols, g, rmap([], p), chi, psi, 3, (0, p)) == pytest.approx(1)
    empty = enumerate_columns(poly([(1, 1, 1), (0, 0, -1)], p))
    assert column_term_sum(empty, g, rmap([], p), chi, psi, 0, (0, p)) == 0
    triv = MultChar(F7, 0)
    c = column_term_sum(cols, rmap([(0, 0, 1)], p), rmap([], p), triv, psi, 3, (0, p))
    assert c == 1 and isinstance(c, complex)


def test_zero_of_g_contributes_nothing_even_for_trivial_chi(F7):
    p = 7
    cols = enumerate_columns(poly([(0, 1, 1), (1, 0, -1)], p))
    g = rmap([(1, 0, 1)], p)  # g = x vanishes at x = 0
    triv, psi = MultChar(F7, 0), AddChar(F7, 0)
    assert column_term_sum(cols, g, rmap([], p), triv, psi, 0, (0, p)) == 0
    assert column_term_sum(cols, g, rmap([], p), triv, psi, 1, (0, p)) == 1


def test_pole_drops_point(F7):
    p = 7
    cols = enumerate_columns(poly([(0, 1, 1), (1, 0, -1)], p))
    f = rmap([(0, 0, 1)], p, den=[(1, 0, 1)])  # 1/x
    chi, psi = MultChar(F7, 0), AddChar(F7, 1)
    assert column_term_sum(cols, rmap([(0, 0, 1)], p), f, chi, psi, 0, (0, p)) == 0
    assert column_term_sum(cols, rmap([(0, 0, 1)], p), f, chi, psi, 3, (0, p)) == pytest.approx(psi(5))


def test_naive_examples():
    p = 101
    F = PrimeField(p)
    par = enumerate_columns(poly([(0, 1, 1), (2, 0, -1)], p))
    chi = MultChar.of_order(F, 2)
    assert naive_window_sum(par, rmap([(0, 0, 1)], p), rmap([], p), chi, AddChar(F, 0), 5, 0, (0, p)) == 0
    full = naive_window_sum(par, rmap([(1, 0, 1)], p), rmap([], p), chi, AddChar(F, 0), 0, p, (0, p))
    assert abs(full) < 1e-9
    hyp = enumerate_columns(poly([(1, 1, 1), (0, 0, -1)], p))
    kl = naive_window_sum(hyp, rmap([(0, 0, 1)], p), rmap([(0, 1, 1)], p), MultChar(F, 0), AddChar(F, 1), 0, 100, (0, p))
    oracle = sum(cmath.exp(2j * math.pi * pow(n, p - 2, p) / p) for n in range(1, 101))
    assert kl == pytest.approx(oracle, abs=1e-9)
    assert abs(kl) <= 2 * math.sqrt(p)


@pytest.mark.parametrize("seed", range(4))
def test_naive_matches_independent_oracle(seed):
    rng = random.Random(seed)
    p = 211
    P = poly([(0, 2, 1), (3, 0, -1), (0, 0, rng.randrange(1, p))], p)
    cols = enumerate_columns(P)
    F = PrimeField(p)
    k, c = rng.randrange(p - 1), rng.randrange(p)
    g = rmap([(1, 1, 1), (0, 0, 3)], p, den=[(0, 1, 1), (0, 0, 1)])
    f = rmap([(2, 0, 1), (0, 1, 5)], p, den=[(1, 0, 1)])
    x, H = rng.randrange(p), rng.randint(1, 30)
    J = (rng.randrange(50), rng.randrange(100, p + 1))
    got = naive_window_sum(cols, g, f, MultChar(F, k), AddChar(F, c), x, H, J)
    assert got == pytest.approx(direct_S(P, g, f, k, c, x, H, J), abs=1e-9)


def test_sliding_matches_naive_p10007():
    p = 10007
    F = PrimeField(p)
    rng = random.Random(11)
    curve = poly([(0, 2, 1), (1, 1, 3), (4, 0, 1), (1, 0, 2), (0, 0, 7)], p)
    cols = enumerate_columns(curve)
    for _ in range(5):
        chi, psi = MultChar(F, rng.randrange(p - 1)), AddChar(F, rng.randrange(p))
        g = rmap([(rng.randint(0, 2), rng.randint(0, 1), rng.randrange(1, p)), (0, 0, 1)], p)
        f = rmap([(rng.randint(0, 3), rng.randint(0, 1), rng.randrange(1, p))], p, den=[(1, 0, 1), (0, 0, 1)])
        H = rng.randint(1, 64)
        a = rng.choice([0.0, 0.25])
        prm = WindowParams(p, H, rng.randrange(p), 3000, a, a + 0.5)
        s = sliding_series(cols, g, f, chi, psi, prm)
        for i in list(range(0, 3000, 97)) + [1023, 1024, 1025, 2047, 2048, 2999]:
            x = int(prm.xs[i])
            assert abs(s.values[i] - naive_window_sum(cols, g, f, chi, psi, x, H, prm.J)) <= 1e-9 * H


def test_single_point_interval():
    p = 101
    F = PrimeField(p)
    cols = enumerate_columns(poly([(1, 1, 1), (0, 0, -1)], p))
    g, f = rmap([(0, 0, 1)], p), rmap([(0, 1, 1)], p)
    prm = WindowParams(p, 7, 55, 1)
    s = sliding_series(cols, g, f, MultChar(F, 0), AddChar(F, 1), prm)
    assert len(s) == 1
    assert s.values[0] == pytest.approx(naive_window_sum(cols, g, f, MultChar(F, 0), AddChar(F, 1), 55, 7, (0, p)))


def test_trivial_characters_count_points():
    p = 1009
    F = PrimeField(p)
    cols = enumerate_columns(poly([(0, 2, 1), (3, 0, -1), (0, 0, -1)], p))
    prm = WindowParams(p, 20, 0, p, 0.1, 0.7)
    s = sliding_series(cols, rmap([(0, 0, 1)], p), rmap([], p), MultChar(F, 0), AddChar(F, 0), prm)
    counts = [count_points_rect(cols, int(x), 20, prm.J) for x in prm.xs]
    assert np.array_equal(s.values.real, counts)
    assert not s.values.imag.any()


def test_triangle_bound():
    p = 1009
    F = PrimeField(p)
    cols = enumerate_columns(poly([(0, 2, 1), (3, 0, -1), (0, 0, -1)], p))
    prm = WindowParams(p, 25, 0, p, 0.2, 0.9)
    s = sliding_series(cols, rmap([(1, 0, 1), (0, 0, 2)], p), rmap([(0, 1, 1)], p), MultChar(F, 3), AddChar(F, 2), prm)
    counts = np.array([count_points_rect(cols, int(x), 25, prm.J) for x in prm.xs])
    assert (np.abs(s.values) <= counts + 1e-9).all()


def test_cyclic_shift_covariance():
    p = 1009
    F = PrimeField(p)
    delta = 123
    P = poly([(0, 2, 1), (3, 0, -1), (1, 0, 2), (0, 0, -1)], p)
    g = rmap([(1, 0, 1), (0, 1, 1)], p)
    f = rmap([(2, 0, 1)], p, den=[(1, 0, 1), (0, 0, 3)])
    chi, psi = MultChar(F, 5), AddChar(F, 7)
    a = sliding_series(enumerate_columns(P), g, f, chi, psi, WindowParams(p, 30, 400, 2500 % p))
    b = sliding_series(enumerate_columns(P.shift_x(delta)), g.shift_x(delta), f.shift_x(delta), chi, psi,
                       WindowParams(p, 30, 400 - delta, 2500 % p))
    assert np.array_equal(a.values, b.values)


def test_jobs_do_not_change_bits():
    p = 10007
    rng = np.random.default_rng(0)
    csum = rng.normal(size=p) + 1j * rng.normal(size=p)
    prm = WindowParams(p, 40, 17, p)
    one = sliding_from_column_sums(csum, prm, jobs=1)
    many = sliding_from_column_sums(csum, prm, jobs=8)
    assert one.tobytes() == many.tobytes()
    # recompute blocks start from scratch
    for b in range(0, p, RECOMPUTE_EVERY):
        x = (17 + b) % p
        assert one[b] == csum[(x + 1 + np.arange(40)) % p].sum()


def test_column_sums_vector_matches_scalar():
    p = 211
    F = PrimeField(p)
    cols = enumerate_columns(poly([(0, 3, 1), (1, 1, 1), (0, 0, 4)], p))
    g, f = rmap([(0, 1, 1)], p), rmap([(1, 0, 1)], p, den=[(0, 1, 1)])
    chi, psi = MultChar(F, 14), AddChar(F, 9)
    cs = column_sums(cols, g, f, chi, psi, (10, 180))
    for x in range(p):
        assert cs[x] == pytest.approx(column_term_sum(cols, g, f, chi, psi, x, (10, 180)), abs=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        WindowParams(101, 0, 0, 10)
    with pytest.raises(ValueError):
        WindowParams(101, 102, 0, 10)
    with pytest.raises(ValueError):
        WindowParams(101, 5, 0, 0)
    with pytest.raises(ValueError):
        WindowParams(101, 5, 0, 10, 0.6, 0.5)


def test_project_theta_examples():
    prm = WindowParams(101, 2, 0, 1, 0.0, 0.5)
    s = WindowSeries(prm, np.array([1 + 1j]))
    assert project_theta(s, 0.0)[0] == pytest.approx(1.0)
    prm = WindowParams(101, 8, 0, 3)
    S = np.array([3 - 2j, -1 + 4j, 0.5j])
    s = WindowSeries(prm, S)
    assert np.allclose(project_theta(s, 0), S.real / math.sqrt(8))
    assert np.allclose(project_theta(s, math.pi / 2), S.imag / math.sqrt(8))
