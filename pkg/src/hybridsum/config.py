"""Experiment configuration: a single JSON document, validated with field and line diagnostics."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Any

from .curve_geom import BivarPoly, RationalMap
from .dist_tests import GaussRect
from .ff_char import DEFAULT_MAX_P, is_prime
from .moments import MAX_COMPLEX_ORDER, MAX_REAL_ORDER

H_FORMULA_RE = re.compile(r"^\s*floor\s*\(\s*log\s*(\^\s*2|²)\s*\(?\s*p\s*\)?\s*\)\s*$")

TOP_KEYS = (
    "p", "curve", "g", "f", "chi", "psi", "alpha", "beta", "H", "I", "theta_list",
    "rects", "moment_orders", "aux", "mc", "outputs", "check", "seed", "strategy",
)

DEFAULT_CHECK = {
    "ks_max": 0.05,
    "rect_max": 0.02,
    "moment_rel_max": 0.1,
    "moment_zero_max": 0.05,
    "charfun_max": 0.01,
    "reducible_max": 0.05,
    "identity_rel_max": 1e-6,
}

DEFAULT_OUTPUTS = {"csv": "series.csv", "json": "summary.json", "svg_prefix": "hist"}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is a dotted path, ``line``/``col`` locate it in the source."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None,
                 col: int | None = None):
        self.message, self.field, self.line, self.col = message, field, line, col
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}, column {self.col}")
        if self.field:
            where.append(f"field '{self.field}'")
        return f"{': '.join(where)}: {self.message}" if where else self.message


@dataclass(frozen=True)
class AuxConfig:
    r: int = 2
    samples: int = 200
    H_aux: int = 50
    seed: int = 0
    identity_H: int = 5
    identity_order: int = 3
    identity_explicit: bool = False


@dataclass(frozen=True)
class McConfig:
    H: int = 100
    n_samples: int = 1_000_000
    seed: int = 0
    max_order: int = 6
    charfun_H: int = 200
    charfun_grid: tuple[float, ...] = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    p: int
    curve: BivarPoly
    g: RationalMap
    f: RationalMap
    chi_k: int
    psi_c: int
    alpha: float = 0.0
    beta: float = 1.0
    H: int = 1
    H_spec: Any = None
    i_start: int = 0
    i_len: int = 0
    theta_list: tuple[float, ...] = (0.0,)
    rects: tuple[GaussRect, ...] = ()
    complex_orders: tuple[tuple[int, int], ...] = ()
    real_orders: tuple[int, ...] = ()
    aux: AuxConfig = field(default_factory=AuxConfig)
    mc: McConfig = field(default_factory=McConfig)
    outputs: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUTS))
    check: dict = field(default_factory=lambda: dict(DEFAULT_CHECK))
    seed: int = 0
    strategy: str = "auto"
    warnings: tuple[str, ...] = ()

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Override every seed in the config (the --seed flag)."""
        return replace(self, seed=seed, aux=replace(self.aux, seed=seed), mc=replace(self.mc, seed=seed))

    def echo(self) -> dict:
        """Normalised config, for the parameter echo in reports."""
        return {
            "p": self.p,
            "curve": self.curve.to_list(),
            "g": self.g.to_spec(),
            "f": self.f.to_spec(),
            "chi": {"k": self.chi_k},
            "psi": {"c": self.psi_c},
            "alpha": self.alpha,
            "beta": self.beta,
            "H": self.H,
            "H_spec": self.H_spec,
            "I": {"start": self.i_start, "length": self.i_len},
            "theta_list": list(self.theta_list),
            "rects": [R.to_spec() for R in self.rects],
            "moment_orders": [list(o) for o in self.complex_orders] + list(self.real_orders),
            "seed": self.seed,
            "strategy": self.strategy,
        }


def locate(text: str, path: list[str]) -> tuple[int | None, int | None]:
    """Line and column of the key at ``path`` in the JSON source, best effort."""
    pos, found = 0, None
    for key in path:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            break
        pos, found = m.end(), m.start()
    if found is None:
        return None, None
    line = text.count("\n", 0, found) + 1
    return line, found - (text.rfind("\n", 0, found) + 1) + 1


class _Reader:
    """Typed field access that raises ConfigError pointing at the offending field."""

    def __init__(self, text: str):
        self.text = text

    def fail(self, path: str, msg: str):
        line, col = locate(self.text, path.split(".")) if path else (None, None)
        raise ConfigError(msg, path or None, line, col)

    def integer(self, path: str, v, lo=None, hi=None) -> int:
        if isinstance(v, bool) or not isinstance(v, int):
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            else:
                self.fail(path, f"expected an integer, got {v!r}")
        if lo is not None and v < lo:
            self.fail(path, f"must be >= {lo}, got {v}")
        if hi is not None and v > hi:
            self.fail(path, f"must be <= {hi}, got {v}")
        return v

    def number(self, path: str, v) -> float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(path, f"expected a number, got {v!r}")
        if not math.isfinite(v):
            self.fail(path, "must be finite")
        return float(v)

    def obj(self, path: str, v, allowed) -> dict:
        if not isinstance(v, dict):
            self.fail(path, f"expected an object, got {type(v).__name__}")
        for k in v:
            if k not in allowed:
                self.fail(f"{path}.{k}" if path else k, f"unknown key; expected one of {sorted(allowed)}")
        return v


def _poly(rd: _Reader, path: str, spec, p: int) -> BivarPoly:
    if not isinstance(spec, list):
        rd.fail(path, "polynomial must be a list of [i, j, c] triples")
    for t in spec:
        if not (isinstance(t, list) and len(t) == 3 and all(isinstance(v, int) and not isinstance(v, bool) for v in t)):
            rd.fail(path, f"bad term {t!r}; expected [i, j, c] with integer entries")
        if t[0] < 0 or t[1] < 0:
            rd.fail(path, f"negative exponent in term {t!r}")
    return BivarPoly.from_terms(spec, p)


def _map(rd: _Reader, path: str, spec, p: int, default: int) -> RationalMap:
    if spec is None:
        return RationalMap.constant(default, p)
    if isinstance(spec, int) and not isinstance(spec, bool):
        return RationalMap.constant(spec, p)
    if isinstance(spec, dict):
        rd.obj(path, spec, ("num", "den"))
        if "num" not in spec:
            rd.fail(path, "rational map needs 'num'")
        num = _poly(rd, path + ".num", spec["num"], p)
        den = _poly(rd, path + ".den", spec.get("den", [[0, 0, 1]]), p)
    else:
        num, den = _poly(rd, path, spec, p), BivarPoly.constant(1, p)
    try:
        return RationalMap(num, den)
    except ValueError as e:
        rd.fail(path, str(e))


def parse_H(spec, p: int) -> int:
    """Literal integer or the formula floor(log^2 p) with the natural log."""
    if isinstance(spec, str):
        if not H_FORMULA_RE.match(spec):
            raise ValueError(f"unknown H formula {spec!r}; use an integer or \"floor(log^2 p)\"")
        return int(math.floor(math.log(p) ** 2))
    if isinstance(spec, bool) or not isinstance(spec, int):
        raise ValueError(f"H must be an integer or a formula string, got {spec!r}")
    return spec


def _orders(rd: _Reader, spec):
    pairs, ks = [], []
    if not isinstance(spec, list):
        rd.fail("moment_orders", "expected a list of [r, s] pairs and integers k")
    for o in spec:
        if isinstance(o, list):
            if len(o) != 2:
                rd.fail("moment_orders", f"pair {o!r} must have two entries")
            r = rd.integer("moment_orders", o[0], 0)
            s = rd.integer("moment_orders", o[1], 0)
            if r + s > MAX_COMPLEX_ORDER:
                rd.fail("moment_orders", f"order r+s={r + s} exceeds cap {MAX_COMPLEX_ORDER}")
            pairs.append((r, s))
        else:
            ks.append(rd.integer("moment_orders", o, 0, MAX_REAL_ORDER))
    return tuple(pairs), tuple(ks)


def from_dict(d: dict, text: str | None = None) -> ExperimentConfig:
    """Validate a parsed config.  ``text`` (the JSON source) enables line numbers."""
    rd = _Reader(text if text is not None else json.dumps(d, indent=1))
    rd.obj("", d, TOP_KEYS)
    for req in ("p", "curve"):
        if req not in d:
            raise ConfigError("required field missing", req)

    p = rd.integer("p", d["p"], 2, DEFAULT_MAX_P)
    if not is_prime(p):
        rd.fail("p", f"{p} is not prime")

    curve = _poly(rd, "curve", d["curve"], p)
    if curve.is_zero:
        rd.fail("curve", "curve polynomial is zero mod p")
    if curve.deg_y < 1:
        rd.fail("curve", "curve polynomial must involve y")
    g = _map(rd, "g", d.get("g"), p, 1)
    f = _map(rd, "f", d.get("f"), p, 0)

    chi = rd.obj("chi", d.get("chi", {"k": 0}), ("k", "order"))
    if ("k" in chi) == ("order" in chi):
        rd.fail("chi", "give exactly one of 'k' or 'order'")
    if "order" in chi:
        a = rd.integer("chi.order", chi["order"], 1)
        if (p - 1) % a:
            rd.fail("chi.order", f"order {a} does not divide p-1 = {p - 1}")
        chi_k = (p - 1) // a % (p - 1)
    else:
        chi_k = rd.integer("chi.k", chi["k"]) % (p - 1)
    psi = rd.obj("psi", d.get("psi", {"c": 0}), ("c",))
    psi_c = rd.integer("psi.c", psi.get("c", 0)) % p

    alpha = rd.number("alpha", d.get("alpha", 0.0))
    beta = rd.number("beta", d.get("beta", 1.0))
    if not 0 <= alpha < beta <= 1:
        rd.fail("alpha", f"need 0 <= alpha < beta <= 1, got alpha={alpha}, beta={beta}")

    H_spec = d.get("H", "floor(log^2 p)")
    try:
        H = parse_H(H_spec, p)
    except ValueError as e:
        rd.fail("H", str(e))
    if H < 1:
        rd.fail("H", f"H must be >= 1, got {H}")
    if H > p:
        rd.fail("H", f"H must be <= p, got {H}")

    I = rd.obj("I", d.get("I", {}), ("start", "length"))
    i_start = rd.integer("I.start", I.get("start", 0)) % p
    length = I.get("length", "full")
    i_len = p if length == "full" else rd.integer("I.length", length, 1, p)

    thetas = d.get("theta_list", [0.0])
    if not isinstance(thetas, list) or not thetas:
        rd.fail("theta_list", "expected a nonempty list of angles")
    thetas = tuple(rd.number("theta_list", t) for t in thetas)

    rects = []
    for R in d.get("rects", []):
        try:
            rects.append(GaussRect.from_spec(R))
        except (ValueError, TypeError) as e:
            rd.fail("rects", f"bad rectangle {R!r}: {e}")

    pairs, ks = _orders(rd, d.get("moment_orders", []))

    a = rd.obj("aux", d.get("aux", {}), ("r", "samples", "H_aux", "seed", "identity"))
    ident = rd.obj("aux.identity", a.get("identity", {}), ("H", "max_order"))
    aux = AuxConfig(
        r=rd.integer("aux.r", a.get("r", 2), 1),
        samples=rd.integer("aux.samples", a.get("samples", 200), 1),
        H_aux=rd.integer("aux.H_aux", a.get("H_aux", 50), 1),
        seed=rd.integer("aux.seed", a.get("seed", 0), 0, 2**64 - 1),
        identity_H=rd.integer("aux.identity.H", ident.get("H", 5), 1),
        identity_order=rd.integer("aux.identity.max_order", ident.get("max_order", 3), 0),
        identity_explicit="identity" in a,
    )
    if aux.r > aux.H_aux:
        rd.fail("aux.r", f"need r <= H_aux for distinct offsets, got r={aux.r}, H_aux={aux.H_aux}")

    m = rd.obj("mc", d.get("mc", {}), ("H", "n_samples", "seed", "max_order", "charfun_H", "charfun_grid"))
    grid = m.get("charfun_grid", [0.0, 0.5, 1.0])
    if not isinstance(grid, list) or not grid:
        rd.fail("mc.charfun_grid", "expected a nonempty list of numbers")
    mc = McConfig(
        H=rd.integer("mc.H", m.get("H", 100), 1),
        n_samples=rd.integer("mc.n_samples", m.get("n_samples", 1_000_000), 1),
        seed=rd.integer("mc.seed", m.get("seed", 0), 0, 2**64 - 1),
        max_order=rd.integer("mc.max_order", m.get("max_order", 6), 0, MAX_COMPLEX_ORDER),
        charfun_H=rd.integer("mc.charfun_H", m.get("charfun_H", 200), 1),
        charfun_grid=tuple(rd.number("mc.charfun_grid", v) for v in grid),
    )
    lim = mc.charfun_H**0.25
    if any(abs(v) > lim for v in mc.charfun_grid):
        rd.fail("mc.charfun_grid", f"grid points must satisfy |u| <= charfun_H^(1/4) = {lim:.4g}")

    outputs = dict(DEFAULT_OUTPUTS)
    for k, v in rd.obj("outputs", d.get("outputs", {}), tuple(DEFAULT_OUTPUTS)).items():
        if not isinstance(v, str) or not v or "/" in v or "\\" in v:
            rd.fail(f"outputs.{k}", "expected a plain file name")
        outputs[k] = v
    check = dict(DEFAULT_CHECK)
    for k, v in rd.obj("check", d.get("check", {}), tuple(DEFAULT_CHECK)).items():
        check[k] = rd.number(f"check.{k}", v)

    strategy = d.get("strategy", "auto")
    if strategy not in ("auto", "graph", "hyperelliptic", "generic", "scan"):
        rd.fail("strategy", f"unknown enumeration strategy {strategy!r}")

    warnings = []
    if i_len <= p**0.55:
        warnings.append(f"|I| = {i_len} <= p^0.55: below the range where the limit theorems apply")
    if H >= p**0.2:
        warnings.append(f"H = {H} >= p^0.2: window long relative to p, limit theorems predict nothing here")

    return ExperimentConfig(
        p=p, curve=curve, g=g, f=f, chi_k=chi_k, psi_c=psi_c, alpha=alpha, beta=beta,
        H=H, H_spec=H_spec, i_start=i_start, i_len=i_len, theta_list=thetas,
        rects=tuple(rects), complex_orders=pairs, real_orders=ks, aux=aux, mc=mc,
        outputs=outputs, check=check, seed=rd.integer("seed", d.get("seed", 0), 0, 2**64 - 1),
        strategy=strategy, warnings=tuple(warnings),
    )


def loads(text: str) -> ExperimentConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", None, e.lineno, e.colno) from None
    if not isinstance(d, dict):
        raise ConfigError("top level must be a JSON object", None, 1, 1)
    return from_dict(d, text)


def load(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror}") from None
    return loads(text)
