"""Command-line entry point: sweep, moments, model, auxprobe, probe."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .aux_curves import (
    MAX_PROBE_R,
    MAX_SPLIT_H,
    MAX_SPLIT_ORDER,
    MAX_SPLIT_P,
    Degeneracy,
    GuardError,
    Irreducibility,
    classify_offsets,
    decomposed_Sj1j2,
    degeneracy_probe,
    sample_distinct_offsets,
)
from .config import ConfigError, ExperimentConfig, load
from .curve_geom import enumerate_columns
from .dist_tests import (
    GaussRect,
    ecdf,
    gauss1d_cdf,
    ks_distance,
    rect_empirical_freq,
    rect_gauss_prob,
)
from .ff_char import AddChar, MultChar, PrimeField
from .model_mc import ModelConfig, exact_leading_moment, mc_charfun, mc_moments
from .moments import (
    MomentReport,
    Normalization,
    empirical_Mk,
    empirical_Mrs,
    empirical_Sj1j2,
    error_budget,
    predicted_main_complex,
    predicted_main_real,
)
from .report import write_json, write_series_csv
from .window_sums import WindowParams, project_theta, sliding_series

log = logging.getLogger("hybridsum")

EXIT_OK, EXIT_INVALID, EXIT_GUARD, EXIT_CHECK = 0, 1, 2, 3

DEFAULT_RECTS = (
    GaussRect(-1, 1, -1, 1),
    GaussRect(0, math.inf, 0, math.inf),
    GaussRect(-1, 1),
)


@dataclass
class Setup:
    cfg: ExperimentConfig
    field: PrimeField
    cols: object
    chi: MultChar
    psi: AddChar
    params: WindowParams

    @property
    def real(self) -> bool:
        """Real-valued sums: chi of order <= 2 and psi trivial."""
        return self.chi.order <= 2 and self.psi.is_trivial

    @property
    def kind(self) -> str:
        return "real" if self.real else "complex"

    @property
    def degree(self) -> int:
        """d = D + d_g + d_f, with d_g, d_f the denominator degrees."""
        c = self.cfg
        return c.curve.degree + c.g.d_den + c.f.d_den


def build_setup(cfg: ExperimentConfig) -> Setup:
    F = PrimeField(cfg.p)
    cols = enumerate_columns(cfg.curve, cfg.strategy, seed=cfg.seed)
    params = WindowParams(cfg.p, cfg.H, cfg.i_start, cfg.i_len, cfg.alpha, cfg.beta, cfg.theta_list)
    return Setup(cfg, F, cols, MultChar(F, cfg.chi_k), AddChar(F, cfg.psi_c), params)


def _report_dict(m: MomentReport) -> dict:
    return {
        "label": m.label,
        "order": list(m.order),
        "empirical": m.empirical,
        "predicted_main": m.predicted_main,
        "ratio": m.ratio,
        "normalized": m.params["normalized"],
        "normalization": m.normalization,
        "error_budget": m.error_budget,
    }


def moment_table(st: Setup, series, pairs, ks) -> list[MomentReport]:
    """Empirical vs predicted M(r, s) (complex) and M(k) (real), with error budgets.

    ``normalized`` is the moment divided by |I| times the natural scale,
    (H (beta - alpha) / 2)^((r+s)/2) or (H (beta - alpha))^(k/2).
    """
    cfg, prm = st.cfg, st.params
    n, w, H, d = prm.i_len, prm.width, prm.H, st.degree
    out = []
    for r, s in pairs:
        emp = empirical_Mrs(series, r, s)
        pred = predicted_main_complex(r, s, H, n, w)
        scale = n * (H * w / 2) ** ((r + s) / 2)
        out.append(MomentReport(
            f"M({r},{s})", (r, s), emp, pred, Normalization.COMPLEX_NORM,
            error_budget(r, s, H, n, d, cfg.p, st.psi.is_trivial), {"normalized": emp / scale},
        ))
    for k in ks:
        emp = empirical_Mk(series, k)
        pred = predicted_main_real(k, H, n, w)
        scale = n * (H * w) ** (k / 2)
        out.append(MomentReport(
            f"M({k})", (k,), emp, pred, Normalization.REAL_NORM,
            error_budget(k, 0, H, n, d, cfg.p, st.psi.is_trivial), {"normalized": emp / scale},
        ))
    return out


def moment_failures(reports, check) -> list[str]:
    fails = []
    for m in reports:
        if m.ratio is not None:
            if abs(m.ratio - 1) > check["moment_rel_max"]:
                fails.append(f"{m.label}: |ratio - 1| = {abs(m.ratio - 1):.4g} > {check['moment_rel_max']}")
        elif abs(m.params["normalized"]) > check["moment_zero_max"]:
            fails.append(f"{m.label}: |normalized| = {abs(m.params['normalized']):.4g} > {check['moment_zero_max']}")
    return fails


def _default_orders(st: Setup):
    cfg = st.cfg
    if cfg.complex_orders or cfg.real_orders:
        return cfg.complex_orders, cfg.real_orders
    if st.real:
        return (), (2, 3, 4)
    return ((2, 0), (0, 2), (1, 1)), ()


def _base(command: str, cfg: ExperimentConfig) -> dict:
    return {"command": command, "version": __version__, "config": cfg.echo(), "warnings": list(cfg.warnings)}


def _finish(out: Path, name: str, summary: dict, fails: list[str], check: bool) -> int:
    if check:
        summary["check"] = {"passed": not fails, "failures": fails}
    write_json(out / name, summary)
    for f in fails if check else ():
        log.error("check failed: %s", f)
    return EXIT_CHECK if check and fails else EXIT_OK


# ---------------------------------------------------------------------------
# commands


def cmd_sweep(cfg: ExperimentConfig, out: Path, jobs: int = 1, check: bool = False) -> int:
    from .plotting import histogram_svg

    st = build_setup(cfg)
    prm = st.params
    summary = _base("sweep", cfg)
    summary.update({"kind": st.kind, "J": list(prm.J), "n_points": st.cols.n_points,
                    "strategy": st.cols.strategy})

    probe = degeneracy_probe(st.cols, cfg.g, cfg.f, st.chi, st.psi, prm.J)
    summary["degeneracy"] = probe.as_dict()
    skip = None
    if st.chi.is_trivial and st.psi.is_trivial:
        skip = "both characters trivial: S(x) counts points, no Gaussian limit"
    elif probe.flag is Degeneracy.DEGENERATE:
        skip = "degeneracy probe flagged DEGENERATE-LIKE: hypotheses of the limit theorems fail"

    series = sliding_series(st.cols, cfg.g, cfg.f, st.chi, st.psi, prm, jobs=jobs)
    S = series.values
    projections = [project_theta(series, th) for th in prm.thetas]
    csv_path = write_series_csv(out / cfg.outputs["csv"], prm.xs, S, projections)

    pairs, ks = _default_orders(st)
    moments = moment_table(st, series, pairs, ks)
    summary["moments"] = [_report_dict(m) for m in moments]
    fails = moment_failures(moments, cfg.check)

    svgs = []
    summary["distribution_skipped"] = skip
    if skip is None:
        n, H, w = prm.i_len, prm.H, prm.width
        if st.real:
            z = S.real / math.sqrt(H * w)
            ks_real = ks_distance(ecdf(z), gauss1d_cdf)
            summary["ks_real"] = ks_real
            if ks_real > cfg.check["ks_max"]:
                fails.append(f"ks_real = {ks_real:.4g} > {cfg.check['ks_max']}")
            name = f"{cfg.outputs['svg_prefix']}_real.svg"
            histogram_svg(out / name, z, 1.0, f"S(x)/sqrt(H(beta-alpha)), p={cfg.p}, H={H}")
            svgs.append(name)
        else:
            for k, (th, u) in enumerate(zip(prm.thetas, projections)):
                v = ks_distance(ecdf(u), lambda t: gauss1d_cdf(t, 0.5))
                summary[f"ks_theta_{k}"] = v
                if v > cfg.check["ks_max"]:
                    fails.append(f"ks_theta_{k} = {v:.4g} > {cfg.check['ks_max']}")
                name = f"{cfg.outputs['svg_prefix']}_theta_{k}.svg"
                histogram_svg(out / name, u, 0.5, f"u_theta, theta={th:.6g}, p={cfg.p}, H={H}")
                svgs.append(name)
            rects = []
            for R in cfg.rects or DEFAULT_RECTS:
                emp, tgt = rect_empirical_freq(series, R, H, w), rect_gauss_prob(R)
                rects.append({"rect": R.to_spec(), "empirical": emp, "target": tgt,
                              "deviation": abs(emp - tgt)})
                if abs(emp - tgt) > cfg.check["rect_max"]:
                    fails.append(f"rect {R.to_spec()}: deviation {abs(emp - tgt):.4g} > {cfg.check['rect_max']}")
            summary["rects"] = rects
        summary["n"] = n
    else:
        fails.append(f"distribution tests skipped: {skip}")
    summary["outputs"] = {"csv": csv_path.name, "svg": svgs}
    log.info("sweep: %d windows, kind=%s, outputs in %s", len(S), st.kind, out)
    return _finish(out, cfg.outputs["json"], summary, fails, check)


def cmd_moments(cfg: ExperimentConfig, out: Path, jobs: int = 1, check: bool = False) -> int:
    st = build_setup(cfg)
    series = sliding_series(st.cols, cfg.g, cfg.f, st.chi, st.psi, st.params, jobs=jobs)
    pairs, ks = _default_orders(st)
    moments = moment_table(st, series, pairs, ks)
    summary = _base("moments", cfg)
    summary.update({"kind": st.kind, "J": list(st.params.J), "n": st.params.i_len,
                    "moments": [_report_dict(m) for m in moments]})
    return _finish(out, "moments.json", summary, moment_failures(moments, cfg.check), check)


def cmd_model(cfg: ExperimentConfig, out: Path, jobs: int = 1, check: bool = False) -> int:
    mc = cfg.mc
    mcfg = ModelConfig(mc.H, mc.n_samples, mc.seed)
    orders = [(r, t - r) for t in range(1, mc.max_order + 1) for r in range(t, -1, -1)]
    est = mc_moments(mcfg, orders, jobs)
    fails, rows = [], []
    for r, s in orders:
        exact = exact_leading_moment(r, s, mc.H)
        env = max(0.02 * abs(exact), 5 * mc.H ** ((r + s) / 2) / math.sqrt(mc.n_samples))
        dev = abs(est[(r, s)] - exact)
        rows.append({"order": [r, s], "mc": est[(r, s)], "exact_leading": exact,
                     "deviation": dev, "envelope": env})
        if dev > env:
            fails.append(f"moment ({r},{s}): deviation {dev:.4g} > envelope {env:.4g}")

    ccfg = ModelConfig(mc.charfun_H, mc.n_samples, mc.seed)
    grid = [(u, v) for u in mc.charfun_grid for v in mc.charfun_grid]
    phi = mc_charfun(ccfg, [pt for pt in grid if pt != (0.0, 0.0)], jobs)
    cf = []
    for u, v in grid:
        val = phi.get((u, v), 1 + 0j)
        target = math.exp(-(u * u + v * v) / 2)
        dev = abs(val - target)
        cf.append({"u": u, "v": v, "mc": val, "target": target, "deviation": dev})
        if dev > cfg.check["charfun_max"]:
            fails.append(f"charfun ({u},{v}): deviation {dev:.4g} > {cfg.check['charfun_max']}")

    summary = {"command": "model", "version": __version__,
               "mc": {"H": mc.H, "n_samples": mc.n_samples, "seed": mc.seed,
                      "max_order": mc.max_order, "charfun_H": mc.charfun_H},
               "moments": rows, "charfun": cf}
    return _finish(out, "model.json", summary, fails, check)


def cmd_auxprobe(cfg: ExperimentConfig, out: Path, jobs: int = 1, check: bool = False) -> int:
    aux = cfg.aux
    if aux.r > MAX_PROBE_R:
        raise GuardError(f"aux.r={aux.r} exceeds the probe guard {MAX_PROBE_R}")
    st = build_setup(cfg)
    hs = sample_distinct_offsets(aux.H_aux, aux.r, aux.samples, aux.seed)
    results = classify_offsets(st.cols, hs, jobs)
    hist = Counter(res.classification for res in results)
    frac = hist[Irreducibility.REDUCIBLE] / len(results)
    fails = []
    if frac > cfg.check["reducible_max"]:
        fails.append(f"REDUCIBLE-LIKE fraction {frac:.4g} > {cfg.check['reducible_max']}")

    summary = _base("auxprobe", cfg)
    summary["classification"] = {
        "r": aux.r, "H_aux": aux.H_aux, "samples": aux.samples, "seed": aux.seed,
        "histogram": {c.value: hist[c] for c in Irreducibility},
        "reducible_fraction": frac,
        "non_irreducible": [
            {"h": list(res.h), "class": res.classification, "count": res.count,
             "nearest_multiple": res.nearest_multiple}
            for res in results if res.classification is not Irreducibility.IRREDUCIBLE
        ],
    }

    ident = {"skipped": None}
    guard_msg = None
    if cfg.p > MAX_SPLIT_P or aux.identity_H > MAX_SPLIT_H or aux.identity_order > MAX_SPLIT_ORDER:
        guard_msg = (f"identity check limited to p <= {MAX_SPLIT_P}, H <= {MAX_SPLIT_H}, "
                     f"j1+j2 <= {MAX_SPLIT_ORDER}")
    if guard_msg and aux.identity_explicit:
        raise GuardError(guard_msg)
    if guard_msg:
        ident["skipped"] = guard_msg
    else:
        prm = WindowParams(cfg.p, aux.identity_H, cfg.i_start, cfg.i_len, cfg.alpha, cfg.beta)
        series = sliding_series(st.cols, cfg.g, cfg.f, st.chi, st.psi, prm, jobs=jobs)
        rows, worst = [], 0.0
        for j1 in range(aux.identity_order + 1):
            for j2 in range(aux.identity_order + 1 - j1):
                a = empirical_Sj1j2(series, j1, j2)
                b = decomposed_Sj1j2(st.cols, cfg.g, cfg.f, st.chi, st.psi, prm, j1, j2)
                rel = abs(a - b) / max(1.0, abs(a))
                worst = max(worst, rel)
                rows.append({"j1": j1, "j2": j2, "empirical": a, "decomposed": b, "relative_residual": rel})
        ident.update({"H": aux.identity_H, "residuals": rows, "max_relative_residual": worst})
        if worst > cfg.check["identity_rel_max"]:
            fails.append(f"identity residual {worst:.4g} > {cfg.check['identity_rel_max']}")
    summary["identity"] = ident
    return _finish(out, "auxprobe.json", summary, fails, check)


def cmd_probe(cfg: ExperimentConfig, out: Path, jobs: int = 1, check: bool = False) -> int:
    st = build_setup(cfg)
    rep = degeneracy_probe(st.cols, cfg.g, cfg.f, st.chi, st.psi, st.params.J)
    summary = _base("probe", cfg)
    summary["degeneracy"] = rep.as_dict()
    fails = [] if rep.flag is Degeneracy.OK else ["configuration flagged DEGENERATE-LIKE"]
    log.info("probe: %s (complete sum %.6g, budget %.6g)", rep.flag.value,
             rep.complete_sum_modulus, rep.perelmuter_budget)
    return _finish(out, "probe.json", summary, fails, check)


COMMANDS = {
    "sweep": (cmd_sweep, "window sums over I: CSV series, JSON summary, SVG histograms"),
    "moments": (cmd_moments, "empirical moments against predicted main terms"),
    "model": (cmd_model, "Monte Carlo checks of the random model Z_H"),
    "auxprobe": (cmd_auxprobe, "auxiliary-curve irreducibility statistics and splitting identity"),
    "probe": (cmd_probe, "degeneracy probe via complete sums"),
}


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _jobs(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("--jobs must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridsum", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="experiment config (JSON)")
        sp.add_argument("--out", default=".", help="output directory (created if missing)")
        sp.add_argument("--jobs", type=_jobs, default=os.cpu_count() or 1, help="worker threads")
        sp.add_argument("--seed", type=_seed, default=None, help="override every seed in the config")
        sp.add_argument("--check", action="store_true", help="exit 3 if acceptance thresholds fail")
        sp.add_argument("-q", "--quiet", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load(args.config)
    except ConfigError as e:
        log.error("invalid config %s: %s", args.config, e)
        return EXIT_INVALID
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    for w in cfg.warnings:
        log.warning(w)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fn = COMMANDS[args.command][0]
    try:
        return fn(cfg, out, jobs=args.jobs, check=args.check)
    except GuardError as e:
        log.error("guard violation: %s", e)
        return EXIT_GUARD
    except ValueError as e:
        log.error("%s", e)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
