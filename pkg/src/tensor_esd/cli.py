"""
Batch experiment runner.

Each subcommand writes tables (CSV, or JSON with ``--format json``) and a
``<experiment>_summary.json`` echoing the resolved configuration and the
package version into ``--out``.  Reruns with the same configuration produce
byte-identical files.

Exit codes: 0 success, 1 usage or validation error, 2 a mathematical bound
was violated, 3 solver non-convergence beyond the allowed quota.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

import numpy as np

from . import __version__
from .eigensolve import covariance_spectrum
from .errors import BinomialOverflowError, NumericError, ResourceError, ValidationError
from .general_mp import esd_of_population, fixpoint_cdf, stieltjes_inversion
from .identities import RESIDUAL_THRESHOLD, identity_suite
from .metrics import histogram, ks_distance, spectral_moment
from .moments import (c_moment_bound, c_moment_exact, exact_norm_variance_ratio,
                      mc_norm_variance, shared_degree_moment_bound, tensor_moment_exact,
                      variance_report)
from .mp_law import MpLaw, mp_density, mp_stieltjes
from .tensor_model import (ModelParams, MomentModel, apply_population_sqrt, binomial,
                           max_entries, peak_level_size, sample_matrix)

EXPERIMENTS = ("esd", "threshold-scan", "variance-check", "moments-check",
               "identity-suite", "fixpoint")
SAMPLING = {"esd", "threshold-scan", "variance-check", "moments-check", "identity-suite"}

EXIT_OK, EXIT_USAGE, EXIT_BOUND, EXIT_SOLVER = 0, 1, 2, 3

# the pure-Python QL sweep makes larger eigenproblems impractical in a scan
MAX_EIGEN_DIM = 2000
# share of grid points allowed to fail in the fixed-point run
FIXPOINT_FAIL_QUOTA = 0.01
MC_MAX_N = 300

VARIANCE_GRID_N = (4, 6, 8, 10, 12, 16, 24, 32, 64, 128, 256)
VARIANCE_GRID_D = (1, 2, 3, 4, 6, 8, 16, 32)
VARIANCE_GRID_B = (1.0, 3.0, 9.0)
MOMENT_DISTS = ("rademacher", "gaussian", "threepoint:3")

DEFAULTS = {
    "esd": dict(dist="rademacher", trials=5, bins=40),
    "threshold-scan": dict(n=36, d=[1, 2, 3, 6, 9], dist="rademacher", trials=3),
    "variance-check": dict(trials=20000),
    "moments-check": dict(trials=1000),
    "identity-suite": dict(trials=200, z_im_floor=1.0, z_re="-2:6"),
    "fixpoint": dict(grid="0.1:3.9:77", eta=1e-3),
}
COMMON_DEFAULTS = dict(format="csv", out="results")


@dataclass
class ExperimentConfig:
    experiment: str
    n: int | None = None
    d: list = field(default_factory=list)
    p: int | None = None
    gamma: float | None = None
    dist: str | None = None
    trials: int | None = None
    seed: int | None = None
    z_im_floor: float | None = None
    z_re: str | None = None
    grid: str | None = None
    eta: float | None = None
    bins: int | None = None
    population: list | None = None
    out: str = "results"
    format: str = "csv"

    def echo(self):
        out = asdict(self)
        out.pop("out")
        return out


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse number list {text!r}") from exc


def parse_range(text, parts):
    """``lo:hi`` or ``lo:hi:steps`` into floats (and an integer step count)."""
    bits = str(text).split(":")
    if len(bits) != parts:
        raise ValidationError(f"expected {parts} colon-separated fields, got {text!r}")
    try:
        vals = [float(b) for b in bits[:2]] + [int(b) for b in bits[2:]]
    except ValueError as exc:
        raise ValidationError(f"cannot parse range {text!r}") from exc
    if not vals[1] > vals[0]:
        raise ValidationError(f"empty range {text!r}")
    if parts == 3 and vals[2] < 2:
        raise ValidationError("a grid needs at least 2 points")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of settings; flags override it")
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int, action="append", help="repeatable")
    size = common.add_mutually_exclusive_group()
    size.add_argument("--p", type=int)
    size.add_argument("--gamma", type=float)
    common.add_argument("--dist", help="rademacher | gaussian | threepoint:B")
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--z-im-floor", type=float, dest="z_im_floor")
    common.add_argument("--z-re", dest="z_re", help="lo:hi range of Re z")
    common.add_argument("--grid", help="lo:hi:steps")
    common.add_argument("--eta", type=float)
    common.add_argument("--bins", type=int)
    common.add_argument("--population", help="v1,v2,... eigenvalues of diagonal T")
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"))

    parser = _Parser(prog="tensor-esd", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(args) -> ExperimentConfig:
    """Merge built-in defaults, the config file and the flags (in that order)."""
    merged = dict(COMMON_DEFAULTS)
    merged.update(DEFAULTS[args.experiment])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                filecfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(filecfg, dict):
            raise ValidationError("config file must hold a JSON object")
        exp = filecfg.pop("experiment", args.experiment)
        if exp != args.experiment:
            raise ValidationError(f"config is for {exp!r}, not {args.experiment!r}")
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(filecfg) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if filecfg.get("p") is not None or filecfg.get("gamma") is not None:
            merged.pop("p", None)
            merged.pop("gamma", None)
        merged.update({k: v for k, v in filecfg.items() if v is not None})
    flags = {k: v for k, v in vars(args).items()
             if k not in ("config", "experiment") and v is not None}
    if "p" in flags or "gamma" in flags:
        merged.pop("p", None)
        merged.pop("gamma", None)
    merged.update(flags)
    if isinstance(merged.get("d"), int):
        merged["d"] = [merged["d"]]
    if merged.get("population") is not None:
        merged["population"] = _float_list(merged["population"])
    cfg = ExperimentConfig(experiment=args.experiment, **merged)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig):
    if cfg.p is not None and cfg.gamma is not None:
        raise ValidationError("give exactly one of p and gamma")
    if cfg.experiment in SAMPLING and cfg.seed is None:
        raise ValidationError(f"{cfg.experiment} needs --seed")
    if cfg.trials is not None and cfg.trials < 1:
        raise ValidationError(f"trials must be at least 1, got {cfg.trials}")
    if cfg.format not in ("csv", "json"):
        raise ValidationError(f"unknown format {cfg.format!r}")
    if cfg.dist is not None:
        MomentModel.parse(cfg.dist)
    if cfg.population is not None:
        if not cfg.population or any(not (v >= 0 and math.isfinite(v)) for v in cfg.population):
            raise ValidationError("population eigenvalues must be finite and nonnegative")
    if cfg.experiment in ("esd", "threshold-scan"):
        if cfg.p is None and cfg.gamma is None:
            raise ValidationError(f"{cfg.experiment} needs one of --p or --gamma")
        if cfg.n is None:
            raise ValidationError(f"{cfg.experiment} needs --n")
    if cfg.experiment == "esd" and len(cfg.d) != 1:
        raise ValidationError("esd takes exactly one --d")
    if cfg.experiment == "threshold-scan":
        if not cfg.d:
            raise ValidationError("threshold-scan needs at least one --d")
        bad = [d for d in cfg.d if not 1 <= d <= cfg.n]
        if bad:
            raise ValidationError(f"d values {bad} outside [1, n={cfg.n}]")


def _params(cfg, n, d) -> ModelParams:
    if cfg.p is not None:
        return ModelParams(n, d, cfg.p)
    return ModelParams.from_gamma(n, d, cfg.gamma)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _plain(v):
    """Convert numpy scalars, Fractions and non-finite floats for JSON."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, complex):
        return [_plain(v.real), _plain(v.imag)]
    return v


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


class Writer:
    """Collects output files and writes them once the experiment is done."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.files = {}

    def table(self, stem, header, rows):
        if self.cfg.format == "json":
            doc = {"version": __version__, "config": self.cfg.echo(),
                   "columns": list(header), "rows": [list(r) for r in rows]}
            self.files[stem + ".json"] = _dumps(doc)
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_cell(v) for v in r])
            self.files[stem + ".csv"] = buf.getvalue()

    def summary(self, stem, body):
        doc = {"version": __version__, "config": self.cfg.echo()}
        doc.update(body)
        self.files[stem + ".json"] = _dumps(doc)

    def flush(self):
        os.makedirs(self.cfg.out, exist_ok=True)
        for name in sorted(self.files):
            with open(os.path.join(self.cfg.out, name), "w", encoding="utf-8",
                      newline="") as fh:
                fh.write(self.files[name])
        return sorted(self.files)


def _dumps(doc):
    return json.dumps(_plain(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def _population_sqrt(pop, N):
    """Diagonal ``T^{1/2}`` of length N; a short list fills equal blocks."""
    pop = np.asarray(pop, dtype=float)
    if pop.size > N:
        raise ValidationError(f"{pop.size} population values for N = {N}")
    blocks = np.array_split(np.arange(N), pop.size)
    t = np.empty(N)
    for v, b in zip(pop, blocks):
        t[b] = v
    return t


def _limit_reference(cfg, params, t):
    """Reference CDF, its jumps and a density callable for the run's limit law."""
    gamma = params.gamma_n
    if t is None:
        law = MpLaw(gamma)
        return law.cdf, law.jumps, law.density
    H = esd_of_population(t)
    hi = float(np.max(H.atoms)) * (1.0 + math.sqrt(gamma)) ** 2 * 1.25 + 1.0
    x = np.linspace(0.0, hi, 2501)
    F = fixpoint_cdf(H, gamma, x, 1e-3)
    dens = stieltjes_inversion(H, gamma, x, 1e-3).density

    def density(y):
        return np.interp(y, x, dens, left=0.0, right=0.0)

    return F, ((0.0,) if F.atom > 0 else ()), density


def run_esd(cfg: ExperimentConfig, w: Writer) -> int:
    n, d = cfg.n, cfg.d[0]
    params = _params(cfg, n, d)
    model = MomentModel.parse(cfg.dist)
    t = None if cfg.population is None else _population_sqrt(cfg.population, params.N)
    cdf, jumps, density = _limit_reference(cfg, params, t)
    key = "ks_to_mp" if t is None else "ks_to_limit"

    spectra = []
    for trial in range(cfg.trials):
        Z = sample_matrix(params, model, [cfg.seed, trial])
        if t is not None:
            Z = apply_population_sqrt(Z, np.sqrt(t))
        spectra.append(covariance_spectrum(Z, params.p))

    pooled = np.concatenate([s.eigenvalues for s in spectra])
    lo, hi = float(pooled.min()), float(pooled.max())
    pad = 0.01 * (hi - lo) if hi > lo else 0.5
    rng_ = (lo - pad, hi + pad)

    eig_rows, hist_rows, trials = [], [], []
    for trial, spec in enumerate(spectra):
        eig_rows += [(trial, i, v) for i, v in enumerate(spec.eigenvalues)]
        h = histogram(spec, cfg.bins, rng_)
        hist_rows += [(trial, h.edges[i], h.edges[i + 1], h.counts[i], h.densities[i])
                      for i in range(cfg.bins)]
        trials.append({"trial": trial, "seed": [cfg.seed, trial],
                       key: ks_distance(spec, cdf, jumps),
                       "moments": {str(k): spectral_moment(spec, k) for k in range(1, 5)}})
    edges = np.linspace(rng_[0], rng_[1], cfg.bins + 1)
    mass = np.diff(np.asarray(cdf(edges), dtype=float))
    centers = 0.5 * (edges[1:] + edges[:-1])
    ref_rows = list(zip(edges[:-1], edges[1:], np.asarray(density(centers), float), mass))

    w.table("esd_eigenvalues", ("trial", "index", "eigenvalue"), eig_rows)
    w.table("esd_histogram", ("trial", "bin_left", "bin_right", "count", "density"), hist_rows)
    w.table("esd_reference", ("bin_left", "bin_right", "density", "mass"), ref_rows)
    ks = [tr[key] for tr in trials]
    w.summary("esd_summary", {
        "N": params.N, "p": params.p, "gamma_n": params.gamma_n, "seed": cfg.seed,
        key: ks, "mean_" + key: float(np.mean(ks)), "trials": trials})
    print(f"esd: N={params.N} p={params.p} mean {key}={np.mean(ks):.4f}")
    return EXIT_OK


def run_threshold_scan(cfg: ExperimentConfig, w: Writer) -> int:
    model = MomentModel.parse(cfg.dist)
    B = model.fourth_moment
    rows, flags = [], []
    for d in cfg.d:
        N = binomial(cfg.n, d)
        params = _params(cfg, cfg.n, d)
        ratio = exact_norm_variance_ratio(cfg.n, d, B)
        ks, reason = [], None
        if N * params.p > max_entries():
            reason = "resource_cap"
        elif N > MAX_EIGEN_DIM:
            reason = "eigensolve_size"
        else:
            law = MpLaw(params.gamma_n)
            for trial in range(cfg.trials):
                Z = sample_matrix(params, model, [cfg.seed, d, trial])
                ks.append(ks_distance(covariance_spectrum(Z, params.p), law.cdf, law.jumps))
            if N == 1:
                flags.append({"d": d, "reason": "degenerate_single_feature", "N": N})
        if reason:
            flags.append({"d": d, "reason": reason, "N": N, "p": params.p})
            mean_ks = std_ks = math.nan
        else:
            mean_ks = float(np.mean(ks))
            std_ks = float(np.std(ks, ddof=1)) if len(ks) > 1 else 0.0
        rows.append((cfg.n, d, d / math.sqrt(cfg.n), mean_ks, std_ks, ratio))
    w.table("threshold_scan", ("n", "d", "d_over_sqrt_n", "mean_ks", "std_ks",
                               "exact_norm_variance_ratio"), rows)
    w.summary("threshold_scan_summary", {"fourth_moment": B, "flags": flags})
    print(f"threshold-scan: {len(rows)} rows, {len(flags)} flagged")
    return EXIT_OK


def _model_for_B(B):
    if B == 1:
        return MomentModel.rademacher()
    if B == 3:
        return MomentModel.gaussian()
    return MomentModel.three_point(B)


def run_variance_check(cfg: ExperimentConfig, w: Writer) -> int:
    ns = [cfg.n] if cfg.n is not None else list(VARIANCE_GRID_N)
    ds = cfg.d or list(VARIANCE_GRID_D)
    models = ([MomentModel.parse(cfg.dist)] if cfg.dist
              else [_model_for_B(B) for B in VARIANCE_GRID_B])
    rows, violations = [], []
    for model in models:
        B = model.fourth_moment
        for n in ns:
            for k, d in enumerate(ds):
                if d > n:
                    continue
                rep = variance_report(n, d, B)
                mc = [math.nan, math.nan, 0]
                if peak_level_size(n, d) <= MC_MAX_N and cfg.trials >= 1000:
                    rng = np.random.default_rng([cfg.seed, n, d, int(round(B * 1000))])
                    est = mc_norm_variance(ModelParams(n, d, 1), model, cfg.trials, rng)
                    mc = [est.estimate, est.stderr, est.trials]
                if rep.violations:
                    violations.append({"n": n, "d": d, "B": B, "violated": list(rep.violations)})
                rows.append((n, d, B, str(model), rep.exact, rep.exact_ratio,
                             rep.upper_bound.ratio, rep.upper_bound.applicable,
                             rep.lower_bound.ratio, rep.lower_bound.applicable,
                             rep.lower_bound_large_d.ratio, rep.lower_bound_large_d.applicable,
                             ";".join(rep.violations), *mc))
    w.table("variance_check",
            ("n", "d", "b", "dist", "exact_variance", "exact_ratio",
             "upper_ratio", "upper_applicable", "lower_ratio", "lower_applicable",
             "lower_large_d_ratio", "lower_large_d_applicable", "violations",
             "mc_estimate", "mc_stderr", "mc_trials"), rows)
    w.summary("variance_check_summary", {"rows": len(rows), "violations": violations})
    print(f"variance-check: {len(rows)} rows, {len(violations)} violations")
    return EXIT_BOUND if violations else EXIT_OK


def _random_tuple(rng, n, d, m):
    """2m subsets of size d; each counterpart repeats its partner half the time."""
    out = []
    for _ in range(m):
        a = tuple(sorted(rng.choice(n, d, replace=False) + 1))
        b = a if rng.random() < 0.5 else tuple(sorted(rng.choice(n, d, replace=False) + 1))
        out += [a, b]
    return out


def run_moments_check(cfg: ExperimentConfig, w: Writer) -> int:
    models = [MomentModel.parse(cfg.dist)] if cfg.dist else \
        [MomentModel.parse(s) for s in MOMENT_DISTS]
    cases = []
    for m in (1, 2):
        for n in range(1, 9):
            for dl in itertools.product(range(1, min(3, n) + 1), repeat=m):
                cases.append((m, n, dl))
    # large-n cases where the bound becomes applicable
    cases += [(1, 100, (1,)), (2, 100, (1, 1)), (2, 400, (1, 1))]

    rows, violations = [], []
    for model in models:
        C = model.moment_constant()
        for m, n, dl in cases:
            exact = c_moment_exact(m, n, dl, model)
            bd = c_moment_bound(m, n, dl, C)
            bad = bd.applicable and float(exact) > bd.bound
            if bad:
                violations.append({"m": m, "n": n, "d_list": list(dl), "dist": str(model)})
            rows.append((m, n, ";".join(map(str, dl)), str(model), float(exact), str(exact),
                         C, bd.bound, bd.applicable, bad))
    w.table("moments_check", ("m", "n", "d_list", "dist", "c_moment", "c_moment_exact",
                              "moment_constant", "bound", "bound_applicable", "violation"),
            rows)

    gauss = MomentModel.gaussian()
    rng = np.random.default_rng([cfg.seed, 1])
    tuple_rows, tuple_bad = [], 0
    for k in range(cfg.trials):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(1, min(3, n) + 1))
        m = int(rng.integers(1, 4))
        subsets = _random_tuple(rng, n, d, m)
        val = float(tensor_moment_exact(gauss, subsets))
        bound = shared_degree_moment_bound(gauss, subsets)
        holds = 0.0 <= val <= bound * (1 + 1e-12)
        tuple_bad += not holds
        tuple_rows.append((k, m, n, d, " ".join("-".join(map(str, s)) for s in subsets),
                           val, bound, holds))
    w.table("moments_check_tuples", ("tuple_index", "m", "n", "d", "subsets",
                                     "tensor_moment", "bound", "holds"), tuple_rows)
    w.summary("moments_check_summary", {"rows": len(rows), "violations": violations,
                                        "tuples": cfg.trials, "tuple_violations": tuple_bad})
    print(f"moments-check: {len(rows)} rows, {len(violations)} violations, "
          f"{tuple_bad}/{cfg.trials} tuple violations")
    return EXIT_BOUND if violations or tuple_bad else EXIT_OK


def run_identity_suite(cfg: ExperimentConfig, w: Writer) -> int:
    re_lo, re_hi = parse_range(cfg.z_re, 2)
    reports = identity_suite(cfg.trials, cfg.seed, im_floor=cfg.z_im_floor,
                             re_range=(re_lo, re_hi))
    bad = [r for r in reports if r.residual >= RESIDUAL_THRESHOLD
           or (r.bound_checked is not None and not r.bound_checked.holds)]
    worst = max(r.residual for r in reports)
    w.summary("identity_suite", {"threshold": RESIDUAL_THRESHOLD, "max_residual": worst,
                                 "failures": len(bad),
                                 "reports": [r.to_dict() for r in reports]})
    print(f"identity-suite: {len(reports)} reports, max residual {worst:.3e}, "
          f"{len(bad)} failures")
    for r in bad:
        print(f"identity failure {r.name}: residual={r.residual!r} "
              f"digest={json.dumps(_plain(r.digest), sort_keys=True)}", file=sys.stderr)
    return EXIT_BOUND if bad else EXIT_OK


def run_fixpoint(cfg: ExperimentConfig, w: Writer) -> int:
    lo, hi, steps = parse_range(cfg.grid, 3)
    if cfg.gamma is not None:
        gamma = cfg.gamma
    elif cfg.p is not None and cfg.n is not None and len(cfg.d) == 1:
        gamma = ModelParams(cfg.n, cfg.d[0], cfg.p).gamma_n
    else:
        raise ValidationError("fixpoint needs --gamma or --n, --d and --p")
    pop = cfg.population or [1.0]
    H = esd_of_population(pop)
    isotropic = bool(np.all(H.atoms == 1.0))
    x = np.linspace(lo, hi, steps)
    res = stieltjes_inversion(H, gamma, x, cfg.eta, raise_on_failure=False)

    header = ["x", "re_m", "im_m", "density", "iterations", "residual", "converged"]
    cols = [x, res.m.real, res.m.imag, res.density, res.iterations, res.residual, res.converged]
    if isotropic:
        ref = mp_stieltjes(gamma, x + 1j * cfg.eta)
        dens = mp_density(gamma, x)
        header += ["mp_re_m", "mp_im_m", "mp_density", "delta_m", "delta_density"]
        cols += [ref.real, ref.imag, dens, np.abs(res.m - ref), np.abs(res.density - dens)]
    rows = list(zip(*cols))
    w.table("fixpoint", header, rows)

    failed = int(np.count_nonzero(~res.converged))
    body = {"gamma": gamma, "population": H.atoms, "weights": H.weights,
            "isotropic": isotropic, "points": steps, "failed": failed,
            "clamped": res.clamped,
            "max_residual": float(np.nanmax(res.residual)) if failed < steps else None}
    if isotropic:
        body["max_delta_density"] = float(np.nanmax(cols[-1]))
    w.summary("fixpoint_summary", body)
    print(f"fixpoint: {steps} points, {failed} unconverged")
    return EXIT_SOLVER if failed > FIXPOINT_FAIL_QUOTA * steps else EXIT_OK


RUNNERS = {
    "esd": run_esd,
    "threshold-scan": run_threshold_scan,
    "variance-check": run_variance_check,
    "moments-check": run_moments_check,
    "identity-suite": run_identity_suite,
    "fixpoint": run_fixpoint,
}


def run(cfg: ExperimentConfig) -> int:
    """Run one experiment and write its files; returns the exit code."""
    w = Writer(cfg)
    code = RUNNERS[cfg.experiment](cfg, w)
    w.flush()
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return run(cfg)
    except (ValidationError, ResourceError, BinomialOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"solver failure: {exc} {_plain(exc.diagnostics)}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
