"""Command-line surface: sampling, estimation, diagnostics, the
multiscale test, and benchmark tables, with flat-file outputs.

Every run writes `<out>.manifest`, a key-value file with the resolved
configuration, the seed actually used, and package versions, so any
output can be regenerated byte-identically.  Exit codes: 0 success,
2 validation error, 3 numerical failure.
"""

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import __version__
from .core import (Ball, Box, allowed_wavenumbers_ball, allowed_wavevectors)
from .diagnostics import (fit_alpha, h_index, imse, paired_t_test,
                          run_multiscale_test, size_lambda)
from .errors import NumericalError, ValidationError
from .isotropic import bartlett_isotropic, default_r_max, estimate_pcf_kernel
from .kvio import read_kv, write_kv
from .samplers import (ProcessSampler, exact_curves, load_pattern, save_pattern,
                       thinned_structure_factor)
from .spectral import (bin_by_wavenumber, load_estimate, multitaper,
                       save_estimate, scattering_intensity, tapered)
from .tapers import indicator_taper, sine_taper, sine_taper_family

JOBS_ENV_VAR = "POINTSPEC_JOBS"

PROCESS_CHOICES = ("poisson", "thomas", "ginibre", "thinned_ginibre")


def _resolve_seed(seed):
    if seed is not None:
        return int(seed)
    return int(np.random.SeedSequence().entropy) % (1 << 64)


def _resolve_jobs(jobs):
    if jobs is not None:
        return max(1, int(jobs))
    env = os.environ.get(JOBS_ENV_VAR)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _parse_floats(text):
    try:
        return tuple(float(v) for v in str(text).split(","))
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_ints(text):
    try:
        return tuple(int(v) for v in str(text).split(","))
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {text!r}")


def _window_from_args(args):
    if args.window == "box":
        if args.lengths is None:
            raise ValidationError("box windows need --lengths")
        return Box(_parse_floats(args.lengths))
    if args.radius is None:
        raise ValidationError("ball windows need --radius")
    return Ball(float(args.radius), int(args.dim))


def _process_params(args):
    params = {}
    for key in ("intensity", "parent_intensity", "offspring_mean", "sigma", "retain_prob"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = float(value)
    return params


def _write_manifest(out, subcommand, args, seed=None, extra=None):
    skip = {"func", "config", "types"}
    manifest = {"subcommand": subcommand}
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        if value is None:
            continue
        manifest[f"config.{key}"] = value
    if seed is not None:
        manifest["seed"] = seed
    for key, value in (extra or {}).items():
        manifest[key] = value
    manifest["versions.pointspec"] = __version__
    manifest["versions.numpy"] = np.__version__
    import scipy
    manifest["versions.scipy"] = scipy.__version__
    manifest["versions.python"] = sys.version.split()[0]
    write_kv(str(out) + ".manifest", manifest)


# -- subcommand handlers ------------------------------------------------------

def cmd_sample(args):
    seed = _resolve_seed(args.seed)
    window = _window_from_args(args)
    sampler = ProcessSampler(args.process, _process_params(args))
    pattern = sampler(window, seed)
    save_pattern(pattern, args.out, seed=seed)
    _write_manifest(args.out, "sample", args, seed=seed,
                    extra={"n_points": len(pattern)})
    print(f"wrote {len(pattern)} points to {args.out}")
    return 0


def _build_grid(pattern, args):
    window = pattern.window
    if isinstance(window, Box):
        return allowed_wavevectors(window, float(args.k_max),
                                   restricted=args.grid == "restricted",
                                   n_free=int(args.n_free))
    return allowed_wavenumbers_ball(window, int(args.n_k))


def cmd_estimate(args):
    pattern = load_pattern(args.pattern)
    window = pattern.window
    if args.estimator == "bartlett":
        if not isinstance(window, Ball):
            raise ValidationError("estimator 'bartlett' needs a ball window; "
                                  "use 'si', 'tapered' or 'multitaper' on boxes")
        grid = allowed_wavenumbers_ball(window, int(args.n_k))
        est = bartlett_isotropic(pattern, grid.wavenumbers,
                                 self_normalized=args.self_normalized)
    else:
        if not isinstance(window, Box):
            raise ValidationError(f"estimator {args.estimator!r} needs a box window; "
                                  "use 'bartlett' on balls")
        grid = _build_grid(pattern, args)
        if args.estimator == "si":
            est = scattering_intensity(pattern, grid,
                                       self_normalized=args.self_normalized)
        elif args.estimator == "tapered":
            idx = _parse_ints(args.taper_index)
            taper = indicator_taper() if set(idx) == {0} else sine_taper(idx)
            est = tapered(pattern, grid, taper, debias=args.debias)
        else:
            family = sine_taper_family(int(args.taper_count), window.dim)
            est = multitaper(pattern, grid, family, debias=args.debias)
    if int(args.bins) > 0:
        est = bin_by_wavenumber(est, int(args.bins))
    save_estimate(est, args.out)
    _write_manifest(args.out, "estimate", args,
                    extra={"rho": est.meta.get("rho"),
                           "rho_source": est.meta.get("rho_source"),
                           "n_wavevectors": len(est)})
    print(f"wrote {len(est)} estimate values to {args.out}")
    return 0


def cmd_pcf(args):
    pattern = load_pattern(args.pattern)
    r_hi = float(args.r_max) if args.r_max is not None else default_r_max(pattern.window)
    n = int(args.n_r)
    r_grid = r_hi * np.arange(1, n + 1) / n
    bandwidth = float(args.bandwidth) if args.bandwidth is not None else None
    est = estimate_pcf_kernel(pattern, r_grid=r_grid, bandwidth=bandwidth)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "g_hat"])
        for r, g in zip(est.radii, est.values):
            writer.writerow([repr(float(r)), repr(float(g))])
    _write_manifest(args.out, "pcf", args,
                    extra={"bandwidth": est.bandwidth, "r_max": est.r_max,
                           "min_reliable_r": 0.5 * est.bandwidth})
    print(f"wrote pcf on {len(est)} radii to {args.out}")
    return 0


def cmd_hindex(args):
    est = load_estimate(args.estimate)
    report = h_index(est, float(args.fit_k_max))
    out = {"h": report.h, "s0": report.s0,
           "k_peak": "none" if report.k_peak is None else report.k_peak,
           "s_peak": report.s_peak, "fit_k_max": report.fit_k_max,
           "n_fit": report.n_fit,
           "effectively_hyperuniform": report.effectively_hyperuniform}
    if args.out:
        write_kv(args.out, out)
        _write_manifest(args.out, "hindex", args)
    for key, value in out.items():
        print(f"{key} = {value}")
    return 0


def cmd_alpha(args):
    est = load_estimate(args.estimate)
    alpha = fit_alpha(est, float(args.fit_k_max))
    if args.out:
        write_kv(args.out, {"alpha": alpha, "fit_k_max": float(args.fit_k_max)})
        _write_manifest(args.out, "alpha", args)
    print(f"alpha = {alpha}")
    return 0


def cmd_test(args):
    seed = _resolve_seed(args.seed)
    sizes = np.arange(float(args.size_min), float(args.size_max) + 1e-9, float(args.size_step))
    if len(sizes) < 2:
        raise ValidationError("schedule needs at least 2 window sizes")
    if args.window == "box":
        windows = [Box((s, s)) for s in sizes]
    else:
        windows = [Ball(float(s), int(args.dim)) for s in sizes]
    lam = float(args.lam) if args.lam is not None else size_lambda(len(windows))
    estimator = args.estimator
    if estimator is None:
        estimator = "si" if args.window == "box" else "bartlett"
    sampler = ProcessSampler(args.process, _process_params(args))
    report = run_multiscale_test(sampler, estimator, windows, lam, int(args.a),
                                 seed=seed, z=float(args.z),
                                 truncated=not args.untruncated,
                                 jobs=_resolve_jobs(args.jobs))
    out = report.to_kv()
    out["schedule"] = (f"{args.window}:{args.size_min}..{args.size_max}"
                       f":{args.size_step}")
    write_kv(args.out, out)
    _write_manifest(args.out, "test", args, seed=seed, extra={"lambda": lam})
    print(f"z_bar = {report.z_bar:.6g}, ci = [{report.ci_lo:.6g}, {report.ci_hi:.6g}], "
          f"reject = {report.reject}")
    return 0


def cmd_benchmark(args):
    seed = _resolve_seed(args.seed)
    window = Box((float(args.length), float(args.length)))
    sampler = ProcessSampler(args.process, _process_params(args))
    exact_s, _ = exact_curves(args.process, _process_params(args))
    grid = allowed_wavevectors(window, float(args.k_max), restricted=True)
    family = sine_taper_family(int(args.taper_count), window.dim)
    a = int(args.a)
    ss = np.random.SeedSequence(seed).spawn(a)
    si_runs, mt_runs = [], []
    for child in ss:
        pattern = sampler(window, np.random.default_rng(child))
        si_runs.append(bin_by_wavenumber(
            scattering_intensity(pattern, grid), int(args.bins)))
        mt_runs.append(bin_by_wavenumber(
            multitaper(pattern, grid, family, debias="direct"), int(args.bins)))
    k_lo, k_hi = float(args.k_lo), float(args.k_hi)
    si_imse = imse(si_runs, exact_s, k_lo, k_hi)
    mt_imse = imse(mt_runs, exact_s, k_lo, k_hi)
    test = paired_t_test(mt_imse["per_seed"], si_imse["per_seed"], one_sided=True)
    table = str(args.out_prefix) + "_imse.csv"
    with open(table, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed_index", "imse_si", "imse_ddmt"])
        for i, (u, v) in enumerate(zip(si_imse["per_seed"], mt_imse["per_seed"])):
            writer.writerow([i, repr(float(u)), repr(float(v))])
    report = str(args.out_prefix) + "_ttest.kv"
    write_kv(report, {"t": test["t"], "p": test["p"], "df": test["df"],
                      "imse_si_mean": si_imse["mean"], "imse_ddmt_mean": mt_imse["mean"],
                      "ivar_si": si_imse["ivar"], "ivar_ddmt": mt_imse["ivar"],
                      "k_lo": k_lo, "k_hi": k_hi, "a": a})
    _write_manifest(table, "benchmark", args, seed=seed)
    print(f"iMSE ddmt/si = {mt_imse['mean']:.4g}/{si_imse['mean']:.4g}, "
          f"t = {test['t']:.4g}, p = {test['p']:.4g}")
    return 0


def _write_svg(path, xs, ys, overlay=None, x_label="log10 k", y_label="log10 S"):
    width, height, margin = 640, 480, 60
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if overlay:
        y_lo = min(y_lo, min(overlay[1]))
        y_hi = max(y_hi, max(overlay[1]))
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x):
        return margin + (x - x_lo) / x_span * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y_lo) / y_span * (height - 2 * margin)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
             f'y2="{height - margin}" stroke="black"/>',
             f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
             f'stroke="black"/>']
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" '
                     f'fill="steelblue" fill-opacity="0.7"/>')
    if overlay:
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(*overlay))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="crimson" '
                     f'stroke-width="1.5"/>')
    parts.append(f'<text x="{width / 2:.0f}" y="{height - 20}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="14">{x_label}</text>')
    parts.append(f'<text x="20" y="{height / 2:.0f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="14" '
                 f'transform="rotate(-90 20 {height / 2:.0f})">{y_label}</text>')
    for value, pos in ((x_lo, sx(x_lo)), (x_hi, sx(x_hi))):
        parts.append(f'<text x="{pos:.0f}" y="{height - margin + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{value:.2f}</text>')
    for value, pos in ((y_lo, sy(y_lo)), (y_hi, sy(y_hi))):
        parts.append(f'<text x="{margin - 8}" y="{pos:.0f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{value:.2f}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))


def cmd_plotdata(args):
    est = load_estimate(args.estimate)
    k = est.wavenumbers
    v = est.values
    keep = v > 0
    excluded = int((~keep).sum())
    k, v = k[keep], v[keep]
    if len(k) == 0:
        raise ValidationError("plotdata: no positive estimate values to plot")
    exact_col = None
    if args.process:
        exact_s, _ = exact_curves(args.process, _process_params(args))
        exact_col = exact_s(k)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["log10_k", "log10_s"] + (["log10_s_exact"] if exact_col is not None else [])
        writer.writerow(header)
        for i in range(len(k)):
            row = [repr(float(np.log10(k[i]))), repr(float(np.log10(v[i])))]
            if exact_col is not None:
                row.append(repr(float(np.log10(exact_col[i]))) if exact_col[i] > 0
                           else "nan")
            writer.writerow(row)
    if args.svg:
        overlay = None
        if exact_col is not None:
            ok = exact_col > 0
            order = np.argsort(k[ok])
            overlay = (np.log10(k[ok])[order], np.log10(exact_col[ok])[order])
        _write_svg(args.svg, np.log10(k), np.log10(v), overlay=overlay)
    _write_manifest(args.out, "plotdata", args, extra={"excluded_nonpositive": excluded})
    print(f"wrote {len(k)} rows to {args.out} ({excluded} nonpositive values excluded)")
    return 0


# -- parser -------------------------------------------------------------------

def _add_process_options(sub):
    sub.add_argument("--process", choices=PROCESS_CHOICES, required=True)
    sub.add_argument("--intensity", type=float, default=None,
                     help="Poisson intensity (default 1/pi)")
    sub.add_argument("--parent-intensity", type=float, default=None)
    sub.add_argument("--offspring-mean", type=float, default=None)
    sub.add_argument("--sigma", type=float, default=None)
    sub.add_argument("--retain-prob", type=float, default=None)


def _add_window_options(sub, default="box"):
    sub.add_argument("--window", choices=("box", "ball"), default=default)
    sub.add_argument("--lengths", default=None, help="box side lengths, e.g. 40,40")
    sub.add_argument("--radius", type=float, default=None)
    sub.add_argument("--dim", type=int, default=2)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pointspec",
        description="Structure-factor estimation and hyperuniformity diagnostics "
                    "for stationary point patterns.")
    parser.add_argument("--version", action="version", version=f"pointspec {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("sample", help="draw a benchmark point pattern")
    _add_process_options(p)
    _add_window_options(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_sample)

    p = subs.add_parser("estimate", help="estimate the structure factor of a pattern")
    p.add_argument("--pattern", required=True)
    p.add_argument("--estimator", choices=("si", "tapered", "multitaper", "bartlett"),
                   default="si")
    p.add_argument("--self-normalized", action="store_true")
    p.add_argument("--debias", choices=("none", "direct", "undirect"), default="none")
    p.add_argument("--taper-index", default="1,1",
                   help="sine taper index, e.g. 1,2 (0 for the indicator taper)")
    p.add_argument("--taper-count", type=int, default=4)
    p.add_argument("--k-max", type=float, default=3.0)
    p.add_argument("--grid", choices=("restricted", "full"), default="restricted")
    p.add_argument("--n-free", type=int, default=64)
    p.add_argument("--n-k", type=int, default=64, help="wavenumber count on balls")
    p.add_argument("--bins", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_estimate)

    p = subs.add_parser("pcf", help="kernel pair-correlation estimate")
    p.add_argument("--pattern", required=True)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--n-r", type=int, default=128)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_pcf)

    p = subs.add_parser("hindex", help="H-index from an estimate file")
    p.add_argument("--estimate", required=True)
    p.add_argument("--fit-k-max", type=float, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_hindex)

    p = subs.add_parser("alpha", help="small-k decay exponent from an estimate file")
    p.add_argument("--estimate", required=True)
    p.add_argument("--fit-k-max", type=float, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_alpha)

    p = subs.add_parser("test", help="multiscale hyperuniformity test")
    _add_process_options(p)
    p.add_argument("--window", choices=("box", "ball"), default="box")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--size-min", type=float, default=20.0)
    p.add_argument("--size-max", type=float, default=60.0)
    p.add_argument("--size-step", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=None,
                   help="Poisson mean for the scale count (default: overflow rule)")
    p.add_argument("--a", type=int, default=50, help="number of coupled-sum draws")
    p.add_argument("--z", type=float, default=3.0)
    p.add_argument("--estimator",
                   choices=("si", "si_self", "bartlett", "bartlett_self"), default=None)
    p.add_argument("--untruncated", action="store_true",
                   help="draw M from the untruncated law (overflow errors out)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_test)

    p = subs.add_parser("benchmark", help="seed-matched iMSE comparison: DDMT vs SI")
    _add_process_options(p)
    p.add_argument("--length", type=float, default=40.0, help="box side")
    p.add_argument("--a", type=int, default=50)
    p.add_argument("--k-max", type=float, default=3.0)
    p.add_argument("--k-lo", type=float, default=0.1)
    p.add_argument("--k-hi", type=float, default=2.8)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--taper-count", type=int, default=4)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_benchmark)

    p = subs.add_parser("plotdata", help="log-log plot data (and optional SVG)")
    p.add_argument("--estimate", required=True)
    p.add_argument("--process", choices=PROCESS_CHOICES, default=None,
                   help="overlay the exact curve of a known process")
    p.add_argument("--retain-prob", type=float, default=None)
    p.add_argument("--svg", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_plotdata)

    return parser


def _apply_config(parser, args, argv):
    """Config-file values override defaults but not explicit flags."""
    if not getattr(args, "config", None):
        return args
    cfg = read_kv(args.config)
    known = vars(args)
    explicit = {token.split("=", 1)[0] for token in argv if token.startswith("--")}
    for key, raw in cfg.items():
        dest = key.replace("-", "_")
        if dest in ("func", "config") or dest not in known:
            raise ValidationError(f"{args.config}: unknown config key {key!r}")
        if "--" + key.replace("_", "-") in explicit:
            continue
        current = known[dest]
        if isinstance(current, bool):
            value = _parse_bool(raw)
        elif isinstance(current, int):
            value = int(raw)
        elif isinstance(current, float):
            value = float(raw)
        else:
            value = raw
        setattr(args, dest, value)
    return args


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(parser, args, argv)
        return args.func(args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (NumericalError, FloatingPointError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
