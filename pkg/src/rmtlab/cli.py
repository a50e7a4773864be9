"""Command-line front end; every pipeline is a reproducible, configured run.

Configuration is TOML with flag overrides (flags win); the environment
variable RMTLAB_SEED overrides a config-file seed but not an explicit
--seed flag.  Every run writes a metadata.json beside its outputs that is
sufficient to re-run the exact computation.  Worker count never changes
output bytes.
"""

import argparse
import json
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .distributions import constrain_unit_variance, gig_pdf
from .ensembles import (
    EnsembleSpec,
    MatrixKind,
    PlbmProfile,
    localization_diagnostics,
    trace_moment,
)
from .experiments import (
    MIDDLE_HALF,
    SpectralWindow,
    WindowMode,
    collect_components,
    collect_local_variance_multi,
    component_histogram,
    default_component_indices,
    n_independence_scan,
    spread_component_indices,
    variance_histogram,
)
from .fitting import fit_chi2_to_ghd, fit_ghd_arrays
from .outputs import (
    read_histogram_csv,
    write_curve_csv,
    write_histogram_csv,
    write_json,
    write_values_csv,
)
from .presets import FIGURE_IDS, build_figure_bundle

DEFAULT_SEED = 20260809
_RNG_NOTE = {
    "bit_generator": "philox4x64-10",
    "stream": "seed-sequence hash of (master_seed, realization_index)",
    "normal_transform": "ziggurat",
    "draw_order": "diagonal first, then row-major upper triangle",
}


class CliError(RuntimeError):
    pass


def _load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {p}")
    with open(p, "rb") as fh:
        return tomllib.load(fh)


def _resolve(args, config, section, key, default=None):
    """Flag > (seed: env) > config [section] > config [common] > default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key == "seed":
        env = os.environ.get("RMTLAB_SEED")
        if env is not None:
            try:
                return int(env)
            except ValueError:
                raise CliError(f"RMTLAB_SEED must be an integer, got '{env}'")
    for sect in (section, "common"):
        if sect in config and key in config[sect]:
            return config[sect][key]
    return default


def _ensemble_spec(args, config, section):
    kind_name = _resolve(args, config, section, "ensemble", "plbm")
    try:
        kind = MatrixKind(str(kind_name).lower())
    except ValueError:
        raise CliError(f"unknown ensemble '{kind_name}' (expected plbm or umm)")
    profile_name = _resolve(args, config, section, "profile", "circular")
    try:
        profile = PlbmProfile(str(profile_name).lower())
    except ValueError:
        raise CliError(f"unknown profile '{profile_name}' (expected circular or mod)")
    n = _resolve(args, config, section, "n")
    if n is None:
        raise CliError("matrix dimension --n is required")
    return EnsembleSpec(
        kind=kind,
        n_dim=int(n),
        s=float(_resolve(args, config, section, "s", 0.7)),
        epsilon=float(_resolve(args, config, section, "eps", 1.0)),
        master_seed=int(_resolve(args, config, section, "seed", DEFAULT_SEED)),
        plbm_profile=profile,
    )


def _window(args, config, section):
    name = str(_resolve(args, config, section, "window", "middle-half")).lower()
    if name == "middle-half":
        return MIDDLE_HALF
    if name == "centered":
        m = _resolve(args, config, section, "m-window")
        if m is None:
            raise CliError("--m-window is required with --window centered")
        return SpectralWindow(WindowMode.CENTERED_COUNT, int(m))
    raise CliError(f"unknown window '{name}' (expected middle-half or centered)")


def _components(args, config, section, n_dim, default_name="default"):
    raw = _resolve(args, config, section, "components", default_name)
    if isinstance(raw, str):
        name = raw.strip().lower()
        if name == "default":
            return default_component_indices(n_dim)
        if name == "spread":
            return spread_component_indices(n_dim)
        return tuple(int(p) for p in raw.split(","))
    return tuple(int(p) for p in raw)


def _int_list(value):
    if isinstance(value, str):
        return [int(p) for p in value.split(",")]
    if isinstance(value, int):
        return [value]
    return [int(p) for p in value]


def _float_list(value):
    if isinstance(value, str):
        return [float(p) for p in value.split(",")]
    return [float(p) for p in value]


def _out_dir(args, config, section):
    out = _resolve(args, config, section, "out")
    if out is None:
        raise CliError("an output directory --out is required")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _spec_meta(spec):
    return {
        "ensemble": spec.kind.value,
        "n_dim": spec.n_dim,
        "s": spec.s,
        "epsilon": spec.epsilon,
        "master_seed": spec.master_seed,
        "profile": spec.plbm_profile.value,
    }


def _cmd_sample(args, config):
    section = "sample"
    spec = _ensemble_spec(args, config, section)
    window = _window(args, config, section)
    components = _components(args, config, section, spec.n_dim)
    realisations = int(_resolve(args, config, section, "realisations", 1000))
    bin_width = float(_resolve(args, config, section, "bin-width", 0.05))
    half_range = float(_resolve(args, config, section, "half-range", 6.0))
    threads = int(_resolve(args, config, section, "threads", 1))
    out = _out_dir(args, config, section)

    samples = collect_components(spec, realisations, window, components, threads=threads)
    hist = component_histogram(samples, bin_width, half_range)
    write_histogram_csv(out / "histogram.csv", hist)
    outputs = ["histogram.csv"]
    if _resolve(args, config, section, "raw", False):
        write_values_csv(out / "samples.csv", samples.values)
        outputs.append("samples.csv")
    write_json(out / "metadata.json", {
        "command": "sample",
        "spec": _spec_meta(spec),
        "window": window.mode.value,
        "m_window": window.m_window,
        "components": list(components),
        "realisations": realisations,
        "binning": {"bin_width": bin_width, "half_range": half_range},
        "excluded_fraction": hist.excluded_fraction,
        "rng": _RNG_NOTE,
        "version": __version__,
        "outputs": outputs,
    })
    print(f"wrote {', '.join(outputs)} to {out}")
    return 0


def _cmd_fit(args, config):
    section = "fit"
    floor = float(_resolve(args, config, section, "density-floor", 0.01))
    out = _out_dir(args, config, section)
    centers, density = read_histogram_csv(args.histogram)
    result = fit_ghd_arrays(centers, density, density_floor=floor)
    payload = result.to_json_dict()
    payload["source"] = str(args.histogram)
    write_json(out / "fit.json", payload)
    print(
        f"lambda={result.lam:.6g} xi={result.xi:.6g} alpha={result.alpha:.6g} "
        f"delta={result.delta:.6g} rms={result.residual_rms:.3g} "
        f"converged={result.converged}"
    )
    return 0


def _cmd_variance(args, config):
    section = "variance"
    spec = _ensemble_spec(args, config, section)
    m_windows = _int_list(_resolve(args, config, section, "m-windows", "50,100,200"))
    components = _components(args, config, section, spec.n_dim, default_name="spread")
    realisations = int(_resolve(args, config, section, "realisations", 1000))
    bin_width = float(_resolve(args, config, section, "bin-width", 0.1))
    half_range = float(_resolve(args, config, section, "half-range", 4.0))
    threads = int(_resolve(args, config, section, "threads", 1))
    out = _out_dir(args, config, section)

    sets = collect_local_variance_multi(spec, realisations, m_windows, components, threads=threads)
    outputs = []
    for m in m_windows:
        write_values_csv(out / f"variance_m{m}.csv", sets[m].values)
        write_histogram_csv(out / f"variance_hist_m{m}.csv", variance_histogram(sets[m], bin_width, half_range))
        outputs += [f"variance_m{m}.csv", f"variance_hist_m{m}.csv"]
    write_json(out / "metadata.json", {
        "command": "variance",
        "spec": _spec_meta(spec),
        "m_windows": m_windows,
        "components": list(components),
        "realisations": realisations,
        "binning": {"bin_width": bin_width, "half_range": half_range},
        "rng": _RNG_NOTE,
        "version": __version__,
        "outputs": outputs,
    })
    print(f"wrote {len(outputs)} files to {out}")
    return 0


def _cmd_scan_n(args, config):
    section = "scan-n"
    spec = _ensemble_spec(args, config, section)
    n_list = _int_list(_resolve(args, config, section, "n-list", "256,512,1024"))
    realisations = _resolve(args, config, section, "realisations", 300)
    if not isinstance(realisations, int):
        realisations = _int_list(realisations)
    selector_name = str(_resolve(args, config, section, "components", "default")).lower()
    selector = spread_component_indices if selector_name == "spread" else default_component_indices
    bin_width = float(_resolve(args, config, section, "bin-width", 0.05))
    half_range = float(_resolve(args, config, section, "half-range", 6.0))
    threads = int(_resolve(args, config, section, "threads", 1))
    out = _out_dir(args, config, section)

    scan = n_independence_scan(
        spec, n_list, realisations, MIDDLE_HALF, selector, bin_width, half_range, threads
    )
    outputs = []
    for n in n_list:
        write_histogram_csv(out / f"hist_n{n}.csv", scan.histograms[n])
        outputs.append(f"hist_n{n}.csv")
    write_json(out / "distances.json", {
        "pairs": [{"n_a": a, "n_b": b, "sup_distance": d} for a, b, d in scan.distances],
    })
    write_json(out / "metadata.json", {
        "command": "scan-n",
        "spec": _spec_meta(spec),
        "n_list": n_list,
        "realisations": realisations,
        "components": selector_name,
        "binning": {"bin_width": bin_width, "half_range": half_range},
        "rng": _RNG_NOTE,
        "version": __version__,
        "outputs": outputs + ["distances.json"],
    })
    for a, b, d in scan.distances:
        print(f"sup-distance N={a} vs N={b}: {d:.5f}")
    return 0


def _cmd_diagnostics(args, config):
    section = "diagnostics"
    spec = _ensemble_spec(args, config, section)
    orders = _int_list(_resolve(args, config, section, "orders", "1,2"))
    realisations = int(_resolve(args, config, section, "realisations", 100))
    out = _out_dir(args, config, section)
    report = localization_diagnostics(spec)
    moments = {}
    for order in orders:
        est = trace_moment(spec, order, realisations)
        moments[str(order)] = {"mean": est.mean, "std_error": est.std_error}
        print(f"mu_{order} = {est.mean:.6g} +- {est.std_error:.3g}")
    print(f"S1 = {report.s1:.6g}, S2 = {report.s2:.6g}, regime = {report.regime.value}")
    write_json(out / "diagnostics.json", {
        "command": "diagnostics",
        "spec": _spec_meta(spec),
        "s1": report.s1,
        "s2": report.s2,
        "regime": report.regime.value,
        "trace_moments": moments,
        "realisations": realisations,
        "rng": _RNG_NOTE,
        "version": __version__,
    })
    return 0


def _cmd_chi2_map(args, config):
    section = "chi2-map"
    xi_list = _float_list(_resolve(args, config, section, "xi-list", "0.02,0.2,2"))
    lam_min = float(_resolve(args, config, section, "lambda-min", -2.0))
    lam_max = float(_resolve(args, config, section, "lambda-max", 4.0))
    steps = int(_resolve(args, config, section, "lambda-steps", 61))
    out = _out_dir(args, config, section)
    lam_grid = np.linspace(lam_min, lam_max, steps)
    outputs = []
    for xi in xi_list:
        nus = [fit_chi2_to_ghd(float(lam), xi).params.nu for lam in lam_grid]
        fname = f"chi2_map_xi{xi}.csv"
        write_curve_csv(out / fname, lam_grid, nus, header="lambda,nu")
        outputs.append(fname)
    write_json(out / "metadata.json", {
        "command": "chi2-map",
        "xi_list": xi_list,
        "lambda_grid": [lam_min, lam_max, steps],
        "fit_window": [0.04, 4.0],
        "fit_grid_points": 200,
        "version": __version__,
        "outputs": outputs,
    })
    print(f"wrote {', '.join(outputs)} to {out}")
    return 0


def _cmd_reproduce(args, config):
    section = "reproduce"
    seed = int(_resolve(args, config, section, "seed", DEFAULT_SEED))
    out = _out_dir(args, config, section)
    bundle = build_figure_bundle(args.figure, out, scale=args.scale, seed=seed)
    print(f"bundle written to {bundle}")
    return 0


def _add_common(parser):
    parser.add_argument("--config", help="TOML config file; flags override it")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="master seed (env RMTLAB_SEED overrides config)")
    parser.add_argument("--threads", type=int, help="worker processes (never changes results)")


def _add_ensemble(parser):
    parser.add_argument("--ensemble", choices=["plbm", "umm"])
    parser.add_argument("--n", type=int, help="matrix dimension N")
    parser.add_argument("--s", type=float, help="decay exponent")
    parser.add_argument("--eps", type=float, help="variance prefactor")
    parser.add_argument("--profile", choices=["circular", "mod"])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Monte Carlo lab for eigenvector statistics of hierarchical random matrices",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="collect rescaled components and histogram them")
    _add_common(p)
    _add_ensemble(p)
    p.add_argument("--realisations", type=int)
    p.add_argument("--window", choices=["middle-half", "centered"])
    p.add_argument("--m-window", type=int, dest="m_window")
    p.add_argument("--components", help="'default', 'spread', or comma list of 1-based indices")
    p.add_argument("--bin-width", type=float, dest="bin_width")
    p.add_argument("--half-range", type=float, dest="half_range")
    p.add_argument("--raw", action="store_const", const=True, default=None,
                   help="also write the raw samples")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("fit", help="fit the constrained density family to a histogram CSV")
    _add_common(p)
    p.add_argument("histogram", help="path to a bin_center,density CSV")
    p.add_argument("--density-floor", type=float, dest="density_floor")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("variance", help="collect local eigenvector variances")
    _add_common(p)
    _add_ensemble(p)
    p.add_argument("--realisations", type=int)
    p.add_argument("--m-windows", dest="m_windows", help="comma list of window sizes")
    p.add_argument("--components")
    p.add_argument("--bin-width", type=float, dest="bin_width")
    p.add_argument("--half-range", type=float, dest="half_range")
    p.set_defaults(func=_cmd_variance)

    p = sub.add_parser("scan-n", help="dimension-independence scan of the component law")
    _add_common(p)
    _add_ensemble(p)
    p.add_argument("--n-list", dest="n_list")
    p.add_argument("--realisations", type=int)
    p.add_argument("--components", choices=["default", "spread"])
    p.add_argument("--bin-width", type=float, dest="bin_width")
    p.add_argument("--half-range", type=float, dest="half_range")
    p.set_defaults(func=_cmd_scan_n)

    p = sub.add_parser("diagnostics", help="entry-moment sums S1/S2, regime, trace moments")
    _add_common(p)
    _add_ensemble(p)
    p.add_argument("--orders")
    p.add_argument("--realisations", type=int)
    p.set_defaults(func=_cmd_diagnostics)

    p = sub.add_parser("chi2-map", help="best chi-square nu against lambda for fixed xi")
    _add_common(p)
    p.add_argument("--xi-list", dest="xi_list")
    p.add_argument("--lambda-min", type=float, dest="lambda_min")
    p.add_argument("--lambda-max", type=float, dest="lambda_max")
    p.add_argument("--lambda-steps", type=int, dest="lambda_steps")
    p.set_defaults(func=_cmd_chi2_map)

    p = sub.add_parser("reproduce", help="canned study bundles (fig2..fig10)")
    _add_common(p)
    p.add_argument("figure", help=f"one of: {', '.join(FIGURE_IDS)}")
    p.add_argument("--scale", choices=["desk", "full"], default="desk")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except (CliError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
