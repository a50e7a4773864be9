"""Canned study bundles behind the `reproduce` subcommand.

Each preset id (fig2..fig10) maps to a fixed parameter set at two scales:
`desk` keeps N <= 1024 and at most 300 realisations so a bundle finishes
in minutes; `full` mirrors the large-scale study (N up to 8192, 1000
realisations).  A bundle directory holds the CSV series, a manifest.json
for the renderer, and a metadata.json sufficient to re-run it.
"""

from pathlib import Path

import numpy as np

from . import __version__
from .distributions import (
    Chi2Params,
    chi2_pdf,
    constrain_unit_variance,
    ghd_pdf,
    gig_pdf,
    goe_local_variance_pdf,
    ptd_pdf,
)
from .ensembles import EnsembleSpec, MatrixKind
from .experiments import (
    MIDDLE_HALF,
    collect_components_and_variance,
    collect_local_variance_multi,
    component_histogram,
    n_independence_scan,
    spread_component_indices,
    variance_histogram,
)
from .fitting import fit_chi2_to_ghd, fit_ghd
from .outputs import write_curve_csv, write_histogram_csv, write_json, write_values_csv

FIGURE_IDS = tuple(f"fig{i}" for i in range(2, 11))

X_BIN_WIDTH = 0.05
X_HALF_RANGE = 6.0
VAR_BIN_WIDTH = 0.1
VAR_HALF_RANGE = 4.0

_COLOR_CYCLE_N = ("magenta", "green", "blue", "red", "black")  # small N -> large N


def _scales(scale):
    if scale == "desk":
        return {"n_list": (256, 512, 1024), "n_big": 1024, "realisations": 300,
                "realisations_goe": 200}
    if scale == "full":
        return {"n_list": (512, 1024, 2048, 4096, 8192), "n_big": 4096,
                "realisations": 1000, "realisations_goe": 1000}
    raise ValueError(f"unknown scale '{scale}' (expected desk or full)")


def _spec(kind, n, s, eps, seed):
    return EnsembleSpec(kind=kind, n_dim=n, s=s, epsilon=eps, master_seed=seed)


def _rng_note():
    return {
        "bit_generator": "philox4x64-10",
        "stream": "seed-sequence hash of (master_seed, realization_index)",
        "normal_transform": "ziggurat",
        "draw_order": "diagonal first, then row-major upper triangle",
    }


def _manifest(figure, axis_scale, series):
    return {"figure": figure, "axis_scale": axis_scale, "series": series}


def _curve_grid():
    return np.linspace(-X_HALF_RANGE, X_HALF_RANGE, 481)


def _positive_grid(lo=0.02, hi=VAR_HALF_RANGE, n=400):
    return np.linspace(lo, hi, n)


def _fit_curve_files(out, name, fit):
    params = constrain_unit_variance(fit.lam, fit.xi)
    xs = _curve_grid()
    write_curve_csv(out / name, xs, ghd_pdf(xs, params))
    return params


def _scan_bundle(figure, kind, s, seed, out, scale, realisations, reference):
    """Shared builder for the dimension-collapse bundles (fig2, fig3, fig4)."""
    cfg = _scales(scale)
    base = _spec(kind, cfg["n_list"][0], s, 1.0, seed)
    scan = n_independence_scan(
        base,
        cfg["n_list"],
        realisations,
        window=MIDDLE_HALF,
        component_selector=spread_component_indices,
        bin_width=X_BIN_WIDTH,
        half_range=X_HALF_RANGE,
    )
    series = []
    for pos, n in enumerate(cfg["n_list"]):
        fname = f"hist_n{n}.csv"
        write_histogram_csv(out / fname, scan.histograms[n])
        series.append({"csv": fname, "label": f"N={n}", "role": "empirical-points"})
    meta = {
        "command": "reproduce",
        "figure": figure,
        "scale": scale,
        "ensemble": kind.value,
        "s": s,
        "epsilon": 1.0,
        "master_seed": seed,
        "n_list": list(cfg["n_list"]),
        "realisations": realisations,
        "window": "middle-half",
        "components": "spread (1 and multiples of N/8)",
        "binning": {"bin_width": X_BIN_WIDTH, "half_range": X_HALF_RANGE},
        "rng": _rng_note(),
        "version": __version__,
        "distances": [list(d) for d in scan.distances],
    }
    if reference == "ghd-fit":
        n_big = cfg["n_list"][-1]
        fit = fit_ghd(scan.histograms[n_big])
        _fit_curve_files(out, "ghd_fit.csv", fit)
        write_json(out / "fit.json", fit.to_json_dict())
        series.append({"csv": "ghd_fit.csv", "label": "GHD fit", "role": "fit-line"})
        meta["fit"] = fit.to_json_dict()
    else:
        xs = _curve_grid()
        write_curve_csv(out / "ptd.csv", xs, ptd_pdf(xs))
        series.append({"csv": "ptd.csv", "label": "PTD", "role": "fit-line"})
    write_json(out / "manifest.json", _manifest(figure, "log-y", series))
    write_json(out / "metadata.json", meta)


def _eps_family_bundle(figure, kind, axis_scale, seed, out, scale):
    """Bundles comparing eps in {0.3, 0.5, 1.5} at fixed s=0.7 (fig5, fig6, fig7)."""
    cfg = _scales(scale)
    n = cfg["n_big"] if scale == "full" else 1024
    series = []
    fits = {}
    for eps in (0.3, 0.5, 1.5):
        spec = _spec(kind, n, 0.7, eps, seed)
        comps, _ = collect_components_and_variance(
            spec,
            cfg["realisations"],
            window=MIDDLE_HALF,
            component_indices=spread_component_indices(n),
            m_windows=(),
        )
        hist = component_histogram(comps, X_BIN_WIDTH, X_HALF_RANGE)
        hname = f"hist_eps{eps}.csv"
        write_histogram_csv(out / hname, hist)
        series.append({"csv": hname, "label": f"eps={eps}", "role": "empirical-points"})
        fit = fit_ghd(hist)
        fits[eps] = fit.to_json_dict()
        cname = f"ghd_fit_eps{eps}.csv"
        _fit_curve_files(out, cname, fit)
        series.append({"csv": cname, "label": f"GHD fit eps={eps}", "role": "fit-line"})
    xs = _curve_grid()
    write_curve_csv(out / "ptd.csv", xs, ptd_pdf(xs))
    series.append({"csv": "ptd.csv", "label": "PTD", "role": "reference-dashed"})
    write_json(out / "manifest.json", _manifest(figure, axis_scale, series))
    write_json(out / "metadata.json", {
        "command": "reproduce",
        "figure": figure,
        "scale": scale,
        "ensemble": kind.value,
        "s": 0.7,
        "epsilon_list": [0.3, 0.5, 1.5],
        "n_dim": n,
        "master_seed": seed,
        "realisations": cfg["realisations"],
        "window": "middle-half",
        "components": "spread (1 and multiples of N/8)",
        "binning": {"bin_width": X_BIN_WIDTH, "half_range": X_HALF_RANGE},
        "rng": _rng_note(),
        "version": __version__,
        "fits": fits,
    })


def _chi2_map_bundle(out, scale):
    lam_grid = np.linspace(-2.0, 4.0, 61 if scale == "desk" else 121)
    series = []
    for xi in (2.0, 0.2, 0.02):
        nus = [fit_chi2_to_ghd(float(lam), xi).params.nu for lam in lam_grid]
        fname = f"chi2_map_xi{xi}.csv"
        write_curve_csv(out / fname, lam_grid, nus, header="lambda,nu")
        series.append({"csv": fname, "label": f"xi={xi}", "role": "fit-line"})
    write_json(out / "manifest.json", _manifest("fig8", "linear", series))
    write_json(out / "metadata.json", {
        "command": "reproduce",
        "figure": "fig8",
        "scale": scale,
        "xi_list": [2.0, 0.2, 0.02],
        "lambda_grid": [float(lam_grid[0]), float(lam_grid[-1]), len(lam_grid)],
        "fit_window": [0.04, 4.0],
        "fit_grid_points": 200,
        "version": __version__,
    })


def _variance_bundle_intermediate(out, scale, seed):
    """Local-variance staircases in the slow-decay regime with GIG overlays (fig9)."""
    cfg = _scales(scale)
    n = cfg["n_big"] if scale == "full" else 1024
    realisations = cfg["realisations"]
    series = []
    fits = {}
    for eps, m_windows in ((0.5, (100,)), (1.0, (50, 100, 200))):
        spec = _spec(MatrixKind.PLBM, n, 0.7, eps, seed)
        comps, variances = collect_components_and_variance(
            spec,
            realisations,
            window=MIDDLE_HALF,
            component_indices=spread_component_indices(n),
            m_windows=m_windows,
        )
        fit = fit_ghd(component_histogram(comps, X_BIN_WIDTH, X_HALF_RANGE))
        fits[eps] = fit.to_json_dict()
        for m in m_windows:
            vname = f"variance_eps{eps}_m{m}.csv"
            write_values_csv(out / vname, variances[m].values)
            hname = f"variance_hist_eps{eps}_m{m}.csv"
            write_histogram_csv(out / hname, variance_histogram(variances[m]))
            series.append({"csv": hname, "label": f"eps={eps} M={m}", "role": "staircase"})
        params = constrain_unit_variance(fit.lam, fit.xi)
        xs = _positive_grid()
        cname = f"gig_eps{eps}.csv"
        write_curve_csv(out / cname, xs, gig_pdf(xs, params))
        series.append({"csv": cname, "label": f"GIG eps={eps}", "role": "fit-line"})
    write_json(out / "manifest.json", _manifest("fig9", "linear", series))
    write_json(out / "metadata.json", {
        "command": "reproduce",
        "figure": "fig9",
        "scale": scale,
        "ensemble": "plbm",
        "s": 0.7,
        "cases": {"eps=0.5": [100], "eps=1.0": [50, 100, 200]},
        "n_dim": n,
        "master_seed": seed,
        "realisations": realisations,
        "components": "spread (1 and multiples of N/8)",
        "binning": {"bin_width": VAR_BIN_WIDTH, "half_range": VAR_HALF_RANGE},
        "rng": _rng_note(),
        "version": __version__,
        "fits": {str(k): v for k, v in fits.items()},
    })


def _variance_bundle_goe(out, scale, seed):
    """Local-variance staircases in the fast-decay regime (fig10)."""
    cfg = _scales(scale)
    n = cfg["n_big"] if scale == "full" else 1024
    realisations = cfg["realisations"]
    m_windows = (50, 100, 200)
    spec = _spec(MatrixKind.PLBM, n, 0.3, 1.0, seed)
    variances = collect_local_variance_multi(spec, realisations, m_windows)
    series = []
    xs = _positive_grid(lo=0.5, hi=1.6, n=441)
    for m in m_windows:
        vname = f"variance_m{m}.csv"
        write_values_csv(out / vname, variances[m].values)
        hname = f"variance_hist_m{m}.csv"
        write_histogram_csv(out / hname, variance_histogram(variances[m]))
        series.append({"csv": hname, "label": f"M={m}", "role": "staircase"})
        write_curve_csv(out / f"chi2_m{m}.csv", xs, chi2_pdf(xs, Chi2Params(float(m))))
        series.append({"csv": f"chi2_m{m}.csv", "label": f"chi2 nu={m}", "role": "fit-line"})
        write_curve_csv(out / f"gauss_m{m}.csv", xs, goe_local_variance_pdf(xs, m))
        series.append({"csv": f"gauss_m{m}.csv", "label": f"gaussian M={m}", "role": "reference-dashed"})
    write_json(out / "manifest.json", _manifest("fig10", "linear", series))
    write_json(out / "metadata.json", {
        "command": "reproduce",
        "figure": "fig10",
        "scale": scale,
        "ensemble": "plbm",
        "s": 0.3,
        "epsilon": 1.0,
        "m_windows": list(m_windows),
        "n_dim": n,
        "master_seed": seed,
        "realisations": realisations,
        "components": "spread (1 and multiples of N/8)",
        "binning": {"bin_width": VAR_BIN_WIDTH, "half_range": VAR_HALF_RANGE},
        "rng": _rng_note(),
        "version": __version__,
    })


def build_figure_bundle(figure: str, out_dir, scale: str = "desk", seed: int = 20260809) -> Path:
    """Build one preset bundle; returns the bundle directory."""
    if figure not in FIGURE_IDS:
        raise ValueError(
            f"unknown figure id '{figure}'; valid ids: {', '.join(FIGURE_IDS)}"
        )
    cfg = _scales(scale)  # validates the scale early
    out = Path(out_dir) / figure
    out.mkdir(parents=True, exist_ok=True)
    if figure == "fig2":
        _scan_bundle("fig2", MatrixKind.PLBM, 0.7, seed, out, scale, cfg["realisations"], "ghd-fit")
    elif figure == "fig3":
        _scan_bundle("fig3", MatrixKind.UMM, 0.7, seed, out, scale, cfg["realisations"], "ghd-fit")
    elif figure == "fig4":
        _scan_bundle("fig4", MatrixKind.PLBM, 0.3, seed, out, scale, cfg["realisations_goe"], "ptd")
    elif figure == "fig5":
        _eps_family_bundle("fig5", MatrixKind.PLBM, "linear", seed, out, scale)
    elif figure == "fig6":
        _eps_family_bundle("fig6", MatrixKind.UMM, "linear", seed, out, scale)
    elif figure == "fig7":
        _eps_family_bundle("fig7", MatrixKind.UMM, "log-y", seed, out, scale)
    elif figure == "fig8":
        _chi2_map_bundle(out, scale)
    elif figure == "fig9":
        _variance_bundle_intermediate(out, scale, seed)
    elif figure == "fig10":
        _variance_bundle_goe(out, scale, seed)
    return out
