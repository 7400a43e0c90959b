"""Command-line front end: analyze / zoo / plotdata.

`analyze` runs the full diagnostic pipeline over sampled points of a configured
model and persists a versioned JSON report plus plot-ready CSV tables into one
directory per run (config echoed into the report; fully deterministic given
the config). `zoo` lists the model catalog with hypothesis tags. `plotdata`
re-emits CSV tables from an existing report.

Exit codes: 0 success, 2 configuration/usage errors, 1 any other module error
(the error is serialized as JSON on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .domination import check_volume_implication, domination_report
from .errors import ConfigError, ModelAssumptionError, SplitLabError
from .frobenius import bracket_defect
from .holonomy import defect_scaling, holonomy_defect
from .lyapunov import exponent_condition, lyapunov_spectrum, regularity_check
from .models import ModelSystem, load_model_table, zoo_entries
from .reporting import (SCHEMA_VERSION, RunConfig, RunReport, emit_plotdata,
                        load_report, write_brackets_csv, write_holonomy_csv,
                        write_regularity_csv, write_report, write_singulars_csv,
                        write_star_csv)

OUTPUT_ROOT_ENV = "SPLITLAB_OUT"


def _analyze_point(model: ModelSystem, x: np.ndarray, cfg: RunConfig,
                   with_brackets: bool) -> dict:
    space = model.space if model.space.kind == "chart_box" else None
    rate_floor = cfg.tolerance("rate_floor", 1e-3)
    entry: dict = {"point": x.tolist()}

    dom = domination_report(model, x, cfg.k_max,
                            rate_floor=rate_floor,
                            min_drop=cfg.tolerance("min_drop", 5.0))
    entry["ratios"] = {
        "dyn_ratio": dom.ratios.dyn_ratio,
        "vol_ratio_fwd": dom.ratios.vol_ratio_fwd,
        "vol_ratio_bwd": dom.ratios.vol_ratio_bwd,
        "exclusive": dom.ratios.exclusive,
    }
    so = dom.second_order
    entry["second_order"] = {
        "k_max": so.k_max,
        "fwd_log_ratios": so.fwd_log_ratios.tolist(),
        "bwd_log_ratios": so.bwd_log_ratios.tolist(),
        "fwd_min": so.fwd_min, "bwd_min": so.bwd_min,
        "fwd_slope": so.fwd_slope, "bwd_slope": so.bwd_slope,
        "verdict": so.verdict,
    }
    entry["nonresonance"] = {
        "extreme_implication_ok": dom.nonresonance.extreme_implication_ok,
        "triples": {
            f"{i},{j},{m}": {
                "side": tr.side,
                "rate_fwd": tr.rate_fwd, "rate_bwd": tr.rate_bwd,
                "slope_fwd": tr.slope_fwd, "slope_bwd": tr.slope_bwd,
                "worst_k_fwd": tr.worst_k_fwd, "worst_k_bwd": tr.worst_k_bwd,
            } for (i, j, m), tr in sorted(dom.nonresonance.triples.items())
        },
    }
    entry["singular_sequences"] = {
        f"{sub}:{'fwd' if sign > 0 else 'bwd'}": table.tolist()
        for (sub, sign), table in dom.sequences.items()
    }

    lyap = lyapunov_spectrum(model, x, cfg.lyapunov_k, "full")
    entry["lyapunov"] = {
        "horizon": lyap.horizon,
        "exponents": lyap.exponents.tolist(),
        "checkpoint_spread": lyap.checkpoint_spread,
        "sum": float(lyap.exponents.sum()),
    }
    margins = exponent_condition(model, x, cfg.lyapunov_k)
    entry["exponent_margins"] = {
        "mu": margins.mu.tolist(), "lam": margins.lam.tolist(),
        "min_abs_margin": margins.min_abs_margin,
        "margins": {f"{i},{j},{m}": v for (i, j, m), v in sorted(margins.margins.items())},
    }

    grid = [k for k in cfg.k_grid if k <= cfg.lyapunov_k] or list(cfg.k_grid)
    reg = regularity_check(model, x, grid, "full",
                           exponents=lyap.exponents if max(grid) < 100 else None)
    entry["regularity"] = {
        "k_grid": list(reg.k_grid),
        "exponents": reg.exponents.tolist(),
        "rates": reg.rates.tolist(),
        "deviations": reg.deviations.tolist(),
        "max_deviation_at_largest": reg.max_deviation_at_largest,
        "decay_slope": reg.decay_slope,
    }

    if with_brackets:
        diag = bracket_defect(model.splitting, x,
                              h=cfg.tolerance("fd_step", 1e-4),
                              tol=cfg.tolerance("involutivity", 1e-6), space=space)
        entry["brackets"] = {
            "pair_defects": diag.pair_defects.tolist(),
            "max_pair": list(diag.max_pair),
            "max_defect": diag.max_defect,
            "tolerance": diag.tolerance,
            "involutive": diag.involutive,
        }
        records = [holonomy_defect(model.splitting, x, h, space=space)
                   for h in cfg.h_list]
        fit = defect_scaling(model.splitting, x, cfg.h_list, space=space)
        entry["holonomy"] = {
            "records": [{
                "h": r.h, "pair": list(r.pair), "defect": r.defect_norm,
                "normalized": r.normalized,
                "transverse_normalized": r.transverse_normalized,
            } for r in records],
            "fit": {
                "exponent": fit.exponent, "coefficient": fit.coefficient,
                "full_exponent": fit.full_exponent,
                "full_coefficient": fit.full_coefficient,
                "at_floor": fit.at_floor, "verdict": fit.verdict,
            },
        }
    return entry


def _summarize(model: ModelSystem, cfg: RunConfig, points: list[dict]) -> dict:
    margin_floor = cfg.tolerance("domination_margin", 1e-9)
    dyn = [p["ratios"]["dyn_ratio"] for p in points]
    vf = [p["ratios"]["vol_ratio_fwd"] for p in points]
    vb = [p["ratios"]["vol_ratio_bwd"] for p in points]
    so_verdicts = [p["second_order"]["verdict"] for p in points]
    nr_sides = [tr["side"] for p in points
                for tr in p["nonresonance"]["triples"].values()]
    nr_rates = [max(tr["rate_fwd"], tr["rate_bwd"]) for p in points
                for tr in p["nonresonance"]["triples"].values()]

    conditions = [
        {"condition": "dynamical_domination", "scope": "sampled_points",
         "satisfied": max(dyn) < 1.0 - margin_floor, "margin": 1.0 - max(dyn)},
        {"condition": "volume_domination", "scope": "sampled_points",
         "satisfied": max(vf) < 1.0 - margin_floor, "margin": 1.0 - max(vf)},
        {"condition": "inverse_volume_domination", "scope": "sampled_points",
         "satisfied": max(vb) < 1.0 - margin_floor, "margin": 1.0 - max(vb)},
        {"condition": "volume_domination_exclusivity", "scope": "sampled_points",
         "satisfied": all(p["ratios"]["exclusive"] for p in points),
         "margin": float(min(max(p["ratios"]["vol_ratio_fwd"],
                                 p["ratios"]["vol_ratio_bwd"]) for p in points) - 1.0)},
        {"condition": "second_order_decay", "scope": "sampled_points",
         "satisfied": all(v in ("forward", "backward", "both") for v in so_verdicts),
         "margin": float(-max(min(p["second_order"]["fwd_slope"],
                                  p["second_order"]["bwd_slope"]) for p in points))},
        {"condition": "nonresonance_exponential", "scope": "sampled_points",
         "satisfied": bool(nr_sides) and all(s in ("forward", "backward", "both")
                                             for s in nr_sides),
         "margin": float(min(nr_rates)) if nr_rates else 0.0},
    ]
    hypotheses_3d = model.dim == 3 and model.splitting.dim_e == 2
    by_name = {c["condition"]: c for c in conditions}
    applicability = {
        "volume_preserving_dynamical": bool(
            model.volume_preserving and hypotheses_3d
            and by_name["dynamical_domination"]["satisfied"]),
        "volume_domination_3d": bool(
            hypotheses_3d and (by_name["volume_domination"]["satisfied"]
                               or by_name["inverse_volume_domination"]["satisfied"])),
        "second_order_subsequence": bool(by_name["second_order_decay"]["satisfied"]),
        "nonresonance_exponential": bool(by_name["nonresonance_exponential"]["satisfied"]),
    }
    measured = {}
    bracket_pts = [p for p in points if "brackets" in p]
    if bracket_pts:
        max_defect = max(p["brackets"]["max_defect"] for p in bracket_pts)
        measured["involutivity"] = {
            "max_defect": max_defect,
            "involutive": all(p["brackets"]["involutive"] for p in bracket_pts),
        }
        measured["holonomy"] = {
            "verdicts": sorted({p["holonomy"]["fit"]["verdict"] for p in bracket_pts}),
        }
    return {
        "conditions": conditions,
        "applicability": applicability,
        "predicted_conclusion": ("unique_integrability"
                                 if any(applicability.values()) else "no_conclusion"),
        "measured": measured,
        "caveat": "all verdicts refer to the sampled points only; density of the "
                  "sample in the manifold is not certified",
    }


def run_analysis(cfg: RunConfig, out_dir: Path | None = None, quiet: bool = True) -> Path:
    """Execute the pipeline; returns the run directory."""
    model = load_model_table(cfg.model)
    pts = cfg.sample_points(model.space)
    n_brackets = len(pts) if cfg.bracket_points is None else min(cfg.bracket_points, len(pts))
    entries = []
    for i, x in enumerate(pts):
        if not quiet:
            print(f"[splitlab] point {i + 1}/{len(pts)}", file=sys.stderr)
        entries.append(_analyze_point(model, x, cfg, with_brackets=i < n_brackets))

    summary = _summarize(model, cfg, entries)
    if model.volume_preserving and model.dim == 3 and model.splitting.dim_e == 2:
        imp = check_volume_implication(model, pts,
                                       det_tol=cfg.tolerance("det_product", 1e-8))
        summary["volume_implication"] = {
            "condition": "dynamical_implies_volume_domination",
            "max_det_error": imp.max_det_error,
            "det_tol": imp.det_tol,
            "det_ok": imp.det_ok,
            "implication_ok": imp.implication_ok,
        }

    report = RunReport(
        schema_version=SCHEMA_VERSION,
        config=cfg.to_dict(),
        model_info={
            "name": model.name, "dimension": model.dim,
            "dim_e": model.splitting.dim_e, "dim_f": model.splitting.dim_f,
            "volume_preserving": model.volume_preserving,
            "splitting": model.smoothness_tag, "space": model.space.kind,
            "params": model.params,
        },
        points=entries,
        summary=summary,
    )

    out = Path(out_dir) if out_dir is not None else _resolve_out_dir(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, out / "report.json")
    data = load_report(out / "report.json")
    write_star_csv(data, out / "star.csv")
    write_regularity_csv(data, out / "regularity.csv")
    write_holonomy_csv(data, out / "holonomy.csv")
    write_brackets_csv(data, out / "brackets.csv")
    write_singulars_csv(data, out / "singulars.csv")
    if not quiet:
        print(f"[splitlab] report written to {out}", file=sys.stderr)
    return out


def _resolve_out_dir(configured: str) -> Path:
    root = os.environ.get(OUTPUT_ROOT_ENV)
    path = Path(configured)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def _cmd_analyze(args) -> int:
    cfg = RunConfig.from_toml(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.kmax is not None:
        overrides["k_max"] = args.kmax
    if args.points is not None:
        overrides["points"] = args.points
    if overrides:
        d = cfg.to_dict()
        d.update(overrides)
        cfg = RunConfig.from_dict(d)
    out = Path(args.out) if args.out else None
    run_dir = run_analysis(cfg, out_dir=out, quiet=args.quiet)
    if not args.quiet:
        print(run_dir)
    return 0


def _cmd_zoo(args) -> int:
    rows = zoo_entries()
    for row in rows:
        tags = (f"dim={row['dimension']} d={row['dim_e']} l={row['dim_f']} "
                f"volume_preserving={row['volume_preserving']} "
                f"splitting={row['splitting']} space={row['space']}")
        print(f"{row['name']:16s} {tags}")
        print(f"{'':16s} {row['description']}")
        if row["example_params"]:
            print(f"{'':16s} example params: {json.dumps(row['example_params'])}")
    return 0


def _cmd_plotdata(args) -> int:
    report = load_report(args.report)
    out_dir = Path(args.out) if args.out else Path(args.report).parent
    path = emit_plotdata(report, args.which, out_dir)
    if not args.quiet:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitlab",
        description="diagnostics for invariant tangent-bundle splittings")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="run the full pipeline from a TOML config")
    p_an.add_argument("--config", required=True, help="path to the run config")
    p_an.add_argument("--out", default=None, help="output directory (overrides config)")
    p_an.add_argument("--seed", type=int, default=None, help="sampling seed override")
    p_an.add_argument("--kmax", type=int, default=None, help="k_max override")
    p_an.add_argument("--points", type=int, default=None, help="sample count override")
    p_an.add_argument("--quiet", action="store_true")
    p_an.set_defaults(func=_cmd_analyze)

    p_zoo = sub.add_parser("zoo", help="list the model catalog with hypothesis tags")
    p_zoo.set_defaults(func=_cmd_zoo)

    p_pd = sub.add_parser("plotdata", help="emit CSV tables from a report")
    p_pd.add_argument("--report", required=True, help="path to report.json")
    p_pd.add_argument("--which", required=True,
                      help="one of: star, regularity, holonomy, brackets")
    p_pd.add_argument("--out", default=None, help="output directory")
    p_pd.add_argument("--quiet", action="store_true")
    p_pd.set_defaults(func=_cmd_plotdata)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ModelAssumptionError) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}),
              file=sys.stderr)
        return 2
    except SplitLabError as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
