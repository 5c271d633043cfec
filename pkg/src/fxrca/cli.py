"""Command-line entry point.

Every subcommand writes its outputs plus a manifest.json recording the
resolved arguments, so `fxrca rerun manifest.json --out DIR` reproduces
the run byte for byte. Exit codes: 0 success, 2 input or configuration
problem, 3 computation or identification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

import fxrca
from fxrca.errors import ComputationError, ConfigError, SchemaError
from fxrca.model import SimParams, read_sim_config
from fxrca.montecarlo import (
    SERIES_HEADER,
    SUMMARY_HEADER,
    make_scenario,
    run_scenario,
    series_rows,
    summary_rows,
)
from fxrca.stats import kde, kde_grid, silverman_bandwidth
from fxrca.econometrics import DidSpec, ModelSpec, did_estimate, event_study, placebo_permutation
from fxrca.econometrics.did import EVENT_HEADER, TREAT_POST
from fxrca.data import (
    CONTROL_COLUMNS,
    SynthConfig,
    assign_treat_post,
    build_instrument,
    classify_rca,
    load_export_table,
    load_panel_csv,
    rca_index_from_exports,
    synth_panel,
)
from fxrca.workflows import MODEL_NAMES, fit_iv, fits_json_dict, run_models, table_csv_text
from fxrca.fileio import atomic_write_text, csv_text, write_csv, write_json
from fxrca import svg

FIT_HEADER = ("term", "estimate", "std_error", "stat", "p_value")


def _parse_window(text: str) -> tuple[int, int]:
    try:
        start, end = text.split(":")
        return int(start), int(end)
    except ValueError:
        raise ConfigError(f"window must look like 2012:2020, got {text!r}") from None


def _write_manifest(args: argparse.Namespace, inputs: list, outputs: list[str]) -> None:
    resolved = {
        key: value
        for key, value in vars(args).items()
        if key not in ("handler", "subcommand")
    }
    manifest = {
        "subcommand": args.subcommand,
        "version": fxrca.__version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "args": resolved,
        "inputs": [str(p) for p in inputs],
        "outputs": sorted(outputs),
    }
    write_json(os.path.join(args.out, "manifest.json"), manifest)


def _model_spec(se_type: str) -> ModelSpec:
    return ModelSpec(
        outcome="rca",
        regressors=("exrate", *CONTROL_COLUMNS),
        fixed_effect="province",
        time_trend=True,
        se_type=se_type,
        cluster="province" if se_type == "cluster" else None,
    )


def _load_panel_with_treatment(args) -> tuple:
    panel = load_panel_csv(args.panel)
    did_spec = DidSpec(
        window=_parse_window(args.window),
        shock_year=args.shock,
        treat_threshold=args.threshold,
    )
    if "treat" not in panel.frame.columns or "post" not in panel.frame.columns:
        panel = assign_treat_post(panel, did_spec)
    return panel, did_spec


def cmd_simulate(args) -> int:
    params = read_sim_config(args.config) if args.config else SimParams()
    results = []
    outputs = []
    for label in ("L", "M", "H"):
        spec = make_scenario(params, label, seed=args.seed, replications=args.replications)
        result = run_scenario(spec)
        results.append(result)
        name = f"scenario_{label}.csv"
        write_csv(os.path.join(args.out, name), SERIES_HEADER, series_rows(result))
        outputs.append(name)
        for segment, density in (("pre", result.pre_density), ("post", result.post_density)):
            name = f"density_{label}_{segment}.csv"
            atomic_write_text(os.path.join(args.out, name), density.to_csv_text())
            outputs.append(name)

    if args.replications > 1:
        header = SUMMARY_HEADER + tuple(
            f"mc_se_{c}" for c in SUMMARY_HEADER[2:]
        )
        rows = []
        for result in results:
            agg = result.replication_stats.aggregate()
            for segment in ("pre", "post"):
                rows.append(
                    (
                        result.spec.scenario_label,
                        segment,
                        agg[f"s.{segment}_mean"][0],
                        agg[f"s.{segment}_var"][0],
                        agg[f"rca.{segment}_mean"][0],
                        agg[f"rca.{segment}_var"][0],
                        agg[f"s.{segment}_mean"][1],
                        agg[f"s.{segment}_var"][1],
                        agg[f"rca.{segment}_mean"][1],
                        agg[f"rca.{segment}_var"][1],
                    )
                )
        write_csv(os.path.join(args.out, "summary.csv"), header, rows)
    else:
        write_csv(os.path.join(args.out, "summary.csv"), SUMMARY_HEADER, summary_rows(results))
    outputs.append("summary.csv")

    if args.svg:
        t_grid = np.arange(params.total_time)
        rate_series = [(f"scenario {r.spec.scenario_label}", t_grid, r.path.log_rates) for r in results]
        atomic_write_text(
            os.path.join(args.out, "rates.svg"),
            svg.line_chart(rate_series, title="log rate paths", x_label="t",
                           y_label="s_t", vline=params.shock_time),
        )
        outputs.append("rates.svg")
        rca_series = [(f"scenario {r.spec.scenario_label}", t_grid, r.rca) for r in results]
        atomic_write_text(
            os.path.join(args.out, "rca.svg"),
            svg.line_chart(rca_series, title="competitiveness paths", x_label="t",
                           y_label="rca", vline=params.shock_time),
        )
        outputs.append("rca.svg")
        for result in results:
            label = result.spec.scenario_label
            series = [
                ("pre-shock", result.pre_density.grid, result.pre_density.density),
                ("post-shock", result.post_density.grid, result.post_density.density),
            ]
            name = f"density_{label}.svg"
            atomic_write_text(
                os.path.join(args.out, name),
                svg.line_chart(series, title=f"scenario {label} densities",
                               x_label="rca", y_label="density"),
            )
            outputs.append(name)

    _write_manifest(args, [args.config] if args.config else [], outputs)
    return 0


def cmd_estimate(args) -> int:
    panel = load_panel_csv(args.panel)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    fits = run_models(
        panel,
        models,
        threshold=args.threshold,
        lower=args.lower,
        upper=args.upper,
        se_type=args.se,
    )
    atomic_write_text(os.path.join(args.out, "estimates.csv"), table_csv_text(fits))
    write_json(os.path.join(args.out, "fits.json"), fits_json_dict(fits))
    _write_manifest(args, [args.panel], ["estimates.csv", "fits.json"])
    return 0


def cmd_iv(args) -> int:
    panel = load_panel_csv(args.panel)
    if "market" in panel.frame.columns and "l_tool" not in panel.frame.columns:
        panel = build_instrument(panel)
    fit, diagnostics = fit_iv(panel, se_type=args.se)
    write_csv(
        os.path.join(args.out, "iv_first_stage.csv"),
        FIT_HEADER,
        diagnostics.first_stage.to_csv_rows(),
    )
    write_csv(os.path.join(args.out, "iv_second_stage.csv"), FIT_HEADER, fit.to_csv_rows())
    write_json(
        os.path.join(args.out, "iv.json"),
        {"second_stage": fit.to_json_dict(), "diagnostics": diagnostics.to_json_dict()},
    )
    _write_manifest(
        args, [args.panel], ["iv_first_stage.csv", "iv_second_stage.csv", "iv.json"]
    )
    return 0


def cmd_did(args) -> int:
    panel, did_spec = _load_panel_with_treatment(args)
    fit = did_estimate(panel, did_spec, _model_spec(args.se))
    write_csv(os.path.join(args.out, "did.csv"), FIT_HEADER, fit.to_csv_rows())
    write_json(os.path.join(args.out, "did.json"), fit.to_json_dict())
    _write_manifest(args, [args.panel], ["did.csv", "did.json"])
    return 0


def cmd_event(args) -> int:
    panel, did_spec = _load_panel_with_treatment(args)
    result = event_study(panel, did_spec, _model_spec(args.se))
    write_csv(os.path.join(args.out, "event_study.csv"), EVENT_HEADER, result.to_csv_rows())
    payload = {
        "base_period": result.base_period,
        "relative_years": list(result.relative_years),
        "estimates": {str(k): v for k, v in result.estimates.items()},
        "std_errors": {str(k): v for k, v in result.std_errors.items()},
        "ci_low": {str(k): v for k, v in result.ci_low.items()},
        "ci_high": {str(k): v for k, v in result.ci_high.items()},
    }
    write_json(os.path.join(args.out, "event_study.json"), payload)
    outputs = ["event_study.csv", "event_study.json"]
    if args.svg:
        rel = np.array(result.relative_years, dtype=float)
        series = [
            ("estimate", rel, np.array([result.estimates[r] for r in result.relative_years])),
            ("ci low", rel, np.array([result.ci_low[r] for r in result.relative_years])),
            ("ci high", rel, np.array([result.ci_high[r] for r in result.relative_years])),
        ]
        atomic_write_text(
            os.path.join(args.out, "event_study.svg"),
            svg.line_chart(series, title="event study", x_label="relative year",
                           y_label="coefficient", vline=0.0),
        )
        outputs.append("event_study.svg")
    _write_manifest(args, [args.panel], outputs)
    return 0


def cmd_placebo(args) -> int:
    if args.target == TREAT_POST:
        panel, did_spec = _load_panel_with_treatment(args)
        spec = _model_spec(args.se)
    else:
        panel = load_panel_csv(args.panel)
        did_spec = None
        spec = ModelSpec(
            outcome="rca",
            regressors=(args.target, *CONTROL_COLUMNS),
            fixed_effect="province",
            time_trend=False,
            se_type=args.se,
            cluster="province" if args.se == "cluster" else None,
        )
    result = placebo_permutation(
        panel,
        spec,
        target=args.target,
        n_draws=args.draws,
        seed=args.seed,
        did_spec=did_spec,
    )
    write_csv(
        os.path.join(args.out, "placebo_draws.csv"),
        ("draw", "coefficient"),
        ((i, c) for i, c in enumerate(result.coefficients)),
    )
    draws = np.array(result.coefficients)
    bandwidth = silverman_bandwidth(draws)
    density = kde(draws, kde_grid(draws, bandwidth), bandwidth)
    atomic_write_text(os.path.join(args.out, "placebo_density.csv"), density.to_csv_text())
    write_json(os.path.join(args.out, "placebo.json"), result.to_json_dict())
    _write_manifest(
        args, [args.panel], ["placebo_draws.csv", "placebo_density.csv", "placebo.json"]
    )
    return 0


def cmd_rca(args) -> int:
    table = load_export_table(args.exports, world_region=args.world)
    rows = []
    for region in table.regions():
        for year in table.years():
            if table.region_total(region, year) <= 0:
                continue
            for industry in table.industries():
                if table.value(region, industry, year) <= 0:
                    continue
                value = rca_index_from_exports(table, region, industry, year)
                rows.append((region, industry, year, value, classify_rca(value)))
    write_csv(os.path.join(args.out, "rca.csv"), ("region", "industry", "year", "rca", "band"), rows)
    _write_manifest(args, [args.exports], ["rca.csv"])
    return 0


def cmd_synth(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            try:
                raw = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: config must be a JSON object")
    else:
        raw = {}
    if args.seed is not None:
        raw["seed"] = args.seed
    if "coefficients" in raw and isinstance(raw["coefficients"], dict):
        raw["coefficients"] = {k: float(v) for k, v in raw["coefficients"].items()}
    config = SynthConfig.from_dict(raw)
    panel, truth = synth_panel(config)
    atomic_write_text(os.path.join(args.out, "panel.csv"), panel.to_csv_text())
    write_json(os.path.join(args.out, "truth.json"), truth.to_json_dict())
    _write_manifest(args, [args.config] if args.config else [], ["panel.csv", "truth.json"])
    return 0


def cmd_rerun(args) -> int:
    with open(args.manifest, encoding="utf-8") as handle:
        try:
            manifest = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.manifest}: invalid JSON: {exc}") from None
    for key in ("subcommand", "args"):
        if key not in manifest:
            raise ConfigError(f"{args.manifest}: manifest is missing {key!r}")
    subcommand = manifest["subcommand"]
    handlers = {
        "simulate": cmd_simulate,
        "estimate": cmd_estimate,
        "iv": cmd_iv,
        "did": cmd_did,
        "event": cmd_event,
        "placebo": cmd_placebo,
        "rca": cmd_rca,
        "synth": cmd_synth,
    }
    if subcommand not in handlers:
        raise ConfigError(f"{args.manifest}: unknown subcommand {subcommand!r}")
    stored = dict(manifest["args"])
    if args.out is not None:
        stored["out"] = args.out
    stored["subcommand"] = subcommand
    stored["handler"] = handlers[subcommand]
    return handlers[subcommand](argparse.Namespace(**stored))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fxrca",
        description="Exchange-rate competitiveness toolkit: simulation, "
        "panel estimators, and reproducible run outputs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {fxrca.__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_out(p):
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("simulate", help="run the three rate scenarios")
    p.add_argument("--config", help="key = value parameter file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--svg", action="store_true", help="also write SVG charts")
    add_out(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("estimate", help="benchmark estimator battery on a panel CSV")
    p.add_argument("--panel", required=True)
    p.add_argument("--models", default=",".join(MODEL_NAMES))
    p.add_argument("--threshold", type=float, default=0.2, help="volatility split point")
    p.add_argument("--lower", type=float, default=0.0, help="censoring lower limit")
    p.add_argument("--upper", type=float, default=2.0, help="censoring upper limit")
    p.add_argument("--se", choices=("homoskedastic", "cluster"), default="homoskedastic")
    add_out(p)
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("iv", help="two-stage least squares with the lagged tool")
    p.add_argument("--panel", required=True)
    p.add_argument("--se", choices=("homoskedastic", "cluster"), default="homoskedastic")
    add_out(p)
    p.set_defaults(handler=cmd_iv)

    for name, help_text in (
        ("did", "treat/post interaction estimator"),
        ("event", "lead/lag coefficients around the shock"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--panel", required=True)
        p.add_argument("--window", default="2012:2020", help="year window START:END")
        p.add_argument("--shock", type=int, default=2016)
        p.add_argument("--threshold", type=float, default=6.58, help="treatment threshold")
        p.add_argument("--se", choices=("homoskedastic", "cluster"), default="homoskedastic")
        if name == "event":
            p.add_argument("--svg", action="store_true")
        add_out(p)
        p.set_defaults(handler=cmd_did if name == "did" else cmd_event)

    p = sub.add_parser("placebo", help="permutation test of a year-level regressor")
    p.add_argument("--panel", required=True)
    p.add_argument("--target", default="exrate")
    p.add_argument("--draws", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", default="2012:2020")
    p.add_argument("--shock", type=int, default=2016)
    p.add_argument("--threshold", type=float, default=6.58)
    p.add_argument("--se", choices=("homoskedastic", "cluster"), default="homoskedastic")
    add_out(p)
    p.set_defaults(handler=cmd_placebo)

    p = sub.add_parser("rca", help="export-share index table")
    p.add_argument("--exports", required=True, help="region,industry,year,export_value CSV")
    p.add_argument("--world", default="WORLD", help="world aggregate region name")
    add_out(p)
    p.set_defaults(handler=cmd_rca)

    p = sub.add_parser("synth", help="generate a synthetic panel with ground truth")
    p.add_argument("--config", help="JSON generator configuration")
    p.add_argument("--seed", type=int, default=None)
    add_out(p)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("rerun", help="replay a previous run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="override the output directory")
    p.set_defaults(handler=cmd_rerun)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
