"""Panel ingestion, the export-share index, annual rates, synthetic panels."""

from fxrca.data.exports import (
    RCA_BANDS,
    WORLD_REGION,
    ExportTable,
    classify_rca,
    load_export_table,
    rca_index_from_exports,
)
from fxrca.data.panel import (
    CONTROL_COLUMNS,
    OPTIONAL_COLUMNS,
    REQUIRED_COLUMNS,
    PanelDataset,
    add_exrate_features,
    assign_treat_post,
    build_instrument,
    load_panel_csv,
)
from fxrca.data.rates import AnnualRates, annual_mean_exrate, load_monthly_rates
from fxrca.data.synth import DEFAULT_TRUE_COEFFS, GroundTruth, SynthConfig, synth_panel

__all__ = [
    "RCA_BANDS",
    "WORLD_REGION",
    "ExportTable",
    "classify_rca",
    "load_export_table",
    "rca_index_from_exports",
    "CONTROL_COLUMNS",
    "OPTIONAL_COLUMNS",
    "REQUIRED_COLUMNS",
    "PanelDataset",
    "add_exrate_features",
    "assign_treat_post",
    "build_instrument",
    "load_panel_csv",
    "AnnualRates",
    "annual_mean_exrate",
    "load_monthly_rates",
    "DEFAULT_TRUE_COEFFS",
    "GroundTruth",
    "SynthConfig",
    "synth_panel",
]
