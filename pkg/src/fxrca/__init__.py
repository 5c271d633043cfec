"""Exchange-rate competitiveness toolkit.

Simulation of an AR(1) exchange rate with a volatility-damping policy
shock and its mapping to an export-competitiveness index; panel
estimators (within FE, censored MLE, 2SLS with weak-instrument
diagnostics, DID/event study, permutation placebo); data ingestion and a
synthetic-panel generator with known ground truth; a CLI that makes every
run reproducible from its manifest.
"""

from fxrca.errors import (
    CollinearityError,
    ComputationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    IdentificationError,
    SchemaError,
    ToolkitError,
)
from fxrca.model import RatePath, SimParams, derived_k, log_rca, simulate_path

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ToolkitError",
    "ConfigError",
    "SchemaError",
    "ComputationError",
    "DomainError",
    "CollinearityError",
    "IdentificationError",
    "ConvergenceError",
    "SimParams",
    "RatePath",
    "derived_k",
    "log_rca",
    "simulate_path",
]
