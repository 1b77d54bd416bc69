"""Pseudo-spectral semi-Galerkin simulator for the Pitaevskii model.

The compiled extension exposes the main operations: config parsing and
validation, running simulations (in memory or with the standard file
outputs), reading diagnostics ledgers, the small-data Gronwall monitor,
and the Madelung decomposition / circulation post-processing. Anything
not reachable through :class:`RunConfig` attributes (initial-data
choices, the Picard stepper) is set through the INI text handled by
:func:`parse_config`; ``RunConfig.serialize()`` produces a template to
edit.
"""

from ._core import (
    DiagnosticsRecord,
    GronwallReport,
    ModelParams,
    RunConfig,
    RunReport,
    circulation,
    gronwall_monitor,
    load_config,
    madelung,
    parse_config,
    read_diagnostics,
    run,
    serialize_config,
    validate_config,
)

__all__ = [
    "DiagnosticsRecord",
    "GronwallReport",
    "ModelParams",
    "RunConfig",
    "RunReport",
    "circulation",
    "gronwall_monitor",
    "load_config",
    "madelung",
    "parse_config",
    "read_diagnostics",
    "run",
    "serialize_config",
    "validate_config",
]

__version__ = "1.0.0"
