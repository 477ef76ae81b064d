"""Python bindings for the Nezha / DOM simulator."""

from ._core import (
    ConfigError,
    RunResult,
    ScenarioConfig,
    check_linearizability,
    forced_slow_path,
    lis_length,
    load_config,
    parse_config,
    perfect_network,
    random_safety_scenario,
    reorder_microbench,
    reordering_score,
    run_scenario,
    run_stray_schedule,
)

__all__ = [
    "ConfigError",
    "RunResult",
    "ScenarioConfig",
    "check_linearizability",
    "forced_slow_path",
    "lis_length",
    "load_config",
    "parse_config",
    "perfect_network",
    "random_safety_scenario",
    "reorder_microbench",
    "reordering_score",
    "run_scenario",
    "run_stray_schedule",
]
