"""
Harness de execução: configuração, pipeline completo, comandos e varreduras.
"""

from .bench import BENCH_COLUMNS, aggregate, bench_point, cmd_bench, detection_metrics, vital_metrics
from .commands import REPORT_FILE, cmd_detect, cmd_pattern, cmd_run, cmd_simulate, cmd_synthesize_coding, cmd_vmd
from .config import (
    SECTIONS,
    SWEEP_PARAMETERS,
    CodingSettings,
    ConfigError,
    RunConfig,
    SceneSettings,
    SweepSpec,
    default_config_dict,
    load_run_config,
    load_task,
    run_config_from_dict,
    with_changes,
    with_section,
)
from .pipeline import STAGES, build_registry, monitor_start, scan_codings, stage_seeds
from .report import PersonRecord, PipelineError, Report

__all__ = [
    "BENCH_COLUMNS",
    "aggregate",
    "bench_point",
    "cmd_bench",
    "detection_metrics",
    "vital_metrics",
    "REPORT_FILE",
    "cmd_detect",
    "cmd_pattern",
    "cmd_run",
    "cmd_simulate",
    "cmd_synthesize_coding",
    "cmd_vmd",
    "SECTIONS",
    "SWEEP_PARAMETERS",
    "CodingSettings",
    "ConfigError",
    "RunConfig",
    "SceneSettings",
    "SweepSpec",
    "default_config_dict",
    "load_run_config",
    "load_task",
    "run_config_from_dict",
    "with_changes",
    "with_section",
    "STAGES",
    "build_registry",
    "monitor_start",
    "scan_codings",
    "stage_seeds",
    "PersonRecord",
    "PipelineError",
    "Report",
]
