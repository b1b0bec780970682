"""
Varreduras de parâmetros por simulação.

Cada ponto (valor, semente) é independente e grava suas linhas num
subdiretório próprio; a agregação das médias é feita no final, em série.
"""

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from geral.app_logger import log_error, log_success
from geral.artifact_service import ArtifactService
from servicos_modularizados.detection import AssignmentState, measure_baseline, update_assignments
from servicos_modularizados.ris_model import StcCoding
from servicos_modularizados.scene_sim import Passerby, Scene

from .config import (
    SWEEP_ALPHA,
    SWEEP_DISTANCE,
    SWEEP_IMF,
    SWEEP_MU,
    SWEEP_PASSERBY,
    ConfigError,
    RunConfig,
    with_changes,
    with_section,
)
from .pipeline import (
    build_task,
    detect,
    empty_scene,
    monitor_start,
    motion_signal,
    simulate_monitor,
    simulate_scan,
    stage_seeds,
    synthesize,
    vital_signs,
)
from .report import PipelineError, nearest_direction, occupied_directions, person_record

BENCH_COLUMNS = [
    "parameter", "value", "seed", "variant",
    "detections", "false_alarms", "intensity_false_alarms", "missed",
    "rr_error_mean", "hr_error_mean", "rr_error_max", "hr_error_max",
]
METRIC_COLUMNS = BENCH_COLUMNS[4:]

VARIANT_DETECTION = "deteccao"
VARIANT_FOCUSED = "focada"
VARIANT_CONSTANT = "constante"
DECOMPOSER_VARIANTS = ("vmd", "ivmd")


def _row(parameter: str, value: Any, seed: int, variant: str, **metrics) -> Dict[str, Any]:
    row = {column: np.nan for column in BENCH_COLUMNS}
    row.update(parameter=parameter, value=value, seed=seed, variant=variant)
    row.update(metrics)
    return row


def detection_metrics(config: RunConfig, seed: int) -> Dict[str, Any]:
    """Detecções, falsos alarmes e perdas de uma varredura completa."""
    baseline_seed, scan_seed, _ = stage_seeds(seed)
    scene = config.simulation_scene(baseline_seed)
    baseline = measure_baseline(simulate_scan(config, empty_scene(scene)), config.detection)
    table, state = detect(config, baseline, config.simulation_scene(scan_seed))

    occupied = occupied_directions(config.scene.scene, config.scan_points())
    assigned = state.assigned()
    intensity_only = [d for d, flag in enumerate(table["intensity_flag"]) if flag and d not in occupied]
    return {
        "detections": len(assigned),
        "false_alarms": sum(1 for d in assigned if d not in occupied),
        "intensity_false_alarms": len(intensity_only),
        "missed": sum(1 for d in occupied if d not in assigned),
    }


def oracle_assignment(config: RunConfig, scene: Scene) -> Dict[int, int]:
    """
    Atribuição ideal: a direção mais próxima de cada pessoa passa nos dois
    indicadores e recebe o harmônico pela mesma regra da detecção.
    """
    occupied = set(nearest_direction(scene, config.scan_points()).values())
    pool = config.detection.harmonic_pool
    if len(occupied) > len(pool):
        raise PipelineError("varredura", f"{len(occupied)} pessoas para {len(pool)} harmônicos")
    directions = len(config.coding.scan_x)
    flags = [d in occupied for d in range(directions)]
    initial = AssignmentState.initial(directions, pool, positions=config.coding.scan_x)
    return update_assignments(initial, flags, flags, 0.0, config.detection).assigned()


def vital_metrics(config: RunConfig, seed: int, constant_coding: bool = False,
                  decomposers: Tuple[str, ...] = ("ivmd",)) -> Dict[str, Dict[str, Any]]:
    """
    Erros de RR/HR com atribuição ideal (uma direção por pessoa).

    Args:
        config: configuração
        seed: semente do ponto
        constant_coding: usa a codificação constante (todas as pessoas no harmônico 0)
        decomposers: decomposições avaliadas sobre o mesmo sinal de movimento

    Returns:
        Dict[str, Dict]: métricas por decomposição
    """
    scene = config.scene.scene
    assigned = oracle_assignment(config, scene)
    if constant_coding:
        geometry = config.geometry
        coding = StcCoding.constant(geometry.rows, geometry.cols, geometry.code_length)
        assigned = {d: 0 for d in assigned}
    else:
        coding = synthesize(config, build_task(config, assigned)).best_coding
    echo = simulate_monitor(config, config.simulation_scene(stage_seeds(seed)[2]), coding)
    points = config.scan_points()

    motions = {d: motion_signal(config, echo, k) for d, k in assigned.items()}
    results = {}
    for name in decomposers:
        variant = dataclasses.replace(config, decomposer=name)
        rr_errors, hr_errors = [], []
        for d, k in assigned.items():
            estimate, _ = vital_signs(variant, motions[d])
            record = person_record(d, k, points[d], scene, points, estimate)
            if record.rr_error is not None:
                rr_errors.append(record.rr_error)
                hr_errors.append(record.hr_error)
        results[name] = {
            "rr_error_mean": float(np.mean(rr_errors)) if rr_errors else np.nan,
            "hr_error_mean": float(np.mean(hr_errors)) if hr_errors else np.nan,
            "rr_error_max": float(np.max(rr_errors)) if rr_errors else np.nan,
            "hr_error_max": float(np.max(hr_errors)) if hr_errors else np.nan,
        }
    return results


def moved_scene(scene: Scene, range_m: float) -> Scene:
    """Todas as pessoas levadas ao alcance range_m, mantendo x e altura."""
    persons = tuple(dataclasses.replace(p, position=(p.position[0], p.position[1], range_m))
                    for p in scene.persons)
    return dataclasses.replace(scene, persons=persons)


def bench_point(job: Tuple[RunConfig, str, Any, int, int]) -> List[Dict[str, Any]]:
    """
    Avalia um ponto da varredura e grava suas linhas.

    Args:
        job: (configuração, parâmetro, valor, índice do valor, semente)

    Returns:
        List[Dict]: linhas do ponto (uma por variante)
    """
    config, parameter, value, index, seed = job
    rows = []
    if parameter == SWEEP_MU:
        cfg = with_section(config, "deteccao", mu=float(value))
        rows.append(_row(parameter, value, seed, VARIANT_DETECTION, **detection_metrics(cfg, seed)))
    elif parameter in (SWEEP_ALPHA, SWEEP_IMF):
        if parameter == SWEEP_ALPHA:
            cfg = with_section(config, "vmd", alpha_int=float(value))
        else:
            cfg = with_section(config, "vmd", n_modes=int(value), resp_modes=max(1, int(value) // 2))
        for name, metrics in vital_metrics(cfg, seed, decomposers=DECOMPOSER_VARIANTS).items():
            rows.append(_row(parameter, value, seed, name, **metrics))
    elif parameter == SWEEP_DISTANCE:
        cfg = with_changes(config, {"grade": {"z": float(value)}, "codificacao": {"alcance_m": float(value)}})
        cfg = dataclasses.replace(cfg, scene=dataclasses.replace(
            cfg.scene, scene=moved_scene(config.scene.scene, float(value))))
        for name, metrics in vital_metrics(cfg, seed).items():
            rows.append(_row(parameter, value, seed, name, **metrics))
    elif parameter == SWEEP_PASSERBY:
        scene = config.scene.scene
        walker = None
        if value and scene.persons:
            walker = Passerby.crossing(scene.persons[0], monitor_start(config) + config.scene.duration_s / 2.0)
        cfg = dataclasses.replace(config, scene=dataclasses.replace(
            config.scene, scene=dataclasses.replace(scene, passerby=walker)))
        for variant, constant in ((VARIANT_FOCUSED, False), (VARIANT_CONSTANT, True)):
            metrics = vital_metrics(cfg, seed, constant_coding=constant)["ivmd"]
            rows.append(_row(parameter, value, seed, variant, **metrics))
    else:
        raise ConfigError(f"Parâmetro de varredura desconhecido: {parameter}")

    ArtifactService(config.output_dir).save_json(rows, f"bench/{parameter}_{index}_s{seed}/linhas.json")
    return rows


def aggregate(table: pd.DataFrame) -> pd.DataFrame:
    """Acrescenta uma linha de média por (parâmetro, valor, variante)."""
    if table.empty:
        return table
    means = (table.groupby(["parameter", "value", "variant"], sort=False)[METRIC_COLUMNS]
             .mean().reset_index())
    means["seed"] = "media"
    return pd.concat([table, means[BENCH_COLUMNS]], ignore_index=True)


def cmd_bench(config: RunConfig) -> pd.DataFrame:
    """
    Executa a varredura configurada em [varredura].

    Args:
        config: configuração com parametro, valores, sementes e processos

    Returns:
        pd.DataFrame: uma linha por (valor, semente, variante) e as médias no final
    """
    sweep = config.sweep
    if sweep.parameter is None:
        raise ConfigError("[varredura] parametro não definido")
    jobs = [(config, sweep.parameter, value, index, seed)
            for index, value in enumerate(sweep.values) for seed in sweep.seeds]
    try:
        if sweep.workers > 1:
            with ProcessPoolExecutor(max_workers=sweep.workers) as pool:
                results = list(pool.map(bench_point, jobs))
        else:
            results = [bench_point(job) for job in jobs]
    except (ValueError, RuntimeError) as e:
        log_error(f"Erro na varredura de {sweep.parameter}: {str(e)}")
        if isinstance(e, (ConfigError, PipelineError)):
            raise
        raise PipelineError("bench", str(e))

    table = aggregate(pd.DataFrame([row for rows in results for row in rows], columns=BENCH_COLUMNS))
    ArtifactService(config.output_dir).save_table(table, f"bench_{sweep.parameter}.csv")
    log_success(f"Varredura de {sweep.parameter}: {len(jobs)} pontos")
    return table
