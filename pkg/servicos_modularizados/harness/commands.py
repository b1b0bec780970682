"""
Comandos do harness: cada um lê a configuração, executa uma parte do
pipeline e grava seus artefatos no diretório de saída.
"""

import dataclasses
import time
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from geral.app_logger import log_error, log_success, log_warning
from geral.artifact_service import ArtifactService
from servicos_modularizados.coding_optimizer import OptResult, bpso_optimize, load_coding, save_coding, save_fitness_trace
from servicos_modularizados.detection import AssignmentState
from servicos_modularizados.ris_model import StcCoding, export_pattern, near_field_pattern
from servicos_modularizados.scene_sim import EchoSet, save_echo_csv, save_echo_raw, simulate_received
from servicos_modularizados.vmd import ImfSet, VmdError, estimate_vitals

from .config import ConfigError, RunConfig, load_task
from .pipeline import STAGE_SCAN, BaselineStage, ScanStage, build_registry, make_decomposer
from .report import PipelineError, Report, occupied_directions, person_record

REPORT_FILE = "relatorio.json"


def cmd_synthesize_coding(config: RunConfig) -> OptResult:
    """
    Otimiza a codificação da tarefa de feixes configurada por BPSO.

    Grava codificacao.txt e aptidao.csv no diretório de saída.

    Args:
        config: configuração com [codificacao].tarefa definida

    Returns:
        OptResult: melhor codificação e traço de aptidão
    """
    if config.coding.task_path is None:
        raise ConfigError("[codificacao] tarefa não definida")
    task, grid, mode = load_task(config.coding.task_path, config.grid)
    try:
        bpso = dataclasses.replace(config.bpso, mode=mode)
    except ValueError as e:
        raise ConfigError(f"[tarefa] {str(e)}")
    try:
        result = bpso_optimize(task, config.geometry, grid, bpso)
        artifacts = ArtifactService(config.output_dir)
        save_coding(result.best_coding, artifacts.path("codificacao.txt"), mode)
        save_fitness_trace(result.fitness_trace, artifacts.path("aptidao.csv"))
    except ValueError as e:
        raise PipelineError("codificacao", str(e))
    return result


def _coding_for(config: RunConfig, coding_path: Optional[Union[str, Path]]) -> Optional[StcCoding]:
    path = coding_path or config.coding.path
    if path is None:
        return None
    try:
        coding, _ = load_coding(path)
        coding.check_geometry(config.geometry)
    except ValueError as e:
        raise ConfigError(str(e))
    return coding


def cmd_pattern(config: RunConfig, coding_path: Optional[Union[str, Path]] = None,
                k_max: Optional[int] = None) -> Dict[int, Path]:
    """
    Calcula o padrão de campo próximo de uma codificação na grade configurada.

    Args:
        config: configuração (geometria e grade)
        coding_path: arquivo de codificação (padrão: [codificacao].arquivo ou a última sintetizada)
        k_max: maior |k| exportado (padrão: maior |k| do conjunto de harmônicos)

    Returns:
        Dict[int, Path]: CSV gravado por harmônico em <saida>/padrao
    """
    artifacts = ArtifactService(config.output_dir)
    if coding_path is None and config.coding.path is None:
        coding_path = artifacts.path("codificacao.txt")
        if not coding_path.exists():
            raise ConfigError("Nenhuma codificação informada ou sintetizada")
    coding = _coding_for(config, coding_path)
    k_max = k_max if k_max is not None else max(abs(k) for k in config.detection.harmonic_pool)
    try:
        pattern = near_field_pattern(coding, config.geometry, config.grid, range(-k_max, k_max + 1))
        written = export_pattern(pattern, artifacts.path("padrao"))
    except ValueError as e:
        raise PipelineError("padrao", str(e))

    points = config.grid.points()
    summary = pd.DataFrame([{
        "k": k,
        "peak_x_m": points[int(np.argmax(pattern.power(k)))][0],
        "peak_y_m": points[int(np.argmax(pattern.power(k)))][1],
        "peak_power": float(np.max(pattern.power(k))),
        "energy": float(np.sum(pattern.power(k))),
    } for k in pattern.harmonics])
    artifacts.save_table(summary, "padrao/resumo.csv")
    return written


def cmd_simulate(config: RunConfig, coding_path: Optional[Union[str, Path]] = None) -> EchoSet:
    """
    Simula o registro de monitoramento com uma codificação fixa.

    Sem codificação informada usa a codificação constante. Grava o eco em
    CSV e em binário I/Q em <saida>/eco.

    Returns:
        EchoSet: eco simulado
    """
    coding = _coding_for(config, coding_path)
    if coding is None:
        geometry = config.geometry
        coding = StcCoding.constant(geometry.rows, geometry.cols, geometry.code_length)
        log_warning("Nenhuma codificação informada; simulando com a codificação constante")
    try:
        echo = simulate_received(config.simulation_scene(config.seed), coding, config.geometry,
                                 config.scene.duration_s, config.scene.fs, config.grid, config.scene.harmonics)
        directory = ArtifactService(config.output_dir).path("eco")
        save_echo_raw(echo, directory)
        save_echo_csv(echo, directory)
    except ValueError as e:
        raise PipelineError("simulacao", str(e))
    return echo


def cmd_detect(config: RunConfig) -> AssignmentState:
    """
    Mede a linha de base, varre as direções e atribui os harmônicos.

    Returns:
        AssignmentState: estado após a varredura
    """
    registry = build_registry(config, ArtifactService(config.output_dir), (BaselineStage, ScanStage))
    context = {}
    registry.run(context)
    failures = registry.failures()
    if failures:
        stage, error = next(iter(failures.items()))
        raise PipelineError(stage, error)
    state = context["state"]
    log_success(f"Detecção: direções atribuídas {state.assigned()}")
    return state


def cmd_run(config: RunConfig, resume: bool = False) -> Report:
    """
    Executa o pipeline completo e grava relatorio.json.

    Estágios que falham não interrompem o relatório: os resultados
    disponíveis são reportados e a falha aparece com o nome do estágio.

    Args:
        config: configuração validada
        resume: reaproveita estágios cujos artefatos já existem

    Returns:
        Report: verdade de campo, estimativas, erros e eventos
    """
    start = time.perf_counter()
    artifacts = ArtifactService(config.output_dir)
    registry = build_registry(config, artifacts)
    context = {}
    registry.run(context, resume=resume)

    scene = config.scene.scene
    points = config.scan_points()
    report = Report(stages=registry.summary(), failures=registry.failures(), seed=config.seed,
                    config=config.to_dict(), events=list(context.get("events", [])))
    state = context.get("state")
    if state is not None:
        vitals = context.get("vitals", {})
        occupied = occupied_directions(scene, points)
        assigned = state.assigned()
        for direction, harmonic in sorted(assigned.items()):
            estimate, timeline = vitals.get(direction, (None, []))
            report.persons.append(person_record(direction, harmonic, points[direction], scene, points,
                                                estimate, timeline))
        report.detections = len(assigned)
        report.false_alarms = sum(1 for d in assigned if d not in occupied)
        report.missed = sum(1 for d in occupied if d not in assigned)
    elif STAGE_SCAN not in report.failures:
        log_warning("Varredura sem estado de atribuição")

    report.runtime_s = time.perf_counter() - start
    artifacts.save_json(report.to_dict(), REPORT_FILE)
    if report.ok:
        log_success(f"Execução concluída: {report.detections} pessoas em {report.runtime_s:.1f} s")
    else:
        log_error(f"Execução com falhas: {', '.join(report.failures)}")
    return report


def cmd_vmd(config: RunConfig, signal_path: Union[str, Path], fs: Optional[float] = None) -> ImfSet:
    """
    Decompõe um sinal gravado em CSV (t, valor) e estima RR/HR.

    Grava imf_{i}.csv, s_r.csv, s_h.csv e vmd_relatorio.json em <saida>/vmd.

    Args:
        config: configuração ([vmd])
        signal_path: CSV com o tempo na primeira coluna e o valor na segunda
        fs: taxa de amostragem (padrão: inferida da coluna de tempo)

    Returns:
        ImfSet: modos e sinais reconstruídos
    """
    signal_path = Path(signal_path)
    if not signal_path.exists():
        raise ConfigError(f"Sinal não encontrado: {signal_path}")
    table = ArtifactService(signal_path.parent).load_table(signal_path.name)
    if table is None or table.shape[1] < 2:
        raise ConfigError(f"Sinal inválido ({signal_path}): esperadas as colunas t e valor")
    t = table.iloc[:, 0].to_numpy(dtype=float)
    values = table.iloc[:, 1].to_numpy(dtype=float)
    if fs is None:
        steps = np.diff(t)
        if steps.size == 0 or not np.median(steps) > 0:
            raise ConfigError("Não foi possível inferir a taxa de amostragem da coluna de tempo")
        fs = float(1.0 / np.median(steps))

    decomposer = make_decomposer(config)
    try:
        imfs = decomposer.decompose(values, fs)
        estimate = estimate_vitals(imfs.s_r, imfs.s_h, fs, config.vital_window_s, config.vmd)
    except VmdError as e:
        raise PipelineError("vmd", str(e))

    artifacts = ArtifactService(Path(config.output_dir) / "vmd")
    for i, mode in enumerate(imfs.modes):
        artifacts.save_table(pd.DataFrame({"t_s": t, "value": mode}), f"imf_{i}.csv")
    artifacts.save_table(pd.DataFrame({"t_s": t, "value": imfs.s_r}), "s_r.csv")
    artifacts.save_table(pd.DataFrame({"t_s": t, "value": imfs.s_h}), "s_h.csv")
    artifacts.save_json({
        "decomposer": decomposer.name,
        "fs": fs,
        "center_hz": imfs.center_hz,
        "alphas": imfs.alphas,
        "iterations": imfs.iterations,
        "converged": imfs.converged,
        "estimate": estimate.to_dict(),
    }, "vmd_relatorio.json")
    return imfs
