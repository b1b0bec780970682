"""
Estágios do pipeline de detecção e monitoramento.

Ordem: linha de base da cena vazia → varredura e atribuição de feixes →
síntese da codificação → registro de monitoramento → separação dos
harmônicos, extração do movimento, VMD e estimativa de RR/HR.

Cada estágio grava seus artefatos no diretório de saída e sabe se
reconstruir a partir deles, o que permite retomar uma execução.
"""

import dataclasses
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from geral.app_logger import log_success
from geral.artifact_service import ArtifactService
from geral.history_service import DetectionLogService
from geral.module_interfaces import PipelineStageInterface
from geral.module_registry import StageRegistry
from servicos_modularizados.coding_optimizer import (
    BeamTask,
    BpsoSynthesizer,
    OptResult,
    PhaseDelaySynthesizer,
    load_coding,
    phase_delay_coding,
    save_coding,
    save_fitness_trace,
)
from servicos_modularizados.detection import (
    AssignmentState,
    BaselineIntensity,
    HarmonicStream,
    decimate_stream,
    demux_harmonics,
    extract_motion_signal,
    load_baseline,
    measure_baseline,
    replay_assignments,
    save_baseline,
    scan_indicators,
    update_assignments,
)
from servicos_modularizados.ris_model import StcCoding
from servicos_modularizados.scene_sim import EchoSet, Scene, load_echo_raw, save_echo_raw, scan_sequence, simulate_received
from servicos_modularizados.vmd import BaselineVmdDecomposer, ImprovedVmdDecomposer, VitalEstimate, VitalSignService

from .config import SYNTH_PHASE_DELAY, RunConfig
from .report import PipelineError

STAGE_BASELINE = "linha_de_base"
STAGE_SCAN = "varredura"
STAGE_CODING = "codificacao"
STAGE_MONITOR = "monitoramento"
STAGE_VITALS = "sinais_vitais"

TIMELINE_WINDOW_S = 20.0
EVENT_LOG = "deteccao_eventos.jsonl"
VITAL_FIELDS = [f.name for f in dataclasses.fields(VitalEstimate)]


def stage_seeds(seed: int) -> Tuple[int, int, int]:
    """Sementes independentes da linha de base, da varredura e do monitoramento."""
    state = np.random.SeedSequence(int(seed)).generate_state(3)
    return int(state[0]), int(state[1]), int(state[2])


def scan_codings(config: RunConfig) -> List[StcCoding]:
    """Uma codificação por direção, focando o harmônico de varredura no ponto da direção."""
    return [phase_delay_coding(config.geometry, point, config.detection.scan_harmonic, config.bpso.mode)
            for point in config.scan_points()]


def monitor_start(config: RunConfig) -> float:
    """Instante em que o monitoramento começa (logo após a varredura)."""
    return len(config.coding.scan_x) * config.detection.confirm_window_s


def simulate_scan(config: RunConfig, scene: Scene, codings: Optional[Sequence[StcCoding]] = None) -> EchoSet:
    return scan_sequence(scene, codings or scan_codings(config), config.geometry,
                         config.detection.confirm_window_s, config.scene.fs, config.grid,
                         config.scene.harmonics)


def empty_scene(scene: Scene) -> Scene:
    """Mesma cena sem pessoas e sem transeunte (refletores estáticos mantidos)."""
    return dataclasses.replace(scene, persons=(), passerby=None)


def detect(config: RunConfig, baseline: BaselineIntensity, scene: Scene,
           codings: Optional[Sequence[StcCoding]] = None) -> Tuple[pd.DataFrame, AssignmentState]:
    """
    Varre as direções, avalia os indicadores e atualiza a atribuição.

    Args:
        config: configuração da execução
        baseline: intensidades da cena vazia
        scene: cena simulada
        codings: codificações de varredura (padrão: scan_codings)

    Returns:
        Tuple[pd.DataFrame, AssignmentState]: tabela por direção e estado após a varredura
    """
    echo = simulate_scan(config, scene, codings)
    intensities, flags, respiration = scan_indicators(echo, baseline, config.detection)
    now = monitor_start(config)
    initial = AssignmentState.initial(len(config.coding.scan_x), config.detection.harmonic_pool,
                                      positions=config.coding.scan_x)
    state = update_assignments(initial, flags, respiration, now, config.detection)
    table = pd.DataFrame({
        "direction": np.arange(len(flags)),
        "x_m": list(config.coding.scan_x),
        "intensity": intensities,
        "baseline": baseline.intensities,
        "intensity_flag": flags,
        "respiration_flag": [np.nan if r is None else float(r) for r in respiration],
        "t_s": now,
    })
    return table, state


def state_from_table(config: RunConfig, table: pd.DataFrame) -> AssignmentState:
    """Reproduz a atribuição a partir da tabela de varredura gravada."""
    initial = AssignmentState.initial(len(table), config.detection.harmonic_pool,
                                      positions=tuple(float(x) for x in table["x_m"]))
    flags = [bool(v) for v in table["intensity_flag"]]
    respiration = [None if math.isnan(v) else bool(v) for v in table["respiration_flag"]]
    return replay_assignments(initial, [(float(table["t_s"].iloc[0]), flags, respiration)], config.detection)[-1]


def build_task(config: RunConfig, assigned: Dict[int, int]) -> BeamTask:
    points = config.scan_points()
    return BeamTask.from_pairs([(k, tuple(points[d])) for d, k in sorted(assigned.items())])


def synthesize(config: RunConfig, task: BeamTask) -> OptResult:
    """
    Gera a codificação de monitoramento para as direções atribuídas.

    Sem feixes devolve a codificação constante.
    """
    geometry = config.geometry
    if len(task) == 0:
        coding = StcCoding.constant(geometry.rows, geometry.cols, geometry.code_length)
        return OptResult(best_coding=coding, best_fitness=float("nan"), mode=config.bpso.mode)
    if config.coding.synthesizer == SYNTH_PHASE_DELAY:
        return PhaseDelaySynthesizer(geometry, config.bpso.mode).synthesize(task)
    return BpsoSynthesizer(geometry, config.grid, config.bpso).synthesize(task)


def simulate_monitor(config: RunConfig, scene: Scene, coding: StcCoding) -> EchoSet:
    return simulate_received(scene, coding, config.geometry, config.scene.duration_s, config.scene.fs,
                             config.grid, config.scene.harmonics, start_time=monitor_start(config))


def make_decomposer(config: RunConfig):
    if config.decomposer == "vmd":
        return BaselineVmdDecomposer(config.vmd)
    return ImprovedVmdDecomposer(config.vmd)


def motion_signal(config: RunConfig, echo: EchoSet, harmonic: int) -> HarmonicStream:
    """Separa o harmônico, reamostra para a taxa de análise e extrai a fase do movimento."""
    detection = config.detection
    stream = demux_harmonics(echo, [harmonic], None, detection.demux_half_bandwidth_hz, detection.fir_taps)[harmonic]
    analysis = decimate_stream(stream, detection.analysis_fs)
    return dataclasses.replace(analysis, samples=extract_motion_signal(analysis.samples))


def vital_signs(config: RunConfig, motion: HarmonicStream):
    """
    Estima RR/HR do sinal de movimento.

    Returns:
        Tuple[Optional[VitalEstimate], list]: estimativa (None se falhou) e linha do tempo
    """
    service = VitalSignService(make_decomposer(config), config.vmd)
    estimate = service.analyze(motion.samples, motion.fs, config.vital_window_s)
    window = config.vital_window_s or TIMELINE_WINDOW_S
    timeline = service.timeline(motion.samples, motion.fs, window, config.vital_step_s)
    return estimate, timeline


def _estimate_row(estimate: VitalEstimate, **extra) -> Dict[str, Any]:
    row = dict(extra)
    row.update({name: getattr(estimate, name) for name in VITAL_FIELDS})
    return row


def _estimate_from_row(row) -> VitalEstimate:
    values = {name: row[name] for name in VITAL_FIELDS}
    for name in ("rr_valid", "hr_valid", "breath_hold"):
        values[name] = bool(values[name])
    for name in ("rr_rpm", "hr_bpm", "rr_peak", "hr_peak", "window_s"):
        values[name] = float(values[name])
    return VitalEstimate(**values)


class _Stage(PipelineStageInterface):
    def __init__(self, config: RunConfig, artifacts: ArtifactService):
        self.config = config
        self.store = artifacts
        self.seeds = stage_seeds(config.seed)

    def _require(self, context: Dict[str, Any], key: str):
        if key not in context:
            raise PipelineError(self.name, f"resultado '{key}' ausente do contexto")
        return context[key]


class BaselineStage(_Stage):
    """Intensidade da cena vazia em cada direção."""

    name = STAGE_BASELINE
    depends_on: List[str] = []

    def artifacts(self) -> List[str]:
        return ["linha_de_base.csv"]

    def run(self, context: Dict[str, Any]) -> None:
        scene = empty_scene(self.config.simulation_scene(self.seeds[0]))
        baseline = measure_baseline(simulate_scan(self.config, scene), self.config.detection)
        save_baseline(baseline, self.store.path("linha_de_base.csv"))
        context["baseline"] = baseline

    def load(self, context: Dict[str, Any]) -> None:
        context["baseline"] = load_baseline(self.store.path("linha_de_base.csv"),
                                            self.config.detection.confirm_window_s, self.config.scene.fs)


class ScanStage(_Stage):
    """Varredura da cena, indicadores e atribuição de harmônicos."""

    name = STAGE_SCAN
    depends_on = [STAGE_BASELINE]

    def artifacts(self) -> List[str]:
        return ["varredura.csv"]

    def run(self, context: Dict[str, Any]) -> None:
        baseline = self._require(context, "baseline")
        table, state = detect(self.config, baseline, self.config.simulation_scene(self.seeds[1]))
        history = DetectionLogService(self.store, EVENT_LOG)
        history.clear_history()
        for event in state.events:
            history.add_entry(event.to_dict())
        if self.store.save_table(table, "varredura.csv") is None:
            raise PipelineError(self.name, "não foi possível gravar a tabela de varredura")
        context.update(scan=table, state=state, events=history.get_events())
        log_success(f"Varredura: {len(state.assigned())} direções atribuídas")

    def load(self, context: Dict[str, Any]) -> None:
        table = self.store.load_table("varredura.csv")
        context.update(scan=table, state=state_from_table(self.config, table),
                       events=DetectionLogService(self.store, EVENT_LOG).get_events())


class CodingStage(_Stage):
    """Codificação de monitoramento (arquivo fornecido ou sintetizada)."""

    name = STAGE_CODING
    depends_on = [STAGE_SCAN]

    def artifacts(self) -> List[str]:
        return ["codificacao.txt", "aptidao.csv"]

    def run(self, context: Dict[str, Any]) -> None:
        mode = self.config.bpso.mode
        if self.config.coding.path is not None:
            coding, mode = load_coding(self.config.coding.path)
            coding.check_geometry(self.config.geometry)
            trace = ()
        else:
            state = self._require(context, "state")
            result = synthesize(self.config, build_task(self.config, state.assigned()))
            coding, trace = result.best_coding, result.fitness_trace
        save_coding(coding, self.store.path("codificacao.txt"), mode)
        save_fitness_trace(trace, self.store.path("aptidao.csv"))
        context["coding"] = coding

    def load(self, context: Dict[str, Any]) -> None:
        context["coding"] = load_coding(self.store.path("codificacao.txt"))[0]


class MonitorStage(_Stage):
    """Registro contínuo com a codificação de monitoramento."""

    name = STAGE_MONITOR
    depends_on = [STAGE_CODING]

    def artifacts(self) -> List[str]:
        return ["monitor_d0.txt", "monitor_d0.bin"]

    def run(self, context: Dict[str, Any]) -> None:
        coding = self._require(context, "coding")
        echo = simulate_monitor(self.config, self.config.simulation_scene(self.seeds[2]), coding)
        save_echo_raw(echo, self.store.base_dir, prefix="monitor")
        context["echo"] = echo

    def load(self, context: Dict[str, Any]) -> None:
        context["echo"] = load_echo_raw(self.store.path("monitor_d0.txt"))


class VitalsStage(_Stage):
    """Movimento, decomposição e RR/HR de cada direção atribuída."""

    name = STAGE_VITALS
    depends_on = [STAGE_SCAN, STAGE_MONITOR]

    def artifacts(self) -> List[str]:
        return ["sinais_vitais.csv", "linha_do_tempo.csv"]

    def run(self, context: Dict[str, Any]) -> None:
        state = self._require(context, "state")
        echo = self._require(context, "echo")
        vitals = {}
        rows, timeline_rows = [], []
        for direction, harmonic in sorted(state.assigned().items()):
            motion = motion_signal(self.config, echo, harmonic)
            t = motion.start_s + np.arange(motion.samples.size) / motion.fs
            self.store.save_table(pd.DataFrame({"t_s": t, "phase_rad": motion.samples}),
                                      f"movimento_d{direction}.csv")
            estimate, timeline = vital_signs(self.config, motion)
            vitals[direction] = (estimate, timeline)
            if estimate is not None:
                rows.append(_estimate_row(estimate, direction=direction, harmonic=harmonic))
            timeline_rows.extend(_estimate_row(point, direction=direction, t_end_s=end) for end, point in timeline)
        self.store.save_table(pd.DataFrame(rows, columns=["direction", "harmonic"] + VITAL_FIELDS),
                                  "sinais_vitais.csv")
        self.store.save_table(pd.DataFrame(timeline_rows, columns=["direction", "t_end_s"] + VITAL_FIELDS),
                                  "linha_do_tempo.csv")
        context["vitals"] = vitals

    def load(self, context: Dict[str, Any]) -> None:
        state = self._require(context, "state")
        table = self.store.load_table("sinais_vitais.csv")
        timeline = self.store.load_table("linha_do_tempo.csv")
        vitals = {}
        for direction in sorted(state.assigned()):
            rows = table[table["direction"] == direction]
            estimate = _estimate_from_row(rows.iloc[0]) if len(rows) else None
            points = [(float(row["t_end_s"]), _estimate_from_row(row))
                      for _, row in timeline[timeline["direction"] == direction].iterrows()]
            vitals[direction] = (estimate, points)
        context["vitals"] = vitals


STAGES = (BaselineStage, ScanStage, CodingStage, MonitorStage, VitalsStage)


def build_registry(config: RunConfig, artifacts: ArtifactService,
                   stages: Sequence[type] = STAGES) -> StageRegistry:
    """Registra os estágios pedidos no registro do diretório de saída."""
    registry = StageRegistry(artifacts)
    for stage_cls in stages:
        registry.register_stage(stage_cls(config, artifacts), (stage_cls.__doc__ or "").strip())
    return registry
