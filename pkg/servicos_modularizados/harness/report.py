"""
Relatório de uma execução: verdade de campo, estimativas e erros por pessoa.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from servicos_modularizados.scene_sim import Scene


class PipelineError(RuntimeError):
    """Falha de um estágio do pipeline; stage identifica o estágio."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class PersonRecord:
    """Uma direção atribuída e o que foi estimado nela."""

    direction: int
    harmonic: int
    target: List[float]
    person: Optional[int] = None
    truth_rr_rpm: Optional[float] = None
    truth_hr_bpm: Optional[float] = None
    rr_rpm: Optional[float] = None
    hr_bpm: Optional[float] = None
    rr_valid: bool = False
    hr_valid: bool = False
    breath_hold: bool = False
    rr_error: Optional[float] = None
    hr_error: Optional[float] = None
    timeline: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class Report:
    """Resultado consolidado de cmd_run."""

    persons: List[PersonRecord] = field(default_factory=list)
    detections: int = 0
    false_alarms: int = 0
    missed: int = 0
    events: List[Dict[str, Any]] = field(default_factory=list)
    stages: Dict[str, str] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)
    seed: int = 0
    runtime_s: float = 0.0
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def nearest_direction(scene: Scene, scan_points: np.ndarray) -> Dict[int, int]:
    """Pessoa → direção de varredura mais próxima do seu peito."""
    mapping = {}
    for index, person in enumerate(scene.persons):
        distances = np.linalg.norm(scan_points - np.asarray(person.position)[None, :], axis=1)
        mapping[index] = int(np.argmin(distances))
    return mapping


def occupied_directions(scene: Scene, scan_points: np.ndarray) -> Dict[int, int]:
    """Direção → primeira pessoa cuja direção mais próxima é ela."""
    occupied: Dict[int, int] = {}
    for person, direction in nearest_direction(scene, scan_points).items():
        occupied.setdefault(direction, person)
    return occupied


def person_record(direction: int, harmonic: int, target, scene: Scene, scan_points: np.ndarray,
                  estimate=None, timeline=None) -> PersonRecord:
    """
    Monta o registro de uma direção atribuída.

    Args:
        direction: direção de varredura
        harmonic: harmônico atribuído
        target: ponto focado
        scene: cena (verdade de campo)
        scan_points: pontos de todas as direções
        estimate: VitalEstimate ou None se a estimativa falhou
        timeline: pares (fim da janela, VitalEstimate)

    Returns:
        PersonRecord: erros absolutos calculados quando há pessoa na direção
    """
    record = PersonRecord(direction=int(direction), harmonic=int(harmonic),
                          target=[float(v) for v in target])
    person = occupied_directions(scene, scan_points).get(direction)
    if person is not None:
        truth = scene.persons[person]
        record.person = person
        record.truth_rr_rpm = 60.0 * truth.resp_hz
        record.truth_hr_bpm = 60.0 * truth.heart_hz
    if estimate is not None:
        record.rr_rpm = float(estimate.rr_rpm)
        record.hr_bpm = float(estimate.hr_bpm)
        record.rr_valid = bool(estimate.rr_valid)
        record.hr_valid = bool(estimate.hr_valid)
        record.breath_hold = bool(estimate.breath_hold)
        if person is not None:
            record.rr_error = abs(record.rr_rpm - record.truth_rr_rpm)
            record.hr_error = abs(record.hr_bpm - record.truth_hr_bpm)
    for end, point in timeline or []:
        entry = {"t_end_s": float(end)}
        entry.update(point.to_dict())
        record.timeline.append(entry)
    return record
