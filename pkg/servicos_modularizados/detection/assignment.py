"""
Máquina de estados da atribuição de feixes harmônicos às direções ocupadas.

A atualização é uma função pura de (estado, resultado da varredura, instante):
reproduzir a mesma sequência de varreduras reproduz a mesma trajetória.
"""

from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from geral.app_logger import log_debug, log_warning
from geral.artifact_service import ArtifactService

from .types import (
    EVENT_ASSIGNED,
    EVENT_CANDIDATE,
    EVENT_CAPACITY,
    EVENT_RELEASED,
    STATUS_ASSIGNED,
    STATUS_CANDIDATE,
    STATUS_EMPTY,
    AssignmentEvent,
    AssignmentState,
    BaselineIntensity,
    DetectionConfig,
    DetectionError,
    pool_order,
)

Flags = Sequence[Optional[bool]]


def _flags(values: Optional[Flags], directions: int, label: str) -> Tuple[Optional[bool], ...]:
    if values is None:
        return (None,) * directions
    values = tuple(None if v is None else bool(v) for v in values)
    if len(values) != directions:
        raise DetectionError(f"{label}: esperadas {directions} direções, recebidas {len(values)}")
    return values


def choose_harmonic(state: AssignmentState, direction: int, harmonic: Sequence[Optional[int]],
                    pool: Sequence[int]) -> int:
    """
    Escolhe o harmônico livre de uma direção.

    Γ real faz o padrão de -k repetir o de +k espelhado em x. Se a direção
    espelhada já tem h, a direção recebe -h, cujo fantasma cai sobre o
    próprio alvo. Com posições conhecidas os pares ±k ainda livres vêm
    antes dos harmônicos cujo conjugado já está em uso. Sem posições vale
    a ordem do pool (menor |k| primeiro).
    """
    mirror = state.mirror_of(direction)
    if mirror is not None and harmonic[mirror] is not None and -harmonic[mirror] in pool:
        return -harmonic[mirror]
    if state.positions is not None:
        paired = [k for k in pool if -k in pool]
        if paired:
            return paired[0]
    return pool[0]


def update_assignments(state: AssignmentState, intensity_flags: Flags, respiration_flags: Optional[Flags],
                       now: float, config: DetectionConfig) -> AssignmentState:
    """
    Aplica um resultado de varredura ao estado de atribuição.

    Regras por direção (None num indicador significa "sem informação"):
      - empty → candidate quando o indicador de intensidade passa;
      - candidate → assigned(k) quando o indicador respiratório também passa e
        há harmônico livre (ver choose_harmonic); sem harmônico livre a
        direção continua candidata e um evento "capacity" é emitido;
      - candidate/assigned → empty quando a intensidade falha por loss_timeout_s
        segundos seguidos desde a última presença; o harmônico volta ao pool.

    Args:
        state: estado atual
        intensity_flags: indicador de intensidade por direção
        respiration_flags: indicador respiratório por direção (ou None)
        now: instante da varredura em segundos
        config: configuração da detecção

    Returns:
        AssignmentState: novo estado, com os eventos desta atualização
    """
    directions = state.directions
    intensity = _flags(intensity_flags, directions, "Indicador de intensidade")
    respiration = _flags(respiration_flags, directions, "Indicador respiratório")
    previous = max((t for t in state.last_seen if t is not None), default=None)
    if previous is not None and now < previous:
        raise DetectionError(f"Instante {now} anterior à última presença registrada ({previous})")

    status = list(state.status)
    harmonic = list(state.harmonic)
    last_seen = list(state.last_seen)
    pool = list(state.pool)
    events: List[AssignmentEvent] = []

    for d in state.visit_order():
        present = intensity[d]
        if present:
            last_seen[d] = now
            if status[d] == STATUS_EMPTY:
                status[d] = STATUS_CANDIDATE
                events.append(AssignmentEvent(now, d, EVENT_CANDIDATE))
        elif present is False and status[d] != STATUS_EMPTY:
            if last_seen[d] is not None and now - last_seen[d] >= config.loss_timeout_s:
                released = harmonic[d]
                if released is not None:
                    pool = list(pool_order(pool + [released]))
                status[d], harmonic[d], last_seen[d] = STATUS_EMPTY, None, None
                events.append(AssignmentEvent(now, d, EVENT_RELEASED, released))
                continue

        if status[d] == STATUS_CANDIDATE and present and respiration[d]:
            if pool:
                k = choose_harmonic(state, d, harmonic, pool)
                pool.remove(k)
                status[d], harmonic[d] = STATUS_ASSIGNED, k
                events.append(AssignmentEvent(now, d, EVENT_ASSIGNED, k))
            else:
                events.append(AssignmentEvent(now, d, EVENT_CAPACITY))
                log_warning(f"Sem harmônicos livres para a direção {d}")

    new_state = AssignmentState(
        status=tuple(status),
        harmonic=tuple(harmonic),
        pool=tuple(pool),
        last_seen=tuple(last_seen),
        harmonic_set=state.harmonic_set,
        events=tuple(events),
        positions=state.positions,
    )
    new_state.check_consistency()
    if events:
        log_debug(f"t={now:.1f}s: " + ", ".join(f"{e.event}@{e.direction}" for e in events))
    return new_state


def replay_assignments(initial: AssignmentState, scans: Iterable[Tuple[float, Flags, Optional[Flags]]],
                       config: DetectionConfig) -> List[AssignmentState]:
    """Reaplica uma sequência registrada de varreduras (now, intensidade, respiração)."""
    states = []
    state = initial
    for now, intensity, respiration in scans:
        state = update_assignments(state, intensity, respiration, now, config)
        states.append(state)
    return states


def baseline_table(baseline: BaselineIntensity) -> pd.DataFrame:
    return pd.DataFrame({"direction": np.arange(len(baseline)), "intensity": baseline.intensities})


def save_baseline(baseline: BaselineIntensity, path: Union[str, Path]) -> Path:
    """Grava a linha de base em CSV (direction, intensity)."""
    path = Path(path)
    target = ArtifactService(path.parent).save_table(baseline_table(baseline), path.name)
    if target is None:
        raise DetectionError(f"Não foi possível gravar a linha de base em {path}")
    return target


def load_baseline(path: Union[str, Path], dwell: float, fs: float) -> BaselineIntensity:
    """Lê uma linha de base gravada por save_baseline."""
    path = Path(path)
    table = ArtifactService(path.parent).load_table(path.name)
    if table is None:
        raise DetectionError(f"Linha de base não encontrada: {path}")
    if list(table.columns) != ["direction", "intensity"]:
        raise DetectionError(f"Colunas inesperadas na linha de base: {list(table.columns)}")
    table = table.sort_values("direction")
    if not np.array_equal(table["direction"].to_numpy(), np.arange(len(table))):
        raise DetectionError("A linha de base deve cobrir as direções 0..D-1 sem lacunas")
    return BaselineIntensity(table["intensity"].to_numpy(dtype=float), dwell, fs)
