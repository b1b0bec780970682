"""
Tipos do otimizador de codificação: tarefas de feixe, configuração do BPSO,
resultado da otimização e o mapeamento entre vetor de decisão e tensor STC.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from servicos_modularizados.ris_model import RisGeometry, StcCoding

MODE_FULL = "full"
MODE_COLUMN = "column-shared"
MODE_ROW = "row-shared"
MODES = (MODE_FULL, MODE_COLUMN, MODE_ROW)

MAX_FULL_BITS = 1_000_000


class CodingError(ValueError):
    """Erro de domínio do otimizador de codificação."""


@dataclass(frozen=True)
class BeamAssignment:
    """Um harmônico focado num ponto (x, y, z) com peso positivo."""

    harmonic: int
    target: Tuple[float, float, float]
    weight: float = 1.0

    def __post_init__(self):
        target = tuple(float(v) for v in self.target)
        if len(target) != 3:
            raise CodingError("O alvo deve ter três coordenadas (x, y, z)")
        if not self.weight > 0:
            raise CodingError(f"Peso do harmônico {self.harmonic} deve ser positivo")
        object.__setattr__(self, "harmonic", int(self.harmonic))
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class BeamTask:
    """Lista de atribuições harmônico → alvo."""

    assignments: Tuple[BeamAssignment, ...] = ()

    def __post_init__(self):
        assignments = tuple(self.assignments)
        harmonics = [a.harmonic for a in assignments]
        if len(set(harmonics)) != len(harmonics):
            raise CodingError(f"Harmônicos repetidos na tarefa: {harmonics}")
        object.__setattr__(self, "assignments", assignments)

    @property
    def harmonics(self) -> Tuple[int, ...]:
        return tuple(a.harmonic for a in self.assignments)

    @property
    def total_weight(self) -> float:
        return float(sum(a.weight for a in self.assignments))

    def __len__(self) -> int:
        return len(self.assignments)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[int, Sequence[float]]], weights: Optional[Sequence[float]] = None):
        weights = weights or [1.0] * len(pairs)
        return cls(tuple(BeamAssignment(k, tuple(p), w) for (k, p), w in zip(pairs, weights)))


@dataclass(frozen=True)
class BpsoConfig:
    """
    Hiperparâmetros do BPSO.

    A inércia decai linearmente de inertia_start até inertia_end ao longo
    das iterações. Com seed_with_steering as primeiras partículas partem das
    codificações em forma fechada da tarefa (casada e por atraso de cada feixe).
    """

    swarm_size: int = 40
    iterations: int = 300
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    cognitive: float = 2.0
    social: float = 2.0
    v_max: float = 6.0
    seed: int = 0
    mode: str = MODE_COLUMN
    eval_harmonics: int = 10
    seed_with_steering: bool = True

    def __post_init__(self):
        if self.swarm_size < 2:
            raise CodingError("O enxame deve ter pelo menos 2 partículas")
        if self.iterations < 1:
            raise CodingError("O número de iterações deve ser >= 1")
        if not self.v_max > 0:
            raise CodingError("v_max deve ser positivo")
        if self.mode not in MODES:
            raise CodingError(f"Modo de simetria desconhecido: {self.mode} (use {', '.join(MODES)})")
        if self.eval_harmonics < 1:
            raise CodingError("O conjunto de harmônicos avaliados deve incluir |k| >= 1")

    def inertia(self, iteration: int) -> float:
        if self.iterations == 1:
            return self.inertia_start
        fraction = iteration / (self.iterations - 1)
        return self.inertia_start - (self.inertia_start - self.inertia_end) * fraction


@dataclass(frozen=True, eq=False)
class OptResult:
    """Resultado de uma otimização de codificação."""

    best_coding: StcCoding
    best_fitness: float
    fitness_trace: Tuple[float, ...] = field(default_factory=tuple)
    evaluations: int = 0
    mode: str = MODE_COLUMN

    def same_as(self, other: "OptResult") -> bool:
        return (self.best_coding.equals(other.best_coding)
                and self.best_fitness == other.best_fitness
                and self.fitness_trace == other.fitness_trace
                and self.evaluations == other.evaluations)


def spatial_dims(geometry: RisGeometry, mode: str) -> int:
    """Número de sequências independentes (colunas, linhas ou elementos)."""
    if mode == MODE_COLUMN:
        return geometry.cols
    if mode == MODE_ROW:
        return geometry.rows
    if mode == MODE_FULL:
        return geometry.rows * geometry.cols
    raise CodingError(f"Modo de simetria desconhecido: {mode}")


def decision_length(geometry: RisGeometry, mode: str) -> int:
    return spatial_dims(geometry, mode) * geometry.code_length


def decode_bits(vector: np.ndarray, geometry: RisGeometry, mode: str) -> StcCoding:
    """
    Converte um vetor de decisão em tensor STC.

    Args:
        vector: bits (D·L,) ordenados por sequência e depois por fatia
        geometry: geometria da RIS
        mode: modo de simetria

    Returns:
        StcCoding: tensor (M, N, L)
    """
    vector = np.asarray(vector, dtype=np.uint8)
    if vector.size != decision_length(geometry, mode):
        raise CodingError(f"Vetor de decisão com {vector.size} bits; esperado {decision_length(geometry, mode)}")
    sequences = vector.reshape(spatial_dims(geometry, mode), geometry.code_length)
    if mode == MODE_COLUMN:
        return StcCoding.from_columns(sequences, geometry.rows)
    if mode == MODE_ROW:
        return StcCoding.from_rows(sequences, geometry.cols)
    return StcCoding(sequences.reshape(geometry.rows, geometry.cols, geometry.code_length))


def encode_bits(coding: StcCoding, mode: str) -> np.ndarray:
    """Inverso de decode_bits; exige que a codificação respeite a simetria do modo."""
    bits = coding.bits
    if mode == MODE_COLUMN:
        if not np.all(bits == bits[:1]):
            raise CodingError("A codificação varia entre linhas; não é compartilhada por coluna")
        return bits[0].reshape(-1).copy()
    if mode == MODE_ROW:
        if not np.all(bits == bits[:, :1]):
            raise CodingError("A codificação varia entre colunas; não é compartilhada por linha")
        return bits[:, 0].reshape(-1).copy()
    if mode == MODE_FULL:
        return bits.reshape(-1).copy()
    raise CodingError(f"Modo de simetria desconhecido: {mode}")
