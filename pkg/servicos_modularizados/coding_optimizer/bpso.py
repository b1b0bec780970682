"""
Otimização binária por enxame de partículas (BPSO) das codificações STC.
"""

import itertools
from typing import List, Optional, Sequence

import numpy as np

from geral.app_logger import log_debug, log_success
from geral.module_interfaces import CodingSynthesisInterface
from servicos_modularizados.ris_model import FieldGrid, RisGeometry, StcCoding

from .fitness import FocusingObjective
from .steering import steering_codings
from .tasks import (
    MAX_FULL_BITS,
    MODE_FULL,
    BeamTask,
    BpsoConfig,
    CodingError,
    OptResult,
    decision_length,
    decode_bits,
    encode_bits,
)

BRUTE_FORCE_MAX_BITS = 20
BRUTE_FORCE_CHUNK = 4096


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


class BinaryPSO:
    """
    Enxame binário com um gerador aleatório por partícula.

    Os geradores derivam da semente mestre, portanto a avaliação das
    partículas pode ser feita em lote sem alterar o resultado.
    """

    def __init__(self, objective: FocusingObjective, dimensions: int, config: BpsoConfig,
                 initial: Optional[Sequence[np.ndarray]] = None):
        self.objective = objective
        self.dimensions = dimensions
        self.config = config
        seeds = np.random.SeedSequence(config.seed).spawn(config.swarm_size)
        self.rngs = [np.random.default_rng(s) for s in seeds]

        self.positions = np.stack([rng.integers(0, 2, size=dimensions, dtype=np.uint8) for rng in self.rngs])
        for index, vector in enumerate(initial or []):
            if index >= config.swarm_size:
                break
            self.positions[index] = np.asarray(vector, dtype=np.uint8)
        self.velocity = np.zeros((config.swarm_size, dimensions))

        fitness = objective.evaluate(self.positions)
        self.pbest_position = self.positions.copy()
        self.pbest_value = fitness.copy()
        best = int(np.argmax(fitness))
        self.gbest_position = self.positions[best].copy()
        self.gbest_value = float(fitness[best])
        self.gbest_value_history: List[float] = []

    def update_velocity(self, w: float):
        c1, c2 = self.config.cognitive, self.config.social
        for i, rng in enumerate(self.rngs):
            r1 = rng.random(self.dimensions)
            r2 = rng.random(self.dimensions)
            x = self.positions[i].astype(float)
            cognitive_vel = c1 * r1 * (self.pbest_position[i] - x)
            social_vel = c2 * r2 * (self.gbest_position - x)
            self.velocity[i] = w * self.velocity[i] + cognitive_vel + social_vel
        np.clip(self.velocity, -self.config.v_max, self.config.v_max, out=self.velocity)

    def update_position(self):
        for i, rng in enumerate(self.rngs):
            flips = rng.random(self.dimensions) < sigmoid(self.velocity[i])
            self.positions[i] = flips.astype(np.uint8)

    def evaluate(self):
        fitness = self.objective.evaluate(self.positions)
        improved = fitness > self.pbest_value
        self.pbest_value[improved] = fitness[improved]
        self.pbest_position[improved] = self.positions[improved]
        best = int(np.argmax(fitness))
        if fitness[best] > self.gbest_value:
            self.gbest_value = float(fitness[best])
            self.gbest_position = self.positions[best].copy()
        self.gbest_value_history.append(self.gbest_value)

    def run(self):
        for iteration in range(self.config.iterations):
            self.update_velocity(self.config.inertia(iteration))
            self.update_position()
            self.evaluate()
            if (iteration + 1) % 50 == 0:
                log_debug(f"BPSO iteração {iteration + 1}: melhor aptidão {self.gbest_value:.6g}")
        return self.gbest_position, self.gbest_value


def bpso_optimize(task: BeamTask, geometry: RisGeometry, grid: FieldGrid, config: BpsoConfig,
                  initial: Optional[Sequence[StcCoding]] = None) -> OptResult:
    """
    Otimiza a codificação STC para a tarefa de feixes.

    Args:
        task: harmônicos e alvos
        geometry: geometria da RIS
        grid: grade de avaliação
        config: hiperparâmetros e modo de simetria
        initial: codificações usadas como partículas iniciais (opcional)

    Returns:
        OptResult: melhor codificação, aptidão e traço por iteração
    """
    dimensions = decision_length(geometry, config.mode)
    if config.mode == MODE_FULL and dimensions > MAX_FULL_BITS:
        raise CodingError(
            f"Vetor de decisão com {dimensions} bits no modo completo; "
            "use o modo column-shared ou row-shared"
        )
    objective = FocusingObjective(task, geometry, grid, config.mode, config.eval_harmonics)

    seeds = [encode_bits(c, config.mode) for c in (initial or [])]
    if config.seed_with_steering:
        seeds.extend(encode_bits(c, config.mode) for c in steering_codings(task, geometry, config.mode))

    swarm = BinaryPSO(objective, dimensions, config, initial=seeds)
    best_position, best_value = swarm.run()
    result = OptResult(
        best_coding=decode_bits(best_position, geometry, config.mode),
        best_fitness=float(best_value),
        fitness_trace=tuple(swarm.gbest_value_history),
        evaluations=objective.evaluations,
        mode=config.mode,
    )
    log_success(f"BPSO concluído: aptidão {result.best_fitness:.6g} após {config.iterations} iterações")
    return result


def brute_force_optimize(task: BeamTask, geometry: RisGeometry, grid: FieldGrid,
                         mode: str, eval_harmonics: int = 10) -> OptResult:
    """
    Enumera todas as codificações de um espaço pequeno.

    Args:
        task: harmônicos e alvos
        geometry: geometria da RIS
        grid: grade de avaliação
        mode: modo de simetria
        eval_harmonics: K do conjunto avaliado

    Returns:
        OptResult: ótimo global (primeiro encontrado em caso de empate)
    """
    dimensions = decision_length(geometry, mode)
    if dimensions > BRUTE_FORCE_MAX_BITS:
        raise CodingError(f"Enumeração limitada a {BRUTE_FORCE_MAX_BITS} bits ({dimensions} pedidos)")
    objective = FocusingObjective(task, geometry, grid, mode, eval_harmonics)

    best_value = -np.inf
    best_vector = None
    candidates = itertools.product((0, 1), repeat=dimensions)
    while True:
        chunk = np.array(list(itertools.islice(candidates, BRUTE_FORCE_CHUNK)), dtype=np.uint8)
        if chunk.size == 0:
            break
        fitness = objective.evaluate(chunk)
        index = int(np.argmax(fitness))
        if fitness[index] > best_value:
            best_value = float(fitness[index])
            best_vector = chunk[index].copy()

    return OptResult(
        best_coding=decode_bits(best_vector, geometry, mode),
        best_fitness=best_value,
        fitness_trace=(best_value,),
        evaluations=objective.evaluations,
        mode=mode,
    )


class BpsoSynthesizer(CodingSynthesisInterface):
    """Gerador de codificação por BPSO para o pipeline."""

    name = "bpso"

    def __init__(self, geometry: RisGeometry, grid: FieldGrid, config: BpsoConfig):
        self.geometry = geometry
        self.grid = grid
        self.config = config

    def synthesize(self, task: BeamTask) -> OptResult:
        return bpso_optimize(task, self.geometry, self.grid, self.config)

