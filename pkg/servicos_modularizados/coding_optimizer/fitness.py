"""
Função de aptidão de focalização.

A aptidão é a fração da potência harmônica total que cai nas células-alvo,
ponderada por tarefa:

    F = Σ_t peso_t·|G_{k_t}(p_t)|² / Σ_k Σ_p |G_k(p)|²

com a soma total sobre o conjunto de harmônicos avaliados (|k| <= K).
"""

from typing import List

import numpy as np

from servicos_modularizados.ris_model import (
    FieldGrid,
    RisGeometry,
    StcCoding,
    greens_weights,
    harmonic_coefficients,
    near_field_pattern,
)
from servicos_modularizados.ris_model.near_field import CHUNK_POINTS

from .tasks import MODE_COLUMN, MODE_FULL, MODE_ROW, BeamTask, CodingError, spatial_dims

PLANE_TOLERANCE_M = 0.05


def reduced_weights(geometry: RisGeometry, points: np.ndarray, mode: str) -> np.ndarray:
    """
    Pesos de Green com iluminação, reduzidos às dimensões de decisão do modo.

    Args:
        geometry: geometria da RIS
        points: array (P, 3) de pontos
        mode: modo de simetria

    Returns:
        np.ndarray: pesos (P, D)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    weighted = greens_weights(geometry, points) * geometry.illumination[None, :, :]
    if mode == MODE_COLUMN:
        return weighted.sum(axis=1)
    if mode == MODE_ROW:
        return weighted.sum(axis=2)
    if mode == MODE_FULL:
        return weighted.reshape(points.shape[0], -1)
    raise CodingError(f"Modo de simetria desconhecido: {mode}")


def _target_indices(task: BeamTask, grid: FieldGrid, harmonics: np.ndarray) -> List[int]:
    if len(task) == 0:
        raise CodingError("Tarefa de feixes vazia")
    indices = []
    for assignment in task.assignments:
        if assignment.harmonic not in harmonics:
            raise CodingError(f"Harmônico {assignment.harmonic} fora do conjunto avaliado |k| <= {harmonics.max()}")
        if not grid.contains(assignment.target):
            raise CodingError(f"Alvo {assignment.target} fora da extensão da grade")
        if abs(assignment.target[2] - grid.z) > PLANE_TOLERANCE_M:
            raise CodingError(f"Alvo {assignment.target} fora do plano da grade (z = {grid.z} m)")
        indices.append(grid.nearest_index(assignment.target))
    return indices


def focusing_fitness(coding: StcCoding, task: BeamTask, geometry: RisGeometry, grid: FieldGrid,
                     eval_harmonics: int = 10) -> float:
    """
    Aptidão de focalização calculada a partir do padrão completo.

    Args:
        coding: codificação STC
        task: tarefa de feixes
        geometry: geometria da RIS
        grid: grade de avaliação
        eval_harmonics: K do conjunto avaliado |k| <= K

    Returns:
        float: aptidão em [0, soma dos pesos]
    """
    harmonics = np.arange(-eval_harmonics, eval_harmonics + 1)
    indices = _target_indices(task, grid, harmonics)
    pattern = near_field_pattern(coding, geometry, grid, harmonics)
    total = float(np.sum(np.abs(pattern.values) ** 2))
    if total <= 0:
        return 0.0
    captured = sum(a.weight * pattern.power(a.harmonic)[index]
                   for a, index in zip(task.assignments, indices))
    return float(captured / total)


class FocusingObjective:
    """
    Avaliador rápido da aptidão para um modo de simetria.

    Os pesos de Green são reduzidos às dimensões de decisão (soma sobre as
    linhas no modo por coluna, sobre as colunas no modo por linha) e a
    potência total vira uma forma quadrática com a matriz de Gram Q = W^H W.
    """

    def __init__(self, task: BeamTask, geometry: RisGeometry, grid: FieldGrid,
                 mode: str = MODE_COLUMN, eval_harmonics: int = 10):
        self.task = task
        self.geometry = geometry
        self.grid = grid
        self.mode = mode
        self.harmonics = np.arange(-eval_harmonics, eval_harmonics + 1)
        indices = _target_indices(task, grid, self.harmonics)

        self.dims = spatial_dims(geometry, mode)
        self.coefficients = harmonic_coefficients(self.harmonics, geometry.code_length)
        self.gram = np.zeros((self.dims, self.dims), dtype=complex)
        points = grid.points()
        for start in range(0, points.shape[0], CHUNK_POINTS):
            reduced = self._reduce(points[start:start + CHUNK_POINTS])
            self.gram += reduced.conj().T @ reduced
        self.target_rows = self._reduce(points[indices])
        self.target_columns = np.searchsorted(self.harmonics, task.harmonics)
        self.weights = np.array([a.weight for a in task.assignments])
        self.evaluations = 0

    def _reduce(self, points: np.ndarray) -> np.ndarray:
        return reduced_weights(self.geometry, points, self.mode)

    def evaluate(self, vectors: np.ndarray) -> np.ndarray:
        """
        Avalia um lote de vetores de decisão.

        Args:
            vectors: bits (S, D·L)

        Returns:
            np.ndarray: aptidão de cada vetor (S,)
        """
        vectors = np.atleast_2d(np.asarray(vectors))
        batch = vectors.shape[0]
        reflection = 1.0 - 2.0 * vectors.reshape(batch, self.dims, self.geometry.code_length).astype(float)
        spectra = reflection @ self.coefficients
        total = np.sum(spectra.conj() * (self.gram @ spectra), axis=(1, 2)).real
        fields = np.einsum("td,sdt->st", self.target_rows, spectra[:, :, self.target_columns])
        captured = (np.abs(fields) ** 2) @ self.weights
        self.evaluations += batch
        with np.errstate(divide="ignore", invalid="ignore"):
            fitness = np.where(total > 0, captured / np.where(total > 0, total, 1.0), 0.0)
        return fitness

    def __call__(self, vector: np.ndarray) -> float:
        return float(self.evaluate(vector)[0])

