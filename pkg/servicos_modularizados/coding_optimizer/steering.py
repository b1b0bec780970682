"""
Codificações em forma fechada.

Um deslocamento cíclico de s fatias multiplica o harmônico k da sequência
base por exp(-j2πks/L); escolhendo s por coluna (ou linha, ou elemento)
as contribuições chegam em fase ao alvo.

Para vários feixes cada fatia recebe o sinal da correlação casada com os
pesos de Green de todos os alvos. Como Γ é real, o espectro satisfaz
S_{-k} = conj(S_k): os feixes ±k compartilham os mesmos graus de liberdade
e a correlação soma os dois termos sobre o mesmo coeficiente.
"""

from typing import List, Optional, Sequence

import numpy as np

from geral.module_interfaces import CodingSynthesisInterface
from servicos_modularizados.ris_model import RisGeometry, StcCoding, harmonic_coefficients

from .fitness import reduced_weights
from .tasks import MODE_COLUMN, BeamTask, CodingError, OptResult, decode_bits

MATCH_REFINEMENTS = 20


def square_sequence(code_length: int) -> np.ndarray:
    """Sequência base de meio período (metade 0, metade 1)."""
    bits = np.zeros(code_length, dtype=np.uint8)
    bits[(code_length + 1) // 2:] = 1
    return bits


def phase_delay_coding(geometry: RisGeometry, target: Sequence[float], harmonic: int,
                       mode: str = MODE_COLUMN, base: Optional[Sequence[int]] = None) -> StcCoding:
    """
    Gera a codificação que focaliza um harmônico num ponto.

    Args:
        geometry: geometria da RIS
        target: ponto (x, y, z) em metros
        harmonic: ordem harmônica (diferente de zero)
        mode: modo de simetria
        base: sequência base de L bits (padrão: meio período)

    Returns:
        StcCoding: codificação com deslocamentos cíclicos por sequência
    """
    if harmonic == 0:
        raise CodingError("O harmônico zero não pode ser direcionado por atraso de tempo")
    L = geometry.code_length
    base = square_sequence(L) if base is None else np.asarray(base, dtype=np.uint8)
    if base.shape != (L,):
        raise CodingError(f"A sequência base deve ter {L} bits")

    weights = reduced_weights(geometry, np.asarray(target, dtype=float)[None, :], mode)[0]
    shifts = np.mod(np.rint(L * np.angle(weights) / (2.0 * np.pi * harmonic)), L).astype(int)
    sequences = np.stack([np.roll(base, s) for s in shifts])
    return decode_bits(sequences.reshape(-1), geometry, mode)


def matched_multibeam_coding(task: BeamTask, geometry: RisGeometry, mode: str = MODE_COLUMN,
                             refinements: int = MATCH_REFINEMENTS) -> StcCoding:
    """
    Codificação de vários feixes pelo sinal da correlação casada.

    Com fases de referência θ_t fixas, escolher Γ = sinal da correlação em
    cada fatia maximiza Σ_t a_t·Re(e^{-jθ_t}·G_{k_t}(p_t)). As fases são
    então trocadas pelas dos campos obtidos, o que não diminui Σ_t a_t·|G_{k_t}(p_t)|,
    e o processo se repete até a codificação parar de mudar.

    Args:
        task: harmônicos e alvos (a_t ∝ √peso, normalizado pela norma dos pesos de Green)
        geometry: geometria da RIS
        mode: modo de simetria
        refinements: máximo de reajustes das fases de referência

    Returns:
        StcCoding: codificação que respeita a simetria do modo
    """
    if len(task) == 0:
        raise CodingError("Tarefa de feixes vazia")
    targets = np.array([a.target for a in task.assignments], dtype=float)
    weights = reduced_weights(geometry, targets, mode)
    norms = np.linalg.norm(weights, axis=1)
    if np.any(norms == 0):
        raise CodingError("Alvo sem contribuição da superfície")
    scale = np.sqrt([a.weight for a in task.assignments]) / norms
    coefficients = harmonic_coefficients(task.harmonics, geometry.code_length)

    reference = np.ones(len(task), dtype=complex)
    reflection = None
    for _ in range(max(1, refinements)):
        score = ((weights * (scale * reference.conj())[:, None]).T @ coefficients.T).real
        updated = np.where(score >= 0, 1.0, -1.0)
        if reflection is not None and np.array_equal(updated, reflection):
            break
        reflection = updated
        fields = np.einsum("td,dl,lt->t", weights, reflection, coefficients)
        reference = np.exp(1j * np.angle(fields))

    bits = (reflection < 0).astype(np.uint8)
    return decode_bits(bits.reshape(-1), geometry, mode)


def steering_codings(task: BeamTask, geometry: RisGeometry, mode: str = MODE_COLUMN) -> List[StcCoding]:
    """Codificação casada da tarefa seguida da codificação por atraso de cada feixe não nulo."""
    codings = [matched_multibeam_coding(task, geometry, mode)]
    codings.extend(phase_delay_coding(geometry, a.target, a.harmonic, mode)
                   for a in task.assignments if a.harmonic != 0)
    return codings


class PhaseDelaySynthesizer(CodingSynthesisInterface):
    """
    Gerador em forma fechada.

    Um feixe usa o atraso cíclico; vários feixes usam a correlação casada.
    """

    name = "atraso_de_fase"

    def __init__(self, geometry: RisGeometry, mode: str):
        self.geometry = geometry
        self.mode = mode

    def synthesize(self, task: BeamTask) -> OptResult:
        if len(task) == 0:
            raise CodingError("Tarefa de feixes vazia")
        if len(task) == 1 and task.assignments[0].harmonic != 0:
            assignment = task.assignments[0]
            coding = phase_delay_coding(self.geometry, assignment.target, assignment.harmonic, self.mode)
        else:
            coding = matched_multibeam_coding(task, self.geometry, self.mode)
        return OptResult(best_coding=coding, best_fitness=float("nan"), mode=self.mode)
