"""
Geração dos sinais recebidos através do canal harmônico da RIS.

x(t) = Σ_k e^{j2πk f0 t}·[h_k + Σ_alvos G_k(p)·Γ·g_rx(p)·e^{j4πd(t)/λ} / a_ref] + n(t)

h_k é o vazamento direto RIS→Rx; g_rx = e^{jkr}/r é a propagação do alvo
ao receptor; a_ref normaliza para que uma pessoa a 1 m no eixo, com a RIS
como espelho estático, tenha amplitude unitária.
"""

from typing import Optional, Sequence

import numpy as np

from geral.app_logger import log_debug
from servicos_modularizados.ris_model import (
    FieldGrid,
    RisGeometry,
    StcCoding,
    element_spectra,
    harmonic_orders,
    pattern_at_points,
)

from .model import EchoSet, Scene, SceneError, chest_displacement

DEFAULT_SIM_HARMONICS = 5
NYQUIST_MARGIN_HZ = 10.0
PASSERBY_CHUNK = 2048


def rx_gain(geometry: RisGeometry, points: np.ndarray, rx_position: Sequence[float]) -> np.ndarray:
    """Fator de espaço livre e^{jkr}/r do alvo ao receptor."""
    r = np.linalg.norm(np.atleast_2d(points) - np.asarray(rx_position, dtype=float)[None, :], axis=-1)
    if np.any(r == 0):
        raise SceneError("Alvo coincide com o receptor")
    return np.exp(1j * geometry.wavenumber * r) / r


def reference_path_gain(geometry: RisGeometry, rx_position: Sequence[float] = (0.3, 0.0, 0.0)) -> float:
    """
    Amplitude do caminho de referência: pessoa a 1 m no eixo, RIS como espelho estático.

    Args:
        geometry: geometria da RIS
        rx_position: posição do receptor

    Returns:
        float: |G_0(0, 0, 1)·g_rx| com codificação constante
    """
    mirror = StcCoding.constant(geometry.rows, geometry.cols, geometry.code_length)
    point = np.array([[0.0, 0.0, 1.0]])
    field = pattern_at_points(mirror, geometry, point, [0])[0, 0]
    return float(abs(field * rx_gain(geometry, point, rx_position)[0]))


def leakage_coefficients(coding: StcCoding, geometry: RisGeometry, harmonics: np.ndarray,
                         leakage_db: Optional[float]) -> np.ndarray:
    """Vazamento h_k: média dos espectros dos elementos, escalada pelo nível configurado."""
    if leakage_db is None:
        return np.zeros(harmonics.size, dtype=complex)
    spectra = geometry.illumination[:, :, None] * element_spectra(coding, harmonics)
    level = 10.0 ** (leakage_db / 20.0)
    return level * spectra.mean(axis=(0, 1)) / geometry.amplitude.mean()


def _check_target(point, grid: FieldGrid, label: str):
    if point[2] <= 0:
        raise SceneError(f"{label} em {point} fora do semiespaço à frente da RIS")
    if not grid.contains(point):
        raise SceneError(f"{label} em {point} fora da extensão da grade avaliada")


def simulate_received(scene: Scene, coding: StcCoding, geometry: RisGeometry, duration: float, fs: float,
                      grid: Optional[FieldGrid] = None, harmonics: int = DEFAULT_SIM_HARMONICS,
                      start_time: float = 0.0, direction: int = 0) -> EchoSet:
    """
    Simula o sinal recebido em banda base.

    Args:
        scene: cena com pessoas, refletores, transeunte e ruído
        coding: codificação STC aplicada durante todo o intervalo
        geometry: geometria da RIS
        duration: duração em segundos
        fs: taxa de amostragem em Hz
        grid: extensão onde o padrão é considerado válido (padrão: FieldGrid())
        harmonics: K das ordens simuladas |k| <= K
        start_time: instante inicial na linha do tempo da cena
        direction: índice da direção (define o subfluxo do ruído)

    Returns:
        EchoSet: um fluxo complexo com fs·duração amostras
    """
    coding.check_geometry(geometry)
    grid = grid or FieldGrid()
    ks = harmonic_orders(harmonics)
    k_max = int(np.max(np.abs(ks)))
    if fs <= 2.0 * (k_max * geometry.mod_freq_hz + NYQUIST_MARGIN_HZ):
        raise SceneError(f"fs = {fs} Hz abaixo do mínimo para |k| <= {k_max}")
    if duration <= 0:
        raise SceneError("A duração deve ser positiva")

    samples = int(round(fs * duration))
    t = start_time + np.arange(samples) / fs
    carriers = np.exp(2j * np.pi * geometry.mod_freq_hz * np.outer(ks, t))
    a_ref = reference_path_gain(geometry, scene.rx_position)
    four_pi_over_lambda = 4.0 * np.pi / geometry.wavelength

    signal = leakage_coefficients(coding, geometry, ks, scene.leakage_db) @ carriers

    for index, reflector in enumerate(scene.reflectors):
        _check_target(reflector.position, grid, f"Refletor {index}")
        point = np.asarray(reflector.position)[None, :]
        gain = pattern_at_points(coding, geometry, point, ks)[:, 0]
        path = reflector.reflectivity * rx_gain(geometry, point, scene.rx_position)[0] / a_ref
        signal = signal + path * (gain @ carriers)

    for index, person in enumerate(scene.persons):
        _check_target(person.position, grid, f"Pessoa {index}")
        point = np.asarray(person.position)[None, :]
        gain = pattern_at_points(coding, geometry, point, ks)[:, 0]
        path = person.reflectivity * rx_gain(geometry, point, scene.rx_position)[0] / a_ref
        motion = np.exp(1j * four_pi_over_lambda * chest_displacement(person, t))
        signal = signal + path * (gain @ carriers) * motion

    if scene.passerby is not None:
        walker = scene.passerby
        contribution = np.empty(samples, dtype=complex)
        for start in range(0, samples, PASSERBY_CHUNK):
            stop = min(start + PASSERBY_CHUNK, samples)
            positions = walker.position_at(t[start:stop])
            if np.any(positions[:, 2] <= 0):
                raise SceneError("O transeunte cruzou o plano da RIS")
            gain = pattern_at_points(coding, geometry, positions, ks)
            harmonic_sum = np.sum(gain * carriers[:, start:stop], axis=0)
            contribution[start:stop] = harmonic_sum * rx_gain(geometry, positions, scene.rx_position)
        signal = signal + walker.reflectivity * contribution / a_ref

    if scene.noise_db is not None:
        rng = np.random.default_rng(np.random.SeedSequence(scene.seed, spawn_key=(direction,)))
        scale = np.sqrt(scene.noise_power / 2.0)
        signal = signal + scale * (rng.standard_normal(samples) + 1j * rng.standard_normal(samples))

    log_debug(f"Eco simulado: direção {direction}, {samples} amostras, {len(scene.persons)} pessoas")
    return EchoSet(
        streams=signal[None, :],
        fs=float(fs),
        duration=float(duration),
        carrier_hz=geometry.carrier_hz,
        mod_freq_hz=geometry.mod_freq_hz,
        seed=scene.seed,
        directions=(direction,),
        start_s=(float(start_time),),
    )


def scan_sequence(scene: Scene, codings: Sequence[StcCoding], geometry: RisGeometry, dwell: float, fs: float,
                  grid: Optional[FieldGrid] = None, harmonics: int = DEFAULT_SIM_HARMONICS,
                  start_time: float = 0.0) -> EchoSet:
    """
    Varre as direções em sequência, uma codificação por direção.

    A direção d ocupa o intervalo [start + d·dwell, start + (d+1)·dwell) e
    usa o subfluxo de ruído d derivado da semente da cena.

    Args:
        scene: cena
        codings: uma codificação por direção
        geometry: geometria da RIS
        dwell: tempo de permanência por direção (s)
        fs: taxa de amostragem (Hz)
        grid: extensão válida do padrão
        harmonics: K das ordens simuladas
        start_time: início da varredura

    Returns:
        EchoSet: um fluxo por direção
    """
    if not codings:
        raise SceneError("Lista de codificações de varredura vazia")
    echoes = [
        simulate_received(scene, coding, geometry, dwell, fs, grid, harmonics,
                          start_time=start_time + d * dwell, direction=d)
        for d, coding in enumerate(codings)
    ]
    return EchoSet(
        streams=np.vstack([e.streams for e in echoes]),
        fs=float(fs),
        duration=float(dwell),
        carrier_hz=geometry.carrier_hz,
        mod_freq_hz=geometry.mod_freq_hz,
        seed=scene.seed,
        directions=tuple(range(len(codings))),
        start_s=tuple(e.start_s[0] for e in echoes),
    )
