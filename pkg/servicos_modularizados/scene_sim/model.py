"""
Tipos da cena simulada: pessoas, refletores estáticos, transeunte e o
conjunto de ecos recebidos.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

RESP_BAND_HZ = (0.1, 0.7)
HEART_BAND_HZ = (0.8, 2.5)
DEFAULT_RX_POSITION = (0.3, 0.0, 0.0)


class SceneError(ValueError):
    """Erro de domínio da simulação de cena."""


def _point(value: Sequence[float], label: str) -> Tuple[float, float, float]:
    point = tuple(float(v) for v in value)
    if len(point) != 3 or not np.all(np.isfinite(point)):
        raise SceneError(f"{label}: posição deve ter três coordenadas finitas")
    return point


@dataclass(frozen=True)
class Person:
    """Pessoa com respiração e batimentos cardíacos senoidais no peito."""

    position: Tuple[float, float, float]
    resp_hz: float = 0.25
    heart_hz: float = 1.35
    resp_amp_m: float = 5e-3
    heart_amp_m: float = 5e-4
    reflectivity: complex = 1.0 + 0.0j
    breath_holds: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "position", _point(self.position, "Pessoa"))
        if not RESP_BAND_HZ[0] <= self.resp_hz <= RESP_BAND_HZ[1]:
            raise SceneError(f"Frequência respiratória {self.resp_hz} Hz fora de {RESP_BAND_HZ}")
        if not HEART_BAND_HZ[0] <= self.heart_hz <= HEART_BAND_HZ[1]:
            raise SceneError(f"Frequência cardíaca {self.heart_hz} Hz fora de {HEART_BAND_HZ}")
        if not 0 <= self.heart_amp_m < self.resp_amp_m:
            raise SceneError("A amplitude cardíaca deve ser menor que a respiratória")
        if abs(self.reflectivity) == 0:
            raise SceneError("A refletividade da pessoa deve ser diferente de zero")
        holds = tuple((float(a), float(b)) for a, b in self.breath_holds)
        if any(b <= a for a, b in holds):
            raise SceneError("Intervalos de apneia devem ter início < fim")
        object.__setattr__(self, "reflectivity", complex(self.reflectivity))
        object.__setattr__(self, "breath_holds", holds)


@dataclass(frozen=True)
class StaticReflector:
    """Refletor pontual sem movimento (móvel, parede)."""

    position: Tuple[float, float, float]
    reflectivity: complex = 1.0 + 0.0j

    def __post_init__(self):
        object.__setattr__(self, "position", _point(self.position, "Refletor"))
        object.__setattr__(self, "reflectivity", complex(self.reflectivity))


@dataclass(frozen=True)
class Passerby:
    """Transeunte em trajetória retilínea com velocidade constante."""

    start: Tuple[float, float, float]
    velocity: Tuple[float, float, float]
    reflectivity: complex = 1.0 + 0.0j

    def __post_init__(self):
        object.__setattr__(self, "start", _point(self.start, "Transeunte"))
        object.__setattr__(self, "velocity", _point(self.velocity, "Velocidade do transeunte"))
        object.__setattr__(self, "reflectivity", complex(self.reflectivity))

    def position_at(self, t: np.ndarray) -> np.ndarray:
        """Posições (len(t), 3) nos instantes t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.asarray(self.start)[None, :] + t[:, None] * np.asarray(self.velocity)[None, :]

    @classmethod
    def crossing(cls, person: Person, at_time: float, speed: float = 0.5, gap: float = 0.5,
                 reflectivity: complex = 1.0 + 0.0j) -> "Passerby":
        """
        Transeunte que cruza ao longo de x, gap metros à frente da pessoa
        (mais perto da RIS), passando em frente a ela no instante at_time.
        """
        x, y, z = person.position
        if z - gap <= 0:
            raise SceneError("O transeunte ficaria atrás do plano da RIS")
        return cls(start=(x - speed * at_time, y, z - gap), velocity=(speed, 0.0, 0.0),
                   reflectivity=reflectivity)


@dataclass(frozen=True)
class Scene:
    """
    Cena completa.

    noise_db é a potência do ruído relativa à portadora unitária (None
    desliga o ruído); leakage_db é o nível do vazamento RIS→Rx relativo ao
    caminho de referência de uma pessoa a 1 m (None desliga o vazamento).
    """

    persons: Tuple[Person, ...] = ()
    reflectors: Tuple[StaticReflector, ...] = ()
    passerby: Optional[Passerby] = None
    noise_db: Optional[float] = None
    leakage_db: Optional[float] = -20.0
    seed: int = 0
    rx_position: Tuple[float, float, float] = DEFAULT_RX_POSITION

    def __post_init__(self):
        persons = tuple(self.persons)
        positions = [p.position for p in persons]
        if len(set(positions)) != len(positions):
            raise SceneError("Duas pessoas na mesma posição")
        if self.noise_db is not None and not np.isfinite(self.noise_db):
            raise SceneError("A potência do ruído deve ser finita")
        object.__setattr__(self, "persons", persons)
        object.__setattr__(self, "reflectors", tuple(self.reflectors))
        object.__setattr__(self, "rx_position", _point(self.rx_position, "Receptor"))

    @property
    def noise_power(self) -> float:
        return 0.0 if self.noise_db is None else float(10.0 ** (self.noise_db / 10.0))

    def without_person(self, index: int) -> "Scene":
        persons = self.persons[:index] + self.persons[index + 1:]
        return Scene(persons, self.reflectors, self.passerby, self.noise_db, self.leakage_db,
                     self.seed, self.rx_position)


@dataclass(frozen=True, eq=False)
class EchoSet:
    """
    Sinais de banda base recebidos: um fluxo por direção de varredura.

    streams tem formato (D, amostras); start_s guarda o início de cada
    fluxo na linha do tempo da simulação.
    """

    streams: np.ndarray
    fs: float
    duration: float
    carrier_hz: float
    mod_freq_hz: float
    seed: int = 0
    directions: Tuple[int, ...] = (0,)
    start_s: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        streams = np.atleast_2d(np.asarray(self.streams, dtype=complex))
        expected = int(round(self.fs * self.duration))
        if streams.shape[1] != expected:
            raise SceneError(f"Fluxo com {streams.shape[1]} amostras; esperado fs·duração = {expected}")
        if len(self.directions) != streams.shape[0] or len(self.start_s) != streams.shape[0]:
            raise SceneError("Direções e instantes iniciais devem acompanhar os fluxos")
        object.__setattr__(self, "streams", streams)
        object.__setattr__(self, "directions", tuple(int(d) for d in self.directions))
        object.__setattr__(self, "start_s", tuple(float(s) for s in self.start_s))

    @property
    def samples(self) -> int:
        return self.streams.shape[1]

    def times(self, index: int = 0) -> np.ndarray:
        return self.start_s[index] + np.arange(self.samples) / self.fs

    def stream(self, direction: int) -> np.ndarray:
        return self.streams[self.directions.index(direction)]


def chest_displacement(person: Person, t) -> np.ndarray:
    """
    Deslocamento do peito d(t) em metros.

    Args:
        person: pessoa
        t: instante(s) em segundos, t >= 0

    Returns:
        np.ndarray: A_r·sin(2π f_r t)·hold(t) + A_h·sin(2π f_h t)
    """
    t = np.asarray(t, dtype=float)
    hold = np.ones_like(t)
    for start, end in person.breath_holds:
        hold = np.where((t >= start) & (t < end), 0.0, hold)
    return (person.resp_amp_m * np.sin(2.0 * np.pi * person.resp_hz * t) * hold
            + person.heart_amp_m * np.sin(2.0 * np.pi * person.heart_hz * t))


def snr_to_noise_db(snr_db: float, signal_power: float = 1.0) -> float:
    """Nível de ruído (dB relativo à portadora unitária) para uma SNR desejada."""
    return float(10.0 * np.log10(signal_power) - snr_db)
