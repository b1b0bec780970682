"""
Tipos de domínio do modelo da metassuperfície STC.

Define a geometria da RIS, a codificação espaço-temporal binária, a grade
de campo próximo e o padrão harmônico resultante.
"""

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

SPEED_OF_LIGHT = 299792458.0

DEFAULT_K_RANGE = range(-10, 11)

KRange = Union[int, range, Sequence[int]]


class RisModelError(ValueError):
    """Erro de domínio do modelo da metassuperfície."""


def harmonic_orders(k_range: KRange) -> np.ndarray:
    """
    Normaliza uma faixa de ordens harmônicas.

    Args:
        k_range: inteiro K (ordens -K..K), objeto range ou sequência de inteiros

    Returns:
        np.ndarray: ordens harmônicas como inteiros
    """
    if isinstance(k_range, (int, np.integer)):
        if k_range < 0:
            raise RisModelError("Faixa harmônica simétrica exige K >= 0")
        return np.arange(-int(k_range), int(k_range) + 1)
    orders = np.asarray(list(k_range), dtype=int)
    if orders.ndim != 1 or orders.size == 0:
        raise RisModelError("Faixa harmônica vazia")
    return orders


@dataclass(frozen=True)
class RisGeometry:
    """
    Geometria da RIS e parâmetros da modulação temporal.

    Os elementos ficam centrados na origem, no plano z = 0; a linha m
    varia ao longo de y e a coluna n ao longo de x.
    """

    rows: int = 32
    cols: int = 32
    carrier_hz: float = 3.5e9
    period_s: float = 0.01
    code_length: int = 21
    dx: Optional[float] = None
    dy: Optional[float] = None
    amplitude: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    phase: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.code_length < 1:
            raise RisModelError("M, N e L devem ser >= 1")
        if self.carrier_hz <= 0 or self.period_s <= 0:
            raise RisModelError("Frequência da portadora e período devem ser positivos")
        if self.mod_freq_hz >= self.carrier_hz / 100.0:
            raise RisModelError("A frequência de modulação deve ser << portadora (f0 < fc/100)")

        half_wavelength = self.wavelength / 2.0
        object.__setattr__(self, "dx", float(self.dx) if self.dx is not None else half_wavelength)
        object.__setattr__(self, "dy", float(self.dy) if self.dy is not None else half_wavelength)
        if self.dx <= 0 or self.dy <= 0:
            raise RisModelError("O passo dos elementos deve ser positivo")

        shape = (self.rows, self.cols)
        amplitude = np.ones(shape) if self.amplitude is None else np.asarray(self.amplitude, dtype=float)
        phase = np.zeros(shape) if self.phase is None else np.asarray(self.phase, dtype=float)
        if amplitude.shape != shape or phase.shape != shape:
            raise RisModelError(f"Iluminação deve ter formato {shape}")
        amplitude = amplitude.copy()
        phase = phase.copy()
        amplitude.setflags(write=False)
        phase.setflags(write=False)
        object.__setattr__(self, "amplitude", amplitude)
        object.__setattr__(self, "phase", phase)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def mod_freq_hz(self) -> float:
        return 1.0 / self.period_s

    @property
    def slot_s(self) -> float:
        """Largura do pulso de cada fatia temporal (T0 / L)."""
        return self.period_s / self.code_length

    @property
    def illumination(self) -> np.ndarray:
        """Excitação complexa A·exp(jφ) de cada elemento (M × N)."""
        return self.amplitude * np.exp(1j * self.phase)

    def element_positions(self) -> np.ndarray:
        """
        Posições dos elementos.

        Returns:
            np.ndarray: array (M, N, 3) com as coordenadas em metros
        """
        x = (np.arange(self.cols) - (self.cols - 1) / 2.0) * self.dx
        y = (np.arange(self.rows) - (self.rows - 1) / 2.0) * self.dy
        xx, yy = np.meshgrid(x, y)
        return np.stack([xx, yy, np.zeros_like(xx)], axis=-1)

    def check_element(self, element: Tuple[int, int]) -> Tuple[int, int]:
        m, n = element
        if not (0 <= m < self.rows and 0 <= n < self.cols):
            raise RisModelError(f"Elemento {element} fora da RIS {self.rows}x{self.cols}")
        return int(m), int(n)

    def with_illumination(self, amplitude, phase) -> "RisGeometry":
        return replace(self, amplitude=amplitude, phase=phase)


def spherical_illumination(geometry: RisGeometry, tx_position: Sequence[float]) -> RisGeometry:
    """
    Iluminação por onda esférica a partir de uma antena pontual.

    Args:
        geometry: geometria de referência
        tx_position: posição (x, y, z) do transmissor em metros

    Returns:
        RisGeometry: cópia com amplitude normalizada (máximo 1) e fase k·r
    """
    tx = np.asarray(tx_position, dtype=float)
    r = np.linalg.norm(geometry.element_positions() - tx, axis=-1)
    if np.any(r == 0):
        raise RisModelError("Transmissor coincide com um elemento da RIS")
    amplitude = r.min() / r
    phase = np.mod(geometry.wavenumber * r, 2.0 * np.pi)
    return geometry.with_illumination(amplitude, phase)


@dataclass(frozen=True, eq=False)
class StcCoding:
    """
    Tensor binário de codificação espaço-temporal (M × N × L).

    O bit 0 corresponde a Γ = +1 (fase 0°) e o bit 1 a Γ = -1 (fase 180°).
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 3:
            raise RisModelError("A codificação deve ser um tensor 3-D (M, N, L)")
        if not np.all((bits == 0) | (bits == 1)):
            raise RisModelError("A codificação aceita apenas bits 0/1")
        bits = bits.astype(np.uint8).copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return tuple(self.bits.shape)

    @property
    def code_length(self) -> int:
        return self.bits.shape[2]

    @property
    def reflection(self) -> np.ndarray:
        """Coeficientes de reflexão ±1 de cada fatia."""
        return 1.0 - 2.0 * self.bits.astype(float)

    def check_geometry(self, geometry: RisGeometry) -> None:
        expected = (geometry.rows, geometry.cols, geometry.code_length)
        if self.shape != expected:
            raise RisModelError(f"Codificação {self.shape} incompatível com a RIS {expected}")

    def equals(self, other: "StcCoding") -> bool:
        return isinstance(other, StcCoding) and np.array_equal(self.bits, other.bits)

    @classmethod
    def constant(cls, rows: int, cols: int, code_length: int, bit: int = 0) -> "StcCoding":
        return cls(np.full((rows, cols, code_length), bit, dtype=np.uint8))

    @classmethod
    def random(cls, rows: int, cols: int, code_length: int, rng: np.random.Generator) -> "StcCoding":
        return cls(rng.integers(0, 2, size=(rows, cols, code_length), dtype=np.uint8))

    @classmethod
    def from_columns(cls, column_bits, rows: int) -> "StcCoding":
        """Replica uma sequência por coluna (N × L) em todas as linhas."""
        column_bits = np.asarray(column_bits)
        return cls(np.broadcast_to(column_bits[None, :, :], (rows,) + column_bits.shape))

    @classmethod
    def from_rows(cls, row_bits, cols: int) -> "StcCoding":
        """Replica uma sequência por linha (M × L) em todas as colunas."""
        row_bits = np.asarray(row_bits)
        return cls(np.broadcast_to(row_bits[:, None, :], (row_bits.shape[0], cols, row_bits.shape[1])))


@dataclass(frozen=True)
class FieldGrid:
    """
    Grade plana de pontos de observação à distância z da RIS.

    O índice i percorre x e o índice j percorre y; os pontos são
    enumerados com i variando mais rápido.
    """

    z: float = 1.0
    x_extent: Tuple[float, float] = (-2.0, 2.0)
    y_extent: Tuple[float, float] = (-1.0, 1.0)
    resolution: Tuple[int, int] = (64, 64)

    def __post_init__(self):
        if self.z <= 0:
            raise RisModelError("A grade deve estar em z > 0")
        nx, ny = self.resolution
        if nx < 1 or ny < 1:
            raise RisModelError("Resolução da grade deve ser >= 1 em cada eixo")
        if self.x_extent[0] > self.x_extent[1] or self.y_extent[0] > self.y_extent[1]:
            raise RisModelError("Extensões da grade devem estar ordenadas")
        object.__setattr__(self, "x_extent", tuple(float(v) for v in self.x_extent))
        object.__setattr__(self, "y_extent", tuple(float(v) for v in self.y_extent))
        object.__setattr__(self, "resolution", (int(nx), int(ny)))

    @property
    def shape(self) -> Tuple[int, int]:
        """Formato (ny, nx) dos mapas de campo."""
        nx, ny = self.resolution
        return ny, nx

    @property
    def size(self) -> int:
        nx, ny = self.resolution
        return nx * ny

    @property
    def x_values(self) -> np.ndarray:
        return np.linspace(self.x_extent[0], self.x_extent[1], self.resolution[0])

    @property
    def y_values(self) -> np.ndarray:
        return np.linspace(self.y_extent[0], self.y_extent[1], self.resolution[1])

    @property
    def cell_size(self) -> Tuple[float, float]:
        nx, ny = self.resolution
        cx = (self.x_extent[1] - self.x_extent[0]) / (nx - 1) if nx > 1 else 0.0
        cy = (self.y_extent[1] - self.y_extent[0]) / (ny - 1) if ny > 1 else 0.0
        return cx, cy

    def points(self) -> np.ndarray:
        """Pontos (P, 3) da grade."""
        xx, yy = np.meshgrid(self.x_values, self.y_values)
        return np.stack([xx.ravel(), yy.ravel(), np.full(xx.size, self.z)], axis=-1)

    def point(self, i: int, j: int) -> np.ndarray:
        return np.array([self.x_values[i], self.y_values[j], self.z])

    def nearest_index(self, point: Sequence[float]) -> int:
        """Índice plano do ponto da grade mais próximo (lateralmente)."""
        i = int(np.argmin(np.abs(self.x_values - point[0])))
        j = int(np.argmin(np.abs(self.y_values - point[1])))
        return j * self.resolution[0] + i

    def contains(self, point: Sequence[float], tolerance: float = 1e-9) -> bool:
        """True se o ponto está lateralmente dentro da extensão da grade."""
        x, y = point[0], point[1]
        return (self.x_extent[0] - tolerance <= x <= self.x_extent[1] + tolerance
                and self.y_extent[0] - tolerance <= y <= self.y_extent[1] + tolerance)

    def cell_distance(self, point_a: Iterable[float], point_b: Iterable[float]) -> float:
        """Distância entre dois pontos medida em células (norma infinito)."""
        cx, cy = self.cell_size
        a = np.asarray(list(point_a), dtype=float)
        b = np.asarray(list(point_b), dtype=float)
        dx = abs(a[0] - b[0]) / cx if cx > 0 else 0.0
        dy = abs(a[1] - b[1]) / cy if cy > 0 else 0.0
        return max(dx, dy)

    @staticmethod
    def layout_point(x: float, range_m: float, height_m: float) -> np.ndarray:
        """Converte coordenadas de layout (x, alcance, altura) para o referencial interno (x, y, z)."""
        return np.array([x, height_m, range_m], dtype=float)


@dataclass(frozen=True, eq=False)
class HarmonicPattern:
    """Amplitude complexa do campo próximo por ordem harmônica."""

    grid: FieldGrid
    harmonics: Tuple[int, ...]
    values: np.ndarray
    carrier_hz: float
    mod_freq_hz: float

    def __post_init__(self):
        harmonics = tuple(int(k) for k in self.harmonics)
        if len(harmonics) > 1 and np.any(np.diff(harmonics) != 1):
            raise RisModelError("As ordens harmônicas armazenadas devem ser contíguas")
        values = np.asarray(self.values)
        if values.shape != (len(harmonics), self.grid.size):
            raise RisModelError("Valores do padrão não correspondem à grade")
        object.__setattr__(self, "harmonics", harmonics)
        object.__setattr__(self, "values", values)

    def _row(self, k: int) -> int:
        if k not in self.harmonics:
            raise RisModelError(f"Harmônico {k} fora da faixa armazenada")
        return self.harmonics.index(k)

    def frequency(self, k: int) -> float:
        return self.carrier_hz + k * self.mod_freq_hz

    def field(self, k: int) -> np.ndarray:
        """Mapa (ny, nx) complexo do harmônico k."""
        return self.values[self._row(k)].reshape(self.grid.shape)

    def power(self, k: int) -> np.ndarray:
        return np.abs(self.values[self._row(k)]) ** 2

    def peak_point(self, k: int) -> np.ndarray:
        index = int(np.argmax(self.power(k)))
        return self.grid.points()[index]
