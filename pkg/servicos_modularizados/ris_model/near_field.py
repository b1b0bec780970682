"""
Padrão de campo próximo da RIS modulada no tempo.

Os pesos de Green seguem o modelo de difração de campo próximo e o padrão
de cada harmônico é a superposição das contribuições de todos os elementos.
"""

from typing import Sequence, Tuple

import numpy as np

from .geometry import (
    FieldGrid,
    HarmonicPattern,
    KRange,
    RisGeometry,
    RisModelError,
    StcCoding,
    harmonic_orders,
)
from .harmonics import element_spectra, harmonic_coefficients

CHUNK_POINTS = 512

ORDER_ELEMENT = "element"
ORDER_SLOT = "slot"


def _weights_from_offsets(offsets: np.ndarray, z: np.ndarray, geometry: RisGeometry) -> np.ndarray:
    r = np.linalg.norm(offsets, axis=-1)
    if np.any(r == 0):
        raise RisModelError("Ponto de observação coincide com um elemento da RIS (r = 0)")
    k = geometry.wavenumber
    return (z / geometry.wavelength) * (1.0 / (k * r) - 1j) / r**2 * np.exp(1j * k * r)


def greens_weight(geometry: RisGeometry, element: Tuple[int, int], point: Sequence[float]) -> complex:
    """
    Peso de Green de campo próximo entre um elemento e um ponto.

    Args:
        geometry: geometria da RIS
        element: índice (m, n) do elemento
        point: ponto (x, y, z) em metros

    Returns:
        complex: w = (z/λ)·(1/(kr) - j)·(1/r²)·exp(jkr)
    """
    m, n = geometry.check_element(element)
    point = np.asarray(point, dtype=float)
    offset = point - geometry.element_positions()[m, n]
    return complex(_weights_from_offsets(offset[None, :], np.array([point[2]]), geometry)[0])


def greens_weights(geometry: RisGeometry, points: np.ndarray) -> np.ndarray:
    """
    Pesos de Green para vários pontos.

    Args:
        geometry: geometria da RIS
        points: array (P, 3) de pontos

    Returns:
        np.ndarray: pesos (P, M, N)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    offsets = points[:, None, None, :] - geometry.element_positions()[None, :, :, :]
    return _weights_from_offsets(offsets, points[:, 2][:, None, None], geometry)


def pattern_at_points(coding: StcCoding, geometry: RisGeometry, points: np.ndarray,
                      k_range: KRange, order: str = ORDER_ELEMENT) -> np.ndarray:
    """
    Avalia a superposição harmônica em pontos arbitrários.

    Args:
        coding: codificação STC
        geometry: geometria da RIS
        points: array (P, 3) de pontos
        k_range: ordens harmônicas
        order: "element" soma primeiro os elementos com o espectro de cada um;
               "slot" soma primeiro os elementos por fatia e depois as fatias

    Returns:
        np.ndarray: amplitudes complexas (K, P)
    """
    coding.check_geometry(geometry)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    harmonics = harmonic_orders(k_range)
    illumination = geometry.illumination[:, :, None]
    cells = geometry.rows * geometry.cols

    if order == ORDER_ELEMENT:
        weighted = (illumination * element_spectra(coding, harmonics)).reshape(cells, -1)
        coefficients = None
    elif order == ORDER_SLOT:
        weighted = (illumination * coding.reflection).reshape(cells, -1)
        coefficients = harmonic_coefficients(harmonics, coding.code_length)
    else:
        raise RisModelError(f"Ordem de superposição desconhecida: {order}")

    result = np.empty((harmonics.size, points.shape[0]), dtype=complex)
    for start in range(0, points.shape[0], CHUNK_POINTS):
        chunk = points[start:start + CHUNK_POINTS]
        weights = greens_weights(geometry, chunk).reshape(chunk.shape[0], cells)
        partial = weights @ weighted
        if coefficients is not None:
            partial = partial @ coefficients
        result[:, start:start + chunk.shape[0]] = partial.T
    return result


def near_field_pattern(coding: StcCoding, geometry: RisGeometry, grid: FieldGrid,
                       k_range: KRange, order: str = ORDER_ELEMENT) -> HarmonicPattern:
    """
    Calcula o padrão harmônico de campo próximo sobre uma grade.

    Args:
        coding: codificação STC
        geometry: geometria da RIS
        grid: grade de observação
        k_range: ordens harmônicas (contíguas)
        order: ordem de superposição ("element" ou "slot")

    Returns:
        HarmonicPattern: amplitudes complexas por harmônico e ponto
    """
    if grid.size == 0:
        raise RisModelError("Grade vazia")
    harmonics = harmonic_orders(k_range)
    values = pattern_at_points(coding, geometry, grid.points(), harmonics, order=order)
    return HarmonicPattern(
        grid=grid,
        harmonics=tuple(int(k) for k in harmonics),
        values=values,
        carrier_hz=geometry.carrier_hz,
        mod_freq_hz=geometry.mod_freq_hz,
    )
