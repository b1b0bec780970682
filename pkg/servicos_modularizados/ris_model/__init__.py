"""
Modelo da metassuperfície com codificação espaço-temporal (STC).

Coeficientes harmônicos, pesos de Green de campo próximo e o padrão
harmônico superposto sobre uma grade de observação.
"""

from .geometry import (
    DEFAULT_K_RANGE,
    SPEED_OF_LIGHT,
    FieldGrid,
    HarmonicPattern,
    RisGeometry,
    RisModelError,
    StcCoding,
    harmonic_orders,
    spherical_illumination,
)
from .harmonics import (
    element_spectra,
    element_spectrum,
    element_spectrum_dft,
    harmonic_coefficient,
    harmonic_coefficients,
    spectral_power,
    waveform_spectrum_dft,
)
from .near_field import greens_weight, greens_weights, near_field_pattern, pattern_at_points
from .pattern_io import export_pattern, pattern_file_name, pattern_table

__all__ = [
    "DEFAULT_K_RANGE",
    "SPEED_OF_LIGHT",
    "FieldGrid",
    "HarmonicPattern",
    "RisGeometry",
    "RisModelError",
    "StcCoding",
    "harmonic_orders",
    "spherical_illumination",
    "element_spectra",
    "element_spectrum",
    "element_spectrum_dft",
    "harmonic_coefficient",
    "harmonic_coefficients",
    "spectral_power",
    "waveform_spectrum_dft",
    "greens_weight",
    "greens_weights",
    "near_field_pattern",
    "pattern_at_points",
    "export_pattern",
    "pattern_file_name",
    "pattern_table",
]
