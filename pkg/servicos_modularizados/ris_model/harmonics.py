"""
Coeficientes harmônicos da modulação temporal periódica.

Convenção: síntese Γ(t) = Σ_k c_k·exp(+j2πk f0 t), análise com exp(-j2πk f0 t).
Nessa convenção o coeficiente do pulso da fatia l é
(1/L)·exp(j(1-2l)kπ/L)·Sa(kπ/L); o expoente coincide com o da forma
impressa, mas o fator 1/(2L) e o argumento kπ/(2L) impressos não
conservam a energia de um espelho estático (coeficiente DC = 1/2).
"""

from typing import Sequence, Tuple

import numpy as np

from .geometry import KRange, RisModelError, StcCoding, harmonic_orders


def harmonic_coefficient(k: int, l: int, L: int) -> complex:
    """
    Coeficiente de Fourier de ordem k do pulso unitário da fatia l.

    Args:
        k: ordem harmônica
        l: índice da fatia, 1 <= l <= L
        L: comprimento do código

    Returns:
        complex: coeficiente C_{k,l}
    """
    if L < 1 or not 1 <= l <= L:
        raise RisModelError(f"Fatia l={l} fora de 1..{L}")
    return complex(np.sinc(k / L) / L * np.exp(1j * np.pi * k * (1 - 2 * l) / L))


def harmonic_coefficients(k_range: KRange, L: int) -> np.ndarray:
    """
    Matriz de coeficientes C (L × K) para todas as fatias e ordens.

    Args:
        k_range: ordens harmônicas
        L: comprimento do código

    Returns:
        np.ndarray: C[l-1, idx_k]
    """
    if L < 1:
        raise RisModelError("O comprimento do código deve ser >= 1")
    k = harmonic_orders(k_range).astype(float)
    l = np.arange(1, L + 1, dtype=float)[:, None]
    return np.sinc(k / L)[None, :] / L * np.exp(1j * np.pi * k[None, :] * (1 - 2 * l) / L)


def element_spectra(coding: StcCoding, k_range: KRange) -> np.ndarray:
    """Espectro de todos os elementos, formato (M, N, K)."""
    return coding.reflection @ harmonic_coefficients(k_range, coding.code_length)


def element_spectrum(coding: StcCoding, element: Tuple[int, int], k_range: KRange) -> np.ndarray:
    """
    Espectro harmônico do coeficiente de reflexão de um elemento.

    Args:
        coding: codificação STC
        element: índice (m, n)
        k_range: ordens harmônicas

    Returns:
        np.ndarray: Σ_l Γ^l·C_{k,l} para cada k
    """
    m, n = element
    rows, cols, L = coding.shape
    if not (0 <= m < rows and 0 <= n < cols):
        raise RisModelError(f"Elemento {element} fora da codificação {rows}x{cols}")
    return coding.reflection[m, n] @ harmonic_coefficients(k_range, L)


def waveform_spectrum_dft(levels: Sequence[float], samples_per_period: int, k_range: KRange) -> np.ndarray:
    """
    Coeficientes de Fourier de uma forma de onda por fatias, via DFT.

    A forma de onda é amostrada uma vez por período; a DFT é corrigida pela
    resposta do retentor de ordem zero (exp(-jπk/Ns)·Sa(πk/Ns)), o que torna
    o resultado exato quando as fronteiras das fatias caem na grade.

    Args:
        levels: valor de cada fatia (L valores)
        samples_per_period: número de amostras Ns por período
        k_range: ordens harmônicas

    Returns:
        np.ndarray: coeficientes para cada k
    """
    levels = np.asarray(levels, dtype=complex)
    L = levels.size
    k = harmonic_orders(k_range)
    if samples_per_period % L != 0:
        raise RisModelError("Amostras por período devem ser múltiplo de L (fronteiras alinhadas)")
    if samples_per_period < 8 * int(np.max(np.abs(k))):
        raise RisModelError("Amostras por período devem ser >= 8·max|k|")

    waveform = np.repeat(levels, samples_per_period // L)
    bins = np.fft.fft(waveform) / samples_per_period
    hold = np.exp(-1j * np.pi * k / samples_per_period) * np.sinc(k / samples_per_period)
    return bins[np.mod(k, samples_per_period)] * hold


def element_spectrum_dft(coding: StcCoding, element: Tuple[int, int], samples_per_period: int,
                         k_range: KRange) -> np.ndarray:
    """
    Oráculo numérico do espectro de um elemento.

    Args:
        coding: codificação STC
        element: índice (m, n)
        samples_per_period: amostras por período
        k_range: ordens harmônicas

    Returns:
        np.ndarray: bins k·f0, normalizados para que uma onda constante valha 1 em k = 0
    """
    m, n = element
    return waveform_spectrum_dft(coding.reflection[m, n], samples_per_period, k_range)


def spectral_power(coding: StcCoding, element: Tuple[int, int], k_max: int) -> float:
    """Soma de Parseval truncada Σ_{|k|<=k_max} |S(k)|² de um elemento."""
    spectrum = element_spectrum(coding, element, k_max)
    return float(np.sum(np.abs(spectrum) ** 2))
