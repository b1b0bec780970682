"""
Estimativa de frequência respiratória e cardíaca a partir dos sinais
reconstruídos.
"""

from typing import Optional, Tuple

import numpy as np
from scipy import fft, signal

from geral.app_logger import log_warning

from .types import RateEstimate, VitalEstimate, VmdConfig, VmdError

ZERO_PAD_FACTOR = 8
RR_RANGE_RPM = (6.0, 42.0)
HR_RANGE_BPM = (48.0, 150.0)


def _parabolic(values: np.ndarray, index: int) -> float:
    """Deslocamento (em bins) do vértice da parábola pelos três pontos em torno de index."""
    if index <= 0 or index >= values.size - 1:
        return 0.0
    left, center, right = values[index - 1], values[index], values[index + 1]
    denominator = left - 2.0 * center + right
    if denominator == 0:
        return 0.0
    return float(0.5 * (left - right) / denominator)


def estimate_rate(series, fs: float, band: Tuple[float, float], window_s: float,
                  min_ratio_db: float = 3.0) -> RateEstimate:
    """
    Frequência do pico espectral da faixa, em ciclos por minuto.

    Usa os últimos window_s segundos com janela de Hann e refina o bin de
    pico por interpolação quadrática.

    Args:
        series: série real
        fs: taxa de amostragem em Hz
        band: faixa de busca (Hz)
        window_s: janela de análise em segundos
        min_ratio_db: razão mínima entre o pico e a mediana da faixa

    Returns:
        RateEstimate: taxa, frequência e magnitude do pico; valid = False sem pico proeminente
    """
    series = np.asarray(series, dtype=float).reshape(-1)
    n = int(round(window_s * fs))
    if n < 4 or series.size < n:
        raise VmdError(f"Série de {series.size / fs:.1f} s menor que a janela de {window_s} s")
    segment = series[-n:] - series[-n:].mean()
    nfft = fft.next_fast_len(ZERO_PAD_FACTOR * n)
    magnitude = np.abs(fft.rfft(segment * signal.windows.hann(n, sym=False), nfft))
    freqs = fft.rfftfreq(nfft, d=1.0 / fs)

    lo, hi = band
    in_band = np.flatnonzero((freqs >= lo) & (freqs <= hi))
    if in_band.size == 0:
        raise VmdError(f"Faixa {band} fora da grade espectral")
    peak = int(in_band[np.argmax(magnitude[in_band])])
    offset = _parabolic(magnitude, peak)
    peak_hz = float(freqs[peak] + offset * (freqs[1] - freqs[0]))

    power = magnitude[in_band] ** 2
    median = np.median(power)
    valid = bool(power.max() > 0 and (median == 0 or 10 * np.log10(power.max() / median) >= min_ratio_db))
    return RateEstimate(60.0 * peak_hz, peak_hz, float(magnitude[peak]), valid)


def estimate_vitals(s_r, s_h, fs: float, window_s: Optional[float] = None,
                    config: Optional[VmdConfig] = None) -> VitalEstimate:
    """
    Estima RR e HR numa janela e sinaliza apneia.

    A respiração é marcada inválida quando o RMS de s_r na janela fica
    abaixo de hold_ratio_db do RMS do registro inteiro, ou quando não há
    pico proeminente na faixa.

    Args:
        s_r: sinal respiratório
        s_h: sinal cardíaco
        fs: taxa de amostragem em Hz
        window_s: janela de análise (padrão: registro inteiro)
        config: configuração (faixas e limiares)

    Returns:
        VitalEstimate: RR (RPM), HR (BPM) e validade de cada uma
    """
    config = config or VmdConfig()
    s_r = np.asarray(s_r, dtype=float).reshape(-1)
    s_h = np.asarray(s_h, dtype=float).reshape(-1)
    window_s = s_r.size / fs if window_s is None else float(window_s)

    rr = estimate_rate(s_r, fs, config.resp_band, window_s, config.peak_ratio_db)
    hr = estimate_rate(s_h, fs, config.heart_band, window_s, config.peak_ratio_db)

    n = int(round(window_s * fs))
    full_rms = np.sqrt(np.mean(s_r ** 2))
    window_rms = np.sqrt(np.mean(s_r[-n:] ** 2))
    breath_hold = bool(full_rms > 0 and (window_rms == 0
                                         or 20 * np.log10(window_rms / full_rms) < config.hold_ratio_db))
    if breath_hold:
        log_warning(f"Apneia detectada na janela de {window_s:.0f} s")

    rr_valid = rr.valid and not breath_hold and RR_RANGE_RPM[0] <= rr.rate_per_min <= RR_RANGE_RPM[1]
    hr_valid = hr.valid and HR_RANGE_BPM[0] <= hr.rate_per_min <= HR_RANGE_BPM[1]
    return VitalEstimate(
        rr_rpm=rr.rate_per_min,
        hr_bpm=hr.rate_per_min,
        rr_valid=bool(rr_valid),
        hr_valid=bool(hr_valid),
        rr_peak=rr.magnitude,
        hr_peak=hr.magnitude,
        window_s=window_s,
        breath_hold=breath_hold,
    )
