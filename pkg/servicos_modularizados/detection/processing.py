"""
Separação dos harmônicos e indicadores de presença humana.
"""

from fractions import Fraction
from typing import Dict, Iterable, Optional

import numpy as np
from scipy import signal

from servicos_modularizados.scene_sim import EchoSet

from .types import BaselineIntensity, DetectionConfig, DetectionError, HarmonicStream

DEGENERATE_CENTER_RATIO = 1e3
FLOOR_FRACTION_OF_FS = 0.25
BURST_RADIUS_TOLERANCE = 0.35
BURST_MAX_FRACTION = 0.2
ARC_SPREAD_LIMIT = 0.45
EDGE_GUARD_S = 1.0


def demux_filter(fs: float, half_bandwidth_hz: float, taps: int = 257) -> np.ndarray:
    """FIR passa-baixas de fase linear (janela de Blackman) usado na separação."""
    return signal.firwin(taps, half_bandwidth_hz, window="blackman", fs=fs)


def demux_harmonics(echo: EchoSet, k_set: Iterable[int], direction: Optional[int] = None,
                    half_bandwidth_hz: Optional[float] = None, taps: int = 257) -> Dict[int, HarmonicStream]:
    """
    Separa os fluxos de cada harmônico por conversão e filtragem passa-baixas.

    A filtragem é centrada (modo "same" de um FIR de ordem par), o que
    compensa o atraso de grupo e mantém os fluxos alinhados no tempo.

    Args:
        echo: ecos recebidos
        k_set: ordens harmônicas a separar
        direction: direção do fluxo (padrão: a primeira)
        half_bandwidth_hz: meia largura de banda (padrão: f0/4)
        taps: número de coeficientes do FIR

    Returns:
        Dict[int, HarmonicStream]: fluxo em banda base por harmônico
    """
    f0 = echo.mod_freq_hz
    half_bandwidth_hz = f0 / 4.0 if half_bandwidth_hz is None else float(half_bandwidth_hz)
    if half_bandwidth_hz > f0 / 2.0:
        raise DetectionError("Meia largura de banda > f0/2: as bandas dos harmônicos se sobrepõem")
    ks = [int(k) for k in k_set]
    if not ks:
        raise DetectionError("Nenhum harmônico solicitado")
    if echo.fs <= 2.0 * (max(abs(k) for k in ks) * f0 + half_bandwidth_hz):
        raise DetectionError(f"fs = {echo.fs} Hz insuficiente para |k| <= {max(abs(k) for k in ks)}")

    direction = echo.directions[0] if direction is None else direction
    index = echo.directions.index(direction)
    samples = echo.streams[index]
    if samples.size < taps:
        raise DetectionError(f"Fluxo com {samples.size} amostras, menor que o FIR de {taps} coeficientes")
    t = echo.times(index)
    h = demux_filter(echo.fs, half_bandwidth_hz, taps)

    streams = {}
    for k in ks:
        mixed = samples * np.exp(-2j * np.pi * k * f0 * t)
        filtered = np.convolve(mixed, h, mode="same")
        streams[k] = HarmonicStream(filtered, echo.fs, k, direction, echo.start_s[index])
    return streams


def decimate_stream(stream: HarmonicStream, target_fs: float = 20.0) -> HarmonicStream:
    """
    Reamostra um fluxo para a taxa de análise dos sinais vitais.

    Args:
        stream: fluxo em banda base
        target_fs: taxa desejada em Hz

    Returns:
        HarmonicStream: fluxo reamostrado (filtro polifásico)
    """
    ratio = Fraction(target_fs / stream.fs).limit_denominator(1000)
    if ratio <= 0:
        raise DetectionError("Taxa de reamostragem inválida")
    if ratio == 1:
        return stream
    resampled = signal.resample_poly(stream.samples, ratio.numerator, ratio.denominator)
    fs = stream.fs * ratio.numerator / ratio.denominator
    return HarmonicStream(resampled, fs, stream.harmonic, stream.direction, stream.start_s)


def measure_intensity(samples: np.ndarray) -> float:
    """Potência média |x|² ao longo da permanência."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise DetectionError("Fluxo vazio")
    return float(np.mean(np.abs(samples) ** 2))


def intensity_indicator(intensity: float, baseline: float, mu: float) -> bool:
    """True se I_d - I^N_d > mu (desigualdade estrita)."""
    if intensity < 0 or baseline < 0 or mu < 0:
        raise DetectionError("Intensidades e limiar devem ser >= 0")
    return bool(intensity - baseline > mu)


def intensity_flags(intensities: np.ndarray, baseline: BaselineIntensity, config: DetectionConfig) -> np.ndarray:
    """Indicador de intensidade de todas as direções."""
    intensities = np.asarray(intensities, dtype=float)
    if intensities.size != len(baseline):
        raise DetectionError("Número de direções difere da linha de base")
    return np.array([
        intensity_indicator(i, b, config.threshold(b)) for i, b in zip(intensities, baseline.intensities)
    ])


def local_peak_gate(deltas: np.ndarray) -> np.ndarray:
    """
    Mantém apenas direções cujo aumento de intensidade não é superado por
    uma direção vizinha na varredura.

    Args:
        deltas: aumento I_d - I^N_d por direção

    Returns:
        np.ndarray: máscara booleana
    """
    deltas = np.asarray(deltas, dtype=float)
    left = np.concatenate(([-np.inf], deltas[:-1]))
    right = np.concatenate((deltas[1:], [-np.inf]))
    return (deltas >= left) & (deltas >= right)


def _circle_center(samples: np.ndarray) -> complex:
    """Centro do ajuste algébrico de círculo (Kasa); média como alternativa."""
    mean = samples.mean()
    centered = samples - mean
    scale = np.max(np.abs(centered))
    if scale == 0:
        return complex(mean)
    u = centered / scale
    design = np.column_stack([u.real, u.imag, np.ones(u.size)])
    solution, _, rank, _ = np.linalg.lstsq(design, -np.abs(u) ** 2, rcond=None)
    d, e, f = solution
    center = -(d + 1j * e) / 2.0
    radius_sq = abs(center) ** 2 - f
    if rank < 3 or not np.isfinite(center) or radius_sq <= 0 or abs(center) > DEGENERATE_CENTER_RATIO:
        return complex(mean)
    return complex(mean + scale * center)


def radial_spread(samples: np.ndarray) -> float:
    """Coeficiente de variação do raio das amostras em torno do centro do arco."""
    samples = np.asarray(samples, dtype=complex)
    if samples.size == 0:
        raise DetectionError("Fluxo vazio")
    radius = np.abs(samples - _circle_center(samples))
    mean = radius.mean()
    return float(radius.std() / mean) if mean > 0 else 0.0


def extract_motion_signal(samples: np.ndarray) -> np.ndarray:
    """
    Extrai o sinal de movimento (radianos) de um fluxo complexo.

    Remove o caminho estático (centro do arco descrito no plano IQ), toma a
    fase, desdobra e remove a tendência linear. Amostras cujo raio foge da
    mediana por mais de BURST_RADIUS_TOLERANCE (um transeunte cruzando o
    feixe, por exemplo) são descartadas quando somam até BURST_MAX_FRACTION
    do fluxo: o centro é reajustado sem elas e a fase é interpolada sobre
    as lacunas.

    Args:
        samples: fluxo complexo

    Returns:
        np.ndarray: fase desdobrada sem tendência
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.size == 0:
        raise DetectionError("Fluxo vazio")
    centered = samples - _circle_center(samples)
    if np.all(np.abs(centered) == 0):
        return np.zeros(samples.size)

    inliers = _burst_inliers(samples)
    if inliers is None:
        phase = np.unwrap(np.angle(centered))
    else:
        centered = samples - _circle_center(samples[inliers])
        index = np.arange(samples.size)
        phase = np.interp(index, index[inliers], np.unwrap(np.angle(centered[inliers])))
    return signal.detrend(phase, type="linear")


def _burst_inliers(samples: np.ndarray, passes: int = 3) -> Optional[np.ndarray]:
    """Máscara das amostras no arco, ou None se não há rajada a descartar."""
    mask = np.ones(samples.size, dtype=bool)
    for _ in range(passes):
        radius = np.abs(samples - _circle_center(samples[mask]))
        median = np.median(radius[mask])
        if median == 0:
            return None
        updated = np.abs(radius - median) <= BURST_RADIUS_TOLERANCE * median
        if np.count_nonzero(updated) < 3:
            return None
        if np.array_equal(updated, mask):
            break
        mask = updated
    outlier_fraction = 1.0 - mask.mean()
    if outlier_fraction == 0 or outlier_fraction > BURST_MAX_FRACTION:
        return None
    return mask


def respiration_spectrum(motion: np.ndarray, fs: float, config: DetectionConfig):
    """
    Espectro de Welch da velocidade do peito (primeira diferença da fase).

    A diferença torna branca a deriva de fase de um fluxo só com ruído,
    que desdobrada vira um passeio aleatório.
    """
    velocity = np.diff(motion) * fs
    nperseg = min(velocity.size, int(round(config.welch_segment_s * fs)))
    return signal.welch(velocity, fs=fs, window="hann", nperseg=nperseg, noverlap=nperseg // 2)


def respiration_indicator(stream: HarmonicStream, config: DetectionConfig) -> bool:
    """
    Indicador respiratório: pico proeminente na faixa respiratória.

    Os transitórios dos filtros (EDGE_GUARD_S em cada ponta da janela) são
    descartados. Fluxos cujo raio em torno do centro do arco varia tanto
    quanto o de ruído puro (coeficiente de variação >= ARC_SPREAD_LIMIT)
    são rejeitados antes da análise espectral.

    Args:
        stream: fluxo do harmônico (qualquer taxa; é reamostrado para analysis_fs)
        config: configuração da detecção

    Returns:
        bool: True se o pico da faixa supera a mediana da faixa pela proeminência
    """
    if stream.duration < config.confirm_window_s:
        raise DetectionError(
            f"Fluxo de {stream.duration:.1f} s menor que a janela de confirmação ({config.confirm_window_s} s)"
        )
    analysis = decimate_stream(stream, config.analysis_fs) if stream.fs > config.analysis_fs else stream
    window = int(round(config.confirm_window_s * analysis.fs))
    guard = int(np.ceil(EDGE_GUARD_S * analysis.fs))
    recent = analysis.samples[-window:]
    if recent.size > 4 * guard:
        recent = recent[guard:-guard]
    # só ruído em torno do caminho estático
    if radial_spread(recent) >= ARC_SPREAD_LIMIT:
        return False
    motion = extract_motion_signal(recent)
    freqs, power = respiration_spectrum(motion, analysis.fs, config)
    lo, hi = config.resp_band
    band = (freqs >= lo) & (freqs <= hi)
    if np.count_nonzero(band) < 3:
        raise DetectionError("Resolução espectral insuficiente na faixa respiratória")
    # piso: mediana do espectro branqueado da faixa até fs/4 (banda passante do decimador)
    floor_band = (freqs >= lo) & (freqs <= max(hi, FLOOR_FRACTION_OF_FS * analysis.fs))
    floor = np.median(power[floor_band])
    peak = np.max(power[band])
    if floor <= 0:
        return bool(peak > 0)
    return bool(10.0 * np.log10(peak / floor) >= config.prominence_db)


def measure_baseline(echo: EchoSet, config: DetectionConfig) -> BaselineIntensity:
    """Intensidade da cena vazia em cada direção, no harmônico de varredura."""
    intensities = [
        measure_intensity(_scan_stream(echo, d, config).samples) for d in echo.directions
    ]
    return BaselineIntensity(np.array(intensities), echo.duration, echo.fs)


def _scan_stream(echo: EchoSet, direction: int, config: DetectionConfig) -> HarmonicStream:
    streams = demux_harmonics(echo, [config.scan_harmonic], direction,
                              config.demux_half_bandwidth_hz, config.fir_taps)
    return streams[config.scan_harmonic]


def scan_indicators(echo: EchoSet, baseline: BaselineIntensity, config: DetectionConfig):
    """
    Avalia os dois indicadores em todas as direções de uma varredura.

    O indicador respiratório só é calculado nas direções que passam no de
    intensidade (e no filtro de pico local, se ativo) e cuja permanência
    cobre a janela de confirmação; nas demais fica None.

    Args:
        echo: um fluxo por direção de varredura
        baseline: intensidades da cena vazia
        config: configuração da detecção

    Returns:
        Tuple[np.ndarray, List[Optional[bool]], List[Optional[bool]]]:
            intensidades, indicador de intensidade e indicador respiratório
    """
    if len(echo.directions) != len(baseline):
        raise DetectionError(
            f"Varredura com {len(echo.directions)} direções e linha de base com {len(baseline)}"
        )
    streams = [_scan_stream(echo, d, config) for d in echo.directions]
    intensities = np.array([measure_intensity(s.samples) for s in streams])
    flags = intensity_flags(intensities, baseline, config)
    if config.peak_gating:
        flags = flags & local_peak_gate(intensities - baseline.intensities)

    respiration: list = [None] * len(streams)
    for index, stream in enumerate(streams):
        if flags[index] and stream.duration >= config.confirm_window_s:
            respiration[index] = respiration_indicator(stream, config)
    return intensities, [bool(f) for f in flags], respiration
