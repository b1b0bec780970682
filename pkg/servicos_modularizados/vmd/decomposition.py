"""
Decomposição variacional em modos (VMD) por ADMM no domínio da frequência.

A versão aprimorada aplica máscaras espectrais por grupo de modos e uma
penalidade de banda que depende da distância entre a frequência central
de cada modo e a referência do seu grupo.
"""

from typing import Callable, Optional, Tuple

import numpy as np

from geral.app_logger import log_debug

from .types import (
    ALPHA_INVERSE,
    GROUP_RESP,
    INIT_BAND_HZ,
    INIT_GROUPED,
    INIT_UNIFORM,
    INIT_ZERO,
    MIN_SERIES_LENGTH,
    ImfSet,
    SpectralMask,
    VmdConfig,
    VmdError,
)

MAX_ALPHA_EXPONENT = 700.0


def _check_series(series) -> np.ndarray:
    s = np.asarray(series, dtype=float).reshape(-1)
    if s.size < MIN_SERIES_LENGTH:
        raise VmdError(f"Série com {s.size} amostras; mínimo {MIN_SERIES_LENGTH}")
    if not np.all(np.isfinite(s)):
        raise VmdError("Série com valores não finitos")
    return s


def mirror_extend(series: np.ndarray) -> Tuple[np.ndarray, slice]:
    """Estende a série espelhando metade em cada borda; devolve a fatia do trecho original."""
    half = series.size // 2
    extended = np.concatenate([series[:half][::-1], series, series[half:][::-1]])
    return extended, slice(half, half + series.size)


def center_frequency(spectrum: np.ndarray, freqs_hz: np.ndarray, previous: Optional[float] = None) -> float:
    """
    Primeiro momento de |û|² sobre a grade [0, fs/2].

    Args:
        spectrum: meio espectro complexo do modo
        freqs_hz: grade de frequências em Hz
        previous: frequência anterior, devolvida quando o espectro é nulo

    Returns:
        float: frequência central em Hz
    """
    power = np.abs(spectrum) ** 2
    total = power.sum()
    if total == 0:
        if previous is None:
            raise VmdError("Espectro nulo sem frequência anterior")
        return float(previous)
    return float(np.dot(freqs_hz, power) / total)


def initial_centers(n_modes: int, strategy: str, resp_modes: Optional[int] = None,
                    lowpass_hz: float = 0.7) -> np.ndarray:
    lo, hi = INIT_BAND_HZ
    if strategy == INIT_ZERO:
        return np.zeros(n_modes)
    if strategy == INIT_UNIFORM or resp_modes is None:
        return np.linspace(lo, hi, n_modes)
    if strategy == INIT_GROUPED:
        resp = np.linspace(lo, lowpass_hz - lo, resp_modes)
        heart = np.linspace(lowpass_hz + lo, hi, n_modes - resp_modes)
        return np.concatenate([resp, heart])
    raise VmdError(f"Inicialização desconhecida: {strategy}")


def adaptive_alpha(center_hz: float, group: str, config: VmdConfig) -> float:
    """
    Penalidade de banda do modo: α_int·exp(-ζ(w_i - w_r)²).

    No modo "inverse" o expoente troca de sinal, penalizando mais os modos
    longe da referência.

    Args:
        center_hz: frequência central do modo (Hz)
        group: "resp" ou "heart"
        config: configuração da VMD

    Returns:
        float: penalidade α_i
    """
    if center_hz < 0:
        raise VmdError("Frequência central negativa")
    if not config.adaptive_penalty:
        return config.alpha_int
    reference = config.ref_resp_hz if group == GROUP_RESP else config.ref_heart_hz
    exponent = config.zeta * (center_hz - reference) ** 2
    if config.alpha_mode == ALPHA_INVERSE:
        return float(config.alpha_int * np.exp(min(exponent, MAX_ALPHA_EXPONENT)))
    return float(config.alpha_int * np.exp(-exponent))


def _admm(s: np.ndarray, fs: float, centers_hz: np.ndarray, penalty: Callable[[np.ndarray], np.ndarray],
          masks: Optional[np.ndarray], lagrange_step: float, tol_abs: float, tol_rel: float,
          max_iter: int, resp_modes: Optional[int]) -> ImfSet:
    extended, keep = mirror_extend(s)
    n = extended.size
    spectrum = np.fft.rfft(extended)
    nu = np.fft.rfftfreq(n)
    freqs_hz = nu * fs

    n_modes = centers_hz.size
    omega = centers_hz.astype(float).copy()
    u_hat = np.zeros((n_modes, nu.size), dtype=complex)
    contributions = np.zeros_like(u_hat)
    total = np.zeros(nu.size, dtype=complex)
    lam = np.zeros(nu.size, dtype=complex)
    alphas = penalty(omega)
    converged = False
    iterations = 0

    for iteration in range(1, max_iter + 1):
        iterations = iteration
        previous = u_hat.copy()
        alphas = penalty(omega)
        for i in range(n_modes):
            others = total - contributions[i]
            mode = (spectrum - others + lam / 2.0) / (1.0 + 2.0 * alphas[i] * (nu - omega[i] / fs) ** 2)
            if masks is not None:
                mode = masks[i] * mode
            u_hat[i] = mode
            contributions[i] = mode if masks is None else masks[i] * mode
            total = others + contributions[i]
            omega[i] = center_frequency(mode, freqs_hz, omega[i])
        lam = lam + lagrange_step * (spectrum - total)

        change = np.sum(np.abs(u_hat - previous) ** 2, axis=1)
        reference = np.sum(np.abs(previous) ** 2, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(reference > 0, change / reference, np.where(change > 0, np.inf, 0.0))
        if np.sum(ratios) <= tol_rel and np.sum(change) / n <= tol_abs:
            converged = True
            break

    alphas = penalty(omega)
    modes = np.fft.irfft(u_hat, n=n, axis=1)[:, keep]
    components = np.fft.irfft(contributions, n=n, axis=1)[:, keep]
    residual = s - components.sum(axis=0)
    log_debug(f"VMD: {n_modes} modos, {iterations} iterações, convergiu={converged}")
    return ImfSet(
        modes=modes,
        center_hz=omega,
        alphas=np.asarray(alphas, dtype=float),
        components=components,
        residual=residual,
        spectra=u_hat,
        freqs_hz=freqs_hz,
        fs=float(fs),
        iterations=iterations,
        converged=converged,
        resp_modes=resp_modes,
        masks=masks,
    )


def baseline_vmd(series, fs: float, n_modes: int = 6, alpha: float = 2000.0, lagrange_step: float = 0.0,
                 tol_abs: float = 1e-6, tol_rel: float = 1e-6, max_iter: int = 500,
                 init: str = INIT_UNIFORM) -> ImfSet:
    """
    VMD padrão com penalidade constante.

    Args:
        series: série real (>= 64 amostras)
        fs: taxa de amostragem em Hz
        n_modes: número de modos
        alpha: penalidade de banda
        lagrange_step: passo ε do multiplicador
        tol_abs: tolerância absoluta em Σ‖Δu‖²
        tol_rel: tolerância relativa em Σ‖Δu‖²/‖u‖²
        max_iter: máximo de iterações
        init: inicialização das frequências centrais

    Returns:
        ImfSet: modos, frequências centrais e resíduo de fechamento
    """
    s = _check_series(series)
    if n_modes < 1 or alpha <= 0 or max_iter < 1:
        raise VmdError("Parâmetros da VMD inválidos")

    def penalty(omega):
        return np.full(omega.size, float(alpha))

    return _admm(s, fs, initial_centers(n_modes, init), penalty, None, lagrange_step,
                 tol_abs, tol_rel, max_iter, None)


def improved_vmd(series, fs: float, config: Optional[VmdConfig] = None) -> Tuple[np.ndarray, np.ndarray, ImfSet]:
    """
    VMD com máscaras por grupo e penalidade adaptativa.

    Args:
        series: série real (>= 64 amostras)
        fs: taxa de amostragem em Hz
        config: configuração da VMD

    Returns:
        Tuple[np.ndarray, np.ndarray, ImfSet]: sinal respiratório s_r, cardíaco s_h e os modos
    """
    config = config or VmdConfig()
    s = _check_series(series)
    masks = SpectralMask.for_series(s.size, fs, config).for_modes(config) if config.use_masks else None
    groups = [config.group_of(i) for i in range(config.n_modes)]

    def penalty(omega):
        return np.array([adaptive_alpha(max(w, 0.0), g, config) for w, g in zip(omega, groups)])

    centers = initial_centers(config.n_modes, config.init, config.resp_modes, config.lowpass_hz)
    imfs = _admm(s, fs, centers, penalty, masks, config.lagrange_step, config.tol_abs, config.tol_rel,
                 config.max_iter, config.resp_modes)
    return imfs.s_r, imfs.s_h, imfs


def apply_mask(series, fs: float, mask: SpectralMask, group: str = GROUP_RESP) -> np.ndarray:
    """
    Filtra uma série com a máscara do grupo, na mesma grade estendida da VMD.

    Args:
        series: série real
        fs: taxa de amostragem em Hz
        mask: máscaras construídas para o comprimento da série
        group: "resp" (passa-baixas) ou "heart" (passa-faixa)

    Returns:
        np.ndarray: série filtrada
    """
    s = np.asarray(series, dtype=float).reshape(-1)
    extended, keep = mirror_extend(s)
    if mask.freqs_hz.size != extended.size // 2 + 1:
        raise VmdError("Máscara construída para outro comprimento de série")
    if not np.allclose(mask.freqs_hz[1], fs / extended.size):
        raise VmdError("Máscara construída para outra taxa de amostragem")
    response = mask.lowpass if group == GROUP_RESP else mask.bandpass
    return np.fft.irfft(response * np.fft.rfft(extended), n=extended.size)[keep]
