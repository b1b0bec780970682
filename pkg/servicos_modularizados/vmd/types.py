"""
Tipos da decomposição variacional: configuração, máscaras espectrais,
conjunto de modos e estimativas de frequência respiratória e cardíaca.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

ALPHA_PRINTED = "printed"
ALPHA_INVERSE = "inverse"
ALPHA_MODES = (ALPHA_PRINTED, ALPHA_INVERSE)

INIT_GROUPED = "grouped"
INIT_UNIFORM = "uniform"
INIT_ZERO = "zero"
INIT_STRATEGIES = (INIT_GROUPED, INIT_UNIFORM, INIT_ZERO)

GROUP_RESP = "resp"
GROUP_HEART = "heart"

MIN_SERIES_LENGTH = 64
INIT_BAND_HZ = (0.1, 2.5)


class VmdError(ValueError):
    """Erro de domínio da decomposição."""


@dataclass(frozen=True)
class VmdConfig:
    """
    Parâmetros da VMD aprimorada.

    Os primeiros resp_modes modos formam o grupo respiratório (máscara
    passa-baixas); os demais formam o grupo cardíaco (máscara passa-faixa).
    """

    n_modes: int = 6
    resp_modes: int = 3
    alpha_int: float = 2000.0
    zeta: float = 4.0
    ref_resp_hz: float = 0.25
    ref_heart_hz: float = 1.35
    resp_floor_hz: float = 0.1
    lowpass_hz: float = 0.7
    heart_band: Tuple[float, float] = (0.8, 2.5)
    rolloff_hz: float = 0.05
    lagrange_step: float = 0.0
    tol_abs: float = 1e-6
    tol_rel: float = 1e-6
    max_iter: int = 500
    init: str = INIT_GROUPED
    use_masks: bool = True
    adaptive_penalty: bool = True
    alpha_mode: str = ALPHA_PRINTED
    hold_ratio_db: float = -10.0
    peak_ratio_db: float = 3.0

    def __post_init__(self):
        if not 1 <= self.resp_modes < self.n_modes:
            raise VmdError("É preciso 1 <= resp_modes < n_modes")
        if self.alpha_int <= 0:
            raise VmdError("alpha_int deve ser positivo")
        if self.zeta < 0:
            raise VmdError("zeta deve ser >= 0")
        lo, hi = self.heart_band
        if not 0 < self.resp_floor_hz < self.lowpass_hz <= lo < hi:
            raise VmdError("Cortes devem satisfazer 0 < piso resp. < passa-baixas <= faixa cardíaca")
        if self.rolloff_hz < 0 or lo - self.rolloff_hz / 2 <= 0:
            raise VmdError("Transição das máscaras inválida")
        if self.max_iter < 1:
            raise VmdError("max_iter deve ser >= 1")
        if self.tol_abs < 0 or self.tol_rel < 0 or self.lagrange_step < 0:
            raise VmdError("Tolerâncias e passo de Lagrange devem ser >= 0")
        if self.init not in INIT_STRATEGIES:
            raise VmdError(f"Inicialização desconhecida: {self.init}")
        if self.alpha_mode not in ALPHA_MODES:
            raise VmdError(f"Modo de penalidade desconhecido: {self.alpha_mode}")
        object.__setattr__(self, "heart_band", (float(lo), float(hi)))

    @property
    def resp_band(self) -> Tuple[float, float]:
        return self.resp_floor_hz, self.lowpass_hz

    def group_of(self, index: int) -> str:
        """Grupo do modo de índice 0-based."""
        return GROUP_RESP if index < self.resp_modes else GROUP_HEART


def raised_cosine_lowpass(freqs_hz: np.ndarray, cutoff_hz: float, rolloff_hz: float) -> np.ndarray:
    """Resposta passa-baixas em cosseno levantado centrada no corte."""
    freqs_hz = np.abs(np.asarray(freqs_hz, dtype=float))
    if rolloff_hz == 0:
        return (freqs_hz <= cutoff_hz).astype(float)
    lo = cutoff_hz - rolloff_hz / 2.0
    ramp = 0.5 * (1.0 + np.cos(np.pi * np.clip((freqs_hz - lo) / rolloff_hz, 0.0, 1.0)))
    return ramp


@dataclass(frozen=True, eq=False)
class SpectralMask:
    """Respostas f̂_l (passa-baixas) e f̂_b (passa-faixa) amostradas na grade de análise."""

    freqs_hz: np.ndarray
    lowpass: np.ndarray
    bandpass: np.ndarray

    def __post_init__(self):
        for name in ("lowpass", "bandpass"):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != np.shape(self.freqs_hz):
                raise VmdError(f"Máscara {name} fora da grade de frequências")
            if np.any(values < 0) or np.any(values > 1):
                raise VmdError(f"Máscara {name} deve ficar em [0, 1]")
        if self.lowpass[0] != 1.0 or self.bandpass[0] != 0.0:
            raise VmdError("É preciso f̂_l(0) = 1 e f̂_b(0) = 0")

    @classmethod
    def from_grid(cls, freqs_hz: np.ndarray, config: VmdConfig) -> "SpectralMask":
        lo, hi = config.heart_band
        lowpass = raised_cosine_lowpass(freqs_hz, config.lowpass_hz, config.rolloff_hz)
        bandpass = ((1.0 - raised_cosine_lowpass(freqs_hz, lo, config.rolloff_hz))
                    * raised_cosine_lowpass(freqs_hz, hi, config.rolloff_hz))
        return cls(np.asarray(freqs_hz, dtype=float), lowpass, bandpass)

    @classmethod
    def for_series(cls, length: int, fs: float, config: VmdConfig) -> "SpectralMask":
        """Máscaras na grade da série estendida por espelhamento (2·length pontos)."""
        return cls.from_grid(np.fft.rfftfreq(2 * length, d=1.0 / fs), config)

    def for_modes(self, config: VmdConfig) -> np.ndarray:
        """Matriz (I, F): passa-baixas nos modos respiratórios, passa-faixa nos demais."""
        return np.stack([
            self.lowpass if config.group_of(i) == GROUP_RESP else self.bandpass
            for i in range(config.n_modes)
        ])


@dataclass(frozen=True, eq=False)
class ImfSet:
    """
    Resultado de uma decomposição.

    modes são as séries u_i; components são as contribuições f_i⊛u_i à
    reconstrução (iguais aos modos sem máscaras); residual fecha a soma,
    s = Σ components + residual. spectra guarda û_i na grade estendida.
    """

    modes: np.ndarray
    center_hz: np.ndarray
    alphas: np.ndarray
    components: np.ndarray
    residual: np.ndarray
    spectra: np.ndarray
    freqs_hz: np.ndarray
    fs: float
    iterations: int
    converged: bool
    resp_modes: Optional[int] = None
    masks: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_modes(self) -> int:
        return self.modes.shape[0]

    @property
    def s_r(self) -> np.ndarray:
        if self.resp_modes is None:
            raise VmdError("Decomposição sem grupos de modos")
        return self.components[:self.resp_modes].sum(axis=0)

    @property
    def s_h(self) -> np.ndarray:
        if self.resp_modes is None:
            raise VmdError("Decomposição sem grupos de modos")
        return self.components[self.resp_modes:].sum(axis=0)

    def group_spectrum(self, group: str) -> np.ndarray:
        """Σ f̂_i û_i do grupo na grade estendida."""
        if self.resp_modes is None:
            raise VmdError("Decomposição sem grupos de modos")
        rows = slice(0, self.resp_modes) if group == GROUP_RESP else slice(self.resp_modes, None)
        contributions = self.spectra if self.masks is None else self.masks * self.spectra
        return contributions[rows].sum(axis=0)

    def mode_energy(self) -> np.ndarray:
        return np.sum(self.modes ** 2, axis=1)


@dataclass(frozen=True)
class RateEstimate:
    """Frequência de pico refinada de uma faixa."""

    rate_per_min: float
    peak_hz: float
    magnitude: float
    valid: bool


@dataclass(frozen=True)
class VitalEstimate:
    """Frequência respiratória (RPM) e cardíaca (BPM) de uma janela de análise."""

    rr_rpm: float
    hr_bpm: float
    rr_valid: bool
    hr_valid: bool
    rr_peak: float
    hr_peak: float
    window_s: float
    breath_hold: bool = False

    def to_dict(self) -> dict:
        return {
            "rr_rpm": self.rr_rpm if self.rr_valid else None,
            "hr_bpm": self.hr_bpm if self.hr_valid else None,
            "rr_valid": self.rr_valid,
            "hr_valid": self.hr_valid,
            "rr_peak": self.rr_peak,
            "hr_peak": self.hr_peak,
            "window_s": self.window_s,
            "breath_hold": self.breath_hold,
        }
