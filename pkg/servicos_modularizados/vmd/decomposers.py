"""
Implementações da interface de decomposição e serviço de sinais vitais.
"""

from dataclasses import replace
from typing import Optional

import numpy as np

from geral.app_logger import log_error, log_success
from geral.module_interfaces import DecompositionInterface

from .decomposition import baseline_vmd, improved_vmd
from .estimation import estimate_vitals
from .types import INIT_GROUPED, INIT_UNIFORM, ImfSet, VitalEstimate, VmdConfig, VmdError


class BaselineVmdDecomposer(DecompositionInterface):
    """VMD padrão; os primeiros resp_modes modos formam s_r."""

    name = "vmd"

    def __init__(self, config: Optional[VmdConfig] = None):
        self.config = config or VmdConfig()

    def decompose(self, series, fs: float) -> ImfSet:
        c = self.config
        imfs = baseline_vmd(series, fs, c.n_modes, c.alpha_int, c.lagrange_step, c.tol_abs, c.tol_rel,
                            c.max_iter, init=c.init if c.init != INIT_GROUPED else INIT_UNIFORM)
        return replace(imfs, resp_modes=c.resp_modes)


class ImprovedVmdDecomposer(DecompositionInterface):
    """VMD com máscaras por grupo e penalidade adaptativa."""

    name = "ivmd"

    def __init__(self, config: Optional[VmdConfig] = None):
        self.config = config or VmdConfig()

    def decompose(self, series, fs: float) -> ImfSet:
        return improved_vmd(series, fs, self.config)[2]


class VitalSignService:
    """
    Serviço que decompõe o sinal de movimento e estima RR/HR.
    """

    def __init__(self, decomposer: Optional[DecompositionInterface] = None, config: Optional[VmdConfig] = None):
        self.config = config or VmdConfig()
        self.decomposer = decomposer or ImprovedVmdDecomposer(self.config)

    def analyze(self, series, fs: float, window_s: Optional[float] = None) -> Optional[VitalEstimate]:
        """
        Decompõe e estima os sinais vitais.

        Args:
            series: sinal de movimento (rad)
            fs: taxa de amostragem em Hz
            window_s: janela de análise (padrão: registro inteiro)

        Returns:
            VitalEstimate ou None em caso de erro
        """
        try:
            imfs = self.decomposer.decompose(np.asarray(series, dtype=float), fs)
            estimate = estimate_vitals(imfs.s_r, imfs.s_h, fs, window_s, self.config)
            log_success(f"Sinais vitais ({self.decomposer.name}): RR {estimate.rr_rpm:.1f} RPM, "
                        f"HR {estimate.hr_bpm:.1f} BPM")
            return estimate
        except VmdError as e:
            log_error(f"Erro ao estimar sinais vitais: {str(e)}")
            return None

    def timeline(self, series, fs: float, window_s: float, step_s: float):
        """
        Estimativas em janelas deslizantes sobre uma única decomposição.

        Returns:
            list: pares (fim da janela em s, VitalEstimate)
        """
        try:
            imfs = self.decomposer.decompose(np.asarray(series, dtype=float), fs)
        except VmdError as e:
            log_error(f"Erro na decomposição: {str(e)}")
            return []
        duration = imfs.s_r.size / fs
        points = []
        end = window_s
        while end <= duration + 1e-9:
            stop = int(round(end * fs))
            estimate = estimate_vitals(imfs.s_r[:stop], imfs.s_h[:stop], fs, window_s, self.config)
            points.append((end, estimate))
            end += step_s
        return points
