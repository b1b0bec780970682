"""
Decomposição variacional em modos e estimativa de sinais vitais.
"""

from .decomposers import BaselineVmdDecomposer, ImprovedVmdDecomposer, VitalSignService
from .decomposition import (
    adaptive_alpha,
    apply_mask,
    baseline_vmd,
    center_frequency,
    improved_vmd,
    initial_centers,
    mirror_extend,
)
from .estimation import HR_RANGE_BPM, RR_RANGE_RPM, estimate_rate, estimate_vitals
from .types import (
    ALPHA_INVERSE,
    ALPHA_MODES,
    ALPHA_PRINTED,
    GROUP_HEART,
    GROUP_RESP,
    INIT_GROUPED,
    INIT_STRATEGIES,
    INIT_UNIFORM,
    INIT_ZERO,
    ImfSet,
    RateEstimate,
    SpectralMask,
    VitalEstimate,
    VmdConfig,
    VmdError,
    raised_cosine_lowpass,
)

__all__ = [
    "BaselineVmdDecomposer",
    "ImprovedVmdDecomposer",
    "VitalSignService",
    "adaptive_alpha",
    "apply_mask",
    "baseline_vmd",
    "center_frequency",
    "improved_vmd",
    "initial_centers",
    "mirror_extend",
    "HR_RANGE_BPM",
    "RR_RANGE_RPM",
    "estimate_rate",
    "estimate_vitals",
    "ALPHA_INVERSE",
    "ALPHA_MODES",
    "ALPHA_PRINTED",
    "GROUP_HEART",
    "GROUP_RESP",
    "INIT_GROUPED",
    "INIT_STRATEGIES",
    "INIT_UNIFORM",
    "INIT_ZERO",
    "ImfSet",
    "RateEstimate",
    "SpectralMask",
    "VitalEstimate",
    "VmdConfig",
    "VmdError",
    "raised_cosine_lowpass",
]
