"""
Detecção de pessoas: separação dos harmônicos, indicadores de intensidade e
respiração e atribuição de feixes.
"""

from .assignment import (
    baseline_table,
    choose_harmonic,
    load_baseline,
    replay_assignments,
    save_baseline,
    update_assignments,
)
from .processing import (
    decimate_stream,
    demux_filter,
    demux_harmonics,
    extract_motion_signal,
    intensity_flags,
    intensity_indicator,
    local_peak_gate,
    measure_baseline,
    measure_intensity,
    radial_spread,
    respiration_indicator,
    respiration_spectrum,
    scan_indicators,
)
from .types import (
    DEFAULT_POOL,
    EVENT_ASSIGNED,
    EVENT_CANDIDATE,
    EVENT_CAPACITY,
    EVENT_RELEASED,
    MU_ABSOLUTE,
    MU_RELATIVE,
    STATUS_ASSIGNED,
    STATUS_CANDIDATE,
    STATUS_EMPTY,
    AssignmentEvent,
    AssignmentState,
    BaselineIntensity,
    DetectionConfig,
    DetectionError,
    HarmonicStream,
    pool_order,
)

__all__ = [
    "baseline_table",
    "choose_harmonic",
    "load_baseline",
    "replay_assignments",
    "save_baseline",
    "update_assignments",
    "decimate_stream",
    "demux_filter",
    "demux_harmonics",
    "extract_motion_signal",
    "intensity_flags",
    "intensity_indicator",
    "local_peak_gate",
    "measure_baseline",
    "measure_intensity",
    "radial_spread",
    "respiration_indicator",
    "respiration_spectrum",
    "scan_indicators",
    "DEFAULT_POOL",
    "EVENT_ASSIGNED",
    "EVENT_CANDIDATE",
    "EVENT_CAPACITY",
    "EVENT_RELEASED",
    "MU_ABSOLUTE",
    "MU_RELATIVE",
    "STATUS_ASSIGNED",
    "STATUS_CANDIDATE",
    "STATUS_EMPTY",
    "AssignmentEvent",
    "AssignmentState",
    "BaselineIntensity",
    "DetectionConfig",
    "DetectionError",
    "HarmonicStream",
    "pool_order",
]
