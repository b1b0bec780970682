"""
Síntese de codificações STC por BPSO para focalizar harmônicos em alvos.
"""

from .bpso import BinaryPSO, BpsoSynthesizer, bpso_optimize, brute_force_optimize
from .coding_io import (
    fitness_trace_table,
    format_coding,
    load_coding,
    parse_coding,
    save_coding,
    save_fitness_trace,
)
from .fitness import FocusingObjective, focusing_fitness, reduced_weights
from .steering import (
    PhaseDelaySynthesizer,
    matched_multibeam_coding,
    phase_delay_coding,
    square_sequence,
    steering_codings,
)
from .tasks import (
    MODE_COLUMN,
    MODE_FULL,
    MODE_ROW,
    MODES,
    BeamAssignment,
    BeamTask,
    BpsoConfig,
    CodingError,
    OptResult,
    decision_length,
    decode_bits,
    encode_bits,
)

__all__ = [
    "BinaryPSO",
    "BpsoSynthesizer",
    "PhaseDelaySynthesizer",
    "bpso_optimize",
    "brute_force_optimize",
    "fitness_trace_table",
    "format_coding",
    "load_coding",
    "parse_coding",
    "save_coding",
    "save_fitness_trace",
    "FocusingObjective",
    "focusing_fitness",
    "reduced_weights",
    "matched_multibeam_coding",
    "phase_delay_coding",
    "square_sequence",
    "steering_codings",
    "MODE_COLUMN",
    "MODE_FULL",
    "MODE_ROW",
    "MODES",
    "BeamAssignment",
    "BeamTask",
    "BpsoConfig",
    "CodingError",
    "OptResult",
    "decision_length",
    "decode_bits",
    "encode_bits",
]
