"""
Simulação de cenas multipessoa através do canal harmônico da RIS.
"""

from .model import (
    DEFAULT_RX_POSITION,
    HEART_BAND_HZ,
    RESP_BAND_HZ,
    EchoSet,
    Passerby,
    Person,
    Scene,
    SceneError,
    StaticReflector,
    chest_displacement,
    snr_to_noise_db,
)
from .scene_io import (
    echo_table,
    load_echo_raw,
    load_scene,
    merge_echoes,
    save_echo_csv,
    save_echo_raw,
    save_scene,
    scene_from_dict,
    scene_to_dict,
)
from .simulator import (
    DEFAULT_SIM_HARMONICS,
    leakage_coefficients,
    reference_path_gain,
    rx_gain,
    scan_sequence,
    simulate_received,
)

__all__ = [
    "DEFAULT_RX_POSITION",
    "HEART_BAND_HZ",
    "RESP_BAND_HZ",
    "EchoSet",
    "Passerby",
    "Person",
    "Scene",
    "SceneError",
    "StaticReflector",
    "chest_displacement",
    "snr_to_noise_db",
    "echo_table",
    "load_echo_raw",
    "load_scene",
    "merge_echoes",
    "save_echo_csv",
    "save_echo_raw",
    "save_scene",
    "scene_from_dict",
    "scene_to_dict",
    "DEFAULT_SIM_HARMONICS",
    "leakage_coefficients",
    "reference_path_gain",
    "rx_gain",
    "scan_sequence",
    "simulate_received",
]
