"""
Exportação do padrão harmônico em tabelas CSV.
"""

from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd

from geral.app_logger import log_success
from geral.artifact_service import ArtifactService

from .geometry import HarmonicPattern

PATTERN_COLUMNS = ["x_m", "y_m", "z_m", "re", "im", "magnitude_db"]


def pattern_file_name(k: int) -> str:
    return f"pattern_k{k:+d}.csv"


def pattern_table(pattern: HarmonicPattern, k: int) -> pd.DataFrame:
    """
    Tabela de um harmônico: uma linha por ponto da grade.

    Args:
        pattern: padrão harmônico
        k: ordem harmônica

    Returns:
        pd.DataFrame: colunas x_m, y_m, z_m, re, im, magnitude_db
    """
    points = pattern.grid.points()
    values = pattern.values[pattern.harmonics.index(k)]
    magnitude = np.abs(values)
    with np.errstate(divide="ignore"):
        magnitude_db = 20.0 * np.log10(magnitude)
    magnitude_db = np.where(magnitude > 0, magnitude_db, -400.0)
    return pd.DataFrame({
        "x_m": points[:, 0],
        "y_m": points[:, 1],
        "z_m": points[:, 2],
        "re": values.real,
        "im": values.imag,
        "magnitude_db": magnitude_db,
    })


def export_pattern(pattern: HarmonicPattern, directory: Union[str, Path]) -> Dict[int, Path]:
    """
    Grava um CSV por ordem harmônica (pattern_k{±k}.csv).

    Args:
        pattern: padrão harmônico
        directory: diretório de saída

    Returns:
        Dict[int, Path]: arquivo gravado por harmônico
    """
    service = ArtifactService(directory)
    written = {}
    for k in pattern.harmonics:
        target = service.save_table(pattern_table(pattern, k), pattern_file_name(k))
        if target is not None:
            written[k] = target
    log_success(f"Padrão exportado: {len(written)} harmônicos em {directory}")
    return written
