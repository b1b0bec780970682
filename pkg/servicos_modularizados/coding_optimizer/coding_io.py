"""
Leitura e escrita de codificações em texto e do traço de aptidão em CSV.

Formato do arquivo de codificação:

    M N L modo
    <linha da fatia 1>
    ...
    <linha da fatia L>

Cada linha de fatia tem N caracteres '0'/'1' no modo column-shared, M no
modo row-shared e M·N (linha a linha) no modo full.
"""

from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np
import pandas as pd

from geral.app_logger import log_success
from geral.artifact_service import ArtifactService
from servicos_modularizados.ris_model import StcCoding

from .tasks import MODE_COLUMN, MODE_FULL, MODE_ROW, MODES, CodingError, encode_bits


def format_coding(coding: StcCoding, mode: str = MODE_COLUMN) -> str:
    rows, cols, L = coding.shape
    sequences = encode_bits(coding, mode).reshape(-1, L)
    lines = [f"{rows} {cols} {L} {mode}"]
    for l in range(L):
        lines.append("".join(str(int(b)) for b in sequences[:, l]))
    return "\n".join(lines) + "\n"


def parse_coding(text: str) -> Tuple[StcCoding, str]:
    """
    Interpreta o texto de uma codificação.

    Args:
        text: conteúdo do arquivo

    Returns:
        Tuple[StcCoding, str]: codificação e modo de simetria
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise CodingError("Arquivo de codificação vazio")
    header = lines[0].split()
    if len(header) != 4:
        raise CodingError("Cabeçalho esperado: 'M N L modo'")
    try:
        rows, cols, L = (int(v) for v in header[:3])
    except ValueError:
        raise CodingError(f"Cabeçalho inválido: {lines[0]}")
    mode = header[3]
    if mode not in MODES:
        raise CodingError(f"Modo de simetria desconhecido: {mode}")
    body = lines[1:]
    if len(body) != L:
        raise CodingError(f"Esperadas {L} linhas de fatia, encontradas {len(body)}")

    width = {MODE_COLUMN: cols, MODE_ROW: rows, MODE_FULL: rows * cols}[mode]
    slots = []
    for index, line in enumerate(body, start=1):
        if len(line) != width or set(line) - {"0", "1"}:
            raise CodingError(f"Fatia {index}: esperados {width} caracteres '0'/'1'")
        slots.append([int(c) for c in line])
    sequences = np.array(slots, dtype=np.uint8).T

    if mode == MODE_COLUMN:
        return StcCoding.from_columns(sequences, rows), mode
    if mode == MODE_ROW:
        return StcCoding.from_rows(sequences, cols), mode
    return StcCoding(sequences.reshape(rows, cols, L)), mode


def save_coding(coding: StcCoding, path: Union[str, Path], mode: str = MODE_COLUMN) -> Path:
    path = Path(path)
    target = ArtifactService(path.parent).save_text(format_coding(coding, mode), path.name)
    if target is None:
        raise CodingError(f"Não foi possível gravar a codificação em {path}")
    log_success(f"Codificação salva em {target}")
    return target


def load_coding(path: Union[str, Path]) -> Tuple[StcCoding, str]:
    path = Path(path)
    if not path.exists():
        raise CodingError(f"Arquivo de codificação não encontrado: {path}")
    return parse_coding(path.read_text(encoding="utf-8"))


def fitness_trace_table(trace: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({"iteration": np.arange(1, len(trace) + 1), "best_fitness": list(trace)})


def save_fitness_trace(trace: Sequence[float], path: Union[str, Path]) -> Path:
    path = Path(path)
    target = ArtifactService(path.parent).save_table(fitness_trace_table(trace), path.name)
    if target is None:
        raise CodingError(f"Não foi possível gravar o traço de aptidão em {path}")
    return target
