"""
Persistência de cenas (JSON) e de ecos (CSV ou binário I/Q com cabeçalho).
"""

import dataclasses
import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

from geral.app_logger import log_success
from geral.artifact_service import ArtifactService, to_json_text

from .model import EchoSet, Passerby, Person, Scene, SceneError, StaticReflector

HEADER_KEYS = ("fs", "duration", "carrier_hz", "mod_freq_hz", "direction", "start_s", "seed")


def _complex_to_json(value: complex) -> List[float]:
    return [float(np.real(value)), float(np.imag(value))]


def _complex_from_json(value: Any, label: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise SceneError(f"{label}: refletividade deve ser número ou par [re, im]")


def _build(cls, data: Dict[str, Any], label: str):
    if not isinstance(data, dict):
        raise SceneError(f"{label}: esperado um objeto")
    allowed = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in allowed:
            raise SceneError(f"{label}: chave desconhecida '{key}'")
    values = dict(data)
    if "reflectivity" in values:
        values["reflectivity"] = _complex_from_json(values["reflectivity"], label)
    try:
        return cls(**values)
    except TypeError as e:
        raise SceneError(f"{label}: {str(e)}")


def scene_from_dict(data: Dict[str, Any]) -> Scene:
    """
    Constrói uma cena a partir do dicionário (chaves iguais aos nomes dos campos).

    Args:
        data: dicionário com persons, reflectors, passerby, noise_db, leakage_db, seed, rx_position

    Returns:
        Scene: cena validada
    """
    allowed = {f.name for f in dataclasses.fields(Scene)}
    for key in data:
        if key not in allowed:
            raise SceneError(f"cena: chave desconhecida '{key}'")
    values = dict(data)
    values["persons"] = tuple(_build(Person, p, f"persons[{i}]") for i, p in enumerate(data.get("persons", [])))
    values["reflectors"] = tuple(
        _build(StaticReflector, r, f"reflectors[{i}]") for i, r in enumerate(data.get("reflectors", []))
    )
    if data.get("passerby") is not None:
        values["passerby"] = _build(Passerby, data["passerby"], "passerby")
    return Scene(**values)


def scene_to_dict(scene: Scene) -> Dict[str, Any]:
    def plain(obj):
        record = dataclasses.asdict(obj)
        if "reflectivity" in record:
            record["reflectivity"] = _complex_to_json(record["reflectivity"])
        return record

    return {
        "persons": [plain(p) for p in scene.persons],
        "reflectors": [plain(r) for r in scene.reflectors],
        "passerby": plain(scene.passerby) if scene.passerby is not None else None,
        "noise_db": scene.noise_db,
        "leakage_db": scene.leakage_db,
        "seed": scene.seed,
        "rx_position": list(scene.rx_position),
    }


def load_scene(path: Union[str, Path]) -> Scene:
    path = Path(path)
    if not path.exists():
        raise SceneError(f"Arquivo de cena não encontrado: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SceneError(f"Arquivo de cena inválido ({path}): {str(e)}")
    return scene_from_dict(data)


def save_scene(scene: Scene, path: Union[str, Path]) -> Path:
    path = Path(path)
    target = ArtifactService(path.parent).save_text(to_json_text(scene_to_dict(scene)) + "\n", path.name)
    if target is None:
        raise SceneError(f"Não foi possível gravar a cena em {path}")
    return target


def echo_table(echo: EchoSet, direction: int = 0) -> pd.DataFrame:
    index = echo.directions.index(direction)
    stream = echo.streams[index]
    return pd.DataFrame({"t_s": echo.times(index), "i": stream.real, "q": stream.imag})


def save_echo_csv(echo: EchoSet, directory: Union[str, Path], prefix: str = "eco") -> List[Path]:
    """Um CSV (t_s, i, q) por direção."""
    service = ArtifactService(directory)
    written = []
    for direction in echo.directions:
        target = service.save_table(echo_table(echo, direction), f"{prefix}_d{direction}.csv")
        if target is None:
            raise SceneError(f"Não foi possível gravar o eco da direção {direction}")
        written.append(target)
    return written


def save_echo_raw(echo: EchoSet, directory: Union[str, Path], prefix: str = "eco") -> List[Path]:
    """
    Grava I/Q intercalado em float64 little-endian com um cabeçalho texto por direção.

    Args:
        echo: ecos
        directory: diretório de saída
        prefix: prefixo dos arquivos

    Returns:
        List[Path]: cabeçalhos gravados (<prefixo>_d<d>.txt)
    """
    service = ArtifactService(directory)
    headers = []
    for index, direction in enumerate(echo.directions):
        stream = echo.streams[index]
        interleaved = np.empty(2 * stream.size)
        interleaved[0::2] = stream.real
        interleaved[1::2] = stream.imag
        name = f"{prefix}_d{direction}"
        if service.save_raw(interleaved, f"{name}.bin") is None:
            raise SceneError(f"Não foi possível gravar {name}.bin")
        header = {
            "fs": repr(echo.fs),
            "duration": repr(echo.duration),
            "carrier_hz": repr(echo.carrier_hz),
            "mod_freq_hz": repr(echo.mod_freq_hz),
            "direction": str(direction),
            "start_s": repr(echo.start_s[index]),
            "seed": str(echo.seed),
        }
        text = "".join(f"{key}={header[key]}\n" for key in HEADER_KEYS)
        headers.append(service.save_text(text, f"{name}.txt"))
    log_success(f"Ecos gravados: {len(headers)} direções em {directory}")
    return headers


def load_echo_raw(header_path: Union[str, Path]) -> EchoSet:
    """Lê um fluxo gravado por save_echo_raw a partir do cabeçalho."""
    header_path = Path(header_path)
    if not header_path.exists():
        raise SceneError(f"Cabeçalho não encontrado: {header_path}")
    header = {}
    for line in header_path.read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            header[key.strip()] = value.strip()
    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise SceneError(f"Cabeçalho sem as chaves: {', '.join(missing)}")
    raw = np.fromfile(header_path.with_suffix(".bin"), dtype="<f8")
    return EchoSet(
        streams=(raw[0::2] + 1j * raw[1::2])[None, :],
        fs=float(header["fs"]),
        duration=float(header["duration"]),
        carrier_hz=float(header["carrier_hz"]),
        mod_freq_hz=float(header["mod_freq_hz"]),
        seed=int(header["seed"]),
        directions=(int(header["direction"]),),
        start_s=(float(header["start_s"]),),
    )


def merge_echoes(echoes: List[EchoSet]) -> EchoSet:
    """Junta fluxos de mesma taxa e duração num único EchoSet."""
    if not echoes:
        raise SceneError("Nenhum eco para juntar")
    first = echoes[0]
    return EchoSet(
        streams=np.vstack([e.streams for e in echoes]),
        fs=first.fs,
        duration=first.duration,
        carrier_hz=first.carrier_hz,
        mod_freq_hz=first.mod_freq_hz,
        seed=first.seed,
        directions=tuple(d for e in echoes for d in e.directions),
        start_s=tuple(s for e in echoes for s in e.start_s),
    )
