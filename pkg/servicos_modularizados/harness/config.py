"""
Configuração de uma execução do pipeline.

O arquivo de configuração é um JSON dividido em seções. As seções dos
módulos (geometria, grade, bpso, deteccao, vmd) usam os nomes dos campos
das dataclasses de cada módulo; as seções próprias do harness (cena,
codificacao, varredura, saida) usam chaves em português.
"""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from servicos_modularizados.coding_optimizer import MODE_COLUMN, BeamTask, BpsoConfig
from servicos_modularizados.detection import MU_ABSOLUTE, DetectionConfig
from servicos_modularizados.ris_model import FieldGrid, RisGeometry, spherical_illumination
from servicos_modularizados.scene_sim import Scene, load_scene, scene_from_dict, scene_to_dict, snr_to_noise_db
from servicos_modularizados.vmd import VmdConfig

SECTIONS = ("geometria", "grade", "cena", "codificacao", "bpso", "deteccao", "vmd", "varredura", "saida")

SYNTH_BPSO = "bpso"
SYNTH_PHASE_DELAY = "atraso_de_fase"
SYNTHESIZERS = (SYNTH_BPSO, SYNTH_PHASE_DELAY)

DECOMPOSERS = ("ivmd", "vmd")

SWEEP_MU = "mu"
SWEEP_ALPHA = "alpha"
SWEEP_IMF = "imf"
SWEEP_DISTANCE = "distance"
SWEEP_PASSERBY = "passerby"
SWEEP_PARAMETERS = (SWEEP_MU, SWEEP_ALPHA, SWEEP_IMF, SWEEP_DISTANCE, SWEEP_PASSERBY)

GEOMETRY_EXCLUDED = ("amplitude", "phase")


class ConfigError(ValueError):
    """Erro de configuração (arquivo, seção ou chave inválida)."""


@dataclass(frozen=True)
class SceneSettings:
    """Cena e parâmetros de simulação."""

    scene: Scene
    path: Optional[Path] = None
    snr_db: Optional[float] = 10.0
    duration_s: float = 60.0
    fs: float = 1200.0
    harmonics: int = 5


@dataclass(frozen=True)
class CodingSettings:
    """Origem da codificação e direções de varredura (x no layout)."""

    path: Optional[Path] = None
    task_path: Optional[Path] = None
    synthesizer: str = SYNTH_BPSO
    scan_x: Tuple[float, ...] = (-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5)
    range_m: float = 1.0
    height_m: float = 0.0


@dataclass(frozen=True)
class SweepSpec:
    """Parâmetro varrido, valores, sementes e processos paralelos."""

    parameter: Optional[str] = None
    values: Tuple[Any, ...] = ()
    seeds: Tuple[int, ...] = (0,)
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    """Configuração completa de uma execução."""

    geometry: RisGeometry = field(default_factory=RisGeometry)
    grid: FieldGrid = field(default_factory=FieldGrid)
    scene: SceneSettings = field(default_factory=lambda: SceneSettings(Scene()))
    coding: CodingSettings = field(default_factory=CodingSettings)
    bpso: BpsoConfig = field(default_factory=BpsoConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    vmd: VmdConfig = field(default_factory=VmdConfig)
    decomposer: str = "ivmd"
    vital_window_s: Optional[float] = None
    vital_step_s: float = 10.0
    sweep: SweepSpec = field(default_factory=SweepSpec)
    output_dir: Path = Path("saida")
    seed: int = 0
    transmitter: Optional[Tuple[float, float, float]] = None

    def scan_points(self) -> np.ndarray:
        """Pontos (x, y, z) focados por cada direção de varredura."""
        c = self.coding
        return np.array([FieldGrid.layout_point(x, c.range_m, c.height_m) for x in c.scan_x])

    def simulation_scene(self, seed: int) -> Scene:
        """Cena com a semente dada e o ruído ajustado pela SNR configurada."""
        scene = self.scene.scene
        noise_db = scene.noise_db if self.scene.snr_db is None else snr_to_noise_db(self.scene.snr_db)
        return dataclasses.replace(scene, seed=int(seed), noise_db=noise_db)

    def to_dict(self) -> Dict[str, Any]:
        """Configuração em seções, no mesmo formato aceito por run_config_from_dict."""
        geometry = _plain(self.geometry, GEOMETRY_EXCLUDED)
        geometry["transmissor"] = None if self.transmitter is None else list(self.transmitter)
        vmd = _plain(self.vmd)
        vmd.update({"decompositor": self.decomposer, "janela_s": self.vital_window_s,
                    "passo_s": self.vital_step_s})
        return {
            "geometria": geometry,
            "grade": _plain(self.grid),
            "cena": {
                "arquivo": None if self.scene.path is None else str(self.scene.path),
                "definicao": None if self.scene.path is not None else scene_to_dict(self.scene.scene),
                "snr_db": self.scene.snr_db,
                "duracao_s": self.scene.duration_s,
                "fs": self.scene.fs,
                "harmonicos": self.scene.harmonics,
            },
            "codificacao": {
                "arquivo": None if self.coding.path is None else str(self.coding.path),
                "tarefa": None if self.coding.task_path is None else str(self.coding.task_path),
                "sintetizador": self.coding.synthesizer,
                "direcoes_x": list(self.coding.scan_x),
                "alcance_m": self.coding.range_m,
                "altura_m": self.coding.height_m,
            },
            "bpso": _plain(self.bpso),
            "deteccao": _plain(self.detection),
            "vmd": vmd,
            "varredura": {
                "parametro": self.sweep.parameter,
                "valores": list(self.sweep.values),
                "sementes": list(self.sweep.seeds),
                "processos": self.sweep.workers,
            },
            "saida": {"diretorio": str(self.output_dir), "semente": self.seed},
        }


def _plain(obj, exclude=()) -> Dict[str, Any]:
    record = {}
    for f in dataclasses.fields(obj):
        if f.name in exclude:
            continue
        value = getattr(obj, f.name)
        record[f.name] = list(value) if isinstance(value, tuple) else value
    return record


def _check_keys(section: str, data: Dict[str, Any], allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"[{section}] esperado um objeto")
    for key in data:
        if key not in allowed:
            raise ConfigError(f"[{section}] chave desconhecida '{key}'")


def _build_section(cls, section: str, data: Dict[str, Any], exclude=()):
    allowed = {f.name for f in dataclasses.fields(cls)} - set(exclude)
    _check_keys(section, data, allowed)
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
    try:
        return cls(**values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[{section}] {str(e)}")


def _resolve(path_value: Optional[str], base_dir: Path, section: str, key: str) -> Optional[Path]:
    if path_value is None:
        return None
    path = Path(path_value)
    if not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"[{section}] {key}: arquivo não encontrado ({path})")
    return path


def _scene_settings(data: Dict[str, Any], base_dir: Path) -> SceneSettings:
    _check_keys("cena", data, {"arquivo", "definicao", "snr_db", "duracao_s", "fs", "harmonicos"})
    path = _resolve(data.get("arquivo"), base_dir, "cena", "arquivo")
    try:
        if path is not None:
            scene = load_scene(path)
        else:
            scene = scene_from_dict(data.get("definicao") or {})
    except ValueError as e:
        raise ConfigError(f"[cena] {str(e)}")
    settings = SceneSettings(
        scene=scene,
        path=path,
        snr_db=data.get("snr_db", 10.0),
        duration_s=float(data.get("duracao_s", 60.0)),
        fs=float(data.get("fs", 1200.0)),
        harmonics=int(data.get("harmonicos", 5)),
    )
    if settings.duration_s <= 0 or settings.fs <= 0 or settings.harmonics < 1:
        raise ConfigError("[cena] duracao_s, fs e harmonicos devem ser positivos")
    return settings


def _coding_settings(data: Dict[str, Any], base_dir: Path) -> CodingSettings:
    _check_keys("codificacao", data, {"arquivo", "tarefa", "sintetizador", "direcoes_x", "alcance_m", "altura_m"})
    defaults = CodingSettings()
    settings = CodingSettings(
        path=_resolve(data.get("arquivo"), base_dir, "codificacao", "arquivo"),
        task_path=_resolve(data.get("tarefa"), base_dir, "codificacao", "tarefa"),
        synthesizer=data.get("sintetizador", defaults.synthesizer),
        scan_x=tuple(float(x) for x in data.get("direcoes_x", defaults.scan_x)),
        range_m=float(data.get("alcance_m", defaults.range_m)),
        height_m=float(data.get("altura_m", defaults.height_m)),
    )
    if settings.synthesizer not in SYNTHESIZERS:
        raise ConfigError(f"[codificacao] sintetizador desconhecido: {settings.synthesizer}")
    if not settings.scan_x:
        raise ConfigError("[codificacao] direcoes_x não pode ser vazio")
    return settings


def _sweep_spec(data: Dict[str, Any]) -> SweepSpec:
    _check_keys("varredura", data, {"parametro", "valores", "sementes", "processos"})
    sweep = SweepSpec(
        parameter=data.get("parametro"),
        values=tuple(data.get("valores", ())),
        seeds=tuple(int(s) for s in data.get("sementes", (0,))),
        workers=int(data.get("processos", 1)),
    )
    if sweep.parameter is not None:
        if sweep.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"[varredura] parâmetro desconhecido: {sweep.parameter} "
                              f"(use {', '.join(SWEEP_PARAMETERS)})")
        if not sweep.values:
            raise ConfigError("[varredura] lista de valores vazia")
    if not sweep.seeds or sweep.workers < 1:
        raise ConfigError("[varredura] é preciso ao menos uma semente e um processo")
    return sweep


def run_config_from_dict(data: Dict[str, Any], base_dir: Union[str, Path] = ".") -> RunConfig:
    """
    Constrói a configuração a partir do dicionário em seções.

    Args:
        data: dicionário com as seções de SECTIONS (todas opcionais)
        base_dir: diretório base dos caminhos relativos

    Returns:
        RunConfig: configuração validada
    """
    if not isinstance(data, dict):
        raise ConfigError("A configuração deve ser um objeto JSON")
    for section in data:
        if section not in SECTIONS:
            raise ConfigError(f"Seção desconhecida: '{section}'")
    base_dir = Path(base_dir)

    geometry_data = dict(data.get("geometria", {}))
    transmitter = geometry_data.pop("transmissor", None)
    geometry = _build_section(RisGeometry, "geometria", geometry_data, GEOMETRY_EXCLUDED)
    if transmitter is not None:
        transmitter = tuple(float(v) for v in transmitter)
        try:
            geometry = spherical_illumination(geometry, transmitter)
        except ValueError as e:
            raise ConfigError(f"[geometria] {str(e)}")

    vmd_data = dict(data.get("vmd", {}))
    decomposer = vmd_data.pop("decompositor", "ivmd")
    window_s = vmd_data.pop("janela_s", None)
    step_s = float(vmd_data.pop("passo_s", 10.0))
    if decomposer not in DECOMPOSERS:
        raise ConfigError(f"[vmd] decompositor desconhecido: {decomposer}")

    output = data.get("saida", {})
    _check_keys("saida", output, {"diretorio", "semente"})

    config = RunConfig(
        geometry=geometry,
        grid=_build_section(FieldGrid, "grade", data.get("grade", {})),
        scene=_scene_settings(data.get("cena", {}), base_dir),
        coding=_coding_settings(data.get("codificacao", {}), base_dir),
        bpso=_build_section(BpsoConfig, "bpso", data.get("bpso", {})),
        detection=_build_section(DetectionConfig, "deteccao", data.get("deteccao", {})),
        vmd=_build_section(VmdConfig, "vmd", vmd_data),
        decomposer=decomposer,
        vital_window_s=None if window_s is None else float(window_s),
        vital_step_s=step_s,
        sweep=_sweep_spec(data.get("varredura", {})),
        output_dir=Path(output.get("diretorio", "saida")),
        seed=int(output.get("semente", 0)),
        transmitter=transmitter,
    )
    for x, point in zip(config.coding.scan_x, config.scan_points()):
        if not config.grid.contains(point):
            raise ConfigError(f"[codificacao] direção x = {x} fora da grade")
    if config.detection.confirm_window_s > config.scene.duration_s:
        raise ConfigError("[deteccao] janela de confirmação maior que a duração da cena")
    return config


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Lê e valida o arquivo de configuração.

    Args:
        path: arquivo JSON em seções

    Returns:
        RunConfig: configuração validada; caminhos relativos ao diretório do arquivo
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Arquivo de configuração não encontrado: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"Configuração inválida ({path}): {str(e)}")
    return run_config_from_dict(data, path.parent)


def with_changes(config: RunConfig, changes: Dict[str, Dict[str, Any]]) -> RunConfig:
    """
    Cópia validada da configuração com campos alterados por seção.

    Args:
        config: configuração de origem
        changes: seção → {chave: novo valor}

    Returns:
        RunConfig: nova configuração (a cena é preservada)
    """
    data = config.to_dict()
    for section, values in changes.items():
        if section not in data:
            raise ConfigError(f"Seção desconhecida: '{section}'")
        data[section].update(values)
    updated = run_config_from_dict(data)
    return dataclasses.replace(updated, scene=dataclasses.replace(updated.scene, scene=config.scene.scene))


def with_section(config: RunConfig, section: str, **changes) -> RunConfig:
    """Cópia da configuração com campos de uma seção alterados (usado nas varreduras)."""
    return with_changes(config, {section: changes})


def load_task(path: Union[str, Path], default_grid: Optional[FieldGrid] = None) -> Tuple[BeamTask, FieldGrid, str]:
    """
    Lê uma tarefa de feixes.

    Formato:
        {"modo": "column-shared", "grade": {...campos de FieldGrid...},
         "feixes": [{"harmonico": -3, "x": -1.5, "alcance_m": 1.0, "altura_m": 0.0, "peso": 1.0}]}

    Args:
        path: arquivo JSON da tarefa
        default_grid: grade usada quando a tarefa não define uma

    Returns:
        Tuple[BeamTask, FieldGrid, str]: tarefa, grade de avaliação e modo de simetria
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Arquivo de tarefa não encontrado: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"Tarefa inválida ({path}): {str(e)}")
    _check_keys("tarefa", data, {"modo", "grade", "feixes"})
    grid = _build_section(FieldGrid, "tarefa.grade", data["grade"]) if "grade" in data else (default_grid or FieldGrid())

    pairs = []
    weights = []
    for index, beam in enumerate(data.get("feixes", [])):
        section = f"tarefa.feixes[{index}]"
        _check_keys(section, beam, {"harmonico", "x", "alcance_m", "altura_m", "peso"})
        if "harmonico" not in beam or "x" not in beam:
            raise ConfigError(f"[{section}] 'harmonico' e 'x' são obrigatórios")
        point = FieldGrid.layout_point(float(beam["x"]), float(beam.get("alcance_m", grid.z)),
                                       float(beam.get("altura_m", 0.0)))
        pairs.append((int(beam["harmonico"]), tuple(point)))
        weights.append(float(beam.get("peso", 1.0)))
    if not pairs:
        raise ConfigError("[tarefa] nenhum feixe definido")
    try:
        task = BeamTask.from_pairs(pairs, weights)
    except ValueError as e:
        raise ConfigError(f"[tarefa] {str(e)}")
    return task, grid, data.get("modo", MODE_COLUMN)


def default_config_dict() -> Dict[str, Any]:
    """Configuração padrão gravada quando o arquivo não existe."""
    data = RunConfig(detection=DetectionConfig(mu_mode=MU_ABSOLUTE)).to_dict()
    data["cena"]["definicao"] = {"persons": [{"position": [0.5, 0.0, 1.0]}]}
    return data
