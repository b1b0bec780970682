"""
Tipos da detecção: fluxos harmônicos, linha de base, configuração e o
estado da máquina de atribuição de feixes.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

STATUS_EMPTY = "empty"
STATUS_CANDIDATE = "candidate"
STATUS_ASSIGNED = "assigned"

EVENT_CANDIDATE = "candidate"
EVENT_ASSIGNED = "assigned"
EVENT_RELEASED = "released"
EVENT_CAPACITY = "capacity"

MU_RELATIVE = "relative"
MU_ABSOLUTE = "absolute"

DEFAULT_POOL = (-3, -1, 1, 3)


class DetectionError(ValueError):
    """Erro de domínio da detecção."""


def pool_order(harmonics: Sequence[int]) -> Tuple[int, ...]:
    """Ordena harmônicos por |k| e depois por k."""
    return tuple(sorted((int(k) for k in harmonics), key=lambda k: (abs(k), k)))


@dataclass(frozen=True, eq=False)
class HarmonicStream:
    """Fluxo complexo em banda base de um harmônico numa direção."""

    samples: np.ndarray
    fs: float
    harmonic: int
    direction: int = 0
    start_s: float = 0.0

    @property
    def duration(self) -> float:
        return self.samples.size / self.fs


@dataclass(frozen=True, eq=False)
class BaselineIntensity:
    """Intensidade da cena vazia por direção de varredura."""

    intensities: np.ndarray
    dwell: float
    fs: float

    def __post_init__(self):
        values = np.asarray(self.intensities, dtype=float).reshape(-1)
        if values.size < 1:
            raise DetectionError("A linha de base precisa de pelo menos uma direção")
        if np.any(values < 0):
            raise DetectionError("Intensidades da linha de base devem ser >= 0")
        object.__setattr__(self, "intensities", values)

    def __len__(self) -> int:
        return self.intensities.size


@dataclass(frozen=True)
class DetectionConfig:
    """
    Parâmetros da detecção.

    Com mu_mode = "relative" o limiar de intensidade de cada direção é
    mu·I^N_d; com "absolute" é o próprio mu.
    """

    mu: float = 0.05
    mu_mode: str = MU_RELATIVE
    resp_band: Tuple[float, float] = (0.1, 0.7)
    prominence_db: float = 6.0
    confirm_window_s: float = 20.0
    loss_timeout_s: float = 30.0
    demux_half_bandwidth_hz: Optional[float] = None
    fir_taps: int = 257
    analysis_fs: float = 20.0
    welch_segment_s: float = 8.0
    harmonic_pool: Tuple[int, ...] = DEFAULT_POOL
    scan_harmonic: int = 1
    peak_gating: bool = True

    def __post_init__(self):
        if not self.mu > 0:
            raise DetectionError("mu deve ser positivo")
        if self.mu_mode not in (MU_RELATIVE, MU_ABSOLUTE):
            raise DetectionError(f"Modo de mu desconhecido: {self.mu_mode}")
        lo, hi = self.resp_band
        if not 0 < lo < hi:
            raise DetectionError("Faixa respiratória deve satisfazer 0 < inferior < superior")
        if self.confirm_window_s < 2.0 / lo:
            raise DetectionError(f"Janela de confirmação deve ser >= {2.0 / lo:.1f} s")
        if self.fir_taps < 3 or self.fir_taps % 2 == 0:
            raise DetectionError("O FIR precisa de um número ímpar de coeficientes >= 3")
        if len(set(self.harmonic_pool)) != len(self.harmonic_pool) or 0 in self.harmonic_pool:
            raise DetectionError("O conjunto de harmônicos deve ter ordens distintas e não nulas")
        object.__setattr__(self, "resp_band", (float(lo), float(hi)))
        object.__setattr__(self, "harmonic_pool", pool_order(self.harmonic_pool))

    def threshold(self, baseline: float) -> float:
        return self.mu * baseline if self.mu_mode == MU_RELATIVE else self.mu


@dataclass(frozen=True)
class AssignmentEvent:
    """Evento da máquina de atribuição."""

    t: float
    direction: int
    event: str
    harmonic: Optional[int] = None

    def to_dict(self) -> dict:
        return {"t": self.t, "direction": self.direction, "event": self.event, "harmonic": self.harmonic}


@dataclass(frozen=True)
class AssignmentState:
    """
    Estado imutável da atribuição de feixes.

    status[d] ∈ {empty, candidate, assigned}; harmonic[d] é o harmônico da
    direção atribuída; pool guarda os harmônicos livres na ordem de
    preferência; events são os eventos emitidos pela última atualização.
    positions guarda a coordenada x de cada direção, quando conhecida, e
    habilita a escolha de harmônicos conjugados para direções espelhadas.
    """

    status: Tuple[str, ...]
    harmonic: Tuple[Optional[int], ...]
    pool: Tuple[int, ...]
    last_seen: Tuple[Optional[float], ...]
    harmonic_set: Tuple[int, ...]
    events: Tuple[AssignmentEvent, ...] = field(default=(), compare=False)
    positions: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.positions is not None:
            positions = tuple(float(x) for x in self.positions)
            if len(positions) != len(self.status):
                raise DetectionError(f"Esperadas {len(self.status)} posições, recebidas {len(positions)}")
            object.__setattr__(self, "positions", positions)

    @classmethod
    def initial(cls, directions: int, harmonics: Sequence[int] = DEFAULT_POOL,
                positions: Optional[Sequence[float]] = None) -> "AssignmentState":
        if directions < 1:
            raise DetectionError("É preciso ao menos uma direção de varredura")
        ordered = pool_order(harmonics)
        return cls(
            status=(STATUS_EMPTY,) * directions,
            harmonic=(None,) * directions,
            pool=ordered,
            last_seen=(None,) * directions,
            harmonic_set=ordered,
            positions=None if positions is None else tuple(positions),
        )

    @property
    def directions(self) -> int:
        return len(self.status)

    def visit_order(self) -> Tuple[int, ...]:
        """Direções do centro para as bordas; sem posições, na ordem dos índices."""
        if self.positions is None:
            return tuple(range(self.directions))
        return tuple(sorted(range(self.directions), key=lambda d: (abs(self.positions[d]), d)))

    def mirror_of(self, direction: int) -> Optional[int]:
        """Direção em -x da direção dada, se existir."""
        if self.positions is None:
            return None
        x = self.positions[direction]
        for d, other in enumerate(self.positions):
            if d != direction and np.isclose(other, -x, atol=1e-6):
                return d
        return None

    def assigned(self) -> dict:
        """Direção → harmônico das direções atribuídas."""
        return {d: k for d, (s, k) in enumerate(zip(self.status, self.harmonic)) if s == STATUS_ASSIGNED}

    def check_consistency(self) -> None:
        """Harmônicos atribuídos distintos e pool ∪ atribuídos = conjunto completo."""
        used = [k for s, k in zip(self.status, self.harmonic) if s == STATUS_ASSIGNED]
        if len(set(used)) != len(used):
            raise DetectionError(f"Harmônico atribuído a duas direções: {used}")
        if set(used) & set(self.pool) or set(used) | set(self.pool) != set(self.harmonic_set):
            raise DetectionError("Pool de harmônicos inconsistente com as atribuições")
