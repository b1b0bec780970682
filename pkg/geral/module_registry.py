"""
Sistema de registro e execução dos estágios do pipeline.

Este módulo implementa um registro que permite:
1. Registrar estágios com suas dependências
2. Ordenar os estágios respeitando as dependências
3. Executar o pipeline, retomando estágios cujos artefatos já existem
4. Registrar falhas com a identificação do estágio
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

try:
    from .app_logger import log_error, log_success, log_warning
    from .artifact_service import ArtifactService
    from .module_interfaces import PipelineStageInterface
except ImportError:
    from app_logger import log_error, log_success, log_warning
    from artifact_service import ArtifactService
    from module_interfaces import PipelineStageInterface

STATUS_PENDING = "pendente"
STATUS_DONE = "executado"
STATUS_RESUMED = "retomado"
STATUS_FAILED = "falhou"
STATUS_SKIPPED = "ignorado"


@dataclass
class StageInfo:
    """Armazena informações sobre um estágio registrado."""

    name: str
    stage: PipelineStageInterface
    description: str = ""
    dependencies: List[str] = field(default_factory=list)
    status: str = STATUS_PENDING
    error: Optional[str] = None


class StageRegistry:
    """
    Registro centralizado dos estágios do pipeline.
    Gerencia a ordem de execução, as dependências e a retomada por artefatos.
    """

    def __init__(self, artifacts: ArtifactService):
        """Inicializa o registro de estágios."""
        self.artifacts = artifacts
        self.stages: Dict[str, StageInfo] = {}

    def register_stage(self, stage: PipelineStageInterface, description: str = "") -> bool:
        """
        Registra um novo estágio.

        Args:
            stage: Implementação do estágio
            description: Descrição curta

        Returns:
            bool: True se o registro foi bem-sucedido
        """
        if stage.name in self.stages:
            log_warning(f"Estágio '{stage.name}' já está registrado. Sobrescrevendo.")
        self.stages[stage.name] = StageInfo(
            name=stage.name,
            stage=stage,
            description=description,
            dependencies=list(stage.depends_on),
        )
        return True

    def execution_order(self) -> List[str]:
        """
        Ordena os estágios de forma que cada um venha depois das dependências.

        Returns:
            List[str]: nomes dos estágios em ordem de execução
        """
        order: List[str] = []
        visiting = set()

        def visit(name: str):
            if name in order:
                return
            if name in visiting:
                raise ValueError(f"Dependência circular envolvendo o estágio '{name}'")
            if name not in self.stages:
                raise ValueError(f"Estágio '{name}' não está registrado")
            visiting.add(name)
            for dep in self.stages[name].dependencies:
                visit(dep)
            visiting.discard(name)
            order.append(name)

        for name in self.stages:
            visit(name)
        return order

    def can_resume(self, name: str) -> bool:
        """True se todos os artefatos do estágio já existem."""
        artifacts = self.stages[name].stage.artifacts()
        return bool(artifacts) and all(self.artifacts.exists(a) for a in artifacts)

    def run(self, context: Dict[str, Any], resume: bool = False) -> Dict[str, StageInfo]:
        """
        Executa o pipeline.

        Um estágio que falha é marcado com a mensagem de erro e seus
        dependentes são ignorados; os demais continuam.

        Args:
            context: Dicionário compartilhado entre os estágios
            resume: Se True, carrega estágios com artefatos completos em vez de executá-los

        Returns:
            Dict[str, StageInfo]: estado final de cada estágio
        """
        for name in self.execution_order():
            info = self.stages[name]
            blocked = [d for d in info.dependencies
                       if self.stages[d].status not in (STATUS_DONE, STATUS_RESUMED)]
            if blocked:
                info.status = STATUS_SKIPPED
                info.error = f"dependências não concluídas: {', '.join(blocked)}"
                log_warning(f"Estágio '{name}' ignorado ({info.error})")
                continue
            try:
                if resume and self.can_resume(name):
                    info.stage.load(context)
                    info.status = STATUS_RESUMED
                    log_success(f"Estágio '{name}' retomado a partir dos artefatos")
                else:
                    info.stage.run(context)
                    info.status = STATUS_DONE
                    log_success(f"Estágio '{name}' executado")
            except Exception as e:
                info.status = STATUS_FAILED
                info.error = str(e)
                log_error(f"Erro no estágio '{name}': {str(e)}")
        return self.stages

    def failures(self) -> Dict[str, str]:
        return {name: info.error or "" for name, info in self.stages.items()
                if info.status in (STATUS_FAILED, STATUS_SKIPPED)}

    def summary(self) -> Dict[str, str]:
        return {name: info.status for name, info in self.stages.items()}
