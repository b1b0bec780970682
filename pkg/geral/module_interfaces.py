"""
Interfaces para componentes e serviços entre módulos.

Este módulo define interfaces formais que os módulos devem implementar
para que o harness possa trocar implementações (VMD de referência ou
aprimorada, codificação por BPSO ou por atraso de fase) e encadear os
estágios do pipeline.
"""

import abc
from typing import Any, Dict, List


class DecompositionInterface(abc.ABC):
    """Interface para decomposições de sinais fisiológicos."""

    name: str = ""

    @abc.abstractmethod
    def decompose(self, series: Any, fs: float) -> Any:
        """
        Decompõe uma série real em modos.

        Args:
            series: Série temporal real
            fs: Taxa de amostragem em Hz

        Returns:
            Resultado da decomposição (sinais reconstruídos e modos)
        """
        pass


class CodingSynthesisInterface(abc.ABC):
    """Interface para geradores de codificação espaço-temporal."""

    name: str = ""

    @abc.abstractmethod
    def synthesize(self, task: Any) -> Any:
        """
        Gera uma codificação para uma tarefa de feixes.

        Args:
            task: Tarefa com harmônicos e alvos

        Returns:
            Codificação gerada
        """
        pass


class PipelineStageInterface(abc.ABC):
    """Interface para estágios do pipeline com artefatos em disco."""

    name: str = ""
    depends_on: List[str] = []

    @abc.abstractmethod
    def artifacts(self) -> List[str]:
        """
        Lista os artefatos (caminhos relativos) produzidos pelo estágio.

        Returns:
            Lista de nomes de arquivos
        """
        pass

    @abc.abstractmethod
    def run(self, context: Dict[str, Any]) -> None:
        """
        Executa o estágio, grava seus artefatos e publica resultados no contexto.

        Args:
            context: Dicionário compartilhado entre os estágios
        """
        pass

    @abc.abstractmethod
    def load(self, context: Dict[str, Any]) -> None:
        """
        Reconstrói os resultados do estágio a partir dos artefatos gravados.

        Args:
            context: Dicionário compartilhado entre os estágios
        """
        pass
