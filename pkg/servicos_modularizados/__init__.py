"""
Pacote de serviços modularizados do sistema de sensoriamento multipessoa.
Este pacote contém:
- 'ris_model': modelo de campo próximo da metassuperfície STC
- 'coding_optimizer': síntese de codificações por BPSO
- 'scene_sim': simulação de ecos de cenas com pessoas
- 'detection': separação de harmônicos, detecção e atribuição de feixes
- 'vmd': decomposição variacional de modos e estimativa de RR/HR
- 'harness': configuração, pipeline, CLI e varreduras
"""

__all__ = ["ris_model", "coding_optimizer", "scene_sim", "detection", "vmd", "harness"]
