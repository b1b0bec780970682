"""
Linha de comando do sistema de detecção multipessoa e sinais vitais.

Códigos de saída: 0 sucesso, 2 erro de configuração, 3 erro no pipeline.
"""

import argparse
import dataclasses
import os
import sys
from pathlib import Path

import config as env_config
from geral import log_error, log_success, set_debug_mode
from servicos_modularizados.harness import (
    ConfigError,
    PipelineError,
    cmd_bench,
    cmd_detect,
    cmd_pattern,
    cmd_run,
    cmd_simulate,
    cmd_synthesize_coding,
    cmd_vmd,
    load_run_config,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PIPELINE = 3


def build_parser():
    parser = argparse.ArgumentParser(
        description="Detecção multipessoa e sinais vitais com RIS espaço-temporal (simulação)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exemplos:
  python app.py synthesize-coding --config config/sensing_config.json
  python app.py pattern --codificacao saida/codificacao.txt
  python app.py run --retomar
  python app.py bench --config config/sensing_config.json
  python app.py vmd --sinal sinal.csv
        """
    )
    parser.add_argument("--config", default=env_config.SENSING_CONFIG_PATH,
                        help=f"Arquivo de configuração (padrão: {env_config.SENSING_CONFIG_PATH})")
    parser.add_argument("--saida", default=None, help="Diretório de saída (sobrepõe [saida].diretorio)")
    parser.add_argument("--semente", type=int, default=None, help="Semente mestre (sobrepõe [saida].semente)")
    parser.add_argument("--debug", action="store_true", default=env_config.SENSING_DEBUG,
                        help="Registra mensagens de depuração")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synthesize-coding", help="Otimiza a codificação da tarefa de feixes (BPSO)")
    pattern = sub.add_parser("pattern", help="Exporta o padrão de campo próximo por harmônico")
    pattern.add_argument("--codificacao", default=None, help="Arquivo de codificação")
    pattern.add_argument("--kmax", type=int, default=None, help="Maior |k| exportado")
    simulate = sub.add_parser("simulate", help="Simula o eco com uma codificação fixa")
    simulate.add_argument("--codificacao", default=None, help="Arquivo de codificação")
    sub.add_parser("detect", help="Linha de base, varredura e atribuição de feixes")
    run = sub.add_parser("run", help="Pipeline completo com relatório")
    run.add_argument("--retomar", action="store_true", help="Reaproveita artefatos existentes")
    sub.add_parser("bench", help="Varredura de parâmetros configurada em [varredura]")
    vmd = sub.add_parser("vmd", help="Decompõe um sinal CSV (t, valor)")
    vmd.add_argument("--sinal", required=True, help="CSV com tempo e valor")
    vmd.add_argument("--fs", type=float, default=None, help="Taxa de amostragem em Hz")
    return parser


def load_config(args):
    config = load_run_config(args.config)
    changes = {}
    seed = args.semente if args.semente is not None else env_config.master_seed()
    if seed is not None:
        changes["seed"] = seed
    if args.saida is not None:
        changes["output_dir"] = Path(args.saida)
    elif "SENSING_OUTPUT_DIR" in os.environ:
        changes["output_dir"] = Path(env_config.SENSING_OUTPUT_DIR)
    return dataclasses.replace(config, **changes) if changes else config


def dispatch(args, config):
    if args.command == "synthesize-coding":
        result = cmd_synthesize_coding(config)
        log_success(f"Codificação gerada com aptidão {result.best_fitness:.6g}")
    elif args.command == "pattern":
        cmd_pattern(config, args.codificacao, args.kmax)
    elif args.command == "simulate":
        cmd_simulate(config, args.codificacao)
    elif args.command == "detect":
        cmd_detect(config)
    elif args.command == "run":
        report = cmd_run(config, resume=args.retomar)
        if not report.ok:
            return EXIT_PIPELINE
    elif args.command == "bench":
        cmd_bench(config)
    elif args.command == "vmd":
        cmd_vmd(config, args.sinal, args.fs)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    set_debug_mode(args.debug)
    if args.config == env_config.SENSING_CONFIG_PATH:
        env_config.ensure_config_dir()
    is_valid, errors = env_config.validate_config(args.config)
    if not is_valid:
        for error in errors:
            log_error(f"Erro de configuração: {error}")
        return EXIT_CONFIG
    try:
        config = load_config(args)
        return dispatch(args, config)
    except ConfigError as e:
        log_error(f"Erro de configuração: {str(e)}")
        return EXIT_CONFIG
    except PipelineError as e:
        log_error(f"Erro no estágio '{e.stage}': {str(e)}")
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
