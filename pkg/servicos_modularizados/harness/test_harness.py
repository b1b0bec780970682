"""
Testes do harness: configuração, pipeline completo, comandos e varreduras.
"""

import copy
import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

import app
from servicos_modularizados.coding_optimizer import load_coding, matched_multibeam_coding, phase_delay_coding, save_coding
from servicos_modularizados.detection import EVENT_ASSIGNED, EVENT_CANDIDATE
from servicos_modularizados.harness import (
    BENCH_COLUMNS,
    REPORT_FILE,
    ConfigError,
    aggregate,
    cmd_bench,
    cmd_detect,
    cmd_pattern,
    cmd_run,
    cmd_simulate,
    cmd_synthesize_coding,
    cmd_vmd,
    detection_metrics,
    load_run_config,
    load_task,
    monitor_start,
    run_config_from_dict,
    stage_seeds,
    vital_metrics,
    with_section,
)
from servicos_modularizados.harness.bench import oracle_assignment
from servicos_modularizados.harness.pipeline import build_task, synthesize
from servicos_modularizados.ris_model import StcCoding

PERSON = {"position": [0.5, 0.0, 1.0]}
CLUTTER = {"position": [-1.0, 0.0, 1.3], "reflectivity": 0.8}
SHIPPED_CONFIG = Path(__file__).resolve().parents[2] / "config" / "sensing_config.json"


def config_dict(output_dir, persons=(PERSON,)):
    return {
        "geometria": {"rows": 8, "cols": 8, "code_length": 4},
        "grade": {"z": 1.0, "x_extent": [-1.5, 1.5], "y_extent": [-0.5, 0.5], "resolution": [31, 11]},
        "cena": {
            "definicao": {"persons": list(persons), "reflectors": [CLUTTER], "noise_db": -30.0},
            "snr_db": None,
            "duracao_s": 60.0,
            "fs": 1200.0,
        },
        "codificacao": {"sintetizador": "atraso_de_fase", "direcoes_x": [-1.0, -0.5, 0.0, 0.5, 1.0]},
        "bpso": {"swarm_size": 10, "iterations": 20},
        "deteccao": {"mu": 0.05, "mu_mode": "absolute", "confirm_window_s": 20.0},
        "saida": {"diretorio": str(output_dir), "semente": 0},
    }


def write_config(directory, data, name="config.json"):
    path = directory / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def small_config(tmp_path, persons=(PERSON,)):
    return run_config_from_dict(config_dict(tmp_path / "saida", persons))


def write_task(directory, beams, name="tarefa.json"):
    path = directory / name
    path.write_text(json.dumps({"modo": "column-shared", "feixes": beams}), encoding="utf-8")
    return path


def desk_signal_csv(path, fs=20.0, duration=60.0, seed=0):
    t = np.arange(int(fs * duration)) / fs
    rng = np.random.default_rng(seed)
    value = np.sin(2 * np.pi * 0.25 * t) + 0.1 * np.sin(2 * np.pi * 1.35 * t) + 0.02 * rng.standard_normal(t.size)
    pd.DataFrame({"t_s": t, "value": value}).to_csv(path, index=False)
    return path


class TestConfig:
    def test_to_dict_roundtrip(self, tmp_path):
        config = small_config(tmp_path)
        assert run_config_from_dict(config.to_dict()).to_dict() == config.to_dict()

    def test_sections_reach_module_configs(self, tmp_path):
        config = small_config(tmp_path)
        assert config.geometry.rows == 8 and config.geometry.code_length == 4
        assert config.grid.resolution == (31, 11)
        assert config.detection.mu_mode == "absolute"
        assert config.scene.snr_db is None
        assert config.scan_points().shape == (5, 3)
        assert config.scan_points()[3].tolist() == [0.5, 0.0, 1.0]

    def test_simulation_scene_applies_seed_and_snr(self, tmp_path):
        data = config_dict(tmp_path)
        data["cena"]["snr_db"] = 10.0
        config = run_config_from_dict(data)
        scene = config.simulation_scene(7)
        assert scene.seed == 7
        assert scene.noise_db == pytest.approx(-10.0)
        assert small_config(tmp_path).simulation_scene(7).noise_db == pytest.approx(-30.0)

    @pytest.mark.parametrize("mutate", [
        lambda d: d.update(extra={}),
        lambda d: d["deteccao"].update(alvo=1),
        lambda d: d["deteccao"].update(mu=-1.0),
        lambda d: d["geometria"].update(rows=0),
        lambda d: d["codificacao"].update(sintetizador="genetico"),
        lambda d: d["codificacao"].update(direcoes_x=[3.0]),
        lambda d: d["codificacao"].update(arquivo="inexistente.txt"),
        lambda d: d.update(vmd={"decompositor": "emd"}),
        lambda d: d.update(varredura={"parametro": "ganho", "valores": [1]}),
        lambda d: d.update(varredura={"parametro": "mu", "valores": []}),
        lambda d: d["deteccao"].update(confirm_window_s=90.0),
    ])
    def test_invalid_config_rejected(self, tmp_path, mutate):
        data = config_dict(tmp_path)
        mutate(data)
        with pytest.raises(ConfigError):
            run_config_from_dict(data, tmp_path)

    def test_error_names_section(self, tmp_path):
        data = config_dict(tmp_path)
        data["deteccao"]["alvo"] = 1
        with pytest.raises(ConfigError, match=r"\[deteccao\].*alvo"):
            run_config_from_dict(data)

    def test_relative_paths_resolve_against_config_dir(self, tmp_path):
        scene = {"persons": [PERSON], "noise_db": -30.0}
        (tmp_path / "cena.json").write_text(json.dumps(scene), encoding="utf-8")
        data = config_dict(tmp_path / "saida")
        data["cena"] = {"arquivo": "cena.json", "snr_db": None}
        config = load_run_config(write_config(tmp_path, data))
        assert config.scene.path == tmp_path / "cena.json"
        assert config.scene.scene.persons[0].position == (0.5, 0.0, 1.0)

    def test_missing_and_malformed_files(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "nada.json")
        broken = tmp_path / "quebrado.json"
        broken.write_text("{ nao e json", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(broken)

    def test_with_section_keeps_scene(self, tmp_path):
        config = small_config(tmp_path)
        changed = with_section(config, "deteccao", mu=0.2)
        assert changed.detection.mu == 0.2
        assert changed.scene.scene == config.scene.scene
        assert config.detection.mu == 0.05

    def test_stage_seeds_are_distinct_and_stable(self):
        assert stage_seeds(3) == stage_seeds(3)
        assert len(set(stage_seeds(3))) == 3
        assert stage_seeds(3) != stage_seeds(4)

    def test_monitor_starts_after_scan(self, tmp_path):
        assert monitor_start(small_config(tmp_path)) == pytest.approx(5 * 20.0)


class TestTask:
    def test_load_task(self, tmp_path):
        path = write_task(tmp_path, [
            {"harmonico": -1, "x": -0.5},
            {"harmonico": 1, "x": 0.5, "alcance_m": 1.0, "peso": 2.0},
        ])
        task, grid, mode = load_task(path, small_config(tmp_path).grid)
        assert len(task) == 2
        assert mode == "column-shared"
        assert grid.resolution == (31, 11)

    def test_unknown_beam_key_rejected(self, tmp_path):
        path = write_task(tmp_path, [{"harmonico": -1, "alvo": [0.5, 0, 1]}])
        with pytest.raises(ConfigError, match="alvo"):
            load_task(path)

    def test_empty_task_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_task(write_task(tmp_path, []))


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    base = tmp_path_factory.mktemp("execucao")
    config = run_config_from_dict(config_dict(base / "saida"))
    report = cmd_run(config)
    return config, report


class TestRun:
    def test_person_detected_and_measured(self, full_run):
        _, report = full_run
        assert report.ok
        assert report.detections == 1
        assert report.false_alarms == 0 and report.missed == 0
        person = report.persons[0]
        assert person.direction == 3
        assert person.harmonic == -1
        assert person.person == 0
        assert person.truth_rr_rpm == pytest.approx(15.0)
        assert person.rr_error < 1.0
        assert person.hr_error < 5.0
        assert person.timeline

    def test_artifacts_written(self, full_run):
        config, _ = full_run
        out = config.output_dir
        for name in ("linha_de_base.csv", "varredura.csv", "codificacao.txt", "aptidao.csv",
                     "monitor_d0.txt", "monitor_d0.bin", "sinais_vitais.csv", "linha_do_tempo.csv",
                     "movimento_d3.csv", REPORT_FILE):
            assert (out / name).exists(), name
        report = json.loads((out / REPORT_FILE).read_text(encoding="utf-8"))
        assert report["detections"] == 1
        assert report["config"]["saida"]["semente"] == 0

    def test_event_log(self, full_run):
        _, report = full_run
        events = [(e["direction"], e["event"]) for e in report.events]
        assert (3, EVENT_CANDIDATE) in events
        assert (3, EVENT_ASSIGNED) in events
        assert all(e["direction"] == 3 for e in report.events)

    def test_monitor_coding_focuses_assigned_direction(self, full_run):
        config, _ = full_run
        coding, _ = load_coding(config.output_dir / "codificacao.txt")
        expected = phase_delay_coding(config.geometry, tuple(config.scan_points()[3]), -1, config.bpso.mode)
        assert np.array_equal(coding.bits, expected.bits)

    def test_resume_reuses_every_stage(self, full_run):
        config, report = full_run
        resumed = cmd_run(config, resume=True)
        assert set(resumed.stages.values()) == {"retomado"}
        assert resumed.persons == report.persons
        assert resumed.events == report.events

    @pytest.mark.slow
    def test_rerun_is_deterministic(self, full_run, tmp_path):
        config, report = full_run
        again = cmd_run(with_section(config, "saida", diretorio=str(tmp_path / "outra")))
        assert again.persons == report.persons
        assert again.events == report.events
        assert again.stages == report.stages

    def test_wrong_coding_geometry_reports_failure(self, tmp_path):
        coding_path = save_coding(StcCoding.constant(4, 4, 4), tmp_path / "errada.txt")
        data = config_dict(tmp_path / "saida")
        data["codificacao"]["arquivo"] = str(coding_path)
        report = cmd_run(run_config_from_dict(data))
        assert not report.ok
        assert set(report.failures) == {"codificacao", "monitoramento", "sinais_vitais"}
        assert report.stages["varredura"] == "executado"
        assert report.detections == 1
        assert report.persons[0].rr_rpm is None
        assert (tmp_path / "saida" / REPORT_FILE).exists()


class TestCommands:
    def test_detect_finds_person(self, tmp_path):
        state = cmd_detect(small_config(tmp_path))
        assert state.assigned() == {3: -1}

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_detect_empty_scene(self, tmp_path, seed):
        config = with_section(small_config(tmp_path, persons=()), "saida", semente=seed)
        assert cmd_detect(config).assigned() == {}

    def test_synthesize_coding(self, tmp_path):
        data = config_dict(tmp_path / "saida")
        data["codificacao"]["tarefa"] = str(write_task(tmp_path, [
            {"harmonico": -1, "x": -0.5}, {"harmonico": 1, "x": 0.5},
        ]))
        config = run_config_from_dict(data)
        first = cmd_synthesize_coding(config)
        lines = (tmp_path / "saida" / "codificacao.txt").read_text(encoding="utf-8").strip().splitlines()
        assert len(lines) == config.geometry.code_length + 1
        assert len(first.fitness_trace) == 20
        second = cmd_synthesize_coding(config)
        assert second.best_fitness == first.best_fitness
        assert np.array_equal(second.best_coding.bits, first.best_coding.bits)

    def test_phase_delay_synthesizer_serves_several_beams(self, tmp_path):
        config = small_config(tmp_path)
        task = build_task(config, {1: -1, 3: 1})
        result = synthesize(config, task)
        assert np.isnan(result.best_fitness)
        assert result.best_coding.equals(matched_multibeam_coding(task, config.geometry, config.bpso.mode))

    def test_synthesize_without_task(self, tmp_path):
        with pytest.raises(ConfigError):
            cmd_synthesize_coding(small_config(tmp_path))

    def test_pattern_of_constant_coding(self, tmp_path):
        config = small_config(tmp_path)
        coding_path = save_coding(StcCoding.constant(8, 8, 4), tmp_path / "constante.txt")
        written = cmd_pattern(config, coding_path, k_max=2)
        assert sorted(written) == [-2, -1, 0, 1, 2]
        summary = pd.read_csv(config.output_dir / "padrao" / "resumo.csv")
        energy = dict(zip(summary["k"], summary["energy"]))
        assert energy[0] > 0
        assert all(energy[k] < 1e-12 * energy[0] for k in (-2, -1, 1, 2))
        table = pd.read_csv(written[0])
        assert len(table) == config.grid.size

    def test_pattern_without_coding(self, tmp_path):
        with pytest.raises(ConfigError):
            cmd_pattern(small_config(tmp_path))

    def test_simulate(self, tmp_path):
        data = config_dict(tmp_path / "saida")
        data["cena"]["duracao_s"] = 20.0
        config = run_config_from_dict(data)
        echo = cmd_simulate(config)
        assert echo.streams.shape == (1, int(20.0 * 1200.0))
        assert (config.output_dir / "eco").is_dir()
        assert any((config.output_dir / "eco").glob("*.csv"))

    def test_vmd_on_recorded_signal(self, tmp_path):
        signal = desk_signal_csv(tmp_path / "sinal.csv")
        config = small_config(tmp_path)
        imfs = cmd_vmd(config, signal)
        assert imfs.s_r.size == 1200
        out = config.output_dir / "vmd"
        report = json.loads((out / "vmd_relatorio.json").read_text(encoding="utf-8"))
        assert report["fs"] == pytest.approx(20.0)
        assert report["estimate"]["rr_rpm"] == pytest.approx(15.0, abs=1.0)
        assert (out / "s_r.csv").exists() and (out / "s_h.csv").exists()

    def test_vmd_missing_signal(self, tmp_path):
        with pytest.raises(ConfigError):
            cmd_vmd(small_config(tmp_path), tmp_path / "nada.csv")


class TestBench:
    def test_aggregate_appends_means(self):
        table = pd.DataFrame([
            {"parameter": "mu", "value": 0.05, "seed": s, "variant": "deteccao",
             "detections": d, "false_alarms": 0, "intensity_false_alarms": 0, "missed": 1 - d,
             "rr_error_mean": np.nan, "hr_error_mean": np.nan, "rr_error_max": np.nan, "hr_error_max": np.nan}
            for s, d in ((0, 1), (1, 0))
        ], columns=BENCH_COLUMNS)
        result = aggregate(table)
        assert len(result) == 3
        mean = result.iloc[-1]
        assert mean["seed"] == "media"
        assert mean["detections"] == pytest.approx(0.5)
        assert aggregate(table.iloc[:0]).empty

    def test_mu_sweep(self, tmp_path):
        config = with_section(small_config(tmp_path), "varredura", parametro="mu", valores=[0.05], sementes=[0])
        table = cmd_bench(config)
        assert list(table.columns) == BENCH_COLUMNS
        assert table.iloc[0]["detections"] == 1
        assert table.iloc[0]["false_alarms"] == 0
        assert (config.output_dir / "bench_mu.csv").exists()
        assert (config.output_dir / "bench" / "mu_0_s0" / "linhas.json").exists()

    def test_bench_without_parameter(self, tmp_path):
        with pytest.raises(ConfigError):
            cmd_bench(small_config(tmp_path))

    @pytest.mark.slow
    def test_parallel_matches_serial(self, tmp_path):
        base = with_section(small_config(tmp_path), "varredura", parametro="mu", valores=[0.05, 0.5],
                            sementes=[0, 1])
        serial = cmd_bench(base)
        parallel = cmd_bench(with_section(base, "varredura", processos=2))
        pd.testing.assert_frame_equal(serial, parallel)

    @pytest.mark.slow
    def test_imf_sweep_compares_decomposers(self, tmp_path):
        config = with_section(small_config(tmp_path), "varredura", parametro="imf", valores=[6], sementes=[0])
        table = cmd_bench(config)
        rows = table[table["seed"] != "media"]
        assert sorted(rows["variant"]) == ["ivmd", "vmd"]
        assert rows["rr_error_mean"].notna().all()

    def test_oracle_pairs_mirrored_persons(self, tmp_path):
        persons = [{"position": [x, 0.0, 1.0]} for x in (-1.0, -0.5, 0.5, 1.0)]
        config = small_config(tmp_path, persons=persons)
        assert oracle_assignment(config, config.scene.scene) == {1: -1, 3: 1, 0: -3, 4: 3}

    @pytest.mark.slow
    def test_distance_sweep_hurts_heart_rate_first(self, tmp_path):
        config = with_section(small_config(tmp_path), "cena", snr_db=10.0)
        config = with_section(config, "varredura", parametro="distance", valores=[1.0, 3.0], sementes=list(range(5)))
        table = cmd_bench(config)
        means = table[table["seed"] == "media"].set_index("value")
        rr_growth = means.loc[3.0, "rr_error_mean"] - means.loc[1.0, "rr_error_mean"]
        hr_growth = means.loc[3.0, "hr_error_mean"] - means.loc[1.0, "hr_error_mean"]
        assert np.isfinite(rr_growth) and np.isfinite(hr_growth)
        assert hr_growth > rr_growth

    @pytest.mark.slow
    def test_lower_mu_raises_intensity_false_alarms(self, tmp_path):
        config = with_section(small_config(tmp_path), "deteccao", peak_gating=False)
        config = with_section(config, "varredura", parametro="mu", valores=[0.05, 1e-3, 1e-6],
                              sementes=list(range(3)))
        table = cmd_bench(config)
        means = table[table["seed"] == "media"]["intensity_false_alarms"].to_numpy(dtype=float)
        assert np.all(np.diff(means) >= 0)
        assert means[-1] > means[0]


@pytest.fixture(scope="module")
def four_persons(tmp_path_factory):
    config = load_run_config(SHIPPED_CONFIG)
    return with_section(config, "saida", diretorio=str(tmp_path_factory.mktemp("quatro")))


@pytest.mark.slow
class TestFourPersonScene:
    SEEDS = range(20)

    def test_all_persons_assigned_without_false_alarms(self, four_persons):
        for seed in self.SEEDS:
            metrics = detection_metrics(four_persons, seed)
            assert metrics["detections"] == 4, seed
            assert metrics["false_alarms"] == 0 and metrics["missed"] == 0, seed

    def test_vital_sign_errors(self, four_persons):
        passed = 0
        for seed in self.SEEDS:
            metrics = vital_metrics(four_persons, seed)["ivmd"]
            passed += metrics["rr_error_max"] < 1.0 and metrics["hr_error_max"] < 5.0
        assert passed >= 18

    def test_improved_beats_baseline_with_ten_modes(self, four_persons):
        config = with_section(four_persons, "vmd", n_modes=10, resp_modes=5)
        errors = {"vmd": [], "ivmd": []}
        for seed in self.SEEDS:
            for name, metrics in vital_metrics(config, seed, decomposers=("vmd", "ivmd")).items():
                errors[name].append(metrics["hr_error_mean"])
        assert np.mean(errors["ivmd"]) < np.mean(errors["vmd"])

    def test_passerby_rejected_by_focused_coding(self, four_persons):
        config = with_section(four_persons, "varredura", parametro="passerby", valores=[True],
                              sementes=list(self.SEEDS), processos=1)
        rows = cmd_bench(config)
        rows = rows[rows["seed"] != "media"]
        focused = rows[rows["variant"] == "focada"]
        constant = rows[rows["variant"] == "constante"]
        passed = ((focused["rr_error_max"] < 1.0) & (focused["hr_error_max"] < 5.0)).sum()
        assert passed >= 18
        assert constant["hr_error_mean"].mean() > focused["hr_error_mean"].mean()


class TestCli:
    def test_missing_config_exit_code(self, tmp_path):
        assert app.main(["--config", str(tmp_path / "nada.json"), "detect"]) == app.EXIT_CONFIG

    def test_vmd_command(self, tmp_path):
        signal = desk_signal_csv(tmp_path / "sinal.csv")
        path = write_config(tmp_path, config_dict(tmp_path / "saida"))
        code = app.main(["--config", str(path), "--saida", str(tmp_path / "cli"), "vmd", "--sinal", str(signal)])
        assert code == app.EXIT_OK
        assert (tmp_path / "cli" / "vmd" / "vmd_relatorio.json").exists()

    def test_invalid_config_value_exit_code(self, tmp_path):
        data = copy.deepcopy(config_dict(tmp_path / "saida"))
        data["deteccao"]["mu"] = 0.0
        path = write_config(tmp_path, data)
        assert app.main(["--config", str(path), "detect"]) == app.EXIT_CONFIG

    def test_invalid_env_seed_exit_code(self, tmp_path, monkeypatch):
        monkeypatch.setattr(app.env_config, "SENSING_SEED", "abc")
        path = write_config(tmp_path, config_dict(tmp_path / "saida"))
        assert app.main(["--config", str(path), "detect"]) == app.EXIT_CONFIG
