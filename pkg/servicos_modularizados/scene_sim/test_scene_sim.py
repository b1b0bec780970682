"""
Testes da simulação de cenas.
"""

import json

import numpy as np
import pytest
from scipy import signal

from servicos_modularizados.coding_optimizer import phase_delay_coding
from servicos_modularizados.detection import demux_harmonics, extract_motion_signal, measure_intensity
from servicos_modularizados.ris_model import FieldGrid, RisGeometry, StcCoding
from servicos_modularizados.scene_sim import (
    EchoSet,
    Passerby,
    Person,
    Scene,
    SceneError,
    StaticReflector,
    chest_displacement,
    load_echo_raw,
    load_scene,
    merge_echoes,
    save_echo_csv,
    save_echo_raw,
    save_scene,
    scan_sequence,
    scene_from_dict,
    simulate_received,
    snr_to_noise_db,
)

FS = 1200.0


def geometry(rows=8, cols=8, L=4):
    return RisGeometry(rows=rows, cols=cols, code_length=L)


def grid():
    return FieldGrid(z=1.0, x_extent=(-1.5, 1.5), y_extent=(-0.5, 0.5), resolution=(31, 11))


def focus_coding(geo, x=0.0):
    return phase_delay_coding(geo, (x, 0.0, 1.0), 1)


class TestChestDisplacement:
    def test_zero_at_origin(self):
        assert chest_displacement(Person((0, 0, 1)), np.array([0.0]))[0] == pytest.approx(0.0)

    def test_quarter_period_peak(self):
        person = Person((0, 0, 1), resp_hz=0.25, resp_amp_m=4e-3, heart_amp_m=0.0)
        assert chest_displacement(person, np.array([1.0]))[0] == pytest.approx(4e-3)

    def test_breath_hold_leaves_only_heartbeat(self):
        person = Person((0, 0, 1), breath_holds=((10.0, 20.0),))
        t = np.array([12.3])
        expected = person.heart_amp_m * np.sin(2 * np.pi * person.heart_hz * t)
        assert chest_displacement(person, t)[0] == pytest.approx(expected[0])

    def test_person_invariants(self):
        with pytest.raises(SceneError):
            Person((0, 0, 1), resp_hz=0.05)
        with pytest.raises(SceneError):
            Person((0, 0, 1), heart_hz=3.0)
        with pytest.raises(SceneError):
            Person((0, 0, 1), resp_amp_m=1e-4, heart_amp_m=1e-3)
        with pytest.raises(SceneError):
            Person((0, 0, 1), reflectivity=0.0)

    def test_scene_rejects_coincident_persons(self):
        with pytest.raises(SceneError):
            Scene(persons=(Person((0, 0, 1)), Person((0, 0, 1))))


class TestSimulateReceived:
    def test_empty_scene_constant_coding_is_dc(self):
        geo = geometry()
        coding = StcCoding.constant(8, 8, 4)
        echo = simulate_received(Scene(leakage_db=-20.0), coding, geo, 1.0, FS, grid())
        x = echo.streams[0]
        assert np.abs(x[0]) > 0
        assert np.allclose(x, x[0], atol=1e-12)

    def test_static_reflector_has_constant_magnitude(self):
        geo = geometry()
        coding = StcCoding.constant(8, 8, 4)
        scene = Scene(reflectors=(StaticReflector((0.3, 0.1, 1.0), 0.5 + 0.2j),), leakage_db=None)
        magnitude = np.abs(simulate_received(scene, coding, geo, 1.0, FS, grid()).streams[0])
        assert np.ptp(magnitude) < 1e-12 * magnitude.max()

    def test_sample_count_and_nyquist(self):
        geo = geometry()
        coding = StcCoding.constant(8, 8, 4)
        echo = simulate_received(Scene(), coding, geo, 2.0, FS, grid())
        assert echo.samples == int(FS * 2.0)
        with pytest.raises(SceneError):
            simulate_received(Scene(), coding, geo, 1.0, 1000.0, grid())

    def test_person_outside_grid_rejected(self):
        geo = geometry()
        scene = Scene(persons=(Person((3.0, 0.0, 1.0)),))
        with pytest.raises(SceneError):
            simulate_received(scene, focus_coding(geo), geo, 1.0, FS, grid())

    def test_deterministic(self):
        geo = geometry()
        scene = Scene(persons=(Person((0.2, 0, 1)),), noise_db=-20.0, seed=7)
        a = simulate_received(scene, focus_coding(geo), geo, 2.0, FS, grid())
        b = simulate_received(scene, focus_coding(geo), geo, 2.0, FS, grid())
        assert np.array_equal(a.streams, b.streams)

    def test_linear_in_reflectivity(self):
        geo = geometry()
        coding = focus_coding(geo)
        other = Person((-0.4, 0, 1), resp_hz=0.3)
        base = Scene(persons=(other,), leakage_db=-20.0)

        def contribution(gamma):
            person = Person((0.2, 0, 1), reflectivity=gamma)
            with_person = simulate_received(Scene(persons=(other, person)), coding, geo, 2.0, FS, grid())
            return with_person.streams[0] - simulate_received(base, coding, geo, 2.0, FS, grid()).streams[0]

        single = contribution(0.7 - 0.1j)
        double = contribution(2 * (0.7 - 0.1j))
        assert np.allclose(double, 2 * single, rtol=1e-10, atol=1e-14)

    def test_noise_calibration(self):
        geo = geometry(rows=2, cols=2)
        coding = StcCoding.constant(2, 2, 4)
        scene = Scene(noise_db=-10.0, leakage_db=None, seed=3)
        echo = simulate_received(scene, coding, geo, 100.0, FS, grid())
        measured_db = 10 * np.log10(measure_intensity(echo.streams[0]))
        assert abs(measured_db - (-10.0)) < 0.5

    def test_phase_follows_chest_displacement(self):
        geo = geometry()
        person = Person((0.0, 0.0, 1.0), resp_hz=0.25, resp_amp_m=5e-3, heart_amp_m=0.0)
        echo = simulate_received(Scene(persons=(person,)), focus_coding(geo), geo, 20.0, FS, grid())
        stream = demux_harmonics(echo, [1])[1]
        trim = int(FS)
        t = echo.times(0)[trim:-trim]
        recovered = extract_motion_signal(stream.samples[trim:-trim])
        expected = signal.detrend(4 * np.pi * chest_displacement(person, t) / geo.wavelength)
        amplitude = 4 * np.pi * person.resp_amp_m / geo.wavelength
        assert np.max(np.abs(recovered - expected)) < 0.02 * amplitude

    def test_passerby_varies_the_echo(self):
        geo = geometry()
        person = Person((0.0, 0.0, 1.0))
        walker = Passerby.crossing(person, at_time=1.0, speed=0.5, gap=0.5)
        scene = Scene(reflectors=(StaticReflector((0.3, 0, 1.0)),), passerby=walker, leakage_db=None)
        magnitude = np.abs(simulate_received(scene, focus_coding(geo), geo, 2.0, FS, grid()).streams[0])
        assert np.ptp(magnitude) > 0.01 * magnitude.mean()

    def test_snr_to_noise_db(self):
        assert snr_to_noise_db(10.0) == pytest.approx(-10.0)
        assert snr_to_noise_db(0.0, signal_power=4.0) == pytest.approx(10 * np.log10(4.0))


class TestScanSequence:
    def test_empty_coding_list_rejected(self):
        with pytest.raises(SceneError):
            scan_sequence(Scene(), [], geometry(), 1.0, FS, grid())

    def test_directions_have_consecutive_dwells(self):
        geo = geometry()
        codings = [focus_coding(geo, x) for x in (-0.5, 0.0, 0.5)]
        echo = scan_sequence(Scene(noise_db=-20.0), codings, geo, 1.5, FS, grid(), start_time=2.0)
        assert echo.directions == (0, 1, 2)
        assert echo.start_s == (2.0, 3.5, 5.0)
        assert echo.streams.shape == (3, int(1.5 * FS))

    def test_identical_codings_give_independent_noise(self):
        geo = geometry()
        coding = StcCoding.constant(8, 8, 4)
        echo = scan_sequence(Scene(noise_db=0.0, leakage_db=None, seed=11), [coding] * 3, geo, 2.0, FS, grid())
        powers = [measure_intensity(s) for s in echo.streams]
        assert np.allclose(powers, 1.0, rtol=0.1)
        assert not np.array_equal(echo.streams[0], echo.streams[1])

    def test_person_brightest_in_own_direction(self):
        geo = geometry()
        xs = (-1.0, -0.5, 0.0, 0.5, 1.0)
        codings = [focus_coding(geo, x) for x in xs]
        scene = Scene(persons=(Person((0.5, 0.0, 1.0)),), leakage_db=None)
        echo = scan_sequence(scene, codings, geo, 1.0, FS, grid())
        powers = [measure_intensity(demux_harmonics(echo, [1], d)[1].samples) for d in echo.directions]
        assert int(np.argmax(powers)) == 3


class TestSceneFiles:
    def test_scene_json_roundtrip(self, tmp_path):
        scene = Scene(
            persons=(Person((0.1, 0, 1), breath_holds=((5.0, 8.0),), reflectivity=0.5 + 0.5j),),
            reflectors=(StaticReflector((0.5, 0, 1.2), 0.3),),
            noise_db=-30.0,
            seed=4,
        )
        path = save_scene(scene, tmp_path / "cena.json")
        assert load_scene(path) == scene

    def test_unknown_key_named(self):
        with pytest.raises(SceneError, match="altura"):
            scene_from_dict({"persons": [{"position": [0, 0, 1], "altura": 1.7}]})

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "cena.json"
        path.write_text("{persons: ", encoding="utf-8")
        with pytest.raises(SceneError):
            load_scene(path)

    def test_echo_raw_roundtrip(self, tmp_path):
        echo = EchoSet(np.array([[1 + 2j, 3 - 4j, 0.5j, -1.0]]), fs=4.0, duration=1.0,
                       carrier_hz=3.5e9, mod_freq_hz=100.0, seed=2, directions=(5,), start_s=(7.5,))
        header = save_echo_raw(echo, tmp_path)[0]
        assert header.name == "eco_d5.txt"
        loaded = load_echo_raw(header)
        assert np.array_equal(loaded.streams, echo.streams)
        assert loaded.directions == (5,) and loaded.start_s == (7.5,)
        assert "fs=4.0" in header.read_text(encoding="utf-8")

    def test_echo_csv_columns(self, tmp_path):
        echo = EchoSet(np.ones((2, 4), dtype=complex), fs=4.0, duration=1.0, carrier_hz=3.5e9,
                       mod_freq_hz=100.0, directions=(0, 1), start_s=(0.0, 1.0))
        paths = save_echo_csv(echo, tmp_path)
        assert [p.name for p in paths] == ["eco_d0.csv", "eco_d1.csv"]
        header = paths[1].read_text(encoding="utf-8").splitlines()[0]
        assert header == "t_s,i,q"

    def test_merge_echoes(self):
        parts = [
            EchoSet(np.zeros((1, 4)), fs=4.0, duration=1.0, carrier_hz=3.5e9, mod_freq_hz=100.0,
                    directions=(d,), start_s=(float(d),))
            for d in range(3)
        ]
        merged = merge_echoes(parts)
        assert merged.directions == (0, 1, 2)
        assert merged.streams.shape == (3, 4)

    def test_scene_dict_is_json_serializable(self):
        from servicos_modularizados.scene_sim import scene_to_dict

        scene = Scene(persons=(Person((0, 0, 1)),))
        assert json.loads(json.dumps(scene_to_dict(scene)))["persons"][0]["position"] == [0.0, 0.0, 1.0]
