"""
Testes da detecção: separação, indicadores e atribuição de feixes.
"""

import numpy as np
import pytest

from geral.history_service import DetectionLogService
from geral.artifact_service import ArtifactService
from servicos_modularizados.coding_optimizer import phase_delay_coding
from servicos_modularizados.detection import (
    EVENT_ASSIGNED,
    EVENT_CANDIDATE,
    EVENT_CAPACITY,
    EVENT_RELEASED,
    STATUS_ASSIGNED,
    STATUS_CANDIDATE,
    STATUS_EMPTY,
    AssignmentState,
    BaselineIntensity,
    DetectionConfig,
    DetectionError,
    HarmonicStream,
    decimate_stream,
    demux_filter,
    demux_harmonics,
    extract_motion_signal,
    intensity_indicator,
    load_baseline,
    local_peak_gate,
    measure_baseline,
    measure_intensity,
    pool_order,
    radial_spread,
    replay_assignments,
    respiration_indicator,
    save_baseline,
    scan_indicators,
    update_assignments,
)
from servicos_modularizados.detection.processing import ARC_SPREAD_LIMIT
from servicos_modularizados.ris_model import FieldGrid, RisGeometry, StcCoding
from servicos_modularizados.scene_sim import (
    EchoSet,
    Person,
    Scene,
    StaticReflector,
    scan_sequence,
    simulate_received,
    snr_to_noise_db,
)

FS = 1200.0
F0 = 100.0


def tone_echo(components, duration=2.0, fs=FS):
    t = np.arange(int(fs * duration)) / fs
    x = sum(a * np.exp(2j * np.pi * k * F0 * t) for k, a in components)
    return EchoSet(x[None, :], fs=fs, duration=duration, carrier_hz=3.5e9, mod_freq_hz=F0)


def middle(samples, trim=300):
    return samples[trim:-trim]


def geometry():
    return RisGeometry(rows=8, cols=8, code_length=4)


def grid():
    return FieldGrid(z=1.0, x_extent=(-1.5, 1.5), y_extent=(-0.5, 0.5), resolution=(31, 11))


def on_focus_stream(duration=30.0, snr_db=10.0, seed=0, person=True, reflector=False):
    geo = geometry()
    coding = phase_delay_coding(geo, (0.0, 0.0, 1.0), 1)
    persons = (Person((0.0, 0.0, 1.0), resp_hz=0.25),) if person else ()
    reflectors = (StaticReflector((0.0, 0.0, 1.0), 2.0),) if reflector else ()
    scene = Scene(persons=persons, reflectors=reflectors, noise_db=snr_to_noise_db(snr_db), seed=seed)
    echo = simulate_received(scene, coding, geo, duration, FS, grid())
    return demux_harmonics(echo, [1])[1]


def noise_stream(seed, duration=20.0, fs=20.0):
    rng = np.random.default_rng(seed)
    n = int(duration * fs)
    return HarmonicStream(rng.standard_normal(n) + 1j * rng.standard_normal(n), fs, 1)


class TestDemux:
    def test_tone_lands_in_its_harmonic(self):
        streams = demux_harmonics(tone_echo([(1, 1.0)]), [1, -1])
        plus = middle(streams[1].samples)
        minus = middle(streams[-1].samples)
        assert np.allclose(np.abs(plus), 1.0, atol=1e-3)
        assert measure_intensity(minus) < 1e-6 * measure_intensity(plus)

    def test_two_tones_power_ratio(self):
        streams = demux_harmonics(tone_echo([(1, 1.0), (-1, 0.5)]), [1, -1])
        ratio_db = 10 * np.log10(measure_intensity(middle(streams[1].samples))
                                 / measure_intensity(middle(streams[-1].samples)))
        assert ratio_db == pytest.approx(10 * np.log10(4.0), abs=0.2)

    def test_streams_are_time_aligned(self):
        t = np.arange(int(FS * 4)) / FS
        envelope = np.sin(2 * np.pi * 1.0 * t)
        echo = EchoSet((envelope * np.exp(2j * np.pi * F0 * t))[None, :], fs=FS, duration=4.0,
                       carrier_hz=3.5e9, mod_freq_hz=F0)
        stream = demux_harmonics(echo, [1])[1]
        assert np.max(np.abs(middle(stream.samples) - middle(envelope))) < 1e-3

    def test_noise_power_follows_filter_bandwidth(self):
        geo = RisGeometry(rows=2, cols=2, code_length=4)
        scene = Scene(noise_db=0.0, leakage_db=None, seed=5)
        echo = simulate_received(scene, StcCoding.constant(2, 2, 4), geo, 100.0, FS, grid())
        stream = demux_harmonics(echo, [2])[2]
        expected = scene.noise_power * np.sum(demux_filter(FS, F0 / 4) ** 2)
        measured_db = 10 * np.log10(measure_intensity(middle(stream.samples)))
        assert measured_db == pytest.approx(10 * np.log10(expected), abs=1.0)

    def test_stream_shorter_than_filter_rejected(self):
        with pytest.raises(DetectionError):
            demux_harmonics(tone_echo([(1, 1.0)], duration=0.1), [1], taps=257)

    def test_overlapping_bands_rejected(self):
        with pytest.raises(DetectionError):
            demux_harmonics(tone_echo([(1, 1.0)]), [1], half_bandwidth_hz=60.0)

    def test_sample_rate_too_low(self):
        with pytest.raises(DetectionError):
            demux_harmonics(tone_echo([(1, 1.0)]), [6])

    def test_decimate_to_analysis_rate(self):
        stream = HarmonicStream(np.ones(12000, dtype=complex), FS, 1)
        decimated = decimate_stream(stream, 20.0)
        assert decimated.fs == pytest.approx(20.0)
        assert decimated.samples.size == 200
        assert np.allclose(middle(decimated.samples, 20), 1.0, atol=1e-3)


class TestIntensity:
    def test_examples(self):
        assert measure_intensity(np.zeros(10)) == 0.0
        assert measure_intensity(np.exp(1j * np.linspace(0, 3, 10))) == pytest.approx(1.0)

    def test_quadratic_scaling(self):
        x = np.random.default_rng(0).standard_normal(100) * (1 + 0.5j)
        assert measure_intensity(3 * x) == pytest.approx(9 * measure_intensity(x), rel=1e-12)

    def test_empty_stream_rejected(self):
        with pytest.raises(DetectionError):
            measure_intensity(np.array([]))

    def test_indicator_is_strict(self):
        assert not intensity_indicator(1.0, 1.0, 0.05)
        assert intensity_indicator(1.1, 1.0, 0.05)
        assert not intensity_indicator(1.5, 1.0, 0.5)

    def test_indicator_scale_consistency(self):
        c2 = 7.0
        for intensity in (1.02, 1.05, 1.2):
            assert intensity_indicator(intensity, 1.0, 0.05) == intensity_indicator(c2 * intensity, c2, c2 * 0.05)

    def test_negative_inputs_rejected(self):
        with pytest.raises(DetectionError):
            intensity_indicator(-1.0, 0.0, 0.1)

    def test_relative_and_absolute_thresholds(self):
        assert DetectionConfig(mu=0.05).threshold(2.0) == pytest.approx(0.1)
        assert DetectionConfig(mu=0.05, mu_mode="absolute").threshold(2.0) == pytest.approx(0.05)

    def test_local_peak_gate(self):
        gate = local_peak_gate(np.array([0.1, 0.5, 0.3, 0.3, 0.0]))
        assert gate.tolist() == [False, True, False, True, False]


class TestMotionSignal:
    def test_recovers_phase_around_static_offset(self):
        t = np.arange(3240) / 20.0
        truth = 0.1 * np.sin(2 * np.pi * 0.25 * t)
        recovered = extract_motion_signal(np.exp(1j * truth) + 5.0)
        assert np.max(np.abs(recovered - truth)) < 0.01

    def test_constant_stream_gives_zeros(self):
        assert np.array_equal(extract_motion_signal(np.full(50, 2 - 1j)), np.zeros(50))

    def test_conjugate_negates(self):
        t = np.arange(400) / 20.0
        x = 0.3 * np.exp(1j * 0.5 * np.sin(2 * np.pi * 0.3 * t)) + (1 + 2j)
        assert np.allclose(extract_motion_signal(np.conj(x)), -extract_motion_signal(x), atol=1e-9)

    def test_short_burst_is_gated(self):
        t = np.arange(3240) / 20.0
        truth = 0.8 * np.sin(2 * np.pi * 0.25 * t)
        samples = np.exp(1j * truth) + 5.0
        burst = slice(1500, 1540)
        samples[burst] += 3.0 * np.exp(2j * np.pi * 3.0 * t[burst])
        recovered = extract_motion_signal(samples)
        outside = np.ones(t.size, dtype=bool)
        outside[burst] = False
        assert np.max(np.abs(recovered[outside] - truth[outside])) < 0.05

    def test_noise_has_no_arc(self):
        assert radial_spread(noise_stream(0).samples) >= ARC_SPREAD_LIMIT
        assert radial_spread(np.exp(1j * np.linspace(0, 1, 400)) + 3.0) < 1e-6

    def test_empty_stream_rejected(self):
        with pytest.raises(DetectionError):
            extract_motion_signal(np.array([]))


class TestRespirationIndicator:
    def test_on_focus_person_detected(self):
        config = DetectionConfig(confirm_window_s=30.0)
        assert respiration_indicator(on_focus_stream(), config)

    def test_static_reflector_rejected(self):
        config = DetectionConfig(confirm_window_s=20.0)
        stream = on_focus_stream(duration=20.0, person=False, reflector=True, seed=1)
        assert not respiration_indicator(stream, config)

    def test_pure_noise_false_alarm_rate(self):
        config = DetectionConfig(confirm_window_s=30.0)
        alarms = sum(respiration_indicator(noise_stream(seed, duration=30.0), config) for seed in range(100))
        assert alarms <= 1

    def test_short_stream_rejected(self):
        with pytest.raises(DetectionError):
            respiration_indicator(noise_stream(0, duration=10.0), DetectionConfig())

    def test_config_invariants(self):
        with pytest.raises(DetectionError):
            DetectionConfig(mu=0.0)
        with pytest.raises(DetectionError):
            DetectionConfig(resp_band=(0.7, 0.1))
        with pytest.raises(DetectionError):
            DetectionConfig(confirm_window_s=10.0)
        with pytest.raises(DetectionError):
            DetectionConfig(harmonic_pool=(1, 1))


class TestAssignments:
    def config(self):
        return DetectionConfig(loss_timeout_s=30.0)

    def test_pool_preference(self):
        assert pool_order([3, -1, 1, -3]) == (-1, 1, -3, 3)

    def test_single_direction_gets_lowest_harmonic(self):
        state = AssignmentState.initial(5)
        state = update_assignments(state, [False, False, True, False, False],
                                   [None, None, True, None, None], 0.0, self.config())
        assert state.status[2] == STATUS_ASSIGNED
        assert state.harmonic[2] == -1
        assert [e.event for e in state.events] == [EVENT_CANDIDATE, EVENT_ASSIGNED]

    def test_mirrored_directions_get_conjugate_harmonics(self):
        state = AssignmentState.initial(7, positions=(-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5))
        flags = [True, False, True, False, True, False, True]
        state = update_assignments(state, flags, flags, 0.0, self.config())
        assert state.assigned() == {2: -1, 4: 1, 0: -3, 6: 3}

    def test_mirror_gets_conjugate_of_earlier_assignment(self):
        state = AssignmentState.initial(5, positions=(-1.0, -0.5, 0.0, 0.5, 1.0))
        state = update_assignments(state, [True, False, False, False, False], [True, None, None, None, None],
                                   0.0, self.config())
        assert state.harmonic[0] == -1
        state = update_assignments(state, [True, False, False, False, True], [None, None, None, None, True],
                                   10.0, self.config())
        assert state.harmonic[4] == 1

    def test_positions_visit_center_first(self):
        state = AssignmentState.initial(4, positions=(1.5, 0.5, -0.5, -1.5))
        assert state.visit_order() == (1, 2, 0, 3)
        assert state.mirror_of(0) == 3 and state.mirror_of(1) == 2
        assert AssignmentState.initial(3, positions=(0.0, 0.5, 1.0)).mirror_of(0) is None

    def test_without_positions_pool_order_is_kept(self):
        state = AssignmentState.initial(4)
        flags = [True, True, True, True]
        state = update_assignments(state, flags, flags, 0.0, self.config())
        assert state.harmonic == (-1, 1, -3, 3)

    def test_positions_length_checked(self):
        with pytest.raises(DetectionError):
            AssignmentState.initial(3, positions=(0.0, 1.0))

    def test_candidate_waits_for_respiration(self):
        state = update_assignments(AssignmentState.initial(3), [True, False, False], None, 0.0, self.config())
        assert state.status == (STATUS_CANDIDATE, STATUS_EMPTY, STATUS_EMPTY)
        state = update_assignments(state, [True, False, False], [False, None, None], 20.0, self.config())
        assert state.status[0] == STATUS_CANDIDATE
        state = update_assignments(state, [True, False, False], [True, None, None], 40.0, self.config())
        assert state.status[0] == STATUS_ASSIGNED

    def test_pool_exhaustion_raises_capacity(self):
        state = AssignmentState.initial(6)
        flags = [True, True, True, True, False, False]
        state = update_assignments(state, flags, flags, 0.0, self.config())
        assert state.pool == ()
        assert sorted(state.assigned().values()) == [-3, -1, 1, 3]
        state = update_assignments(state, [None] * 4 + [True, False], [None] * 4 + [True, None], 10.0,
                                   self.config())
        assert state.status[4] == STATUS_CANDIDATE
        assert [e.event for e in state.events] == [EVENT_CANDIDATE, EVENT_CAPACITY]

    def test_release_after_loss_timeout(self):
        config = self.config()
        state = update_assignments(AssignmentState.initial(2), [True, False], [True, None], 0.0, config)
        k = state.harmonic[0]
        state = update_assignments(state, [False, False], None, 20.0, config)
        assert state.status[0] == STATUS_ASSIGNED
        state = update_assignments(state, [False, False], None, 30.0, config)
        assert state.status[0] == STATUS_EMPTY
        assert k in state.pool
        assert state.events[0].event == EVENT_RELEASED and state.events[0].harmonic == k

    def test_time_cannot_go_backwards(self):
        state = update_assignments(AssignmentState.initial(1), [True], None, 10.0, self.config())
        with pytest.raises(DetectionError):
            update_assignments(state, [True], None, 5.0, self.config())

    def test_flag_length_checked(self):
        with pytest.raises(DetectionError):
            update_assignments(AssignmentState.initial(3), [True], None, 0.0, self.config())

    def test_harmonics_stay_exclusive(self):
        rng = np.random.default_rng(9)
        state = AssignmentState.initial(8)
        for step in range(200):
            intensity = rng.random(8) < 0.4
            respiration = rng.random(8) < 0.5
            state = update_assignments(state, intensity, respiration, 5.0 * step, self.config())
            used = list(state.assigned().values())
            assert len(used) == len(set(used))
            assert set(used) | set(state.pool) == set(state.harmonic_set)

    def test_replay_reproduces_trajectory(self, tmp_path):
        rng = np.random.default_rng(4)
        scans = [(5.0 * i, (rng.random(4) < 0.5).tolist(), (rng.random(4) < 0.5).tolist()) for i in range(40)]
        first = replay_assignments(AssignmentState.initial(4), scans, self.config())

        log = DetectionLogService(ArtifactService(tmp_path))
        for state in first:
            for event in state.events:
                log.register_event(event.t, event.direction, event.event, event.harmonic)
        second = replay_assignments(AssignmentState.initial(4), scans, self.config())

        assert first == second
        assert [e.to_dict() for s in second for e in s.events] == log.get_events()


class TestBaseline:
    def test_baseline_csv_roundtrip(self, tmp_path):
        baseline = BaselineIntensity(np.array([0.1, 0.2, 0.05]), dwell=20.0, fs=FS)
        path = save_baseline(baseline, tmp_path / "linha_base.csv")
        assert path.read_text(encoding="utf-8").splitlines()[0] == "direction,intensity"
        loaded = load_baseline(path, 20.0, FS)
        assert np.allclose(loaded.intensities, baseline.intensities)

    def test_negative_baseline_rejected(self):
        with pytest.raises(DetectionError):
            BaselineIntensity(np.array([0.1, -0.2]), 20.0, FS)


class TestScan:
    XS = (-1.0, -0.5, 0.0, 0.5, 1.0)
    CONFIG = DetectionConfig(mu=0.05, mu_mode="absolute", confirm_window_s=20.0)

    def codings(self):
        return [phase_delay_coding(geometry(), (x, 0.0, 1.0), 1) for x in self.XS]

    def scan(self, scene, start_time=0.0):
        return scan_sequence(scene, self.codings(), geometry(), 20.0, FS, grid(), start_time=start_time)

    @pytest.mark.slow
    def test_scan_finds_person(self):
        clutter = (StaticReflector((-1.0, 0.0, 1.3), 0.8),)
        baseline = measure_baseline(self.scan(Scene(reflectors=clutter, noise_db=-30.0, seed=1)), self.CONFIG)

        occupied = Scene(persons=(Person((0.5, 0.0, 1.0)),), reflectors=clutter, noise_db=-30.0, seed=2)
        _, intensity, respiration = scan_indicators(self.scan(occupied, 100.0), baseline, self.CONFIG)
        assert intensity == [False, False, False, True, False]
        assert respiration[3] is True

    @pytest.mark.slow
    def test_static_reflector_stays_candidate(self):
        baseline = measure_baseline(self.scan(Scene(noise_db=-30.0, seed=1)), self.CONFIG)
        static = (StaticReflector((-0.5, 0.0, 1.0), 1.0),)

        candidates = detections = 0
        for seed in range(50):
            echo = self.scan(Scene(reflectors=static, noise_db=-30.0, seed=100 + seed))
            _, intensity, respiration = scan_indicators(echo, baseline, self.CONFIG)
            candidates += sum(bool(i) and not r for i, r in zip(intensity, respiration))
            detections += sum(bool(i) and bool(r) for i, r in zip(intensity, respiration))
        assert candidates >= 1
        assert detections == 0

    @pytest.mark.slow
    def test_empty_scene_has_no_false_alarms(self):
        baseline = measure_baseline(self.scan(Scene(noise_db=-30.0, seed=1)), self.CONFIG)

        alarms = 0
        for seed in range(50):
            echo = self.scan(Scene(noise_db=-30.0, seed=200 + seed))
            _, intensity, respiration = scan_indicators(echo, baseline, self.CONFIG)
            alarms += sum(bool(i) and bool(r) for i, r in zip(intensity, respiration))
        assert alarms == 0
