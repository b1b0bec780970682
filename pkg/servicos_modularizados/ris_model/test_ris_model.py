"""
Testes do modelo da metassuperfície STC.
"""

import numpy as np
import pandas as pd
import pytest

from servicos_modularizados.ris_model import (
    SPEED_OF_LIGHT,
    FieldGrid,
    HarmonicPattern,
    RisGeometry,
    RisModelError,
    StcCoding,
    element_spectrum,
    element_spectrum_dft,
    export_pattern,
    greens_weight,
    harmonic_coefficient,
    harmonic_coefficients,
    near_field_pattern,
    pattern_at_points,
    spectral_power,
    spherical_illumination,
    waveform_spectrum_dft,
)


def small_geometry(rows=4, cols=4, L=8, **kwargs):
    return RisGeometry(rows=rows, cols=cols, code_length=L, **kwargs)


def small_grid():
    return FieldGrid(z=1.0, x_extent=(-1.0, 1.0), y_extent=(-0.5, 0.5), resolution=(9, 5))


class TestGeometry:
    def test_wavelength_matches_speed_of_light(self):
        geometry = RisGeometry()
        assert geometry.wavelength * geometry.carrier_hz == pytest.approx(SPEED_OF_LIGHT, rel=1e-12)
        assert geometry.mod_freq_hz == 1.0 / geometry.period_s

    def test_default_pitch_is_half_wavelength(self):
        geometry = RisGeometry()
        assert geometry.dx == pytest.approx(geometry.wavelength / 2)
        positions = geometry.element_positions()
        assert positions.shape == (32, 32, 3)
        assert np.allclose(positions[..., :2].mean(axis=(0, 1)), 0.0)

    def test_modulation_must_be_slow(self):
        with pytest.raises(RisModelError):
            RisGeometry(carrier_hz=1000.0, period_s=0.01)

    def test_invalid_dimensions(self):
        with pytest.raises(RisModelError):
            RisGeometry(rows=0)

    def test_coding_rejects_non_binary(self):
        with pytest.raises(RisModelError):
            StcCoding(np.full((2, 2, 3), 2))

    def test_coding_shape_must_match_geometry(self):
        coding = StcCoding.constant(2, 2, 3)
        with pytest.raises(RisModelError):
            coding.check_geometry(small_geometry())

    def test_coding_reflection_is_unit_magnitude(self):
        coding = StcCoding.random(3, 3, 5, np.random.default_rng(1))
        assert np.all(np.abs(coding.reflection) == 1.0)

    def test_grid_point_count(self):
        grid = small_grid()
        assert grid.points().shape == (45, 3)
        assert np.all(grid.points()[:, 2] == 1.0)

    def test_spherical_illumination_normalized(self):
        geometry = spherical_illumination(small_geometry(), (0.0, 0.0, -0.5))
        assert geometry.amplitude.max() == pytest.approx(1.0)
        assert np.all(geometry.phase >= 0) and np.all(geometry.phase < 2 * np.pi)


class TestGreensWeight:
    def test_on_axis_magnitude(self):
        geometry = RisGeometry(rows=1, cols=1)
        w = greens_weight(geometry, (0, 0), (0.0, 0.0, 1.0))
        k = geometry.wavenumber
        expected = (1.0 / geometry.wavelength) * np.sqrt(1.0 + 1.0 / k**2)
        assert abs(w) == pytest.approx(expected, rel=1e-12)
        assert abs(w) == pytest.approx(11.67, rel=1e-2)

    def test_doubling_distance_quarters_magnitude(self):
        geometry = RisGeometry(rows=1, cols=1)
        near = greens_weight(geometry, (0, 0), (0.0, 0.0, 1.0))
        far = greens_weight(geometry, (0, 0), (np.sqrt(3.0), 0.0, 1.0))
        assert abs(near) / abs(far) == pytest.approx(4.0, rel=1e-2)

    def test_phase_advances_one_cycle_per_wavelength(self):
        geometry = RisGeometry(rows=1, cols=1)
        k = geometry.wavenumber
        lam = geometry.wavelength

        def propagation_phase(r):
            w = greens_weight(geometry, (0, 0), (0.0, 0.0, r))
            return w / ((r / lam) * (1.0 / (k * r) - 1j) / r**2)

        ratio = propagation_phase(1.0 + lam) / propagation_phase(1.0)
        assert np.angle(ratio) == pytest.approx(0.0, abs=1e-9)

    def test_coincident_point_raises(self):
        geometry = RisGeometry(rows=1, cols=1)
        with pytest.raises(RisModelError):
            greens_weight(geometry, (0, 0), (0.0, 0.0, 0.0))


class TestHarmonicCoefficients:
    def test_dc_is_duty_cycle(self):
        for l in (1, 7, 21):
            assert harmonic_coefficient(0, l, 21) == pytest.approx(1.0 / 21, rel=1e-12)

    def test_slots_partition_the_period(self):
        for L in (1, 4, 21):
            total = sum(harmonic_coefficient(0, l, L) for l in range(1, L + 1))
            assert total == pytest.approx(1.0, rel=1e-12)

    def test_matches_sampled_pulse(self):
        L = 21
        pulse = np.zeros(L)
        pulse[4] = 1.0
        oracle = waveform_spectrum_dft(pulse, L * 196, [3])[0]
        value = harmonic_coefficient(3, 5, L)
        assert abs(value - oracle) <= 1e-9 * abs(oracle)

    def test_slot_out_of_range(self):
        with pytest.raises(RisModelError):
            harmonic_coefficient(1, 0, 4)
        with pytest.raises(RisModelError):
            harmonic_coefficient(1, 5, 4)

    def test_matrix_matches_scalar(self):
        C = harmonic_coefficients(range(-3, 4), 5)
        assert C.shape == (5, 7)
        assert C[2, 5] == pytest.approx(harmonic_coefficient(2, 3, 5))


class TestElementSpectrum:
    def test_constant_coding_is_pure_dc(self):
        coding = StcCoding.constant(1, 1, 21)
        spectrum = element_spectrum(coding, (0, 0), 10)
        assert spectrum[10] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.abs(np.delete(spectrum, 10)) < 1e-9)

    def test_half_period_coding_has_no_dc(self):
        bits = np.array([0, 0, 0, 0, 1, 1, 1, 1], dtype=np.uint8).reshape(1, 1, 8)
        spectrum = element_spectrum(StcCoding(bits), (0, 0), [0])
        assert abs(spectrum[0]) < 1e-12

    def test_matches_dft_oracle(self):
        rng = np.random.default_rng(2024)
        for trial in range(100):
            L = (4, 8, 21)[trial % 3]
            coding = StcCoding.random(1, 1, L, rng)
            samples = L * (4096 // L)
            analytic = element_spectrum(coding, (0, 0), 10)
            oracle = element_spectrum_dft(coding, (0, 0), samples, 10)
            assert np.linalg.norm(analytic - oracle) <= 1e-9 * np.linalg.norm(oracle)

    def test_single_slot_pulse_magnitude(self):
        L = 8
        pulse = np.zeros(L)
        pulse[0] = 1.0
        k = np.arange(-10, 11)
        bins = waveform_spectrum_dft(pulse, L * 64, k)
        assert np.allclose(np.abs(bins), np.abs(np.sinc(k / L)) / L, atol=1e-12)

    def test_dft_requires_aligned_slots(self):
        coding = StcCoding.constant(1, 1, 21)
        with pytest.raises(RisModelError):
            element_spectrum_dft(coding, (0, 0), 4096, 10)

    def test_dft_requires_enough_samples(self):
        coding = StcCoding.constant(1, 1, 4)
        with pytest.raises(RisModelError):
            element_spectrum_dft(coding, (0, 0), 40, 10)

    def test_energy_conservation(self):
        rng = np.random.default_rng(7)
        for L in (4, 8, 21):
            coding = StcCoding.random(1, 1, L, rng)
            power = spectral_power(coding, (0, 0), 10 * L)
            # cauda além de 10L limitada por 2/(10π²)
            assert 0.0 <= 1.0 - power <= 2.0 / (10.0 * np.pi**2)
            constant = spectral_power(StcCoding.constant(1, 1, L), (0, 0), 10 * L)
            assert constant == pytest.approx(1.0, abs=1e-12)


class TestNearFieldPattern:
    def test_constant_coding_has_no_harmonics(self):
        geometry = small_geometry()
        pattern = near_field_pattern(StcCoding.constant(4, 4, 8), geometry, small_grid(), 3)
        dc = np.sum(pattern.power(0))
        others = sum(np.sum(pattern.power(k)) for k in pattern.harmonics if k != 0)
        assert others < 1e-12 * dc

    def test_single_element_superposition(self):
        geometry = RisGeometry(rows=1, cols=1, code_length=5,
                               amplitude=np.array([[0.7]]), phase=np.array([[0.3]]))
        coding = StcCoding.random(1, 1, 5, np.random.default_rng(3))
        grid = small_grid()
        pattern = near_field_pattern(coding, geometry, grid, 2)
        spectrum = element_spectrum(coding, (0, 0), 2)
        for index, point in enumerate(grid.points()[:5]):
            w = greens_weight(geometry, (0, 0), point)
            expected = 0.7 * np.exp(0.3j) * w * spectrum
            assert np.allclose(pattern.values[:, index], expected, rtol=1e-12, atol=0)

    def test_summation_orders_agree(self):
        geometry = small_geometry(L=21)
        coding = StcCoding.random(4, 4, 21, np.random.default_rng(11))
        points = small_grid().points()
        by_element = pattern_at_points(coding, geometry, points, 10, order="element")
        by_slot = pattern_at_points(coding, geometry, points, 10, order="slot")
        assert np.linalg.norm(by_element - by_slot) <= 1e-12 * np.linalg.norm(by_element)

    def test_linear_in_illumination(self):
        geometry = small_geometry()
        doubled = geometry.with_illumination(2.0 * geometry.amplitude, geometry.phase)
        coding = StcCoding.random(4, 4, 8, np.random.default_rng(5))
        base = near_field_pattern(coding, geometry, small_grid(), 2)
        scaled = near_field_pattern(coding, doubled, small_grid(), 2)
        assert np.array_equal(scaled.values, 2.0 * base.values)

    def test_point_on_element_raises(self):
        geometry = RisGeometry(rows=1, cols=1)
        with pytest.raises(RisModelError):
            pattern_at_points(StcCoding.constant(1, 1, 21), geometry, [[0.0, 0.0, 0.0]], 1)

    def test_pattern_frequencies(self):
        pattern = near_field_pattern(StcCoding.constant(4, 4, 8), small_geometry(), small_grid(), 1)
        assert pattern.frequency(1) == pytest.approx(3.5e9 + 100.0)
        assert pattern.field(0).shape == small_grid().shape

    def test_non_contiguous_harmonics_rejected(self):
        grid = small_grid()
        with pytest.raises(RisModelError):
            HarmonicPattern(grid, (-1, 1), np.zeros((2, grid.size)), 3.5e9, 100.0)


def test_export_pattern_writes_one_file_per_harmonic(tmp_path):
    grid = small_grid()
    pattern = near_field_pattern(StcCoding.constant(4, 4, 8), small_geometry(), grid, 1)
    written = export_pattern(pattern, tmp_path)
    assert sorted(p.name for p in written.values()) == ["pattern_k+0.csv", "pattern_k+1.csv", "pattern_k-1.csv"]
    table = pd.read_csv(tmp_path / "pattern_k+0.csv")
    assert list(table.columns) == ["x_m", "y_m", "z_m", "re", "im", "magnitude_db"]
    assert len(table) == grid.size
    assert table["x_m"].nunique() == 9 and table["y_m"].nunique() == 5
