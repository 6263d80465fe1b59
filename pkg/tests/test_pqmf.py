import numpy as np
import pytest

from nscodec import AudioBuffer, analyze, design_prototype, synthesize
from nscodec.pqmf import SynthesisStream, _composite_ripple_db, default_bank

import oracles
from conftest import make_noise


@pytest.fixture(scope="module")
def bank():
    return default_bank()


def _round_trip(audio, bank):
    return synthesize(analyze(audio, bank), bank)


def _snr_db(reference, test):
    err = test.astype(np.float64) - reference.astype(np.float64)
    return 10 * np.log10(np.sum(reference.astype(np.float64) ** 2) / np.sum(err**2))


def test_prototype_is_symmetric(bank):
    np.testing.assert_allclose(bank.prototype, bank.prototype[::-1], atol=1e-9)


def test_composite_ripple_below_point_one_db(bank):
    assert _composite_ripple_db(bank.prototype) < 0.1


def test_round_trip_snr_on_white_noise(bank):
    audio = make_noise(1.0, seed=17)
    out = _round_trip(audio, bank)
    delay = bank.taps - 1
    assert delay == 99
    snr = _snr_db(audio.samples[: out.samples.size - delay], out.samples[delay:])
    assert snr >= 40.0


def test_round_trip_snr_on_speech_shaped_noise(bank):
    rng = np.random.default_rng(23)
    white = rng.standard_normal(16000)
    shaped = np.convolve(white, np.array([0.25, 0.5, 0.25]))[:16000]  # lowpass tilt
    audio = AudioBuffer((0.5 * shaped / np.abs(shaped).max()).astype(np.float32))
    out = _round_trip(audio, bank)
    delay = bank.taps - 1
    snr = _snr_db(audio.samples[: out.samples.size - delay], out.samples[delay:])
    assert snr >= 40.0


def test_impulse_round_trip_peak_and_sidelobes(bank):
    x = np.zeros(1000, dtype=np.float32)
    x[0] = 1.0
    out = _round_trip(AudioBuffer(x), bank).samples.astype(np.float64)
    peak = int(np.argmax(np.abs(out)))
    assert peak == 99
    sidelobes = np.abs(out).copy()
    sidelobes[peak] = 0.0
    assert 20 * np.log10(sidelobes.max() / np.abs(out[peak])) <= -40.0


def test_dc_input_concentrates_in_band_zero(bank):
    audio = AudioBuffer(np.full(4000, 0.5, dtype=np.float32))
    bands = analyze(audio, bank)
    settled = bands[:, 50:]  # skip filter warm-up
    rms = np.sqrt(np.mean(settled.astype(np.float64) ** 2, axis=1))
    assert rms[1:].max() < 0.01 * rms[0]


def test_zero_input_gives_zero_bands(bank):
    bands = analyze(AudioBuffer(np.zeros(1600, dtype=np.float32)), bank)
    assert not bands.any()
    assert not synthesize(np.zeros((4, 100), dtype=np.float32), bank).samples.any()


def test_polyphase_analysis_matches_direct_oracle(bank):
    audio = make_noise(0.25, seed=31)
    fast = analyze(audio, bank)
    ref = oracles.pqmf_analyze_ref(audio.samples, bank)
    np.testing.assert_allclose(fast, ref, atol=1e-6)


def test_polyphase_synthesis_matches_direct_oracle(bank):
    rng = np.random.default_rng(37)
    bands = rng.uniform(-0.5, 0.5, (4, 200)).astype(np.float32)
    fast = synthesize(bands, bank).samples
    ref = oracles.pqmf_synthesize_ref(bands, bank)
    np.testing.assert_allclose(fast, ref, atol=1e-6)


def test_analysis_pads_to_multiple_of_four(bank):
    audio = AudioBuffer(np.ones(1001, dtype=np.float32) * 0.1)
    assert analyze(audio, bank).shape == (4, 251)


def test_round_trip_linearity(bank):
    x = make_noise(0.2, seed=41).samples
    y = make_noise(0.2, seed=43).samples
    a, b = 0.6, -0.3
    combined = _round_trip(AudioBuffer(a * x + b * y), bank).samples
    separate = (a * _round_trip(AudioBuffer(x), bank).samples
                + b * _round_trip(AudioBuffer(y), bank).samples)
    np.testing.assert_allclose(combined, separate, atol=1e-5)


def test_streaming_synthesis_bit_exact_with_batch(bank):
    rng = np.random.default_rng(47)
    bands = rng.uniform(-0.5, 0.5, (4, 240)).astype(np.float32)
    batch = synthesize(bands, bank).samples
    stream = SynthesisStream(bank)
    chunks = [stream.push(bands[:, i : i + 40]) for i in range(0, 240, 40)]
    np.testing.assert_array_equal(np.concatenate(chunks), batch)


def test_band_count_enforced(bank):
    with pytest.raises(ValueError):
        synthesize(np.zeros((3, 10), dtype=np.float32), bank)


def test_infeasible_parameters_rejected():
    with pytest.raises(ValueError):
        design_prototype(taps=8)
    with pytest.raises(ValueError):
        design_prototype(attenuation_db=-5.0)


def test_synthesis_lookahead_is_50_samples(bank):
    assert bank.synthesis_lookahead == 50
