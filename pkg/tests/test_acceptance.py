"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one ``ACCEPTANCE Cxx PASS/FAIL`` line; run with
``pytest -s tests/test_acceptance.py`` to see them live.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from nscodec import (
    CodecConfig,
    analyze,
    bench,
    compute_delay_report,
    count_decoder_params,
    count_encoder_params,
    decode_stream,
    decode_subbands,
    encode,
    encode_audio,
    pack,
    quantize,
    roll_window,
    synthesize,
    train_codebooks,
    truncate_layers,
    unpack,
)
from nscodec.bitstream import HEADER_BYTES
from nscodec.kernels import (
    ConvParams,
    GruParams,
    channel_norm,
    conv1d,
    gru_forward,
    softmax_gated_tanh,
    upsample_repeat,
)
from nscodec.pqmf import default_bank
from nscodec.rvq import RvqModel

import oracles
from conftest import make_noise


@contextmanager
def criterion(tag, title):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {tag} FAIL {title}")
        raise
    print(f"ACCEPTANCE {tag} PASS {title}")


def test_c01_bitrate_exactness(tensors, default_cfg):
    with criterion("C01", "10 s at 3 layers = 30000 bits, at 1 layer = 10000 bits"):
        audio = make_noise(10.0, seed=101)
        start = time.perf_counter()
        three = encode_audio(audio, tensors, default_cfg, layers=3)
        one = encode_audio(audio, tensors, default_cfg, layers=1)
        elapsed = time.perf_counter() - start
        assert (len(three) - HEADER_BYTES) * 8 == 30_000
        assert (len(one) - HEADER_BYTES) * 8 == 10_000
        assert unpack(three)[0].packet_count == 1000
        assert elapsed < 5.0, f"encoding took {elapsed:.2f}s, budget is 5s"


def test_c02_framing_law():
    with criterion("C02", "2 s input frames to [320, 200]"):
        frames = roll_window(make_noise(2.0, seed=102))
        assert frames.data.shape == (320, 200)


def test_c03_delay_report(default_cfg):
    with criterion("C03", "delay budget 15 ms encoder+framing, 10 ms decoder, 25 total"):
        report = compute_delay_report(default_cfg)
        assert report.framing_lookahead_ms + report.frame_buffer_ms == 15.0
        assert report.decoder_ms == 10.0
        assert report.total_ms == 25.0


def test_c04_parameter_counts():
    enc, dec = count_encoder_params(), count_decoder_params()
    with criterion("C04", f"parameter counts: encoder {enc}, decoder {dec}"):
        assert 1_400_000 <= enc <= 2_700_000
        assert 2_500_000 <= dec <= 5_500_000


def test_c05_pqmf_round_trip_snr():
    with criterion("C05", "PQMF round-trip SNR >= 40 dB on 1 s white noise"):
        start = time.perf_counter()
        bank = default_bank()
        audio = make_noise(1.0, seed=105)
        out = synthesize(analyze(audio, bank), bank)
        elapsed = time.perf_counter() - start
        delay = bank.taps - 1
        ref = audio.samples[: out.samples.size - delay].astype(np.float64)
        err = out.samples[delay:].astype(np.float64) - ref
        snr = 10 * np.log10(np.sum(ref**2) / np.sum(err**2))
        print(f"[C05 detail] snr={snr:.1f} dB")
        assert snr >= 40.0
        assert elapsed < 2.0, f"round trip took {elapsed:.2f}s, budget is 2s"


def test_c06_rvq_oracle_equivalence():
    with criterion("C06", "100 latents: every index equals brute-force argmin"):
        rng = np.random.default_rng(106)
        model = RvqModel(rng.standard_normal((3, 1024, 256)).astype(np.float32))
        for _ in range(100):
            z = rng.standard_normal(256).astype(np.float32)
            residual = z
            for stage, idx in enumerate(quantize(z, model, 3)):
                assert idx == oracles.nearest_entry_ref(residual, model.codebooks[stage])
                residual = residual - model.codebooks[stage, idx]


def test_c07_kmeans_monotonicity():
    with criterion("C07", "k-means distortion non-increasing; stage 2 <= stage 1"):
        rng = np.random.default_rng(107)
        centers = rng.standard_normal((32, 256)) * 2.0
        latents = (centers[rng.integers(0, 32, 6000)]
                   + rng.standard_normal((6000, 256))).astype(np.float32).T
        model = train_codebooks(latents, iters=20, seed=7)
        for stage, history in enumerate(model.training_history):
            assert len(history) == 20
            for earlier, later in zip(history, history[1:]):
                assert later <= earlier * (1 + 1e-12), f"stage {stage} regressed"
        assert model.training_history[1][-1] <= model.training_history[0][-1]


def test_c08_streaming_batch_equivalence(tensors, default_cfg):
    with criterion("C08", "streaming pipeline byte-identical to batch on 5 s"):
        audio = make_noise(5.0, seed=108)
        batch_stream = encode_audio(audio, tensors, default_cfg, streaming=False)
        live_stream = encode_audio(audio, tensors, default_cfg, streaming=True)
        assert live_stream == batch_stream
        batch_out = decode_stream(batch_stream, tensors, default_cfg, streaming=False)
        live_out = decode_stream(batch_stream, tensors, default_cfg, streaming=True)
        assert batch_out.samples.tobytes() == live_out.samples.tobytes()


def test_c09_bitstream_round_trip_and_truncation(tensors, default_cfg):
    with criterion("C09", "pack/unpack identity; --layers 1 == truncated stream"):
        rng = np.random.default_rng(109)
        for layers in (1, 2, 3):
            codes = [tuple(int(v) for v in rng.integers(0, 1024, 3))
                     for _ in range(rng.integers(1, 300))]
            _, out = unpack(pack(codes, layers))
            assert out == [c[:layers] for c in codes]
        stream = encode_audio(make_noise(1.0, seed=109), tensors, default_cfg)
        via_flag = decode_stream(stream, tensors, default_cfg, layers=1)
        via_trunc = decode_stream(truncate_layers(stream, 1), tensors, default_cfg)
        assert via_flag.samples.tobytes() == via_trunc.samples.tobytes()


def test_c10_kernel_oracles():
    with criterion("C10", "conv/GRU/gate/upsample/norm match naive oracles at 1e-5"):
        for seed in range(5):
            rng = np.random.default_rng(110 + seed)
            c_out, c_in, t = rng.integers(1, 9), rng.integers(1, 9), rng.integers(4, 24)
            x = rng.standard_normal((c_in, t)).astype(np.float32)
            for kernel in (1, 3):
                p = ConvParams(rng.standard_normal((c_out, c_in, kernel)).astype(np.float32),
                               rng.standard_normal(c_out).astype(np.float32))
                np.testing.assert_allclose(
                    conv1d(x, p), oracles.conv1d_ref(x, p.weight, p.bias), atol=1e-5)
            hidden = int(rng.integers(1, 12))
            g = GruParams(rng.standard_normal((3 * hidden, c_in)).astype(np.float32),
                          rng.standard_normal((3 * hidden, hidden)).astype(np.float32),
                          rng.standard_normal(3 * hidden).astype(np.float32),
                          rng.standard_normal(3 * hidden).astype(np.float32))
            out, _ = gru_forward(x, g)
            ref, _ = oracles.gru_ref(x, g.input_weights, g.recurrent_weights,
                                     g.input_bias, g.recurrent_bias)
            np.testing.assert_allclose(out, ref, atol=1e-5)
            b = rng.standard_normal(x.shape).astype(np.float32)
            np.testing.assert_allclose(softmax_gated_tanh(x, b),
                                       oracles.softmax_gated_tanh_ref(x, b), atol=1e-5)
            factor = int(rng.integers(1, 6))
            np.testing.assert_array_equal(upsample_repeat(x, factor),
                                          oracles.upsample_repeat_ref(x, factor))
            np.testing.assert_allclose(channel_norm(x),
                                       oracles.channel_norm_ref(x), atol=1e-5)


def test_c11_causality_suite(tensors, default_cfg):
    with criterion("C11", "mutations never reach outputs before their causal horizon"):
        frames = roll_window(make_noise(0.12, seed=111))
        base_latents = encode(frames, tensors, default_cfg.encoder)
        for k in (2, 6, 11):
            mutated = roll_window(make_noise(0.12, seed=111))
            mutated.data[:, k] += 0.5
            out = encode(mutated, tensors, default_cfg.encoder)
            assert np.array_equal(out[:, :k], base_latents[:, :k])
        rng = np.random.default_rng(211)
        latents = rng.standard_normal((256, 10)).astype(np.float32) * 0.2
        base_bands = decode_subbands(latents, tensors, default_cfg.decoder)
        for k in (1, 4, 8):
            mutated = latents.copy()
            mutated[:, k] -= 0.5
            bands = decode_subbands(mutated, tensors, default_cfg.decoder)
            assert np.array_equal(bands[:, : 40 * k], base_bands[:, : 40 * k])


def test_c12_performance_informational(tensors, default_cfg):
    result = bench(make_noise(2.0, seed=112), tensors, default_cfg, min_seconds=10.0)
    title = (f"informational RTF over {result.audio_seconds:.0f} s: "
             f"encode {result.encode_rtf:.1f}x, decode {result.decode_rtf:.1f}x")
    with criterion("C12", title):
        assert result.encode_rtf > 0 and result.decode_rtf > 0
        if result.encode_rtf < 1.0 or result.decode_rtf < 1.0:
            print("[C12 detail] below 1x real time on this machine (not gating)")
