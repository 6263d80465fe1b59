"""End-to-end pipelines tying framing, encoder, RVQ, bitstream, decoder,
and PQMF synthesis together, plus delay accounting and benchmarking.

Batch and streaming modes share the same per-packet cores, so their
outputs are byte-identical; the streaming entry points exist to exercise
the incremental state machines the way a live pipeline would.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .audio import SAMPLE_RATE, AudioBuffer
from .bitstream import pack, unpack
from .decoder import DecoderConfig, DecoderStream, decode_subbands, decoder_manifest
from .encoder import EncoderConfig, EncoderStream, encode, encoder_manifest
from .errors import CodecError, InvalidLayersError
from .framing import Framer, FramingConfig, roll_window
from .pqmf import SynthesisStream, default_bank, synthesize
from .rvq import CODEBOOK_BITS, LATENT_DIM, N_STAGES, RvqModel, dequantize, quantize
from .weights import Manifest, TensorMap


@dataclass(frozen=True)
class CodecConfig:
    framing: FramingConfig = field(default_factory=FramingConfig)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    pqmf_taps: int = 100
    pqmf_attenuation_db: float = 100.0

    @classmethod
    def from_json(cls, path) -> "CodecConfig":
        with open(path) as f:
            raw = json.load(f)
        return cls(
            framing=FramingConfig(**raw.get("framing", {})),
            encoder=EncoderConfig(**raw.get("encoder", {})),
            decoder=DecoderConfig(
                **{k: tuple(v) if isinstance(v, list) else v
                   for k, v in raw.get("decoder", {}).items()}
            ),
            pqmf_taps=raw.get("pqmf", {}).get("taps", 100),
            pqmf_attenuation_db=raw.get("pqmf", {}).get("attenuation_db", 100.0),
        )

    def bank(self):
        return default_bank(self.pqmf_taps, self.pqmf_attenuation_db)


def full_manifest(cfg: CodecConfig = CodecConfig()) -> Manifest:
    """Every tensor the codec needs: encoder, RVQ codebooks, decoder."""
    if cfg.encoder.latent_dim != LATENT_DIM:
        raise ValueError(f"the quantizer is defined on {LATENT_DIM}-dim latents")
    if cfg.decoder.conditioning_ch != LATENT_DIM:
        raise ValueError("decoder conditioning must consume the quantized latents")
    m = dict(encoder_manifest(cfg.encoder))
    for i in range(N_STAGES):
        m[f"rvq.codebook.{i}"] = (1 << CODEBOOK_BITS, LATENT_DIM)
    m.update(decoder_manifest(cfg.decoder))
    return m


@dataclass(frozen=True)
class DelayReport:
    """Algorithmic delay budget, derived from the active configuration."""

    framing_lookahead_ms: float
    frame_buffer_ms: float
    decoder_ms: float

    @property
    def total_ms(self) -> float:
        return self.framing_lookahead_ms + self.frame_buffer_ms + self.decoder_ms


def compute_delay_report(cfg: CodecConfig = CodecConfig()) -> DelayReport:
    """Delay contributions: framing lookahead, hop buffering, synthesis filter.

    The synthesis filter needs about half its length of future samples;
    packetization rounds that up to whole hops.
    """
    per_ms = SAMPLE_RATE / 1000.0
    hop = cfg.framing.hop_samples
    synth_lookahead = default_bank(cfg.pqmf_taps, cfg.pqmf_attenuation_db).synthesis_lookahead
    decoder_hops = -(-synth_lookahead // hop)
    return DelayReport(
        framing_lookahead_ms=cfg.framing.lookahead_samples / per_ms,
        frame_buffer_ms=hop / per_ms,
        decoder_ms=decoder_hops * hop / per_ms,
    )


def _pad_to_hops(samples: np.ndarray, hop: int) -> np.ndarray:
    if samples.size % hop:
        samples = np.pad(samples, (0, hop - samples.size % hop))
    return samples


def encode_audio(audio: AudioBuffer, tensors: TensorMap,
                 cfg: CodecConfig = CodecConfig(), layers: int = 3,
                 streaming: bool = False) -> bytes:
    """WAV samples to coded stream: frame, encode, quantize, pack."""
    audio.require_codec_rate()
    if audio.samples.size == 0:
        raise CodecError("cannot encode empty audio")
    model = RvqModel.from_tensors(tensors)
    if streaming:
        framer = Framer(cfg.framing)
        enc = EncoderStream(tensors, cfg.encoder)
        hop = cfg.framing.hop_samples
        padded = _pad_to_hops(audio.samples, hop)
        codes = []
        for start in range(0, padded.size, hop):
            for frame in framer.push(padded[start : start + hop]):
                codes.append(quantize(enc.push(frame), model, layers))
        for frame in framer.flush():
            codes.append(quantize(enc.push(frame), model, layers))
    else:
        frames = roll_window(audio, cfg.framing)
        latents = encode(frames, tensors, cfg.encoder)
        codes = [quantize(latents[:, k], model, layers) for k in range(latents.shape[1])]
    return pack(codes, layers, sample_rate_hz=audio.sample_rate_hz)


def decode_stream(data: bytes, tensors: TensorMap,
                  cfg: CodecConfig = CodecConfig(), layers: int | None = None,
                  streaming: bool = False) -> AudioBuffer:
    """Coded stream to waveform: unpack, dequantize, decode, synthesize."""
    header, codes = unpack(data)
    if header.sample_rate_hz != SAMPLE_RATE:
        raise CodecError(f"stream sample rate {header.sample_rate_hz} unsupported")
    if layers is None:
        layers = header.layers
    if not 1 <= layers <= header.layers:
        raise InvalidLayersError(
            f"requested {layers} layers but stream carries {header.layers}"
        )
    model = RvqModel.from_tensors(tensors)
    bank = cfg.bank()
    if streaming:
        dec = DecoderStream(tensors, cfg.decoder)
        synth = SynthesisStream(bank)
        pieces = [
            synth.push(dec.push(dequantize(packet[:layers], model)))
            for packet in codes
        ]
        samples = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.float32)
        return AudioBuffer(samples, SAMPLE_RATE)
    latents = np.stack(
        [dequantize(packet[:layers], model) for packet in codes], axis=1
    ) if codes else np.zeros((LATENT_DIM, 0), dtype=np.float32)
    subbands = decode_subbands(latents, tensors, cfg.decoder)
    return synthesize(subbands, bank, SAMPLE_RATE)


def dump_latents(audio: AudioBuffer, tensors: TensorMap,
                 cfg: CodecConfig = CodecConfig(), quantized: bool = False) -> np.ndarray:
    """Per-packet latents [dim, n], optionally passed through the quantizer."""
    frames = roll_window(audio, cfg.framing)
    latents = encode(frames, tensors, cfg.encoder)
    if not quantized:
        return latents
    model = RvqModel.from_tensors(tensors)
    out = np.empty_like(latents)
    for k in range(latents.shape[1]):
        out[:, k] = dequantize(quantize(latents[:, k], model, N_STAGES), model)
    return out


@dataclass(frozen=True)
class BenchResult:
    audio_seconds: float
    encode_seconds: float
    decode_seconds: float

    @property
    def encode_rtf(self) -> float:
        return self.audio_seconds / self.encode_seconds

    @property
    def decode_rtf(self) -> float:
        return self.audio_seconds / self.decode_seconds


def bench(audio: AudioBuffer, tensors: TensorMap,
          cfg: CodecConfig = CodecConfig(), min_seconds: float = 10.0) -> BenchResult:
    """Single-threaded wall-clock real-time factors over >= min_seconds of audio."""
    audio.require_codec_rate()
    if audio.samples.size == 0:
        raise CodecError("cannot benchmark empty audio")
    reps = max(1, int(np.ceil(min_seconds * audio.sample_rate_hz / audio.samples.size)))
    samples = np.tile(audio.samples, reps)
    buf = AudioBuffer(samples, audio.sample_rate_hz)

    t0 = time.perf_counter()
    stream = encode_audio(buf, tensors, cfg, layers=3)
    t1 = time.perf_counter()
    decode_stream(stream, tensors, cfg)
    t2 = time.perf_counter()
    return BenchResult(
        audio_seconds=buf.duration_seconds,
        encode_seconds=t1 - t0,
        decode_seconds=t2 - t1,
    )
