"""Mono PCM audio container and WAV file I/O.

Only 16-bit PCM mono WAV at 16 kHz is accepted. Integer samples map to
float via ``s / 32768`` on read; writing applies the inverse with
saturating round-to-nearest-even, so a file produced by
:func:`write_wav` survives a read/write round trip byte-identically.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass

import numpy as np

from .errors import WavFormatError

SAMPLE_RATE = 16000
PCM_SCALE = 32768.0


@dataclass
class AudioBuffer:
    """Mono waveform: float32 samples in [-1, 1] plus a sample rate."""

    samples: np.ndarray
    sample_rate_hz: int = SAMPLE_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {self.samples.shape}")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain NaN or Inf")

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def require_codec_rate(self) -> "AudioBuffer":
        """Gate for codec entry points: only 16 kHz is processable."""
        if self.sample_rate_hz != SAMPLE_RATE:
            raise WavFormatError(
                f"codec requires {SAMPLE_RATE} Hz audio, got {self.sample_rate_hz} Hz"
            )
        return self


def read_wav(path) -> AudioBuffer:
    """Read a PCM16 mono 16 kHz WAV file into an AudioBuffer."""
    try:
        with wave.open(str(path), "rb") as w:
            channels = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            comp = w.getcomptype()
            nframes = w.getnframes()
            raw = w.readframes(nframes)
    except (wave.Error, EOFError) as exc:
        raise WavFormatError(f"{path}: malformed WAV file ({exc})") from exc
    if comp != "NONE":
        raise WavFormatError(f"{path}: compressed WAV ({comp}) not supported")
    if channels != 1:
        raise WavFormatError(f"{path}: expected mono, got {channels} channels")
    if width != 2:
        raise WavFormatError(f"{path}: expected 16-bit PCM, got {8 * width}-bit")
    if rate != SAMPLE_RATE:
        raise WavFormatError(f"{path}: expected {SAMPLE_RATE} Hz, got {rate} Hz")
    if len(raw) != 2 * nframes:
        raise WavFormatError(f"{path}: truncated sample data")
    pcm = np.frombuffer(raw, dtype="<i2")
    return AudioBuffer(pcm.astype(np.float32) / PCM_SCALE, rate)


def write_wav(audio: AudioBuffer, path) -> None:
    """Write an AudioBuffer as PCM16 mono WAV with saturating rounding."""
    pcm = np.rint(audio.samples.astype(np.float64) * PCM_SCALE)
    pcm = np.clip(pcm, -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(audio.sample_rate_hz)
        w.writeframes(pcm.tobytes())
