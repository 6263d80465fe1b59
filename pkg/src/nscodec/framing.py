"""Rolling-window framing of the input waveform.

Each 10 ms hop (160 samples at 16 kHz) becomes one frame column of 320
samples: 80 samples of past context, the 160-sample hop, and 80 samples
of lookahead. Out-of-range positions at both signal ends are zeros, so a
signal of length t produces exactly ceil(t / 160) frames. A partial
final hop is zero-padded to a full hop.

The streaming ``Framer`` emits exactly the columns the batch transform
produces, bit for bit: frame k becomes available one hop after its core
samples arrive (the 80 lookahead samples land during push k+1), and
``flush`` emits the remaining tail frames with zero-padded lookahead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer


@dataclass(frozen=True)
class FramingConfig:
    hop_samples: int = 160
    past_context_samples: int = 80
    lookahead_samples: int = 80

    def __post_init__(self):
        if self.hop_samples <= 0:
            raise ValueError("hop_samples must be positive")
        if self.past_context_samples < 0 or self.lookahead_samples < 0:
            raise ValueError("context sizes must be non-negative")

    @property
    def window_samples(self) -> int:
        return self.past_context_samples + self.hop_samples + self.lookahead_samples


@dataclass
class FrameMatrix:
    """Windowed signal of shape [window, frames]."""

    data: np.ndarray
    hop: int

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError("frame data must be 2-D [window, frames]")

    @property
    def window(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]


def roll_window(signal: AudioBuffer, cfg: FramingConfig = FramingConfig()) -> FrameMatrix:
    """Frame a waveform; frame k holds samples [k*hop - past, k*hop + hop + look)."""
    signal.require_codec_rate()
    x = signal.samples
    if x.size == 0:
        raise ValueError("cannot frame an empty signal")
    hop = cfg.hop_samples
    past = cfg.past_context_samples
    window = cfg.window_samples
    n_frames = -(-x.size // hop)
    padded = np.zeros(past + n_frames * hop + cfg.lookahead_samples, dtype=np.float32)
    padded[past : past + x.size] = x
    frames = np.empty((window, n_frames), dtype=np.float32)
    for k in range(n_frames):
        frames[:, k] = padded[k * hop : k * hop + window]
    return FrameMatrix(frames, hop=hop)


class Framer:
    """Streaming counterpart of :func:`roll_window`; one hop per push."""

    def __init__(self, cfg: FramingConfig = FramingConfig()):
        self.cfg = cfg
        # absolute position of buf[0] is (pushed_hops * hop) - len(buf)
        self._buf = np.zeros(cfg.past_context_samples, dtype=np.float32)
        self._pushed = 0
        self._emitted = 0

    def push(self, chunk: np.ndarray) -> list[np.ndarray]:
        """Feed exactly one hop of samples; return frames that became complete."""
        chunk = np.asarray(chunk, dtype=np.float32)
        if chunk.shape != (self.cfg.hop_samples,):
            raise ValueError(
                f"push expects exactly {self.cfg.hop_samples} samples, got {chunk.shape}"
            )
        self._buf = np.concatenate([self._buf, chunk])
        self._pushed += 1
        return self._drain(available=self._pushed * self.cfg.hop_samples)

    def flush(self) -> list[np.ndarray]:
        """End of stream: emit remaining frames with zero-padded lookahead."""
        self._buf = np.concatenate(
            [self._buf, np.zeros(self.cfg.window_samples, dtype=np.float32)]
        )
        frames = []
        while self._emitted < self._pushed:
            frames.append(self._take_frame())
        return frames

    def _drain(self, available: int) -> list[np.ndarray]:
        cfg = self.cfg
        frames = []
        while (self._emitted + 1) * cfg.hop_samples + cfg.lookahead_samples <= available:
            frames.append(self._take_frame())
        return frames

    def _take_frame(self) -> np.ndarray:
        window = self.cfg.window_samples
        frame = self._buf[:window].copy()
        self._buf = self._buf[self.cfg.hop_samples :]
        self._emitted += 1
        return frame
