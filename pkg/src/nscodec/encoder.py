"""Frame encoder: windowed samples in, one 256-dim latent per packet out.

The frontend treats the 320-sample window axis as channels so that 1x1
convolutions mix samples within a frame, while a GRU carries state
across frames: conv1x1 to 512 -> GRU(512->128) -> conv1x1 to 256, each
followed by a LeakyReLU. Four residual blocks refine the result at 256
channels; each computes x + conv1x1(lrelu(causal_conv3(lrelu(x)))).

Everything here is processed strictly one frame at a time, so feeding
frames incrementally through :class:`EncoderStream` is bit-identical to
:func:`encode` on the whole matrix; the latter is just a loop over the
former.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framing import FrameMatrix
from .kernels import GruParams, gru_step, leaky_relu
from .weights import Manifest, TensorMap, validate_tensors


@dataclass(frozen=True)
class EncoderConfig:
    window_samples: int = 320
    frontend_conv1_ch: int = 512
    frontend_gru_hidden: int = 128
    frontend_conv2_ch: int = 256
    residual_blocks: int = 4
    residual_ch: int = 256
    latent_dim: int = 256

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if name != "residual_blocks" and value <= 0:
                raise ValueError(f"{name} must be positive")
        if self.residual_blocks < 0:
            raise ValueError("residual_blocks must be >= 0")
        if self.latent_dim != self.residual_ch:
            raise ValueError("latent_dim must equal residual_ch")
        if self.frontend_conv2_ch != self.residual_ch:
            raise ValueError("residual blocks run on the frontend output; widths must match")


def encoder_manifest(cfg: EncoderConfig = EncoderConfig()) -> Manifest:
    """Required tensor names and shapes for the encoder."""
    m: Manifest = {
        "enc.frontend.conv_in.weight": (cfg.frontend_conv1_ch, cfg.window_samples, 1),
        "enc.frontend.conv_in.bias": (cfg.frontend_conv1_ch,),
        "enc.frontend.gru.weight_ih": (3 * cfg.frontend_gru_hidden, cfg.frontend_conv1_ch),
        "enc.frontend.gru.weight_hh": (3 * cfg.frontend_gru_hidden, cfg.frontend_gru_hidden),
        "enc.frontend.gru.bias_ih": (3 * cfg.frontend_gru_hidden,),
        "enc.frontend.gru.bias_hh": (3 * cfg.frontend_gru_hidden,),
        "enc.frontend.conv_out.weight": (cfg.frontend_conv2_ch, cfg.frontend_gru_hidden, 1),
        "enc.frontend.conv_out.bias": (cfg.frontend_conv2_ch,),
    }
    ch = cfg.residual_ch
    for i in range(cfg.residual_blocks):
        m[f"enc.block{i}.conv3.weight"] = (ch, ch, 3)
        m[f"enc.block{i}.conv3.bias"] = (ch,)
        m[f"enc.block{i}.conv1.weight"] = (ch, ch, 1)
        m[f"enc.block{i}.conv1.bias"] = (ch,)
    return m


def count_encoder_params(cfg: EncoderConfig = EncoderConfig()) -> int:
    """Total scalar parameters across all encoder tensors."""
    return sum(int(np.prod(shape)) for shape in encoder_manifest(cfg).values())


class EncoderStream:
    """Stateful frame-by-frame encoder."""

    def __init__(self, tensors: TensorMap, cfg: EncoderConfig = EncoderConfig()):
        validate_tensors(tensors, encoder_manifest(cfg))
        self.cfg = cfg
        t = tensors
        self._w_in = t["enc.frontend.conv_in.weight"].reshape(cfg.frontend_conv1_ch, -1)
        self._b_in = t["enc.frontend.conv_in.bias"]
        self._gru = GruParams(
            t["enc.frontend.gru.weight_ih"], t["enc.frontend.gru.weight_hh"],
            t["enc.frontend.gru.bias_ih"], t["enc.frontend.gru.bias_hh"],
        )
        self._w_out = t["enc.frontend.conv_out.weight"].reshape(cfg.frontend_conv2_ch, -1)
        self._b_out = t["enc.frontend.conv_out.bias"]
        self._blocks = []
        for i in range(cfg.residual_blocks):
            self._blocks.append((
                t[f"enc.block{i}.conv3.weight"].reshape(cfg.residual_ch, -1),
                t[f"enc.block{i}.conv3.bias"],
                t[f"enc.block{i}.conv1.weight"].reshape(cfg.residual_ch, -1),
                t[f"enc.block{i}.conv1.bias"],
            ))
        self._h = np.zeros(cfg.frontend_gru_hidden, dtype=np.float32)
        # per block: the last two post-activation inputs of the causal conv3
        self._tails = [
            np.zeros((cfg.residual_ch, 2), dtype=np.float32)
            for _ in range(cfg.residual_blocks)
        ]

    def push(self, frame: np.ndarray) -> np.ndarray:
        """Encode one 320-sample frame into a 256-dim latent."""
        frame = np.asarray(frame, dtype=np.float32)
        if frame.shape != (self.cfg.window_samples,):
            raise ValueError(
                f"frame must have shape ({self.cfg.window_samples},), got {frame.shape}"
            )
        x = leaky_relu(self._w_in @ frame + self._b_in)
        self._h = gru_step(x, self._h, self._gru)
        x = leaky_relu(self._h)
        x = leaky_relu(self._w_out @ x + self._b_out)
        for i, (w3, b3, w1, b1) in enumerate(self._blocks):
            pre = leaky_relu(x)
            window = np.concatenate([self._tails[i], pre[:, None]], axis=1)
            self._tails[i] = window[:, 1:]
            inner = leaky_relu(w3 @ window.reshape(-1) + b3)
            x = x + (w1 @ inner + b1)
        return x


def encode(frames: FrameMatrix, tensors: TensorMap,
           cfg: EncoderConfig = EncoderConfig()) -> np.ndarray:
    """Encode a FrameMatrix into latents [latent_dim, n_frames]."""
    if frames.window != cfg.window_samples:
        raise ValueError(
            f"frames have window {frames.window}, encoder expects {cfg.window_samples}"
        )
    stream = EncoderStream(tensors, cfg)
    out = np.empty((cfg.latent_dim, frames.n_frames), dtype=np.float32)
    for k in range(frames.n_frames):
        out[:, k] = stream.push(frames.data[:, k])
    return out
