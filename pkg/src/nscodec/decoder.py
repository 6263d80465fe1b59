"""Latent-conditioned synthesizer producing 4 PQMF sub-band signals.

A causal GRU pre-net turns the dequantized latents into one 256-dim
conditioning vector per packet. The signal path starts from a learned
constant prior vector repeated at packet rate and is upsampled through
four stages (5x, 2x, 2x, 2x -> 40 sub-band samples per 10 ms packet).
Each stage modulates the normalized signal with scale/shift computed
from the upsampled conditioning (gamma(c) * norm(x) + beta(c), both
kernel-3 causal convs), then applies a pair of kernel-3 causal convs
joined by a softmax-gated tanh. A final causal conv with a tanh clamp
emits the 4 sub-bands in [-1, 1].

The normalization inside a stage is per packet chunk: statistics are
taken over the samples one packet contributes at that stage's rate.
Whole-signal statistics would make every output sample depend on future
packets, which a streaming decoder cannot do; per-chunk statistics keep
packet-by-packet decoding bit-identical to batch decoding. As with the
encoder, the batch entry point is a loop over the streaming core.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import (
    GruParams,
    channel_norm,
    gru_step,
    softmax_gated_tanh,
    window_columns,
)
from .weights import Manifest, TensorMap, validate_tensors


@dataclass(frozen=True)
class DecoderConfig:
    prenet_hidden: int = 256
    conditioning_ch: int = 256
    prior_ch: int = 512
    upsample_factors: tuple = (5, 2, 2, 2)
    block_channels: tuple = (512, 256, 128, 64)
    out_subbands: int = 4

    def __post_init__(self):
        if len(self.upsample_factors) != len(self.block_channels):
            raise ValueError("upsample_factors and block_channels must align")
        if any(f < 1 for f in self.upsample_factors):
            raise ValueError("upsample factors must be >= 1")
        if min(self.prenet_hidden, self.conditioning_ch, self.prior_ch,
               self.out_subbands) <= 0:
            raise ValueError("channel counts must be positive")
        if self.prenet_hidden != self.conditioning_ch:
            raise ValueError("conditioning is the pre-net output; widths must match")

    @property
    def n_stages(self) -> int:
        return len(self.upsample_factors)

    @property
    def samples_per_packet(self) -> int:
        """Sub-band samples produced per latent packet."""
        return int(np.prod(self.upsample_factors)) if self.n_stages else 1

    def stage_channels(self, i: int) -> tuple[int, int]:
        in_ch = self.prior_ch if i == 0 else self.block_channels[i - 1]
        return in_ch, self.block_channels[i]

    @property
    def final_in_ch(self) -> int:
        return self.block_channels[-1] if self.n_stages else self.prior_ch


def decoder_manifest(cfg: DecoderConfig = DecoderConfig()) -> Manifest:
    """Required tensor names and shapes for the decoder."""
    hidden = cfg.prenet_hidden
    cond = cfg.conditioning_ch
    m: Manifest = {
        "dec.prenet.weight_ih": (3 * hidden, cond),
        "dec.prenet.weight_hh": (3 * hidden, hidden),
        "dec.prenet.bias_ih": (3 * hidden,),
        "dec.prenet.bias_hh": (3 * hidden,),
        "dec.prior": (cfg.prior_ch,),
    }
    for i in range(cfg.n_stages):
        in_ch, out_ch = cfg.stage_channels(i)
        m[f"dec.stage{i}.gamma.weight"] = (in_ch, cond, 3)
        m[f"dec.stage{i}.gamma.bias"] = (in_ch,)
        m[f"dec.stage{i}.beta.weight"] = (in_ch, cond, 3)
        m[f"dec.stage{i}.beta.bias"] = (in_ch,)
        m[f"dec.stage{i}.conv_a.weight"] = (out_ch, in_ch, 3)
        m[f"dec.stage{i}.conv_a.bias"] = (out_ch,)
        m[f"dec.stage{i}.conv_b.weight"] = (out_ch, in_ch, 3)
        m[f"dec.stage{i}.conv_b.bias"] = (out_ch,)
    m["dec.out.weight"] = (cfg.out_subbands, cfg.final_in_ch, 3)
    m["dec.out.bias"] = (cfg.out_subbands,)
    return m


def count_decoder_params(cfg: DecoderConfig = DecoderConfig()) -> int:
    """Total scalar parameters across all decoder tensors."""
    return sum(int(np.prod(shape)) for shape in decoder_manifest(cfg).values())


class DecoderStream:
    """Stateful packet-by-packet decoder."""

    def __init__(self, tensors: TensorMap, cfg: DecoderConfig = DecoderConfig()):
        validate_tensors(tensors, decoder_manifest(cfg))
        self.cfg = cfg
        t = tensors
        self._prenet = GruParams(
            t["dec.prenet.weight_ih"], t["dec.prenet.weight_hh"],
            t["dec.prenet.bias_ih"], t["dec.prenet.bias_hh"],
        )
        self._prior = t["dec.prior"].astype(np.float32)
        # gamma|beta and conv_a|conv_b share inputs; run each pair as one GEMM
        self._stages = []
        for i in range(cfg.n_stages):
            in_ch, out_ch = cfg.stage_channels(i)
            w_mod = np.concatenate([
                t[f"dec.stage{i}.gamma.weight"].reshape(in_ch, -1),
                t[f"dec.stage{i}.beta.weight"].reshape(in_ch, -1),
            ])
            b_mod = np.concatenate(
                [t[f"dec.stage{i}.gamma.bias"], t[f"dec.stage{i}.beta.bias"]]
            )
            w_pair = np.concatenate([
                t[f"dec.stage{i}.conv_a.weight"].reshape(out_ch, -1),
                t[f"dec.stage{i}.conv_b.weight"].reshape(out_ch, -1),
            ])
            b_pair = np.concatenate(
                [t[f"dec.stage{i}.conv_a.bias"], t[f"dec.stage{i}.conv_b.bias"]]
            )
            self._stages.append((np.ascontiguousarray(w_mod), b_mod,
                                 np.ascontiguousarray(w_pair), b_pair, in_ch, out_ch))
        self._w_out = t["dec.out.weight"].reshape(cfg.out_subbands, -1)
        self._b_out = t["dec.out.bias"]

        self._h = np.zeros(cfg.prenet_hidden, dtype=np.float32)
        self._cond_tails = [
            np.zeros((cfg.conditioning_ch, 2), dtype=np.float32)
            for _ in range(cfg.n_stages)
        ]
        self._sig_tails = [
            np.zeros((cfg.stage_channels(i)[0], 2), dtype=np.float32)
            for i in range(cfg.n_stages)
        ]
        self._out_tail = np.zeros((cfg.final_in_ch, 2), dtype=np.float32)

    def push(self, latent: np.ndarray) -> np.ndarray:
        """Decode one latent packet into [subbands, samples_per_packet]."""
        latent = np.asarray(latent, dtype=np.float32)
        if latent.shape != (self.cfg.conditioning_ch,):
            raise ValueError(
                f"latent must have shape ({self.cfg.conditioning_ch},), got {latent.shape}"
            )
        self._h = gru_step(latent, self._h, self._prenet)
        cond = self._h[:, None]
        x = self._prior[:, None]
        width = 1
        for i, (w_mod, b_mod, w_pair, b_pair, in_ch, out_ch) in enumerate(self._stages):
            factor = self.cfg.upsample_factors[i]
            width *= factor
            c_up = np.repeat(cond, width, axis=1)
            x_up = np.repeat(x, factor, axis=1)

            c_win = np.concatenate([self._cond_tails[i], c_up], axis=1)
            self._cond_tails[i] = np.ascontiguousarray(c_win[:, -2:])
            mod = w_mod @ window_columns(c_win, 3) + b_mod[:, None]
            y = mod[:in_ch] * channel_norm(x_up) + mod[in_ch:]

            y_win = np.concatenate([self._sig_tails[i], y], axis=1)
            self._sig_tails[i] = np.ascontiguousarray(y_win[:, -2:])
            pair = w_pair @ window_columns(y_win, 3) + b_pair[:, None]
            x = softmax_gated_tanh(pair[:out_ch], pair[out_ch:])

        o_win = np.concatenate([self._out_tail, x], axis=1)
        self._out_tail = np.ascontiguousarray(o_win[:, -2:])
        return np.tanh(self._w_out @ window_columns(o_win, 3) + self._b_out[:, None])


def decode_subbands(latents: np.ndarray, tensors: TensorMap,
                    cfg: DecoderConfig = DecoderConfig()) -> np.ndarray:
    """Decode latents [dim, n_packets] into sub-bands [4, n_packets * 40]."""
    latents = np.asarray(latents)
    if latents.ndim != 2 or latents.shape[0] != cfg.conditioning_ch:
        raise ValueError(
            f"latents must be [{cfg.conditioning_ch}, n_packets], got {latents.shape}"
        )
    stream = DecoderStream(tensors, cfg)
    n = latents.shape[1]
    per = cfg.samples_per_packet
    out = np.empty((cfg.out_subbands, n * per), dtype=np.float32)
    for k in range(n):
        out[:, k * per : (k + 1) * per] = stream.push(latents[:, k])
    return out
