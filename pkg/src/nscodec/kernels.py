"""Deterministic forward-pass kernels for the encoder and decoder.

All tensors are 2-D float32 arrays laid out [channels, time]. Kernels
are pure functions; recurrent state is owned by the caller. The
convolution core works on explicitly padded input so that streaming
runtimes can feed it chunk tails and get results bit-identical to the
batch path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


@dataclass(frozen=True)
class ConvParams:
    """1-D convolution parameters: weight [out, in, kernel], bias [out]."""

    weight: np.ndarray
    bias: np.ndarray
    causal: bool = True

    def __post_init__(self):
        if self.weight.ndim != 3:
            raise ValueError("conv weight must be [out, in, kernel]")
        if self.kernel % 2 == 0:
            raise ValueError(f"kernel size must be odd, got {self.kernel}")
        if self.bias.shape != (self.out_channels,):
            raise ValueError("bias shape must match output channels")

    @property
    def out_channels(self) -> int:
        return self.weight.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weight.shape[1]

    @property
    def kernel(self) -> int:
        return self.weight.shape[2]


@dataclass(frozen=True)
class GruParams:
    """GRU parameters with gates ordered reset, update, new.

    input_weights [3*hidden, input], recurrent_weights [3*hidden, hidden],
    biases [3*hidden] on both paths.
    """

    input_weights: np.ndarray
    recurrent_weights: np.ndarray
    input_bias: np.ndarray
    recurrent_bias: np.ndarray

    def __post_init__(self):
        h = self.hidden
        if self.input_weights.shape[0] != 3 * h:
            raise ValueError("input_weights first dim must be 3*hidden")
        if self.recurrent_weights.shape != (3 * h, h):
            raise ValueError("recurrent_weights must be [3*hidden, hidden]")
        if self.input_bias.shape != (3 * h,) or self.recurrent_bias.shape != (3 * h,):
            raise ValueError("biases must be [3*hidden]")

    @property
    def hidden(self) -> int:
        return self.recurrent_weights.shape[1]

    @property
    def input_size(self) -> int:
        return self.input_weights.shape[1]


def _check_2d(x: np.ndarray, name: str = "input") -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError(f"{name} must be 2-D [channels, time], got shape {x.shape}")
    return x


def window_columns(x: np.ndarray, kernel: int) -> np.ndarray:
    """Stack sliding windows of ``x`` [C, T+k-1] into [C*k, T] rows.

    Row c*k + j holds x[c, j : j+T]; matches the row-major flattening of
    a [out, in, kernel] weight tensor.
    """
    c, padded = x.shape
    t = padded - kernel + 1
    cols = np.empty((c * kernel, t), dtype=x.dtype)
    for j in range(kernel):
        cols[j::kernel] = x[:, j : j + t]
    return cols


def conv_valid(x_padded: np.ndarray, weight2d: np.ndarray, bias: np.ndarray,
               kernel: int) -> np.ndarray:
    """Valid convolution of pre-padded input with a flattened weight matrix."""
    if kernel == 1:
        return weight2d @ x_padded + bias[:, None]
    return weight2d @ window_columns(x_padded, kernel) + bias[:, None]


def conv1d(x: np.ndarray, p: ConvParams) -> np.ndarray:
    """Same-length 1-D convolution.

    Causal: y[t] sees x[t-k+1 .. t] (zero left padding). Centered: zero
    padding split evenly on both sides.
    """
    x = _check_2d(x)
    if x.shape[0] != p.in_channels:
        raise ValueError(
            f"channel mismatch: input has {x.shape[0]}, weights expect {p.in_channels}"
        )
    k = p.kernel
    if p.causal:
        left, right = k - 1, 0
    else:
        left = right = (k - 1) // 2
    if left or right:
        x = np.pad(x, ((0, 0), (left, right)))
    w2d = np.ascontiguousarray(p.weight.reshape(p.out_channels, -1))
    return conv_valid(x, w2d, p.bias, k)


def gru_step(x: np.ndarray, h: np.ndarray, p: GruParams) -> np.ndarray:
    """One GRU time step; returns the new hidden state."""
    hd = p.hidden
    gi = p.input_weights @ x + p.input_bias
    gh = p.recurrent_weights @ h + p.recurrent_bias
    r = expit(gi[:hd] + gh[:hd])
    z = expit(gi[hd : 2 * hd] + gh[hd : 2 * hd])
    n = np.tanh(gi[2 * hd :] + r * gh[2 * hd :])
    return (1.0 - z) * n + z * h


def gru_forward(x: np.ndarray, p: GruParams,
                h0: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Run a GRU over [input, time]; returns ([hidden, time], final state)."""
    x = _check_2d(x)
    if x.shape[0] != p.input_size:
        raise ValueError(
            f"input size mismatch: got {x.shape[0]}, GRU expects {p.input_size}"
        )
    h = np.zeros(p.hidden, dtype=x.dtype) if h0 is None else np.asarray(h0)
    if h.shape != (p.hidden,):
        raise ValueError(f"h0 must have shape ({p.hidden},), got {h.shape}")
    out = np.empty((p.hidden, x.shape[1]), dtype=x.dtype)
    for t in range(x.shape[1]):
        h = gru_step(x[:, t], h, p)
        out[:, t] = h
    return out, h


def leaky_relu(x: np.ndarray, slope: float = 0.2) -> np.ndarray:
    """Elementwise max(x, slope * x)."""
    return np.maximum(x, np.float32(slope) * x)


def softmax_gated_tanh(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """tanh(a) gated by a channel softmax of b, per time step."""
    a = _check_2d(a, "a")
    b = _check_2d(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    e = np.exp(b - b.max(axis=0, keepdims=True))
    return np.tanh(a) * (e / e.sum(axis=0, keepdims=True))


def upsample_repeat(x: np.ndarray, factor: int) -> np.ndarray:
    """Nearest-neighbor upsampling: repeat each time step ``factor`` times."""
    x = _check_2d(x)
    if factor < 1:
        raise ValueError(f"upsample factor must be >= 1, got {factor}")
    return np.repeat(x, factor, axis=1)


def channel_norm(x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Per-channel normalization over the time axis: (x - mean) / sqrt(var + eps)."""
    x = _check_2d(x)
    mean = x.mean(axis=1, keepdims=True, dtype=np.float32)
    var = np.mean((x - mean) ** 2, axis=1, keepdims=True, dtype=np.float32)
    return (x - mean) / np.sqrt(var + np.float32(eps))
