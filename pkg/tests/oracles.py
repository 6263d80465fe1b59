"""Naive reference implementations the fast kernels are checked against.

Everything here trades speed for obviousness: explicit loops, float64
math, no shared code with the package internals.
"""

import numpy as np


def conv1d_ref(x, weight, bias, causal=True):
    out_ch, in_ch, kernel = weight.shape
    t = x.shape[1]
    left = kernel - 1 if causal else (kernel - 1) // 2
    y = np.zeros((out_ch, t), dtype=np.float64)
    for o in range(out_ch):
        for ti in range(t):
            acc = float(bias[o])
            for c in range(in_ch):
                for k in range(kernel):
                    src = ti - left + k
                    if 0 <= src < t:
                        acc += float(weight[o, c, k]) * float(x[c, src])
            y[o, ti] = acc
    return y


def gru_ref(x, w_ih, w_hh, b_ih, b_hh, h0=None):
    hidden = w_hh.shape[1]
    t = x.shape[1]
    h = np.zeros(hidden) if h0 is None else np.asarray(h0, dtype=np.float64)
    out = np.zeros((hidden, t))
    for ti in range(t):
        gi = w_ih.astype(np.float64) @ x[:, ti].astype(np.float64) + b_ih
        gh = w_hh.astype(np.float64) @ h + b_hh
        r = 1.0 / (1.0 + np.exp(-(gi[:hidden] + gh[:hidden])))
        z = 1.0 / (1.0 + np.exp(-(gi[hidden:2 * hidden] + gh[hidden:2 * hidden])))
        n = np.tanh(gi[2 * hidden:] + r * gh[2 * hidden:])
        h = (1.0 - z) * n + z * h
        out[:, ti] = h
    return out, h


def leaky_relu_ref(x, slope=0.2):
    y = np.array(x, dtype=np.float64)
    for idx in np.ndindex(y.shape):
        if y[idx] < 0:
            y[idx] *= slope
    return y


def softmax_gated_tanh_ref(a, b):
    c, t = a.shape
    y = np.zeros((c, t))
    for ti in range(t):
        e = np.exp(b[:, ti].astype(np.float64))
        y[:, ti] = np.tanh(a[:, ti].astype(np.float64)) * e / e.sum()
    return y


def upsample_repeat_ref(x, factor):
    c, t = x.shape
    y = np.zeros((c, t * factor), dtype=x.dtype)
    for ti in range(t):
        for f in range(factor):
            y[:, ti * factor + f] = x[:, ti]
    return y


def channel_norm_ref(x, eps=1e-5):
    y = np.zeros_like(x, dtype=np.float64)
    for c in range(x.shape[0]):
        row = x[c].astype(np.float64)
        mean = row.mean()
        var = ((row - mean) ** 2).mean()
        y[c] = (row - mean) / np.sqrt(var + eps)
    return y


def nearest_entry_ref(residual, codebook):
    """Exhaustive argmin of squared distance; same float32 ops as production."""
    best_idx, best_d = 0, np.inf
    for i in range(codebook.shape[0]):
        d = float(np.sum((codebook[i] - residual) ** 2))
        if d < best_d:
            best_idx, best_d = i, d
    return best_idx


def pqmf_analyze_ref(x, bank):
    """Direct filter-then-decimate (float64 causal FIR)."""
    taps = bank.taps
    bands = []
    for k in range(4):
        h = bank.analysis_filters[k]
        full = np.convolve(x.astype(np.float64), h)[: x.size]
        bands.append(full[::4])
    return np.stack(bands)


def pqmf_synthesize_ref(bands, bank):
    """Direct zero-stuff (x4), filter, and sum."""
    n = bands.shape[1]
    y = np.zeros(4 * n)
    for k in range(4):
        up = np.zeros(4 * n)
        up[::4] = 4.0 * bands[k].astype(np.float64)
        y += np.convolve(up, bank.synthesis_filters[k])[: 4 * n]
    return y
