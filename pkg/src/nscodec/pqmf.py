"""4-band pseudo-QMF analysis/synthesis filterbank.

The prototype is a Kaiser-windowed sinc lowpass (window beta derived
from the stopband attenuation target). Its cutoff is found by a
deterministic scalar grid search minimizing the worst-case amplitude
distortion of the composite analysis+synthesis response, measured over
0..0.95 of Nyquist. Band filters are the standard cosine modulation

    h_k[n] = 2 p[n] cos((2k+1) (pi/8) (n - M) + (-1)^k pi/4)
    g_k[n] = 2 p[n] cos((2k+1) (pi/8) (n - M) - (-1)^k pi/4)

with M = (taps-1)/2, which cancels adjacent-band aliasing up to the
prototype's stopband leakage. Analysis filters then decimates by 4;
synthesis zero-stuffs by 4 (scaled by 4), filters, and sums. Both run
as polyphase sections at the sub-band rate via ``scipy.signal.lfilter``,
whose carried state makes chunked streaming bit-exact with batch use.

A signal pushed through analysis and synthesis comes back delayed by
taps-1 samples (99 for the default 100-tap bank). Filtering is done in
float64 and cast to float32 at the API boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import kaiser_beta, lfilter
from scipy.signal.windows import kaiser

from .audio import AudioBuffer

BANDS = 4


@dataclass(frozen=True, eq=False)
class PqmfBank:
    prototype: np.ndarray
    analysis_filters: np.ndarray
    synthesis_filters: np.ndarray
    cutoff: float

    @property
    def taps(self) -> int:
        return self.prototype.shape[0]

    @property
    def bands(self) -> int:
        return BANDS

    @property
    def synthesis_lookahead(self) -> int:
        """Future samples implied by the synthesis filter: half its group delay."""
        return -(-(self.taps - 1) // 2)

    def polyphase(self, filters: np.ndarray) -> np.ndarray:
        """Split [bands, taps] filters into [bands, 4, ceil(taps/4)] phase rows."""
        taps = filters.shape[1]
        padded = np.zeros((BANDS, -(-taps // 4) * 4))
        padded[:, :taps] = filters
        return np.stack([padded[:, p::4] for p in range(4)], axis=1)


def _prototype(taps: int, cutoff: float, beta: float) -> np.ndarray:
    n = np.arange(taps)
    m = (taps - 1) / 2.0
    return cutoff * np.sinc(cutoff * (n - m)) * kaiser(taps, beta)


def _modulate(proto: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    taps = proto.shape[0]
    n = np.arange(taps)
    m = (taps - 1) / 2.0
    analysis = np.empty((BANDS, taps))
    synthesis = np.empty((BANDS, taps))
    for k in range(BANDS):
        arg = (2 * k + 1) * (np.pi / (2 * BANDS)) * (n - m)
        phase = (-1) ** k * np.pi / 4
        analysis[k] = 2.0 * proto * np.cos(arg + phase)
        synthesis[k] = 2.0 * proto * np.cos(arg - phase)
    return analysis, synthesis


def _composite_ripple_db(proto: np.ndarray, nfft: int = 8192) -> float:
    """Worst-case |gain| deviation (dB) of analysis+synthesis over 0..0.95 Nyquist."""
    analysis, synthesis = _modulate(proto)
    t0 = np.zeros(2 * proto.shape[0] - 1)
    for k in range(BANDS):
        t0 += np.convolve(analysis[k], synthesis[k])
    mag = np.abs(np.fft.rfft(t0, nfft))
    band = mag[: int(0.95 * (nfft // 2))]
    return float(np.max(np.abs(20.0 * np.log10(np.maximum(band, 1e-12)))))


def design_prototype(taps: int = 100, attenuation_db: float = 100.0) -> PqmfBank:
    """Design the bank: Kaiser lowpass with cutoff found by 1-D grid search."""
    if taps < 16:
        raise ValueError(f"prototype needs at least 16 taps, got {taps}")
    if attenuation_db <= 0:
        raise ValueError("attenuation target must be positive")
    beta = kaiser_beta(attenuation_db)

    best_cutoff, best_ripple = None, np.inf
    lo, hi, points = 0.08, 0.20, 121
    for _ in range(3):
        for cutoff in np.linspace(lo, hi, points):
            ripple = _composite_ripple_db(_prototype(taps, cutoff, beta))
            if ripple < best_ripple:
                best_cutoff, best_ripple = float(cutoff), ripple
        step = (hi - lo) / (points - 1)
        lo, hi, points = best_cutoff - step, best_cutoff + step, 41
    if best_ripple > 1.0:
        raise ValueError(
            f"no feasible design: best ripple {best_ripple:.2f} dB with {taps} taps"
        )
    proto = _prototype(taps, best_cutoff, beta)
    analysis, synthesis = _modulate(proto)
    return PqmfBank(proto, analysis, synthesis, cutoff=best_cutoff)


@lru_cache(maxsize=8)
def default_bank(taps: int = 100, attenuation_db: float = 100.0) -> PqmfBank:
    return design_prototype(taps, attenuation_db)


def _phase_signals(x: np.ndarray) -> np.ndarray:
    """Split x (length 4Q) into [4, Q] rows x_p[q] = x[4q - p] (zeros before t=0)."""
    q = x.shape[0] // 4
    phases = np.empty((4, q))
    phases[0] = x[0::4]
    for p in range(1, 4):
        phases[p, 0] = 0.0
        phases[p, 1:] = x[4 - p :: 4][: q - 1]
    return phases


def analyze(x: AudioBuffer, bank: PqmfBank) -> np.ndarray:
    """Split a waveform into 4 critically sampled sub-bands [4, ceil(t/4)]."""
    sig = x.samples.astype(np.float64)
    if sig.size % 4:
        sig = np.pad(sig, (0, 4 - sig.size % 4))
    phases = _phase_signals(sig)
    h_poly = bank.polyphase(bank.analysis_filters)
    bands = np.zeros((BANDS, sig.size // 4))
    for k in range(BANDS):
        for p in range(4):
            bands[k] += lfilter(h_poly[k, p], [1.0], phases[p])
    return bands.astype(np.float32)


class SynthesisStream:
    """Streaming sub-band synthesis; push chunks, get full-rate samples.

    Holds only the FIR filter memory (under one frame of history), so
    output appears as soon as the corresponding sub-band samples arrive.
    """

    def __init__(self, bank: PqmfBank):
        self._g_poly = bank.polyphase(bank.synthesis_filters)
        ntaps = self._g_poly.shape[2]
        self._zi = np.zeros((BANDS, 4, ntaps - 1))

    def push(self, bands: np.ndarray) -> np.ndarray:
        """Feed [4, n] sub-band samples; returns the next 4n output samples."""
        bands = np.asarray(bands)
        if bands.ndim != 2 or bands.shape[0] != BANDS:
            raise ValueError(f"expected [{BANDS}, n] sub-band chunk, got {bands.shape}")
        n = bands.shape[1]
        scaled = bands.astype(np.float64) * 4.0
        out = np.zeros((4, n))
        for k in range(BANDS):
            for p in range(4):
                y, self._zi[k, p] = lfilter(
                    self._g_poly[k, p], [1.0], scaled[k], zi=self._zi[k, p]
                )
                out[p] += y
        interleaved = np.empty(4 * n)
        for p in range(4):
            interleaved[p::4] = out[p]
        return interleaved.astype(np.float32)


def synthesize(bands: np.ndarray, bank: PqmfBank,
               sample_rate_hz: int = 16000) -> AudioBuffer:
    """Merge 4 sub-bands back into a waveform of 4x the sub-band length."""
    return AudioBuffer(SynthesisStream(bank).push(bands), sample_rate_hz)
