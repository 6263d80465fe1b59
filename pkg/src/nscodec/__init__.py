"""Streaming low-bit-rate neural speech codec runtime.

16 kHz mono speech is framed into 10 ms packets, encoded to 256-dim
latents, residual-vector-quantized into 1-3 indices of 10 bits each
(1-3 kbps), and decoded through a conditioned upsampling synthesizer
plus a 4-band PQMF synthesis filterbank. All inference is deterministic
forward computation over a documented weights container.
"""

from .audio import SAMPLE_RATE, AudioBuffer, read_wav, write_wav
from .bitstream import BitstreamHeader, pack, truncate_layers, unpack
from .codec import (
    BenchResult,
    CodecConfig,
    DelayReport,
    bench,
    compute_delay_report,
    decode_stream,
    dump_latents,
    encode_audio,
    full_manifest,
)
from .decoder import DecoderConfig, DecoderStream, count_decoder_params, decode_subbands
from .encoder import EncoderConfig, EncoderStream, count_encoder_params, encode
from .errors import CodecError
from .framing import Framer, FramingConfig, FrameMatrix, roll_window
from .pqmf import PqmfBank, SynthesisStream, analyze, design_prototype, synthesize
from .rvq import RvqModel, dequantize, quantize, stage_error, train_codebooks
from .weights import load_weights, random_weights, save_weights, validate_tensors

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer", "BenchResult", "BitstreamHeader", "CodecConfig", "CodecError",
    "DecoderConfig", "DecoderStream", "DelayReport", "EncoderConfig",
    "EncoderStream", "FrameMatrix", "Framer", "FramingConfig", "PqmfBank",
    "RvqModel", "SAMPLE_RATE", "SynthesisStream", "analyze", "bench",
    "compute_delay_report", "count_decoder_params", "count_encoder_params",
    "decode_stream", "decode_subbands", "dequantize", "design_prototype",
    "dump_latents", "encode", "encode_audio", "full_manifest", "load_weights",
    "pack", "quantize", "random_weights", "read_wav", "roll_window",
    "save_weights", "stage_error", "synthesize", "train_codebooks",
    "truncate_layers", "unpack", "validate_tensors", "write_wav",
]
