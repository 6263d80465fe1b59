"""Command-line interface.

Verbs: encode, decode, truncate, train-codebooks, dump-latents,
delay-report, bench, gen-weights. Exit codes: 0 success, 1 usage error,
2 data/validation error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import codec
from .audio import read_wav, write_wav
from .bitstream import truncate_layers, unpack
from .errors import CodecError, TrainingDataError
from .framing import roll_window
from .rvq import train_codebooks
from .weights import load_weights, random_weights, save_weights


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _layers(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 3:
        raise argparse.ArgumentTypeError(f"layers must be in [1, 3], got {value}")
    return value


def _load_config(path) -> codec.CodecConfig:
    return codec.CodecConfig.from_json(path) if path else codec.CodecConfig()


def build_parser() -> _Parser:
    parser = _Parser(prog="nscodec", description="Streaming low-bit-rate speech codec")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a WAV file to a coded .nsc stream")
    p.add_argument("input"), p.add_argument("output")
    p.add_argument("--weights", required=True)
    p.add_argument("--layers", type=_layers, default=3)
    p.add_argument("--streaming", action="store_true")
    p.add_argument("--config")

    p = sub.add_parser("decode", help="decode a .nsc stream to a WAV file")
    p.add_argument("input"), p.add_argument("output")
    p.add_argument("--weights", required=True)
    p.add_argument("--layers", type=_layers)
    p.add_argument("--streaming", action="store_true")
    p.add_argument("--config")

    p = sub.add_parser("truncate", help="drop trailing quantizer layers of a stream")
    p.add_argument("input"), p.add_argument("output")
    p.add_argument("--layers", type=_layers, required=True)

    p = sub.add_parser("train-codebooks", help="fit RVQ codebooks on a WAV corpus")
    p.add_argument("corpus", help="directory of 16 kHz mono WAV files")
    p.add_argument("--weights", required=True, help="weights file updated in place")
    p.add_argument("--iters", type=_positive_int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")

    p = sub.add_parser("dump-latents", help="export per-packet latents as CSV")
    p.add_argument("input"), p.add_argument("output")
    p.add_argument("--weights", required=True)
    p.add_argument("--quantized", action="store_true")
    p.add_argument("--config")

    p = sub.add_parser("delay-report", help="print the algorithmic delay budget")
    p.add_argument("--config")

    p = sub.add_parser("bench", help="measure encode/decode real-time factors")
    p.add_argument("input")
    p.add_argument("--weights", required=True)
    p.add_argument("--config")

    p = sub.add_parser("gen-weights", help="generate seeded random weights")
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    return parser


def _cmd_encode(args) -> int:
    cfg = _load_config(args.config)
    audio = read_wav(args.input)
    tensors = load_weights(args.weights)
    stream = codec.encode_audio(audio, tensors, cfg, layers=args.layers,
                                streaming=args.streaming)
    Path(args.output).write_bytes(stream)
    print(f"{args.output}: {len(stream)} bytes, {args.layers} layers")
    return 0


def _cmd_decode(args) -> int:
    cfg = _load_config(args.config)
    data = Path(args.input).read_bytes()
    tensors = load_weights(args.weights)
    audio = codec.decode_stream(data, tensors, cfg, layers=args.layers,
                                streaming=args.streaming)
    write_wav(audio, args.output)
    print(f"{args.output}: {audio.samples.size} samples")
    return 0


def _cmd_truncate(args) -> int:
    data = Path(args.input).read_bytes()
    out = truncate_layers(data, args.layers)
    Path(args.output).write_bytes(out)
    print(f"{args.output}: {len(out)} bytes, {args.layers} layers")
    return 0


def _cmd_train(args) -> int:
    cfg = _load_config(args.config)
    paths = sorted(Path(args.corpus).glob("*.wav"))
    if not paths:
        raise TrainingDataError(f"no .wav files in {args.corpus}")
    tensors = load_weights(args.weights)
    columns = []
    for path in paths:
        frames = roll_window(read_wav(path), cfg.framing)
        columns.append(codec.encode(frames, tensors, cfg.encoder))
    latents = np.concatenate(columns, axis=1)
    model = train_codebooks(latents, iters=args.iters, seed=args.seed)
    for stage, history in enumerate(model.training_history):
        print(f"stage {stage} distortion:",
              " ".join(f"{d:.6g}" for d in history))
    tensors.update(model.to_tensors())
    save_weights(tensors, args.weights)
    print(f"{args.weights}: codebooks updated from {latents.shape[1]} packets")
    return 0


def _cmd_dump_latents(args) -> int:
    cfg = _load_config(args.config)
    audio = read_wav(args.input)
    tensors = load_weights(args.weights)
    latents = codec.dump_latents(audio, tensors, cfg, quantized=args.quantized)
    with open(args.output, "w", newline="") as f:
        writer = csv.writer(f)
        for k in range(latents.shape[1]):
            writer.writerow([k] + [repr(float(v)) for v in latents[:, k]])
    print(f"{args.output}: {latents.shape[1]} packets x {latents.shape[0]} dims")
    return 0


def _cmd_delay_report(args) -> int:
    report = codec.compute_delay_report(_load_config(args.config))
    print(f"framing_lookahead_ms: {report.framing_lookahead_ms:g}")
    print(f"frame_buffer_ms: {report.frame_buffer_ms:g}")
    print(f"decoder_ms: {report.decoder_ms:g}")
    print(f"total_ms: {report.total_ms:g}")
    return 0


def _cmd_bench(args) -> int:
    cfg = _load_config(args.config)
    audio = read_wav(args.input)
    tensors = load_weights(args.weights)
    result = codec.bench(audio, tensors, cfg)
    print(f"audio_seconds: {result.audio_seconds:.2f}")
    print(f"encode_rtf: {result.encode_rtf:.2f}")
    print(f"decode_rtf: {result.decode_rtf:.2f}")
    return 0


def _cmd_gen_weights(args) -> int:
    cfg = _load_config(args.config)
    tensors = random_weights(codec.full_manifest(cfg), seed=args.seed)
    save_weights(tensors, args.output)
    total = sum(t.size for t in tensors.values())
    print(f"{args.output}: {len(tensors)} tensors, {total} parameters, seed {args.seed}")
    return 0


_COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "truncate": _cmd_truncate,
    "train-codebooks": _cmd_train,
    "dump-latents": _cmd_dump_latents,
    "delay-report": _cmd_delay_report,
    "bench": _cmd_bench,
    "gen-weights": _cmd_gen_weights,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except CodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
