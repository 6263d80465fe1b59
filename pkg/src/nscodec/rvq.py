"""Residual vector quantization over the 256-dim latent space.

Three 10-bit codebooks quantize each packet greedily: stage i picks the
codebook entry nearest (squared Euclidean, ties to the lowest index) to
the running residual, which the next stage then refines. Decoding sums
the selected entries, so trailing stages can be dropped to scale the
bitrate down.

Codebooks are learned stage-wise with Lloyd k-means (k-means++ seeding)
on encoder latents: train stage i on the residuals left by stages < i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import ManifestError, TrainingDataError
from .weights import TensorMap

LATENT_DIM = 256
CODEBOOK_BITS = 10
N_STAGES = 3

PacketCodes = tuple  # 1..3 ints, each in [0, 2**CODEBOOK_BITS)


@dataclass
class RvqModel:
    """Ordered codebooks, stacked [stages, entries, dim]."""

    codebooks: np.ndarray
    training_history: list = field(default=None, repr=False)

    def __post_init__(self):
        cb = np.asarray(self.codebooks, dtype=np.float32)
        if cb.ndim != 3:
            raise ValueError("codebooks must be [stages, entries, dim]")
        if not np.all(np.isfinite(cb)):
            raise ValueError("codebooks contain NaN or Inf")
        self.codebooks = cb

    @property
    def n_stages(self) -> int:
        return self.codebooks.shape[0]

    @property
    def n_entries(self) -> int:
        return self.codebooks.shape[1]

    @property
    def dim(self) -> int:
        return self.codebooks.shape[2]

    @classmethod
    def from_tensors(cls, tensors: TensorMap, stages: int = N_STAGES) -> "RvqModel":
        expected = (1 << CODEBOOK_BITS, LATENT_DIM)
        books = []
        for i in range(stages):
            name = f"rvq.codebook.{i}"
            if name not in tensors:
                raise ManifestError(f"missing tensor {name!r} (expected shape {expected})")
            if tuple(tensors[name].shape) != expected:
                raise ManifestError(
                    f"tensor {name!r} has shape {tuple(tensors[name].shape)}, "
                    f"expected {expected}"
                )
            books.append(tensors[name])
        return cls(np.stack(books))

    def to_tensors(self) -> TensorMap:
        return {f"rvq.codebook.{i}": self.codebooks[i] for i in range(self.n_stages)}


def quantize(z: np.ndarray, model: RvqModel, layers: int) -> PacketCodes:
    """Greedy stage-wise encode of one latent vector into ``layers`` indices."""
    if not 1 <= layers <= model.n_stages:
        raise ValueError(f"layers must be in [1, {model.n_stages}], got {layers}")
    z = np.asarray(z, dtype=np.float32)
    if z.shape != (model.dim,):
        raise ValueError(f"latent must have shape ({model.dim},), got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("latent contains NaN or Inf")
    indices = []
    residual = z
    for stage in range(layers):
        book = model.codebooks[stage]
        distances = np.sum((book - residual) ** 2, axis=1)
        idx = int(np.argmin(distances))
        indices.append(idx)
        residual = residual - book[idx]
    return tuple(indices)


def dequantize(codes: PacketCodes, model: RvqModel) -> np.ndarray:
    """Sum the codebook entries selected by ``codes`` (any prefix length)."""
    if not 1 <= len(codes) <= model.n_stages:
        raise ValueError(f"codes must hold 1..{model.n_stages} indices, got {len(codes)}")
    out = np.zeros(model.dim, dtype=np.float32)
    for stage, idx in enumerate(codes):
        if not 0 <= idx < model.n_entries:
            raise ValueError(f"stage {stage} index {idx} out of range [0, {model.n_entries})")
        out = out + model.codebooks[stage, idx]
    return out


def stage_error(z: np.ndarray, model: RvqModel, layers: int) -> float:
    """Squared reconstruction error of quantizing ``z`` with ``layers`` stages."""
    approx = dequantize(quantize(z, model, layers), model)
    diff = np.asarray(z, dtype=np.float32) - approx
    return float(np.dot(diff, diff))


def _assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Nearest-centroid assignment via the expanded distance; float64 math."""
    p2 = np.einsum("nd,nd->n", points, points)[:, None]
    c2 = np.einsum("kd,kd->k", centroids, centroids)[None, :]
    d2 = p2 + c2 - 2.0 * (points @ centroids.T)
    return np.argmin(d2, axis=1)


def _kmeans_pp_seed(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=points.dtype)
    centroids[0] = points[rng.integers(n)]
    d2 = np.sum((points - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centroids[i] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centroids[i]) ** 2, axis=1))
    return centroids


def kmeans(points: np.ndarray, k: int, iters: int,
           rng: np.random.Generator) -> tuple[np.ndarray, list[float]]:
    """Lloyd k-means; returns (centroids [k, d], mean distortion per iteration).

    Distortion is measured at assignment time, before the centroid
    update, so the sequence is non-increasing. Empty clusters are
    re-seeded at the currently worst-quantized point.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k > n:
        raise TrainingDataError(f"need at least {k} vectors, got {n}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    centroids = _kmeans_pp_seed(points, k, rng)
    history = []
    assignment = None
    for _ in range(iters):
        assignment = _assign(points, centroids)
        point_err = np.sum((points - centroids[assignment]) ** 2, axis=1)
        history.append(float(point_err.mean()))
        counts = np.bincount(assignment, minlength=k)
        onehot = sparse.csr_matrix(
            (np.ones(n), assignment, np.arange(n + 1)), shape=(n, k)
        )
        sums = onehot.T @ points
        nonempty = counts > 0
        centroids[nonempty] = sums[nonempty] / counts[nonempty, None]
        for j in np.flatnonzero(~nonempty):
            worst = int(np.argmax(point_err))
            centroids[j] = points[worst]
            point_err[worst] = 0.0
    return centroids, history


def train_codebooks(latents: np.ndarray, stages: int = N_STAGES,
                    bits: int = CODEBOOK_BITS, iters: int = 20,
                    seed: int = 0) -> RvqModel:
    """Stage-wise k-means codebook learning on latent columns [dim, n]."""
    latents = np.asarray(latents)
    if latents.ndim != 2:
        raise ValueError("latents must be [dim, n_packets]")
    k = 1 << bits
    points = latents.T.astype(np.float64)
    if points.shape[0] < k:
        raise TrainingDataError(
            f"training needs at least {k} latent vectors, got {points.shape[0]}"
        )
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    rng = np.random.default_rng(seed)
    books = []
    histories = []
    residuals = points
    for _ in range(stages):
        centroids, history = kmeans(residuals, k, iters, rng)
        assignment = _assign(residuals, centroids)
        residuals = residuals - centroids[assignment]
        books.append(centroids.astype(np.float32))
        histories.append(history)
    return RvqModel(np.stack(books), training_history=histories)
