"""Label / probability tensor model: validation, one-hot encoding, softmax.

Layout conventions used throughout the package:

* label maps are integer arrays over the spatial grid, shape ``dims``
  (rank 1 to 3),
* one-hot encodings and probability maps are float arrays with a trailing
  class axis, shape ``dims + (C,)``, ``C >= 2``,
* a "pixel" is one spatial location, ``N`` is the number of pixels.

Class 0 is the background by convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

MAX_SPATIAL_RANK = 3


def validate_labels(labels: np.ndarray, num_classes: int) -> np.ndarray:
    """Check a label map and return it as a contiguous int array."""
    labels = np.asarray(labels)
    if not np.issubdtype(labels.dtype, np.integer):
        raise ValidationError(f"label map must be integer, got dtype {labels.dtype}")
    if labels.ndim < 1 or labels.ndim > MAX_SPATIAL_RANK:
        raise ValidationError(f"label map rank must be 1..{MAX_SPATIAL_RANK}, got {labels.ndim}")
    if labels.size == 0:
        raise ValidationError("label map is empty")
    if num_classes < 2:
        raise ValidationError(f"num_classes must be >= 2, got {num_classes}")
    bad = (labels < 0) | (labels >= num_classes)
    if bad.any():
        idx = np.argwhere(bad)[0]
        raise ValidationError(
            f"label {labels[tuple(idx)]} at index {tuple(int(i) for i in idx)} "
            f"outside [0, {num_classes})"
        )
    return np.ascontiguousarray(labels)


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    """One-hot encode a label map to shape ``dims + (num_classes,)``, float64.

    Exactly one 1.0 per pixel; everything else 0.0.
    """
    labels = validate_labels(labels, num_classes)
    out = np.zeros(labels.shape + (num_classes,), dtype=np.float64)
    np.put_along_axis(out, labels[..., None], 1.0, axis=-1)
    return out


def validate_prob(s: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Check a probability map: entries in [0, 1], per-pixel sums within tol of 1.

    Returns the map as float64. Raises ValidationError naming the first
    offending pixel.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.ndim < 2 or s.ndim - 1 > MAX_SPATIAL_RANK:
        raise ValidationError(
            f"probability map must have 1..{MAX_SPATIAL_RANK} spatial axes plus a "
            f"class axis, got rank {s.ndim}"
        )
    if s.shape[-1] < 2:
        raise ValidationError(f"probability map needs >= 2 classes, got {s.shape[-1]}")
    if s.size == 0:
        raise ValidationError("probability map is empty")
    inside = (s >= 0.0) & (s <= 1.0)  # NaN fails both comparisons
    if not inside.all():
        idx = np.argwhere(~inside)[0]
        raise ValidationError(
            f"probability {s[tuple(idx)]} at index {tuple(int(i) for i in idx)} "
            f"outside [0, 1]"
        )
    sums = s.sum(axis=-1)
    off = np.abs(sums - 1.0) > tol
    if off.any():
        idx = np.argwhere(off)[0]
        raise ValidationError(
            f"pixel {tuple(int(i) for i in idx)} sums to {sums[tuple(idx)]!r}, "
            f"more than {tol} away from 1"
        )
    return s


def softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax over the trailing class axis (shift-stabilized)."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim < 2:
        raise ValidationError("softmax input needs a trailing class axis")
    if not np.isfinite(z).all():
        raise ValidationError("softmax input must be finite")
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_vjp(s: np.ndarray, grad_s: np.ndarray) -> np.ndarray:
    """Pull a gradient w.r.t. softmax outputs back to the logits.

    For each pixel: g_z = s * (g_s - <s, g_s>).
    """
    s = np.asarray(s, dtype=np.float64)
    grad_s = np.asarray(grad_s, dtype=np.float64)
    if s.shape != grad_s.shape:
        raise ValidationError(f"shape mismatch: s {s.shape} vs grad {grad_s.shape}")
    inner = (s * grad_s).sum(axis=-1, keepdims=True)
    return s * (grad_s - inner)


@dataclass(frozen=True)
class LossResult:
    """A scalar loss value plus its gradient w.r.t. the probability map.

    ``flags`` records non-fatal conditions hit during evaluation
    (degenerate classes skipped, sentinel distances used, ...).
    """

    value: float
    grad: np.ndarray
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValidationError(f"loss value is not finite: {self.value!r}")
        if not np.isfinite(self.grad).all():
            raise ValidationError("loss gradient contains non-finite entries")


def check_pair(g: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Common entry check for loss kernels: matching one-hot / prob shapes."""
    g = np.asarray(g, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if g.shape != s.shape:
        raise ValidationError(f"shape mismatch: ground truth {g.shape} vs prediction {s.shape}")
    if g.ndim < 2 or g.shape[-1] < 2:
        raise ValidationError(f"expected dims + (C>=2,) arrays, got shape {g.shape}")
    return g, s
