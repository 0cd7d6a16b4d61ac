"""Cross-entropy family: plain, class-weighted, truncated, focal, and
distance-penalized variants.

All kernels take a one-hot ground truth ``g`` and a probability map ``s``
of shape ``dims + (C,)`` and return a LossResult whose gradient is taken
w.r.t. the probability entries (class-excluded entries get zero gradient).
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_CONFIG, LossConfig
from .core import LossResult, check_pair
from .errors import ValidationError


def _included(cfg: LossConfig, num_classes: int) -> slice:
    if num_classes < 2:
        raise ValidationError(f"need >= 2 classes, got {num_classes}")
    return slice(cfg.first_class(), None)


def _clamped(s_part: np.ndarray, cfg: LossConfig) -> np.ndarray:
    return np.clip(s_part, cfg.log_clamp, 1.0)


def ce(g: np.ndarray, s: np.ndarray, cfg: LossConfig = DEFAULT_CONFIG) -> LossResult:
    """Mean cross-entropy over pixels: -(1/N) sum_i log s_i[true class]."""
    g, s = check_pair(g, s)
    sl = _included(cfg, g.shape[-1])
    n = float(np.prod(g.shape[:-1]))
    sc = _clamped(s[..., sl], cfg)
    gi = g[..., sl]
    value = -(gi * np.log(sc)).sum() / n
    grad = np.zeros_like(s)
    grad[..., sl] = -gi / (n * sc)
    return LossResult(float(value), grad)


def wce(
    g: np.ndarray,
    s: np.ndarray,
    weights: np.ndarray,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Class-weighted cross-entropy; ``weights`` has one entry per class."""
    g, s = check_pair(g, s)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (g.shape[-1],):
        raise ValidationError(
            f"weights shape {w.shape} does not match {g.shape[-1]} classes"
        )
    if (w < 0).any() or not np.isfinite(w).all():
        raise ValidationError("class weights must be finite and non-negative")
    if not (w > 0).any():
        raise ValidationError("at least one class weight must be positive")
    sl = _included(cfg, g.shape[-1])
    n = float(np.prod(g.shape[:-1]))
    sc = _clamped(s[..., sl], cfg)
    gi = g[..., sl]
    value = -(w[sl] * gi * np.log(sc)).sum() / n
    grad = np.zeros_like(s)
    grad[..., sl] = -w[sl] * gi / (n * sc)
    return LossResult(float(value), grad)


def topk_keep_set(
    g: np.ndarray,
    s: np.ndarray,
    threshold: float,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """The pixel set topk would select at this prediction (true-class
    probability below the threshold), as a boolean grid."""
    g, s = check_pair(g, s)
    sl = _included(cfg, g.shape[-1])
    gi = g[..., sl]
    s_true = (gi * s[..., sl]).sum(axis=-1)
    return (gi.sum(axis=-1) > 0) & (s_true < threshold)


def topk(
    g: np.ndarray,
    s: np.ndarray,
    threshold: float = 0.5,
    cfg: LossConfig = DEFAULT_CONFIG,
    keep: np.ndarray | None = None,
) -> LossResult:
    """Truncated cross-entropy: average -log s[true] over the hard pixels
    only, i.e. those whose true-class probability falls below ``threshold``.

    ``keep`` pins the selected pixel set explicitly (boolean over the grid);
    it is what a finite-difference probe passes so that both sides of the
    comparison differentiate the same smooth branch.
    """
    g, s = check_pair(g, s)
    if not (0.0 < threshold <= 1.0):
        raise ValidationError(f"threshold must be in (0, 1], got {threshold}")
    sl = _included(cfg, g.shape[-1])
    gi = g[..., sl]
    s_true = (gi * s[..., sl]).sum(axis=-1)
    has_true = gi.sum(axis=-1) > 0
    if keep is None:
        keep = has_true & (s_true < threshold)
    else:
        keep = np.asarray(keep, dtype=bool)
        if keep.shape != g.shape[:-1]:
            raise ValidationError(f"keep mask shape {keep.shape} != grid {g.shape[:-1]}")
    k = int(keep.sum())
    grad = np.zeros_like(s)
    if k == 0:
        return LossResult(0.0, grad, flags=("empty-keep-set",))
    stc = np.maximum(s_true, cfg.log_clamp)
    value = -np.log(stc[keep]).sum() / k
    grad[..., sl] = -gi * (keep / (k * stc))[..., None]
    return LossResult(float(value), grad)


def focal(
    g: np.ndarray,
    s: np.ndarray,
    gamma: float = 2.0,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Focal cross-entropy: each pixel's -log s[true] scaled by (1-s[true])^gamma.

    gamma = 0 reduces exactly to plain cross-entropy.
    """
    g, s = check_pair(g, s)
    if gamma < 0 or not np.isfinite(gamma):
        raise ValidationError(f"gamma must be finite and >= 0, got {gamma}")
    sl = _included(cfg, g.shape[-1])
    n = float(np.prod(g.shape[:-1]))
    gi = g[..., sl]
    si = s[..., sl]
    sc = _clamped(si, cfg)
    log_sc = np.log(sc)
    one_minus = 1.0 - si
    modul = one_minus**gamma
    if gamma == 0.0:
        dmodul = np.zeros_like(one_minus)
    else:
        # derivative of the modulation; its product with log(s) -> 0 as s -> 1
        with np.errstate(divide="ignore", invalid="ignore"):
            dmodul = np.where(one_minus > 0.0, gamma * one_minus ** (gamma - 1.0), 0.0)
    value = -(gi * modul * log_sc).sum() / n
    grad = np.zeros_like(s)
    grad[..., sl] = gi * (dmodul * log_sc - modul / sc) / n
    return LossResult(float(value), grad)


def dpce(
    g: np.ndarray,
    s: np.ndarray,
    dist: np.ndarray,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Distance-penalized cross-entropy: per-entry weight (1 + D) where D is a
    non-negative distance map of the same shape as the probability map.

    D = 0 everywhere reduces exactly to plain cross-entropy.
    """
    g, s = check_pair(g, s)
    d = np.asarray(dist, dtype=np.float64)
    if d.shape != g.shape:
        raise ValidationError(f"distance map shape {d.shape} != {g.shape}")
    if not np.isfinite(d).all() or (d < 0).any():
        raise ValidationError("distance map must be finite and non-negative")
    sl = _included(cfg, g.shape[-1])
    n = float(np.prod(g.shape[:-1]))
    gi = g[..., sl]
    sc = _clamped(s[..., sl], cfg)
    wi = 1.0 + d[..., sl]
    value = -(wi * gi * np.log(sc)).sum() / n
    grad = np.zeros_like(s)
    grad[..., sl] = -wi * gi / (n * sc)
    return LossResult(float(value), grad)
