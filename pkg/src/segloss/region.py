"""Overlap-style losses: soft Dice and friends.

Sums run pooled over pixels and included classes (class 0 drops out when
the config excludes the background). The asymmetric similarity loss is the
exception: it is defined per foreground class and averaged, independent of
the background toggle.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_CONFIG, LossConfig
from .core import LossResult, check_pair
from .errors import ValidationError


def _parts(g, s, cfg):
    g, s = check_pair(g, s)
    sl = slice(cfg.first_class(), None)
    return g, s, g[..., sl], s[..., sl], sl


def ss_loss(
    g: np.ndarray,
    s: np.ndarray,
    w: float = 0.5,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Sensitivity-specificity loss: squared errors split by true region.

    w weights the foreground (sensitivity) term, 1-w the background term.
    """
    g, s, gi, si, sl = _parts(g, s, cfg)
    if not (0.0 <= w <= 1.0):
        raise ValidationError(f"w must be in [0, 1], got {w}")
    eps = cfg.epsilon
    sq = (gi - si) ** 2
    pos = gi.sum() + eps
    neg = (1.0 - gi).sum() + eps
    value = w * (sq * gi).sum() / pos + (1.0 - w) * (sq * (1.0 - gi)).sum() / neg
    grad = np.zeros_like(s)
    grad[..., sl] = -2.0 * (gi - si) * (w * gi / pos + (1.0 - w) * (1.0 - gi) / neg)
    return LossResult(float(value), grad)


def dice_loss(g: np.ndarray, s: np.ndarray, cfg: LossConfig = DEFAULT_CONFIG) -> LossResult:
    """Soft Dice loss with squared-sum denominator:
    1 - (2<g,s> + eps) / (|g|^2 + |s|^2 + eps).
    """
    g, s, gi, si, sl = _parts(g, s, cfg)
    eps = cfg.epsilon
    a = 2.0 * (gi * si).sum() + eps
    b = (gi**2).sum() + (si**2).sum() + eps
    value = 1.0 - a / b
    grad = np.zeros_like(s)
    grad[..., sl] = -(2.0 * gi * b - a * 2.0 * si) / b**2
    return LossResult(float(value), grad)


def iou_loss(g: np.ndarray, s: np.ndarray, cfg: LossConfig = DEFAULT_CONFIG) -> LossResult:
    """Soft Jaccard loss: 1 - (<g,s> + eps) / (sum(g) + sum(s) - <g,s> + eps)."""
    g, s, gi, si, sl = _parts(g, s, cfg)
    eps = cfg.epsilon
    a = (gi * si).sum() + eps
    b = gi.sum() + si.sum() - (gi * si).sum() + eps
    value = 1.0 - a / b
    grad = np.zeros_like(s)
    grad[..., sl] = -(gi * b - a * (1.0 - gi)) / b**2
    return LossResult(float(value), grad)


def tversky_index(
    g: np.ndarray,
    s: np.ndarray,
    alpha: float = 0.3,
    beta: float = 0.7,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Soft Tversky index: overlap over overlap + alpha*FP + beta*FN.

    alpha = beta = 0.5 makes 1 - index coincide with the linear-denominator
    Dice loss (with the stabilizer doubled accordingly).
    """
    g, s, gi, si, sl = _parts(g, s, cfg)
    if alpha < 0 or beta < 0 or not np.isfinite(alpha) or not np.isfinite(beta):
        raise ValidationError(f"alpha/beta must be finite and >= 0, got {alpha}, {beta}")
    if alpha + beta == 0:
        raise ValidationError("alpha + beta must be positive")
    eps = cfg.epsilon
    overlap = (gi * si).sum()
    fp = ((1.0 - gi) * si).sum()
    fn = (gi * (1.0 - si)).sum()
    a = overlap + eps
    b = overlap + alpha * fp + beta * fn + eps
    value = a / b
    db = gi + alpha * (1.0 - gi) - beta * gi  # d b / d s
    grad = np.zeros_like(s)
    grad[..., sl] = (gi * b - a * db) / b**2
    return LossResult(float(value), grad)


def tversky_loss(
    g: np.ndarray,
    s: np.ndarray,
    alpha: float = 0.3,
    beta: float = 0.7,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """1 - Tversky index."""
    idx = tversky_index(g, s, alpha, beta, cfg)
    return LossResult(1.0 - idx.value, -idx.grad, idx.flags)


def generalized_dice_loss(
    g: np.ndarray, s: np.ndarray, cfg: LossConfig = DEFAULT_CONFIG
) -> LossResult:
    """Generalized Dice loss with per-class weights 1 / (class volume)^2.

    Classes absent from the ground truth get weight 0 (and a flag) instead
    of an infinite weight.
    """
    g, s, gi, si, sl = _parts(g, s, cfg)
    eps = cfg.epsilon
    counts = gi.reshape(-1, gi.shape[-1]).sum(axis=0)
    flags = []
    with np.errstate(divide="ignore"):
        w = np.where(counts > 0, 1.0 / counts**2, 0.0)
    for c in np.nonzero(counts == 0)[0]:
        flags.append(f"empty-class-{c + cfg.first_class()}")
    overlap_c = (gi * si).reshape(-1, gi.shape[-1]).sum(axis=0)
    total_c = (gi + si).reshape(-1, gi.shape[-1]).sum(axis=0)
    u = 2.0 * (w * overlap_c).sum() + eps
    v = (w * total_c).sum() + eps
    value = 1.0 - u / v
    grad = np.zeros_like(s)
    grad[..., sl] = -w * (2.0 * gi * v - u) / v**2
    return LossResult(float(value), grad, tuple(flags))


def focal_tversky_loss(
    g: np.ndarray,
    s: np.ndarray,
    alpha: float = 0.3,
    beta: float = 0.7,
    gamma: float = 4.0 / 3.0,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """(1 - Tversky index)^(1/gamma), gamma in [1, 3].

    gamma = 1 reduces exactly to the Tversky loss. At a perfect index the
    power law's derivative is taken as its limit 0.
    """
    if not (1.0 <= gamma <= 3.0):
        raise ValidationError(f"gamma must be in [1, 3], got {gamma}")
    idx = tversky_index(g, s, alpha, beta, cfg)
    base = 1.0 - idx.value
    if base <= 0.0:
        if gamma == 1.0:  # exponent 1: derivative stays -d(index) even at 0
            return LossResult(0.0, -idx.grad, idx.flags)
        return LossResult(0.0, np.zeros_like(idx.grad), idx.flags)
    p = 1.0 / gamma
    value = base**p
    grad = p * base ** (p - 1.0) * (-idx.grad)
    return LossResult(float(value), grad, idx.flags)


def asymmetric_loss(
    g: np.ndarray,
    s: np.ndarray,
    beta: float = 1.5,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Asymmetric similarity loss: an F-beta-style score per foreground class,
    averaged, with false negatives weighted beta^2 / (1 + beta^2) and false
    positives 1 / (1 + beta^2).

    beta = 1 matches Tversky with alpha = beta = 0.5 on the same class set.
    """
    g, s = check_pair(g, s)
    if beta < 0 or not np.isfinite(beta):
        raise ValidationError(f"beta must be finite and >= 0, got {beta}")
    eps = cfg.epsilon
    w_fn = beta**2 / (1.0 + beta**2)
    w_fp = 1.0 / (1.0 + beta**2)
    n_fg = g.shape[-1] - 1
    grad = np.zeros_like(s)
    total = 0.0
    for c in range(1, g.shape[-1]):
        gc = g[..., c]
        sc = s[..., c]
        overlap = (gc * sc).sum()
        fn = (gc * (1.0 - sc)).sum()
        fp = ((1.0 - gc) * sc).sum()
        a = overlap + eps
        b = overlap + w_fn * fn + w_fp * fp + eps
        total += 1.0 - a / b
        # d b / d s = gc - w_fn*gc + w_fp*(1-gc) = w_fp  (since 1 - w_fn = w_fp)
        grad[..., c] = -(gc * b - a * w_fp) / b**2 / n_fg
    return LossResult(float(total / n_fg), grad)


def penalty_gd_loss(
    g: np.ndarray,
    s: np.ndarray,
    k: float = 2.5,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Generalized Dice loss passed through L / (1 + k (1 - L)).

    k = 0 is bitwise-identical to the generalized Dice loss.
    """
    if k < 0 or not np.isfinite(k):
        raise ValidationError(f"k must be finite and >= 0, got {k}")
    gd = generalized_dice_loss(g, s, cfg)
    denom = 1.0 + k * (1.0 - gd.value)
    value = gd.value / denom
    grad = gd.grad * ((1.0 + k) / denom**2)
    return LossResult(float(value), grad, gd.flags)
