"""Compound losses mixing cross-entropy with overlap terms."""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_CONFIG, LossConfig
from .core import LossResult, check_pair
from .errors import ValidationError


def _power_derivative(base: np.ndarray, gamma: float) -> np.ndarray:
    """d(base**gamma)/d(base), with the gamma < 1 singularity at 0 taken as 0."""
    if gamma >= 1.0:
        return gamma * base ** (gamma - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(base > 0, gamma * base ** (gamma - 1.0), 0.0)


def combo_loss(
    g: np.ndarray,
    s: np.ndarray,
    alpha: float = 0.5,
    beta: float = 0.5,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Binary-only blend: alpha * weighted BCE - (1 - alpha) * Dice coefficient.

    The BCE runs on the foreground channel with beta on the foreground term
    and 1-beta on the background term; the Dice coefficient uses the linear
    denominator. Note the overlap part enters as a coefficient (higher is
    better), so the loss can be negative.
    """
    g, s = check_pair(g, s)
    if g.shape[-1] != 2:
        raise ValidationError(f"combo loss is binary-only, got {g.shape[-1]} classes")
    if not (0.0 <= alpha <= 1.0) or not (0.0 <= beta <= 1.0):
        raise ValidationError(f"alpha and beta must be in [0, 1], got {alpha}, {beta}")
    eps = cfg.epsilon
    n = float(np.prod(g.shape[:-1]))
    g1 = g[..., 1]
    s1 = s[..., 1]
    s_pos = np.clip(s1, cfg.log_clamp, 1.0)
    s_neg = np.clip(1.0 - s1, cfg.log_clamp, 1.0)
    ce_part = -(beta * g1 * np.log(s_pos) + (1.0 - beta) * (1.0 - g1) * np.log(s_neg)).sum() / n
    a = 2.0 * (g1 * s1).sum() + eps
    b = g1.sum() + s1.sum() + eps
    dice_coef = a / b
    value = alpha * ce_part - (1.0 - alpha) * dice_coef
    grad = np.zeros_like(s)
    d_ce = -(beta * g1 / s_pos - (1.0 - beta) * (1.0 - g1) / s_neg) / n
    d_dice = (2.0 * g1 * b - a) / b**2
    grad[..., 1] = alpha * d_ce - (1.0 - alpha) * d_dice
    return LossResult(float(value), grad)


def ell_loss(
    g: np.ndarray,
    s: np.ndarray,
    w_dice: float = 0.8,
    w_ce: float = 0.2,
    gamma_dice: float = 0.3,
    gamma_ce: float = 0.3,
    class_weights: np.ndarray | None = None,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> LossResult:
    """Exponential-logarithmic loss: powers of -log applied to both a
    per-class Dice coefficient (linear denominator) and the pixelwise
    cross-entropy, then averaged and mixed.

    class_weights (one per class, default all ones) scale the CE term of
    pixels by their true class. Gammas below 1 flatten easy regions; the
    power law's derivative at an exactly-perfect term is taken as 0.
    """
    g, s = check_pair(g, s)
    if w_dice < 0 or w_ce < 0 or w_dice + w_ce <= 0:
        raise ValidationError(f"need non-negative weights with a positive sum, got {w_dice}, {w_ce}")
    if not (gamma_dice > 0 and np.isfinite(gamma_dice)) or not (gamma_ce > 0 and np.isfinite(gamma_ce)):
        raise ValidationError(f"gammas must be positive and finite, got {gamma_dice}, {gamma_ce}")
    num_classes = g.shape[-1]
    if class_weights is None:
        cw = np.ones(num_classes)
    else:
        cw = np.asarray(class_weights, dtype=np.float64)
        if cw.shape != (num_classes,):
            raise ValidationError(f"class_weights shape {cw.shape} != ({num_classes},)")
        if (cw < 0).any() or not np.isfinite(cw).all():
            raise ValidationError("class_weights must be finite and non-negative")
    eps = cfg.epsilon
    first = cfg.first_class()
    gi = g[..., first:]
    si = s[..., first:]
    flat_g = gi.reshape(-1, gi.shape[-1])
    flat_s = si.reshape(-1, si.shape[-1])
    grad = np.zeros_like(s)

    # Dice branch: mean over included classes of (-log Dice_c)^gamma_dice.
    a_c = 2.0 * (flat_g * flat_s).sum(axis=0) + eps
    b_c = flat_g.sum(axis=0) + flat_s.sum(axis=0) + eps
    dice_c = a_c / b_c
    x_c = -np.log(dice_c)
    n_cls = gi.shape[-1]
    dice_term = (x_c**gamma_dice).mean()
    power = _power_derivative(x_c, gamma_dice)
    # d(-log Dice_c)/ds_ic = -(2 g_ic b_c - a_c) / (a_c b_c)
    d_x = -(2.0 * gi * b_c - a_c) / (a_c * b_c)
    grad[..., first:] += (w_dice / n_cls) * power * d_x

    # CE branch: mean over pixels of w[true] * (-log s_true)^gamma_ce.
    has_true = gi.sum(axis=-1) > 0
    n_eff = int(has_true.sum())
    if n_eff == 0:
        raise ValidationError("no pixel has an included true class")
    s_true = np.maximum((gi * si).sum(axis=-1), cfg.log_clamp)
    y = -np.log(s_true)
    w_pix = (gi * cw[first:]).sum(axis=-1)  # weight of each pixel's true class
    ce_term = float((w_pix * np.where(has_true, y, 0.0) ** gamma_ce * has_true).sum() / n_eff)
    y_pow = _power_derivative(y, gamma_ce)
    pix = -w_pix * y_pow * has_true / (n_eff * s_true)
    grad[..., first:] += gi * pix[..., None] * w_ce

    value = w_dice * dice_term + w_ce * ce_term
    return LossResult(float(value), grad)
