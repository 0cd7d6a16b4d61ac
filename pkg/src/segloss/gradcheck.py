"""Finite-difference verification of analytic loss gradients.

Probes step each probability entry independently (off-simplex on purpose:
this isolates the loss kernel's gradient from the softmax Jacobian, which
is checked separately through the optimization harness). Selection sets
and prediction-side distance maps are pinned at the base point via
registry.prepare_frozen, so both sides differentiate the same smooth
branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import registry
from .config import DEFAULT_CONFIG, LossConfig
from .core import one_hot
from .errors import ValidationError

# Relative error denominators are floored here so near-zero coordinates
# compare absolutely instead of blowing up the ratio.
REL_ERR_FLOOR = 1e-3


@dataclass(frozen=True)
class GradReport:
    loss_name: str
    max_rel_err: float
    max_abs_err: float
    worst_index: tuple[int, int]  # (flat pixel, class) of the worst rel err
    tolerance: float
    passed: bool


def finite_diff(f: Callable, s: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central differences of an evaluator's value, one coordinate at a time."""
    s = np.asarray(s, dtype=np.float64)
    if h <= 0:
        raise ValidationError(f"step h must be positive, got {h}")
    if ((s < h) | (s > 1.0 - h)).any():
        raise ValidationError(
            f"prediction entries must lie in [{h}, {1 - h}] so both probe points stay in range"
        )
    work = s.copy()
    flat = work.reshape(-1)
    out = np.empty_like(flat)
    for j in range(flat.size):
        orig = flat[j]
        flat[j] = orig + h
        f_plus = f(work).value
        flat[j] = orig - h
        f_minus = f(work).value
        flat[j] = orig
        out[j] = (f_plus - f_minus) / (2.0 * h)
    return out.reshape(s.shape)


def finite_diff_grad(
    name: str,
    g: np.ndarray,
    s: np.ndarray,
    h: float = 1e-6,
    cfg: LossConfig = DEFAULT_CONFIG,
    params: dict | None = None,
    spacing=None,
) -> np.ndarray:
    """Numeric gradient of a registered loss with frozen selection/maps."""
    f = registry.prepare_frozen(name, g, s, cfg, params, spacing)
    return finite_diff(f, s, h)


def compare_grads(
    analytic: np.ndarray, numeric: np.ndarray, floor: float = REL_ERR_FLOOR
) -> tuple[float, float, tuple[int, int]]:
    """Max relative error, max absolute error, and the worst coordinate."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.shape != numeric.shape:
        raise ValidationError(f"gradient shapes differ: {analytic.shape} vs {numeric.shape}")
    abs_err = np.abs(analytic - numeric)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    rel = abs_err / denom
    flat_worst = int(rel.argmax())
    num_classes = analytic.shape[-1]
    worst = (flat_worst // num_classes, flat_worst % num_classes)
    return float(rel.max()), float(abs_err.max()), worst


def gradcheck(
    loss: str | Callable,
    g: np.ndarray,
    s: np.ndarray,
    tol: float = 1e-5,
    h: float = 1e-6,
    cfg: LossConfig = DEFAULT_CONFIG,
    params: dict | None = None,
    spacing=None,
) -> GradReport:
    """Compare a loss's analytic gradient against central differences.

    ``loss`` is a registry name, or directly an evaluator ``s -> LossResult``
    (useful for probing wrapped or deliberately corrupted evaluators).
    """
    if callable(loss):
        evaluator = loss
        name = getattr(loss, "__name__", "custom")
    else:
        evaluator = registry.prepare_frozen(loss, g, s, cfg, params, spacing)
        name = loss
    analytic = evaluator(np.asarray(s, dtype=np.float64)).grad
    numeric = finite_diff(evaluator, s, h)
    max_rel, max_abs, worst = compare_grads(analytic, numeric)
    return GradReport(name, max_rel, max_abs, worst, tol, max_rel <= tol)


def random_instance(
    rng: np.random.Generator,
    binary: bool = False,
    grid: bool = False,
    max_classes: int = 4,
) -> tuple[np.ndarray, np.ndarray]:
    """A random (one-hot gt, interior prediction) pair, N <= 64, C <= 4.

    Every class appears at least once, so per-class masks are never
    degenerate (needed by the boundary-family losses).
    """
    num_classes = 2 if binary else int(rng.integers(2, max_classes + 1))
    if grid:
        shape = (int(rng.integers(2, 9)), int(rng.integers(2, 9)))
    else:
        shape = (int(rng.integers(max(4, num_classes), 65)),)
    labels = rng.integers(0, num_classes, size=shape)
    for _ in range(200):
        if np.unique(labels).size == num_classes:
            break
        labels = rng.integers(0, num_classes, size=shape)
    else:
        raise RuntimeError("could not draw an instance covering every class")
    g = one_hot(labels, num_classes)
    u = rng.uniform(0.05, 1.0, size=shape + (num_classes,))
    s = u / u.sum(axis=-1, keepdims=True)
    return g, s


def random_params(rng: np.random.Generator, name: str, num_classes: int) -> dict:
    """Random-but-sane parameter draws per loss for the suite."""
    if name == "wce":
        return {"weights": rng.uniform(0.1, 2.0, size=num_classes)}
    if name == "topk":
        return {"t": float(rng.uniform(0.2, 0.95))}
    if name == "focal":
        return {"gamma": float(rng.choice([0.5, 1.0, 2.0, 3.0]))}
    if name == "ss":
        return {"w": float(rng.uniform(0.0, 1.0))}
    if name == "tversky":
        return {"alpha": float(rng.uniform(0.1, 2.0)), "beta": float(rng.uniform(0.1, 2.0))}
    if name == "focal_tversky":
        return {
            "alpha": float(rng.uniform(0.1, 2.0)),
            "beta": float(rng.uniform(0.1, 2.0)),
            "gamma": float(rng.uniform(1.0, 3.0)),
        }
    if name == "asymmetric":
        return {"beta": float(rng.uniform(0.3, 3.0))}
    if name == "penalty_gd":
        return {"k": float(rng.uniform(0.0, 3.0))}
    if name == "combo":
        return {"alpha": float(rng.uniform(0.0, 1.0)), "beta": float(rng.uniform(0.0, 1.0))}
    if name == "ell":
        return {
            "w_dice": float(rng.uniform(0.2, 1.0)),
            "w_ce": float(rng.uniform(0.2, 1.0)),
            "gamma_dice": float(rng.uniform(0.3, 2.0)),
            "gamma_ce": float(rng.uniform(0.3, 2.0)),
        }
    return {}


def _instance_for(rng: np.random.Generator, name: str) -> tuple[np.ndarray, np.ndarray]:
    entry = registry.loss_entry(name)
    if entry.binary_only:
        return random_instance(rng, binary=True)
    if entry.family == "boundary" or name == "dpce":
        return random_instance(rng, grid=True)
    return random_instance(rng)


def _ell_safe(g: np.ndarray, s: np.ndarray, cfg: LossConfig) -> bool:
    """Keep ELL suite instances away from the gamma<1 power-law singularity."""
    first = cfg.first_class()
    gi = g[..., first:].reshape(-1, g.shape[-1] - first)
    si = s[..., first:].reshape(-1, g.shape[-1] - first)
    dice_c = (2.0 * (gi * si).sum(0) + cfg.epsilon) / (gi.sum(0) + si.sum(0) + cfg.epsilon)
    return bool((-np.log(dice_c) >= 1e-3).all())


def run_suite(
    names: list[str] | None = None,
    trials: int = 50,
    tol: float = 1e-5,
    h: float = 1e-6,
    seed: int = 0,
    cfg: LossConfig = DEFAULT_CONFIG,
) -> list[GradReport]:
    """One aggregated GradReport per loss: worst errors over all trials."""
    if names is None:
        names = registry.loss_names()
    rng = np.random.default_rng(seed)
    reports = []
    for name in names:
        worst_rel, worst_abs, worst_idx = 0.0, 0.0, (0, 0)
        for _ in range(trials):
            g, s = _instance_for(rng, name)
            if name == "ell":
                while not _ell_safe(g, s, cfg):
                    g, s = _instance_for(rng, name)
            params = random_params(rng, name, g.shape[-1])
            report = gradcheck(name, g, s, tol=tol, h=h, cfg=cfg, params=params)
            if report.max_rel_err > worst_rel:
                worst_rel, worst_idx = report.max_rel_err, report.worst_index
            worst_abs = max(worst_abs, report.max_abs_err)
        reports.append(GradReport(name, worst_rel, worst_abs, worst_idx, tol, worst_rel <= tol))
    return reports
