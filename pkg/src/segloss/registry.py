"""Name-indexed access to every loss kernel, with default parameters.

prepare() binds a loss to a fixed ground truth — precomputing any
ground-truth-side maps (penalty maps, level sets, boundary distances) —
and returns an evaluator ``s -> LossResult``. prepare_frozen() additionally
pins the prediction-side selection/distance maps at a reference prediction,
which is the branch a finite-difference probe has to stay on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import boundary as _boundary
from . import compound as _compound
from . import distribution as _distribution
from . import region as _region
from .config import DEFAULT_CONFIG, LossConfig
from .core import LossResult
from .distance import boundary_penalty_map
from .errors import ValidationError

Evaluator = Callable[[np.ndarray], LossResult]


@dataclass(frozen=True)
class LossEntry:
    family: str
    defaults: dict
    make: Callable
    freeze: Callable | None = None
    binary_only: bool = False


def _make_ce(g, cfg, p, spacing):
    return lambda s: _distribution.ce(g, s, cfg)


def _make_wce(g, cfg, p, spacing):
    w = p["weights"]
    w = np.ones(g.shape[-1]) if w is None else np.asarray(w, dtype=np.float64)
    return lambda s: _distribution.wce(g, s, w, cfg)


def _make_topk(g, cfg, p, spacing):
    return lambda s: _distribution.topk(g, s, p["t"], cfg)


def _freeze_topk(g, s0, cfg, p, spacing):
    keep = _distribution.topk_keep_set(g, s0, p["t"], cfg)
    return lambda s: _distribution.topk(g, s, p["t"], cfg, keep=keep)


def _make_focal(g, cfg, p, spacing):
    return lambda s: _distribution.focal(g, s, p["gamma"], cfg)


def _make_dpce(g, cfg, p, spacing):
    penalty = boundary_penalty_map(g, spacing)
    return lambda s: _distribution.dpce(g, s, penalty, cfg)


def _make_ss(g, cfg, p, spacing):
    return lambda s: _region.ss_loss(g, s, p["w"], cfg)


def _make_dice(g, cfg, p, spacing):
    return lambda s: _region.dice_loss(g, s, cfg)


def _make_iou(g, cfg, p, spacing):
    return lambda s: _region.iou_loss(g, s, cfg)


def _make_tversky(g, cfg, p, spacing):
    return lambda s: _region.tversky_loss(g, s, p["alpha"], p["beta"], cfg)


def _make_generalized_dice(g, cfg, p, spacing):
    return lambda s: _region.generalized_dice_loss(g, s, cfg)


def _make_focal_tversky(g, cfg, p, spacing):
    return lambda s: _region.focal_tversky_loss(g, s, p["alpha"], p["beta"], p["gamma"], cfg)


def _make_asymmetric(g, cfg, p, spacing):
    return lambda s: _region.asymmetric_loss(g, s, p["beta"], cfg)


def _make_penalty_gd(g, cfg, p, spacing):
    return lambda s: _region.penalty_gd_loss(g, s, p["k"], cfg)


def _make_boundary(g, cfg, p, spacing):
    ctx = _boundary.boundary_context(g, spacing)
    return lambda s: _boundary.boundary_loss(ctx, s, cfg)


def _make_hd(g, cfg, p, spacing):
    gt_dist = _boundary.foreground_boundary_distances(g, spacing, tag="gt")
    return lambda s: _boundary.hd_loss(g, s, cfg, spacing=spacing, gt_dist=gt_dist)


def _freeze_hd(g, s0, cfg, p, spacing):
    gt_dist = _boundary.foreground_boundary_distances(g, spacing, tag="gt")
    pred_dist = _boundary.foreground_boundary_distances(s0, spacing, tag="pred")
    return lambda s: _boundary.hd_loss(
        g, s, cfg, spacing=spacing, gt_dist=gt_dist, pred_dist=pred_dist
    )


def _make_combo(g, cfg, p, spacing):
    return lambda s: _compound.combo_loss(g, s, p["alpha"], p["beta"], cfg)


def _make_ell(g, cfg, p, spacing):
    return lambda s: _compound.ell_loss(
        g,
        s,
        w_dice=p["w_dice"],
        w_ce=p["w_ce"],
        gamma_dice=p["gamma_dice"],
        gamma_ce=p["gamma_ce"],
        class_weights=p["class_weights"],
        cfg=cfg,
    )


REGISTRY: dict[str, LossEntry] = {
    "ce": LossEntry("distribution", {}, _make_ce),
    "wce": LossEntry("distribution", {"weights": None}, _make_wce),
    "topk": LossEntry("distribution", {"t": 0.5}, _make_topk, freeze=_freeze_topk),
    "focal": LossEntry("distribution", {"gamma": 2.0}, _make_focal),
    "dpce": LossEntry("distribution", {}, _make_dpce),
    "ss": LossEntry("region", {"w": 0.5}, _make_ss),
    "dice": LossEntry("region", {}, _make_dice),
    "iou": LossEntry("region", {}, _make_iou),
    "tversky": LossEntry("region", {"alpha": 0.3, "beta": 0.7}, _make_tversky),
    "generalized_dice": LossEntry("region", {}, _make_generalized_dice),
    "focal_tversky": LossEntry(
        "region", {"alpha": 0.3, "beta": 0.7, "gamma": 4.0 / 3.0}, _make_focal_tversky
    ),
    "asymmetric": LossEntry("region", {"beta": 1.5}, _make_asymmetric),
    "penalty_gd": LossEntry("region", {"k": 2.5}, _make_penalty_gd),
    "boundary": LossEntry("boundary", {}, _make_boundary),
    "hd": LossEntry("boundary", {}, _make_hd, freeze=_freeze_hd),
    "combo": LossEntry("compound", {"alpha": 0.5, "beta": 0.5}, _make_combo, binary_only=True),
    "ell": LossEntry(
        "compound",
        {
            "w_dice": 0.8,
            "w_ce": 0.2,
            "gamma_dice": 0.3,
            "gamma_ce": 0.3,
            "class_weights": None,
        },
        _make_ell,
    ),
}


def loss_names() -> list[str]:
    return list(REGISTRY)


def loss_entry(name: str) -> LossEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ValidationError(
            f"unknown loss {name!r}; available: {', '.join(REGISTRY)}"
        ) from None


def resolve_params(name: str, overrides: dict | None = None) -> dict:
    """Defaults for a loss merged with caller overrides; unknown keys rejected."""
    entry = loss_entry(name)
    params = dict(entry.defaults)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ValidationError(
                f"loss {name!r} takes no parameter {key!r}; "
                f"allowed: {', '.join(params) if params else '(none)'}"
            )
        params[key] = value
    return params


def prepare(
    name: str,
    g: np.ndarray,
    cfg: LossConfig = DEFAULT_CONFIG,
    params: dict | None = None,
    spacing=None,
) -> Evaluator:
    """Bind a loss to a ground truth; returns an evaluator over predictions."""
    entry = loss_entry(name)
    g = np.asarray(g, dtype=np.float64)
    if entry.binary_only and g.shape[-1] != 2:
        raise ValidationError(f"loss {name!r} is binary-only, got {g.shape[-1]} classes")
    return entry.make(g, cfg, resolve_params(name, params), spacing)


def prepare_frozen(
    name: str,
    g: np.ndarray,
    s0: np.ndarray,
    cfg: LossConfig = DEFAULT_CONFIG,
    params: dict | None = None,
    spacing=None,
) -> Evaluator:
    """Like prepare, but prediction-side selection/distance maps are pinned
    at s0 so the returned evaluator is smooth around it."""
    entry = loss_entry(name)
    g = np.asarray(g, dtype=np.float64)
    s0 = np.asarray(s0, dtype=np.float64)
    if entry.binary_only and g.shape[-1] != 2:
        raise ValidationError(f"loss {name!r} is binary-only, got {g.shape[-1]} classes")
    p = resolve_params(name, params)
    if entry.freeze is not None:
        return entry.freeze(g, s0, cfg, p, spacing)
    return entry.make(g, cfg, p, spacing)


def evaluate(
    name: str,
    g: np.ndarray,
    s: np.ndarray,
    cfg: LossConfig = DEFAULT_CONFIG,
    params: dict | None = None,
    spacing=None,
) -> LossResult:
    """One-shot evaluation of a loss by name."""
    return prepare(name, g, cfg, params, spacing)(s)
