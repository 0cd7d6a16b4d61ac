"""Exact Euclidean distance transforms on binary masks.

``edt`` is a from-scratch separable transform: per axis, the squared
distances are the lower envelope of parabolas rooted at the previous
pass's values (one 1D pass per axis, anisotropic spacing supported).
``edt_bruteforce`` is the independent O(N * |sources|) reference used to
cross-check it; the two are deliberately kept as separate code paths.

Distances are measured between pixel centers. A degenerate request
(no source pixels) yields the grid's sentinel distance everywhere: the
sum of axis extents weighted by spacing, strictly larger than any real
pixel-to-pixel distance on the grid.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError, ValidationError

from .core import MAX_SPATIAL_RANK


def as_mask(mask: np.ndarray) -> np.ndarray:
    """Coerce to a boolean mask, rejecting anything but 0/1 values."""
    m = np.asarray(mask)
    if m.ndim < 1 or m.ndim > MAX_SPATIAL_RANK:
        raise ValidationError(f"mask rank must be 1..{MAX_SPATIAL_RANK}, got {m.ndim}")
    if m.size == 0:
        raise ValidationError("mask is empty")
    if m.dtype == bool:
        return m
    vals = np.unique(m)
    if not np.isin(vals, (0, 1)).all():
        raise ValidationError(f"mask values must be 0/1, found {vals[:8]}")
    return m.astype(bool)


def as_spacing(spacing, ndim: int) -> tuple[float, ...]:
    """Normalize a spacing argument to a tuple of positive floats."""
    if spacing is None:
        return (1.0,) * ndim
    sp = tuple(float(x) for x in np.atleast_1d(spacing))
    if len(sp) != ndim:
        raise ValidationError(f"spacing has {len(sp)} entries for a rank-{ndim} grid")
    if any(not np.isfinite(x) or x <= 0 for x in sp):
        raise ValidationError(f"spacing entries must be positive and finite, got {sp}")
    return sp


def sentinel_value(shape: tuple[int, ...], spacing=None) -> float:
    """Distance reported for unreachable queries; exceeds any real distance."""
    sp = as_spacing(spacing, len(shape))
    return float(sum(n * s for n, s in zip(shape, sp)))


def is_degenerate_mask(mask: np.ndarray) -> bool:
    """True when the mask has no boundary: all background or all foreground."""
    m = as_mask(mask)
    return bool(m.all() or not m.any())


def _envelope_pass(f: np.ndarray, pos: np.ndarray, out: np.ndarray) -> None:
    """1D squared-distance transform of sampled cost f at positions pos.

    out[q] = min_p ( (pos[q] - pos[p])^2 + f[p] ). Parabolas with infinite
    height are skipped, so rows with no finite entry stay infinite.
    """
    n = f.size
    apex = np.empty(n, dtype=np.intp)
    bound = np.empty(n + 1, dtype=np.float64)
    k = -1
    for q in range(n):
        fq = f[q]
        if fq == np.inf:
            continue
        while k >= 0:
            p = apex[k]
            # abscissa where parabola q overtakes parabola p
            s = ((fq + pos[q] ** 2) - (f[p] + pos[p] ** 2)) / (2.0 * (pos[q] - pos[p]))
            if s <= bound[k]:
                k -= 1
            else:
                break
        if k < 0:
            k = 0
            apex[0] = q
            bound[0] = -np.inf
        else:
            k += 1
            apex[k] = q
            bound[k] = s
        bound[k + 1] = np.inf
    if k < 0:
        out[:] = np.inf
        return
    j = 0
    for q in range(n):
        while bound[j + 1] < pos[q]:
            j += 1
        p = apex[j]
        out[q] = (pos[q] - pos[p]) ** 2 + f[p]


def _transform_axis(d2: np.ndarray, axis: int, step: float) -> np.ndarray:
    moved = np.moveaxis(d2, axis, -1)
    lead = moved.shape[:-1]
    n = moved.shape[-1]
    rows = np.ascontiguousarray(moved).reshape(-1, n)
    pos = np.arange(n, dtype=np.float64) * step
    out = np.empty_like(rows)
    for i in range(rows.shape[0]):
        _envelope_pass(rows[i], pos, out[i])
    return np.moveaxis(out.reshape(lead + (n,)), -1, axis)


def edt(source: np.ndarray, spacing=None) -> np.ndarray:
    """Exact Euclidean distance from every pixel to the nearest source pixel.

    An empty source set yields the sentinel distance everywhere.
    """
    src = as_mask(source)
    sp = as_spacing(spacing, src.ndim)
    if not src.any():
        return np.full(src.shape, sentinel_value(src.shape, sp))
    d2 = np.where(src, 0.0, np.inf)
    for ax in range(src.ndim):
        d2 = _transform_axis(d2, ax, sp[ax])
    return np.sqrt(d2)


def edt_bruteforce(source: np.ndarray, spacing=None) -> np.ndarray:
    """Reference distance transform: explicit minimum over all source pixels."""
    src = as_mask(source)
    sp = as_spacing(spacing, src.ndim)
    if not src.any():
        return np.full(src.shape, sentinel_value(src.shape, sp))
    scale = np.asarray(sp, dtype=np.float64)
    sources = np.argwhere(src) * scale  # (M, ndim)
    axes = [np.arange(n, dtype=np.float64) * s for n, s in zip(src.shape, sp)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)  # dims + (ndim,)
    diff = grid[..., None, :] - sources  # dims + (M, ndim)
    d2 = np.einsum("...md,...md->...m", diff, diff).min(axis=-1)
    return np.sqrt(d2)


def unsigned_boundary_distance(mask: np.ndarray, spacing=None) -> np.ndarray:
    """Distance to the opposite region: inside pixels measure to the nearest
    background pixel, outside pixels to the nearest foreground pixel.

    Degenerate masks (no boundary) get the sentinel distance everywhere.
    """
    m = as_mask(mask)
    sp = as_spacing(spacing, m.ndim)
    if m.all() or not m.any():
        return np.full(m.shape, sentinel_value(m.shape, sp))
    return np.where(m, edt(~m, sp), edt(m, sp))


def level_set(mask: np.ndarray, spacing=None) -> np.ndarray:
    """Signed distance map: negative inside the mask, positive outside.

    Because distances are between pixel centers, a non-degenerate mask has
    |phi| >= min(spacing) everywhere — the zero level lives between pixels.
    Degenerate masks map to a constant signed sentinel (negative when the
    mask covers everything).
    """
    m = as_mask(mask)
    sp = as_spacing(spacing, m.ndim)
    if m.all():
        return np.full(m.shape, -sentinel_value(m.shape, sp))
    if not m.any():
        return np.full(m.shape, sentinel_value(m.shape, sp))
    d = unsigned_boundary_distance(m, sp)
    return np.where(m, -d, d)


def boundary_penalty_map(g_onehot: np.ndarray, spacing=None) -> np.ndarray:
    """Per-class penalty in [0, 1], largest right at each class boundary.

    For every class channel the unsigned boundary distance is inverted by
    its own maximum: D = 1 - dt / max(dt). Degenerate channels (no
    boundary) get zero penalty. The map is scale-invariant in the spacing.
    """
    g = np.asarray(g_onehot, dtype=np.float64)
    if g.ndim < 2 or g.shape[-1] < 2:
        raise ValidationError(f"expected dims + (C>=2,) one-hot, got shape {g.shape}")
    sp = as_spacing(spacing, g.ndim - 1)
    out = np.zeros_like(g)
    for c in range(g.shape[-1]):
        mask = g[..., c] >= 0.5
        if mask.all() or not mask.any():
            continue  # degenerate class: zero penalty
        dt = unsigned_boundary_distance(mask, sp)
        peak = dt.max()
        if peak > 0:
            out[..., c] = 1.0 - dt / peak
    return out


def hausdorff_exact(g_mask: np.ndarray, s_mask: np.ndarray, spacing=None) -> float:
    """Symmetric Hausdorff distance between two nonempty pixel sets."""
    g = as_mask(g_mask)
    s = as_mask(s_mask)
    if g.shape != s.shape:
        raise ValidationError(f"mask shapes differ: {g.shape} vs {s.shape}")
    sp = as_spacing(spacing, g.ndim)
    for name, m in (("first", g), ("second", s)):
        if not m.any():
            raise DegenerateInputError(f"Hausdorff distance undefined: {name} mask is empty")
    d_to_s = edt(s, sp)
    d_to_g = edt(g, sp)
    return float(max(d_to_s[g].max(), d_to_g[s].max()))
