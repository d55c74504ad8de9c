"""Smoothing of predicted volumes with shrinking boundary windows."""
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .validation import check_odd_window

FILTER_KINDS = ("median3d", "movavg")


@dataclass(frozen=True)
class FilterSpec:
    kind: str = "median3d"
    window: int = 3
    boundary: str = "shrink"

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValidationError(f"unknown filter {self.kind!r}; choose from {FILTER_KINDS}")
        check_odd_window(self.window)
        if self.boundary != "shrink":
            raise ValidationError("only the 'shrink' boundary policy is supported")

    def apply(self, volume):
        if self.kind == "median3d":
            return median3d(volume, self.window)
        return movavg(volume, self.window)


def _shifted_stack(vol, w, axes):
    """All window shifts of ``vol`` along ``axes``, NaN where the shifted
    neighbour falls outside the array. Shape ``(w ** len(axes),) + vol.shape``."""
    h = w // 2
    pad = [(h, h) if a in axes else (0, 0) for a in range(vol.ndim)]
    padded = np.pad(vol.astype(float), pad, constant_values=np.nan)
    offsets = np.stack(np.meshgrid(*[np.arange(w)] * len(axes), indexing="ij"), -1).reshape(-1, len(axes))
    out = np.empty((offsets.shape[0],) + vol.shape)
    for n, off in enumerate(offsets):
        idx = [slice(None)] * vol.ndim
        for a, o in zip(axes, off):
            idx[a] = slice(o, o + vol.shape[a])
        out[n] = padded[tuple(idx)]
    return out


def median3d(volume, w=3):
    """Median over the in-bounds part of the ``w x w x w`` window.

    Windows with an even number of in-bounds voxels (boundaries only) take
    the lower of the two middle values.
    """
    w = check_odd_window(w)
    vol = np.asarray(volume, dtype=float)
    if vol.ndim != 3 or min(vol.shape) < 1:
        raise ValidationError(f"median3d needs a non-empty 3-D volume, got shape {vol.shape}")
    if not np.all(np.isfinite(vol)):
        raise ValidationError("volume contains non-finite values")
    out = np.empty_like(vol)
    # process inline slabs to bound the w^3-fold memory of the shifted stack
    h = w // 2
    slab = max(1, int(4_000_000 // (w ** 3 * vol.shape[1] * vol.shape[2])))
    for i0 in range(0, vol.shape[0], slab):
        i1 = min(vol.shape[0], i0 + slab)
        lo, hi = max(0, i0 - h), min(vol.shape[0], i1 + h)
        stack = _shifted_stack(vol[lo:hi], w, (0, 1, 2))[:, i0 - lo:i1 - lo]
        count = np.sum(~np.isnan(stack), axis=0)
        stack.sort(axis=0)  # NaNs sort last
        rank = (count - 1) // 2
        out[i0:i1] = np.take_along_axis(stack, rank[None], axis=0)[0]
    return out


def movavg(volume, w=3, axes=(1, 2)):
    """Mean over the in-bounds part of a ``w x w`` window in the plane of
    ``axes``; a 2-D input is filtered as a single plane."""
    w = check_odd_window(w)
    arr = np.asarray(volume, dtype=float)
    if arr.ndim == 2:
        axes = (0, 1)
    elif arr.ndim != 3:
        raise ValidationError(f"movavg needs a 2-D or 3-D array, got shape {arr.shape}")
    if len(set(axes)) != 2 or any(not 0 <= a < arr.ndim for a in axes):
        raise ValidationError(f"axes must name two distinct array axes, got {axes}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("input contains non-finite values")
    stack = _shifted_stack(arr, w, tuple(axes))
    return np.nanmean(stack, axis=0)
