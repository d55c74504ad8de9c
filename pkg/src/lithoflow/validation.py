"""Small input-validation helpers shared across modules."""
import numpy as np

from .exceptions import ValidationError


def as_1d(x, name="x", min_len=1):
    """Return ``x`` as a finite float64 vector of length >= ``min_len``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValidationError(f"{name} needs at least {min_len} samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def as_2d(X, name="X", min_rows=1):
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise ValidationError(f"{name} needs at least {min_rows} rows, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_same_length(*arrays, names=None):
    lengths = [len(a) for a in arrays]
    if len(set(lengths)) > 1:
        label = ", ".join(names) if names else "inputs"
        raise ValidationError(f"{label} must have equal lengths, got {lengths}")
    return lengths[0]


def check_strictly_increasing(x, name="x"):
    x = np.asarray(x, dtype=float)
    if x.size > 1 and not np.all(np.diff(x) > 0):
        bad = int(np.argmin(np.diff(x) > 0))
        raise ValidationError(f"{name} must be strictly increasing (violated at index {bad + 1})")
    return x


def check_odd_window(w):
    if int(w) != w or w < 3 or w % 2 == 0:
        raise ValidationError(f"window must be an odd integer >= 3, got {w}")
    return int(w)
