"""Depth-to-time conversion and the two resamplers used for alignment."""
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..exceptions import ParseError, RangeError, ValidationError
from ..validation import as_1d

SINC_HALF_TAPS = 32


@dataclass
class TimeDepthCurve:
    """Piecewise-linear depth (m) to two-way time (ms) relation."""

    depth: np.ndarray
    time: np.ndarray

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=float)
        self.time = np.asarray(self.time, dtype=float)
        if self.depth.shape != self.time.shape or self.depth.ndim != 1:
            raise ValidationError("time-depth curve needs equal-length depth and time vectors")
        if self.depth.size < 2:
            raise ValidationError("time-depth curve needs at least 2 pairs")
        if not (np.all(np.isfinite(self.depth)) and np.all(np.isfinite(self.time))):
            raise ValidationError("time-depth curve contains non-finite values")
        if not (np.all(np.diff(self.depth) > 0) and np.all(np.diff(self.time) > 0)):
            raise ValidationError("time-depth curve must be strictly increasing in depth and time")

    def to_time(self, depth):
        depth = np.asarray(depth, dtype=float)
        lo, hi = self.depth[0], self.depth[-1]
        if depth.size and (depth.min() < lo or depth.max() > hi):
            raise RangeError(
                f"depth range [{depth.min()}, {depth.max()}] m is outside the time-depth "
                f"curve range [{lo}, {hi}] m")
        return np.interp(depth, self.depth, self.time)

    def to_depth(self, time):
        time = np.asarray(time, dtype=float)
        if time.size and (time.min() < self.time[0] or time.max() > self.time[-1]):
            raise RangeError("time outside the time-depth curve range")
        return np.interp(time, self.time, self.depth)


def read_td_csv(path):
    """Read a ``depth_m,twt_ms`` CSV (header row required)."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise ParseError(f"{path}: {e}") from e
    if data.shape[1] != 2:
        raise ParseError(f"{path}: expected two columns depth_m,twt_ms")
    return TimeDepthCurve(data[:, 0], data[:, 1])


def write_td_csv(td, path):
    with open(path, "w") as fh:
        fh.write("depth_m,twt_ms\n")
        for d, t in zip(td.depth, td.time):
            fh.write(f"{float(d)!r},{float(t)!r}\n")


def depth_to_time(log, td):
    """Map every depth sample of ``log`` to two-way time through ``td``.

    Returns the time axis (ms); curve samples are unchanged and keep their
    row order, so ``log.curves[name][k]`` sits at ``times[k]``.
    """
    times = td.to_time(log.depth)
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ValidationError(f"well {log.well_id}: converted times are not strictly increasing")
    return times


def _hann(d, half):
    return 0.5 * (1.0 + np.cos(np.pi * d / (half + 1)))


def sinc_resample(samples, fs_in, t_out, t0=0.0, half_taps=SINC_HALF_TAPS):
    """Band-limited interpolation of uniformly sampled data.

    Whittaker-Shannon sum truncated to ``half_taps`` samples either side of
    each query, tapered with a Hann window, and renormalised so the weights
    of every query sum to one. Taps falling outside the record are dropped.

    Parameters
    ----------
    samples : array, shape (n,)
        Values at ``t0 + k / fs_in`` seconds.
    fs_in : float
        Input sampling rate in Hz.
    t_out : array
        Query times in seconds, within the sampled span.
    """
    x = as_1d(samples, "samples", min_len=8)
    if fs_in <= 0:
        raise ValidationError("fs_in must be positive")
    t_out = np.atleast_1d(np.asarray(t_out, dtype=float))
    return sinc_interp_index(x, (t_out - t0) * fs_in, half_taps)


def sinc_interp_index(x, u, half_taps=SINC_HALF_TAPS):
    """Windowed-sinc interpolation of ``x`` at fractional sample positions ``u``."""
    x = as_1d(x, "samples", min_len=8)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    n = x.size
    tol = 1e-9
    if u.size and (u.min() < -tol or u.max() > n - 1 + tol):
        raise RangeError(f"query positions must lie within the {n}-sample record")
    u = np.clip(u, 0.0, n - 1)
    out = np.empty(u.size)
    base = np.floor(u)
    frac = u - base
    exact = frac == 0.0
    out[exact] = x[base[exact].astype(int)]
    idx = np.flatnonzero(~exact)
    offsets = np.arange(-half_taps + 1, half_taps + 1)
    chunk = 4096
    for start in range(0, idx.size, chunk):
        sel = idx[start:start + chunk]
        taps = base[sel, None].astype(int) + offsets[None, :]
        d = u[sel, None] - taps
        w = np.sinc(d) * _hann(d, half_taps)
        w = np.where((taps >= 0) & (taps < n), w, 0.0)
        vals = x[np.clip(taps, 0, n - 1)]
        out[sel] = np.sum(w * vals, axis=1) / np.sum(w, axis=1)
    return out


def spline_resample(samples, t_in, t_out):
    """Natural cubic spline through (t_in, samples), evaluated at ``t_out``.

    Extrapolation is refused.
    """
    y = as_1d(samples, "samples", min_len=1)
    t_in = as_1d(t_in, "t_in", min_len=1)
    if y.size < 2:
        raise ValidationError("spline resampling needs at least 2 knots")
    if t_in.size != y.size:
        raise ValidationError("samples and t_in must have equal lengths")
    if not np.all(np.diff(t_in) > 0):
        raise ValidationError("t_in must be strictly increasing")
    t_out = np.atleast_1d(np.asarray(t_out, dtype=float))
    span = t_in[-1] - t_in[0]
    tol = 1e-9 * max(1.0, abs(span))
    if t_out.size and (t_out.min() < t_in[0] - tol or t_out.max() > t_in[-1] + tol):
        raise RangeError(f"query outside knot range [{t_in[0]}, {t_in[-1]}]; extrapolation is not allowed")
    if y.size == 2:
        return np.interp(t_out, t_in, y)
    spline = CubicSpline(t_in, y, bc_type="natural", extrapolate=False)
    out = spline(np.clip(t_out, t_in[0], t_in[-1]))
    # exact knot hits bypass spline round-off
    pos = np.searchsorted(t_in, t_out)
    pos = np.clip(pos, 0, t_in.size - 1)
    hit = t_in[pos] == t_out
    out[hit] = y[pos[hit]]
    return out
