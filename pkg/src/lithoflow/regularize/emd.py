"""Empirical mode decomposition by cubic-spline envelope sifting."""
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..exceptions import ValidationError
from ..validation import as_1d


@dataclass
class EmdResult:
    """IMFs ordered from highest to lowest frequency, the residue, and the
    number of sifting passes spent on each IMF."""

    imfs: list
    residue: np.ndarray
    sift_counts: list

    @property
    def n_imfs(self):
        return len(self.imfs)

    def reconstruct(self):
        return np.sum(self.imfs, axis=0) + self.residue if self.imfs else self.residue.copy()


def _fill_signs(s):
    """Replace zeros in a sign sequence by the nearest preceding nonzero sign
    (leading zeros take the first nonzero one)."""
    s = s.copy()
    nz = np.flatnonzero(s)
    if nz.size == 0:
        return s
    s[:nz[0]] = s[nz[0]]
    idx = np.where(s != 0, np.arange(s.size), 0)
    np.maximum.accumulate(idx, out=idx)
    return s[idx]


def find_extrema(x):
    """Indices of local maxima and minima (plateaus count once)."""
    d = _fill_signs(np.sign(np.diff(x)))
    if d.size < 2 or not np.any(d):
        return np.array([], dtype=int), np.array([], dtype=int)
    change = np.flatnonzero(d[1:] != d[:-1]) + 1
    maxima = change[d[change - 1] > 0]
    minima = change[d[change - 1] < 0]
    return maxima, minima


def count_zero_crossings(x):
    s = _fill_signs(np.sign(x))
    return int(np.count_nonzero(s[1:] != s[:-1]))


def count_extrema(x):
    mx, mn = find_extrema(x)
    return mx.size + mn.size


def is_imf(x):
    """Extrema and zero-crossing counts differ by at most one."""
    return abs(count_extrema(x) - count_zero_crossings(x)) <= 1


def _mirrored_knots(t, x, idx, n_mirror=2):
    left = idx[:n_mirror]
    right = idx[-n_mirror:]
    tk = np.concatenate([2 * t[0] - t[left][::-1], t[idx], 2 * t[-1] - t[right][::-1]])
    yk = np.concatenate([x[left][::-1], x[idx], x[right][::-1]])
    # endpoint extrema mirror onto themselves
    tk, keep = np.unique(tk, return_index=True)
    return tk, yk[keep]


def mean_envelope(x, t=None):
    """Mean of the upper and lower spline envelopes, or ``None`` when the
    signal lacks a maximum or a minimum."""
    t = np.arange(x.size, dtype=float) if t is None else t
    maxima, minima = find_extrema(x)
    if maxima.size == 0 or minima.size == 0:
        return None
    tu, yu = _mirrored_knots(t, x, maxima)
    tl, yl = _mirrored_knots(t, x, minima)
    upper = CubicSpline(tu, yu)(t)
    lower = CubicSpline(tl, yl)(t)
    return 0.5 * (upper + lower)


def sift(r, max_sift=100, sd_threshold=0.25):
    """Extract one IMF from ``r``.

    Sifting stops once the Cauchy criterion
    ``sum((h_prev - h)^2) / sum(h_prev^2) < sd_threshold`` holds and ``h``
    satisfies the extrema/zero-crossing condition, or after ``max_sift``
    passes. Returns ``(imf, passes)``.
    """
    h = r.copy()
    passes = 0
    for passes in range(1, max_sift + 1):
        m = mean_envelope(h)
        if m is None:
            break
        h_new = h - m
        denom = np.sum(h ** 2)
        sd = np.sum(m ** 2) / denom if denom > 0 else 0.0
        h = h_new
        if sd < sd_threshold and is_imf(h):
            break
    return h, passes


def emd(signal, max_sift=100, sd_threshold=0.25, max_imfs=None):
    """Decompose ``signal`` into IMFs plus a residue.

    Extraction continues while the residue has at least two extrema (and
    both a maximum and a minimum), up to ``max_imfs`` (default
    ``floor(log2(n))``). The residue is updated by subtraction, so
    ``sum(imfs) + residue`` reproduces the input to round-off.
    """
    x = as_1d(signal, "signal", min_len=8)
    if max_imfs is None:
        max_imfs = int(np.floor(np.log2(x.size)))
    imfs, counts = [], []
    r = x.copy()
    scale = np.max(np.abs(x)) if np.any(x) else 1.0
    while len(imfs) < max_imfs:
        mx, mn = find_extrema(r)
        if mx.size + mn.size < 2 or mx.size == 0 or mn.size == 0:
            break
        # residue indistinguishable from round-off of the input
        if np.ptp(r) <= 1e-10 * scale:
            break
        imf, passes = sift(r, max_sift, sd_threshold)
        imfs.append(imf)
        counts.append(passes)
        r = r - imf
    return EmdResult(imfs, r, counts)


def emd_regularize(target, drop_first=1, **emd_kwargs):
    """Rebuild ``target`` from all IMFs after the first ``drop_first`` plus
    the residue."""
    res = emd(target, **emd_kwargs)
    if drop_first < 1:
        raise ValidationError("drop_first must be >= 1")
    if drop_first >= res.n_imfs:
        raise ValidationError(
            f"drop_first={drop_first} but the decomposition produced only {res.n_imfs} IMFs")
    kept = res.imfs[drop_first:]
    return np.sum(kept, axis=0) + res.residue
