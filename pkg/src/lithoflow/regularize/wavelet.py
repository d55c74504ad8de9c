"""
Orthonormal db4 filter bank with periodic extension.

Analysis at one level, for an even-length input ``x`` of length ``N``::

    a[k] = sum_n h[n] x[(2k + n) mod N]
    d[k] = sum_n g[n] x[(2k + n) mod N],   g[n] = (-1)^n h[L-1-n]

Synthesis is the transpose. An odd-length level input is first extended by
repeating its last sample; the stored lengths let ``idwt`` trim it again.
"""
from dataclasses import dataclass

import numpy as np

from ..exceptions import ValidationError
from ..validation import as_1d

# Daubechies 8-tap (4 vanishing moments) scaling filter, sum = sqrt(2)
DB4_LO = np.array([
    0.23037781330889650,
    0.71484657055291540,
    0.63088076792985890,
    -0.02798376941685985,
    -0.18703481171909309,
    0.03084138183556076,
    0.03288301166688520,
    -0.01059740178506903,
])
DB4_HI = np.array([(-1) ** n * DB4_LO[len(DB4_LO) - 1 - n] for n in range(len(DB4_LO))])


@dataclass
class WaveletCoeffs:
    """Coefficients of a multilevel decomposition.

    ``details[0]`` is the finest level. ``lengths[l]`` is the length of the
    signal entering level ``l + 1`` before any extension.
    """

    approx: np.ndarray
    details: list
    lengths: list
    wavelet: str = "db4"
    mode: str = "periodization"

    @property
    def levels(self):
        return len(self.details)

    def copy(self):
        return WaveletCoeffs(self.approx.copy(), [d.copy() for d in self.details],
                             list(self.lengths), self.wavelet, self.mode)


def _index(n_half, n, taps):
    return (2 * np.arange(n_half)[:, None] + np.arange(taps)[None, :]) % n


def dwt_step(x):
    if x.size % 2:
        x = np.append(x, x[-1])
    idx = _index(x.size // 2, x.size, DB4_LO.size)
    windows = x[idx]
    return windows @ DB4_LO, windows @ DB4_HI


def idwt_step(a, d):
    n = 2 * a.size
    idx = _index(a.size, n, DB4_LO.size)
    contrib = a[:, None] * DB4_LO[None, :] + d[:, None] * DB4_HI[None, :]
    return np.bincount(idx.ravel(), weights=contrib.ravel(), minlength=n)


def dwt(signal, levels):
    """Multilevel db4 decomposition with periodic extension."""
    x = as_1d(signal, "signal", min_len=2)
    levels = int(levels)
    if levels < 1:
        raise ValidationError("levels must be >= 1")
    if x.size < 2 ** levels:
        raise ValidationError(
            f"signal of length {x.size} is too short for {levels} levels (needs >= {2 ** levels})")
    details, lengths = [], []
    a = x
    for _ in range(levels):
        lengths.append(a.size)
        a, d = dwt_step(a)
        details.append(d)
    return WaveletCoeffs(a, details, lengths)


def idwt(coeffs):
    """Inverse of :func:`dwt`."""
    a = np.asarray(coeffs.approx, dtype=float)
    for d, n in zip(reversed(coeffs.details), reversed(coeffs.lengths)):
        d = np.asarray(d, dtype=float)
        if d.size != a.size:
            raise ValidationError("approximation/detail length mismatch")
        a = idwt_step(a, d)[:n]
    return a


def wd_regularize(target, levels=6, truncate_levels=5):
    """Zero the ``truncate_levels`` finest detail bands and reconstruct."""
    if not 1 <= truncate_levels <= levels:
        raise ValidationError(f"truncate_levels must lie in [1, {levels}], got {truncate_levels}")
    c = dwt(target, levels)
    for k in range(truncate_levels):
        c.details[k] = np.zeros_like(c.details[k])
    return idwt(c)
