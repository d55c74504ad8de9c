"""
Normalisation, information measures, regression/classification metrics and
Relief feature weighting.
"""
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegenerateInputError, ValidationError
from .validation import as_1d, as_2d, check_same_length

# ---------------------------------------------------------------------------
# normalisation


@dataclass
class NormParams:
    """Parameters of a per-column affine normalisation.

    ``kind == "zscore"`` uses ``center``/``scale`` as mean and population
    standard deviation. ``kind == "minmax"`` maps ``[data_min, data_max]``
    onto ``[lo, hi]``.
    """

    kind: str
    center: np.ndarray = None
    scale: np.ndarray = None
    data_min: np.ndarray = None
    data_max: np.ndarray = None
    lo: float = 0.1
    hi: float = 0.9

    def __post_init__(self):
        for name in ("center", "scale", "data_min", "data_max"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, np.atleast_1d(np.asarray(v, dtype=float)))
        if self.kind == "zscore":
            if np.any(self.scale <= 0):
                raise DegenerateInputError("zscore scale must be positive")
        elif self.kind == "minmax":
            if np.any(self.data_max <= self.data_min) or self.hi <= self.lo:
                raise DegenerateInputError("minmax needs max > min and hi > lo")
        else:
            raise ValidationError(f"unknown normalisation kind {self.kind!r}")

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zscore":
            return (x - self._shape(self.center, x)) / self._shape(self.scale, x)
        span = self._shape(self.data_max, x) - self._shape(self.data_min, x)
        return self.lo + (x - self._shape(self.data_min, x)) * (self.hi - self.lo) / span

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "zscore":
            return y * self._shape(self.scale, y) + self._shape(self.center, y)
        span = self._shape(self.data_max, y) - self._shape(self.data_min, y)
        return self._shape(self.data_min, y) + (y - self.lo) * span / (self.hi - self.lo)

    @staticmethod
    def _shape(v, x):
        # scalar params broadcast against vectors; per-column params against matrices
        return v[0] if (x.ndim <= 1 and v.size == 1) else v

    def to_dict(self):
        d = asdict(self)
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                for k, v in d.items() if v is not None}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def zscore_params(x):
    x = np.asarray(x, dtype=float)
    if x.shape[0] < 2:
        raise ValidationError("zscore needs at least 2 samples")
    mu = x.mean(axis=0)
    sigma = x.std(axis=0)
    if np.any(sigma == 0):
        raise DegenerateInputError("zscore of a constant input (standard deviation 0)")
    return NormParams("zscore", center=mu, scale=sigma)


def zscore(x):
    """Standardise with the population standard deviation.

    Works column-wise on 2-D input. Returns ``(normalised, params)``.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValidationError("zscore input contains non-finite values")
    params = zscore_params(x)
    return params.apply(x), params


def minmax_params(x, lo=0.1, hi=0.9):
    x = np.asarray(x, dtype=float)
    if hi <= lo:
        raise ValidationError("minmax needs hi > lo")
    mn, mx = x.min(axis=0), x.max(axis=0)
    if np.any(mx <= mn):
        raise DegenerateInputError("minmax of a constant input")
    return NormParams("minmax", data_min=mn, data_max=mx, lo=lo, hi=hi)


def minmax(x, lo=0.1, hi=0.9):
    """Affine map of ``[min(x), max(x)]`` onto ``[lo, hi]``; returns ``(y, params)``."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValidationError("minmax input contains non-finite values")
    params = minmax_params(x, lo, hi)
    return params.apply(x), params


class ZScoreScaler(TransformerMixin, BaseEstimator):
    """Column-wise standardisation with population statistics."""

    def fit(self, X, y=None):
        X = as_2d(X, min_rows=2)
        self.params_ = zscore_params(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        return self.params_.apply(as_2d(X))

    def inverse_transform(self, X):
        check_is_fitted(self, "params_")
        return self.params_.inverse(as_2d(X))


class RangeScaler(TransformerMixin, BaseEstimator):
    """Column-wise min-max scaling onto ``feature_range``."""

    def __init__(self, feature_range=(0.1, 0.9)):
        self.feature_range = feature_range

    def fit(self, X, y=None):
        X = as_2d(X)
        lo, hi = self.feature_range
        self.params_ = minmax_params(X, lo, hi)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        return self.params_.apply(as_2d(X))

    def inverse_transform(self, X):
        check_is_fitted(self, "params_")
        return self.params_.inverse(as_2d(X))


# ---------------------------------------------------------------------------
# information measures


def psd(signal, fs=1.0):
    """Normalised periodogram over the non-negative frequencies.

    Returns ``(freqs, p)`` where ``p`` sums to one.
    """
    x = as_1d(signal, "signal", min_len=8)
    power = np.abs(np.fft.rfft(x)) ** 2 / x.size
    total = power.sum()
    if total == 0:
        raise DegenerateInputError("PSD of an all-zero signal is undefined")
    return np.fft.rfftfreq(x.size, d=1.0 / fs), power / total


def entropy_bits(p):
    """Shannon entropy in bits, with 0 log 0 taken as 0."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValidationError("probabilities must be finite and non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValidationError(f"probabilities must sum to 1, got {p.sum()!r}")
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def psd_entropy(signal, fs=1.0):
    return entropy_bits(psd(signal, fs)[1])


def _bin_index(v, n_bins):
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros(v.size, dtype=np.int64)
    idx = np.floor((v - lo) / (hi - lo) * n_bins).astype(np.int64)
    return np.clip(idx, 0, n_bins - 1)


def _entropy_counts(counts):
    counts = counts[counts > 0].astype(float)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def nmi(x, a, n_bins=64):
    """Mutual information normalised by the smaller marginal entropy.

    Both variables are histogrammed into ``n_bins`` equal-width bins over
    their own ranges.
    """
    x = as_1d(x, "x")
    a = as_1d(a, "a")
    check_same_length(x, a, names=("x", "a"))
    if n_bins < 2 or x.size < n_bins:
        raise ValidationError(f"need n_bins >= 2 and at least n_bins samples (n={x.size}, bins={n_bins})")
    bx, ba = _bin_index(x, n_bins), _bin_index(a, n_bins)
    hx = _entropy_counts(np.bincount(bx, minlength=n_bins))
    ha = _entropy_counts(np.bincount(ba, minlength=n_bins))
    if hx == 0 or ha == 0:
        raise DegenerateInputError("NMI undefined: a marginal entropy is zero")
    hxa = _entropy_counts(np.bincount(bx * n_bins + ba, minlength=n_bins * n_bins))
    mi = hx + ha - hxa
    return float(np.clip(mi / min(hx, ha), 0.0, 1.0))


# ---------------------------------------------------------------------------
# metrics


@dataclass
class RegressionMetrics:
    cc: float
    rmse: float
    aem: float
    si: Optional[float]

    def as_row(self):
        return {"cc": self.cc, "rmse": self.rmse, "aem": self.aem, "si": self.si}


def regression_metrics(pred, obs):
    """Correlation coefficient, RMSE, absolute error mean and scatter index
    (RMSE over the mean observation; ``None`` when that mean is zero)."""
    pred = as_1d(pred, "pred", min_len=2)
    obs = as_1d(obs, "obs", min_len=2)
    check_same_length(pred, obs, names=("pred", "obs"))
    dp, do = pred - pred.mean(), obs - obs.mean()
    denom = np.sqrt(np.sum(dp ** 2) * np.sum(do ** 2))
    if denom == 0:
        raise DegenerateInputError("correlation undefined for a constant series")
    cc = float(np.clip(np.sum(dp * do) / denom, -1.0, 1.0))
    err = pred - obs
    rmse = float(np.sqrt(np.mean(err ** 2)))
    aem = float(np.mean(np.abs(err)))
    mean_obs = float(obs.mean())
    si = rmse / mean_obs if mean_obs != 0 else None
    return RegressionMetrics(cc, rmse, aem, si)


@dataclass
class ConfusionCounts:
    """Counts with the minority class as the positive class."""

    tp: int = 0
    fn: int = 0
    tn: int = 0
    fp: int = 0

    @classmethod
    def from_labels(cls, is_positive, predicted_positive):
        t = np.asarray(is_positive, dtype=bool)
        p = np.asarray(predicted_positive, dtype=bool)
        return cls(tp=int(np.sum(t & p)), fn=int(np.sum(t & ~p)),
                   tn=int(np.sum(~t & ~p)), fp=int(np.sum(~t & p)))

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fn + other.fn,
                               self.tn + other.tn, self.fp + other.fp)


def g_metric(c):
    """Geometric mean of sensitivity and specificity."""
    if min(c.tp, c.fn, c.tn, c.fp) < 0:
        raise ValidationError("confusion counts must be non-negative")
    if c.tp + c.fn == 0 or c.tn + c.fp == 0:
        raise ValidationError("g-metric needs at least one positive and one negative instance")
    return float(np.sqrt(c.tp / (c.tp + c.fn) * c.tn / (c.tn + c.fp)))


# ---------------------------------------------------------------------------
# Relief


def _unit_scale(X):
    mn, mx = X.min(axis=0), X.max(axis=0)
    span = np.where(mx > mn, mx - mn, 1.0)
    return np.where(mx > mn, (X - mn) / span, 0.0)


def relief_weights(X, y, m=None, seed=0):
    """Kira-Rendell Relief weights for a binary problem.

    Features are min-max scaled to [0, 1]. ``m`` instances are visited in a
    seeded random order (default: every instance once); for each, the
    nearest hit and nearest miss under Euclidean distance update
    ``w_j += (|x_j - miss_j| - |x_j - hit_j|) / m``.
    """
    X = as_2d(X, min_rows=2)
    y = np.asarray(y).ravel()
    if y.size != X.shape[0]:
        raise ValidationError("X and y row counts differ")
    classes = np.unique(y)
    if classes.size != 2:
        raise ValidationError(f"Relief needs exactly two classes, got {classes.size}")
    n, d = X.shape
    m = n if m is None else int(m)
    if m < 1:
        raise ValidationError("m must be >= 1")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    if m <= n:
        picks = order[:m]
    else:
        picks = np.concatenate([order, rng.integers(0, n, size=m - n)])
    Z = _unit_scale(X)
    w = np.zeros(d)
    block = max(1, min(256, 4_000_000 // (n * d)))
    for start in range(0, picks.size, block):
        idx = picks[start:start + block]
        diff = np.abs(Z[idx, None, :] - Z[None, :, :])
        dist = np.sqrt(np.sum(diff ** 2, axis=2))
        dist[np.arange(idx.size), idx] = np.inf
        same = y[idx, None] == y[None, :]
        hit_d = np.where(same, dist, np.inf)
        miss_d = np.where(~same, dist, np.inf)
        hit = np.argmin(hit_d, axis=1)
        miss = np.argmin(miss_d, axis=1)
        rows = np.arange(idx.size)
        has_hit = np.isfinite(hit_d[rows, hit])
        hit_term = np.where(has_hit[:, None], diff[rows, hit], 0.0)
        w += (diff[rows, miss] - hit_term).sum(axis=0) / m
    return w


class ReliefSelector(SelectorMixin, BaseEstimator):
    """Keep the ``n_features_to_select`` features with the largest Relief weight."""

    def __init__(self, n_features_to_select=2, n_iterations=None, seed=0):
        self.n_features_to_select = n_features_to_select
        self.n_iterations = n_iterations
        self.seed = seed

    def fit(self, X, y):
        X = as_2d(X, min_rows=2)
        if not 1 <= self.n_features_to_select <= X.shape[1]:
            raise ValidationError("n_features_to_select out of range")
        self.weights_ = relief_weights(X, y, m=self.n_iterations, seed=self.seed)
        # stable sort: ties keep column order
        self.ranking_ = np.argsort(-self.weights_, kind="stable")
        self.n_features_in_ = X.shape[1]
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "weights_")
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[self.ranking_[:self.n_features_to_select]] = True
        return mask
