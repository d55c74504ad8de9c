"""Target regularization: spectral truncation, wavelet detail suppression
and IMF suppression."""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..exceptions import ConfigurationError
from .emd import EmdResult, emd, emd_regularize, is_imf, count_extrema, count_zero_crossings
from .fourier import ft_regularize, suggest_bandwidth
from .report import InfoReport, regularization_report
from .wavelet import DB4_HI, DB4_LO, WaveletCoeffs, dwt, idwt, wd_regularize

METHODS = ("none", "ft", "wd", "emd")


def regularize(target, method, fs=1.0, **params):
    """Dispatch to one regularizer by name.

    ``method="ft"`` takes ``xi_max`` (Hz), ``"wd"`` takes ``levels`` and
    ``truncate_levels``, ``"emd"`` takes ``drop_first`` plus sifting
    options. ``"none"`` returns a copy.
    """
    if method == "none":
        return np.array(target, dtype=float)
    if method == "ft":
        if "xi_max" not in params:
            raise ConfigurationError("ft regularization requires xi_max")
        return ft_regularize(target, fs, params["xi_max"])
    if method == "wd":
        return wd_regularize(target, **params)
    if method == "emd":
        return emd_regularize(target, **params)
    raise ConfigurationError(f"unknown regularization method {method!r}; choose from {METHODS}")


class TargetRegularizer(TransformerMixin, BaseEstimator):
    """Stateless transformer applying :func:`regularize` to a 1-D target."""

    def __init__(self, method="wd", fs=1.0, params=None):
        self.method = method
        self.fs = fs
        self.params = params

    def fit(self, y, _=None):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown regularization method {self.method!r}")
        self.fitted_ = True
        return self

    def transform(self, y):
        return regularize(y, self.method, self.fs, **(self.params or {}))


__all__ = [
    "DB4_HI", "DB4_LO", "EmdResult", "InfoReport", "METHODS", "TargetRegularizer", "WaveletCoeffs",
    "count_extrema", "count_zero_crossings", "dwt", "emd", "emd_regularize", "ft_regularize",
    "idwt", "is_imf", "regularization_report", "regularize", "suggest_bandwidth", "wd_regularize",
]
