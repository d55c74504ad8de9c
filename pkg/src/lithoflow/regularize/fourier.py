import numpy as np

from ..exceptions import ValidationError
from ..stats import psd
from ..validation import as_1d


def ft_regularize(target, fs, xi_max):
    """Zero every spectral component above ``xi_max`` Hz and transform back.

    The real FFT keeps the spectrum Hermitian, so the output is real and
    has the input length. The DC term is always retained.
    """
    y = as_1d(target, "target", min_len=2)
    nyquist = fs / 2.0
    if not 0 < xi_max <= nyquist * (1 + 1e-12):
        raise ValidationError(f"xi_max must lie in (0, {nyquist}] Hz, got {xi_max}")
    spec = np.fft.rfft(y)
    freqs = np.fft.rfftfreq(y.size, d=1.0 / fs)
    spec[freqs > xi_max] = 0.0
    return np.fft.irfft(spec, n=y.size)


def suggest_bandwidth(predictor, fs, widen=1.0, mass=0.99):
    """Frequency holding ``mass`` of the predictor's (mean-removed) power,
    scaled by ``widen`` and clamped to Nyquist."""
    if widen < 1:
        raise ValidationError("widen must be >= 1")
    x = as_1d(predictor, "predictor", min_len=8)
    freqs, p = psd(x - x.mean(), fs)
    cum = np.cumsum(p)
    k = int(np.searchsorted(cum, mass - 1e-12))
    f = freqs[min(k, freqs.size - 1)]
    return float(min(widen * f, fs / 2.0))
