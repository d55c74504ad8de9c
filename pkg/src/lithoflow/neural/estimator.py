import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ..stats import minmax_params, zscore_params
from ..validation import as_1d, as_2d, check_same_length
from .scg import TrainConfig
from .workflow import FittedAnn, train_network


class SCGRegressor(RegressorMixin, BaseEstimator):
    """Single-output MLP regressor trained by scaled conjugate gradients.

    Inputs are z-scored and the target min-max scaled onto ``target_range``
    with statistics of the data passed to ``fit``; predictions are returned
    in target units.

    Parameters
    ----------
    hidden : int or tuple of int
        Hidden layer widths (tansig units).
    max_epochs, min_error, sigma, lambda_init, method : see TrainConfig
    seed : int
        Controls weight initialisation.
    """

    def __init__(self, hidden=10, max_epochs=2000, min_error=1e-4, sigma=5e-5, lambda_init=5e-7,
                 method="scg", target_range=(0.1, 0.9), seed=0):
        self.hidden = hidden
        self.max_epochs = max_epochs
        self.min_error = min_error
        self.sigma = sigma
        self.lambda_init = lambda_init
        self.method = method
        self.target_range = target_range
        self.seed = seed

    def _config(self):
        return TrainConfig(max_epochs=self.max_epochs, min_error=self.min_error, sigma=self.sigma,
                           lambda_init=self.lambda_init, seed=self.seed, method=self.method)

    def fit(self, X, y):
        X = as_2d(X, min_rows=2)
        y = as_1d(y, "y", min_len=2)
        check_same_length(X, y, names=("X", "y"))
        cfg = self._config()
        x_norm = zscore_params(X)
        y_norm = minmax_params(y, *self.target_range)
        model, hist = train_network(X, y, x_norm, y_norm, self.hidden, cfg, label="SCGRegressor")
        names = [f"x{j}" for j in range(X.shape[1])]
        self.fitted_ = FittedAnn(model, x_norm, y_norm, names, "y", {"train": cfg.to_dict()}, hist)
        self.history_ = hist
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "fitted_")
        return self.fitted_.predict(as_2d(X))

    @property
    def loss_curve_(self):
        check_is_fitted(self, "history_")
        return np.asarray(self.history_.loss)
