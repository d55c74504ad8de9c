"""
Scaled conjugate gradient minimisation (Moller's formulation) and a plain
gradient-descent-with-momentum alternative.

One SCG iteration, with search direction ``p``, steepest-descent direction
``r = -grad E(w)`` and scale ``lam`` (``lam_bar`` is the part of ``lam``
already folded into ``delta``)::

    if success:
        sigma_k = sigma / |p|
        s       = (grad E(w + sigma_k p) - grad E(w)) / sigma_k
        delta   = p.s
    delta += (lam - lam_bar) |p|^2
    if delta <= 0:                        # force positive curvature
        lam_bar = 2 (lam - delta / |p|^2)
        delta   = -delta + lam |p|^2
        lam     = lam_bar
    mu    = p.r
    alpha = mu / delta
    Delta = 2 delta (E(w) - E(w + alpha p)) / mu^2
    if Delta >= 0: accept, lam_bar = 0, new conjugate direction (restart every N)
                   if Delta >= 0.75: lam /= 4
    else:          reject, lam_bar = lam
    if Delta < 0.25: lam += delta (1 - Delta) / |p|^2

When ``E(w) - E(w + alpha p)`` is below floating-point resolution it is
replaced by the trapezoid estimate ``alpha/2 p.(r + r_new)``, exact for
quadratics. An accepted step can therefore raise ``E`` by at most that
round-off margin; ``TrainHistory.best_loss`` gives the running minimum.
"""
import csv
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..exceptions import ConfigurationError, NumericError, ValidationError
from .mlp import loss_and_gradient


@dataclass
class TrainConfig:
    """Training options.

    ``min_error`` is an RMSE threshold on the normalised target. ``method``
    is ``"scg"`` (default) or ``"gdm"`` for gradient descent with momentum.
    """

    max_epochs: int = 2000
    min_error: float = 1e-4
    sigma: float = 5e-5
    lambda_init: float = 5e-7
    seed: int = 0
    method: str = "scg"
    learning_rate: float = 0.1
    momentum: float = 0.9
    gtol: float = 1e-12

    def __post_init__(self):
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise ConfigurationError("max_epochs must be a positive integer")
        self.max_epochs = int(self.max_epochs)
        if self.min_error < 0:
            raise ConfigurationError("min_error must be non-negative")
        if not 0 < self.sigma <= 1e-4:
            raise ConfigurationError(f"sigma must lie in (0, 1e-4], got {self.sigma}")
        if not 0 < self.lambda_init <= 1e-4:
            raise ConfigurationError(f"lambda_init must lie in (0, 1e-4], got {self.lambda_init}")
        if self.method not in ("scg", "gdm"):
            raise ConfigurationError(f"unknown training method {self.method!r}")
        if self.learning_rate <= 0 or not 0 <= self.momentum < 1:
            raise ConfigurationError("need learning_rate > 0 and momentum in [0, 1)")

    def to_dict(self):
        return asdict(self)


@dataclass
class TrainHistory:
    """Per-iteration objective after the iteration, acceptance flags and cost.

    ``grad_evals`` counts objective-and-gradient evaluations; unlike
    ``elapsed`` it is deterministic.
    """

    loss: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    elapsed: float = 0.0
    grad_evals: int = 0
    stop_reason: str = ""

    @property
    def iterations(self):
        return len(self.loss)

    def best_loss(self):
        """Running minimum of the loss over accepted iterations."""
        out, best = [], np.inf
        for f, ok in zip(self.loss, self.accepted):
            if ok:
                best = min(best, f)
            out.append(best)
        return np.array(out)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "loss", "accepted"])
            for k, (f, ok) in enumerate(zip(self.loss, self.accepted), start=1):
                w.writerow([k, repr(float(f)), int(ok)])


def scg_minimize(fun_grad, w0, max_iter=2000, sigma=5e-5, lambda_init=5e-7,
                 gtol=1e-12, f_stop=None):
    """Minimise a smooth function by scaled conjugate gradients.

    Parameters
    ----------
    fun_grad : callable
        ``w -> (f, grad)``.
    f_stop : float, optional
        Stop once the objective is at or below this value.

    Returns
    -------
    w : ndarray
    hist : TrainHistory
    """
    t_start = time.perf_counter()
    w = np.array(w0, dtype=float)
    n = w.size
    hist = TrainHistory()
    f, g = fun_grad(w)
    hist.grad_evals += 1
    r = -g
    p = r.copy()
    lam, lam_bar = lambda_init, 0.0
    success = True
    delta = 0.0
    if f_stop is not None and f <= f_stop:
        hist.stop_reason = "min_error"
    elif np.linalg.norm(r) < gtol:
        hist.stop_reason = "gradient"
    k = 0
    while not hist.stop_reason and k < max_iter:
        k += 1
        mu = p @ r
        if mu <= 0:
            # lost descent property through round-off: restart on -grad
            p = r.copy()
            mu = p @ r
            success = True
        p2 = p @ p
        if success:
            sigma_k = sigma / np.sqrt(p2)
            _, g_plus = fun_grad(w + sigma_k * p)
            hist.grad_evals += 1
            delta = p @ ((g_plus + r) / sigma_k)
            lam_bar = 0.0
        delta += (lam - lam_bar) * p2
        lam_bar = lam
        if delta <= 0:
            lam_bar = 2.0 * (lam - delta / p2)
            delta = -delta + lam * p2
            lam = lam_bar
        alpha = mu / delta
        w_new = w + alpha * p
        f_new, g_new = fun_grad(w_new)
        hist.grad_evals += 1
        if not np.isfinite(f_new):
            raise NumericError(f"objective became non-finite at iteration {k}")
        decrease = f - f_new
        if abs(decrease) <= 1e-10 * max(abs(f), abs(f_new)):
            # difference lost in round-off: trapezoid estimate from the gradients
            decrease = 0.5 * alpha * (p @ (r - g_new))
        comparison = 2.0 * delta * decrease / (mu * mu)
        ok = comparison >= 0
        if ok:
            r_new = -g_new
            w, f = w_new, f_new
            lam_bar = 0.0
            success = True
            if k % n == 0:
                p_new = r_new.copy()
            else:
                beta = (r_new @ r_new - r_new @ r) / mu
                p_new = r_new + beta * p
            r = r_new
            if comparison >= 0.75:
                lam *= 0.25
        else:
            lam_bar = lam
            success = False
            p_new = p
        if comparison < 0.25:
            lam += delta * (1.0 - comparison) / p2
        p = p_new
        hist.loss.append(float(f))
        hist.accepted.append(bool(ok))
        if f_stop is not None and f <= f_stop:
            hist.stop_reason = "min_error"
        elif np.linalg.norm(r) < gtol:
            hist.stop_reason = "gradient"
    if not hist.stop_reason:
        hist.stop_reason = "max_epochs"
    hist.elapsed = time.perf_counter() - t_start
    return w, hist


def gdm_minimize(fun_grad, w0, max_iter=2000, learning_rate=0.1, momentum=0.9,
                 gtol=1e-12, f_stop=None):
    """Batch gradient descent with momentum.

    A step that would raise the objective is rejected and the momentum
    buffer cleared, so accepted losses never increase.
    """
    t_start = time.perf_counter()
    w = np.array(w0, dtype=float)
    hist = TrainHistory()
    f, g = fun_grad(w)
    hist.grad_evals += 1
    step = np.zeros_like(w)
    lr = learning_rate
    for k in range(1, max_iter + 1):
        if f_stop is not None and f <= f_stop:
            hist.stop_reason = "min_error"
            break
        if np.linalg.norm(g) < gtol:
            hist.stop_reason = "gradient"
            break
        step = momentum * step - lr * g
        f_new, g_new = fun_grad(w + step)
        hist.grad_evals += 1
        if not np.isfinite(f_new):
            raise NumericError(f"objective became non-finite at iteration {k}")
        ok = f_new <= f
        if ok:
            w, f, g = w + step, f_new, g_new
        else:
            step = np.zeros_like(w)
            lr *= 0.5
        hist.loss.append(float(f))
        hist.accepted.append(bool(ok))
    if not hist.stop_reason:
        hist.stop_reason = "max_epochs"
    hist.elapsed = time.perf_counter() - t_start
    return w, hist


def quadratic_problem(A, b):
    """``f(w) = w'Aw/2 - b'w`` as a ``fun_grad`` callable, for testing."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise ValidationError("A must be square and b must match it")

    def fun_grad(w):
        Aw = A @ w
        return 0.5 * w @ Aw - b @ w, Aw - b

    return fun_grad


def scg_train(model, X, D, cfg=None):
    """Train ``model`` on inputs ``X`` and targets ``D``.

    The objective is the half mean squared error of
    :func:`~lithoflow.neural.mlp.loss_and_gradient`; training stops once the
    RMSE over all outputs reaches ``cfg.min_error``.
    """
    cfg = cfg or TrainConfig()
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 1:
        raise ValidationError("training needs at least one sample")
    # rmse <= e  <=>  half-MSE-sum <= n_out e^2 / 2
    f_stop = 0.5 * model.n_out * cfg.min_error ** 2

    def fun_grad(theta):
        return loss_and_gradient(model.with_params(theta), X, D)

    if cfg.method == "scg":
        theta, hist = scg_minimize(fun_grad, model.get_params(), cfg.max_epochs, cfg.sigma,
                                   cfg.lambda_init, cfg.gtol, f_stop)
    else:
        theta, hist = gdm_minimize(fun_grad, model.get_params(), cfg.max_epochs, cfg.learning_rate,
                                   cfg.momentum, cfg.gtol, f_stop)
    return model.with_params(theta), hist
