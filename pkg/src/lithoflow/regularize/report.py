"""Information-content summary of a target and its regularized variants."""
import csv
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError
from ..stats import nmi, psd_entropy
from ..validation import as_1d


@dataclass
class InfoReport:
    """PSD entropies (bits) and predictor/target NMI values.

    ``entropy`` maps a signal label to its PSD entropy; ``nmi`` maps
    ``(predictor, target_label)`` to the normalised mutual information.
    Target labels are ``"original"`` plus one label per regularized variant.
    """

    predictor_names: list
    target_labels: list
    entropy: dict = field(default_factory=dict)
    nmi: dict = field(default_factory=dict)

    def nmi_gain(self, label):
        """Per-predictor NMI change of ``label`` relative to the original."""
        return {p: self.nmi[(p, label)] - self.nmi[(p, "original")] for p in self.predictor_names}

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["signal", "psd_entropy_bits"] + [f"nmi_{p}" for p in self.predictor_names])
            for p in self.predictor_names:
                w.writerow([p, repr(float(self.entropy[p]))] + [""] * len(self.predictor_names))
            for lab in self.target_labels:
                w.writerow([lab, repr(float(self.entropy[lab]))]
                           + [repr(float(self.nmi[(p, lab)])) for p in self.predictor_names])


def regularization_report(predictors, target, variants, fs=1.0, predictor_names=None, n_bins=64):
    """Build an :class:`InfoReport`.

    Parameters
    ----------
    predictors : array, shape (n, d)
    target : array, shape (n,)
    variants : dict
        Label to regularized target.
    """
    X = np.asarray(predictors, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = as_1d(target, "target")
    if X.shape[0] != y.size:
        raise ValidationError("predictors and target must have equal lengths")
    names = list(predictor_names) if predictor_names is not None else [f"p{j}" for j in range(X.shape[1])]
    if len(names) != X.shape[1]:
        raise ValidationError("predictor_names does not match the predictor count")
    targets = {"original": y}
    for lab, v in variants.items():
        if lab == "original" or lab in names:
            raise ValidationError(f"variant label {lab!r} clashes with a reserved name")
        v = as_1d(v, lab)
        if v.size != y.size:
            raise ValidationError(f"variant {lab!r} has length {v.size}, expected {y.size}")
        targets[lab] = v
    rep = InfoReport(names, list(targets))
    for j, p in enumerate(names):
        rep.entropy[p] = psd_entropy(X[:, j], fs)
    for lab, v in targets.items():
        rep.entropy[lab] = psd_entropy(v, fs)
        for j, p in enumerate(names):
            rep.nmi[(p, lab)] = nmi(X[:, j], v, n_bins)
    return rep
