"""
Zone partitioning by well tops and the modular network workflow: one
network per zone, outputs concatenated in time order.
"""
import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chunks import apply_in_chunks, cube_rows
from .exceptions import ConfigurationError, ValidationError
from .neural.scg import TrainConfig
from .neural.workflow import FittedAnn, pooled_normalization, train_network
from .stats import regression_metrics


@dataclass
class ZoneSpec:
    """Per-well top times (ms), strictly increasing; ``k`` tops give ``k + 1``
    zones named ``Z1..Z{k+1}`` from shallow to deep."""

    tops: dict

    def __post_init__(self):
        self.tops = {str(w): tuple(float(t) for t in ts) for w, ts in self.tops.items()}
        counts = {len(ts) for ts in self.tops.values()}
        if len(counts) > 1:
            raise ValidationError("every well needs the same number of tops")
        for w, ts in self.tops.items():
            if not ts or any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValidationError(f"well {w}: tops must be non-empty and strictly increasing")

    @property
    def n_zones(self):
        return len(next(iter(self.tops.values()))) + 1 if self.tops else 0

    @property
    def zone_ids(self):
        return [f"Z{k + 1}" for k in range(self.n_zones)]

    def for_well(self, well_id):
        if well_id not in self.tops:
            raise ValidationError(f"no tops recorded for well {well_id!r}")
        return self.tops[well_id]

    def to_csv(self, path):
        k = self.n_zones - 1
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["well_id"] + [f"top{j + 1}_ms" for j in range(k)])
            for well, ts in self.tops.items():
                w.writerow([well] + [repr(float(t)) for t in ts])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0][0] != "well_id" or len(rows[0]) < 2:
            raise ValidationError(f"{path}: expected header well_id,top1_ms,...")
        return cls({r[0]: [float(v) for v in r[1:]] for r in rows[1:] if r})


def zone_index(times, tops):
    """Zone number (0-based) of every time; a sample exactly at a top
    belongs to the deeper zone."""
    return np.searchsorted(np.asarray(tops, dtype=float), np.asarray(times, dtype=float),
                           side="right")


def partition_zones(dataset, tops):
    """Split one well's rows into ``len(tops) + 1`` zone datasets."""
    t = dataset.time
    tops = np.asarray(tops, dtype=float)
    if tops.min() < t[0] or tops.max() > t[-1]:
        raise ValidationError(
            f"well {dataset.well_id}: tops {tops.tolist()} outside the log range [{t[0]}, {t[-1]}] ms")
    z = zone_index(t, tops)
    return [dataset.subset(z == k) for k in range(tops.size + 1)]


@dataclass
class MannModel:
    """One fitted network per zone, sharing predictor and target scaling."""

    zones: dict
    histories: dict = field(default_factory=dict)
    seconds: dict = field(default_factory=dict)
    work: dict = field(default_factory=dict)

    @property
    def zone_ids(self):
        return list(self.zones)

    @property
    def total_seconds(self):
        return sum(self.seconds[z] for z in self.zone_ids)

    @property
    def total_work(self):
        return sum(self.work[z] for z in self.zone_ids)


def _train_zone(args):
    zid, X, y, x_norm, y_norm, hidden, cfg = args
    t0 = time.perf_counter()
    model, hist = train_network(X, y, x_norm, y_norm, hidden, cfg, label=f"zone {zid}")
    return model, hist, time.perf_counter() - t0


def _pooled_zone_rows(datasets, spec, blind_well):
    train = [d for d in datasets if d.well_id != blind_well]
    if blind_well is not None and len(train) == len(datasets):
        raise ConfigurationError(f"blind well {blind_well!r} is not among the datasets")
    if not train:
        raise ConfigurationError("no training wells remain after excluding the blind well")
    per_zone = [[] for _ in range(spec.n_zones)]
    for d in train:
        for k, part in enumerate(partition_zones(d, spec.for_well(d.well_id))):
            per_zone[k].append(part)
    return train, per_zone


def train_mann(datasets, spec, blind_well, cfg=None, hidden=4, threads=1):
    """Train one network per zone on the zone-pooled rows of every well
    except ``blind_well`` (``None`` trains on all wells).

    All networks share the normalisation computed over the pooled training
    wells. Each is initialised from ``cfg.seed``, so results do not depend
    on ``threads``.
    """
    cfg = cfg or TrainConfig()
    datasets = list(datasets)
    train, per_zone = _pooled_zone_rows(datasets, spec, blind_well)
    x_norm, y_norm = pooled_normalization(train)
    rng = np.random.default_rng(cfg.seed)
    jobs = []
    for zid, parts in zip(spec.zone_ids, per_zone):
        X = np.vstack([p.predictors for p in parts])
        y = np.concatenate([p.target for p in parts])
        if y.size == 0:
            raise ConfigurationError(f"zone {zid} has no training rows after pooling")
        order = rng.permutation(y.size)
        jobs.append((zid, X[order], y[order], x_norm, y_norm, hidden, cfg))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_train_zone, jobs))
    else:
        results = [_train_zone(j) for j in jobs]
    names, target = datasets[0].predictor_names, datasets[0].target_name
    mann = MannModel({})
    for (zid, X, *_), (model, hist, secs) in zip(jobs, results):
        mann.zones[zid] = FittedAnn(model, x_norm, y_norm, list(names), target,
                                    {"train": cfg.to_dict(), "hidden": hidden, "zone": zid}, hist)
        mann.histories[zid] = hist
        mann.seconds[zid] = secs
        mann.work[zid] = hist.grad_evals * X.shape[0]
    return mann


def train_single_ann(datasets, spec, blind_well, cfg=None, hidden=4, budget="equal_total"):
    """Baseline: one network on all pooled non-blind rows.

    ``budget="equal_total"`` gives it the zone networks' combined epoch
    budget; ``"equal_per_network"`` gives it one network's budget.
    """
    cfg = cfg or TrainConfig()
    train, _ = _pooled_zone_rows(list(datasets), spec, blind_well)
    if budget == "equal_total":
        cfg = TrainConfig(**{**cfg.to_dict(), "max_epochs": cfg.max_epochs * spec.n_zones})
    elif budget != "equal_per_network":
        raise ConfigurationError(f"unknown budget rule {budget!r}")
    x_norm, y_norm = pooled_normalization(train)
    X = np.vstack([d.predictors for d in train])
    y = np.concatenate([d.target for d in train])
    order = np.random.default_rng(cfg.seed).permutation(y.size)
    t0 = time.perf_counter()
    model, hist = train_network(X[order], y[order], x_norm, y_norm, hidden, cfg, label="single ANN")
    secs = time.perf_counter() - t0
    fitted = FittedAnn(model, x_norm, y_norm, list(train[0].predictor_names), train[0].target_name,
                       {"train": cfg.to_dict(), "hidden": hidden, "budget": budget}, hist)
    return fitted, secs, hist.grad_evals * y.size


def predict_well_mann(mann, dataset, tops):
    """Predict each zone with its own network; output follows the row order
    of ``dataset``."""
    if len(tops) + 1 != len(mann.zones):
        raise ValidationError(f"{len(tops)} tops define {len(tops) + 1} zones but the model has "
                              f"{len(mann.zones)}")
    z = zone_index(dataset.time, tops)
    out = np.empty(len(dataset))
    for k, zid in enumerate(mann.zone_ids):
        rows = z == k
        if rows.any():
            out[rows] = mann.zones[zid].predict(dataset.predictors[rows])
    return out


def _metrics_or_nan(pred, obs):
    if pred.size < 2 or np.ptp(obs) == 0 or np.ptp(pred) == 0:
        return {"cc": float("nan"), "rmse": float("nan"), "aem": float("nan")}
    m = regression_metrics(pred, obs)
    return {"cc": m.cc, "rmse": m.rmse, "aem": m.aem}


@dataclass
class ComparisonReport:
    """Rows of ``(well, zone, model, cc, rmse, aem)``.

    ``zone`` is a zone id, ``"avg"`` (mean over zones) or ``"all"`` (the
    whole log); ``model`` is ``"mann"`` or ``"ann"``. ``work`` holds the
    deterministic training cost (gradient evaluations times rows) and
    ``seconds`` the wall-clock time per zone and for the baseline.
    """

    rows: list
    work: list
    seconds: list

    def get(self, well, zone, model, key="cc"):
        for r in self.rows:
            if (r["well"], r["zone"], r["model"]) == (well, zone, model):
                return r[key]
        raise KeyError((well, zone, model))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["well", "zone", "model", "cc", "rmse", "aem"])
            for r in self.rows:
                w.writerow([r["well"], r["zone"], r["model"], repr(float(r["cc"])), repr(float(r["rmse"])),
                            repr(float(r["aem"]))])

    def work_to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["well", "zone", "model", "work"])
            for r in self.work:
                w.writerow([r["well"], r["zone"], r["model"], r["work"]])

    def seconds_to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["well", "zone", "model", "seconds"])
            for r in self.seconds:
                w.writerow([r["well"], r["zone"], r["model"], repr(float(r["seconds"]))])


def compare_report(results):
    """Build the MANN versus single-network comparison.

    Parameters
    ----------
    results : list of dict
        One per blind well with keys ``dataset``, ``tops``, ``mann``
        (MannModel), ``ann`` (FittedAnn), ``ann_seconds``, ``ann_work``.
    """
    rows, work, secs = [], [], []
    for res in results:
        d, tops, mann, ann = res["dataset"], res["tops"], res["mann"], res["ann"]
        if ann.predictor_names != d.predictor_names:
            raise ValidationError(f"well {d.well_id}: model and dataset predictor sets differ")
        z = zone_index(d.time, tops)
        preds = {"mann": predict_well_mann(mann, d, tops), "ann": ann.predict(d.predictors)}
        for model, p in preds.items():
            zone_rows = []
            for k, zid in enumerate(mann.zone_ids):
                m = _metrics_or_nan(p[z == k], d.target[z == k])
                zone_rows.append({"well": d.well_id, "zone": zid, "model": model, **m})
            avg = {key: float(np.mean([r[key] for r in zone_rows])) for key in ("cc", "rmse", "aem")}
            rows.extend(zone_rows)
            rows.append({"well": d.well_id, "zone": "avg", "model": model, **avg})
            rows.append({"well": d.well_id, "zone": "all", "model": model,
                         **_metrics_or_nan(p, d.target)})
        for zid in mann.zone_ids:
            work.append({"well": d.well_id, "zone": zid, "model": "mann", "work": mann.work[zid]})
            secs.append({"well": d.well_id, "zone": zid, "model": "mann", "seconds": mann.seconds[zid]})
        work.append({"well": d.well_id, "zone": "total", "model": "mann", "work": mann.total_work})
        secs.append({"well": d.well_id, "zone": "total", "model": "mann", "seconds": mann.total_seconds})
        work.append({"well": d.well_id, "zone": "all", "model": "ann", "work": res["ann_work"]})
        secs.append({"well": d.well_id, "zone": "all", "model": "ann", "seconds": res["ann_seconds"]})
    return ComparisonReport(rows, work, secs)


def interpolate_tops(spec, sites, ref):
    """Top surfaces over the survey grid from per-well top times.

    Each top is a least-squares plane in (inline, xline) through the wells
    that carry it; with fewer than three wells the plane degenerates to the
    mean top time. ``sites`` maps well id to ``(inline, xline)``.
    Returns an array of shape ``(n_inline, n_xline, n_tops)``.
    """
    wells = [w for w in spec.tops if w in sites]
    if not wells:
        raise ConfigurationError("no well with zone tops has a survey location")
    T = np.array([spec.tops[w] for w in wells])
    if len(wells) >= 3:
        A = np.column_stack([np.ones(len(wells)), [sites[w][0] for w in wells],
                             [sites[w][1] for w in wells]])
        coef = np.linalg.lstsq(A, T, rcond=None)[0]
        if np.linalg.matrix_rank(A) < 3:
            coef = np.vstack([T.mean(axis=0), np.zeros((2, T.shape[1]))])
    else:
        coef = np.vstack([T.mean(axis=0), np.zeros((2, T.shape[1]))])
    il, xl = np.meshgrid(ref.inlines, ref.xlines, indexing="ij")
    surf = coef[0] + il[..., None] * coef[1] + xl[..., None] * coef[2]
    # keep surfaces ordered where extrapolation makes planes cross
    return np.maximum.accumulate(surf, axis=-1)


def predict_volume_mann(mann, cubes, surfaces, threads=1, name=None):
    """Evaluate each zone network on the voxels between its top surfaces."""
    first = next(iter(mann.zones.values()))
    ref, X = cube_rows(cubes, first.predictor_names)
    if surfaces.shape != (ref.dims[0], ref.dims[1], len(mann.zones) - 1):
        raise ValidationError(f"top surfaces of shape {surfaces.shape} do not fit the "
                              f"{len(mann.zones)}-zone model on grid {ref.dims}")
    t = ref.times
    zone = np.sum(t[None, None, :, None] >= surfaces[:, :, None, :], axis=-1).ravel()
    out = np.empty(zone.size)
    for k, zid in enumerate(mann.zone_ids):
        rows = zone == k
        if rows.any():
            out[rows] = apply_in_chunks(mann.zones[zid].predict, X[rows], threads)
    return ref.with_values(out.reshape(ref.dims), name or first.target_name)
