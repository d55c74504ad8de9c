"""Integration of seismic traces and well curves on a common fine time grid."""
from dataclasses import dataclass

import numpy as np

from ..exceptions import ValidationError
from .cube import check_congruent
from .resample import depth_to_time, sinc_interp_index, spline_resample


@dataclass
class AlignedDataset:
    """Per-well training table: uniform time axis, predictor matrix, target."""

    well_id: str
    time: np.ndarray
    predictors: np.ndarray
    predictor_names: list
    target: np.ndarray
    target_name: str

    def __post_init__(self):
        self.time = np.asarray(self.time, dtype=float)
        self.predictors = np.asarray(self.predictors, dtype=float)
        if self.predictors.ndim == 1:
            self.predictors = self.predictors[:, None]
        self.target = np.asarray(self.target, dtype=float)
        self.predictor_names = list(self.predictor_names)
        n = self.time.size
        if self.predictors.shape != (n, len(self.predictor_names)) or self.target.shape != (n,):
            raise ValidationError(
                f"well {self.well_id}: inconsistent shapes time={self.time.shape} "
                f"predictors={self.predictors.shape} target={self.target.shape}")
        if not (np.all(np.isfinite(self.predictors)) and np.all(np.isfinite(self.target))):
            raise ValidationError(f"well {self.well_id}: non-finite values in aligned data")
        if n > 2:
            steps = np.diff(self.time)
            if np.max(np.abs(steps - steps[0])) > 1e-9 or steps[0] <= 0:
                raise ValidationError(f"well {self.well_id}: time axis is not uniform")

    def __len__(self):
        return self.time.size

    @property
    def dt(self):
        return float(self.time[1] - self.time[0]) if self.time.size > 1 else float("nan")

    def subset(self, mask):
        """Rows selected by ``mask``; the result need not be uniform, so it
        bypasses the uniformity check."""
        obj = object.__new__(AlignedDataset)
        obj.well_id = self.well_id
        obj.time = self.time[mask]
        obj.predictors = self.predictors[mask]
        obj.predictor_names = list(self.predictor_names)
        obj.target = self.target[mask]
        obj.target_name = self.target_name
        return obj

    def with_target(self, target, name=None):
        out = self.subset(slice(None))
        out.target = np.asarray(target, dtype=float).copy()
        if out.target.shape != self.target.shape:
            raise ValidationError("replacement target has the wrong length")
        if name:
            out.target_name = name
        return out

    def to_csv(self, path):
        header = ",".join(["time_ms", *self.predictor_names, self.target_name])
        table = np.column_stack([self.time, self.predictors, self.target])
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for row in table:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path, well_id):
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if header[0] != "time_ms" or len(header) < 3:
            raise ValidationError(f"{path}: expected header time_ms,<attrs...>,<target>")
        return cls(well_id, data[:, 0], data[:, 1:-1], header[1:-1], data[:, -1], header[-1])


def concat(datasets, well_id="pooled"):
    datasets = list(datasets)
    if not datasets:
        raise ValidationError("nothing to concatenate")
    names = datasets[0].predictor_names
    for d in datasets:
        if d.predictor_names != names:
            raise ValidationError("datasets have different predictor sets")
    obj = object.__new__(AlignedDataset)
    obj.well_id = well_id
    obj.time = np.concatenate([d.time for d in datasets])
    obj.predictors = np.vstack([d.predictors for d in datasets])
    obj.predictor_names = list(names)
    obj.target = np.concatenate([d.target for d in datasets])
    obj.target_name = datasets[0].target_name
    return obj


@dataclass
class WellSite:
    """A well log with its survey location and time-depth relation."""

    log: object
    inline: float
    xline: float
    td: object


def build_aligned(cubes, sites, target, dt_ms=0.1):
    """Build one :class:`AlignedDataset` per well.

    Seismic traces at each well are sinc-interpolated and the target curve
    spline-interpolated onto ``t0 + k * dt_ms``, where ``t0`` is the cube
    time origin, over the overlap of the two records. Rows with a null
    target are removed before any resampling.

    Parameters
    ----------
    cubes : sequence of SeismicCube
        Congruent predictor volumes, in predictor order.
    sites : sequence of WellSite
    target : str
        Curve mnemonic to use as the target.
    dt_ms : float
        Output sampling interval in milliseconds.
    """
    cubes = list(cubes)
    ref = check_congruent(cubes)
    if dt_ms <= 0:
        raise ValidationError("dt_ms must be positive")
    t0c = ref.origin[2]
    dtc = ref.dt
    t_end = t0c + (ref.dims[2] - 1) * dtc
    names = [c.name for c in cubes]
    out = {}
    for site in sites:
        log = site.log
        if target not in log.curves:
            raise ValidationError(f"well {log.well_id}: target curve {target!r} not present")
        i, x = ref.trace_index(site.inline, site.xline)
        keep = log.valid_rows([target])
        if keep.sum() < 2:
            raise ValidationError(f"well {log.well_id}: fewer than 2 non-null {target} samples")
        times = depth_to_time(log, site.td)[keep]
        values = log.curves[target][keep]
        lo, hi = max(times[0], t0c), min(times[-1], t_end)
        if hi < lo:
            raise ValidationError(
                f"well {log.well_id}: log time range [{times[0]}, {times[-1]}] ms does not "
                f"overlap seismic range [{t0c}, {t_end}] ms")
        k_lo = int(np.ceil((lo - t0c) / dt_ms - 1e-9))
        k_hi = int(np.floor((hi - t0c) / dt_ms + 1e-9))
        if k_hi < k_lo:
            raise ValidationError(f"well {log.well_id}: overlap shorter than one sample")
        k = np.arange(k_lo, k_hi + 1)
        grid = t0c + k * dt_ms
        ratio = dtc / dt_ms
        if abs(ratio - round(ratio)) < 1e-9:
            # integer ratio: grid points on seismic samples get exact integer positions
            ratio = float(round(ratio))
        pos = k / ratio
        preds = np.column_stack([sinc_interp_index(c.values[i, x, :], pos) for c in cubes])
        tgt = spline_resample(values, times, grid)
        out[log.well_id] = AlignedDataset(log.well_id, grid, preds, names, tgt, target)
    return out

