"""
Seeded synthetic reservoir: band-limited attribute volumes, well logs whose
sand fraction is a known function of the attributes plus high-frequency
noise, a skewed water saturation with a planted low-saturation lens, and
planar zone tops.

Every quantity is a deterministic function of the spec. Cube values are
rounded to float32 before anything is derived from them, so fields read
back from disk reproduce the in-memory ones exactly.
"""
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import expit

from .dataio import (LAS_NULL, SeismicCube, TimeDepthCurve, WellLogSet, save_cube, write_las,
                     write_td_csv)
from .dataio.resample import sinc_interp_index
from .exceptions import ValidationError
from .modular import ZoneSpec, zone_index

MAPPINGS = ("linear", "saturating", "per-zone")
PREDICTORS = (("impedance", 6000.0, 800.0), ("amplitude", 0.0, 1.0), ("frequency", 30.0, 5.0))
CLASS_CUBES = ("envelope", "sweetness", "decoy")
SW_THRESHOLD = 0.7


@dataclass
class SynthSpec:
    seed: int = 7
    dims: tuple = (24, 24, 100)
    dt_ms: float = 2.0
    origin: tuple = (1000.0, 2000.0, 0.0)
    wells: tuple = (("A", 1006, 2006), ("B", 1017, 2005), ("C", 1007, 2017), ("D", 1016, 2016))
    band_limit_hz: float = 40.0
    lateral_cycles: int = 2
    # planar tops: (time at grid centre, ms per inline, ms per xline)
    zone_tops: tuple = ((70.0, 0.6, -0.4), (130.0, -0.5, 0.5))
    mapping: str = "saturating"
    noise_level: float = 0.06
    noise_band_hz: tuple = (150.0, 600.0)
    minority: float = 0.03
    lens_center_ms: float = 100.0
    lens_width_ms: float = 4.0
    depth_step_m: float = 0.05
    null_rows: int = 5

    def __post_init__(self):
        self.dims = tuple(int(v) for v in self.dims)
        self.origin = tuple(float(v) for v in self.origin)
        self.wells = tuple((str(w), float(i), float(x)) for w, i, x in self.wells)
        self.zone_tops = tuple(tuple(float(v) for v in t) for t in self.zone_tops)
        self.noise_band_hz = tuple(float(v) for v in self.noise_band_hz)
        if len(self.dims) != 3 or min(self.dims) < 4:
            raise ValidationError("dims must be three sizes of at least 4")
        if self.dt_ms <= 0:
            raise ValidationError("dt_ms must be positive")
        nyquist = 500.0 / self.dt_ms
        if not 0 < self.band_limit_hz < nyquist:
            raise ValidationError(f"band limit must lie in (0, {nyquist}) Hz")
        if not 0 < self.minority < 0.5:
            raise ValidationError("minority fraction must lie in (0, 0.5)")
        if self.mapping not in MAPPINGS:
            raise ValidationError(f"mapping must be one of {MAPPINGS}")
        if len(self.wells) < 2:
            raise ValidationError("at least two wells are required")
        if len({w[0] for w in self.wells}) != len(self.wells):
            raise ValidationError("well ids must be unique")
        lo, hi = self.noise_band_hz
        if not 0 < lo < hi:
            raise ValidationError("noise band must satisfy 0 < low < high")
        if self.noise_level < 0 or self.depth_step_m <= 0 or self.null_rows < 0:
            raise ValidationError("noise_level, depth_step_m and null_rows must be non-negative")

    def to_dict(self):
        d = asdict(self)
        return json.loads(json.dumps(d))

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class SynthField:
    """Generated data plus the ground truth needed to check a pipeline."""

    spec: SynthSpec
    cubes: list
    class_cubes: list
    logs: dict
    td: dict
    sites: dict
    zones: ZoneSpec
    lens_mask: SeismicCube
    sf_clean_cube: SeismicCube
    lens_threshold: float
    noise: dict = field(default_factory=dict)

    def well_ids(self):
        return [w[0] for w in self.spec.wells]

    def trace_index(self, well_id):
        i, x = self.sites[well_id]
        return self.cubes[0].trace_index(i, x)

    def predictors_at(self, well_id, times):
        """Attribute values at a well, sinc-interpolated exactly as in alignment."""
        i, x = self.trace_index(well_id)
        c0 = self.cubes[0]
        pos = (np.asarray(times, dtype=float) - c0.origin[2]) / c0.dt
        return np.column_stack([sinc_interp_index(c.values[i, x, :], pos) for c in self.cubes])

    def clean_sf(self, well_id, times):
        times = np.asarray(times, dtype=float)
        zone = zone_index(times, self.zones.for_well(well_id))
        return sf_mapping(self.spec.mapping, _standardize(self.predictors_at(well_id, times)), zone)

    def sf_truth(self, well_id, times):
        """Delivered (noisy) sand fraction as a continuous function of time."""
        return self.clean_sf(well_id, times) + _eval_noise(self.noise[well_id], times)

    def lens_indicator(self, well_id, times):
        i, x = self.trace_index(well_id)
        return _lens(self.spec, np.array([i]), np.array([x]), np.asarray(times, dtype=float))[0, 0]


def _standardize(P):
    return np.column_stack([(P[:, k] - m) / s for k, (_, m, s) in enumerate(PREDICTORS)])


def sf_mapping(mapping, Z, zone=None):
    """Clean sand fraction from standardised predictors ``Z`` (n x 3)."""
    z1, z2, z3 = Z[..., 0], Z[..., 1], Z[..., 2]
    if mapping == "linear":
        return 0.5 + 0.12 * (z1 + 0.6 * z2 - 0.4 * z3)
    if mapping == "saturating":
        return expit(1.2 * z1 + 0.7 * z2 - 0.5 * z3)
    if mapping == "per-zone":
        zone = np.zeros(z1.shape, dtype=int) if zone is None else np.asarray(zone)
        out = np.empty(z1.shape)
        m0, m1, m2 = zone == 0, zone == 1, zone >= 2
        out[m0] = expit(1.6 * z1[m0] + 0.4 * z2[m0])
        out[m1] = 0.5 - 0.35 * np.tanh(1.2 * z1[m1] - 0.5 * z3[m1])
        out[m2] = 0.15 + 0.7 * (1.0 - np.exp(-np.exp(0.9 * z2[m2] - 0.6 * z3[m2])))
        return out
    raise ValidationError(f"unknown mapping {mapping!r}")


def band_limited_field(rng, dims, dt_ms, band_hz, lateral_cycles):
    """Zero-mean, unit-variance random volume whose time spectrum is zero
    above ``band_hz`` and whose lateral spectrum stops at ``lateral_cycles``
    cycles per grid extent."""
    ni, nx, nt = dims
    shape = (ni, nx, nt // 2 + 1)
    coef = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    ki = np.abs(np.fft.fftfreq(ni) * ni)
    kx = np.abs(np.fft.fftfreq(nx) * nx)
    f = np.fft.rfftfreq(nt, d=dt_ms / 1000.0)
    mask = ((ki[:, None, None] <= lateral_cycles) & (kx[None, :, None] <= lateral_cycles)
            & (f[None, None, :] <= band_hz) & (f[None, None, :] > 0))
    vol = np.fft.irfftn(coef * mask, s=dims, axes=(0, 1, 2))
    vol -= vol.mean()
    return vol / vol.std()


def _f32(a):
    return np.asarray(a, dtype=np.float32).astype(float)


def _plane(params, spec, ii, xx):
    t_c, gi, gx = params
    ci, cx = (spec.dims[0] - 1) / 2.0, (spec.dims[1] - 1) / 2.0
    return t_c + gi * (ii - ci) + gx * (xx - cx)


def _lens(spec, ii, xx, t):
    """Lens indicator in [0, 1] on index grids ``ii`` x ``xx`` and times ``t``."""
    ii = np.asarray(ii, dtype=float)[:, None, None]
    xx = np.asarray(xx, dtype=float)[None, :, None]
    ci, cx = (spec.dims[0] - 1) / 2.0, (spec.dims[1] - 1) / 2.0
    # flat top over the central disk holding the wells, Gaussian roll-off outside
    r = np.sqrt((ii - ci) ** 2 + (xx - cx) ** 2)
    r0, s = 0.4 * min(spec.dims[0], spec.dims[1]), 0.12 * min(spec.dims[0], spec.dims[1])
    amp = np.exp(-0.5 * (np.maximum(r - r0, 0.0) / s) ** 2)
    horizon = spec.lens_center_ms + 0.5 * (ii - ci) - 0.4 * (xx - cx)
    return amp * np.exp(-0.5 * ((t[None, None, :] - horizon) / spec.lens_width_ms) ** 2)


def _make_noise(rng, spec, n_terms=256):
    lo, hi = spec.noise_band_hz
    freqs = rng.uniform(lo, hi, n_terms)
    phases = rng.uniform(0, 2 * np.pi, n_terms)
    amp = spec.noise_level * np.sqrt(2.0 / n_terms)
    return {"freqs": freqs, "phases": phases, "amp": amp}


def _eval_noise(noise, times_ms):
    t = np.asarray(times_ms, dtype=float) / 1000.0
    out = np.zeros(t.shape)
    for f, ph in zip(noise["freqs"], noise["phases"]):
        out += np.sin(2 * np.pi * f * t + ph)
    return noise["amp"] * out


def _make_td(rng, spec, t_end):
    """Piecewise-linear time-depth relation with interval velocities of
    1800-2400 m/s, starting at a random datum depth."""
    d0 = 900.0 + float(rng.uniform(0, 100))
    knots_t = np.linspace(0.0, t_end + 20.0, 5)
    v = rng.uniform(1800.0, 2400.0, knots_t.size - 1)
    # two-way time: dt_ms = 2000 * dz / v
    dz = np.diff(knots_t) * v / 2000.0
    depth = d0 + np.concatenate([[0.0], np.cumsum(dz)])
    return TimeDepthCurve(depth, knots_t)


def make_field(spec):
    """Generate a :class:`SynthField` from ``spec``."""
    rng = np.random.default_rng(spec.seed)
    ni, nx, nt = spec.dims
    steps = (1.0, 1.0, spec.dt_ms)
    t = spec.origin[2] + np.arange(nt) * spec.dt_ms
    t_end = t[-1]

    fields = [band_limited_field(rng, spec.dims, spec.dt_ms, spec.band_limit_hz, spec.lateral_cycles)
              for _ in PREDICTORS]
    cubes = [SeismicCube(name, _f32(m + s * f), spec.origin, steps)
             for (name, m, s), f in zip(PREDICTORS, fields)]

    lens = _lens(spec, np.arange(ni), np.arange(nx), t)
    bg = [band_limited_field(rng, spec.dims, spec.dt_ms, spec.band_limit_hz, spec.lateral_cycles)
          for _ in CLASS_CUBES]
    class_vals = {
        "envelope": 1.0 + 0.05 * bg[0] + 2.0 * lens,
        "sweetness": 2.0 + 0.05 * bg[1] + 1.5 * lens ** 2,
        "decoy": 5.0 + 1.0 * bg[2],
    }
    class_cubes = [SeismicCube(n, _f32(class_vals[n]), spec.origin, steps) for n in CLASS_CUBES]

    # well placement and per-well tops
    sites, tops = {}, {}
    for wid, il, xl in spec.wells:
        i, x = cubes[0].trace_index(il, xl)
        if not (0 < i < ni - 1 and 0 < x < nx - 1):
            raise ValidationError(f"well {wid} sits on the survey edge; move it inside")
        sites[wid] = (il, xl)
        tops[wid] = [float(_plane(p, spec, i, x)) for p in spec.zone_tops]
        if not all(t[0] < v < t_end for v in tops[wid]):
            raise ValidationError(f"zone tops at well {wid} fall outside the record")
    zones = ZoneSpec(tops)

    # clean sand fraction volume (zone of each voxel from the planar tops)
    ii, xx = np.meshgrid(np.arange(ni), np.arange(nx), indexing="ij")
    top_planes = np.stack([_plane(p, spec, ii, xx) for p in spec.zone_tops], -1)
    zone_vol = np.sum(t[None, None, :, None] >= top_planes[:, :, None, :], axis=-1)
    Z = np.stack([(c.values - m) / s for c, (_, m, s) in zip(cubes, PREDICTORS)], -1)
    sf_clean_cube = SeismicCube("sf_clean", sf_mapping(spec.mapping, Z, zone_vol), spec.origin, steps)

    fld = SynthField(spec, cubes, class_cubes, {}, {}, sites, zones, None, sf_clean_cube, 0.0)

    # log sampling: depth grid whose times cover (t0, t_end) with a margin
    well_times = {}
    for k, (wid, _, _) in enumerate(spec.wells):
        wrng = np.random.default_rng([spec.seed, k + 1])
        td = _make_td(wrng, spec, t_end)
        d_top = float(td.to_depth(t[0] + 2.0))
        d_bot = float(td.to_depth(t_end - 2.0))
        n = int(np.floor((d_bot - d_top) / spec.depth_step_m)) + 1
        depth = d_top + np.arange(n) * spec.depth_step_m
        fld.td[wid] = td
        fld.noise[wid] = _make_noise(wrng, spec)
        well_times[wid] = (depth, td.to_time(depth))

    # low-saturation threshold on the lens indicator: pooled valid log samples
    pooled = np.concatenate([fld.lens_indicator(w, tw[fld.spec.null_rows:])
                             for w, (_, tw) in well_times.items()])
    tau = float(np.quantile(pooled, 1.0 - spec.minority))
    fld.lens_threshold = tau
    fld.lens_mask = SeismicCube("lens_mask", (lens >= tau).astype(float), spec.origin, steps)

    for wid, (depth, times) in well_times.items():
        sf = fld.sf_truth(wid, times)
        L = fld.lens_indicator(wid, times)
        sw = np.clip(1.0 - (1.0 - SW_THRESHOLD) * (L / tau) ** 2, 0.02, 1.0)
        sf[:spec.null_rows] = LAS_NULL
        sw[:spec.null_rows] = LAS_NULL
        fld.logs[wid] = WellLogSet(wid, depth, {"DEPT": depth, "SF": sf, "SW": sw},
                                   units={"DEPT": "M", "SF": "V/V", "SW": "V/V"})
    return fld


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_field(fld, outdir):
    """Write cubes, LAS files, time-depth CSVs, zone tops, a well table and
    ground-truth volumes under ``outdir``; return the manifest dict (also
    saved as ``manifest.json``)."""
    os.makedirs(os.path.join(outdir, "cubes"), exist_ok=True)
    os.makedirs(os.path.join(outdir, "wells"), exist_ok=True)
    os.makedirs(os.path.join(outdir, "truth"), exist_ok=True)
    files = {}
    for c in fld.cubes + fld.class_cubes:
        rel = f"cubes/{c.name}.lfc"
        save_cube(c, os.path.join(outdir, rel))
        files[f"cube:{c.name}"] = rel
    for c in (fld.lens_mask, fld.sf_clean_cube):
        rel = f"truth/{c.name}.lfc"
        save_cube(c, os.path.join(outdir, rel))
        files[f"truth:{c.name}"] = rel
    rows = []
    for wid in fld.well_ids():
        las_rel, td_rel = f"wells/{wid}.las", f"wells/{wid}_td.csv"
        write_las(fld.logs[wid], os.path.join(outdir, las_rel))
        write_td_csv(fld.td[wid], os.path.join(outdir, td_rel))
        files[f"las:{wid}"] = las_rel
        files[f"td:{wid}"] = td_rel
        il, xl = fld.sites[wid]
        rows.append(f"{wid},{float(il)!r},{float(xl)!r},{las_rel},{td_rel}\n")
    with open(os.path.join(outdir, "wells.csv"), "w") as fh:
        fh.write("well_id,inline,xline,las,td\n")
        fh.writelines(rows)
    files["wells"] = "wells.csv"
    fld.zones.to_csv(os.path.join(outdir, "zones.csv"))
    files["zones"] = "zones.csv"
    manifest = {
        "generator": "lithoflow.synth",
        "seed": fld.spec.seed,
        "spec": fld.spec.to_dict(),
        "lens_threshold": fld.lens_threshold,
        "sw_threshold": SW_THRESHOLD,
        "predictors": [c.name for c in fld.cubes],
        "class_attributes": [c.name for c in fld.class_cubes],
        "files": files,
        "sha256": {k: _sha256(os.path.join(outdir, v)) for k, v in sorted(files.items())},
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return manifest
