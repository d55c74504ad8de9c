"""
Command-line entry point.

Every pipeline command takes one JSON config. Scalars can be overridden
with ``--set dotted.key=value`` and the seed with ``LITHOFLOW_SEED``.
Each output directory receives a ``manifest.json`` with the resolved
config, its hash, the seed, library versions and a SHA-256 per artifact.
Wall-clock timings go to ``timing.log``, the only non-reproducible file.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
failure.
"""
import argparse
import contextlib
import copy
import csv
import hashlib
import json
import os
import platform
import sys
import time

import numpy as np
import scipy
import sklearn

from . import __version__
from .dataio import WellSite, build_aligned, load_cube, read_las, read_td_csv, save_cube
from .exceptions import ConfigurationError, LithoflowError, ValidationError
from .modular import (ZoneSpec, compare_report, interpolate_tops, predict_volume_mann,
                      train_mann, train_single_ann)
from .neural import TrainConfig, ann_fit_workflow, predict_volume
from .postfilter import FilterSpec
from .regularize import METHODS, regularization_report, regularize, suggest_bandwidth
from .stats import relief_weights, zscore_params
from .svdd import KernelSpec, classify_volume, one_class_workflow, svdd_train, threshold_labels
from .synth import SynthSpec, make_field, write_field

SEED_ENV = "LITHOFLOW_SEED"
AXES = ("inline", "xline", "time")


class StageError(LithoflowError):
    """Wraps a failure with the name of the pipeline stage it came from."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.exit_code = getattr(cause, "exit_code", 3)


@contextlib.contextmanager
def stage(name):
    try:
        yield
    except StageError:
        raise
    except LithoflowError as e:
        raise StageError(name, e) from e
    except OSError as e:
        where = f"{e.strerror}: {e.filename}" if e.filename else str(e)
        raise StageError(name, ValidationError(where)) from e


# -- config -------------------------------------------------------------------

def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg, pairs):
    """Apply ``dotted.key=value`` overrides; values are parsed as JSON
    when possible, else kept as strings."""
    cfg = copy.deepcopy(cfg)
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigurationError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"--set {key}: {p} is not a section")
        node[parts[-1]] = _parse_value(value)
    return cfg


def load_config(path, overrides=None, require_seed=True):
    """Read a JSON config, apply overrides and the seed environment variable,
    and resolve input paths against the config's directory."""
    if path is None:
        cfg = {}
        base = os.getcwd()
    else:
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except FileNotFoundError:
            raise ConfigurationError(f"config file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path}: invalid JSON ({e})")
        base = os.path.dirname(os.path.abspath(path))
    if not isinstance(cfg, dict):
        raise ConfigurationError("config must be a JSON object")
    cfg = apply_overrides(cfg, overrides)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            cfg["seed"] = int(env)
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV} must be an integer, got {env!r}")
    if require_seed and not isinstance(cfg.get("seed"), int):
        raise ConfigurationError("config needs an integer 'seed'")
    inputs = cfg.get("inputs", {})
    for key in ("wells", "zones", "truth_mask"):
        if isinstance(inputs.get(key), str):
            inputs[key] = os.path.normpath(os.path.join(base, inputs[key]))
    if isinstance(inputs.get("cubes"), list):
        inputs["cubes"] = [os.path.normpath(os.path.join(base, p)) for p in inputs["cubes"]]
    return cfg


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def versions():
    return {"lithoflow": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "scikit-learn": sklearn.__version__}


def write_manifest(outdir, command, cfg, outputs):
    manifest = {
        "command": command,
        "config": cfg,
        "config_sha256": config_hash(cfg),
        "seed": cfg.get("seed"),
        "versions": versions(),
        "outputs": {name: _sha256(os.path.join(outdir, name)) for name in sorted(outputs)},
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return manifest


class Timing:
    """Collects wall-clock seconds per step and writes them to ``timing.log``."""

    def __init__(self):
        self.rows = []

    def add(self, label, seconds):
        self.rows.append((label, seconds))

    def write(self, outdir):
        with open(os.path.join(outdir, "timing.log"), "w") as fh:
            for label, s in self.rows:
                fh.write(f"{label}\t{s:.6f}\n")


# -- inputs -------------------------------------------------------------------

def read_well_table(path):
    """Read ``well_id,inline,xline,las,td`` rows; file columns are relative
    to the table's directory."""
    base = os.path.dirname(path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    need = {"well_id", "inline", "xline", "las", "td"}
    if not rows or not need <= set(rows[0]):
        raise ValidationError(f"{path}: expected columns {sorted(need)}")
    sites = []
    for r in rows:
        log = read_las(os.path.join(base, r["las"]), well_id=r["well_id"])
        td = read_td_csv(os.path.join(base, r["td"]))
        sites.append(WellSite(log, float(r["inline"]), float(r["xline"]), td))
    return sites


def _inputs(cfg, need_zones=False):
    inputs = cfg.get("inputs") or {}
    for key in ("wells", "cubes") + (("zones",) if need_zones else ()):
        if not inputs.get(key):
            raise ConfigurationError(f"config is missing inputs.{key}")
    for p in [inputs["wells"], *inputs["cubes"]] + ([inputs["zones"]] if need_zones else []):
        if not os.path.exists(p):
            raise ValidationError(f"input file not found: {p}")
    return inputs


def load_aligned(cfg, target):
    inputs = _inputs(cfg)
    cubes = [load_cube(p) for p in inputs["cubes"]]
    sites = read_well_table(inputs["wells"])
    ds = build_aligned(cubes, sites, target, cfg.get("dt_ms", 0.1))
    return cubes, sites, [ds[s.log.well_id] for s in sites]


def regularize_datasets(datasets, reg):
    """Apply the configured regularizer per well. Returns the new datasets
    and the per-well parameters actually used."""
    method = reg.get("method", "none")
    params = dict(reg.get("params") or {})
    if method not in METHODS:
        raise ConfigurationError(f"unknown regularization method {method!r}; choose from {METHODS}")
    out, used = [], {}
    for d in datasets:
        fs = 1000.0 / d.dt
        p = dict(params)
        if method == "ft" and "xi_max" not in p:
            widen = p.pop("widen", 1.5)
            p["xi_max"] = max(suggest_bandwidth(d.predictors[:, j], fs, widen)
                              for j in range(d.predictors.shape[1]))
        out.append(d.with_target(regularize(d.target, method, fs, **p)))
        used[d.well_id] = p
    return out, used


def train_config(cfg):
    t = dict(cfg.get("train") or {})
    t["seed"] = cfg["seed"]
    try:
        return TrainConfig(**t)
    except TypeError as e:
        raise ConfigurationError(f"train section: {e}")


# -- outputs ------------------------------------------------------------------

def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _r(v):
    return "" if v is None else repr(float(v))


def cube_slice(cube, axis, index):
    """2-D slice of a cube with its two remaining coordinate vectors."""
    if axis not in AXES:
        raise ConfigurationError(f"axis must be one of {AXES}, got {axis!r}")
    a = AXES.index(axis)
    if not 0 <= index < cube.dims[a]:
        raise ValidationError(f"{axis} index {index} outside [0, {cube.dims[a] - 1}]")
    coords = [cube.inlines, cube.xlines, cube.times]
    rows, cols = [coords[k] for k in range(3) if k != a]
    names = [AXES[k] for k in range(3) if k != a]
    return np.take(cube.values, index, axis=a), rows, cols, names


def write_slice(cube, axis, index, path):
    """Write a plot-ready CSV: first row holds the column coordinates, first
    column the row coordinates."""
    mat, rows, cols, names = cube_slice(cube, axis, index)
    with open(path, "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow([f"{names[0]}\\{names[1]}"] + [repr(float(c)) for c in cols])
        for r, vals in zip(rows, mat):
            w.writerow([repr(float(r))] + [repr(float(v)) for v in vals])


def _write_slices(cfg, cubes, outdir, outputs):
    for spec in cfg.get("slices") or []:
        for cube in cubes:
            name = f"slice_{cube.name}_{spec['axis']}_{spec['index']}.csv"
            write_slice(cube, spec["axis"], int(spec["index"]), os.path.join(outdir, name))
            outputs.append(name)


def write_history(hist, path):
    with open(path, "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["iteration", "loss", "accepted"])
        for k, (loss, acc) in enumerate(zip(hist.loss, hist.accepted)):
            w.writerow([k, repr(float(loss)), int(acc)])


def write_info_report(rows, path, predictor_names):
    with open(path, "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["well", "signal", "psd_entropy_bits"] + [f"nmi_{p}" for p in predictor_names])
        for well, rep in rows:
            for lab in rep.target_labels:
                w.writerow([well, lab, repr(rep.entropy[lab])]
                           + [repr(rep.nmi[(p, lab)]) for p in predictor_names])


def _filter_spec(cfg, default_kind):
    f = cfg.get("filter", {"kind": default_kind, "window": 3})
    if f is None:
        return None
    return FilterSpec(f.get("kind", default_kind), int(f.get("window", 3)))


# -- commands -----------------------------------------------------------------

def cmd_synth(cfg, outdir):
    spec_d = {k: v for k, v in cfg.items() if k != "inputs"}
    with stage("synth"):
        try:
            spec = SynthSpec.from_dict(spec_d)
        except TypeError as e:
            raise ConfigurationError(f"synth spec: {e}")
        fld = make_field(spec)
        os.makedirs(outdir, exist_ok=True)
        write_field(fld, outdir)
    return 0


def cmd_predict(cfg, outdir, threads=1):
    os.makedirs(outdir, exist_ok=True)
    timing, outputs = Timing(), []
    target = cfg.get("target", "SF")
    with stage("dataio"):
        cubes, _, datasets = load_aligned(cfg, target)
    reg = cfg.get("regularization") or {"method": "none"}
    with stage("regularize"):
        reg_sets, used = regularize_datasets(datasets, reg)
        rows = []
        for d, r in zip(datasets, reg_sets):
            rows.append((d.well_id, regularization_report(
                d.predictors, d.target, {reg.get("method", "none"): r.target}, 1000.0 / d.dt,
                d.predictor_names)))
        write_info_report(rows, os.path.join(outdir, "regularization.csv"), datasets[0].predictor_names)
        outputs.append("regularization.csv")
    cfg_train = train_config(cfg)
    hidden = (cfg.get("network") or {}).get("hidden", 10)
    common = dict(split=cfg.get("split", 0.7), cfg=cfg_train, hidden=hidden,
                  mode=cfg.get("split_mode", "pooled"), blind_well=cfg.get("blind_well"))
    with stage("train"):
        t0 = time.perf_counter()
        res = ann_fit_workflow(reg_sets, **common)
        timing.add(f"train:{reg.get('method', 'none')}", time.perf_counter() - t0)
        runs = [(reg.get("method", "none"), res)]
        if cfg.get("baseline", True) and reg.get("method", "none") != "none":
            t0 = time.perf_counter()
            runs.append(("none", ann_fit_workflow(datasets, **common)))
            timing.add("train:none", time.perf_counter() - t0)
    res.fitted.config["regularization"] = {"method": reg.get("method", "none"), "per_well": used}
    res.fitted.save(os.path.join(outdir, "model.json"))
    outputs.append("model.json")
    write_history(res.history, os.path.join(outdir, "history.csv"))
    outputs.append("history.csv")
    with open(os.path.join(outdir, "metrics.csv"), "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["well", "cc", "rmse", "aem", "si"])
        for well, m in res.per_well.items():
            w.writerow([well, _r(m.cc), _r(m.rmse), _r(m.aem), _r(m.si)])
        m = res.validation
        w.writerow(["all", _r(m.cc), _r(m.rmse), _r(m.aem), _r(m.si)])
    outputs.append("metrics.csv")
    with open(os.path.join(outdir, "comparison.csv"), "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["regularization", "cc", "rmse", "aem", "si", "n_train", "iterations"])
        for name, r in runs:
            m = r.validation
            w.writerow([name, _r(m.cc), _r(m.rmse), _r(m.aem), _r(m.si), r.n_train, r.history.iterations])
    outputs.append("comparison.csv")
    if cfg.get("volume", True):
        with stage("predict_volume"):
            t0 = time.perf_counter()
            pred = predict_volume(res.fitted, cubes, threads, name="predicted")
            timing.add("predict_volume", time.perf_counter() - t0)
            save_cube(pred, os.path.join(outdir, "predicted.lfc"))
            outputs.append("predicted.lfc")
            vols = [pred]
        fspec = _filter_spec(cfg, "median3d")
        if fspec is not None:
            with stage("postfilter"):
                filt = pred.with_values(fspec.apply(pred.values), "predicted_filtered")
                save_cube(filt, os.path.join(outdir, "predicted_filtered.lfc"))
                outputs.append("predicted_filtered.lfc")
                vols.append(filt)
        _write_slices(cfg, vols, outdir, outputs)
    timing.write(outdir)
    write_manifest(outdir, "predict", cfg, outputs)
    return 0


def cmd_mann(cfg, outdir, threads=1):
    os.makedirs(outdir, exist_ok=True)
    timing, outputs = Timing(), []
    target = cfg.get("target", "SF")
    with stage("dataio"):
        cubes, sites, datasets = load_aligned(cfg, target)
        zones = ZoneSpec.from_csv(_inputs(cfg, need_zones=True)["zones"])
    with stage("regularize"):
        datasets, _ = regularize_datasets(datasets, cfg.get("regularization") or {"method": "none"})
    cfg_train = train_config(cfg)
    hidden = (cfg.get("network") or {}).get("hidden", 4)
    budget = cfg.get("budget", "equal_total")
    ids = [d.well_id for d in datasets]
    blind = cfg.get("blind_wells", "all")
    blind = ids if blind == "all" else ([blind] if isinstance(blind, str) else list(blind))
    for b in blind:
        if b not in ids:
            raise StageError("config", ConfigurationError(f"blind well {b!r} is not among {ids}"))
    results = []
    with stage("train"):
        for b in blind:
            mann = train_mann(datasets, zones, b, cfg_train, hidden, threads)
            ann, secs, work = train_single_ann(datasets, zones, b, cfg_train, hidden, budget)
            results.append({"dataset": datasets[ids.index(b)], "tops": zones.for_well(b), "mann": mann,
                            "ann": ann, "ann_seconds": secs, "ann_work": work})
        report = compare_report(results)
    report.to_csv(os.path.join(outdir, "comparison.csv"))
    report.work_to_csv(os.path.join(outdir, "cost.csv"))
    outputs += ["comparison.csv", "cost.csv"]
    for r in report.seconds:
        timing.add(f"train:{r['well']}:{r['model']}:{r['zone']}", r["seconds"])
    with stage("train_final"):
        final = train_mann(datasets, zones, None, cfg_train, hidden, threads)
        for zid, fitted in final.zones.items():
            fitted.save(os.path.join(outdir, f"model_{zid}.json"))
            outputs.append(f"model_{zid}.json")
            timing.add(f"final:{zid}", final.seconds[zid])
    if cfg.get("volume", True):
        with stage("predict_volume"):
            locs = {s.log.well_id: (s.inline, s.xline) for s in sites}
            surfaces = interpolate_tops(zones, locs, cubes[0])
            pred = predict_volume_mann(final, cubes, surfaces, threads, name="predicted")
            save_cube(pred, os.path.join(outdir, "predicted.lfc"))
            outputs.append("predicted.lfc")
            vols = [pred]
        fspec = _filter_spec(cfg, "movavg")
        if fspec is not None:
            with stage("postfilter"):
                sm = pred.with_values(fspec.apply(pred.values), "predicted_smoothed")
                save_cube(sm, os.path.join(outdir, "predicted_smoothed.lfc"))
                outputs.append("predicted_smoothed.lfc")
                vols.append(sm)
        _write_slices(cfg, vols, outdir, outputs)
    timing.write(outdir)
    write_manifest(outdir, "mann", cfg, outputs)
    return 0


def jaccard(a, b):
    a, b = np.asarray(a, bool), np.asarray(b, bool)
    union = np.sum(a | b)
    return float(np.sum(a & b) / union) if union else 1.0


def cmd_classify(cfg, outdir, threads=1):
    os.makedirs(outdir, exist_ok=True)
    timing, outputs = Timing(), []
    thr = float(cfg.get("threshold", 0.7))
    with stage("dataio"):
        cubes, _, datasets = load_aligned(cfg, cfg.get("target", "SW"))
        names = datasets[0].predictor_names
        X = np.vstack([d.predictors for d in datasets])
        low = np.concatenate([threshold_labels(d.target, thr).is_low for d in datasets])
        if not low.any():
            raise ConfigurationError(f"no minority rows (saturation below {thr}) in any well")
    rcfg = cfg.get("relief") or {}
    with stage("relief"):
        weights = relief_weights(X, low.astype(int), rcfg.get("m"), cfg["seed"])
        order = list(np.argsort(-weights, kind="stable"))
        n_sel = int(rcfg.get("select", len(names)))
        if not 1 <= n_sel <= len(names):
            raise ConfigurationError(f"relief.select must lie in [1, {len(names)}]")
        sel = sorted(order[:n_sel])
    with open(os.path.join(outdir, "relief.csv"), "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["feature", "weight", "rank", "selected"])
        for j, name in enumerate(names):
            w.writerow([name, repr(float(weights[j])), order.index(j) + 1, int(j in sel)])
    outputs.append("relief.csv")
    s = cfg.get("svdd") or {}
    C = float(s.get("C", 0.008))
    kernel = KernelSpec(**(s.get("kernel") or {}))
    rule = s.get("radius_rule", "boundary")
    ids = [d.well_id for d in datasets]
    tests = cfg.get("test_wells", "all")
    tests = ids if tests == "all" else ([tests] if isinstance(tests, str) else list(tests))
    with stage("one_class"):
        results = []
        for tw in tests:
            r = one_class_workflow(datasets, tw, C, kernel, thr, rule, sel)
            results.append(r)
            timing.add(f"svdd:{tw}", r.seconds)
    with open(os.path.join(outdir, "gmetric.csv"), "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["test_well", "g", "g_blind", "tp", "fn", "tn", "fp", "baseline_g", "work"])
        for r in results:
            c = r.counts
            w.writerow([r.test_well, repr(r.g), repr(r.g_blind), c.tp, c.fn, c.tn, c.fp, repr(0.0), r.work])
    outputs.append("gmetric.csv")
    with stage("train_final"):
        norm = zscore_params(X[:, sel])
        t0 = time.perf_counter()
        model = svdd_train(norm.apply(X[low][:, sel]), C, kernel, rule, x_norm=norm,
                           feature_names=[names[j] for j in sel])
        timing.add("svdd:final", time.perf_counter() - t0)
        model.save(os.path.join(outdir, "svdd_model.json"))
        outputs.append("svdd_model.json")
    if cfg.get("volume", True):
        with stage("classify_volume"):
            labels = classify_volume(model, cubes, threads)
            save_cube(labels, os.path.join(outdir, "labels.lfc"))
            outputs.append("labels.lfc")
            mask_path = (cfg.get("inputs") or {}).get("truth_mask")
            if mask_path:
                mask = load_cube(mask_path)
                score = jaccard(labels.values == 0.0, mask.values > 0.5)
                with open(os.path.join(outdir, "mask_agreement.csv"), "w", newline="") as fh:
                    w = _csv_writer(fh)
                    w.writerow(["jaccard"])
                    w.writerow([repr(score)])
                outputs.append("mask_agreement.csv")
        _write_slices(cfg, [labels], outdir, outputs)
    timing.write(outdir)
    write_manifest(outdir, "classify", cfg, outputs)
    return 0


def cmd_report(cfg, outdir):
    """Entropy and NMI of the target under every regularizer, per well."""
    os.makedirs(outdir, exist_ok=True)
    with stage("dataio"):
        _, _, datasets = load_aligned(cfg, cfg.get("target", "SF"))
    rows = []
    methods = cfg.get("methods") or {"ft": {}, "wd": {}, "emd": {}}
    with stage("regularize"):
        variants = {}
        for m, params in methods.items():
            variants[m], _ = regularize_datasets(datasets, {"method": m, "params": params})
        for k, d in enumerate(datasets):
            rows.append((d.well_id, regularization_report(
                d.predictors, d.target, {m: v[k].target for m, v in variants.items()},
                1000.0 / d.dt, d.predictor_names)))
    write_info_report(rows, os.path.join(outdir, "report.csv"), datasets[0].predictor_names)
    write_manifest(outdir, "report", cfg, ["report.csv"])
    return 0


def cmd_filter(args):
    with stage("postfilter"):
        cube = load_cube(args.input)
        spec = FilterSpec(args.kind, args.window)
        save_cube(cube.with_values(spec.apply(cube.values)), args.output)
    return 0


def cmd_slice(args):
    with stage("slice"):
        cube = load_cube(args.cube)
        if args.out:
            write_slice(cube, args.axis, args.index, args.out)
        else:
            mat, rows, cols, names = cube_slice(cube, args.axis, args.index)
            w = _csv_writer(sys.stdout)
            w.writerow([f"{names[0]}\\{names[1]}"] + [repr(float(c)) for c in cols])
            for r, vals in zip(rows, mat):
                w.writerow([repr(float(r))] + [repr(float(v)) for v in vals])
    return 0


# -- argument parsing ---------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="lithoflow", description=__doc__.strip().splitlines()[0])
    p.add_argument("--version", action="version", version=f"lithoflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def pipeline(name, help_, config_required=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=config_required, help="JSON config file")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field (dotted key, JSON value)")
        sp.add_argument("--threads", type=int, default=1, help="cap on worker threads")
        return sp

    pipeline("synth", "generate a synthetic field", config_required=False)
    pipeline("predict", "regularize, train one network and predict a volume")
    pipeline("mann", "zone-wise networks versus one network, leave-one-well-out")
    pipeline("classify", "Relief selection, one-class SVDD and volume labels")
    pipeline("report", "entropy and NMI of the target under each regularizer")

    f = sub.add_parser("filter", help="smooth a cube")
    f.add_argument("input")
    f.add_argument("output")
    f.add_argument("--kind", choices=("median3d", "movavg"), default="median3d")
    f.add_argument("--window", type=int, default=3)

    s = sub.add_parser("slice", help="export a 2-D slice of a cube as CSV")
    s.add_argument("cube")
    s.add_argument("--axis", choices=AXES, required=True)
    s.add_argument("--index", type=int, required=True, help="0-based index along the axis")
    s.add_argument("--out", help="CSV path (default: stdout)")
    return p


def run(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "filter":
        return cmd_filter(args)
    if args.command == "slice":
        return cmd_slice(args)
    if args.threads < 1:
        raise ConfigurationError("--threads must be at least 1")
    with stage("config"):
        cfg = load_config(args.config, args.set, require_seed=args.command != "synth")
    if args.command == "synth":
        return cmd_synth(cfg, args.out)
    if args.command == "report":
        return cmd_report(cfg, args.out)
    fn = {"predict": cmd_predict, "mann": cmd_mann, "classify": cmd_classify}[args.command]
    return fn(cfg, args.out, args.threads)


def main(argv=None):
    try:
        return run(argv)
    except LithoflowError as e:
        print(f"lithoflow: error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
