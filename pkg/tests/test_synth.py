import json
import os

import numpy as np
import pytest

from lithoflow import ValidationError
from lithoflow.dataio import LAS_NULL, load_cube, read_las
from lithoflow.modular import ZoneSpec
from lithoflow.stats import nmi, psd
from lithoflow.synth import (PREDICTORS, SW_THRESHOLD, SynthSpec, band_limited_field, make_field,
                             sf_mapping)


def valid(log, name):
    v = log.curves[name]
    return v[v != LAS_NULL]


def test_deterministic():
    small = SynthSpec(dims=(12, 12, 60), wells=(("A", 1003, 2003), ("B", 1008, 2007)),
                      zone_tops=((40.0, 0.3, 0.1), (80.0, 0.0, 0.2)), lens_center_ms=60.0)
    a, b = make_field(small), make_field(small)
    for ca, cb in zip(a.cubes + a.class_cubes, b.cubes + b.class_cubes):
        np.testing.assert_array_equal(ca.values, cb.values)
    for w in a.well_ids():
        for name in ("SF", "SW"):
            np.testing.assert_array_equal(a.logs[w].curves[name], b.logs[w].curves[name])
    assert a.zones.tops == b.zones.tops
    c = make_field(SynthSpec(**{**small.to_dict(), "seed": 8}))
    assert not np.array_equal(a.cubes[0].values, c.cubes[0].values)


def test_minority_fraction(field):
    sw = np.concatenate([valid(field.logs[w], "SW") for w in field.well_ids()])
    frac = np.mean(sw < SW_THRESHOLD)
    assert 0.025 <= frac <= 0.035


def test_nmi_clean_above_noisy(sf_datasets, field):
    for d in sf_datasets:
        clean = field.clean_sf(d.well_id, d.time)
        for j in range(d.predictors.shape[1]):
            assert nmi(d.predictors[:, j], clean) > nmi(d.predictors[:, j], d.target)


def test_clean_target_recoverable(field):
    """The clean volume is the mapping of the predictor volumes, exactly."""
    Z = np.stack([(c.values - m) / s for c, (_, m, s) in zip(field.cubes, PREDICTORS)], -1)
    np.testing.assert_array_equal(field.sf_clean_cube.values, sf_mapping("saturating", Z))


def test_per_zone_mappings_differ(zoned_field):
    Z = np.random.default_rng(0).normal(size=(200, 3))
    outs = [sf_mapping("per-zone", Z, np.full(200, k)) for k in range(3)]
    assert all(np.all((o > 0) & (o < 1)) for o in outs)
    assert np.corrcoef(outs[0], outs[1])[0, 1] < 0.5
    assert zoned_field.zones.n_zones == 3


def test_predictor_psd_band_limited(field):
    fs = 1000.0 / field.spec.dt_ms
    for cube in field.cubes:
        for trace in cube.values.reshape(-1, cube.dims[2])[::37]:
            f, p = psd(trace - trace.mean(), fs)
            assert p[f > field.spec.band_limit_hz].sum() <= 1e-6


def test_band_limited_field_moments():
    v = band_limited_field(np.random.default_rng(0), (8, 8, 64), 2.0, 50.0, 2)
    assert abs(v.mean()) < 1e-12 and abs(v.std() - 1) < 1e-12


def test_logs_carry_nulls_and_noise(field):
    for w in field.well_ids():
        log = field.logs[w]
        assert np.all(log.curves["SF"][:field.spec.null_rows] == LAS_NULL)
        sf = valid(log, "SF")
        t = field.td[w].to_time(log.depth[field.spec.null_rows:])
        resid = sf - field.clean_sf(w, t)
        assert 0.5 * field.spec.noise_level < resid.std() < 2 * field.spec.noise_level


@pytest.mark.parametrize("kw", [{"minority": 0.5}, {"minority": 0}, {"band_limit_hz": 250.0},
                                {"mapping": "cubic"}, {"dims": (3, 10, 10)},
                                {"wells": (("A", 1005, 2005),)},
                                {"wells": (("A", 1005, 2005), ("A", 1006, 2006))},
                                {"noise_band_hz": (300.0, 100.0)}])
def test_spec_validation(kw):
    with pytest.raises(ValidationError):
        SynthSpec(**kw)


def test_edge_well_rejected():
    with pytest.raises(ValidationError, match="edge"):
        make_field(SynthSpec(wells=(("A", 1000, 2005), ("B", 1010, 2010))))


def test_tops_outside_record_rejected():
    with pytest.raises(ValidationError, match="outside"):
        make_field(SynthSpec(zone_tops=((70.0, 0.0, 0.0), (500.0, 0.0, 0.0))))


def test_spec_roundtrip():
    s = SynthSpec(mapping="per-zone")
    assert SynthSpec.from_dict(json.loads(json.dumps(s.to_dict()))) == s


def test_written_field(field, field_dirs):
    root = str(field_dirs / "field")
    with open(os.path.join(root, "manifest.json")) as fh:
        man = json.load(fh)
    assert man["seed"] == field.spec.seed
    for rel in man["files"].values():
        assert os.path.exists(os.path.join(root, rel))
    for c in field.cubes + field.class_cubes:
        np.testing.assert_array_equal(load_cube(os.path.join(root, "cubes", c.name + ".lfc")).values,
                                      c.values)
    np.testing.assert_array_equal(load_cube(os.path.join(root, "truth", "lens_mask.lfc")).values,
                                  field.lens_mask.values)
    las = read_las(os.path.join(root, "wells", "A.las"))
    np.testing.assert_array_equal(las.curves["SW"], field.logs["A"].curves["SW"])
    assert ZoneSpec.from_csv(os.path.join(root, "zones.csv")).tops == field.zones.tops
    header = open(os.path.join(root, "wells.csv")).readline().strip()
    assert header == "well_id,inline,xline,las,td"
