import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from lithoflow.dataio import WellSite, build_aligned  # noqa: E402
from lithoflow.synth import SynthSpec, make_field, write_field  # noqa: E402


def sites_of(fld):
    return [WellSite(fld.logs[w], *fld.sites[w], fld.td[w]) for w in fld.well_ids()]


@pytest.fixture(scope="session")
def field():
    return make_field(SynthSpec())


@pytest.fixture(scope="session")
def zoned_field():
    return make_field(SynthSpec(mapping="per-zone"))


@pytest.fixture(scope="session")
def sf_datasets(field):
    ds = build_aligned(field.cubes, sites_of(field), "SF")
    return [ds[w] for w in field.well_ids()]


@pytest.fixture(scope="session")
def sw_datasets(field):
    ds = build_aligned(field.class_cubes, sites_of(field), "SW")
    return [ds[w] for w in field.well_ids()]


@pytest.fixture(scope="session")
def zoned_datasets(zoned_field):
    ds = build_aligned(zoned_field.cubes, sites_of(zoned_field), "SF")
    return [ds[w] for w in zoned_field.well_ids()]


@pytest.fixture(scope="session")
def field_dirs(tmp_path_factory):
    """Both synthetic fields written to disk once per session."""
    root = tmp_path_factory.mktemp("fields")
    write_field(make_field(SynthSpec()), str(root / "field"))
    write_field(make_field(SynthSpec(mapping="per-zone")), str(root / "zoned"))
    return root


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines.items()):
            terminalreporter.write_line(line)
