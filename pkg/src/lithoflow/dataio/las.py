"""
Reader and writer for the unwrapped LAS 2.0 subset.

Only what a depth-indexed curve table needs is honoured: the ``~Version``
WRAP flag, ``NULL`` from ``~Well``, the ordered ``~Curve`` mnemonics and
the ``~ASCII`` block. ``~Parameter`` and ``~Other`` are read and ignored.
"""
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ParseError, ValidationError

LAS_NULL = -999.25

_SECTION_NAMES = {"V": "~Version", "W": "~Well", "C": "~Curve", "P": "~Parameter",
                  "O": "~Other", "A": "~ASCII"}
_MANDATORY = ("V", "W", "C", "A")


@dataclass
class WellLogSet:
    """Depth-indexed curves of one well.

    ``curves`` holds every ``~Curve`` entry in file order, the depth curve
    included; missing samples keep the ``null_value`` sentinel.
    """

    well_id: str
    depth: np.ndarray
    curves: dict
    null_value: float = LAS_NULL
    units: dict = field(default_factory=dict)

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=float)
        if self.depth.ndim != 1 or self.depth.size == 0:
            raise ValidationError(f"well {self.well_id}: depth must be a non-empty vector")
        if not np.all(np.isfinite(self.depth)):
            raise ValidationError(f"well {self.well_id}: depth contains non-finite values")
        if self.depth.size > 1 and not np.all(np.diff(self.depth) > 0):
            raise ValidationError(f"well {self.well_id}: depth is not strictly increasing")
        curves = {}
        for name, values in self.curves.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != self.depth.shape:
                raise ValidationError(
                    f"well {self.well_id}: curve {name} has {arr.size} samples, depth has {self.depth.size}")
            ok = np.isfinite(arr) | (arr == self.null_value)
            if not np.all(ok):
                raise ValidationError(f"well {self.well_id}: curve {name} has non-finite samples")
            curves[name] = arr
        self.curves = curves

    @property
    def mnemonics(self):
        return list(self.curves)

    def is_null(self, name):
        return self.curves[name] == self.null_value

    def valid_rows(self, names):
        """Boolean mask of rows where none of ``names`` is null."""
        mask = np.ones(self.depth.size, dtype=bool)
        for name in names:
            if name not in self.curves:
                raise ValidationError(f"well {self.well_id}: curve {name!r} not present")
            mask &= ~self.is_null(name)
        return mask


def _split_item(line, lineno):
    # MNEM.UNIT  DATA : DESCRIPTION
    if "." not in line:
        raise ParseError(f"line {lineno}: header item without '.' delimiter: {line.strip()!r}")
    mnem, rest = line.split(".", 1)
    if rest.startswith((" ", "\t")) or not rest:
        unit, rest = "", rest
    else:
        parts = rest.split(None, 1)
        unit = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if ":" in unit:
            unit, tail = unit.split(":", 1)
            rest = ":" + tail + (" " + rest if rest else "")
    if ":" in rest:
        data, descr = rest.rsplit(":", 1)
    else:
        data, descr = rest, ""
    return mnem.strip(), unit.strip(), data.strip(), descr.strip()


def parse_las(text, well_id=None):
    """Parse LAS 2.0 text into a :class:`WellLogSet`.

    Parameters
    ----------
    text : str or iterable of str
        File contents.
    well_id : str, optional
        Overrides the ``WELL`` item of the ``~Well`` section.
    """
    lines = text.splitlines() if isinstance(text, str) else [ln.rstrip("\n") for ln in text]
    sections = {}
    current = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("~"):
            key = line[1:2].upper()
            if key not in _SECTION_NAMES:
                raise ParseError(f"line {lineno}: unknown section {line.split()[0]!r}")
            if key in sections:
                raise ParseError(f"line {lineno}: duplicate section {_SECTION_NAMES[key]}")
            sections[key] = []
            current = key
            continue
        if current is None:
            raise ParseError(f"line {lineno}: content before the first section")
        sections[current].append((lineno, raw))

    for key in _MANDATORY:
        if key not in sections:
            raise ParseError(f"missing section {_SECTION_NAMES[key]}")

    version = {}
    for lineno, raw in sections["V"]:
        mnem, _, data, _ = _split_item(raw, lineno)
        version[mnem.upper()] = data
    if version.get("WRAP", "NO").upper().startswith("Y"):
        raise ParseError("wrapped LAS (WRAP. YES) is not supported; rewrite the file unwrapped")

    well = {}
    for lineno, raw in sections["W"]:
        mnem, unit, data, descr = _split_item(raw, lineno)
        well[mnem.upper()] = data if data else descr
    null_value = LAS_NULL
    if well.get("NULL"):
        try:
            null_value = float(well["NULL"])
        except ValueError:
            raise ParseError(f"NULL value {well['NULL']!r} is not numeric") from None

    names, units = [], {}
    for lineno, raw in sections["C"]:
        mnem, unit, _, _ = _split_item(raw, lineno)
        if not mnem:
            raise ParseError(f"line {lineno}: empty curve mnemonic")
        if mnem in units:
            raise ParseError(f"line {lineno}: duplicate curve mnemonic {mnem!r}")
        names.append(mnem)
        units[mnem] = unit
    if not names:
        raise ParseError("section ~Curve declares no curves")

    rows = []
    for lineno, raw in sections["A"]:
        tokens = raw.split()
        if len(tokens) != len(names):
            raise ParseError(
                f"line {lineno}: expected {len(names)} columns, found {len(tokens)}")
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric value in data row") from None
    if not rows:
        raise ParseError("section ~ASCII contains no data rows")

    data = np.array(rows, dtype=float)
    depth = data[:, 0]
    if np.any(depth == null_value):
        raise ValidationError("depth column contains null values")
    if depth.size > 1 and np.all(np.diff(depth) < 0):
        data = data[::-1]
        depth = data[:, 0]
    curves = {name: data[:, i].copy() for i, name in enumerate(names)}
    wid = well_id if well_id is not None else (well.get("WELL") or "UNKNOWN")
    return WellLogSet(well_id=wid, depth=depth.copy(), curves=curves,
                      null_value=null_value, units=units)


def read_las(path, well_id=None):
    with open(path, encoding="utf-8", errors="replace") as fh:
        return parse_las(fh.read(), well_id=well_id)


def _fmt(v):
    return repr(float(v))


def serialize_las(log):
    """Render ``log`` as unwrapped LAS 2.0 text; values are written with
    ``repr`` so parsing the result reproduces every sample exactly."""
    names = log.mnemonics
    curves = dict(log.curves)
    units = dict(log.units)
    if not names or not np.array_equal(curves[names[0]], log.depth):
        names = ["DEPT"] + [n for n in names if n != "DEPT"]
        curves["DEPT"] = log.depth
        units.setdefault("DEPT", "M")
    step = np.diff(log.depth)
    regular = step.size > 0 and np.allclose(step, step[0], rtol=0, atol=1e-12)
    out = [
        "~Version Information",
        " VERS.   2.0 : CWLS LOG ASCII STANDARD - VERSION 2.0",
        " WRAP.   NO  : ONE LINE PER DEPTH STEP",
        "~Well Information",
        f" STRT.M  {_fmt(log.depth[0])} : START DEPTH",
        f" STOP.M  {_fmt(log.depth[-1])} : STOP DEPTH",
        f" STEP.M  {_fmt(step[0]) if regular else '0.0'} : STEP",
        f" NULL.   {_fmt(log.null_value)} : NULL VALUE",
        f" WELL.   {log.well_id} : WELL",
        "~Curve Information",
    ]
    for i, name in enumerate(names):
        out.append(f" {name}.{units.get(name, '')}  : {i + 1}")
    out.append("~ASCII " + " ".join(names))
    cols = [curves[n] for n in names]
    for k in range(log.depth.size):
        out.append(" ".join(_fmt(c[k]) for c in cols))
    return "\n".join(out) + "\n"


def write_las(log, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_las(log))
