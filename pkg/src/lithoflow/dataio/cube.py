"""
LFCUBE1: a minimal regular-grid volume container.

Layout: one ASCII header line terminated by ``\\n``::

    LFCUBE1 n_inline n_xline n_t dinline dxline dt inline0 xline0 t0 attr_name

followed by ``n_inline * n_xline * n_t`` little-endian float32 values in
inline-major order (time varies fastest).
"""
from dataclasses import dataclass

import numpy as np

from ..exceptions import FormatError, RangeError, ValidationError

MAGIC = "LFCUBE1"


@dataclass
class SeismicCube:
    """One attribute sampled on a regular (inline, xline, time) grid.

    ``values`` has shape ``(n_inline, n_xline, n_t)``; times are in ms.
    """

    name: str
    values: np.ndarray
    origin: tuple = (0.0, 0.0, 0.0)
    steps: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 3:
            raise ValidationError(f"cube {self.name}: values must be 3-D, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError(f"cube {self.name}: values contain NaN or inf")
        self.origin = tuple(float(v) for v in self.origin)
        self.steps = tuple(float(v) for v in self.steps)
        if self.steps[2] <= 0:
            raise ValidationError(f"cube {self.name}: dt must be positive")
        if self.steps[0] == 0 or self.steps[1] == 0:
            raise ValidationError(f"cube {self.name}: inline/xline steps must be nonzero")
        if " " in self.name or not self.name:
            raise ValidationError(f"cube attribute name must be a non-empty token, got {self.name!r}")

    @property
    def dims(self):
        return self.values.shape

    @property
    def dt(self):
        return self.steps[2]

    @property
    def times(self):
        return self.origin[2] + np.arange(self.dims[2]) * self.steps[2]

    @property
    def inlines(self):
        return self.origin[0] + np.arange(self.dims[0]) * self.steps[0]

    @property
    def xlines(self):
        return self.origin[1] + np.arange(self.dims[1]) * self.steps[1]

    def trace_index(self, inline, xline):
        """Grid indices of the trace nearest to survey coordinates (inline, xline)."""
        fi = (inline - self.origin[0]) / self.steps[0]
        fx = (xline - self.origin[1]) / self.steps[1]
        i, x = int(round(fi)), int(round(fx))
        if not (0 <= i < self.dims[0] and 0 <= x < self.dims[1]):
            raise RangeError(
                f"location (inline={inline}, xline={xline}) is outside cube {self.name} "
                f"extent {self.dims[0]}x{self.dims[1]}")
        return i, x

    def trace(self, inline, xline):
        i, x = self.trace_index(inline, xline)
        return self.values[i, x, :].copy()

    def same_grid(self, other):
        return (self.dims == other.dims and np.allclose(self.origin, other.origin)
                and np.allclose(self.steps, other.steps))

    def with_values(self, values, name=None):
        return SeismicCube(name or self.name, values, self.origin, self.steps)


def check_congruent(cubes):
    cubes = list(cubes)
    if not cubes:
        raise ValidationError("at least one cube is required")
    for c in cubes[1:]:
        if not c.same_grid(cubes[0]):
            raise ValidationError(f"cube {c.name} grid differs from cube {cubes[0].name}")
    return cubes[0]


def _header(cube):
    ni, nx, nt = cube.dims
    nums = [repr(float(v)) for v in (*cube.steps, *cube.origin)]
    return f"{MAGIC} {ni} {nx} {nt} {' '.join(nums)} {cube.name}\n"


def cube_to_bytes(cube):
    payload = np.ascontiguousarray(cube.values, dtype="<f4").tobytes()
    return _header(cube).encode("ascii") + payload


def cube_from_bytes(blob):
    nl = blob.find(b"\n")
    if nl < 0:
        raise FormatError("LFCUBE1 header line is not terminated")
    try:
        fields = blob[:nl].decode("ascii").split()
    except UnicodeDecodeError:
        raise FormatError("LFCUBE1 header is not ASCII") from None
    if len(fields) != 11 or fields[0] != MAGIC:
        raise FormatError(f"bad LFCUBE1 header: expected 11 fields starting with {MAGIC}")
    try:
        ni, nx, nt = (int(f) for f in fields[1:4])
        di, dx, dt, i0, x0, t0 = (float(f) for f in fields[4:10])
    except ValueError:
        raise FormatError("non-numeric LFCUBE1 header field") from None
    if min(ni, nx, nt) < 1:
        raise FormatError(f"LFCUBE1 dims must be positive, got {ni}x{nx}x{nt}")
    payload = blob[nl + 1:]
    expected = ni * nx * nt * 4
    if len(payload) != expected:
        raise FormatError(f"LFCUBE1 payload has {len(payload)} bytes, header implies {expected}")
    values = np.frombuffer(payload, dtype="<f4").reshape(ni, nx, nt)
    if not np.all(np.isfinite(values)):
        raise ValidationError("LFCUBE1 payload contains NaN or inf")
    return SeismicCube(fields[10], values.astype(float), (i0, x0, t0), (di, dx, dt))


def save_cube(cube, path):
    with open(path, "wb") as fh:
        fh.write(cube_to_bytes(cube))


def load_cube(path):
    with open(path, "rb") as fh:
        return cube_from_bytes(fh.read())
