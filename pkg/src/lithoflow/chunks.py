"""Row-chunked evaluation over stacked volumes."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .dataio import check_congruent
from .exceptions import ValidationError

CHUNK_ROWS = 4096


def apply_in_chunks(fn, X, threads=1, chunk=CHUNK_ROWS):
    """Apply ``fn`` to fixed-size row blocks of ``X`` and concatenate.

    The blocks do not depend on ``threads``, so the result is identical for
    any degree of fan-out.
    """
    chunks = [X[s:s + chunk] for s in range(0, X.shape[0], chunk)]
    if threads <= 1 or len(chunks) <= 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, chunks))
    return np.concatenate(parts) if parts else np.empty(0)


def cube_rows(cubes, names=None):
    """Stack congruent cubes into an ``(n_voxels, n_cubes)`` matrix, ordered
    by ``names`` when given. Returns ``(reference_cube, matrix)``."""
    cubes = list(cubes)
    ref = check_congruent(cubes)
    if names:
        by_name = {c.name: c for c in cubes}
        missing = [n for n in names if n not in by_name]
        if missing:
            raise ValidationError(f"missing predictor cubes: {missing}")
        cubes = [by_name[n] for n in names]
    return ref, np.column_stack([c.values.ravel() for c in cubes])
