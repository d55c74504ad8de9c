"""Well logs, seismic volumes and their alignment on a common time grid."""
from .align import AlignedDataset, WellSite, build_aligned, concat
from .cube import SeismicCube, check_congruent, load_cube, save_cube
from .las import LAS_NULL, WellLogSet, parse_las, read_las, serialize_las, write_las
from .resample import (TimeDepthCurve, depth_to_time, read_td_csv, sinc_resample,
                       spline_resample, write_td_csv)

__all__ = [
    "AlignedDataset", "WellSite", "build_aligned", "concat",
    "SeismicCube", "check_congruent", "load_cube", "save_cube",
    "LAS_NULL", "WellLogSet", "parse_las", "read_las", "serialize_las", "write_las",
    "TimeDepthCurve", "depth_to_time", "read_td_csv", "sinc_resample", "spline_resample",
    "write_td_csv",
]
