"""Body segment volumes from a front and a back depth view."""

from ._bsv import (
    Error,
    GeometryError,
    Mesh,
    SolverError,
    __version__,
    accuracy,
    extract_segment,
    fill_holes,
    is_watertight,
    label_color,
    make_box_subject,
    make_box_template,
    make_humanoid,
    make_humanoid_template,
    make_icosphere,
    read_mesh,
    register_mesh,
    rme,
    run_end_to_end,
    run_seed,
    rve,
    segment_names,
    signed_volume,
    statistical_outlier_removal,
    surface_area,
    write_mesh,
)

BOX1_SIZE = (0.52, 0.558, 0.589)
BOX2_SIZE = (0.208, 1.038, 0.204)

__all__ = [
    "BOX1_SIZE",
    "BOX2_SIZE",
    "Error",
    "GeometryError",
    "Mesh",
    "SolverError",
    "__version__",
    "accuracy",
    "extract_segment",
    "fill_holes",
    "is_watertight",
    "label_color",
    "make_box_subject",
    "make_box_template",
    "make_humanoid",
    "make_humanoid_template",
    "make_icosphere",
    "read_mesh",
    "register_mesh",
    "rme",
    "run_end_to_end",
    "run_seed",
    "rve",
    "segment_names",
    "signed_volume",
    "statistical_outlier_removal",
    "surface_area",
    "write_mesh",
]
