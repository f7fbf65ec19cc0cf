"""Area-based equivalence of generic immersed closed plane curves.

The pipeline: sample a curve (curves), certify genericity (curves),
build its face arrangement (arrangement), extract the combinatorial
diagram and its symmetry group (diagram), move densities around and
realize prescribed face areas (forms), and decide equivalence or compute
moduli dimensions (moduli). The cli module exposes all of it as
subcommands.
"""

from .arrangement import (
    Arrangement,
    build_arrangement,
    face_areas,
    integrate_density_over_faces,
    render_svg,
)
from .curves import (
    ClosedCurve,
    DoublePoint,
    GenericityReport,
    Violation,
    check_generic,
    load_curve,
    parse_curve,
    resample,
    save_curve,
    serialize_curve,
    transform_curve,
)
from .diagram import (
    FaceCorrespondence,
    GaussCode,
    SymmetryGroup,
    canonical_code,
    gauss_code,
    isotopy_match,
    symmetry_group,
)
from .errors import (
    FormatError,
    GenericityError,
    InconsistencyError,
    RealizationError,
    ValidationError,
)
from .forms import (
    AffineMap,
    ComposedMap,
    Density,
    GridMap,
    PlanarMap,
    ShearMap,
    compose_maps,
    density_for_curve,
    identity_map,
    load_density,
    load_map,
    make_density,
    moser_interpolation,
    primitive_diffeo,
    pullback,
    realize_area_vector,
    rotation_map,
    sample_map,
    save_density,
    save_map,
    support_defect,
    union_box,
    unit_density,
)
from .moduli import (
    CATALOG,
    CurveSpec,
    Decision,
    LocalSingularityType,
    Surface,
    Verdict,
    Witness,
    decision_report,
    labelled_equivalent,
    moduli_dimension,
    singularity_by_name,
    symplectically_equivalent,
)

__all__ = [
    "Arrangement",
    "build_arrangement",
    "face_areas",
    "integrate_density_over_faces",
    "render_svg",
    "ClosedCurve",
    "DoublePoint",
    "GenericityReport",
    "Violation",
    "check_generic",
    "load_curve",
    "parse_curve",
    "resample",
    "save_curve",
    "serialize_curve",
    "transform_curve",
    "FaceCorrespondence",
    "GaussCode",
    "SymmetryGroup",
    "canonical_code",
    "gauss_code",
    "isotopy_match",
    "symmetry_group",
    "FormatError",
    "GenericityError",
    "InconsistencyError",
    "RealizationError",
    "ValidationError",
    "AffineMap",
    "ComposedMap",
    "Density",
    "GridMap",
    "PlanarMap",
    "ShearMap",
    "compose_maps",
    "density_for_curve",
    "identity_map",
    "load_density",
    "load_map",
    "make_density",
    "moser_interpolation",
    "primitive_diffeo",
    "pullback",
    "realize_area_vector",
    "rotation_map",
    "sample_map",
    "save_density",
    "save_map",
    "support_defect",
    "union_box",
    "unit_density",
    "CATALOG",
    "CurveSpec",
    "Decision",
    "LocalSingularityType",
    "Surface",
    "Verdict",
    "Witness",
    "decision_report",
    "labelled_equivalent",
    "moduli_dimension",
    "singularity_by_name",
    "symplectically_equivalent",
]

__version__ = "0.1.0"
