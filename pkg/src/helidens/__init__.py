"""Density ratios, curvature and bi-Lipschitz checks on meshed minimal surfaces.

The package meshes planes, helicoids and Weierstrass surfaces, estimates
their second fundamental form, computes intrinsic and extrinsic density
ratios, and runs the density-gap obstruction against bi-Lipschitz maps to
helicoid pieces.
"""

from .curvature import (
    BlowUpPair,
    CurvatureField,
    blow_up_scale,
    check_blow_up_pair,
    curvature_decay_constant,
    estimate_curvature,
    mean_curvature_residual,
    quadric_fit,
)
from .errors import (
    BlowUpUnverified,
    CombinatoricsMismatch,
    DegenerateFace,
    DisconnectedMesh,
    EmptyBall,
    GraphicalityNotCertified,
    HelidensError,
    InconsistentOrientation,
    InsufficientNeighborhood,
    MeshError,
    NonInjectiveVertexMap,
    NonManifoldEdge,
    PathDependenceDetected,
    RangeOutsideParent,
    ResolutionTooCoarse,
    SeparationTooSmall,
    SingularIntegrand,
    TargetNotReached,
    TargetOutOfRange,
    ZeroCurvatureAtCenter,
)
from .experiment import (
    ExperimentConfig,
    ObstructionCertificate,
    RadiusSearchResult,
    axis_vertex,
    conformal_helicoid,
    helicoid_rescaling_family,
    lemma_radius_search,
    refinement_check,
    rethreshold,
    run_density_gap,
    sized_helicoid_for_gap,
    validate_family_properties,
)
from .generators import (
    HelicoidSpec,
    WeierstrassSpec,
    extract_annular_multigraph,
    helicoid_A2,
    make_helicoid,
    make_plane_disk,
    parse_expression,
    preset,
    weierstrass_evaluate,
    weierstrass_integrate,
)
from .intrinsic import (
    DensityReport,
    DistanceField,
    certify_graphical,
    extrinsic_density,
    geodesic_distance_field,
    graph_density_check,
    intrinsic_ball_area,
    intrinsic_density,
)
from .lipschitz import (
    LipschitzCorrespondence,
    TransportReport,
    check_density_transport,
    correspondence,
    estimate_bilipschitz,
    face_stretch,
    helicoid_match_point,
)
from .mesh import (
    MeshedSurface,
    TriMesh,
    boundary_loops,
    build_mesh,
    euler_characteristic,
    read_hdmesh,
    subdivide,
    write_hdmesh,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUpPair",
    "BlowUpUnverified",
    "CombinatoricsMismatch",
    "CurvatureField",
    "DegenerateFace",
    "DensityReport",
    "DisconnectedMesh",
    "DistanceField",
    "EmptyBall",
    "ExperimentConfig",
    "GraphicalityNotCertified",
    "HelicoidSpec",
    "HelidensError",
    "InconsistentOrientation",
    "InsufficientNeighborhood",
    "LipschitzCorrespondence",
    "MeshError",
    "MeshedSurface",
    "NonInjectiveVertexMap",
    "NonManifoldEdge",
    "ObstructionCertificate",
    "PathDependenceDetected",
    "RadiusSearchResult",
    "RangeOutsideParent",
    "ResolutionTooCoarse",
    "SeparationTooSmall",
    "SingularIntegrand",
    "TargetNotReached",
    "TargetOutOfRange",
    "TransportReport",
    "TriMesh",
    "WeierstrassSpec",
    "ZeroCurvatureAtCenter",
    "axis_vertex",
    "blow_up_scale",
    "boundary_loops",
    "build_mesh",
    "certify_graphical",
    "check_blow_up_pair",
    "check_density_transport",
    "conformal_helicoid",
    "correspondence",
    "curvature_decay_constant",
    "estimate_bilipschitz",
    "estimate_curvature",
    "euler_characteristic",
    "extract_annular_multigraph",
    "extrinsic_density",
    "face_stretch",
    "geodesic_distance_field",
    "graph_density_check",
    "helicoid_A2",
    "helicoid_match_point",
    "helicoid_rescaling_family",
    "intrinsic_ball_area",
    "intrinsic_density",
    "lemma_radius_search",
    "make_helicoid",
    "make_plane_disk",
    "mean_curvature_residual",
    "parse_expression",
    "preset",
    "quadric_fit",
    "read_hdmesh",
    "refinement_check",
    "rethreshold",
    "run_density_gap",
    "sized_helicoid_for_gap",
    "subdivide",
    "validate_family_properties",
    "weierstrass_evaluate",
    "weierstrass_integrate",
    "write_hdmesh",
]
