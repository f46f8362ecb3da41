"""Persistence landscapes with elastic alignment, amplitude FPCA, and
diagram denoising for samples of point clouds.

Layers (bottom-up): ``simgen`` simulated point-cloud designs; ``persistence``
diagrams (Rips any-dimension, planar Cech); ``landscape`` grid landscapes on a
normalised common domain; ``elastic`` square-root-slope alignment, warps, and
the iterative sample mean; ``fpca`` amplitude principal components;
``analysis`` warp-denoised diagrams and two-group comparison; ``cli`` / ``io``
the command-line pipeline and file formats.
"""
from ._backend import backend_name, thread_count
from .analysis import (
    DenoisedDiagram,
    GroupComparison,
    SpreadResult,
    denoise_sample,
    diagram_spread,
    group_compare,
    transform_diagram,
)
from .elastic import (
    AlignmentResult,
    Warp,
    align_pair,
    center_warps,
    compose_warps,
    elastic_distance,
    inverse_srvf,
    invert_warp,
    karcher_mean,
    srvf,
    warp_action,
    warp_landscape,
)
from .errors import DataError, LandskewError, NumericalError, SizeCapError
from .fpca import (
    AmplitudeCovariance,
    PcaModel,
    amplitude_covariance,
    amplitude_pca,
    pc_path,
    pc_scores,
)
from .landscape import (
    Landscape,
    auto_levels,
    common_domain,
    landscape_from_diagram,
    triangle_function,
)
from .persistence import (
    Filtration,
    PersistenceDiagram,
    cech2d_filtration,
    persistence_deg0,
    persistence_deg1,
    persistence_deg1_cech2d,
    persistence_deg1_rips,
    rips_filtration,
    subsample_cloud,
)
from .simgen import PointCloud, SimConfig, simulate

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    "thread_count",
    "LandskewError",
    "DataError",
    "SizeCapError",
    "NumericalError",
    "PointCloud",
    "SimConfig",
    "simulate",
    "Filtration",
    "PersistenceDiagram",
    "rips_filtration",
    "cech2d_filtration",
    "persistence_deg0",
    "persistence_deg1",
    "persistence_deg1_rips",
    "persistence_deg1_cech2d",
    "subsample_cloud",
    "Landscape",
    "triangle_function",
    "landscape_from_diagram",
    "common_domain",
    "auto_levels",
    "Warp",
    "AlignmentResult",
    "srvf",
    "inverse_srvf",
    "warp_action",
    "warp_landscape",
    "align_pair",
    "elastic_distance",
    "karcher_mean",
    "center_warps",
    "invert_warp",
    "compose_warps",
    "AmplitudeCovariance",
    "PcaModel",
    "amplitude_covariance",
    "amplitude_pca",
    "pc_scores",
    "pc_path",
    "SpreadResult",
    "DenoisedDiagram",
    "GroupComparison",
    "transform_diagram",
    "diagram_spread",
    "denoise_sample",
    "group_compare",
]
