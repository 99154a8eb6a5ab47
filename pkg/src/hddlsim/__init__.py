"""Geographic-routing toolkit: unit-disk networks, GPSR, probe-based hole
detection, shape-free hole records and double-landmark forwarding."""

from .geometry import (
    AnnouncementTriangle,
    Segment,
    ShadedRegion,
    angle_between,
    landmark_subregion,
    shaded_contains,
    side_of_line,
    sweep_neighbors,
    triangle_contains,
)
from .gpsr import Path, greedy_step, route_gpsr
from .hddl import Packet, hddl_forward, route_hddl
from .harness import (
    ExperimentConfig,
    RunMetrics,
    bfs_hops,
    emit,
    hagr_detection_cost,
    run_experiment,
)
from .hole_detect import (
    BoundaryLoop,
    DetectionConfig,
    circulate,
    detect,
    detection_pass,
    hole_ratio,
    should_initiate,
)
from .hole_model import (
    CacheEntry,
    HoleRecord,
    announce,
    announcement_depth,
    build_record,
    optimize_alpha,
    representative_segment,
    select_ef,
)
from .netgen import Network, Scenario, carve_hole, gabriel_planarize, generate

__all__ = [
    "AnnouncementTriangle", "Segment", "ShadedRegion", "angle_between",
    "landmark_subregion", "shaded_contains", "side_of_line", "sweep_neighbors",
    "triangle_contains", "Path", "greedy_step", "route_gpsr", "Packet",
    "hddl_forward", "route_hddl", "ExperimentConfig", "RunMetrics", "bfs_hops",
    "emit", "hagr_detection_cost", "run_experiment", "BoundaryLoop",
    "DetectionConfig", "circulate", "detect", "detection_pass", "hole_ratio",
    "should_initiate", "CacheEntry", "HoleRecord", "announce",
    "announcement_depth", "build_record", "optimize_alpha",
    "representative_segment", "select_ef", "Network", "Scenario", "carve_hole",
    "gabriel_planarize", "generate",
]
