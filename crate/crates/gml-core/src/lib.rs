//! Cutting theory for Generalized Möbius-Listing bodies: cut enumeration,
//! counting formulas, a planar-arrangement oracle, twisted-body cut
//! simulation and mesh generation.

pub mod arrangement;
pub mod cutmodel;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod gielis;
pub mod gmlcut;
pub mod gmlmesh;
pub mod numtheory;
pub mod report;

pub use arrangement::{
    build_arrangement, circle_diagonal_regions, classify_regions, Anchor, BoundaryKind,
    CircleRegionTally, PlanarArrangement, Region, Segment,
};
pub use cutmodel::{
    count_geometric, count_topological, enumerate_cuts, enumerate_d1_cuts, enumerate_dm_cuts,
    knife_lines, sum_d1_dm, sweep_dm_classes, ClassSignature, CountReport, CutKind, CutSpec,
    Discrepancy, KnifeFamily, KnifeMode, Mode, OffsetClass, SweepConfig, SweepReport,
};
pub use error::{GmlError, Result};
pub use geom::{Line, Point2};
pub use gielis::{gielis_radius, regular_polygon_radius, GielisParams, Sign};
pub use gmlcut::{
    cut_gml, effective_knife_pattern, independent_object_formula, mobius_phenomenon,
    trace_orbits, Component, CutFamily, CutOutcome, GmlSpec, TwistExpr,
};
pub use gmlmesh::{
    build_mesh, export_obj, gml_point, surface_side_trace, CrossSection, GmlParams, Mesh,
    MeshKind, MeshStats,
};
pub use numtheory::{catalan_euler, catalan_segner, coloring_count, divisors};
pub use report::ReportEnvelope;
