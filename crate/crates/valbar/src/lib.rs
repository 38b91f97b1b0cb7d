//! Exact linear algebra and cohomology for network sheaves over truncated
//! discrete valuation rings.
//!
//! The crate computes arithmetic barcodes — torsion exponents of the first
//! cohomology of a weighted-graph sheaf — at a fixed finite precision, by two
//! independent routes (Smith normal form and digit-level connecting maps),
//! together with saturation projectors, cycle-holonomy shortcuts, stability
//! diagnostics, and an analysis harness for quantized clock-synchronization
//! networks.

pub mod cohomology;
pub mod consensus;
pub mod digits;
pub mod doc;
pub mod error;
mod fp;
pub mod graph;
pub mod holonomy;
pub mod matrix;
pub mod report;
pub mod ring;
pub mod sheaf;
pub mod snf;

pub use cohomology::{
    cohomology_summary, in_saturation, projectors, reduction_commutes_check,
    saturation_quotient, CohomologySummary, ProjectorTriple,
};
pub use consensus::{
    anisotropy_report, build_clock_sheaf, build_vector_sheaf, detection_report,
    ClockNetwork, ClockSheafBuild, CycleAnisotropy, CycleDetection,
    DetectionReport, Ratio,
};
pub use digits::{
    barcode_from_digits, barcode_from_snf, bockstein_rank, digit_profile,
    digit_rank, digit_rank_with_kernel, exponents_from_digits, lifting_check,
    stability_check, Barcode, DigitProfile, LiftReport, StabilityReport,
};
pub use doc::{
    parse_matrix_document, parse_sheaf_document, serialize_document, EdgeSpec,
    Entry, MatrixDocument, RestrictionSpec, RingKindSpec, RingSpec,
    SheafDocument, VertexSpec,
};
pub use error::{Error, Result};
pub use graph::{Cycle, Edge, Graph, Orientation, SpanningForest};
pub use holonomy::{
    bar_from_holonomy, blockwise_barcode, cycle_holonomy_rank1,
    cycle_torsion_block, fundamental_cycle_basis, matrix_holonomy, CycleBar,
    CycleBasis,
};
pub use matrix::DvrMatrix;
pub use report::{
    analyze_matrix, analyze_sheaf, render_text, AnalyzeOptions, BarcodeReport,
    BarcodeSummary, CycleRow, DigitProfileSummary, RouteBarcodes, SelfCheck,
};
pub use ring::{DvrElement, Ring, RingKind, UnitDecomposition, Valuation};
pub use sheaf::NetworkSheaf;
pub use snf::{
    det_valuation, determinantal_valuations, smith_normal_form, CokernelStructure,
    SnfResult,
};
