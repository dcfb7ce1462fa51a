//! Canonical dual windows by finite sections of the adjoint-lattice Gram
//! matrix, plus the truncated-SVD coefficient solver on the frame lattice.

mod gram;
mod section;
mod tsvd;

pub use gram::{
    analyze, build_adjoint_gram, build_frame_gram, build_gram, synthesize, AtomStep, GramOperator, LatticeKind,
    SectionIndex, EDGE_MASS_TOL,
};
pub use section::{
    convergence_study, finite_section_dual, finite_section_solve, frame_coefficients, reconstruct, wexler_raz_residual,
    zero_correlation, ConvergenceRow, SectionDual, SigmaVector, PIVOT_FLOOR, STUDY_WR_RADIUS,
};
pub use tsvd::{random_span_signal, tsvd_solve, TsvdConfig, TsvdDiagnostics, TsvdSolution};
