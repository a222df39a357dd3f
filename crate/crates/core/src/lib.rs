//! Computational deformation theory of special Lagrangian conifolds.
//!
//! The pipeline runs from link spectra to moduli dimensions:
//!
//! * [`spectra`] — Laplace–Beltrami spectra of link manifolds: round spheres,
//!   flat tori and products in exact rational arithmetic, triangle meshes by
//!   cotangent FEM.
//! * [`weights`] — exceptional weights `gamma` of the cone Laplacian
//!   (`gamma (gamma + m - 2)` a link eigenvalue), their multiplicities and
//!   non-exceptionality tests, with exact quadratic-surd comparisons.
//! * [`topology`] — Betti data of the conifold: simplicial cohomology,
//!   relative variants and restriction ranks over Q.
//! * [`fredholm`] — kernel/cokernel dimensions and index changes of the
//!   weighted Laplacian.
//! * [`moduli`] — stability of SL cones and the dimensions of the moduli
//!   spaces of compact, AC, CS and CS/AC deformations.

pub mod error;
pub mod exact;
pub mod fredholm;
pub mod moduli;
pub mod spectra;
pub mod topology;
pub mod weights;

pub use error::{Error, Result};
pub use exact::{Cutoff, QuadExt, Rat, Scalar};
pub use fredholm::{
    ac_end_harmonic_count, ac_laplacian_dims, cs_laplacian_dims, csac_laplacian_dims,
    index_change, ConeEndSpec, ConifoldModel, EndKind, FredholmReport,
};
pub use moduli::{
    dim_ac, dim_compact, dim_cs, dim_csac, slice_dims, stability_check, ModuliCase,
    ModuliReport, SliceDims, StabilityCounts, StabilityReport,
};
pub use spectra::{
    flat_torus_spectrum, mesh_spectrum, product_spectrum, sphere_spectrum, EigenvalueEntry,
    LatticeGram, LinkSpectrum, TriangleMesh,
};
pub use topology::{
    assemble_topology, betti, conifold_complex_from_json, relative_betti, relative_image_rank,
    restriction_rank, ComplexPair, ConifoldComplex, ConifoldTopology, RestrictionRank,
    SimplicialComplex,
};
pub use weights::{
    check_nonexceptional, exceptional_in_interval, exceptional_set, gamma_pair, gamma_pair_f64,
    multiplicity_in_interval, nearest_exceptional, required_cutoff, ExceptionalSet,
    ExceptionalWitness, GammaValue, NearestExceptional, WeightValue, DEFAULT_MATCH_TOL,
};

/// Round to 12 significant digits; the fixed formatting used for every
/// floating-point number that reaches an output file.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0_f64.copysign(x.signum());
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}
