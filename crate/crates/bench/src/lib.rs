//! Shared inputs for the criterion benchmarks.

use conifold_core::exact::{rat_frac, rat_i64, Rat};
use conifold_core::{ConeEndSpec, ConifoldModel, EndKind, LatticeGram, LinkSpectrum};

/// Harvey–Lawson T^2 Gram matrix (1/3) [2 1; 1 2].
pub fn hl_gram() -> LatticeGram {
    LatticeGram::new(vec![
        vec![rat_frac(2, 3), rat_frac(1, 3)],
        vec![rat_frac(1, 3), rat_frac(2, 3)],
    ])
    .unwrap()
}

pub fn hl_spectrum(cutoff: i64) -> LinkSpectrum {
    conifold_core::flat_torus_spectrum(&hl_gram(), &rat_i64(cutoff)).unwrap()
}

/// The T^2 cone as a CS/AC model with rates (11/5, -1/2).
pub fn hl_cone_model(cutoff: i64) -> ConifoldModel {
    ConifoldModel {
        m: 3,
        ends: vec![
            ConeEndSpec {
                kind: EndKind::Cs,
                spectrum: hl_spectrum(cutoff),
                rate: rat_frac(11, 5),
                sym_dim: Some(2),
            },
            ConeEndSpec {
                kind: EndKind::Ac,
                spectrum: hl_spectrum(cutoff),
                rate: rat_frac(-1, 2),
                sym_dim: None,
            },
        ],
        topology: None,
    }
}

pub fn weight(p: i64, q: i64) -> Rat {
    rat_frac(p, q)
}
