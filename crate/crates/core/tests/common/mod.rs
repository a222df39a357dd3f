//! Shared fixtures and independent oracles for the integration suites.
//!
//! Oracles here never call the library path they are used to check.

use conifold_core::exact::{rat_frac, rat_i64, Rat};
use conifold_core::{LatticeGram, LinkSpectrum, SimplicialComplex};
use num_traits::Zero;
use std::collections::HashMap;

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

pub fn square_gram() -> LatticeGram {
    LatticeGram::new(vec![
        vec![rat_i64(1), rat_i64(0)],
        vec![rat_i64(0), rat_i64(1)],
    ])
    .unwrap()
}

/// Brute-force count of degree-k harmonic polynomials on R^m: kernel of the
/// Laplacian on monomial coefficients, by exact fraction-free elimination.
#[allow(clippy::needless_range_loop)]
pub fn harmonic_dim_brute(m: usize, k: usize) -> u64 {
    fn monomials(m: usize, k: usize) -> Vec<Vec<usize>> {
        if m == 1 {
            return vec![vec![k]];
        }
        let mut out = Vec::new();
        for first in 0..=k {
            for mut rest in monomials(m - 1, k - first) {
                let mut mono = vec![first];
                mono.append(&mut rest);
                out.push(mono);
            }
        }
        out
    }
    let top = monomials(m, k);
    if k < 2 {
        return top.len() as u64;
    }
    let low = monomials(m, k - 2);
    let index: HashMap<Vec<usize>, usize> = low
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, mono)| (mono, i))
        .collect();
    let mut mat: Vec<Vec<Rat>> = vec![vec![Rat::zero(); top.len()]; low.len()];
    for (c, mono) in top.iter().enumerate() {
        for i in 0..m {
            if mono[i] >= 2 {
                let mut target = mono.clone();
                target[i] -= 2;
                mat[index[&target]][c] += rat_i64((mono[i] * (mono[i] - 1)) as i64);
            }
        }
    }
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..top.len() {
        if row >= low.len() {
            break;
        }
        let Some(p) = (row..low.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(p, row);
        for r in row + 1..low.len() {
            if !mat[r][col].is_zero() {
                let f = &mat[r][col] / &mat[row][col];
                for c2 in col..top.len() {
                    let sub = &f * &mat[row][c2];
                    mat[r][c2] -= sub;
                }
            }
        }
        rank += 1;
        row += 1;
    }
    (top.len() - rank) as u64
}

// --- simplicial fixtures -------------------------------------------------

pub fn circle_facets(base: usize) -> Vec<Vec<usize>> {
    vec![
        vec![base, base + 1],
        vec![base + 1, base + 2],
        vec![base, base + 2],
    ]
}

pub fn circle(base: usize, n_vertices: usize) -> SimplicialComplex {
    SimplicialComplex::from_facets(n_vertices, &circle_facets(base)).unwrap()
}

/// Cylinder over a triangle: boundary circles 0,1,2 and 3,4,5.
pub fn cylinder() -> SimplicialComplex {
    SimplicialComplex::from_facets(
        6,
        &[
            vec![0, 1, 4],
            vec![0, 4, 3],
            vec![1, 2, 5],
            vec![1, 5, 4],
            vec![2, 0, 3],
            vec![2, 3, 5],
        ],
    )
    .unwrap()
}

/// 7-vertex triangulated torus (14 facets, complete 1-skeleton).
pub fn torus7_facets() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![0, 1, 3],
        vec![0, 2, 4],
        vec![0, 3, 5],
        vec![0, 4, 6],
        vec![0, 5, 6],
        vec![1, 2, 5],
        vec![1, 3, 6],
        vec![1, 4, 5],
        vec![1, 4, 6],
        vec![2, 3, 4],
        vec![2, 3, 6],
        vec![2, 5, 6],
        vec![3, 4, 5],
    ]
}

pub fn torus7() -> SimplicialComplex {
    SimplicialComplex::from_facets(7, &torus7_facets()).unwrap()
}

pub fn disk() -> SimplicialComplex {
    SimplicialComplex::from_facets(4, &[vec![0, 1, 2], vec![0, 2, 3], vec![0, 1, 3]]).unwrap()
}

pub fn disk_boundary() -> SimplicialComplex {
    circle(1, 4)
}

pub fn torus_minus_disk() -> (SimplicialComplex, SimplicialComplex) {
    let mut facets = torus7_facets();
    let removed = facets.pop().unwrap();
    let ambient = SimplicialComplex::from_facets(7, &facets).unwrap();
    let rim = SimplicialComplex::from_facets(
        7,
        &[
            vec![removed[0], removed[1]],
            vec![removed[1], removed[2]],
            vec![removed[0], removed[2]],
        ],
    )
    .unwrap();
    (ambient, rim)
}
