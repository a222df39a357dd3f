//! Laplace–Beltrami spectra of link manifolds.
//!
//! Analytic families (round spheres, flat tori, products) are computed in
//! exact rational arithmetic; triangle-mesh surfaces go through the cotangent
//! finite-element discretization in [`mesh`].

pub mod eigen;
pub mod mesh;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{rat_i64, Cutoff, Rat, Scalar};

/// One eigenvalue with its multiplicity.
#[derive(Clone, Debug)]
pub struct EigenvalueEntry {
    pub value: Scalar,
    pub multiplicity: u64,
}

impl Serialize for EigenvalueEntry {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.value, self.multiplicity).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for EigenvalueEntry {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let (value, multiplicity) = <(Scalar, u64)>::deserialize(de)?;
        Ok(EigenvalueEntry {
            value,
            multiplicity,
        })
    }
}

/// The spectrum of the Laplacian on one link component, complete up to
/// `cutoff`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkSpectrum {
    pub dim_link: u32,
    pub connected: bool,
    pub cutoff: Cutoff,
    pub entries: Vec<EigenvalueEntry>,
}

impl LinkSpectrum {
    /// The spectrum of a point: one zero eigenvalue, complete everywhere.
    pub fn trivial() -> Self {
        LinkSpectrum {
            dim_link: 0,
            connected: true,
            cutoff: Cutoff::Unbounded,
            entries: vec![EigenvalueEntry {
                value: Scalar::zero(),
                multiplicity: 1,
            }],
        }
    }

    /// Every entry is exact.
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.value.is_exact())
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Structural("spectrum has no entries".into()));
        }
        let zero = Scalar::zero();
        if self.entries[0].value.cmp_scalar(&zero) != Ordering::Equal {
            return Err(Error::Structural(
                "spectrum must start with eigenvalue 0".into(),
            ));
        }
        if self.connected && self.entries[0].multiplicity != 1 {
            return Err(Error::Structural(
                "connected link must have a simple zero eigenvalue".into(),
            ));
        }
        for e in &self.entries {
            if e.multiplicity == 0 {
                return Err(Error::Structural("zero multiplicity entry".into()));
            }
            if e.value.to_f64() < 0.0 {
                return Err(Error::Structural("negative eigenvalue".into()));
            }
            if !self.cutoff.covers(&e.value) {
                return Err(Error::Structural(format!(
                    "entry {} exceeds the declared cutoff {}",
                    e.value.display_string(),
                    self.cutoff.display_string()
                )));
            }
        }
        for w in self.entries.windows(2) {
            if w[0].value.cmp_scalar(&w[1].value) != Ordering::Less {
                return Err(Error::Structural(
                    "entries must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Multiplicity of the eigenvalue `k(k+m-2)` on the round unit sphere
/// `S^{m-1}`: the dimension of degree-`k` harmonic polynomials on `R^m`.
pub fn sphere_multiplicity(m: u32, k: u64) -> Result<u64> {
    let m = m as u64;
    let full = binomial(m - 1 + k, k);
    let lower = if k >= 2 {
        binomial(m - 3 + k, k - 2)
    } else {
        BigUint::zero()
    };
    (full - lower)
        .to_u64()
        .ok_or_else(|| Error::Domain("sphere multiplicity overflows u64".into()))
}

/// Spectrum of the round unit sphere `S^{m-1}`: eigenvalues `k(k+m-2)`.
pub fn sphere_spectrum(m: u32, cutoff: &Rat) -> Result<LinkSpectrum> {
    if m < 3 {
        return Err(Error::Domain(format!("sphere link needs m >= 3, got {m}")));
    }
    if cutoff.is_negative() {
        return Err(Error::Domain("cutoff must be nonnegative".into()));
    }
    let mut entries = Vec::new();
    let mut k: u64 = 0;
    loop {
        let e = rat_i64(k as i64) * rat_i64(k as i64 + m as i64 - 2);
        if &e > cutoff {
            break;
        }
        entries.push(EigenvalueEntry {
            value: Scalar::Exact(e),
            multiplicity: sphere_multiplicity(m, k)?,
        });
        k += 1;
    }
    Ok(LinkSpectrum {
        dim_link: m - 1,
        connected: true,
        cutoff: Cutoff::exact(cutoff.clone()),
        entries,
    })
}

/// Positive-definite rational Gram matrix: the metric of the flat torus
/// `R^n / 2*pi*Z^n` in angle coordinates.
#[derive(Clone, Debug)]
pub struct LatticeGram {
    entries: Vec<Vec<Rat>>,
}

impl LatticeGram {
    #[allow(clippy::needless_range_loop)]
    pub fn new(entries: Vec<Vec<Rat>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|row| row.len() != n) {
            return Err(Error::Domain("Gram matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::Domain("Gram matrix must be symmetric".into()));
                }
            }
        }
        let gram = LatticeGram { entries };
        for k in 1..=n {
            if !gram.leading_minor(k).is_positive() {
                return Err(Error::Domain(
                    "Gram matrix must be positive definite (leading minor <= 0)".into(),
                ));
            }
        }
        Ok(gram)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i][j]
    }

    #[allow(clippy::needless_range_loop)]
    fn leading_minor(&self, k: usize) -> Rat {
        let mut m: Vec<Vec<Rat>> = (0..k)
            .map(|i| self.entries[i][..k].to_vec())
            .collect();
        let mut det = Rat::one();
        for col in 0..k {
            let pivot = (col..k).find(|&r| !m[r][col].is_zero());
            let Some(p) = pivot else {
                return Rat::zero();
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            det *= m[col][col].clone();
            for r in col + 1..k {
                let f = &m[r][col] / &m[col][col];
                for c in col..k {
                    let sub = &f * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss–Jordan elimination.
    fn inverse(&self) -> Vec<Vec<Rat>> {
        let n = self.size();
        let mut a = self.entries.clone();
        let mut inv: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .expect("positive definite matrix is invertible");
            a.swap(p, col);
            inv.swap(p, col);
            let piv = a[col][col].clone();
            for c in 0..n {
                a[col][c] /= piv.clone();
                inv[col][c] /= piv.clone();
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..n {
                        let s1 = &f * &a[col][c];
                        a[r][c] -= s1;
                        let s2 = &f * &inv[col][c];
                        inv[r][c] -= s2;
                    }
                }
            }
        }
        inv
    }

    pub fn trace(&self) -> Rat {
        (0..self.size()).map(|i| self.entries[i][i].clone()).sum()
    }
}

/// Spectrum of the flat torus: values `n . G^{-1} . n^T` over integer
/// covectors, grouped with multiplicities, complete up to `cutoff`.
///
/// Completeness: `Q(n) >= |n|^2 * lambda_min(G^{-1}) >= |n|^2 / tr(G)`, so
/// enumerating the box `|n_i| <= sqrt(cutoff * tr(G))` is exhaustive while
/// staying in rational arithmetic.
pub fn flat_torus_spectrum(gram: &LatticeGram, cutoff: &Rat) -> Result<LinkSpectrum> {
    if cutoff.is_negative() {
        return Err(Error::Domain("cutoff must be nonnegative".into()));
    }
    let n = gram.size();
    let inv = gram.inverse();
    let radius_sq = cutoff * gram.trace();
    let radius = {
        let num = radius_sq.numer().to_biguint().unwrap_or_default();
        let den = radius_sq.denom().to_biguint().unwrap_or_else(BigUint::one);
        let fits = (num / den).sqrt();
        fits.to_i64()
            .ok_or_else(|| Error::Domain("enumeration radius overflows".into()))?
            + 1
    };
    let mut groups: BTreeMap<Rat, u64> = BTreeMap::new();
    let mut point = vec![0i64; n];
    enumerate_box(&mut point, 0, radius, &mut |p| {
        let mut q = Rat::zero();
        for i in 0..n {
            for j in 0..n {
                q += &inv[i][j] * rat_i64(p[i]) * rat_i64(p[j]);
            }
        }
        if &q <= cutoff {
            *groups.entry(q).or_insert(0) += 1;
        }
    });
    let entries = groups
        .into_iter()
        .map(|(value, multiplicity)| EigenvalueEntry {
            value: Scalar::Exact(value),
            multiplicity,
        })
        .collect();
    Ok(LinkSpectrum {
        dim_link: n as u32,
        connected: true,
        cutoff: Cutoff::exact(cutoff.clone()),
        entries,
    })
}

fn enumerate_box(point: &mut Vec<i64>, dim: usize, radius: i64, visit: &mut impl FnMut(&[i64])) {
    if dim == point.len() {
        visit(point);
        return;
    }
    for v in -radius..=radius {
        point[dim] = v;
        enumerate_box(point, dim + 1, radius, visit);
    }
}

/// Spectrum of a Riemannian product: eigenvalue sums with convolved
/// multiplicities, complete up to `cutoff`.
pub fn product_spectrum(a: &LinkSpectrum, b: &LinkSpectrum, cutoff: &Scalar) -> Result<LinkSpectrum> {
    for (side, s) in [("left", a), ("right", b)] {
        if !s.cutoff.covers(cutoff) {
            return Err(Error::Completeness {
                end_index: None,
                required: cutoff.display_string(),
                available: format!("{} ({side} factor)", s.cutoff.display_string()),
            });
        }
    }
    let mut sums: Vec<(Scalar, u64)> = Vec::new();
    for ea in &a.entries {
        for eb in &b.entries {
            let value = match (&ea.value, &eb.value) {
                (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(x + y),
                (x, y) => Scalar::Approx(x.to_f64() + y.to_f64()),
            };
            if value.cmp_scalar(cutoff) == Ordering::Greater {
                continue;
            }
            sums.push((value, ea.multiplicity * eb.multiplicity));
        }
    }
    sums.sort_by(|x, y| x.0.cmp_scalar(&y.0));
    let mut entries: Vec<EigenvalueEntry> = Vec::new();
    for (value, mult) in sums {
        match entries.last_mut() {
            Some(last) if scalar_coincides(&last.value, &value) => last.multiplicity += mult,
            _ => entries.push(EigenvalueEntry {
                value,
                multiplicity: mult,
            }),
        }
    }
    Ok(LinkSpectrum {
        dim_link: a.dim_link + b.dim_link,
        connected: a.connected && b.connected,
        cutoff: Cutoff::At(cutoff.clone()),
        entries,
    })
}

/// Grouping rule for eigenvalue sums: exact values must match exactly,
/// anything floating point merges at relative 1e-12.
fn scalar_coincides(x: &Scalar, y: &Scalar) -> bool {
    match (x, y) {
        (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
        _ => {
            let (a, b) = (x.to_f64(), y.to_f64());
            (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
        }
    }
}

pub use mesh::{mesh_spectrum, TriangleMesh};
