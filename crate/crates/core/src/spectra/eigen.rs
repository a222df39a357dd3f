//! Sparse symmetric eigensolver: shift-inverted block subspace iteration.
//!
//! Solves `S x = e M x` with `M` diagonal by reducing to the standard
//! symmetric problem `B y = e y`, `B = M^{-1/2} S M^{-1/2}`, and iterating
//! `X <- orth((B + I)^{-1} X)` with Rayleigh–Ritz extraction. The inverse is
//! applied by Jacobi-preconditioned conjugate gradients. Everything is
//! sequential with fixed iteration order, so results are bit-identical for
//! identical inputs.

// index-driven kernels throughout
#![allow(clippy::needless_range_loop)]

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Compressed sparse row symmetric matrix.
#[derive(Clone, Debug)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    pub fn from_entries(n: usize, entries: &std::collections::BTreeMap<(usize, usize), f64>) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _) in entries.keys() {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut col = Vec::with_capacity(entries.len());
        let mut val = Vec::with_capacity(entries.len());
        for (&(_, j), &v) in entries.iter() {
            col.push(j);
            val.push(v);
        }
        Csr {
            n,
            row_ptr,
            col,
            val,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col[k] == i {
                    d[i] = self.val[k];
                }
            }
        }
        d
    }
}

/// One converged generalized eigenpair plus its residual diagnostics.
pub struct EigenPair {
    pub value: f64,
    /// Eigenvector of the generalized problem (`S x = e M x` scaling).
    pub vector: Vec<f64>,
    /// `|S x - e M x| / |M x|`.
    pub residual: f64,
}

struct ShiftedOp<'a> {
    stiff: &'a Csr,
    mass_inv_sqrt: Vec<f64>,
    shift: f64,
    precond: Vec<f64>,
}

impl<'a> ShiftedOp<'a> {
    fn new(stiff: &'a Csr, mass: &[f64], shift: f64) -> Self {
        let mass_inv_sqrt: Vec<f64> = mass.iter().map(|&m| 1.0 / m.sqrt()).collect();
        let sd = stiff.diagonal();
        let precond: Vec<f64> = (0..stiff.n)
            .map(|i| 1.0 / (sd[i] * mass_inv_sqrt[i] * mass_inv_sqrt[i] + shift))
            .collect();
        ShiftedOp {
            stiff,
            mass_inv_sqrt,
            shift,
            precond,
        }
    }

    /// y = B x with B = M^{-1/2} S M^{-1/2}.
    fn apply_b(&self, x: &[f64], y: &mut [f64], scratch: &mut [f64]) {
        for i in 0..x.len() {
            scratch[i] = x[i] * self.mass_inv_sqrt[i];
        }
        self.stiff.matvec(scratch, y);
        for (i, v) in y.iter_mut().enumerate() {
            *v *= self.mass_inv_sqrt[i];
        }
    }

    /// Solve (B + shift) z = rhs by preconditioned CG, starting from x0.
    fn solve(&self, rhs: &[f64], x0: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
        let n = rhs.len();
        let mut x = x0.to_vec();
        let mut scratch = vec![0.0; n];
        let mut ax = vec![0.0; n];
        let apply = |x: &[f64], out: &mut [f64], scratch: &mut [f64]| {
            self.apply_b(x, out, scratch);
            for i in 0..n {
                out[i] += self.shift * x[i];
            }
        };
        apply(&x, &mut ax, &mut scratch);
        let mut r: Vec<f64> = (0..n).map(|i| rhs[i] - ax[i]).collect();
        let mut z: Vec<f64> = (0..n).map(|i| r[i] * self.precond[i]).collect();
        let mut p = z.clone();
        let mut rz: f64 = dot(&r, &z);
        let rhs_norm = norm(rhs).max(f64::MIN_POSITIVE);
        for _ in 0..max_iter {
            if norm(&r) <= tol * rhs_norm {
                break;
            }
            apply(&p, &mut ax, &mut scratch);
            let pap = dot(&p, &ax);
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ax[i];
            }
            for i in 0..n {
                z[i] = r[i] * self.precond[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic start vectors (splitmix64 doubles, fixed seed).
fn seeded_columns(n: usize, p: usize) -> Vec<Vec<f64>> {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..p).map(|_| (0..n).map(|_| next()).collect()).collect()
}

/// Modified Gram–Schmidt, two passes.
fn orthonormalize(cols: &mut [Vec<f64>]) {
    for i in 0..cols.len() {
        for _pass in 0..2 {
            for j in 0..i {
                let proj = dot(&cols[i], &cols[j]);
                let (head, tail) = cols.split_at_mut(i);
                for (t, h) in tail[0].iter_mut().zip(head[j].iter()) {
                    *t -= proj * h;
                }
            }
        }
        let nrm = norm(&cols[i]);
        if nrm > 1e-300 {
            for v in cols[i].iter_mut() {
                *v /= nrm;
            }
        }
    }
}

/// Smallest `count` generalized eigenpairs of `S x = e M x`, plus a buffer of
/// extra converged pairs used by callers for cluster-boundary decisions.
pub fn smallest_eigenpairs(
    stiff: &Csr,
    mass: &[f64],
    count: usize,
    target_residual: f64,
) -> Result<Vec<EigenPair>> {
    let n = stiff.n;
    if count == 0 {
        return Err(Error::Domain("eigenpair count must be >= 1".into()));
    }
    if count + 2 > n {
        return Err(Error::Domain(format!(
            "requested {count} eigenpairs of a {n}-vertex mesh; need count + 2 <= vertices"
        )));
    }
    let p = (count + count.max(8) + 2).min(n);
    let op = ShiftedOp::new(stiff, mass, 1.0);
    let mut x = seeded_columns(n, p);
    orthonormalize(&mut x);
    let mut ritz = vec![0.0f64; p];
    let mut scratch = vec![0.0; n];
    let mut best_residual = f64::INFINITY;
    let max_outer = 400;
    for outer in 0..max_outer {
        // Y = (B + I)^{-1} X, warm-started at X / (1 + ritz)
        let mut y: Vec<Vec<f64>> = Vec::with_capacity(p);
        for (j, xj) in x.iter().enumerate() {
            let guess: Vec<f64> = xj.iter().map(|&v| v / (1.0 + ritz[j].max(0.0))).collect();
            y.push(op.solve(xj, &guess, 1e-13, 4 * n));
        }
        orthonormalize(&mut y);
        // Rayleigh–Ritz on B
        let mut by: Vec<Vec<f64>> = vec![vec![0.0; n]; p];
        for j in 0..p {
            op.apply_b(&y[j], &mut by[j], &mut scratch);
        }
        let mut t = DMatrix::<f64>::zeros(p, p);
        for i in 0..p {
            for j in 0..=i {
                let v = dot(&y[i], &by[j]);
                t[(i, j)] = v;
                t[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .expect("non-finite Ritz value")
        });
        let mut xnew: Vec<Vec<f64>> = vec![vec![0.0; n]; p];
        for (slot, &idx) in order.iter().enumerate() {
            ritz[slot] = eig.eigenvalues[idx];
            for j in 0..p {
                let w = eig.eigenvectors[(j, idx)];
                if w != 0.0 {
                    for i in 0..n {
                        xnew[slot][i] += w * y[j][i];
                    }
                }
            }
        }
        x = xnew;
        // convergence: residuals of the requested pairs plus a small margin,
        // so cluster-boundary absorption has converged data to work with
        let converge_to = (count + 4).min(p);
        let mut max_res = 0.0f64;
        for j in 0..converge_to {
            op.apply_b(&x[j], &mut scratch, &mut by[0]);
            let mut r = 0.0;
            for i in 0..n {
                let d = scratch[i] - ritz[j] * x[j][i];
                r += d * d;
            }
            max_res = max_res.max(r.sqrt());
        }
        best_residual = best_residual.min(max_res);
        if max_res <= target_residual * 0.1 && outer >= 2 {
            break;
        }
        if outer == max_outer - 1 {
            return Err(Error::Numeric(format!(
                "eigensolver did not converge: best residual {best_residual:.3e} \
                 after {max_outer} subspace iterations (target {target_residual:.1e})"
            )));
        }
    }
    // assemble generalized eigenpairs and their residuals
    let mut out = Vec::with_capacity(p);
    let mut sx = vec![0.0; n];
    for j in 0..p {
        let vector: Vec<f64> = (0..n).map(|i| x[j][i] * op.mass_inv_sqrt[i]).collect();
        stiff.matvec(&vector, &mut sx);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mx = mass[i] * vector[i];
            let d = sx[i] - ritz[j] * mx;
            num += d * d;
            den += mx * mx;
        }
        out.push(EigenPair {
            value: ritz[j],
            vector,
            residual: num.sqrt() / den.sqrt().max(f64::MIN_POSITIVE),
        });
    }
    for pair in out.iter().take(count) {
        if pair.residual > target_residual {
            return Err(Error::Numeric(format!(
                "eigenpair at {:.6e} has residual {:.3e} above target {:.1e}",
                pair.value, pair.residual, target_residual
            )));
        }
    }
    Ok(out)
}
