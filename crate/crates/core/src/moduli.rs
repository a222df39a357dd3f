//! Stability of SL cones and moduli-space dimensions.
//!
//! An SL cone always carries homogeneous harmonic functions at rates 0, 1, 2:
//! the constants (1 of them), the ambient translations (2m) and the ambient
//! rotations modulo the cone's own symmetries (m^2 - 1 - dim G). The cone is
//! stable when these are the only exceptional rates in [0, 2] and their
//! multiplicities are exactly the forced ones. Under stability the moduli
//! spaces of the four deformation settings (compact, AC, CS, CS/AC) are
//! smooth with dimensions given by Betti data and, for positive AC rates,
//! harmonic-growth counts.

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{rat_i64, rational_string, Rat};
use crate::fredholm::{
    ac_end_harmonic_count, ac_laplacian_dims, ConeEndSpec, ConifoldModel, EndKind,
};
use crate::spectra::{sphere_spectrum, LinkSpectrum};
use crate::topology::ConifoldTopology;
use crate::weights::{
    check_nonexceptional, exceptional_in_interval, multiplicity_in_interval, GammaValue,
    WeightValue,
};

/// Multiplicities of the exceptional rates 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityCounts {
    pub gamma0: u64,
    pub gamma1: u64,
    pub gamma2: u64,
}

/// Outcome of the stability test for one SL cone end.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub end_index: usize,
    pub expected: StabilityCounts,
    pub observed: StabilityCounts,
    pub extra_exceptional: Vec<WeightValue>,
    pub stable: bool,
    pub approximate: bool,
}

/// Relative tolerance for bucketing floating-point rates at 0, 1, 2 when the
/// spectrum is numeric (mesh data is accurate to about a percent).
const APPROX_BUCKET_TOL: f64 = 0.02;

fn bucket_of(gamma: &GammaValue) -> Option<u8> {
    match gamma {
        GammaValue::Exact(q) => {
            for k in 0u8..=2 {
                if q.cmp_rat(&rat_i64(k as i64)) == std::cmp::Ordering::Equal {
                    return Some(k);
                }
            }
            None
        }
        GammaValue::Approx(x) => {
            for k in 0u8..=2 {
                if (x - k as f64).abs() <= APPROX_BUCKET_TOL * (k as f64).max(1.0) {
                    return Some(k);
                }
            }
            None
        }
    }
}

/// Does the spectrum agree with the round unit sphere S^{m-1} up to `bound`?
fn matches_sphere(spectrum: &LinkSpectrum, m: u32, bound: &Rat) -> bool {
    let Ok(sphere) = sphere_spectrum(m, bound) else {
        return false;
    };
    let prefix: Vec<_> = spectrum
        .entries
        .iter()
        .filter(|e| e.value.cmp_rat(bound) != std::cmp::Ordering::Greater)
        .collect();
    if prefix.len() != sphere.entries.len() {
        return false;
    }
    prefix.iter().zip(&sphere.entries).all(|(a, b)| {
        a.multiplicity == b.multiplicity
            && match (&a.value, &b.value) {
                (crate::exact::Scalar::Exact(x), crate::exact::Scalar::Exact(y)) => x == y,
                (x, y) => {
                    let (xf, yf) = (x.to_f64(), y.to_f64());
                    (xf - yf).abs() <= APPROX_BUCKET_TOL * yf.max(1.0)
                }
            }
    })
}

/// Stability test for one SL cone end.
///
/// Needs the end's `sym_dim` (the dimension of the cone's special unitary
/// symmetry group: geometric data the spectrum cannot determine) and a
/// spectrum complete up to `2m`. Links that match the round-sphere spectrum
/// are rejected: the plane through the origin is excluded from the
/// definition.
pub fn stability_check(end: &ConeEndSpec, m: u32, end_index: usize) -> Result<StabilityReport> {
    let Some(sym_dim) = end.sym_dim else {
        return Err(Error::Domain(format!(
            "end {end_index}: sym_dim (dimension of the cone's symmetry group) is required \
             for a stability check"
        )));
    };
    if m < 3 {
        return Err(Error::Domain(format!("m must be >= 3, got {m}")));
    }
    let expected_g2 = (m as i64) * (m as i64) - 1 - sym_dim as i64;
    if expected_g2 < 0 {
        return Err(Error::Domain(format!(
            "end {end_index}: sym_dim = {sym_dim} exceeds m^2 - 1 = {}",
            m * m - 1
        )));
    }
    let bound = rat_i64(2 * m as i64); // eigenvalue at gamma = 2
    if matches_sphere(&end.spectrum, m, &bound) {
        return Err(Error::Domain(format!(
            "end {end_index}: the link spectrum matches the round sphere S^{}; stability is \
             defined for cones that are not planes",
            m - 1
        )));
    }
    let list = exceptional_in_interval(&end.spectrum, m, &rat_i64(0), &rat_i64(2), end_index)?;
    let mut observed = StabilityCounts {
        gamma0: 0,
        gamma1: 0,
        gamma2: 0,
    };
    let mut extras = Vec::new();
    for w in list {
        match bucket_of(&w.gamma) {
            Some(0) => observed.gamma0 += w.multiplicity,
            Some(1) => observed.gamma1 += w.multiplicity,
            Some(2) => observed.gamma2 += w.multiplicity,
            _ => extras.push(w),
        }
    }
    let expected = StabilityCounts {
        gamma0: 1,
        gamma1: 2 * m as u64,
        gamma2: expected_g2 as u64,
    };
    let stable = observed == expected && extras.is_empty();
    Ok(StabilityReport {
        end_index,
        expected,
        observed,
        extra_exceptional: extras,
        stable,
        approximate: !end.spectrum.is_exact(),
    })
}

/// Slice dimensions for one moving singularity with symmetry group of
/// dimension `sym_dim`: Lagrangian `m^2 + 2m - dim G` and special Lagrangian
/// `m^2 + 2m - 1 - dim G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SliceDims {
    pub lagrangian: i64,
    pub special_lagrangian: i64,
}

pub fn slice_dims(m: u32, sym_dim: u32) -> SliceDims {
    let base = (m as i64) * (m as i64) + 2 * m as i64;
    SliceDims {
        lagrangian: base - sym_dim as i64,
        special_lagrangian: base - 1 - sym_dim as i64,
    }
}

/// Which deformation setting a report belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModuliCase {
    #[serde(rename = "compact")]
    Compact,
    #[serde(rename = "AC")]
    Ac,
    #[serde(rename = "CS")]
    Cs,
    #[serde(rename = "CS/AC")]
    CsAc,
}

/// Moduli-space dimension report.
///
/// `moduli_dim` is present exactly when the obstruction space is known to
/// vanish (stability plus `mu = 2 + eps` where that is required); otherwise
/// `dim_o` carries a bookkeeping value labelled by `dim_o_caveat` and no
/// smoothness claim is made.
#[derive(Clone, Debug, Serialize)]
pub struct ModuliReport {
    pub case: ModuliCase,
    pub window: String,
    pub dim_i: i64,
    pub dim_o: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_o_caveat: Option<String>,
    pub moduli_dim: Option<i64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stability: Vec<StabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub approximate: bool,
    pub formula_trail: Vec<String>,
}

/// Moduli dimension of a smooth compact special Lagrangian: `b^1(L)`.
pub fn dim_compact(b1: usize) -> ModuliReport {
    ModuliReport {
        case: ModuliCase::Compact,
        window: "compact".into(),
        dim_i: b1 as i64,
        dim_o: 0,
        dim_o_caveat: None,
        moduli_dim: Some(b1 as i64),
        stability: Vec::new(),
        caveat: None,
        warnings: Vec::new(),
        approximate: false,
        formula_trail: vec![format!("compact case: moduli dimension = b1 = {b1}")],
    }
}

fn require_topology(model: &ConifoldModel) -> Result<&ConifoldTopology> {
    model.topology.as_ref().ok_or_else(|| {
        Error::Structural("moduli dimensions need the conifold's Betti data (topology)".into())
    })
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum AcWindow {
    /// (2-m, 0)
    Decaying,
    /// (0, 2)
    Growing,
}

fn classify_ac_window(lambda: &[Rat], m: u32) -> Result<AcWindow> {
    let lower = rat_i64(2 - m as i64);
    let two = rat_i64(2);
    let all_decaying = lambda.iter().all(|r| r > &lower && r.is_negative());
    let all_growing = lambda.iter().all(|r| r.is_positive() && r < &two);
    match (all_decaying, all_growing) {
        (true, _) => Ok(AcWindow::Decaying),
        (_, true) => Ok(AcWindow::Growing),
        _ => Err(Error::Unsupported(format!(
            "AC rates must lie uniformly in (2-m, 0) = ({}, 0) or in (0, 2); got {:?}",
            2 - m as i64,
            lambda.iter().map(rational_string).collect::<Vec<_>>()
        ))),
    }
}

/// Moduli dimension of an AC special Lagrangian.
///
/// `lambda` in `(2-m, 0)`: dimension `b1_c`. `lambda` in `(0, 2)`
/// non-exceptional: dimension `b1 + dim Ker(Delta_lambda) - 1`, with the
/// kernel taken from the cone model (caveat propagated).
pub fn dim_ac(model: &ConifoldModel, lambda: &[Rat], match_tol: f64) -> Result<ModuliReport> {
    model.validate()?;
    if !model.is_all(EndKind::Ac) {
        return Err(Error::Structural("dim_ac expects an all-AC model".into()));
    }
    let topology = require_topology(model)?;
    let window = classify_ac_window(lambda, model.m)?;
    match window {
        AcWindow::Decaying => {
            let dim = topology.b1_c as i64;
            Ok(ModuliReport {
                case: ModuliCase::Ac,
                window: format!("lambda in (2-m, 0) = ({}, 0)", 2 - model.m as i64),
                dim_i: dim,
                dim_o: 0,
                dim_o_caveat: None,
                moduli_dim: Some(dim),
                stability: Vec::new(),
                caveat: None,
                warnings: Vec::new(),
                approximate: model.approximate(),
                formula_trail: vec![format!(
                    "decaying window: moduli dimension = b1_c = {}",
                    topology.b1_c
                )],
            })
        }
        AcWindow::Growing => {
            let fredholm = ac_laplacian_dims(model, lambda, match_tol)?;
            let ker = fredholm.ker_dim.expect("surjective window") as i64;
            let dim = topology.b1 as i64 + ker - 1;
            let mut trail = vec![format!(
                "growing window: moduli dimension = b1 + dim Ker(Delta_lambda) - 1 = {} + {ker} - 1 = {dim}",
                topology.b1
            )];
            trail.extend(fredholm.formula_trail);
            Ok(ModuliReport {
                case: ModuliCase::Ac,
                window: "lambda in (0, 2)".into(),
                dim_i: dim,
                dim_o: 0,
                dim_o_caveat: None,
                moduli_dim: Some(dim),
                stability: Vec::new(),
                caveat: fredholm.caveat,
                warnings: Vec::new(),
                approximate: fredholm.approximate,
                formula_trail: trail,
            })
        }
    }
}

/// Is `mu_i = 2 + eps`: strictly above 2 and below the next exceptional
/// weight of its end?
fn is_two_plus_eps(
    spectrum: &LinkSpectrum,
    m: u32,
    mu_i: &Rat,
    end_index: usize,
) -> Result<bool> {
    if mu_i <= &rat_i64(2) {
        return Ok(false);
    }
    let crossed =
        multiplicity_in_interval(spectrum, m, &rat_i64(2), mu_i, false, true, end_index)?;
    Ok(crossed == 0)
}

/// Shared CS-side bookkeeping: stability reports, the `2 + eps` test and the
/// obstruction-model value
/// `base + sum_{0 < gamma < mu} m(gamma) - sum_i (2m + m^2 - dim G_i)`.
struct CsSide {
    stability: Vec<StabilityReport>,
    all_stable: bool,
    all_two_eps: bool,
    obstruction_model: i64,
    crossings: u64,
    warnings: Vec<String>,
    trail: Vec<String>,
}

fn cs_side(model: &ConifoldModel, cs_indices: &[usize], mu: &[Rat], base: u64) -> Result<CsSide> {
    let m = model.m;
    let mut stability = Vec::new();
    let mut warnings = Vec::new();
    let mut trail = Vec::new();
    let mut all_stable = true;
    let mut all_two_eps = true;
    let mut crossings = 0u64;
    let mut slice_total = 0i64;
    for (pos, &i) in cs_indices.iter().enumerate() {
        let end = &model.ends[i];
        let mu_i = &mu[pos];
        if mu_i <= &rat_i64(2) {
            warnings.push(format!(
                "end {i}: mu = {} is not above 2; SL deformations of CS type use mu > 2",
                rational_string(mu_i)
            ));
        }
        let report = stability_check(end, m, i)?;
        trail.push(format!(
            "end {i}: expected counts at gamma = 0,1,2: ({}, {}, {}); observed ({}, {}, {}); \
             {} extra exceptional in (0,2); {}",
            report.expected.gamma0,
            report.expected.gamma1,
            report.expected.gamma2,
            report.observed.gamma0,
            report.observed.gamma1,
            report.observed.gamma2,
            report.extra_exceptional.len(),
            if report.stable { "stable" } else { "not stable" }
        ));
        all_stable &= report.stable;
        stability.push(report);
        let two_eps = is_two_plus_eps(&end.spectrum, m, mu_i, i)?;
        if !two_eps {
            trail.push(format!(
                "end {i}: mu = {} is not of the form 2 + eps (an exceptional weight lies in (2, mu])",
                rational_string(mu_i)
            ));
        }
        all_two_eps &= two_eps;
        crossings += multiplicity_in_interval(
            &end.spectrum,
            m,
            &rat_i64(0),
            mu_i,
            false,
            false,
            i,
        )?;
        let sym = end.sym_dim.expect("stability_check enforces sym_dim");
        let slice = slice_dims(m, sym);
        trail.push(format!(
            "end {i}: moving-singularity slice dims: Lagrangian {}, SL {}; \
             contributes 1 + 2m + m^2 - 1 - dim G = {} to d",
            slice.lagrangian,
            slice.special_lagrangian,
            1 + slice.special_lagrangian
        ));
        slice_total += 1 + slice.special_lagrangian;
    }
    let obstruction_model = base as i64 + crossings as i64 - slice_total;
    Ok(CsSide {
        stability,
        all_stable,
        all_two_eps,
        obstruction_model,
        crossings,
        warnings,
        trail,
    })
}

/// Obstruction-space bookkeeping value for an all-CS model:
/// `e + sum_{0<gamma<mu} m(gamma) - sum_i (2m + m^2 - dim G_i)`.
/// Evaluates to 0 exactly when every end is stable and `mu = 2 + eps`.
pub fn cs_obstruction_model(model: &ConifoldModel, mu: &[Rat]) -> Result<i64> {
    let cs = model.cs_indices();
    Ok(cs_side(model, &cs, mu, cs.len() as u64)?.obstruction_model)
}

/// Moduli dimension of a CS special Lagrangian with moving singularities.
///
/// `dim I = b1_c - s + 1` always; when every singularity is stable and
/// `mu = 2 + eps` the obstruction space vanishes and the moduli space is
/// smooth of that dimension.
pub fn dim_cs(model: &ConifoldModel, mu: &[Rat], match_tol: f64) -> Result<ModuliReport> {
    model.validate()?;
    if !model.is_all(EndKind::Cs) {
        return Err(Error::Structural("dim_cs expects an all-CS model".into()));
    }
    if mu.len() != model.ends.len() {
        return Err(Error::Domain(format!(
            "{} rates supplied for {} ends",
            mu.len(),
            model.ends.len()
        )));
    }
    let topology = require_topology(model)?;
    if let Some(witness) = check_nonexceptional(&model.spectra(), model.m, mu, match_tol)? {
        return Err(witness.to_error());
    }
    let s = model.ends.len();
    let dim_i = topology.b1_c as i64 - s as i64 + 1;
    let side = cs_side(model, &model.cs_indices(), mu, s as u64)?;
    let mut trail = vec![format!(
        "dim(I) = b1_c - s + 1 = {} - {s} + 1 = {dim_i}",
        topology.b1_c
    )];
    trail.extend(side.trail);
    let (dim_o, dim_o_caveat, moduli_dim) = if side.all_stable && side.all_two_eps {
        trail.push(
            "all singularities stable and mu = 2 + eps: obstruction space is 0, moduli space \
             is smooth of dimension dim(I)"
                .into(),
        );
        (0i64, None, Some(dim_i))
    } else {
        trail.push(format!(
            "obstruction bookkeeping: e + sum_(0,mu) m(gamma) - sum_i (2m + m^2 - dim G_i) \
             = {s} + {} - {} = {}",
            side.crossings,
            s as i64 + side.crossings as i64 - side.obstruction_model,
            side.obstruction_model
        ));
        (
            side.obstruction_model,
            Some(
                "upper-bound model value from cokernel bookkeeping; smoothness is only \
                 asserted under stability with mu = 2 + eps"
                    .into(),
            ),
            None,
        )
    };
    Ok(ModuliReport {
        case: ModuliCase::Cs,
        window: "mu > 2".into(),
        dim_i,
        dim_o,
        dim_o_caveat,
        moduli_dim,
        stability: side.stability,
        caveat: None,
        warnings: side.warnings,
        approximate: model.approximate(),
        formula_trail: trail,
    })
}

/// Moduli dimension of a CS/AC special Lagrangian in flat space.
///
/// With `lambda` uniformly in `(2-m, 0)`: `dim I = b1_c - s`. With `lambda`
/// uniformly in `(0, 2)`: `dim I = b1_c_bullet - s + sum_i d_i`, where `d_i`
/// counts homogeneous harmonic functions of rate in `[0, lambda_i]` on the
/// i-th AC end. Stability plus `mu = 2 + eps` kills the obstruction space.
pub fn dim_csac(
    model: &ConifoldModel,
    mu: &[Rat],
    lambda: &[Rat],
    match_tol: f64,
) -> Result<ModuliReport> {
    model.validate()?;
    let cs = model.cs_indices();
    let ac = model.ac_indices();
    if cs.is_empty() || ac.is_empty() {
        return Err(Error::Structural(
            "dim_csac expects a model with both CS and AC ends".into(),
        ));
    }
    let topology = require_topology(model)?;
    let weights = model.merge_weights(mu, lambda)?;
    if let Some(witness) = check_nonexceptional(&model.spectra(), model.m, &weights, match_tol)? {
        return Err(witness.to_error());
    }
    let window = classify_ac_window(lambda, model.m)?;
    let s = cs.len() as i64;
    let mut trail = Vec::new();
    let (window_label, dim_i) = match window {
        AcWindow::Decaying => {
            let dim_i = topology.b1_c as i64 - s;
            trail.push(format!(
                "lambda in (2-m, 0): dim(I) = b1_c - s = {} - {s} = {dim_i}",
                topology.b1_c
            ));
            (
                format!("lambda in (2-m, 0) = ({}, 0)", 2 - model.m as i64),
                dim_i,
            )
        }
        AcWindow::Growing => {
            let mut d_total = 0i64;
            for (pos, &i) in ac.iter().enumerate() {
                let d = ac_end_harmonic_count(&model.ends[i], model.m, &lambda[pos], i, match_tol)?;
                trail.push(format!(
                    "end {i} (AC): d = #harmonic rates in [0, {}] = {d}",
                    rational_string(&lambda[pos])
                ));
                d_total += d as i64;
            }
            let dim_i = topology.b1_c_bullet as i64 - s + d_total;
            trail.push(format!(
                "lambda in (0, 2): dim(I) = b1_c_bullet - s + sum d_i = {} - {s} + {d_total} = {dim_i}",
                topology.b1_c_bullet
            ));
            ("lambda in (0, 2)".into(), dim_i)
        }
    };
    let side = cs_side(model, &cs, mu, s as u64)?;
    trail.extend(side.trail);
    let mut warnings = side.warnings;
    let (dim_o, dim_o_caveat, moduli_dim) = if side.all_stable && side.all_two_eps {
        trail.push(
            "all singularities stable and mu = 2 + eps: obstruction space is 0, moduli space \
             is smooth of dimension dim(I)"
                .into(),
        );
        (0i64, None, Some(dim_i))
    } else {
        let mut caveat = String::from(
            "upper-bound model value from cokernel bookkeeping; smoothness is only asserted \
             under stability with mu = 2 + eps",
        );
        if window == AcWindow::Growing {
            caveat.push_str(
                "; computed at lambda in (2-m, 0), an upper bound since the cokernel only \
                 shrinks as lambda increases",
            );
        }
        (side.obstruction_model, Some(caveat), None)
    };
    if model
        .ac_indices()
        .iter()
        .zip(lambda)
        .any(|(_, l)| l.is_positive())
        && moduli_dim.is_some()
    {
        // growing AC rates consume cone-model harmonic counts
        warnings.push(
            "d_i counts homogeneous harmonic functions of the asymptotic cone".into(),
        );
    }
    Ok(ModuliReport {
        case: ModuliCase::CsAc,
        window: window_label,
        dim_i,
        dim_o,
        dim_o_caveat,
        moduli_dim,
        stability: side.stability,
        caveat: None,
        warnings,
        approximate: model.approximate(),
        formula_trail: trail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_frac;
    use crate::spectra::{flat_torus_spectrum, LatticeGram};
    use crate::weights::DEFAULT_MATCH_TOL;

    fn hl_spectrum(cutoff: i64) -> LinkSpectrum {
        let gram = LatticeGram::new(vec![
            vec![rat_frac(2, 3), rat_frac(1, 3)],
            vec![rat_frac(1, 3), rat_frac(2, 3)],
        ])
        .unwrap();
        flat_torus_spectrum(&gram, &rat_i64(cutoff)).unwrap()
    }

    fn square_spectrum(cutoff: i64) -> LinkSpectrum {
        let gram = LatticeGram::new(vec![
            vec![rat_i64(1), rat_i64(0)],
            vec![rat_i64(0), rat_i64(1)],
        ])
        .unwrap();
        flat_torus_spectrum(&gram, &rat_i64(cutoff)).unwrap()
    }

    fn hl_end(kind: EndKind, rate: Rat, sym_dim: Option<u32>) -> ConeEndSpec {
        ConeEndSpec {
            kind,
            spectrum: hl_spectrum(10),
            rate,
            sym_dim,
        }
    }

    /// Betti data of the cone over a connected link with b1(link) = 2.
    fn cone_topology() -> ConifoldTopology {
        ConifoldTopology {
            b1: 1,
            b1_c: 1,
            b1_c_bullet: 0,
            e: 2,
            s: 1,
            l: 1,
            rank_restriction_to_cs_links: 1,
        }
    }

    fn tol() -> f64 {
        DEFAULT_MATCH_TOL
    }

    #[test]
    fn hl_cone_is_stable() {
        let end = hl_end(EndKind::Cs, rat_frac(11, 5), Some(2));
        let report = stability_check(&end, 3, 0).unwrap();
        assert_eq!(
            report.expected,
            StabilityCounts {
                gamma0: 1,
                gamma1: 6,
                gamma2: 6
            }
        );
        assert_eq!(report.observed, report.expected);
        assert!(report.extra_exceptional.is_empty());
        assert!(report.stable);
        assert!(!report.approximate);
    }

    #[test]
    fn moment_map_lower_bound_on_sl_fixture() {
        // on a genuine SL cone link the forced harmonics are present:
        // observed >= expected at gamma = 1 and gamma = 2
        let end = hl_end(EndKind::Cs, rat_frac(11, 5), Some(2));
        let report = stability_check(&end, 3, 0).unwrap();
        assert!(report.observed.gamma1 >= report.expected.gamma1);
        assert!(report.observed.gamma2 >= report.expected.gamma2);
    }

    #[test]
    fn wrong_sym_dim_breaks_stability() {
        let end = hl_end(EndKind::Cs, rat_frac(11, 5), Some(0));
        let report = stability_check(&end, 3, 0).unwrap();
        assert_eq!(report.expected.gamma2, 8);
        assert_eq!(report.observed.gamma2, 6);
        assert!(!report.stable);
    }

    #[test]
    fn square_torus_has_extra_exceptional_rate() {
        // e1 = 1 gives gamma (gamma+1) = 1: gamma = (sqrt(5)-1)/2 in (0,1)
        let end = ConeEndSpec {
            kind: EndKind::Cs,
            spectrum: square_spectrum(10),
            rate: rat_frac(11, 5),
            sym_dim: Some(2),
        };
        let report = stability_check(&end, 3, 0).unwrap();
        assert!(!report.stable);
        assert_eq!(report.extra_exceptional[0].gamma.symbol(), "(-1+1*sqrt(5))/2");
    }

    #[test]
    fn sphere_link_is_rejected() {
        let end = ConeEndSpec {
            kind: EndKind::Cs,
            spectrum: crate::spectra::sphere_spectrum(3, &rat_i64(8)).unwrap(),
            rate: rat_frac(11, 5),
            sym_dim: Some(3),
        };
        let err = stability_check(&end, 3, 0).unwrap_err();
        assert!(err.to_string().contains("round sphere"));
    }

    #[test]
    fn missing_sym_dim_is_an_input_error() {
        let end = hl_end(EndKind::Cs, rat_frac(11, 5), None);
        assert!(stability_check(&end, 3, 0).is_err());
    }

    #[test]
    fn compact_case() {
        assert_eq!(dim_compact(3).moduli_dim, Some(3));
        assert_eq!(dim_compact(0).moduli_dim, Some(0));
        // from the 7-vertex torus complex
        let torus = crate::topology::betti(
            &crate::topology::SimplicialComplex::from_facets(
                7,
                &crate::topology::fixtures::torus7_facets(),
            )
            .unwrap(),
            1,
        )
        .unwrap();
        assert_eq!(dim_compact(torus).moduli_dim, Some(2));
    }

    #[test]
    fn ac_cases() {
        // decaying window: b1_c
        let model = ConifoldModel {
            m: 3,
            ends: vec![hl_end(EndKind::Ac, rat_frac(-1, 2), None)],
            topology: Some(ConifoldTopology {
                b1: 1,
                b1_c: 1,
                b1_c_bullet: 1,
                e: 1,
                s: 0,
                l: 1,
                rank_restriction_to_cs_links: 0,
            }),
        };
        let r = dim_ac(&model, &[rat_frac(-1, 2)], tol()).unwrap();
        assert_eq!(r.moduli_dim, Some(1));

        // growing window on a sphere end: b1 + ker - 1 = 0 + 4 - 1
        let sphere_model = ConifoldModel {
            m: 3,
            ends: vec![ConeEndSpec {
                kind: EndKind::Ac,
                spectrum: crate::spectra::sphere_spectrum(3, &rat_i64(12)).unwrap(),
                rate: rat_frac(3, 2),
                sym_dim: None,
            }],
            topology: Some(ConifoldTopology {
                b1: 0,
                b1_c: 0,
                b1_c_bullet: 0,
                e: 1,
                s: 0,
                l: 1,
                rank_restriction_to_cs_links: 0,
            }),
        };
        let r = dim_ac(&sphere_model, &[rat_frac(3, 2)], tol()).unwrap();
        assert_eq!(r.moduli_dim, Some(3));
        assert!(r.caveat.is_some());

        let r = dim_ac(&sphere_model, &[rat_frac(1, 2)], tol()).unwrap();
        assert_eq!(r.moduli_dim, Some(0));

        // mixed windows are rejected
        let two_ends = ConifoldModel {
            m: 3,
            ends: vec![
                hl_end(EndKind::Ac, rat_frac(-1, 2), None),
                hl_end(EndKind::Ac, rat_frac(1, 2), None),
            ],
            topology: Some(ConifoldTopology {
                b1: 2,
                b1_c: 2,
                b1_c_bullet: 2,
                e: 2,
                s: 0,
                l: 2,
                rank_restriction_to_cs_links: 0,
            }),
        };
        assert!(dim_ac(&two_ends, &[rat_frac(-1, 2), rat_frac(1, 2)], tol()).is_err());
    }

    #[test]
    fn cs_cases() {
        let model = ConifoldModel {
            m: 3,
            ends: vec![hl_end(EndKind::Cs, rat_frac(11, 5), Some(2))],
            topology: Some(ConifoldTopology {
                b1: 1,
                b1_c: 1,
                b1_c_bullet: 1,
                e: 1,
                s: 1,
                l: 0,
                rank_restriction_to_cs_links: 1,
            }),
        };
        let r = dim_cs(&model, &[rat_frac(11, 5)], tol()).unwrap();
        assert_eq!(r.dim_i, 1);
        assert_eq!(r.dim_o, 0);
        assert_eq!(r.moduli_dim, Some(1));
        assert!(r.stability[0].stable);

        // two stable singularities, b1_c = 2: dimension 2 - 2 + 1 = 1
        let two = ConifoldModel {
            m: 3,
            ends: vec![
                hl_end(EndKind::Cs, rat_frac(11, 5), Some(2)),
                hl_end(EndKind::Cs, rat_frac(11, 5), Some(2)),
            ],
            topology: Some(ConifoldTopology {
                b1: 2,
                b1_c: 2,
                b1_c_bullet: 2,
                e: 2,
                s: 2,
                l: 0,
                rank_restriction_to_cs_links: 2,
            }),
        };
        let r = dim_cs(&two, &[rat_frac(11, 5), rat_frac(11, 5)], tol()).unwrap();
        assert_eq!(r.moduli_dim, Some(1));

        // mu above the next exceptional weight disables the shortcut
        let r = dim_cs(&model, &[rat_frac(5, 2)], tol()).unwrap();
        assert_eq!(r.moduli_dim, None);
        assert!(r.dim_o_caveat.is_some());

        // mu below 2 draws a warning
        let r = dim_cs(&model, &[rat_frac(3, 2)], tol()).unwrap();
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn obstruction_model_vanishes_exactly_under_stability() {
        let model = ConifoldModel {
            m: 3,
            ends: vec![hl_end(EndKind::Cs, rat_frac(11, 5), Some(2))],
            topology: None,
        };
        assert_eq!(cs_obstruction_model(&model, &[rat_frac(11, 5)]).unwrap(), 0);
        // at mu = 2.5 the e = 8 weight (gamma ~ 2.372) has been crossed: +6
        assert_eq!(cs_obstruction_model(&model, &[rat_frac(5, 2)]).unwrap(), 6);
    }

    #[test]
    fn csac_cone_example() {
        let model = ConifoldModel {
            m: 3,
            ends: vec![
                hl_end(EndKind::Cs, rat_frac(11, 5), Some(2)),
                hl_end(EndKind::Ac, rat_frac(-1, 2), None),
            ],
            topology: Some(cone_topology()),
        };
        // lambda in (2-m, 0): rigid
        let r = dim_csac(&model, &[rat_frac(11, 5)], &[rat_frac(-1, 2)], tol()).unwrap();
        assert_eq!(r.moduli_dim, Some(0));

        // lambda in (0, 1): still rigid
        let r = dim_csac(&model, &[rat_frac(11, 5)], &[rat_frac(1, 2)], tol()).unwrap();
        assert_eq!(r.moduli_dim, Some(0));

        // lambda in (1, 2): translations, dimension 2m = 6
        let r = dim_csac(&model, &[rat_frac(11, 5)], &[rat_frac(3, 2)], tol()).unwrap();
        assert_eq!(r.moduli_dim, Some(6));
    }

    #[test]
    fn csac_monotone_in_lambda() {
        let model = ConifoldModel {
            m: 3,
            ends: vec![
                hl_end(EndKind::Cs, rat_frac(11, 5), Some(2)),
                hl_end(EndKind::Ac, rat_frac(-1, 2), None),
            ],
            topology: Some(cone_topology()),
        };
        let lambdas = [
            rat_frac(-3, 4),
            rat_frac(-1, 2),
            rat_frac(-1, 4),
            rat_frac(1, 2),
            rat_frac(3, 4),
            rat_frac(6, 5),
            rat_frac(3, 2),
            rat_frac(9, 5),
        ];
        let mut previous = i64::MIN;
        for l in lambdas {
            let r = dim_csac(&model, &[rat_frac(11, 5)], &[l], tol()).unwrap();
            let dim = r.moduli_dim.unwrap();
            assert!(dim >= previous, "moduli dimension must not decrease");
            previous = dim;
        }
    }

    #[test]
    fn exceptional_rate_refused() {
        let model = ConifoldModel {
            m: 3,
            ends: vec![
                hl_end(EndKind::Cs, rat_frac(11, 5), Some(2)),
                hl_end(EndKind::Ac, rat_i64(1), None),
            ],
            topology: Some(cone_topology()),
        };
        let err = dim_csac(&model, &[rat_frac(11, 5)], &[rat_i64(1)], tol()).unwrap_err();
        assert!(err.is_refusal());
    }
}
