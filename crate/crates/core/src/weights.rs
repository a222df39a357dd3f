//! Exceptional weights of the cone Laplacian.
//!
//! A growth rate `gamma` is exceptional for the cone over a link when
//! `gamma (gamma + m - 2)` is an eigenvalue of the link Laplacian; the two
//! rates attached to an eigenvalue `e` are `((2-m) +- sqrt((2-m)^2 + 4e))/2`.
//! For exact spectra these are exact quadratic surds and every interval
//! query either proves completeness or fails loudly; for mesh spectra the
//! verdicts carry an `approximate` flag and a match tolerance.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exact::{rat_i64, rat_to_f64, rational_string, QuadExt, Rat, Scalar};
use crate::spectra::LinkSpectrum;

/// Default relative tolerance for matching a weight against a floating-point
/// eigenvalue. Overridable per call (the CLI reads `CONIFOLD_MATCH_TOL`).
pub const DEFAULT_MATCH_TOL: f64 = 1e-6;

/// An exceptional rate: exact surd for exact spectra, float for mesh spectra.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaValue {
    Exact(QuadExt),
    Approx(f64),
}

impl GammaValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            GammaValue::Exact(q) => q.to_f64(),
            GammaValue::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, GammaValue::Exact(_))
    }

    /// Symbolic rendering for reports.
    pub fn symbol(&self) -> String {
        match self {
            GammaValue::Exact(q) => q.symbol(),
            GammaValue::Approx(x) => format!("{x}"),
        }
    }

    pub fn cmp_value(&self, other: &GammaValue) -> Ordering {
        match (self, other) {
            (GammaValue::Exact(a), GammaValue::Exact(b)) => a.cmp_exact(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .expect("non-finite weight"),
        }
    }

    /// Coincidence with a rational bound; approximate values match within
    /// 1e-9 relative (endpoint filtering only).
    pub fn coincides_with_rat(&self, r: &Rat) -> bool {
        match self {
            GammaValue::Exact(q) => q.cmp_rat(r) == Ordering::Equal,
            GammaValue::Approx(x) => {
                let rf = rat_to_f64(r);
                (x - rf).abs() <= 1e-9 * rf.abs().max(1.0)
            }
        }
    }
}

/// One exceptional weight of one end.
#[derive(Clone, Debug)]
pub struct WeightValue {
    pub gamma: GammaValue,
    pub multiplicity: u64,
    pub end_index: usize,
}

impl Serialize for WeightValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(None)?;
        match &self.gamma {
            GammaValue::Exact(q) => {
                map.serialize_entry("gamma", &q.symbol())?;
                map.serialize_entry("gamma_decimal", &crate::round_sig(q.to_f64()))?;
            }
            GammaValue::Approx(x) => {
                map.serialize_entry("gamma", &crate::round_sig(*x))?;
            }
        }
        map.serialize_entry("mult", &self.multiplicity)?;
        map.end()
    }
}

/// The exceptional weights of a conifold inside a query interval, one sorted
/// list per end.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalSet {
    pub interval: (String, String),
    pub per_end: Vec<Vec<WeightValue>>,
}

impl ExceptionalSet {
    /// Total multiplicity of a vector weight taking value `gamma` on every end.
    pub fn total_multiplicity(&self, gamma: &GammaValue) -> u64 {
        self.per_end
            .iter()
            .flatten()
            .filter(|w| w.gamma.cmp_value(gamma) == Ordering::Equal)
            .map(|w| w.multiplicity)
            .sum()
    }
}

/// The indicial quadratic `q(x) = x (x + m - 2)`.
pub fn indicial_value(x: &Rat, m: u32) -> Rat {
    x * (x + rat_i64(m as i64 - 2))
}

/// Both roots of `gamma (gamma + m - 2) = e`, exact.
///
/// `gamma_plus >= 0 >= 2 - m >= gamma_minus`.
pub fn gamma_pair(e: &Rat, m: u32) -> Result<(QuadExt, QuadExt)> {
    if m < 3 {
        return Err(Error::Domain(format!("cone dimension m must be >= 3, got {m}")));
    }
    if e.is_negative() {
        return Err(Error::Domain(format!(
            "link eigenvalue must be nonnegative, got {e}"
        )));
    }
    // e = p/q: discriminant (2-m)^2 + 4e = ((m-2)^2 q^2 + 4 p q) / q^2
    let p = e.numer();
    let q = e.denom();
    let m2 = BigInt::from(m as i64 - 2);
    let radicand = (&m2 * &m2 * q * q + BigInt::from(4) * p * q)
        .to_biguint()
        .expect("nonnegative discriminant");
    let half = Rat::new(BigInt::from(2 - m as i64), BigInt::from(2));
    let coef = Rat::new(BigInt::from(1), BigInt::from(2) * q);
    let plus = QuadExt::new(half.clone(), coef.clone(), radicand.clone());
    let minus = QuadExt::new(half, -coef, radicand);
    Ok((plus, minus))
}

/// Floating-point version for mesh spectra.
pub fn gamma_pair_f64(e: f64, m: u32) -> Result<(f64, f64)> {
    if m < 3 {
        return Err(Error::Domain(format!("cone dimension m must be >= 3, got {m}")));
    }
    if e < 0.0 {
        return Err(Error::Domain(format!(
            "link eigenvalue must be nonnegative, got {e}"
        )));
    }
    let half = (2.0 - m as f64) / 2.0;
    let disc = ((m as f64 - 2.0).powi(2) + 4.0 * e).sqrt() / 2.0;
    Ok((half + disc, half - disc))
}

/// Eigenvalue cutoff a spectrum must reach before `[a, b]` can be scanned
/// completely: `max(q(a), q(b), 0)`.
pub fn required_cutoff(m: u32, a: &Rat, b: &Rat) -> Rat {
    let qa = indicial_value(a, m);
    let qb = indicial_value(b, m);
    qa.max(qb).max(Rat::zero())
}

fn completeness_check(
    spectrum: &LinkSpectrum,
    required: &Rat,
    end_index: usize,
) -> Result<()> {
    if spectrum.cutoff.covers_rat(required) {
        Ok(())
    } else {
        Err(Error::Completeness {
            end_index: Some(end_index),
            required: rational_string(required),
            available: spectrum.cutoff.display_string(),
        })
    }
}

/// All exceptional weights of one end inside `[a, b]`, sorted ascending with
/// multiplicities. Fails with the required cutoff if the spectrum is too
/// short to certify completeness.
pub fn exceptional_in_interval(
    spectrum: &LinkSpectrum,
    m: u32,
    a: &Rat,
    b: &Rat,
    end_index: usize,
) -> Result<Vec<WeightValue>> {
    if a > b {
        return Err(Error::Domain(format!("invalid interval: {a} > {b}")));
    }
    completeness_check(spectrum, &required_cutoff(m, a, b), end_index)?;
    let (af, bf) = (rat_to_f64(a), rat_to_f64(b));
    let mut out: Vec<WeightValue> = Vec::new();
    // minus branch is decreasing in e: reversed iteration keeps output sorted
    for entry in spectrum.entries.iter().rev() {
        match &entry.value {
            Scalar::Exact(e) => {
                let (_, minus) = gamma_pair(e, m)?;
                if minus.cmp_rat(a) != Ordering::Less && minus.cmp_rat(b) != Ordering::Greater {
                    out.push(WeightValue {
                        gamma: GammaValue::Exact(minus),
                        multiplicity: entry.multiplicity,
                        end_index,
                    });
                }
            }
            Scalar::Approx(e) => {
                let (_, minus) = gamma_pair_f64(*e, m)?;
                if minus >= af && minus <= bf {
                    out.push(WeightValue {
                        gamma: GammaValue::Approx(minus),
                        multiplicity: entry.multiplicity,
                        end_index,
                    });
                }
            }
        }
    }
    for entry in &spectrum.entries {
        match &entry.value {
            Scalar::Exact(e) => {
                let (plus, _) = gamma_pair(e, m)?;
                if plus.cmp_rat(a) != Ordering::Less && plus.cmp_rat(b) != Ordering::Greater {
                    out.push(WeightValue {
                        gamma: GammaValue::Exact(plus),
                        multiplicity: entry.multiplicity,
                        end_index,
                    });
                }
            }
            Scalar::Approx(e) => {
                let (plus, _) = gamma_pair_f64(*e, m)?;
                if plus >= af && plus <= bf {
                    out.push(WeightValue {
                        gamma: GammaValue::Approx(plus),
                        multiplicity: entry.multiplicity,
                        end_index,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Per-end exceptional sets over `[a, b]` for a whole conifold.
pub fn exceptional_set(
    ends: &[&LinkSpectrum],
    m: u32,
    a: &Rat,
    b: &Rat,
) -> Result<ExceptionalSet> {
    let per_end = ends
        .iter()
        .enumerate()
        .map(|(i, s)| exceptional_in_interval(s, m, a, b, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExceptionalSet {
        interval: (rational_string(a), rational_string(b)),
        per_end,
    })
}

/// Sum of exceptional multiplicities of one end over an interval with
/// explicit endpoint conventions.
pub fn multiplicity_in_interval(
    spectrum: &LinkSpectrum,
    m: u32,
    lo: &Rat,
    hi: &Rat,
    include_lo: bool,
    include_hi: bool,
    end_index: usize,
) -> Result<u64> {
    if lo > hi {
        return Ok(0);
    }
    let list = exceptional_in_interval(spectrum, m, lo, hi, end_index)?;
    Ok(list
        .iter()
        .filter(|w| {
            (include_lo || !w.gamma.coincides_with_rat(lo))
                && (include_hi || !w.gamma.coincides_with_rat(hi))
        })
        .map(|w| w.multiplicity)
        .sum())
}

/// Witness returned when a weight vector hits the exceptional set.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalWitness {
    pub end_index: usize,
    pub weight: String,
    #[serde(flatten)]
    pub gamma: WeightValue,
    pub approximate: bool,
}

impl ExceptionalWitness {
    pub fn to_error(&self) -> Error {
        Error::ExceptionalRate {
            end_index: self.end_index,
            weight: self.weight.clone(),
            gamma: self.gamma.gamma.symbol(),
            multiplicity: self.gamma.multiplicity,
            approximate: self.approximate,
        }
    }
}

/// Fredholm test: is the weight vector disjoint from the exceptional set?
///
/// Returns `None` when every component is non-exceptional, otherwise the
/// witness for the first offending end. Exact spectra are matched exactly;
/// floating-point eigenvalues match when
/// `|beta (beta + m - 2) - e| <= match_tol * max(1, e)`.
pub fn check_nonexceptional(
    ends: &[&LinkSpectrum],
    m: u32,
    weights: &[Rat],
    match_tol: f64,
) -> Result<Option<ExceptionalWitness>> {
    if ends.len() != weights.len() {
        return Err(Error::Domain(format!(
            "{} weights supplied for {} ends",
            weights.len(),
            ends.len()
        )));
    }
    for (i, (spectrum, beta)) in ends.iter().zip(weights).enumerate() {
        let q = indicial_value(beta, m);
        if q.is_positive() || q.is_zero() {
            completeness_check(spectrum, &q, i)?;
        }
        let qf = rat_to_f64(&q);
        for entry in &spectrum.entries {
            let hit = match &entry.value {
                Scalar::Exact(e) => {
                    if e == &q {
                        Some((GammaValue::Exact(QuadExt::from_rat(beta.clone())), false))
                    } else {
                        None
                    }
                }
                Scalar::Approx(e) => {
                    if (qf - e).abs() <= match_tol * e.abs().max(1.0) {
                        Some((GammaValue::Approx(rat_to_f64(beta)), true))
                    } else {
                        None
                    }
                }
            };
            if let Some((gamma, approximate)) = hit {
                return Ok(Some(ExceptionalWitness {
                    end_index: i,
                    weight: rational_string(beta),
                    gamma: WeightValue {
                        gamma,
                        multiplicity: entry.multiplicity,
                        end_index: i,
                    },
                    approximate,
                }));
            }
        }
    }
    Ok(None)
}

/// Nearest exceptional weight within `radius` of one weight component.
#[derive(Clone, Debug, Serialize)]
pub struct NearestExceptional {
    #[serde(flatten)]
    pub nearest: WeightValue,
    pub distance: String,
    pub distance_decimal: f64,
}

/// For each end, the closest exceptional weight to `beta_i` within the given
/// search radius (`None` when the window is clean).
pub fn nearest_exceptional(
    ends: &[&LinkSpectrum],
    m: u32,
    weights: &[Rat],
    radius: &Rat,
) -> Result<Vec<Option<NearestExceptional>>> {
    if !radius.is_positive() {
        return Err(Error::Domain("search radius must be positive".into()));
    }
    if ends.len() != weights.len() {
        return Err(Error::Domain(format!(
            "{} weights supplied for {} ends",
            weights.len(),
            ends.len()
        )));
    }
    let mut out = Vec::with_capacity(ends.len());
    for (i, (spectrum, beta)) in ends.iter().zip(weights).enumerate() {
        let lo = beta - radius;
        let hi = beta + radius;
        let candidates = exceptional_in_interval(spectrum, m, &lo, &hi, i)?;
        let mut best: Option<(WeightValue, GammaValue)> = None;
        for c in candidates {
            let dist = match &c.gamma {
                GammaValue::Exact(g) => GammaValue::Exact(g.sub_rat(beta).abs()),
                GammaValue::Approx(g) => GammaValue::Approx((g - rat_to_f64(beta)).abs()),
            };
            let better = match &best {
                None => true,
                Some((_, d)) => dist.cmp_value(d) == Ordering::Less,
            };
            if better {
                best = Some((c, dist));
            }
        }
        out.push(best.map(|(nearest, distance)| NearestExceptional {
            nearest,
            distance: distance.symbol(),
            distance_decimal: distance.to_f64(),
        }));
    }
    Ok(out)
}
