//! Job configuration: a single JSON file describing the conifold and the
//! requested computations.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use conifold_core::exact::{rat_from_f64, rat_i64, scalar_from_value, Rat, Scalar};
use conifold_core::weights::required_cutoff;
use conifold_core::{
    assemble_topology, conifold_complex_from_json, flat_torus_spectrum, mesh_spectrum,
    product_spectrum, sphere_spectrum, ConeEndSpec, ConifoldModel, ConifoldTopology, EndKind,
    Error, LatticeGram, LinkSpectrum, Result, TriangleMesh,
};

/// The computations a job can request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Computation {
    Spectrum,
    Weights,
    Fredholm,
    Stability,
    Dim,
    Topology,
}

impl Computation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spectrum" => Ok(Computation::Spectrum),
            "weights" => Ok(Computation::Weights),
            "fredholm" => Ok(Computation::Fredholm),
            "stability" => Ok(Computation::Stability),
            "dim" => Ok(Computation::Dim),
            "topology" => Ok(Computation::Topology),
            other => Err(Error::Structural(format!(
                "/compute: unknown computation '{other}'"
            ))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub m: u32,
    #[serde(default)]
    pub ends: Vec<EndConfig>,
    #[serde(default)]
    pub topology: Option<TopologyConfig>,
    #[serde(default)]
    pub compute: Option<Vec<String>>,
    #[serde(default)]
    pub weight_scan: Option<ScanConfig>,
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndConfig {
    pub kind: EndKind,
    pub rate: Value,
    #[serde(default)]
    pub sym_dim: Option<u32>,
    pub link: LinkConfig,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkConfig {
    Sphere {
        #[serde(default)]
        cutoff: Option<Value>,
    },
    FlatTorus {
        gram: Vec<Vec<Value>>,
        #[serde(default)]
        cutoff: Option<Value>,
    },
    Product {
        factors: Vec<LinkConfig>,
        #[serde(default)]
        cutoff: Option<Value>,
    },
    Mesh {
        path: String,
        #[serde(default = "default_mesh_count")]
        count: usize,
        #[serde(default = "default_cluster_tol")]
        cluster_tol: f64,
    },
    Explicit(LinkSpectrum),
}

fn default_mesh_count() -> usize {
    16
}

fn default_cluster_tol() -> f64 {
    0.05
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologyConfig {
    /// Direct Betti overrides.
    Betti(ConifoldTopology),
    /// Path to a complex-pair JSON file, relative to the config file.
    Complex(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub from: Value,
    pub to: Value,
}

/// Exact rational from a config value (strings and integers exact, floats
/// converted exactly).
pub fn rat_from_value(v: &Value, pointer: &str) -> Result<Rat> {
    let scalar = scalar_from_value(v)
        .map_err(|e| Error::Structural(format!("{pointer}: {e}")))?;
    match scalar {
        Scalar::Exact(r) => Ok(r),
        Scalar::Approx(x) => rat_from_f64(x),
    }
}

pub fn load_config(path: &Path) -> Result<JobConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Structural(format!("cannot read {}: {e}", path.display())))?;
    let config: JobConfig = serde_json::from_str(&text).map_err(|e| {
        Error::Structural(format!("config {} is not valid: {e}", path.display()))
    })?;
    if let Some(compute) = &config.compute {
        if compute.is_empty() {
            return Err(Error::Structural(
                "/compute: at least one computation must be requested".into(),
            ));
        }
        for c in compute {
            Computation::parse(c)?;
        }
    }
    Ok(config)
}

/// Everything a dispatcher needs, with link spectra built at sufficient
/// cutoffs and topology resolved.
pub struct ResolvedJob {
    pub m: u32,
    pub model: Option<ConifoldModel>,
    pub topology: Option<ConifoldTopology>,
    pub rates: Vec<Rat>,
    pub scan: (Rat, Rat),
    pub format: Option<String>,
}

/// Eigenvalue cutoff one end must reach for the requested computations.
fn derived_cutoff(
    config: &JobConfig,
    end: &EndConfig,
    rate: &Rat,
    scan: &(Rat, Rat),
    computations: &[Computation],
) -> Result<Rat> {
    let m = config.m;
    let zero = Rat::from_integer(0.into());
    let stability_bound = rat_i64(2 * m as i64);
    let mut needed = required_cutoff(m, &zero, rate);
    for computation in computations {
        match computation {
            Computation::Fredholm => {}
            Computation::Dim => {
                if end.kind == EndKind::Cs {
                    needed = needed.max(stability_bound.clone());
                }
            }
            Computation::Stability => {
                needed = needed.max(stability_bound.clone());
            }
            Computation::Weights | Computation::Spectrum => {
                needed = needed
                    .max(required_cutoff(m, &scan.0, &scan.1))
                    .max(stability_bound.clone());
            }
            Computation::Topology => {}
        }
    }
    Ok(needed)
}

fn build_link(
    link: &LinkConfig,
    m: u32,
    needed: &Rat,
    base_dir: &Path,
    pointer: &str,
) -> Result<LinkSpectrum> {
    match link {
        LinkConfig::Sphere { cutoff } => {
            let cutoff = match cutoff {
                Some(v) => rat_from_value(v, &format!("{pointer}/sphere/cutoff"))?,
                None => needed.clone(),
            };
            sphere_spectrum(m, &cutoff)
        }
        LinkConfig::FlatTorus { gram, cutoff } => {
            let rows = gram
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, v)| {
                            rat_from_value(v, &format!("{pointer}/flat_torus/gram/{i}/{j}"))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let gram = LatticeGram::new(rows)?;
            let cutoff = match cutoff {
                Some(v) => rat_from_value(v, &format!("{pointer}/flat_torus/cutoff"))?,
                None => needed.clone(),
            };
            flat_torus_spectrum(&gram, &cutoff)
        }
        LinkConfig::Product { factors, cutoff } => {
            let cutoff = match cutoff {
                Some(v) => rat_from_value(v, &format!("{pointer}/product/cutoff"))?,
                None => needed.clone(),
            };
            let mut built: Option<LinkSpectrum> = None;
            for (i, factor) in factors.iter().enumerate() {
                let f = build_link(
                    factor,
                    m,
                    &cutoff,
                    base_dir,
                    &format!("{pointer}/product/factors/{i}"),
                )?;
                built = Some(match built {
                    None => f,
                    Some(acc) => {
                        product_spectrum(&acc, &f, &Scalar::Exact(cutoff.clone()))?
                    }
                });
            }
            built.ok_or_else(|| {
                Error::Structural(format!("{pointer}/product/factors: needs at least one factor"))
            })
        }
        LinkConfig::Mesh {
            path,
            count,
            cluster_tol,
        } => {
            let mesh_path = base_dir.join(path);
            let mesh = TriangleMesh::from_off_path(&mesh_path)?;
            mesh_spectrum(&mesh, *count, *cluster_tol)
        }
        LinkConfig::Explicit(spectrum) => {
            spectrum.validate()?;
            Ok(spectrum.clone())
        }
    }
}

/// Build spectra/model/topology for the requested computations.
pub fn resolve(
    config: &JobConfig,
    config_path: &Path,
    computations: &[Computation],
) -> Result<ResolvedJob> {
    let base_dir = config_path
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    if config.m < 3 {
        return Err(Error::Structural(format!(
            "/m: must be >= 3, got {}",
            config.m
        )));
    }
    let scan = match &config.weight_scan {
        Some(s) => (
            rat_from_value(&s.from, "/weight_scan/from")?,
            rat_from_value(&s.to, "/weight_scan/to")?,
        ),
        // default window: from the gap edge up to the stability bound
        None => (rat_i64(2 - config.m as i64), rat_i64(2)),
    };
    if scan.0 > scan.1 {
        return Err(Error::Structural(
            "/weight_scan: 'from' must not exceed 'to'".into(),
        ));
    }
    for computation in computations {
        let needs_ends = !matches!(computation, Computation::Topology | Computation::Dim);
        if needs_ends && config.ends.is_empty() {
            return Err(Error::Structural(format!(
                "/ends: computation '{computation:?}' needs at least one end"
            )));
        }
    }
    let mut rates = Vec::new();
    let mut ends = Vec::new();
    for (i, end) in config.ends.iter().enumerate() {
        let rate = rat_from_value(&end.rate, &format!("/ends/{i}/rate"))?;
        let needed = derived_cutoff(config, end, &rate, &scan, computations)?;
        let spectrum = build_link(&end.link, config.m, &needed, &base_dir, &format!("/ends/{i}/link"))?;
        rates.push(rate.clone());
        ends.push(ConeEndSpec {
            kind: end.kind,
            spectrum,
            rate,
            sym_dim: end.sym_dim,
        });
    }
    let topology = match &config.topology {
        None => None,
        Some(TopologyConfig::Betti(t)) => {
            t.validate()?;
            Some(t.clone())
        }
        Some(TopologyConfig::Complex(rel)) => {
            let path = base_dir.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Structural(format!("/topology/complex: cannot read {}: {e}", path.display()))
            })?;
            let complex = conifold_complex_from_json(&text)?;
            Some(assemble_topology(&complex)?)
        }
    };
    let model = if ends.is_empty() {
        None
    } else {
        let model = ConifoldModel {
            m: config.m,
            ends,
            topology: topology.clone(),
        };
        model.validate()?;
        Some(model)
    };
    Ok(ResolvedJob {
        m: config.m,
        model,
        topology,
        rates,
        scan,
        format: config.format.clone(),
    })
}
