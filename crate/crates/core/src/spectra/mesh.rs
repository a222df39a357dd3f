//! Triangle-mesh surfaces: OFF ingestion, cotangent FEM assembly, spectra.
//!
//! The stiffness matrix uses the classic cotangent weights and the mass
//! matrix is lumped (barycentric thirds), so the generalized problem reduces
//! to a standard symmetric one by diagonal scaling. Cotangent weights only
//! depend on triangle edge lengths; a mesh may carry explicit per-triangle
//! lengths for intrinsically flat surfaces (a flat torus has no isometric
//! embedding in R^3) while OFF meshes always measure lengths from positions.

use std::collections::BTreeMap;
use std::path::Path;

use super::eigen::{smallest_eigenpairs, Csr};
use super::{EigenvalueEntry, LinkSpectrum};
use crate::error::{Error, Result};
use crate::exact::{Cutoff, Scalar};

/// Closed triangle mesh, optionally with intrinsic edge lengths.
#[derive(Clone, Debug)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// Per-triangle edge lengths `[l0, l1, l2]`, `l_i` opposite corner `i`.
    /// `None` means lengths are measured from vertex positions.
    pub intrinsic_lengths: Option<Vec<[f64; 3]>>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Self {
        TriangleMesh {
            vertices,
            triangles,
            intrinsic_lengths: None,
        }
    }

    /// Parse an ASCII OFF file.
    pub fn from_off_str(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace().map(str::to_owned).collect::<Vec<_>>());
        let header = tokens
            .next()
            .ok_or_else(|| Error::Structural("empty OFF file".into()))?;
        if header != "OFF" {
            return Err(Error::Structural(format!(
                "expected OFF header, found '{header}'"
            )));
        }
        let mut next_usize = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Structural(format!("OFF: missing {what}")))?
                .parse()
                .map_err(|_| Error::Structural(format!("OFF: invalid {what}")))
        };
        let nv = next_usize("vertex count")?;
        let nf = next_usize("face count")?;
        let _ne = next_usize("edge count")?;
        let mut next_f64 = |what: &str| -> Result<f64> {
            tokens
                .next()
                .ok_or_else(|| Error::Structural(format!("OFF: missing {what}")))?
                .parse()
                .map_err(|_| Error::Structural(format!("OFF: invalid {what}")))
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            vertices.push([
                next_f64("vertex coordinate")?,
                next_f64("vertex coordinate")?,
                next_f64("vertex coordinate")?,
            ]);
        }
        let mut next_usize = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Structural(format!("OFF: missing {what}")))?
                .parse()
                .map_err(|_| Error::Structural(format!("OFF: invalid {what}")))
        };
        let mut triangles = Vec::with_capacity(nf);
        for _ in 0..nf {
            let arity = next_usize("face arity")?;
            if arity != 3 {
                return Err(Error::Structural(format!(
                    "only triangle faces are supported, found {arity}-gon"
                )));
            }
            triangles.push([
                next_usize("face index")?,
                next_usize("face index")?,
                next_usize("face index")?,
            ]);
        }
        Ok(TriangleMesh::new(vertices, triangles))
    }

    pub fn from_off_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Structural(format!("cannot read {}: {e}", path.display())))?;
        Self::from_off_str(&text)
    }

    pub fn to_off_string(&self) -> String {
        let mut out = String::from("OFF\n");
        out.push_str(&format!("{} {} 0\n", self.vertices.len(), self.triangles.len()));
        for v in &self.vertices {
            out.push_str(&format!("{} {} {}\n", v[0], v[1], v[2]));
        }
        for t in &self.triangles {
            out.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
        }
        out
    }

    /// Edge lengths of triangle `t`, opposite each corner.
    fn corner_lengths(&self, t: usize) -> [f64; 3] {
        if let Some(lengths) = &self.intrinsic_lengths {
            return lengths[t];
        }
        let [a, b, c] = self.triangles[t];
        let d = |p: usize, q: usize| -> f64 {
            let (u, v) = (self.vertices[p], self.vertices[q]);
            ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt()
        };
        [d(b, c), d(c, a), d(a, b)]
    }

    fn heron_area(l: [f64; 3]) -> f64 {
        let s = 0.5 * (l[0] + l[1] + l[2]);
        let sq = s * (s - l[0]) * (s - l[1]) * (s - l[2]);
        if sq <= 0.0 {
            0.0
        } else {
            sq.sqrt()
        }
    }

    /// Structural validation: index bounds, edge-manifold closedness, no
    /// degenerate triangles. Returns the number of connected components.
    pub fn validate_closed(&self) -> Result<usize> {
        let n = self.vertices.len();
        if let Some(lengths) = &self.intrinsic_lengths {
            if lengths.len() != self.triangles.len() {
                return Err(Error::Structural(
                    "intrinsic length table does not match triangle count".into(),
                ));
            }
        }
        let mut edge_count: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(Error::Structural(format!(
                        "triangle {t} references vertex {v} out of {n}"
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Structural(format!("triangle {t} repeats a vertex")));
            }
            let l = self.corner_lengths(t);
            if Self::heron_area(l) <= 1e-14 {
                return Err(Error::Structural(format!(
                    "triangle {t} is degenerate (zero area)"
                )));
            }
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let key = (a.min(b), a.max(b));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        for (&(a, b), &cnt) in &edge_count {
            if cnt != 2 {
                return Err(Error::Structural(format!(
                    "edge ({a},{b}) lies in {cnt} triangles; a closed edge-manifold mesh needs exactly 2"
                )));
            }
        }
        // connected components over used vertices (union-find)
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut used = vec![false; n];
        for tri in &self.triangles {
            for &v in tri {
                used[v] = true;
            }
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2])] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut roots = std::collections::BTreeSet::new();
        for (v, &is_used) in used.iter().enumerate() {
            if is_used {
                roots.insert(find(&mut parent, v));
            }
        }
        if roots.is_empty() {
            return Err(Error::Structural("mesh has no triangles".into()));
        }
        Ok(roots.len())
    }

    /// Cotangent stiffness matrix and lumped diagonal mass matrix.
    pub fn assemble(&self) -> (Csr, Vec<f64>) {
        let n = self.vertices.len();
        let mut stiff: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut mass = vec![0.0f64; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            let l = self.corner_lengths(t);
            let area = Self::heron_area(l);
            for &v in tri {
                mass[v] += area / 3.0;
            }
            // cot(angle at corner i) = (l_j^2 + l_k^2 - l_i^2) / (4 area)
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let cot = (l[j] * l[j] + l[k] * l[k] - l[i] * l[i]) / (4.0 * area);
                let w = 0.5 * cot;
                let (a, b) = (tri[j], tri[k]);
                *stiff.entry((a, a)).or_insert(0.0) += w;
                *stiff.entry((b, b)).or_insert(0.0) += w;
                *stiff.entry((a, b)).or_insert(0.0) -= w;
                *stiff.entry((b, a)).or_insert(0.0) -= w;
            }
        }
        (Csr::from_entries(n, &stiff), mass)
    }
}

/// Numerical Laplace–Beltrami spectrum of a closed triangle mesh.
///
/// Computes the `count` smallest generalized eigenvalues, then clusters
/// values whose relative gap `|e_{i+1} - e_i| / max(e_i, 1)` is below
/// `cluster_tol` into single entries with summed multiplicity. If the final
/// cluster continues past `count` it is completed from the solver's buffer,
/// so every eigenvalue below the reported cutoff is present with its full
/// clustered multiplicity.
pub fn mesh_spectrum(mesh: &TriangleMesh, count: usize, cluster_tol: f64) -> Result<LinkSpectrum> {
    if count == 0 {
        return Err(Error::Domain("count must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&cluster_tol) {
        return Err(Error::Domain("cluster_tol must lie in [0, 1)".into()));
    }
    let components = mesh.validate_closed()?;
    let (stiff, mass) = mesh.assemble();
    let pairs = smallest_eigenpairs(&stiff, &mass, count, 1e-8)?;
    let close = |a: f64, b: f64| (b - a).abs() < cluster_tol * a.abs().max(1.0);

    // absorb the tail of the final cluster from the converged buffer
    let mut take = count;
    while take < pairs.len() && close(pairs[take - 1].value, pairs[take].value) {
        take += 1;
    }
    if take == pairs.len() && take > count {
        return Err(Error::Numeric(
            "final eigenvalue cluster extends past the converged buffer; increase count".into(),
        ));
    }
    for pair in pairs.iter().take(take).skip(count) {
        if pair.residual > 1e-8 {
            return Err(Error::Numeric(format!(
                "cluster completion at {:.6e} has residual {:.3e} above 1e-8; increase count",
                pair.value, pair.residual
            )));
        }
    }

    let mut entries: Vec<EigenvalueEntry> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    let flush = |cluster: &mut Vec<f64>, entries: &mut Vec<EigenvalueEntry>| {
        if !cluster.is_empty() {
            let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
            entries.push(EigenvalueEntry {
                value: Scalar::Approx(mean),
                multiplicity: cluster.len() as u64,
            });
            cluster.clear();
        }
    };
    for pair in pairs.iter().take(take) {
        if let Some(&last) = cluster.last() {
            if !close(last, pair.value) {
                flush(&mut cluster, &mut entries);
            }
        }
        cluster.push(pair.value);
    }
    flush(&mut cluster, &mut entries);

    // the zero cluster is exactly zero on a closed mesh
    if let Some(first) = entries.first_mut() {
        if first.value.to_f64().abs() < 1e-6 {
            first.value = Scalar::Approx(0.0);
        }
    }

    let cutoff = pairs[take - 1].value;
    Ok(LinkSpectrum {
        dim_link: 2,
        connected: components == 1,
        cutoff: Cutoff::At(Scalar::Approx(cutoff)),
        entries,
    })
}

/// Mesh generators for the analytic reference surfaces.
pub mod meshgen {
    use super::TriangleMesh;
    use std::collections::BTreeMap;

    /// Icosphere: subdivided icosahedron projected to the unit sphere.
    /// `subdivisions = 4` gives 2562 vertices.
    pub fn icosphere(subdivisions: u32) -> TriangleMesh {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let verts = [
            [-1.0, phi, 0.0],
            [1.0, phi, 0.0],
            [-1.0, -phi, 0.0],
            [1.0, -phi, 0.0],
            [0.0, -1.0, phi],
            [0.0, 1.0, phi],
            [0.0, -1.0, -phi],
            [0.0, 1.0, -phi],
            [phi, 0.0, -1.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, -1.0],
            [-phi, 0.0, 1.0],
        ];
        let faces: [[usize; 3]; 20] = [
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        let normalize = |v: [f64; 3]| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        let mut vertices: Vec<[f64; 3]> = verts.iter().map(|&v| normalize(v)).collect();
        let mut triangles: Vec<[usize; 3]> = faces.to_vec();
        for _ in 0..subdivisions {
            let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let mut next = Vec::with_capacity(triangles.len() * 4);
            for tri in &triangles {
                let mut mid = [0usize; 3];
                for i in 0..3 {
                    let (a, b) = (tri[i], tri[(i + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    mid[i] = *midpoint.entry(key).or_insert_with(|| {
                        let (p, q) = (vertices[a], vertices[b]);
                        vertices.push(normalize([
                            (p[0] + q[0]) / 2.0,
                            (p[1] + q[1]) / 2.0,
                            (p[2] + q[2]) / 2.0,
                        ]));
                        vertices.len() - 1
                    });
                }
                next.push([tri[0], mid[0], mid[2]]);
                next.push([tri[1], mid[1], mid[0]]);
                next.push([tri[2], mid[2], mid[1]]);
                next.push([mid[0], mid[1], mid[2]]);
            }
            triangles = next;
        }
        TriangleMesh::new(vertices, triangles)
    }

    /// Flat square torus `R^2 / 2*pi*Z^2` triangulated by an `n x n` grid.
    ///
    /// The intrinsic metric is supplied through per-triangle edge lengths;
    /// the stored positions are the fundamental-domain grid points.
    pub fn flat_torus_grid(n: usize) -> TriangleMesh {
        assert!(n >= 3, "torus grid needs n >= 3");
        let h = std::f64::consts::TAU / n as f64;
        let idx = |i: usize, j: usize| (i % n) * n + (j % n);
        let mut vertices = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                vertices.push([i as f64 * h, j as f64 * h, 0.0]);
            }
        }
        let diag = h * 2f64.sqrt();
        let mut triangles = Vec::with_capacity(2 * n * n);
        let mut lengths = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                // corners P=(i,j), Q=(i+1,j), R=(i+1,j+1), S=(i,j+1)
                let (p, q, r, s) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                triangles.push([p, q, r]);
                lengths.push([h, diag, h]); // opposite P, Q, R
                triangles.push([p, r, s]);
                lengths.push([h, h, diag]);
            }
        }
        let mut mesh = TriangleMesh::new(vertices, triangles);
        mesh.intrinsic_lengths = Some(lengths);
        mesh
    }
}
