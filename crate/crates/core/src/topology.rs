//! Simplicial cohomology over Q by exact elimination.
//!
//! Conifolds enter as compact manifolds with boundary: an ambient complex
//! modelling the manifold and one boundary subcomplex per link, tagged CS or
//! AC. Everything downstream of the dimension formulas (Betti numbers,
//! relative variants, restriction ranks) reduces to ranks of integer
//! incidence matrices, computed over the rationals so the answers are exact
//! and ordering-independent.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::exact::{rat_i64, Rat};
use crate::fredholm::EndKind;

/// A finite simplicial complex; simplices are sorted vertex lists, grouped
/// by dimension, closed under taking faces.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    n_vertices: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Build the downward closure of a set of facets.
    pub fn from_facets(n_vertices: usize, facets: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<HashSet<Vec<usize>>> = Vec::new();
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Structural(format!("simplex {f:?} repeats a vertex")));
            }
            if s.iter().any(|&v| v >= n_vertices) {
                return Err(Error::Structural(format!(
                    "simplex {f:?} references a vertex out of range"
                )));
            }
            insert_with_faces(&mut by_dim, s);
        }
        let simplices = by_dim
            .into_iter()
            .map(|set| {
                let mut v: Vec<Vec<usize>> = set.into_iter().collect();
                v.sort();
                v
            })
            .collect();
        Ok(SimplicialComplex {
            n_vertices,
            simplices,
        })
    }

    /// Build from explicit per-dimension lists, checking closure.
    pub fn from_simplices(n_vertices: usize, lists: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut seen: Vec<HashSet<Vec<usize>>> = Vec::new();
        for (dim, list) in lists.iter().enumerate() {
            let mut set = HashSet::new();
            for raw in list {
                let mut s = raw.clone();
                s.sort_unstable();
                if s.len() != dim + 1 || s.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Structural(format!(
                        "simplex {raw:?} is not a valid {dim}-simplex"
                    )));
                }
                if s.iter().any(|&v| v >= n_vertices) {
                    return Err(Error::Structural(format!(
                        "simplex {raw:?} references a vertex out of range"
                    )));
                }
                if !set.insert(s) {
                    return Err(Error::Structural(format!("duplicate simplex {raw:?}")));
                }
            }
            seen.push(set);
        }
        for dim in 1..seen.len() {
            for s in &seen[dim] {
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    if !seen[dim - 1].contains(&face) {
                        return Err(Error::Structural(format!(
                            "face {face:?} of {s:?} is missing"
                        )));
                    }
                }
            }
        }
        let simplices = seen
            .into_iter()
            .map(|set| {
                let mut v: Vec<Vec<usize>> = set.into_iter().collect();
                v.sort();
                v
            })
            .collect();
        Ok(SimplicialComplex {
            n_vertices,
            simplices,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn dim(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    pub fn simplices_of_dim(&self, k: usize) -> &[Vec<usize>] {
        self.simplices
            .get(k)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        let k = simplex.len().saturating_sub(1);
        self.simplices_of_dim(k)
            .binary_search_by(|s| s.as_slice().cmp(simplex))
            .is_ok()
    }

    pub fn is_subcomplex_of(&self, other: &Self) -> bool {
        self.simplices
            .iter()
            .flatten()
            .all(|s| other.contains(s))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(dim, list)| {
                let count = list.len() as i64;
                if dim % 2 == 0 {
                    count
                } else {
                    -count
                }
            })
            .sum()
    }

    pub fn vertices_used(&self) -> HashSet<usize> {
        self.simplices
            .iter()
            .flatten()
            .flat_map(|s| s.iter().copied())
            .collect()
    }

    fn is_disjoint_from(&self, other: &Self) -> bool {
        self.vertices_used().is_disjoint(&other.vertices_used())
    }
}

fn insert_with_faces(by_dim: &mut Vec<HashSet<Vec<usize>>>, simplex: Vec<usize>) {
    let dim = simplex.len() - 1;
    while by_dim.len() <= dim {
        by_dim.push(HashSet::new());
    }
    if !by_dim[dim].insert(simplex.clone()) {
        return;
    }
    if dim > 0 {
        for i in 0..simplex.len() {
            let mut face = simplex.clone();
            face.remove(i);
            insert_with_faces(by_dim, face);
        }
    }
}

/// Ambient complex with one boundary subcomplex.
#[derive(Clone, Debug)]
pub struct ComplexPair {
    pub ambient: SimplicialComplex,
    pub boundary: SimplicialComplex,
}

impl ComplexPair {
    pub fn new(ambient: SimplicialComplex, boundary: SimplicialComplex) -> Result<Self> {
        if !boundary.is_subcomplex_of(&ambient) {
            return Err(Error::Structural(
                "boundary is not a subcomplex of the ambient complex".into(),
            ));
        }
        Ok(ComplexPair { ambient, boundary })
    }

    pub fn rel_empty(ambient: SimplicialComplex) -> Self {
        let n = ambient.n_vertices();
        ComplexPair {
            ambient,
            boundary: SimplicialComplex {
                n_vertices: n,
                simplices: Vec::new(),
            },
        }
    }
}

/// Ambient complex with tagged link components.
#[derive(Clone, Debug)]
pub struct ConifoldComplex {
    pub ambient: SimplicialComplex,
    pub components: Vec<(EndKind, SimplicialComplex)>,
}

impl ConifoldComplex {
    pub fn new(
        ambient: SimplicialComplex,
        components: Vec<(EndKind, SimplicialComplex)>,
    ) -> Result<Self> {
        for (i, (_, c)) in components.iter().enumerate() {
            if !c.is_subcomplex_of(&ambient) {
                return Err(Error::Structural(format!(
                    "link component {i} is not a subcomplex of the ambient complex"
                )));
            }
            if betti(c, 0)? != 1 {
                return Err(Error::Structural(format!(
                    "link component {i} must be connected"
                )));
            }
            for (j, (_, d)) in components.iter().enumerate().take(i) {
                if !c.is_disjoint_from(d) {
                    return Err(Error::Structural(format!(
                        "link components {j} and {i} overlap"
                    )));
                }
            }
        }
        Ok(ConifoldComplex {
            ambient,
            components,
        })
    }

    /// Union of the components with the given tag (all tags when `None`).
    pub fn link_union(&self, tag: Option<EndKind>) -> SimplicialComplex {
        let mut by_dim: Vec<HashSet<Vec<usize>>> = Vec::new();
        for (t, c) in &self.components {
            if tag.map(|want| *t == want).unwrap_or(true) {
                for list in &c.simplices {
                    for s in list {
                        insert_with_faces(&mut by_dim, s.clone());
                    }
                }
            }
        }
        let simplices = by_dim
            .into_iter()
            .map(|set| {
                let mut v: Vec<Vec<usize>> = set.into_iter().collect();
                v.sort();
                v
            })
            .collect();
        SimplicialComplex {
            n_vertices: self.ambient.n_vertices(),
            simplices,
        }
    }
}

/// Betti-number data of a conifold consumed by the dimension formulas.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConifoldTopology {
    /// dim H^1(L)
    pub b1: usize,
    /// dim H^1(L rel all links)
    pub b1_c: usize,
    /// dim H^1(L rel CS links only)
    pub b1_c_bullet: usize,
    /// total ends
    pub e: usize,
    /// CS ends
    pub s: usize,
    /// AC ends
    pub l: usize,
    /// rank of H^1(L) -> H^1(CS links)
    pub rank_restriction_to_cs_links: usize,
}

impl ConifoldTopology {
    /// dim of the image of compactly-supported classes in H^1.
    pub fn dim_h1_tilde_c(&self) -> i64 {
        self.b1_c as i64 - self.e as i64 + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.e != self.s + self.l {
            return Err(Error::Structural(format!(
                "end counts disagree: e = {} but s + l = {}",
                self.e,
                self.s + self.l
            )));
        }
        if self.dim_h1_tilde_c() < 0 {
            return Err(Error::Structural(format!(
                "b1_c - e + 1 = {} is negative; Betti data is inconsistent",
                self.dim_h1_tilde_c()
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// exact linear algebra

/// Row-major rational matrix for rank and kernel computations.
struct QMat {
    rows: Vec<Vec<Rat>>,
    ncols: usize,
}

impl QMat {
    fn new(rows: Vec<Vec<Rat>>, ncols: usize) -> Self {
        QMat { rows, ncols }
    }

    fn rank(mut self) -> usize {
        let mut rank = 0usize;
        let nrows = self.rows.len();
        for col in 0..self.ncols {
            let Some(p) = (rank..nrows).find(|&r| !self.rows[r][col].is_zero()) else {
                continue;
            };
            self.rows.swap(p, rank);
            for r in rank + 1..nrows {
                if !self.rows[r][col].is_zero() {
                    let f = &self.rows[r][col] / &self.rows[rank][col];
                    for c in col..self.ncols {
                        let sub = &f * &self.rows[rank][c];
                        self.rows[r][c] -= sub;
                    }
                }
            }
            rank += 1;
            if rank == nrows {
                break;
            }
        }
        rank
    }

    /// Basis of the right kernel.
    #[allow(clippy::needless_range_loop)]
    fn kernel_basis(mut self) -> Vec<Vec<Rat>> {
        let nrows = self.rows.len();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.ncols];
        let mut rank = 0usize;
        for col in 0..self.ncols {
            let Some(p) = (rank..nrows).find(|&r| !self.rows[r][col].is_zero()) else {
                continue;
            };
            self.rows.swap(p, rank);
            let piv = self.rows[rank][col].clone();
            for c in col..self.ncols {
                self.rows[rank][c] /= piv.clone();
            }
            for r in 0..nrows {
                if r != rank && !self.rows[r][col].is_zero() {
                    let f = self.rows[r][col].clone();
                    for c in col..self.ncols {
                        let sub = &f * &self.rows[rank][c];
                        self.rows[r][c] -= sub;
                    }
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
            if rank == nrows {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![Rat::zero(); self.ncols];
            v[free] = rat_i64(1);
            for col in 0..self.ncols {
                if let Some(r) = pivot_of_col[col] {
                    v[col] = -self.rows[r][free].clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Index of each simplex inside its dimension list, minus those in `excluded`.
fn relative_index(
    complex: &SimplicialComplex,
    excluded: Option<&SimplicialComplex>,
    k: usize,
) -> (Vec<usize>, HashMap<Vec<usize>, usize>) {
    let mut keep = Vec::new();
    let mut index = HashMap::new();
    for (i, s) in complex.simplices_of_dim(k).iter().enumerate() {
        if excluded.map(|a| a.contains(s)).unwrap_or(false) {
            continue;
        }
        index.insert(s.clone(), keep.len());
        keep.push(i);
    }
    (keep, index)
}

/// Coboundary matrix `delta_k : C^k -> C^{k+1}` of the (relative) cochain
/// complex; rows are (k+1)-simplices, columns are k-simplices.
fn coboundary(
    complex: &SimplicialComplex,
    excluded: Option<&SimplicialComplex>,
    k: usize,
) -> QMat {
    let (_, col_index) = relative_index(complex, excluded, k);
    let (rows_keep, _) = relative_index(complex, excluded, k + 1);
    let ncols = col_index.len();
    let mut rows = Vec::with_capacity(rows_keep.len());
    for &i in &rows_keep {
        let s = &complex.simplices_of_dim(k + 1)[i];
        let mut row = vec![Rat::zero(); ncols];
        for (pos, _) in s.iter().enumerate() {
            let mut face = s.clone();
            face.remove(pos);
            if let Some(&c) = col_index.get(&face) {
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                row[c] += rat_i64(sign);
            }
        }
        rows.push(row);
    }
    QMat::new(rows, ncols)
}

fn cochain_dim(complex: &SimplicialComplex, excluded: Option<&SimplicialComplex>, k: usize) -> usize {
    relative_index(complex, excluded, k).1.len()
}

fn cohomology_dim(
    complex: &SimplicialComplex,
    excluded: Option<&SimplicialComplex>,
    k: usize,
) -> usize {
    let dim_k = cochain_dim(complex, excluded, k);
    let rank_out = coboundary(complex, excluded, k).rank();
    let rank_in = if k == 0 {
        0
    } else {
        coboundary(complex, excluded, k - 1).rank()
    };
    dim_k - rank_out - rank_in
}

/// `dim H^k(K; Q)`.
pub fn betti(complex: &SimplicialComplex, k: usize) -> Result<usize> {
    Ok(cohomology_dim(complex, None, k))
}

/// `dim H^k(K, A; Q)` for a pair.
pub fn relative_betti(pair: &ComplexPair, k: usize) -> Result<usize> {
    if !pair.boundary.is_subcomplex_of(&pair.ambient) {
        return Err(Error::Structural(
            "boundary is not a subcomplex of the ambient complex".into(),
        ));
    }
    Ok(cohomology_dim(&pair.ambient, Some(&pair.boundary), k))
}

/// Rank and kernel dimension of the restriction `H^k(K) -> H^k(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionRank {
    pub rank: usize,
    pub kernel_dim: usize,
}

pub fn restriction_rank(pair: &ComplexPair, k: usize) -> Result<RestrictionRank> {
    if !pair.boundary.is_subcomplex_of(&pair.ambient) {
        return Err(Error::Structural(
            "boundary is not a subcomplex of the ambient complex".into(),
        ));
    }
    let bk = betti(&pair.ambient, k)?;
    // cocycles of K, restricted to the k-simplices of A, modulo coboundaries
    // of A: rank([restrict(Z_K); Im(delta_A^{k-1})]) - rank(Im(delta_A^{k-1}))
    let cocycles = coboundary(&pair.ambient, None, k).kernel_basis();
    let (_, a_index) = relative_index(&pair.boundary, None, k);
    let (_, k_index) = relative_index(&pair.ambient, None, k);
    let ncols_a = a_index.len();
    let mut restricted: Vec<Vec<Rat>> = Vec::with_capacity(cocycles.len());
    for z in &cocycles {
        let mut row = vec![Rat::zero(); ncols_a];
        for (s, &ai) in &a_index {
            row[ai] = z[k_index[s]].clone();
        }
        restricted.push(row);
    }
    let cob_a = if k == 0 {
        Vec::new()
    } else {
        transpose_rows(coboundary(&pair.boundary, None, k - 1))
    };
    let rank_b = QMat::new(cob_a.clone(), ncols_a).rank();
    let mut stacked = restricted;
    stacked.extend(cob_a);
    let rank_total = QMat::new(stacked, ncols_a).rank();
    let rank = rank_total - rank_b;
    Ok(RestrictionRank {
        rank,
        kernel_dim: bk - rank,
    })
}

/// Image columns of a coboundary matrix, as row vectors in the target space.
fn transpose_rows(m: QMat) -> Vec<Vec<Rat>> {
    let nrows = m.rows.len();
    (0..m.ncols)
        .map(|c| (0..nrows).map(|r| m.rows[r][c].clone()).collect())
        .collect()
}

/// Rank of `H^1(K, A) -> H^1(K)` induced by inclusion of relative cocycles:
/// the dimension of the classes representable with compact support. For
/// nonempty connected boundary components this equals `b1_c - e + 1` by
/// exactness; computing it directly from matrices gives the independent
/// cross-check used in `assemble_topology`.
pub fn relative_image_rank(ambient: &SimplicialComplex, a: &SimplicialComplex) -> usize {
    let rel_cocycles = coboundary(ambient, Some(a), 1).kernel_basis();
    let (keep_rel, _) = relative_index(ambient, Some(a), 1);
    let ncols = cochain_dim(ambient, None, 1);
    let mut included: Vec<Vec<Rat>> = Vec::with_capacity(rel_cocycles.len());
    for z in &rel_cocycles {
        let mut row = vec![Rat::zero(); ncols];
        for (rel_col, &abs_col) in keep_rel.iter().enumerate() {
            row[abs_col] = z[rel_col].clone();
        }
        included.push(row);
    }
    let cob_k = transpose_rows(coboundary(ambient, None, 0));
    let rank_b = QMat::new(cob_k.clone(), ncols).rank();
    let mut stacked = included;
    stacked.extend(cob_k);
    QMat::new(stacked, ncols).rank() - rank_b
}

/// Assemble the Betti data of a conifold from a tagged complex, validating
/// the exact-sequence identity `dim Im(gamma) = b1_c - e + 1` by an
/// independent matrix computation.
pub fn assemble_topology(model: &ConifoldComplex) -> Result<ConifoldTopology> {
    if betti(&model.ambient, 0)? != 1 {
        return Err(Error::Structural(
            "ambient complex must be connected".into(),
        ));
    }
    if model.components.is_empty() {
        return Err(Error::Structural(
            "a conifold model needs at least one tagged link component".into(),
        ));
    }
    let all_links = model.link_union(None);
    let cs_links = model.link_union(Some(EndKind::Cs));
    let e = model.components.len();
    let s = model
        .components
        .iter()
        .filter(|(t, _)| *t == EndKind::Cs)
        .count();
    let l = e - s;
    let b1 = betti(&model.ambient, 1)?;
    let b1_c = relative_betti(
        &ComplexPair::new(model.ambient.clone(), all_links.clone())?,
        1,
    )?;
    let b1_c_bullet = if s == 0 {
        b1
    } else {
        relative_betti(&ComplexPair::new(model.ambient.clone(), cs_links.clone())?, 1)?
    };
    let rank_restriction_to_cs_links = if s == 0 {
        0
    } else {
        restriction_rank(&ComplexPair::new(model.ambient.clone(), cs_links)?, 1)?.rank
    };
    let topology = ConifoldTopology {
        b1,
        b1_c,
        b1_c_bullet,
        e,
        s,
        l,
        rank_restriction_to_cs_links,
    };
    topology.validate()?;
    let gamma_rank = relative_image_rank(&model.ambient, &all_links);
    if gamma_rank as i64 != topology.dim_h1_tilde_c() {
        return Err(Error::Structural(format!(
            "exact-sequence identity failed: rank(H^1_c -> H^1) = {gamma_rank} \
             but b1_c - e + 1 = {}",
            topology.dim_h1_tilde_c()
        )));
    }
    Ok(topology)
}

// ---------------------------------------------------------------------------
// JSON ingestion

#[derive(Deserialize)]
struct SimplicesJson(BTreeMap<String, Vec<Vec<usize>>>);

#[derive(Deserialize)]
struct BoundaryJson {
    tag: String,
    simplices: SimplicesJson,
}

#[derive(Deserialize)]
struct ComplexJson {
    vertices: usize,
    simplices: SimplicesJson,
    #[serde(default)]
    boundary_components: Vec<BoundaryJson>,
}

fn facets_from_json(s: &SimplicesJson) -> Result<Vec<Vec<usize>>> {
    let mut facets = Vec::new();
    for (dim, list) in &s.0 {
        dim.parse::<usize>()
            .map_err(|_| Error::Structural(format!("bad simplex dimension key '{dim}'")))?;
        facets.extend(list.iter().cloned());
    }
    Ok(facets)
}

/// Parse the complex-pair JSON format:
/// `{"vertices": n, "simplices": {"2": [[i,j,k], ...]},
///   "boundary_components": [{"tag": "CS", "simplices": {...}}]}`.
/// Lower-dimensional faces are generated automatically.
pub fn conifold_complex_from_json(text: &str) -> Result<ConifoldComplex> {
    let parsed: ComplexJson = serde_json::from_str(text)
        .map_err(|e| Error::Structural(format!("complex JSON: {e}")))?;
    let mut ambient_facets = facets_from_json(&parsed.simplices)?;
    // every vertex is part of the ambient complex
    ambient_facets.extend((0..parsed.vertices).map(|v| vec![v]));
    let ambient = SimplicialComplex::from_facets(parsed.vertices, &ambient_facets)?;
    let mut components = Vec::new();
    for (i, b) in parsed.boundary_components.iter().enumerate() {
        let kind = match b.tag.as_str() {
            "CS" => EndKind::Cs,
            "AC" => EndKind::Ac,
            other => {
                return Err(Error::Structural(format!(
                    "boundary component {i}: tag must be \"CS\" or \"AC\", got \"{other}\""
                )))
            }
        };
        let facets = facets_from_json(&b.simplices)?;
        if facets.is_empty() {
            return Err(Error::Structural(format!(
                "boundary component {i} has no simplices"
            )));
        }
        components.push((
            kind,
            SimplicialComplex::from_facets(parsed.vertices, &facets)?,
        ));
    }
    ConifoldComplex::new(ambient, components)
}
