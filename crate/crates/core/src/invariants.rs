//! Intrinsic invariants of the induced metric: τ, τ(L), K(π), Ric_P, the
//! Ricci tensor, θ_k, δ(n₁,…,n_k) and δ̃, plus the Grassmannian searches
//! behind the infima.
//!
//! Everything runs on a [`CurvatureTable`], the full array
//! `R_ijkl = R(e_i, e_j, e_k, e_l)` of the induced curvature in tangent-frame
//! coordinates. Subspaces and vectors passed in are tangent coordinates.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    complement_basis, derive_seed, random_orthogonal_with, random_unit, rng_from_seed, Subspace,
    SymOp, Vector,
};
use crate::submanifold::SubmanifoldPoint;

/// Relative tolerance under which a table is treated as constant curvature.
pub const CONSTANT_CURVATURE_TOL: f64 = 1e-12;
/// Upper limit on coordinate-aligned tuples injected into a δ search.
pub const MAX_COORDINATE_TUPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub samples: usize,
    pub multistarts: usize,
    pub step_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { samples: 4096, multistarts: 16, step_tol: 1e-10, max_iters: 200, seed: 0 }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        SearchBudget { seed, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// The searched infimum is at most the reported one.
    SampledUpperBoundOnInf,
    /// The searched supremum is at least the reported one.
    SampledLowerBoundOnSup,
    ExactAnalytic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    None,
    Plane(Subspace),
    Tuple(Vec<Subspace>),
    SubspaceVector { subspace: Subspace, vector: Vector },
    Vector(Vector),
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum WitnessJson {
    None,
    Plane { basis: Vec<Vec<f64>> },
    Tuple { blocks: Vec<Vec<Vec<f64>>> },
    SubspaceVector { basis: Vec<Vec<f64>>, vector: Vec<f64> },
    Vector { vector: Vec<f64> },
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = |x: &Vector| x.iter().copied().collect::<Vec<f64>>();
        let j = match self {
            Witness::None => WitnessJson::None,
            Witness::Plane(p) => WitnessJson::Plane { basis: p.to_rows() },
            Witness::Tuple(ls) => WitnessJson::Tuple { blocks: ls.iter().map(|l| l.to_rows()).collect() },
            Witness::SubspaceVector { subspace, vector } => {
                WitnessJson::SubspaceVector { basis: subspace.to_rows(), vector: v(vector) }
            }
            Witness::Vector(x) => WitnessJson::Vector { vector: v(x) },
        };
        j.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremumResult {
    pub value: f64,
    pub witness: Witness,
    pub certified: Certification,
}

/// An element of S(n): an unordered tuple of subspace dimensions, stored in
/// descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TupleSpec {
    dims: Vec<usize>,
}

impl TupleSpec {
    pub fn new(dims: &[usize]) -> Self {
        let mut dims = dims.to_vec();
        dims.sort_unstable_by(|a, b| b.cmp(a));
        TupleSpec { dims }
    }

    pub fn empty() -> Self {
        TupleSpec { dims: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Membership in S(n).
    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = self.dims.iter().all(|&d| d >= 2 && d < n) && self.total() <= n;
        if ok {
            Ok(())
        } else {
            Err(Error::TupleNotInS { dims: self.dims.clone(), n })
        }
    }
}

impl std::fmt::Display for TupleSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All of S(n), ordered by tuple length and then lexicographically.
pub fn enumerate_tuples(n: usize) -> Vec<TupleSpec> {
    fn rec(max: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<TupleSpec>) {
        out.push(TupleSpec { dims: prefix.clone() });
        for d in 2..=max.min(budget) {
            prefix.push(d);
            rec(d, budget - d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 2 {
        rec(n - 1, n, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| a.k().cmp(&b.k()).then_with(|| {
        let mut x = a.dims.clone();
        let mut y = b.dims.clone();
        x.sort_unstable();
        y.sort_unstable();
        x.cmp(&y)
    }));
    out
}

/// The constants `c(n₁,…,n_k)` and `b(n₁,…,n_k)`.
pub fn constants_c_b(n: usize, t: &TupleSpec) -> Result<(f64, f64)> {
    t.validate(n)?;
    let (nf, k, s) = (n as f64, t.k() as f64, t.total() as f64);
    let c = nf * nf * (nf + k - 1.0 - s) / (2.0 * (nf + k - s));
    let b = nf * (nf - 1.0) / 2.0 - t.dims.iter().map(|&d| (d * (d - 1)) as f64 / 2.0).sum::<f64>();
    Ok((c, b))
}

/// `R_ijkl` of the induced metric in tangent-frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTable {
    n: usize,
    r: Vec<f64>,
    constant: Option<f64>,
}

impl CurvatureTable {
    /// Builds the table through the Gauss equation, one frame quadruple at a
    /// time, filling the remaining entries from the curvature symmetries.
    pub fn new(s: &SubmanifoldPoint) -> Self {
        let n = s.n();
        let frame = s.tangent_frame();
        let e: Vec<Vector> = (0..n).map(|i| frame.column(i).into_owned()).collect();
        let mut r = vec![0.0; n * n * n * n];
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    for l in k + 1..n {
                        if (k, l) < (i, j) {
                            continue;
                        }
                        let v = s
                            .induced_curvature(&e[i], &e[j], &e[k], &e[l])
                            .expect("frame vectors are tangent");
                        for (a, b, c, d, sg) in [
                            (i, j, k, l, 1.0),
                            (j, i, k, l, -1.0),
                            (i, j, l, k, -1.0),
                            (j, i, l, k, 1.0),
                        ] {
                            r[idx(a, b, c, d)] = sg * v;
                            r[idx(c, d, a, b)] = sg * v;
                        }
                    }
                }
            }
        }
        Self::from_raw(n, r)
    }

    /// Wraps a raw `n⁴` array (row-major in `i, j, k, l`).
    pub fn from_raw(n: usize, r: Vec<f64>) -> Self {
        assert_eq!(r.len(), n * n * n * n, "table size");
        let mut t = CurvatureTable { n, r, constant: None };
        t.constant = t.detect_constant();
        t
    }

    fn detect_constant(&self) -> Option<f64> {
        let n = self.n;
        if n < 2 {
            return None;
        }
        let c0 = self.get(0, 1, 1, 0);
        let scale = 1.0 + self.r.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let model = c0 * (d(i, l) * d(j, k) - d(i, k) * d(j, l));
                        if (self.get(i, j, k, l) - model).abs() > CONSTANT_CURVATURE_TOL * scale {
                            return None;
                        }
                    }
                }
            }
        }
        Some(c0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.r[((i * n + j) * n + k) * n + l]
    }

    /// The sectional curvature when it is the same for every plane.
    pub fn constant_curvature(&self) -> Option<f64> {
        self.constant
    }

    /// `R(x, y, z, w)` for tangent-coordinate vectors.
    pub fn eval(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                let xy = x[i] * y[j];
                let base = (i * n + j) * n * n;
                let mut inner = 0.0;
                for k in 0..n {
                    let row = &self.r[base + k * n..base + k * n + n];
                    let mut s = 0.0;
                    for l in 0..n {
                        s += row[l] * w[l];
                    }
                    inner += z[k] * s;
                }
                acc += xy * inner;
            }
        }
        acc
    }

    /// `M_u[j,k] = Σ R_ijkl u_i u_l`, so that `K(u, v) = vᵀ M_u v` for
    /// orthonormal `u, v`.
    pub fn sectional_form(&self, u: &Vector) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    let base = ((i * n + j) * n + k) * n;
                    let mut s = 0.0;
                    for l in 0..n {
                        s += self.r[base + l] * u[l];
                    }
                    m[(j, k)] += u[i] * s;
                }
            }
        }
        (&m + m.transpose()) * 0.5
    }

    /// `Q_P[i,l] = Σ R_ijkl P_jk` for a projector P, so `Ric_P(X) = Xᵀ Q_P X`.
    pub fn ricci_form(&self, proj: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut q = DMatrix::zeros(n, n);
        for i in 0..n {
            for l in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        s += self.get(i, j, k, l) * proj[(j, k)];
                    }
                }
                q[(i, l)] = s;
            }
        }
        (&q + q.transpose()) * 0.5
    }

    /// `τ(L) = ½ Σ R_ijkl P_il P_jk` for the projector P onto L.
    pub fn tau_of_projector(&self, proj: &DMatrix<f64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let pjk = proj[(j, k)];
                    if pjk == 0.0 {
                        continue;
                    }
                    let base = ((i * n + j) * n + k) * n;
                    let mut s = 0.0;
                    for l in 0..n {
                        s += self.r[base + l] * proj[(i, l)];
                    }
                    acc += s * pjk;
                }
            }
        }
        0.5 * acc
    }

    fn tau_of_columns(&self, q: &DMatrix<f64>, cols: &[usize]) -> f64 {
        if cols.len() < 2 {
            return 0.0;
        }
        let n = self.n;
        let mut p = DMatrix::zeros(n, n);
        for &c in cols {
            let v = q.column(c);
            p.ger(1.0, &v, &v, 1.0);
        }
        self.tau_of_projector(&p)
    }

    pub fn sectional(&self, u: &Vector, v: &Vector) -> f64 {
        self.eval(u, v, v, u)
    }

    /// `τ = Σ_{i<j} K(e_i ∧ e_j)`.
    pub fn scalar_curvature(&self) -> f64 {
        let n = self.n;
        let mut t = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                t += self.get(i, j, j, i);
            }
        }
        t
    }

    /// `S_il = Σ_j R(e_i, e_j, e_j, e_l)`.
    pub fn ricci_tensor(&self) -> SymOp {
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |i, l| (0..n).map(|j| self.get(i, j, j, l)).sum());
        SymOp::new(m).expect("square")
    }

    fn check_subspace(&self, l: &Subspace, what: &str) -> Result<()> {
        if l.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: l.ambient_dim() });
        }
        if l.dim() < 2 {
            return Err(Error::BadDimension { expected: format!("{what} of dimension >= 2"), found: l.dim() });
        }
        Ok(())
    }

    pub fn sectional_curvature(&self, pi: &Subspace) -> Result<f64> {
        if pi.dim() != 2 {
            return Err(Error::BadDimension { expected: "2".into(), found: pi.dim() });
        }
        self.check_subspace(pi, "plane")?;
        Ok(self.sectional(&pi.vector(0), &pi.vector(1)))
    }

    pub fn subspace_scalar_curvature(&self, l: &Subspace) -> Result<f64> {
        self.check_subspace(l, "subspace")?;
        Ok(self.tau_of_projector(&l.projector()))
    }

    /// `Ric_P(U) = Σ_a R(U, b_a, b_a, U)` over any orthonormal basis of P.
    pub fn k_ricci(&self, p: &Subspace, u: &Vector) -> Result<f64> {
        self.check_subspace(p, "subspace")?;
        if u.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: u.len() });
        }
        let norm = u.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit { norm });
        }
        let residual = p.residual(u);
        if residual > 1e-10 {
            return Err(Error::VectorNotInSubspace { residual });
        }
        Ok(p.vectors().iter().map(|b| self.eval(u, b, b, u)).sum())
    }

    pub fn inf_sectional(&self, budget: &SearchBudget) -> ExtremumResult {
        self.extreme_sectional(budget, 1.0)
    }

    pub fn sup_sectional(&self, budget: &SearchBudget) -> ExtremumResult {
        self.extreme_sectional(budget, -1.0)
    }

    /// `sign = 1` minimizes K, `sign = -1` maximizes it.
    fn extreme_sectional(&self, budget: &SearchBudget, sign: f64) -> ExtremumResult {
        let n = self.n;
        if let Some(c0) = self.constant {
            return ExtremumResult {
                value: c0,
                witness: Witness::Plane(Subspace::coordinate(n, &[0, 1])),
                certified: Certification::ExactAnalytic,
            };
        }
        let coord: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let total = coord.len() + budget.samples;
        let plane = |idx: usize| -> (Vector, Vector) {
            if idx < coord.len() {
                let (i, j) = coord[idx];
                (axis(n, i), axis(n, j))
            } else {
                let mut rng = rng_from_seed(derive_seed(budget.seed, idx as u64));
                let q = random_orthogonal_with(&mut rng, n);
                (q.column(0).into_owned(), q.column(1).into_owned())
            }
        };
        let values: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let (u, v) = plane(idx);
                sign * self.sectional(&u, &v)
            })
            .collect();
        let starts = start_indices(&values, budget.multistarts);
        let refined: Vec<(f64, Vector, Vector)> = starts
            .par_iter()
            .map(|&idx| {
                let (u, v) = plane(idx);
                self.refine_plane(u, v, sign, budget)
            })
            .collect();
        let (best_raw, raw_idx) = argmin(&values);
        let mut best = (best_raw, plane(raw_idx));
        for (val, u, v) in refined {
            if val < best.0 {
                best = (val, (u, v));
            }
        }
        let (u, v) = best.1;
        ExtremumResult {
            value: sign * best.0,
            witness: Witness::Plane(Subspace::from_orthonormal(DMatrix::from_columns(&[u, v])).expect("orthonormal")),
            certified: if sign > 0.0 {
                Certification::SampledUpperBoundOnInf
            } else {
                Certification::SampledLowerBoundOnSup
            },
        }
    }

    /// Alternating eigen-steps: fix one vector, take the extreme eigenvector of
    /// the sectional form on its orthogonal complement, swap roles.
    fn refine_plane(&self, mut u: Vector, mut v: Vector, sign: f64, budget: &SearchBudget) -> (f64, Vector, Vector) {
        let mut val = sign * self.sectional(&u, &v);
        for _ in 0..budget.max_iters {
            let prev = val;
            for _ in 0..2 {
                let (nv, nval) = self.extreme_partner(&u, sign);
                if nval < val {
                    v = nv;
                    val = nval;
                }
                std::mem::swap(&mut u, &mut v);
            }
            if prev - val < budget.step_tol {
                break;
            }
        }
        let (u, v) = orthonormal_pair(u, v);
        (sign * self.sectional(&u, &v), u, v)
    }

    fn extreme_partner(&self, u: &Vector, sign: f64) -> (Vector, f64) {
        let c = complement_basis(&DMatrix::from_columns(std::slice::from_ref(u)));
        let m = SymOp::new(c.basis().transpose() * self.sectional_form(u) * c.basis() * sign).expect("square");
        let (vals, vecs) = m.eigen();
        (c.basis() * vecs.column(0), vals[0])
    }

    /// θ_k = (1/(k-1)) · inf over k-planes P and unit X ∈ P of Ric_P(X).
    ///
    /// For fixed X the best P is X plus the k-1 lowest eigenvectors of the
    /// sectional form on X^⊥, so only X is searched.
    pub fn theta_k(&self, k: usize, budget: &SearchBudget) -> Result<ExtremumResult> {
        let n = self.n;
        if k < 2 || k > n {
            return Err(Error::BadK { k, n });
        }
        if let Some(c0) = self.constant {
            return Ok(ExtremumResult {
                value: c0,
                witness: Witness::SubspaceVector {
                    subspace: Subspace::coordinate(n, &(0..k).collect::<Vec<_>>()),
                    vector: axis(n, 0),
                },
                certified: Certification::ExactAnalytic,
            });
        }
        if k == n {
            let (vals, vecs) = self.ricci_tensor().eigen();
            return Ok(ExtremumResult {
                value: vals[0] / (n - 1) as f64,
                witness: Witness::SubspaceVector { subspace: Subspace::full(n), vector: vecs.column(0).into_owned() },
                certified: Certification::ExactAnalytic,
            });
        }
        let total = n + budget.samples;
        let start = |idx: usize| -> Vector {
            if idx < n {
                axis(n, idx)
            } else {
                random_unit(&mut rng_from_seed(derive_seed(budget.seed, idx as u64)), n)
            }
        };
        let values: Vec<f64> = (0..total).into_par_iter().map(|idx| self.best_k_plane(&start(idx), k).0).collect();
        let starts = start_indices(&values, budget.multistarts);
        let refined: Vec<(f64, Vector, DMatrix<f64>)> = starts
            .par_iter()
            .map(|&idx| {
                let mut x = start(idx);
                let (mut val, mut p) = self.best_k_plane(&x, k);
                for _ in 0..budget.max_iters {
                    let q = SymOp::new(p.transpose() * self.ricci_form(&(&p * p.transpose())) * &p).expect("square");
                    let (_, vecs) = q.eigen();
                    let nx = (&p * vecs.column(0)).normalize();
                    let (nval, np) = self.best_k_plane(&nx, k);
                    if nval < val {
                        let gain = val - nval;
                        x = nx;
                        val = nval;
                        p = np;
                        if gain < budget.step_tol {
                            break;
                        }
                    } else {
                        break;
                    }
                }
                (val, x, p)
            })
            .collect();
        let (raw, raw_idx) = argmin(&values);
        let x0 = start(raw_idx);
        let mut best = (raw, x0.clone(), self.best_k_plane(&x0, k).1);
        for r in refined {
            if r.0 < best.0 {
                best = r;
            }
        }
        Ok(ExtremumResult {
            value: best.0 / (k - 1) as f64,
            witness: Witness::SubspaceVector {
                subspace: Subspace::from_orthonormal(best.2).expect("orthonormal"),
                vector: best.1,
            },
            certified: Certification::SampledUpperBoundOnInf,
        })
    }

    /// Minimal `Ric_P(x)` over k-planes through `x`, with the plane basis
    /// (first column `x`).
    fn best_k_plane(&self, x: &Vector, k: usize) -> (f64, DMatrix<f64>) {
        let n = self.n;
        let c = complement_basis(&DMatrix::from_columns(std::slice::from_ref(x)));
        let m = SymOp::new(c.basis().transpose() * self.sectional_form(x) * c.basis()).expect("square");
        let (vals, vecs) = m.eigen();
        let mut p = DMatrix::zeros(n, k);
        p.set_column(0, x);
        for a in 0..k - 1 {
            p.set_column(a + 1, &(c.basis() * vecs.column(a)));
        }
        (vals[..k - 1].iter().sum(), p)
    }

    pub fn delta_invariant(&self, t: &TupleSpec, budget: &SearchBudget) -> Result<ExtremumResult> {
        Ok(self.delta_pair(t, budget)?.0)
    }

    pub fn tilde_delta(&self, t: &TupleSpec, budget: &SearchBudget) -> Result<ExtremumResult> {
        Ok(self.delta_pair(t, budget)?.1)
    }

    /// `(δ(t), δ̃(t))` from one shared candidate list of orthogonal tuples.
    pub fn delta_pair(&self, t: &TupleSpec, budget: &SearchBudget) -> Result<(ExtremumResult, ExtremumResult)> {
        let n = self.n;
        t.validate(n)?;
        let tau = self.scalar_curvature();
        if t.is_empty() {
            let r = ExtremumResult { value: tau, witness: Witness::Tuple(vec![]), certified: Certification::ExactAnalytic };
            return Ok((r.clone(), r));
        }
        if let Some(c0) = self.constant {
            let q = DMatrix::identity(n, n);
            let sum: f64 = t.dims.iter().map(|&d| (d * (d - 1)) as f64 / 2.0 * c0).sum();
            let r = ExtremumResult {
                value: tau - sum,
                witness: Witness::Tuple(blocks_of(&q, t)),
                certified: Certification::ExactAnalytic,
            };
            return Ok((r.clone(), r));
        }
        let coords = coordinate_tuples(n, t, MAX_COORDINATE_TUPLES);
        let total = coords.len() + budget.samples;
        let groups = group_ids(n, t);
        let candidate = |idx: usize| -> DMatrix<f64> {
            if idx < coords.len() {
                coords[idx].clone()
            } else {
                random_orthogonal_with(&mut rng_from_seed(derive_seed(budget.seed, idx as u64)), n)
            }
        };
        let values: Vec<f64> =
            (0..total).into_par_iter().map(|idx| self.tuple_objective(&candidate(idx), &groups, t.k())).collect();
        let neg: Vec<f64> = values.iter().map(|v| -v).collect();

        let search = |vals: &[f64], sign: f64| -> (f64, DMatrix<f64>) {
            let starts = start_indices(vals, budget.multistarts);
            let refined: Vec<(f64, DMatrix<f64>)> = starts
                .par_iter()
                .map(|&idx| self.refine_tuple(candidate(idx), &groups, t.k(), sign, budget))
                .collect();
            let (raw, raw_idx) = argmin(vals);
            let mut best = (raw, candidate(raw_idx));
            for r in refined {
                if r.0 < best.0 {
                    best = r;
                }
            }
            best
        };
        let (lo, qlo) = search(&values, 1.0);
        let (hi_neg, qhi) = search(&neg, -1.0);
        Ok((
            ExtremumResult {
                value: tau - lo,
                witness: Witness::Tuple(blocks_of(&qlo, t)),
                certified: Certification::SampledUpperBoundOnInf,
            },
            ExtremumResult {
                value: tau + hi_neg,
                witness: Witness::Tuple(blocks_of(&qhi, t)),
                certified: Certification::SampledLowerBoundOnSup,
            },
        ))
    }

    fn tuple_objective(&self, q: &DMatrix<f64>, groups: &[usize], k: usize) -> f64 {
        let mut total = 0.0;
        for g in 0..k {
            let cols: Vec<usize> = (0..groups.len()).filter(|&c| groups[c] == g).collect();
            total += self.tau_of_columns(q, &cols);
        }
        total
    }

    /// Givens sweeps over column pairs in different groups. Along one angle
    /// the objective is a trigonometric polynomial in 2θ of degree 2, so five
    /// samples determine it exactly.
    fn refine_tuple(
        &self,
        mut q: DMatrix<f64>,
        groups: &[usize],
        k: usize,
        sign: f64,
        budget: &SearchBudget,
    ) -> (f64, DMatrix<f64>) {
        let n = self.n;
        let mut val = sign * self.tuple_objective(&q, groups, k);
        for _ in 0..budget.max_iters {
            let before = val;
            for p in 0..n {
                for r in p + 1..n {
                    if groups[p] == groups[r] {
                        continue;
                    }
                    let mut ys = [0.0; 5];
                    for (s, y) in ys.iter_mut().enumerate() {
                        let th = s as f64 * PI / 5.0;
                        *y = sign * self.tuple_objective(&givens(&q, p, r, th), groups, k);
                    }
                    let poly = TrigPoly::fit(&ys);
                    let (phi, g) = poly.minimize();
                    if g < val - 1e-15 {
                        let cand = givens(&q, p, r, phi / 2.0);
                        let cval = sign * self.tuple_objective(&cand, groups, k);
                        if cval < val {
                            q = cand;
                            val = cval;
                        }
                    }
                }
            }
            if before - val < budget.step_tol {
                break;
            }
        }
        (sign * val, q)
    }

    /// `|δ(t) − δ̃(t)| ≤ tol` on a shared candidate list.
    pub fn s_space_check(&self, t: &TupleSpec, budget: &SearchBudget, tol: f64) -> Result<bool> {
        let (d, dt) = self.delta_pair(t, budget)?;
        Ok((d.value - dt.value).abs() <= tol)
    }
}

/// `a0 + a1 cos φ + b1 sin φ + a2 cos 2φ + b2 sin 2φ`.
#[derive(Debug, Clone, Copy)]
struct TrigPoly {
    a0: f64,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
}

impl TrigPoly {
    /// Exact interpolation from samples at `φ_s = 2πs/5`.
    fn fit(ys: &[f64; 5]) -> Self {
        let mut p = TrigPoly { a0: 0.0, a1: 0.0, b1: 0.0, a2: 0.0, b2: 0.0 };
        for (s, &y) in ys.iter().enumerate() {
            let phi = 2.0 * PI * s as f64 / 5.0;
            p.a0 += y / 5.0;
            p.a1 += 0.4 * y * phi.cos();
            p.b1 += 0.4 * y * phi.sin();
            p.a2 += 0.4 * y * (2.0 * phi).cos();
            p.b2 += 0.4 * y * (2.0 * phi).sin();
        }
        p
    }

    fn eval(&self, phi: f64) -> f64 {
        self.a0 + self.a1 * phi.cos() + self.b1 * phi.sin() + self.a2 * (2.0 * phi).cos() + self.b2 * (2.0 * phi).sin()
    }

    fn d1(&self, phi: f64) -> f64 {
        -self.a1 * phi.sin() + self.b1 * phi.cos() - 2.0 * self.a2 * (2.0 * phi).sin() + 2.0 * self.b2 * (2.0 * phi).cos()
    }

    fn d2(&self, phi: f64) -> f64 {
        -self.a1 * phi.cos() - self.b1 * phi.sin() - 4.0 * self.a2 * (2.0 * phi).cos() - 4.0 * self.b2 * (2.0 * phi).sin()
    }

    /// Global minimum over one period: grid, then Newton polish.
    fn minimize(&self) -> (f64, f64) {
        const GRID: usize = 64;
        let mut best = (0.0, self.eval(0.0));
        for s in 1..GRID {
            let phi = 2.0 * PI * s as f64 / GRID as f64;
            let g = self.eval(phi);
            if g < best.1 {
                best = (phi, g);
            }
        }
        let mut phi = best.0;
        for _ in 0..20 {
            let h = self.d2(phi);
            if h <= 0.0 {
                break;
            }
            let step = self.d1(phi) / h;
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let g = self.eval(phi);
        if g < best.1 {
            (phi, g)
        } else {
            best
        }
    }
}

fn givens(q: &DMatrix<f64>, p: usize, r: usize, th: f64) -> DMatrix<f64> {
    let (s, c) = th.sin_cos();
    let mut out = q.clone();
    let cp = q.column(p).into_owned();
    let cr = q.column(r).into_owned();
    out.set_column(p, &(&cp * c + &cr * s));
    out.set_column(r, &(&cr * c - &cp * s));
    out
}

fn axis(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

fn orthonormal_pair(u: Vector, v: Vector) -> (Vector, Vector) {
    let u = u.normalize();
    let w = &v - &u * u.dot(&v);
    let w = &w - &u * u.dot(&w);
    (u, w.normalize())
}

/// Smallest value and its lowest index.
fn argmin(values: &[f64]) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0);
    for (i, &v) in values.iter().enumerate() {
        if v < best.0 {
            best = (v, i);
        }
    }
    best
}

/// The first `multistarts` indices plus every index that sets a new running
/// minimum. A longer sample list with the same prefix yields a superset.
fn start_indices(values: &[f64], multistarts: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut record = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        let is_record = v < record;
        if is_record {
            record = v;
        }
        if i < multistarts || is_record {
            out.push(i);
        }
    }
    out
}

/// Group label per column: block index for the first Σn_j columns, `k` for the rest.
fn group_ids(n: usize, t: &TupleSpec) -> Vec<usize> {
    let mut g = Vec::with_capacity(n);
    for (b, &d) in t.dims.iter().enumerate() {
        g.extend(std::iter::repeat_n(b, d));
    }
    g.resize(n, t.k());
    g
}

fn blocks_of(q: &DMatrix<f64>, t: &TupleSpec) -> Vec<Subspace> {
    let mut out = Vec::with_capacity(t.k());
    let mut c = 0;
    for &d in &t.dims {
        out.push(Subspace::from_orthonormal(q.columns(c, d).into_owned()).expect("orthonormal columns"));
        c += d;
    }
    out
}

/// Permutation matrices whose column blocks are coordinate subspaces, one per
/// unordered assignment of axes to blocks.
fn coordinate_tuples(n: usize, t: &TupleSpec, cap: usize) -> Vec<DMatrix<f64>> {
    fn rec(
        dims: &[usize],
        block: usize,
        used: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        prev_first: Option<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if block == dims.len() {
            out.push(chosen.clone());
            return;
        }
        let n = used.len();
        let d = dims[block];
        // Equal consecutive sizes are interchangeable; order them by first axis.
        let min_first = match prev_first {
            Some(f) if block > 0 && dims[block - 1] == d => f + 1,
            _ => 0,
        };
        let free: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        let mut combo = Vec::with_capacity(d);
        subsets(&free, d, 0, &mut combo, &mut |set: &[usize]| {
            if set[0] < min_first || out.len() >= cap {
                return;
            }
            for &i in set {
                used[i] = true;
            }
            chosen.extend_from_slice(set);
            rec(dims, block + 1, used, chosen, Some(set[0]), out, cap);
            chosen.truncate(chosen.len() - d);
            for &i in set {
                used[i] = false;
            }
        });
    }
    fn subsets(items: &[usize], d: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == d {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            subsets(items, d, i + 1, cur, f);
            cur.pop();
        }
    }
    let mut picks = Vec::new();
    rec(&t.dims, 0, &mut vec![false; n], &mut Vec::new(), None, &mut picks, cap);
    picks
        .into_iter()
        .map(|chosen| {
            let mut order = chosen.clone();
            order.extend((0..n).filter(|i| !chosen.contains(i)));
            let mut q = DMatrix::zeros(n, n);
            for (c, &a) in order.iter().enumerate() {
                q[(a, c)] = 1.0;
            }
            q
        })
        .collect()
}

pub fn sectional_curvature(s: &SubmanifoldPoint, pi: &Subspace) -> Result<f64> {
    CurvatureTable::new(s).sectional_curvature(pi)
}

pub fn scalar_curvature(s: &SubmanifoldPoint) -> f64 {
    CurvatureTable::new(s).scalar_curvature()
}

pub fn subspace_scalar_curvature(s: &SubmanifoldPoint, l: &Subspace) -> Result<f64> {
    CurvatureTable::new(s).subspace_scalar_curvature(l)
}

pub fn k_ricci(s: &SubmanifoldPoint, p: &Subspace, u: &Vector) -> Result<f64> {
    CurvatureTable::new(s).k_ricci(p, u)
}

pub fn ricci_tensor(s: &SubmanifoldPoint) -> SymOp {
    CurvatureTable::new(s).ricci_tensor()
}

pub fn inf_sectional(s: &SubmanifoldPoint, budget: &SearchBudget) -> ExtremumResult {
    CurvatureTable::new(s).inf_sectional(budget)
}

pub fn sup_sectional(s: &SubmanifoldPoint, budget: &SearchBudget) -> ExtremumResult {
    CurvatureTable::new(s).sup_sectional(budget)
}

pub fn delta_invariant(s: &SubmanifoldPoint, t: &TupleSpec, budget: &SearchBudget) -> Result<ExtremumResult> {
    CurvatureTable::new(s).delta_invariant(t, budget)
}

pub fn tilde_delta(s: &SubmanifoldPoint, t: &TupleSpec, budget: &SearchBudget) -> Result<ExtremumResult> {
    CurvatureTable::new(s).tilde_delta(t, budget)
}

pub fn theta_k(s: &SubmanifoldPoint, k: usize, budget: &SearchBudget) -> Result<ExtremumResult> {
    CurvatureTable::new(s).theta_k(k, budget)
}

pub fn s_space_check(s: &SubmanifoldPoint, t: &TupleSpec, budget: &SearchBudget, tol: f64) -> Result<bool> {
    CurvatureTable::new(s).s_space_check(t, budget, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{kappa_mu_coefficients, AmbientPoint};
    use crate::linalg::random_orthogonal;
    use crate::submanifold::build_submanifold;

    fn legendrian(n: usize, m: usize, free: Vec<DMatrix<f64>>) -> SubmanifoldPoint {
        let a = AmbientPoint::sasakian(m, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let d = 2 * m + 1;
        let ax = |i| axis(d, i);
        let t: Vec<Vector> = (0..n).map(ax).collect();
        let mut nf: Vec<Vector> = (0..n).map(|i| ax(m + i)).collect();
        nf.extend((n..m).map(ax));
        nf.extend((n..m).map(|i| ax(m + i)));
        nf.push(ax(2 * m));
        build_submanifold(a, &t, &nf, &free).unwrap()
    }

    fn diag1233() -> CurvatureTable {
        let mut free = vec![DMatrix::zeros(4, 4); 4];
        free[0] = DMatrix::from_diagonal(&Vector::from_column_slice(&[1.0, 2.0, 3.0, 3.0]));
        CurvatureTable::new(&legendrian(4, 4, free))
    }

    fn geodesic(n: usize) -> CurvatureTable {
        CurvatureTable::new(&legendrian(n, n, vec![DMatrix::zeros(n, n); n]))
    }

    fn small() -> SearchBudget {
        SearchBudget { samples: 256, multistarts: 4, ..SearchBudget::default() }
    }

    #[test]
    fn totally_geodesic_is_constant() {
        let t = geodesic(3);
        assert_eq!(t.constant_curvature(), Some(1.0));
        assert_eq!(t.scalar_curvature(), 3.0);
        assert_eq!(t.ricci_tensor().matrix(), &(DMatrix::identity(3, 3) * 2.0));
        let r = t.inf_sectional(&small());
        assert_eq!(r.value, 1.0);
        assert_eq!(r.certified, Certification::ExactAnalytic);
        let p = Subspace::coordinate(3, &[0, 1]);
        assert_eq!(t.sectional_curvature(&p).unwrap(), 1.0);
    }

    #[test]
    fn hand_values_on_diag_instance() {
        let t = diag1233();
        assert!((t.scalar_curvature() - 35.0).abs() < 1e-12);
        let pi = Subspace::coordinate(4, &[0, 1]);
        assert!((t.sectional_curvature(&pi).unwrap() - 3.0).abs() < 1e-12);
        let full = Subspace::full(4);
        assert!((t.k_ricci(&full, &axis(4, 0)).unwrap() - 11.0).abs() < 1e-12);
        assert!((t.ricci_tensor().get(0, 0) - 11.0).abs() < 1e-12);
        assert!((t.subspace_scalar_curvature(&full).unwrap() - 35.0).abs() < 1e-12);
        assert!(t.inf_sectional(&small()).value <= 3.0);
    }

    #[test]
    fn plane_rebasing_is_invisible() {
        let t = diag1233();
        let (u, v) = (Vector::from_column_slice(&[0.6, 0.8, 0.0, 0.0]), Vector::from_column_slice(&[0.0, 0.0, 0.8, -0.6]));
        let k = t.sectional(&u, &v);
        let th: f64 = 0.37;
        let u2 = &u * th.cos() + &v * th.sin();
        let v2 = &v * th.cos() - &u * th.sin();
        assert!((t.sectional(&u2, &v2) - k).abs() < 1e-12);
    }

    #[test]
    fn k_ricci_errors() {
        let t = diag1233();
        let p = Subspace::coordinate(4, &[0, 1]);
        assert!(matches!(t.k_ricci(&p, &axis(4, 2)), Err(Error::VectorNotInSubspace { .. })));
        assert!(matches!(t.k_ricci(&p, &(axis(4, 0) * 2.0)), Err(Error::NotUnit { .. })));
        assert!(matches!(
            t.sectional_curvature(&Subspace::coordinate(4, &[0, 1, 2])),
            Err(Error::BadDimension { .. })
        ));
    }

    #[test]
    fn tuple_enumeration() {
        let show = |n| enumerate_tuples(n).iter().map(|t| t.to_string()).collect::<Vec<_>>();
        assert_eq!(show(2), vec!["()"]);
        assert_eq!(show(3), vec!["()", "(2)"]);
        assert_eq!(show(4), vec!["()", "(2)", "(3)", "(2,2)"]);
        assert!(show(5).contains(&"(3,2)".to_string()));
    }

    #[test]
    fn constants() {
        let (c, b) = constants_c_b(4, &TupleSpec::new(&[2])).unwrap();
        assert!((c - 16.0 / 3.0).abs() < 1e-14);
        assert_eq!(b, 5.0);
        let (c, b) = constants_c_b(5, &TupleSpec::empty()).unwrap();
        assert_eq!((c, b), (10.0, 10.0));
        assert_eq!(constants_c_b(5, &TupleSpec::new(&[2, 2])).unwrap().1, 8.0);
        assert!(matches!(constants_c_b(4, &TupleSpec::new(&[4])), Err(Error::TupleNotInS { .. })));
    }

    #[test]
    fn delta_on_constant_curvature() {
        let t = geodesic(3);
        let d = t.delta_invariant(&TupleSpec::new(&[2]), &small()).unwrap();
        assert_eq!(d.value, 2.0);
        assert_eq!(t.delta_invariant(&TupleSpec::empty(), &small()).unwrap().value, 3.0);
        assert!(t.s_space_check(&TupleSpec::new(&[2]), &small(), 0.0).unwrap());
    }

    #[test]
    fn delta_dominates_tilde_and_coordinates() {
        let t = diag1233();
        let tup = TupleSpec::new(&[2]);
        let (d, dt) = t.delta_pair(&tup, &small()).unwrap();
        assert!(d.value >= dt.value);
        // τ − min over coordinate planes: smallest K_ij is K(e1,e2) = 3.
        assert!(d.value >= 35.0 - 3.0 - 1e-12);
        assert!(!t.s_space_check(&tup, &small(), 1e-6).unwrap());
        assert!(t.s_space_check(&tup, &small(), f64::INFINITY).unwrap());
    }

    #[test]
    fn delta_for_planes_matches_inf_k() {
        let t = diag1233();
        let d = t.delta_invariant(&TupleSpec::new(&[2]), &small()).unwrap();
        let k = t.inf_sectional(&small()).value;
        assert!((d.value - (35.0 - k)).abs() < 1e-8, "{} vs {}", d.value, 35.0 - k);
    }

    #[test]
    fn theta_bounds() {
        let t = diag1233();
        let b = small();
        let full = t.theta_k(4, &b).unwrap();
        assert_eq!(full.certified, Certification::ExactAnalytic);
        for k in 2..=4 {
            let th = t.theta_k(k, &b).unwrap();
            assert!(6.0 * th.value <= 35.0 + 1e-9);
        }
        let two = t.theta_k(2, &b).unwrap().value;
        assert!((two - t.inf_sectional(&b).value).abs() < 1e-8);
        assert!(matches!(t.theta_k(5, &b), Err(Error::BadK { .. })));
    }

    #[test]
    fn budget_monotonicity() {
        let t = CurvatureTable::new(&{
            let q = random_orthogonal(4, 3);
            let mut free = vec![DMatrix::zeros(4, 4); 4];
            free[0] = &q * DMatrix::from_diagonal(&Vector::from_column_slice(&[1.0, -2.0, 0.5, 3.0])) * q.transpose();
            free[1] = DMatrix::from_fn(4, 4, |i, j| ((i + j) as f64).sin());
            legendrian(4, 4, free)
        });
        let mut last = f64::INFINITY;
        for samples in [0, 16, 64, 256] {
            let b = SearchBudget { samples, multistarts: 2, ..SearchBudget::default() };
            let v = t.inf_sectional(&b).value;
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn trig_fit_is_exact() {
        let p = TrigPoly { a0: 0.3, a1: -1.2, b1: 0.4, a2: 0.7, b2: -0.1 };
        let ys: [f64; 5] = std::array::from_fn(|s| p.eval(2.0 * PI * s as f64 / 5.0));
        let q = TrigPoly::fit(&ys);
        for phi in [0.1, 1.0, 2.5, 4.0] {
            assert!((p.eval(phi) - q.eval(phi)).abs() < 1e-13);
        }
        let (phi, g) = q.minimize();
        assert!(q.d1(phi).abs() < 1e-9);
        for s in 0..1000 {
            assert!(g <= p.eval(2.0 * PI * s as f64 / 1000.0) + 1e-12);
        }
    }
}
