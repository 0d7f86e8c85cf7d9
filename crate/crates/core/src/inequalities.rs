//! Both sides of each Chen-type inequality, slack reports, and detectors for
//! the shape-operator forms that realize equality.
//!
//! Every check is built on an [`InequalityContext`], which caches the
//! curvature table and the tangential data of one instance so that many
//! planes, vectors and tuples can be checked cheaply.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ambient::{classify_sasakian, FCoefficients, STRUCTURE_TOL};
use crate::error::{Error, Result};
use crate::invariants::{constants_c_b, Certification, CurvatureTable, SearchBudget, TupleSpec, Witness};
use crate::linalg::{complement_basis, gram_error, max_abs, min_eigenvalue, Subspace, SymOp, Vector};
use crate::submanifold::SubmanifoldPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|slack| <= eq_tol` sets the equality flag.
    pub eq_tol: f64,
    /// An exact-mode check fails when `slack < slack_tol`.
    pub slack_tol: f64,
    /// Residual threshold for the equality-form detectors.
    pub form_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eq_tol: 1e-9, slack_tol: -1e-8, form_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    /// Built on a sampled infimum; recorded but never counted as a failure.
    Conservative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub equality: bool,
    pub mode: CheckMode,
    pub witness: Witness,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl InequalityReport {
    fn new(name: &str, lhs: f64, rhs: f64, mode: CheckMode, witness: Witness, tol: &Tolerances) -> Self {
        let slack = rhs - lhs;
        InequalityReport {
            name: name.to_string(),
            lhs,
            rhs,
            slack,
            equality: mode == CheckMode::Exact && slack.abs() <= tol.eq_tol,
            mode,
            witness,
            tolerances: *tol,
            extra: BTreeMap::new(),
        }
    }

    /// True when an exact-mode check falls below the slack tolerance.
    pub fn violated(&self) -> bool {
        self.mode == CheckMode::Exact && !(self.slack >= self.tolerances.slack_tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormBasis {
    /// Rows are tangent-frame coordinates of the detected `e_1..e_n`.
    pub tangent: Vec<Vec<f64>>,
    /// Rows are normal-frame coordinates of the detected normals.
    pub normal: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityFormReport {
    pub matched: bool,
    pub basis_found: Option<FormBasis>,
    pub parameters: BTreeMap<String, Vec<f64>>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChenLemmaOutcome {
    /// `2 a_1 a_2 - a_{n+1} >= -1e-12`.
    pub holds: bool,
    /// `a_1 + a_2 = a_3 = ... = a_n` within 1e-9.
    pub equality: bool,
    pub gap: f64,
}

/// Cached per-instance data shared by all checks.
#[derive(Debug, Clone)]
pub struct InequalityContext<'a> {
    s: &'a SubmanifoldPoint,
    table: CurvatureTable,
    tau: f64,
    h_sq: f64,
    ht: SymOp,
    pht: SymOp,
    tol: Tolerances,
}

impl<'a> InequalityContext<'a> {
    pub fn new(s: &'a SubmanifoldPoint, tol: Tolerances) -> Self {
        let table = CurvatureTable::new(s);
        InequalityContext {
            tau: table.scalar_curvature(),
            table,
            h_sq: s.mean_curvature().norm_sq,
            ht: s.tangential_h(),
            pht: s.tangential_phih(),
            tol,
            s,
        }
    }

    pub fn table(&self) -> &CurvatureTable {
        &self.table
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn n(&self) -> usize {
        self.s.n()
    }

    fn f(&self) -> &FCoefficients {
        self.s.ambient().f()
    }

    fn require_n3(&self) -> Result<()> {
        if self.n() < 3 {
            return Err(Error::DimensionTooSmall { n: self.n(), required: 3 });
        }
        Ok(())
    }

    /// The ambient contribution to 2τ on a C-totally real plane.
    pub fn ambient_part(&self) -> f64 {
        let n = self.n() as f64;
        let f = self.f();
        let tr = self.ht.trace();
        let ptr = self.pht.trace();
        n * (n - 1.0) * f.f1 + 2.0 * (n - 1.0) * f.f4 * tr + f.f51 * (tr * tr - self.ht.norm_sq())
            - f.f52 * (self.pht.norm_sq() - ptr * ptr)
    }

    /// 2τ summed through the Gauss equation against its closed form in ‖H‖²,
    /// ‖σ‖² and the tangential parts of h and φh.
    pub fn scalar_curvature_identity(&self) -> InequalityReport {
        let n = self.n() as f64;
        let lhs = 2.0 * self.tau;
        let rhs = self.ambient_part() + n * n * self.h_sq - self.s.sigma_norm_sq();
        let mut r = InequalityReport::new("scalar-curvature-identity", lhs, rhs, CheckMode::Exact, Witness::None, &self.tol);
        r.equality = (lhs - rhs).abs() <= self.tol.eq_tol * (1.0 + lhs.abs());
        r
    }

    fn check_plane(&self, pi: &Subspace) -> Result<()> {
        if pi.dim() != 2 || pi.ambient_dim() != self.n() {
            return Err(Error::BadPlane(format!(
                "expected a 2-plane in R^{}, got dimension {} in R^{}",
                self.n(),
                pi.dim(),
                pi.ambient_dim()
            )));
        }
        Ok(())
    }

    /// `τ − K(π)` against its bound, for one plane.
    pub fn chen_first(&self, pi: &Subspace) -> Result<InequalityReport> {
        self.require_n3()?;
        self.check_plane(pi)?;
        let n = self.n() as f64;
        let f = self.f();
        let k = self.table.sectional_curvature(pi)?;
        let hp = self.ht.restrict(pi.basis());
        let php = self.pht.restrict(pi.basis());
        let tr = self.ht.trace();
        let ptr = self.pht.trace();
        let rhs = n * n * (n - 2.0) / (2.0 * (n - 1.0)) * self.h_sq
            + (n + 1.0) * (n - 2.0) * f.f1 / 2.0
            + f.f4 * ((n - 1.0) * tr - hp.trace())
            + 0.5 * f.f51 * (tr * tr - self.ht.norm_sq() - 2.0 * det2(&hp))
            - 0.5 * f.f52 * (self.pht.norm_sq() - ptr * ptr + 2.0 * det2(&php));
        Ok(InequalityReport::new(
            "chen-first-inequality",
            self.tau - k,
            rhs,
            CheckMode::Exact,
            Witness::Plane(pi.clone()),
            &self.tol,
        ))
    }

    fn check_unit(&self, u: &Vector) -> Result<()> {
        if u.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: u.len() });
        }
        let norm = u.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit { norm });
        }
        Ok(())
    }

    fn ricci(&self, u: &Vector) -> Result<f64> {
        self.table.k_ricci(&Subspace::full(self.n()), u)
    }

    /// `Ric(U)` against its bound in ‖H‖² and the tangential data.
    pub fn ricci_bound(&self, u: &Vector) -> Result<InequalityReport> {
        self.require_n3()?;
        self.check_unit(u)?;
        let n = self.n() as f64;
        let f = self.f();
        let (hu, phu) = (self.ht.apply(u), self.pht.apply(u));
        let rhs = n * n * self.h_sq / 4.0
            + (n - 1.0) * f.f1
            + f.f4 * (self.ht.trace() + (n - 2.0) * hu.dot(u))
            + f.f51 * (self.ht.trace() * hu.dot(u) - hu.norm_squared())
            + f.f52 * (self.pht.trace() * phu.dot(u) - phu.norm_squared());
        Ok(InequalityReport::new(
            "ricci-mean-curvature",
            self.ricci(u)?,
            rhs,
            CheckMode::Exact,
            Witness::Vector(u.clone()),
            &self.tol,
        ))
    }

    /// `2τ − (ambient part) <= n(n−1)‖H‖²`.
    pub fn mean_vs_scalar(&self) -> Result<InequalityReport> {
        self.require_n3()?;
        let n = self.n() as f64;
        Ok(InequalityReport::new(
            "mean-vs-scalar",
            2.0 * self.tau - self.ambient_part(),
            n * (n - 1.0) * self.h_sq,
            CheckMode::Exact,
            Witness::None,
            &self.tol,
        ))
    }

    /// The mean-vs-scalar bound with `n(n−1)θ_k` in place of 2τ.
    ///
    /// A sampled θ_k can only overshoot, so the check is conservative unless
    /// the search certified its value exactly.
    pub fn theta_bound(&self, k: usize, budget: &SearchBudget) -> Result<InequalityReport> {
        let n = self.n();
        if k < 2 || k > n {
            return Err(Error::BadK { k, n });
        }
        self.require_n3()?;
        let theta = self.table.theta_k(k, budget)?;
        let nf = n as f64;
        let mode = if theta.certified == Certification::ExactAnalytic {
            CheckMode::Exact
        } else {
            CheckMode::Conservative
        };
        let chain = self.mean_vs_scalar()?;
        let mut r = InequalityReport::new(
            "theta-k-bound",
            nf * (nf - 1.0) * theta.value - self.ambient_part(),
            nf * (nf - 1.0) * self.h_sq,
            mode,
            theta.witness,
            &self.tol,
        );
        r.extra.insert("k".into(), k as f64);
        r.extra.insert("theta".into(), theta.value);
        r.extra.insert("chain_lhs".into(), chain.lhs);
        r.extra.insert("chain_slack".into(), chain.slack);
        Ok(r)
    }

    /// h = 0, f3 = f1 - 1 and A_ξ = 0.
    pub fn is_sasakian_mode(&self) -> bool {
        self.require_sasakian().is_ok()
    }

    fn require_sasakian(&self) -> Result<()> {
        let a = self.s.ambient();
        if max_abs(a.h().matrix()) > STRUCTURE_TOL {
            return Err(Error::NotSasakianMode("h is not zero".into()));
        }
        if !classify_sasakian(a.f()) {
            return Err(Error::NotSasakianMode("f3 != f1 - 1".into()));
        }
        let axi = self.s.sigma(self.s.xi_index()).norm_sq().sqrt();
        if axi > STRUCTURE_TOL {
            return Err(Error::NotSasakianMode(format!("A_xi is not zero (norm {axi:e})")));
        }
        Ok(())
    }

    /// The three Sasakian-mode bounds: per-plane δ_M, Ric(U), and the Ricci
    /// tensor bound as a positive-semidefiniteness margin.
    pub fn sasakian_suite(&self, pi: &Subspace, u: &Vector) -> Result<Vec<InequalityReport>> {
        self.require_sasakian()?;
        self.require_n3()?;
        self.check_plane(pi)?;
        self.check_unit(u)?;
        let n = self.n() as f64;
        let f1 = self.f().f1;
        let delta = InequalityReport::new(
            "sasakian-delta-m",
            self.tau - self.table.sectional_curvature(pi)?,
            n * n * (n - 2.0) / (2.0 * (n - 1.0)) * self.h_sq + (n + 1.0) * (n - 2.0) * f1 / 2.0,
            CheckMode::Exact,
            Witness::Plane(pi.clone()),
            &self.tol,
        );
        let ric = InequalityReport::new(
            "sasakian-ricci",
            self.ricci(u)?,
            n * n * self.h_sq / 4.0 + (n - 1.0) * f1,
            CheckMode::Exact,
            Witness::Vector(u.clone()),
            &self.tol,
        );
        let s = self.table.ricci_tensor();
        let gap = DMatrix::identity(self.n(), self.n()) * (n * n * self.h_sq + 4.0 * (n - 1.0) * f1)
            - s.matrix() * 4.0;
        let gap = SymOp::new(gap).expect("square");
        let mut psd = InequalityReport::new(
            "sasakian-ricci-tensor",
            0.0,
            min_eigenvalue(&gap),
            CheckMode::Exact,
            Witness::None,
            &self.tol,
        );
        psd.equality = max_abs(gap.matrix()) <= self.tol.eq_tol;
        Ok(vec![delta, ric, psd])
    }

    /// `τ − Σ τ(L_j)` against `c(t)‖H‖² + b(t) f1` for one orthogonal tuple.
    pub fn delta_tuple(&self, t: &TupleSpec, tuple: &[Subspace]) -> Result<InequalityReport> {
        self.require_sasakian()?;
        let n = self.n();
        let (c, b) = constants_c_b(n, t)?;
        let mut dims: Vec<usize> = tuple.iter().map(|l| l.dim()).collect();
        dims.sort_unstable_by(|a, b| b.cmp(a));
        if dims != t.dims() {
            return Err(Error::BadTuple(format!("subspace dimensions {dims:?} do not match {t}")));
        }
        if tuple.iter().any(|l| l.ambient_dim() != n) {
            return Err(Error::BadTuple(format!("subspaces must live in R^{n}")));
        }
        if !tuple.is_empty() {
            let joint = DMatrix::from_columns(&tuple.iter().flat_map(|l| l.vectors()).collect::<Vec<_>>());
            let g = gram_error(&joint);
            if g > 1e-10 {
                return Err(Error::BadTuple(format!("subspaces are not mutually orthogonal (gram residual {g:e})")));
            }
        }
        let mut sum = 0.0;
        for l in tuple {
            sum += self.table.subspace_scalar_curvature(l)?;
        }
        let mut r = InequalityReport::new(
            "delta-tuple",
            self.tau - sum,
            c * self.h_sq + b * self.f().f1,
            CheckMode::Exact,
            Witness::Tuple(tuple.to_vec()),
            &self.tol,
        );
        r.extra.insert("c".into(), c);
        r.extra.insert("b".into(), b);
        Ok(r)
    }
}

fn det2(a: &SymOp) -> f64 {
    a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0)
}

pub fn check_scalar_curvature_identity(s: &SubmanifoldPoint) -> InequalityReport {
    InequalityContext::new(s, Tolerances::default()).scalar_curvature_identity()
}

pub fn check_chen_fundamental(s: &SubmanifoldPoint, pi: &Subspace) -> Result<InequalityReport> {
    InequalityContext::new(s, Tolerances::default()).chen_first(pi)
}

pub fn check_ricci_bound(s: &SubmanifoldPoint, u: &Vector) -> Result<InequalityReport> {
    InequalityContext::new(s, Tolerances::default()).ricci_bound(u)
}

pub fn check_mean_vs_scalar(s: &SubmanifoldPoint) -> Result<InequalityReport> {
    InequalityContext::new(s, Tolerances::default()).mean_vs_scalar()
}

pub fn check_theta_bound(s: &SubmanifoldPoint, k: usize, budget: &SearchBudget) -> Result<InequalityReport> {
    InequalityContext::new(s, Tolerances::default()).theta_bound(k, budget)
}

pub fn check_sasakian_suite(s: &SubmanifoldPoint, pi: &Subspace, u: &Vector) -> Result<Vec<InequalityReport>> {
    InequalityContext::new(s, Tolerances::default()).sasakian_suite(pi, u)
}

pub fn check_delta_tuple(s: &SubmanifoldPoint, t: &TupleSpec, tuple: &[Subspace]) -> Result<InequalityReport> {
    InequalityContext::new(s, Tolerances::default()).delta_tuple(t, tuple)
}

/// Looks for a gauge in which `A_{n+1} = diag(a, b, (a+b) I)` with π spanned by
/// the first two tangent vectors and every other shape operator a trace-free
/// block supported on π.
///
/// With `H ≠ 0` the first normal is `H/‖H‖`. With `H = 0` the form forces
/// `a + b = 0`; each normal-frame direction is tried as the first normal.
pub fn detect_equality_form_basic(s: &SubmanifoldPoint, pi: &Subspace, form_tol: f64) -> Result<EqualityFormReport> {
    let n = s.n();
    if n < 3 {
        return Err(Error::DimensionTooSmall { n, required: 3 });
    }
    if pi.dim() != 2 || pi.ambient_dim() != n {
        return Err(Error::BadPlane(format!("expected a 2-plane in R^{n}")));
    }
    let q = s.normal_count();
    let h = s.mean_curvature();
    let hn = h.norm_sq.sqrt();
    let candidates: Vec<Vector> = if hn > 1e-12 {
        vec![&h.vector / hn]
    } else {
        (0..q).map(|r| unit(q, r)).collect()
    };
    let rest = complement_basis(pi.basis());
    let mut best: Option<EqualityFormReport> = None;
    for first in candidates {
        let others = complement_basis(&DMatrix::from_columns(std::slice::from_ref(&first)));
        let a_first = s.shape_operators().along(&first);
        // Diagonalize A_N on π to fix e_1, e_2 inside π.
        let block = a_first.restrict(pi.basis());
        let (vals, vecs) = block.eigen();
        let e12 = pi.basis() * vecs;
        let mut tb = DMatrix::zeros(n, n);
        tb.columns_mut(0, 2).copy_from(&e12);
        tb.columns_mut(2, n - 2).copy_from(rest.basis());
        let (a, b) = (vals[0], vals[1]);
        let an = a_first.restrict(&tb);
        let mut residual = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = match (i, j) {
                    (0, 0) => a,
                    (1, 1) => b,
                    _ if i == j => a + b,
                    _ => 0.0,
                };
                residual = residual.max((an.get(i, j) - target).abs());
            }
        }
        let (mut cs, mut ds) = (Vec::new(), Vec::new());
        for w in others.vectors() {
            let aw = s.shape_operators().along(&w).restrict(&tb);
            for i in 0..n {
                for j in 0..n {
                    if i >= 2 || j >= 2 {
                        residual = residual.max(aw.get(i, j).abs());
                    }
                }
            }
            residual = residual.max((aw.get(0, 0) + aw.get(1, 1)).abs());
            cs.push(aw.get(0, 0));
            ds.push(aw.get(0, 1));
        }
        let mut normal_rows = vec![first.iter().copied().collect::<Vec<f64>>()];
        normal_rows.extend(others.to_rows());
        let report = EqualityFormReport {
            matched: residual <= form_tol,
            basis_found: Some(FormBasis {
                tangent: Subspace::from_orthonormal(tb).expect("orthonormal").to_rows(),
                normal: normal_rows,
            }),
            parameters: BTreeMap::from([
                ("a".to_string(), vec![a]),
                ("b".to_string(), vec![b]),
                ("c".to_string(), cs),
                ("d".to_string(), ds),
            ]),
            residual,
        };
        if best.as_ref().is_none_or(|r| report.residual < r.residual) {
            best = Some(report);
        }
    }
    Ok(best.expect("at least one normal candidate"))
}

/// Tests the frame-aligned block form `A_r = diag(A^r_1, …, A^r_k, a_r I)` with
/// `tr A^r_j = a_r` for every normal r.
///
/// `a_r` is the mean of the tail diagonal, or the mean block trace when the
/// blocks fill the whole tangent space.
pub fn detect_equality_form_delta(s: &SubmanifoldPoint, t: &TupleSpec, form_tol: f64) -> Result<EqualityFormReport> {
    let n = s.n();
    t.validate(n)?;
    let mut starts = Vec::with_capacity(t.k());
    let mut group = vec![t.k(); n];
    let mut c = 0;
    for (g, &d) in t.dims().iter().enumerate() {
        starts.push(c);
        for slot in group.iter_mut().skip(c).take(d) {
            *slot = g;
        }
        c += d;
    }
    let tail: Vec<usize> = (c..n).collect();
    let mut residual = 0.0f64;
    let mut a_list = Vec::with_capacity(s.normal_count());
    for a in s.shape_operators().iter() {
        let traces: Vec<f64> =
            t.dims().iter().zip(&starts).map(|(&d, &st)| (st..st + d).map(|i| a.get(i, i)).sum()).collect();
        let a_r = if tail.is_empty() {
            traces.iter().sum::<f64>() / traces.len().max(1) as f64
        } else {
            tail.iter().map(|&i| a.get(i, i)).sum::<f64>() / tail.len() as f64
        };
        for i in 0..n {
            for j in 0..n {
                let same_block = group[i] == group[j] && group[i] < t.k();
                let dev = if same_block {
                    0.0
                } else if i == j {
                    a.get(i, i) - a_r
                } else {
                    a.get(i, j)
                };
                residual = residual.max(dev.abs());
            }
        }
        for tr in traces {
            residual = residual.max((tr - a_r).abs());
        }
        a_list.push(a_r);
    }
    Ok(EqualityFormReport {
        matched: residual <= form_tol,
        basis_found: Some(FormBasis {
            tangent: Subspace::full(n).to_rows(),
            normal: Subspace::full(s.normal_count()).to_rows(),
        }),
        parameters: BTreeMap::from([("a".to_string(), a_list)]),
        residual,
    })
}

/// Given `a_1..a_n, a_{n+1}` with `(Σa_i)² / (n−1) = Σa_i² + a_{n+1}`, checks
/// `2 a_1 a_2 >= a_{n+1}` and the structural equality condition.
pub fn chen_lemma_check(a: &[f64]) -> Result<ChenLemmaOutcome> {
    if a.len() < 3 {
        return Err(Error::BadDimension { expected: "n + 1 >= 3 values".into(), found: a.len() });
    }
    let n = a.len() - 1;
    let head = &a[..n];
    let sum: f64 = head.iter().sum();
    let sq: f64 = head.iter().map(|x| x * x).sum();
    let residual = sum * sum / (n - 1) as f64 - sq - a[n];
    if residual.abs() > 1e-12 * (1.0 + sq + a[n].abs()) {
        return Err(Error::HypothesisViolated { residual });
    }
    let gap = 2.0 * a[0] * a[1] - a[n];
    let target = a[0] + a[1];
    let equality = head[2..].iter().all(|&x| (x - target).abs() <= 1e-9);
    Ok(ChenLemmaOutcome { holds: gap >= -1e-12, equality, gap })
}

fn unit(q: usize, r: usize) -> Vector {
    let mut v = Vector::zeros(q);
    v[r] = 1.0;
    v
}
