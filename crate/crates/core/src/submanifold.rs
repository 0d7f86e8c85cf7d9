//! A C-totally real tangent n-plane inside the ambient tangent space, with its
//! second fundamental form.
//!
//! Tangent quantities (shape operators, `h^T`, `(φh)^T`, subspaces passed to
//! the invariants engine) are expressed in the coordinates of the tangent
//! frame `e_1..e_n`. Normal quantities use the normal frame
//! `e_{n+1}..e_{2m+1}`, whose last member is always ξ.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ambient::{ambient_curvature, matrix_rows, validate_ambient, AmbientPoint, STRUCTURE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{gram_error, max_abs, Subspace, SymOp, Vector, ORTHO_TOL};

/// Singular-value threshold for the relative null space.
pub const NULL_SPACE_TOL: f64 = 1e-9;

/// Shape operators `A_r`, one per normal-frame direction (ξ last).
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOperatorSet {
    ops: Vec<SymOp>,
}

impl ShapeOperatorSet {
    pub fn new(ops: Vec<SymOp>) -> Self {
        ShapeOperatorSet { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, r: usize) -> &SymOp {
        &self.ops[r]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymOp> {
        self.ops.iter()
    }

    /// `A_N` for `N = Σ w_r e_r` given in normal-frame coordinates.
    pub fn along(&self, weights: &Vector) -> SymOp {
        let n = self.ops.first().map(|a| a.dim()).unwrap_or(0);
        let mut acc = DMatrix::zeros(n, n);
        for (a, &w) in self.ops.iter().zip(weights.iter()) {
            if w != 0.0 {
                acc += a.matrix() * w;
            }
        }
        SymOp::new(acc).expect("square")
    }

    /// `σ(x, y)` in normal-frame coordinates for tangent-coordinate inputs.
    pub fn sigma(&self, x: &Vector, y: &Vector) -> Vector {
        Vector::from_iterator(self.ops.len(), self.ops.iter().map(|a| a.form(x, y)))
    }
}

/// Mean curvature vector (normal-frame coordinates) and its squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurvature {
    pub vector: Vector,
    pub norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SubmanifoldJson", try_from = "SubmanifoldJson")]
pub struct SubmanifoldPoint {
    ambient: AmbientPoint,
    tangent: DMatrix<f64>,
    normal: DMatrix<f64>,
    shape: ShapeOperatorSet,
}

/// Validates the frames and fills in `σ^ξ = (φh)^T`.
///
/// `sigma_free` lists σ^r for every normal direction except ξ, in normal-frame
/// order; each entry is an `n x n` symmetric matrix in tangent coordinates.
pub fn build_submanifold(
    ambient: AmbientPoint,
    tangent_frame: &[Vector],
    normal_frame: &[Vector],
    sigma_free: &[DMatrix<f64>],
) -> Result<SubmanifoldPoint> {
    let violations = validate_ambient(&ambient);
    if !violations.is_empty() {
        return Err(Error::InvalidAmbient(violations));
    }
    let d = ambient.dim();
    let n = tangent_frame.len();
    if n < 2 {
        return Err(Error::BadDimension { expected: "n >= 2".into(), found: n });
    }
    if n + normal_frame.len() != d {
        return Err(Error::BadFrame(format!(
            "{} tangent + {} normal vectors do not fill dimension {d}",
            n,
            normal_frame.len()
        )));
    }
    for v in tangent_frame.iter().chain(normal_frame) {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
    }
    let tangent = DMatrix::from_columns(tangent_frame);
    let normal = DMatrix::from_columns(normal_frame);

    let eta_res = tangent.row(d - 1).amax();
    if eta_res > STRUCTURE_TOL {
        return Err(Error::NotCTotallyReal { condition: "eta(e_i)=0", residual: eta_res });
    }
    let phi_res = max_abs(&(tangent.transpose() * ambient.phi().matrix() * &tangent));
    if phi_res > STRUCTURE_TOL {
        return Err(Error::NotCTotallyReal { condition: "<phi e_i,e_j>=0", residual: phi_res });
    }
    let mut joint = DMatrix::zeros(d, d);
    joint.columns_mut(0, n).copy_from(&tangent);
    joint.columns_mut(n, d - n).copy_from(&normal);
    let g = gram_error(&joint);
    if g > ORTHO_TOL {
        return Err(Error::BadFrame(format!("joint frame not orthonormal (gram residual {g:e})")));
    }
    let xi_res = (normal.column(d - n - 1) - ambient.xi()).amax();
    if xi_res > ORTHO_TOL {
        return Err(Error::BadFrame(format!("last normal is not xi (residual {xi_res:e})")));
    }
    let q = d - n;
    if sigma_free.len() != q - 1 {
        return Err(Error::BadFrame(format!(
            "expected {} free sigma blocks, got {}",
            q - 1,
            sigma_free.len()
        )));
    }
    let mut ops = Vec::with_capacity(q);
    for (r, s) in sigma_free.iter().enumerate() {
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: s.nrows() });
        }
        let asym = max_abs(&(s - s.transpose()));
        if asym > 1e-12 * (1.0 + max_abs(s)) {
            return Err(Error::AsymmetricSigma { normal: r, residual: asym });
        }
        ops.push(SymOp::new(s.clone())?);
    }
    ops.push(SymOp::new(tangent.transpose() * ambient.phi_h() * &tangent)?);
    Ok(SubmanifoldPoint { ambient, tangent, normal, shape: ShapeOperatorSet::new(ops) })
}

impl SubmanifoldPoint {
    pub fn n(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn ambient(&self) -> &AmbientPoint {
        &self.ambient
    }

    /// Columns `e_1..e_n` in ambient coordinates.
    pub fn tangent_frame(&self) -> &DMatrix<f64> {
        &self.tangent
    }

    /// Columns `e_{n+1}..e_{2m+1}` in ambient coordinates (ξ last).
    pub fn normal_frame(&self) -> &DMatrix<f64> {
        &self.normal
    }

    pub fn normal_count(&self) -> usize {
        self.normal.ncols()
    }

    /// Position of ξ in the normal frame.
    pub fn xi_index(&self) -> usize {
        self.normal_count() - 1
    }

    pub fn shape_operators(&self) -> &ShapeOperatorSet {
        &self.shape
    }

    /// σ^r as an `n x n` operator in tangent coordinates.
    pub fn sigma(&self, r: usize) -> &SymOp {
        self.shape.get(r)
    }

    /// σ^r for every non-ξ normal.
    pub fn sigma_free(&self) -> Vec<DMatrix<f64>> {
        self.shape.iter().take(self.xi_index()).map(|a| a.matrix().clone()).collect()
    }

    /// Ambient vector with the given tangent-frame coordinates.
    pub fn tangent_vector(&self, coords: &Vector) -> Vector {
        &self.tangent * coords
    }

    /// Tangent-frame coordinates of an ambient vector lying in the tangent plane.
    pub fn tangent_coords(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.ambient.dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient.dim(), found: x.len() });
        }
        let c = self.tangent.transpose() * x;
        let residual = (x - &self.tangent * &c).norm();
        if residual > 1e-10 * (1.0 + x.norm()) {
            return Err(Error::NotTangent { residual });
        }
        Ok(c)
    }

    /// Tangential part of h: `(h^T)_ij = <h e_i, e_j>`.
    pub fn tangential_h(&self) -> SymOp {
        SymOp::new(self.tangent.transpose() * self.ambient.h().matrix() * &self.tangent)
            .expect("square")
    }

    /// Tangential part of φh: `((φh)^T)_ij = <φh e_i, e_j>`.
    pub fn tangential_phih(&self) -> SymOp {
        SymOp::new(self.tangent.transpose() * self.ambient.phi_h() * &self.tangent).expect("square")
    }

    /// `n H^r = Σ_i σ^r_ii`.
    pub fn mean_curvature(&self) -> MeanCurvature {
        let n = self.n() as f64;
        let vector = Vector::from_iterator(self.normal_count(), self.shape.iter().map(|a| a.trace() / n));
        let norm_sq = vector.norm_squared();
        MeanCurvature { vector, norm_sq }
    }

    /// `Σ_{r,i,j} (σ^r_ij)^2`.
    pub fn sigma_norm_sq(&self) -> f64 {
        self.shape.iter().map(|a| a.norm_sq()).sum()
    }

    /// Gauss equation on tangent vectors given in ambient coordinates:
    /// `R(X,Y,Z,W) = R~(X,Y,Z,W) + <σ(X,W),σ(Y,Z)> - <σ(X,Z),σ(Y,W)>`.
    pub fn induced_curvature(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> Result<f64> {
        let (cx, cy, cz, cw) =
            (self.tangent_coords(x)?, self.tangent_coords(y)?, self.tangent_coords(z)?, self.tangent_coords(w)?);
        let ambient = ambient_curvature(&self.ambient, x, y, z, w)?;
        let s = &self.shape;
        Ok(ambient + s.sigma(&cx, &cw).dot(&s.sigma(&cy, &cz)) - s.sigma(&cx, &cz).dot(&s.sigma(&cy, &cw)))
    }

    /// Same as [`Self::induced_curvature`] with tangent-coordinate inputs.
    pub fn induced_curvature_coords(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> Result<f64> {
        self.induced_curvature(
            &self.tangent_vector(x),
            &self.tangent_vector(y),
            &self.tangent_vector(z),
            &self.tangent_vector(w),
        )
    }

    /// Kernel of `X -> (A_r X)_r`, by singular-value thresholding.
    pub fn relative_null_space(&self) -> Subspace {
        let n = self.n();
        let q = self.normal_count();
        let mut stacked = DMatrix::zeros(q * n, n);
        for (r, a) in self.shape.iter().enumerate() {
            stacked.view_mut((r * n, 0), (n, n)).copy_from(a.matrix());
        }
        let gram = SymOp::new(stacked.transpose() * &stacked).expect("square");
        // Singular values of the stacked map are square roots of Gram eigenvalues.
        let (vals, vecs) = gram.eigen();
        let kernel: Vec<Vector> = vals
            .iter()
            .enumerate()
            .filter(|(_, &l)| l.max(0.0).sqrt() <= NULL_SPACE_TOL)
            .map(|(i, _)| vecs.column(i).into_owned())
            .collect();
        if kernel.is_empty() {
            return Subspace::empty(n);
        }
        Subspace::from_orthonormal(DMatrix::from_columns(&kernel)).expect("eigenvectors are orthonormal")
    }

    /// Re-expresses the point in the tangent frame `e'_j = Σ_i q_ij e_i`.
    pub fn rotate_tangent(&self, q: &DMatrix<f64>) -> Result<SubmanifoldPoint> {
        let n = self.n();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: q.nrows() });
        }
        if gram_error(q) > 1e-11 {
            return Err(Error::BadFrame("tangent rotation is not orthogonal".into()));
        }
        let tangent = &self.tangent * q;
        let ops = self
            .shape
            .iter()
            .map(|a| SymOp::new(q.transpose() * a.matrix() * q).expect("square"))
            .collect();
        Ok(SubmanifoldPoint {
            ambient: self.ambient.clone(),
            tangent,
            normal: self.normal.clone(),
            shape: ShapeOperatorSet::new(ops),
        })
    }

    /// Rotates the non-ξ normals so that `e_{n+1}` is parallel to H.
    ///
    /// Fails when H has a ξ-component (then no such gauge keeps ξ last).
    /// A minimal point is returned unchanged.
    pub fn align_mean_curvature(&self) -> Result<SubmanifoldPoint> {
        let h = self.mean_curvature();
        let xi = self.xi_index();
        if h.vector[xi].abs() > 1e-12 {
            return Err(Error::BadFrame(format!(
                "mean curvature has a xi-component {:e}",
                h.vector[xi]
            )));
        }
        if h.norm_sq.sqrt() <= 1e-14 {
            return Ok(self.clone());
        }
        let q = self.normal_count();
        let mut seed = vec![h.vector.clone() / h.norm_sq.sqrt()];
        for r in 0..q {
            let mut e = Vector::zeros(q);
            e[r] = 1.0;
            seed.push(e);
        }
        // Gram–Schmidt over [H, e_1..e_q]; ξ stays last because H ⟂ ξ.
        let mut basis: Vec<Vector> = Vec::with_capacity(q);
        for v in seed {
            let mut w = v;
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&w);
                    w.axpy(-c, b, 1.0);
                }
            }
            let nrm = w.norm();
            if nrm > 1e-8 && basis.len() < q {
                basis.push(w / nrm);
            }
        }
        let rot = DMatrix::from_columns(&basis);
        let normal = &self.normal * &rot;
        let ops = basis.iter().map(|w| self.shape.along(w)).collect();
        let mut out = SubmanifoldPoint {
            ambient: self.ambient.clone(),
            tangent: self.tangent.clone(),
            normal,
            shape: ShapeOperatorSet::new(ops),
        };
        // Pin ξ exactly.
        out.normal.set_column(q - 1, &self.ambient.xi());
        Ok(out)
    }

    /// Copy with `σ^r_ij = σ^r_ji` shifted by `delta`; ξ is not editable.
    pub fn perturbed(&self, r: usize, i: usize, j: usize, delta: f64) -> Result<SubmanifoldPoint> {
        if r >= self.xi_index() {
            return Err(Error::BadSpec("sigma along xi is fixed by (phi h)^T".into()));
        }
        let mut free = self.sigma_free();
        free[r][(i, j)] += delta;
        if i != j {
            free[r][(j, i)] += delta;
        }
        self.with_sigma_free(&free)
    }

    /// Copy with replaced free second fundamental form.
    pub fn with_sigma_free(&self, sigma_free: &[DMatrix<f64>]) -> Result<SubmanifoldPoint> {
        build_submanifold(
            self.ambient.clone(),
            &columns(&self.tangent),
            &columns(&self.normal),
            sigma_free,
        )
    }
}

fn columns(m: &DMatrix<f64>) -> Vec<Vector> {
    (0..m.ncols()).map(|i| m.column(i).into_owned()).collect()
}

#[derive(Serialize, Deserialize)]
struct SubmanifoldJson {
    ambient: AmbientPoint,
    n: usize,
    tangent_frame: Vec<Vec<f64>>,
    normal_frame: Vec<Vec<f64>>,
    /// Keyed by normal index `r = n+1..2m`; σ^ξ is omitted and recomputed.
    sigma: BTreeMap<usize, Vec<Vec<f64>>>,
}

impl From<SubmanifoldPoint> for SubmanifoldJson {
    fn from(s: SubmanifoldPoint) -> Self {
        let n = s.n();
        let sigma = s
            .shape
            .iter()
            .take(s.xi_index())
            .enumerate()
            .map(|(r, a)| (n + 1 + r, matrix_rows(a.matrix())))
            .collect();
        SubmanifoldJson {
            n,
            tangent_frame: matrix_rows(&s.tangent.transpose()),
            normal_frame: matrix_rows(&s.normal.transpose()),
            sigma,
            ambient: s.ambient,
        }
    }
}

impl TryFrom<SubmanifoldJson> for SubmanifoldPoint {
    type Error = Error;

    fn try_from(j: SubmanifoldJson) -> Result<Self> {
        let d = j.ambient.dim();
        let to_vecs = |rows: &[Vec<f64>]| -> Result<Vec<Vector>> {
            rows.iter()
                .map(|r| {
                    if r.len() != d {
                        Err(Error::DimensionMismatch { expected: d, found: r.len() })
                    } else {
                        Ok(Vector::from_column_slice(r))
                    }
                })
                .collect()
        };
        let tangent = to_vecs(&j.tangent_frame)?;
        let normal = to_vecs(&j.normal_frame)?;
        if tangent.len() != j.n {
            return Err(Error::DimensionMismatch { expected: j.n, found: tangent.len() });
        }
        let expected: Vec<usize> = (j.n + 1..=d - 1).collect();
        let keys: Vec<usize> = j.sigma.keys().copied().collect();
        if keys != expected {
            return Err(Error::BadFrame(format!("sigma keys {keys:?}, expected {expected:?}")));
        }
        let free = j
            .sigma
            .values()
            .map(|rows| crate::ambient::matrix_from_rows(rows, j.n))
            .collect::<Result<Vec<_>>>()?;
        build_submanifold(j.ambient, &tangent, &normal, &free)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{kappa_mu_coefficients, AmbientPoint, FCoefficients};
    use crate::linalg::{random_orthogonal, rng_from_seed};
    use rand::Rng;

    fn axis(d: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(d);
        v[i] = 1.0;
        v
    }

    /// Legendrian frame X_1..X_n with normals φX_1..φX_n, X_{n+1}.., φX_{n+1}.., ξ.
    fn legendrian(a: AmbientPoint, n: usize, free: &[DMatrix<f64>]) -> Result<SubmanifoldPoint> {
        let m = a.m();
        let d = a.dim();
        let t: Vec<Vector> = (0..n).map(|i| axis(d, i)).collect();
        let mut nf: Vec<Vector> = (0..n).map(|i| axis(d, m + i)).collect();
        nf.extend((n..m).map(|i| axis(d, i)));
        nf.extend((n..m).map(|i| axis(d, m + i)));
        nf.push(axis(d, 2 * m));
        build_submanifold(a, &t, &nf, free)
    }

    fn diag1233() -> SubmanifoldPoint {
        let a = AmbientPoint::sasakian(4, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let mut free = vec![DMatrix::zeros(4, 4); 4];
        free[0] = DMatrix::from_diagonal(&Vector::from_column_slice(&[1.0, 2.0, 3.0, 3.0]));
        legendrian(a, 4, &free).unwrap()
    }

    #[test]
    fn totally_geodesic_legendrian() {
        let a = AmbientPoint::sasakian(3, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let s = legendrian(a, 3, &vec![DMatrix::zeros(3, 3); 3]).unwrap();
        assert_eq!(s.sigma_norm_sq(), 0.0);
        assert_eq!(s.mean_curvature().norm_sq, 0.0);
        assert_eq!(s.relative_null_space().dim(), 3);
    }

    #[test]
    fn xi_in_tangent_frame_is_rejected() {
        let a = AmbientPoint::sasakian(2, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let t = vec![axis(5, 0), axis(5, 4)];
        let nf = vec![axis(5, 1), axis(5, 2), axis(5, 3)];
        let err = build_submanifold(a, &t, &nf, &[DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)]).unwrap_err();
        assert!(matches!(err, Error::NotCTotallyReal { condition: "eta(e_i)=0", .. }));
    }

    #[test]
    fn phi_invariant_plane_is_rejected() {
        let a = AmbientPoint::sasakian(2, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let t = vec![axis(5, 0), axis(5, 2)];
        let nf = vec![axis(5, 1), axis(5, 3), axis(5, 4)];
        let err = build_submanifold(a, &t, &nf, &[DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)]).unwrap_err();
        assert!(matches!(err, Error::NotCTotallyReal { condition: "<phi e_i,e_j>=0", .. }));
    }

    #[test]
    fn asymmetric_sigma_is_rejected() {
        let a = AmbientPoint::sasakian(2, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        let err = legendrian(a, 2, &[bad, DMatrix::zeros(2, 2)]).unwrap_err();
        assert!(matches!(err, Error::AsymmetricSigma { normal: 0, .. }));
    }

    #[test]
    fn adapted_frame_has_no_xi_shape_operator() {
        let f = FCoefficients::from_array([1.0, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]);
        let a = AmbientPoint::canonical(3, &[0.7, -0.2, 0.1], f).unwrap();
        let s = legendrian(a, 3, &vec![DMatrix::zeros(3, 3); 3]).unwrap();
        assert_eq!(s.sigma(s.xi_index()).norm_sq(), 0.0);
        let ht = s.tangential_h();
        assert_eq!(ht.matrix(), &DMatrix::from_diagonal(&Vector::from_column_slice(&[0.7, -0.2, 0.1])));
        assert_eq!(s.tangential_phih().norm_sq(), 0.0);
    }

    #[test]
    fn mean_curvature_and_sigma_norm_by_hand() {
        let s = diag1233();
        assert!((s.mean_curvature().norm_sq - 81.0 / 16.0).abs() < 1e-14);
        assert_eq!(s.sigma_norm_sq(), 23.0);
    }

    #[test]
    fn gauss_equation_by_hand() {
        let s = diag1233();
        let (e1, e2) = (axis(4, 0), axis(4, 1));
        let k = s.induced_curvature_coords(&e1, &e2, &e2, &e1).unwrap();
        assert!((k - 3.0).abs() < 1e-14);
        assert_eq!(s.induced_curvature_coords(&e1, &e1, &e2, &e1).unwrap(), 0.0);
        let off = Vector::from_column_slice(&[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(s.induced_curvature(&off, &off, &off, &off), Err(Error::NotTangent { .. })));
    }

    #[test]
    fn relative_null_space_for_the_ricci_equality_shape() {
        // σ^r_{11} = trace of the rest, first row zero otherwise, H = 0.
        let a = AmbientPoint::sasakian(3, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let mut free = vec![DMatrix::zeros(3, 3); 3];
        free[0] = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.4, 0.0, 0.4, -1.0]);
        free[1] = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.3, -0.2, 0.0, -0.2, -0.3]);
        let s = legendrian(a, 3, &free).unwrap();
        let ns = s.relative_null_space();
        assert_eq!(ns.dim(), 1);
        assert!((ns.vector(0)[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generic_sigma_has_trivial_null_space() {
        let a = AmbientPoint::sasakian(3, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let mut rng = rng_from_seed(2);
        let free: Vec<DMatrix<f64>> = (0..3)
            .map(|_| {
                let g = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
                &g + g.transpose()
            })
            .collect();
        let s = legendrian(a, 3, &free).unwrap();
        assert_eq!(s.relative_null_space().dim(), 0);
    }

    #[test]
    fn rotation_covariance() {
        let s = diag1233();
        let q = random_orthogonal(4, 8);
        let r = s.rotate_tangent(&q).unwrap();
        assert!((r.sigma_norm_sq() - s.sigma_norm_sq()).abs() < 1e-12);
        assert!((r.mean_curvature().norm_sq - s.mean_curvature().norm_sq).abs() < 1e-12);
    }

    #[test]
    fn align_mean_curvature_puts_h_first() {
        let a = AmbientPoint::sasakian(3, kappa_mu_coefficients(1.0, 1.0, 0.0)).unwrap();
        let mut free = vec![DMatrix::zeros(3, 3); 3];
        free[1] = DMatrix::identity(3, 3);
        free[2] = DMatrix::identity(3, 3) * 2.0;
        let s = legendrian(a, 3, &free).unwrap();
        let t = s.align_mean_curvature().unwrap();
        let h = t.mean_curvature();
        assert!((h.vector[0] - 5f64.sqrt()).abs() < 1e-12);
        assert!(h.vector.rows(1, 3).amax() < 1e-12);
        assert_eq!(t.normal_frame().column(3), s.normal_frame().column(3));
    }

    #[test]
    fn json_omits_xi_and_round_trips() {
        let s = diag1233();
        let text = serde_json::to_string(&s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v["sigma"].as_object().unwrap().keys().collect();
        assert_eq!(keys, vec!["5", "6", "7", "8"]);
        let back: SubmanifoldPoint = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
