//! One tangent space of a generalized (κ,μ)-space form with divided R5.
//!
//! Coordinates are orthonormal with the Reeb vector ξ as the last axis, so the
//! contact form η reads off the last coordinate. The tensor h is supplied as
//! pointwise data; [`validate_ambient`] checks its algebraic identities
//! together with those of the almost contact structure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, SkewOp, SymOp, Vector, MAX_DIM};

/// Absolute tolerance for the structure identities on unit inputs.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// The seven structure functions, evaluated at the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FCoefficients {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f51: f64,
    pub f52: f64,
    pub f6: f64,
}

impl FCoefficients {
    pub fn from_array(a: [f64; 7]) -> Self {
        FCoefficients {
            f1: a[0],
            f2: a[1],
            f3: a[2],
            f4: a[3],
            f51: a[4],
            f52: a[5],
            f6: a[6],
        }
    }

    pub fn to_array(&self) -> [f64; 7] {
        [self.f1, self.f2, self.f3, self.f4, self.f51, self.f52, self.f6]
    }

    /// Embeds an undivided form (single f5 coefficient): f51 = f5, f52 = -f5.
    pub fn undivided(f1: f64, f2: f64, f3: f64, f4: f64, f5: f64, f6: f64) -> Self {
        FCoefficients { f1, f2, f3, f4, f51: f5, f52: -f5, f6 }
    }

    pub fn coefficient(&self, term: CurvatureTerm) -> f64 {
        match term {
            CurvatureTerm::R1 => self.f1,
            CurvatureTerm::R2 => self.f2,
            CurvatureTerm::R3 => self.f3,
            CurvatureTerm::R4 => self.f4,
            CurvatureTerm::R51 => self.f51,
            CurvatureTerm::R52 => self.f52,
            CurvatureTerm::R6 => self.f6,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

/// The canonical tensors whose combination gives the ambient curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvatureTerm {
    R1,
    R2,
    R3,
    R4,
    R51,
    R52,
    R6,
}

impl CurvatureTerm {
    pub const ALL: [CurvatureTerm; 7] = [
        CurvatureTerm::R1,
        CurvatureTerm::R2,
        CurvatureTerm::R3,
        CurvatureTerm::R4,
        CurvatureTerm::R51,
        CurvatureTerm::R52,
        CurvatureTerm::R6,
    ];

    pub fn index(self) -> u32 {
        match self {
            CurvatureTerm::R1 => 1,
            CurvatureTerm::R2 => 2,
            CurvatureTerm::R3 => 3,
            CurvatureTerm::R4 => 4,
            CurvatureTerm::R51 => 51,
            CurvatureTerm::R52 => 52,
            CurvatureTerm::R6 => 6,
        }
    }
}

impl TryFrom<u32> for CurvatureTerm {
    type Error = Error;

    fn try_from(idx: u32) -> Result<Self> {
        Ok(match idx {
            1 => CurvatureTerm::R1,
            2 => CurvatureTerm::R2,
            3 => CurvatureTerm::R3,
            4 => CurvatureTerm::R4,
            51 => CurvatureTerm::R51,
            52 => CurvatureTerm::R52,
            6 => CurvatureTerm::R6,
            other => return Err(Error::BadIndex(other)),
        })
    }
}

/// A failed structure identity with its largest residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub identity: String,
    pub residual: f64,
}

/// Tangent space of the ambient manifold at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "AmbientJson", try_from = "AmbientJson")]
pub struct AmbientPoint {
    m: usize,
    phi: SkewOp,
    h: SymOp,
    f: FCoefficients,
}

impl AmbientPoint {
    /// Assembles a point without checking the structure identities; use
    /// [`validate_ambient`] for that.
    pub fn new(m: usize, phi: SkewOp, h: SymOp, f: FCoefficients) -> Result<Self> {
        let dim = 2 * m + 1;
        if m == 0 || dim > MAX_DIM {
            return Err(Error::BadDimension {
                expected: format!("1 <= m and 2m+1 <= {MAX_DIM}"),
                found: m,
            });
        }
        for d in [phi.dim(), h.dim()] {
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
        }
        Ok(AmbientPoint { m, phi, h, f })
    }

    /// Adapted frame: φ pairs `X_i` (axis `i`) with `φX_i` (axis `m + i`), ξ is
    /// the last axis, and `h X_i = λ_i X_i`, `h φX_i = -λ_i φX_i`.
    pub fn canonical(m: usize, h_eigenvalues: &[f64], f: FCoefficients) -> Result<Self> {
        if h_eigenvalues.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: h_eigenvalues.len() });
        }
        let mut diag = vec![0.0; 2 * m + 1];
        for (i, &l) in h_eigenvalues.iter().enumerate() {
            diag[i] = l;
            diag[m + i] = -l;
        }
        AmbientPoint::new(m, canonical_phi(m), SymOp::from_diagonal(&diag), f)
    }

    /// Canonical point with h = 0.
    pub fn sasakian(m: usize, f: FCoefficients) -> Result<Self> {
        AmbientPoint::canonical(m, &vec![0.0; m], f)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Ambient dimension 2m+1.
    pub fn dim(&self) -> usize {
        2 * self.m + 1
    }

    pub fn phi(&self) -> &SkewOp {
        &self.phi
    }

    pub fn h(&self) -> &SymOp {
        &self.h
    }

    pub fn f(&self) -> &FCoefficients {
        &self.f
    }

    pub fn with_f(&self, f: FCoefficients) -> Self {
        AmbientPoint { f, ..self.clone() }
    }

    pub fn xi(&self) -> Vector {
        let mut x = Vector::zeros(self.dim());
        x[2 * self.m] = 1.0;
        x
    }

    pub fn eta(&self, x: &Vector) -> f64 {
        x[2 * self.m]
    }

    /// The operator φh as a plain matrix.
    pub fn phi_h(&self) -> DMatrix<f64> {
        self.phi.matrix() * self.h.matrix()
    }

    /// Rotates the structure by an orthogonal `Q` acting on the contact
    /// distribution only (ξ fixed): `φ -> Q φ Q^T`, `h -> Q h Q^T`.
    pub fn conjugated(&self, q_contact: &DMatrix<f64>) -> Result<Self> {
        let d = self.dim();
        if q_contact.nrows() != d - 1 || q_contact.ncols() != d - 1 {
            return Err(Error::DimensionMismatch { expected: d - 1, found: q_contact.nrows() });
        }
        let mut q = DMatrix::identity(d, d);
        q.view_mut((0, 0), (d - 1, d - 1)).copy_from(q_contact);
        let phi = SkewOp::new(&q * self.phi.matrix() * q.transpose())?;
        let h = SymOp::new(&q * self.h.matrix() * q.transpose())?;
        AmbientPoint::new(self.m, phi, h, self.f)
    }

    fn check_dims(&self, vs: &[&Vector]) -> Result<()> {
        for v in vs {
            if v.len() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
            }
        }
        Ok(())
    }
}

/// Block rotation pairing axis `i` with axis `m + i`; ξ (last axis) is fixed.
pub fn canonical_phi(m: usize) -> SkewOp {
    let d = 2 * m + 1;
    let mut p = DMatrix::zeros(d, d);
    for i in 0..m {
        p[(m + i, i)] = 1.0;
        p[(i, m + i)] = -1.0;
    }
    SkewOp::new(p).expect("square")
}

/// Checks every almost contact metric identity and the algebraic identities
/// of h; empty output means the point is valid at [`STRUCTURE_TOL`].
pub fn validate_ambient(a: &AmbientPoint) -> Vec<Violation> {
    let d = a.dim();
    let phi = a.phi.matrix();
    let h = a.h.matrix();
    let xi = a.xi();
    let eta_xi = &xi * xi.transpose();
    let id = DMatrix::<f64>::identity(d, d);

    let mut out = Vec::new();
    let mut push = |name: &str, residual: f64| {
        if !(residual <= STRUCTURE_TOL) {
            out.push(Violation { identity: name.to_string(), residual });
        }
    };

    push("phi^2=-I+eta(x)xi", max_abs(&(phi * phi + &id - &eta_xi)));
    push("phi xi=0", (phi * &xi).amax());
    push("eta o phi=0", phi.row(d - 1).amax());
    push("<phiX,phiY>=<X,Y>-eta(X)eta(Y)", max_abs(&(phi.transpose() * phi - &id + &eta_xi)));
    push("h xi=0", (h * &xi).amax());
    push("h phi+phi h=0", max_abs(&(h * phi + phi * h)));
    push("tr(h)=0", h.trace().abs());
    push("tr(phi h)=0", (phi * h).trace().abs());
    out
}

/// `R_term(X, Y) Z` for one canonical tensor.
pub fn curvature_component(
    a: &AmbientPoint,
    term: CurvatureTerm,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> Result<Vector> {
    a.check_dims(&[x, y, z])?;
    let xi = a.xi();
    Ok(match term {
        CurvatureTerm::R1 => x * y.dot(z) - y * x.dot(z),
        CurvatureTerm::R2 => {
            let (px, py, pz) = (a.phi.apply(x), a.phi.apply(y), a.phi.apply(z));
            &py * x.dot(&pz) - &px * y.dot(&pz) + &pz * (2.0 * x.dot(&py))
        }
        CurvatureTerm::R3 => {
            let (ex, ey, ez) = (a.eta(x), a.eta(y), a.eta(z));
            y * (ex * ez) - x * (ey * ez) + &xi * (x.dot(z) * ey - y.dot(z) * ex)
        }
        CurvatureTerm::R4 => {
            let (hx, hy) = (a.h.apply(x), a.h.apply(y));
            &hx * y.dot(z) - &hy * x.dot(z) + x * hy.dot(z) - y * hx.dot(z)
        }
        CurvatureTerm::R51 => {
            let (hx, hy) = (a.h.apply(x), a.h.apply(y));
            &hx * hy.dot(z) - &hy * hx.dot(z)
        }
        CurvatureTerm::R52 => {
            let ph = a.phi_h();
            let (phx, phy) = (&ph * x, &ph * y);
            &phx * phy.dot(z) - &phy * phx.dot(z)
        }
        CurvatureTerm::R6 => {
            let (ex, ey, ez) = (a.eta(x), a.eta(y), a.eta(z));
            let (hx, hy) = (a.h.apply(x), a.h.apply(y));
            &hy * (ex * ez) - &hx * (ey * ez) + &xi * (hx.dot(z) * ey - hy.dot(z) * ex)
        }
    })
}

/// `<R(X, Y) Z, W>` with `R = Σ f_i R_i`.
pub fn ambient_curvature(
    a: &AmbientPoint,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    w: &Vector,
) -> Result<f64> {
    a.check_dims(&[x, y, z, w])?;
    let mut total = 0.0;
    for term in CurvatureTerm::ALL {
        let c = a.f.coefficient(term);
        if c != 0.0 {
            total += c * curvature_component(a, term, x, y, z)?.dot(w);
        }
    }
    Ok(total)
}

/// Coefficients of a (κ,μ)-space form with constant φ-sectional curvature c.
pub fn kappa_mu_coefficients(c: f64, kappa: f64, mu: f64) -> FCoefficients {
    FCoefficients {
        f1: (c + 3.0) / 4.0,
        f2: (c - 1.0) / 4.0,
        f3: (c + 3.0) / 4.0 - kappa,
        f4: 1.0,
        f51: 0.5,
        f52: -0.5,
        f6: 1.0 - mu,
    }
}

/// Coefficients of a non-Sasakian (κ,μ)-space form written with divided R5.
pub fn non_sasakian_divided_coefficients(kappa: f64, mu: f64) -> Result<FCoefficients> {
    if (1.0 - kappa).abs() < 1e-12 {
        return Err(Error::SingularKappa);
    }
    Ok(FCoefficients {
        f1: (2.0 - mu) / 2.0,
        f2: -mu / 2.0,
        f3: (2.0 - mu - 2.0 * kappa) / 2.0,
        f4: 1.0,
        f51: (2.0 - mu) / (2.0 * (1.0 - kappa)),
        f52: (2.0 * kappa - mu) / (2.0 * (1.0 - kappa)),
        f6: 1.0 - mu,
    })
}

/// Contact metric → Sasakian criterion `f3 = f1 - 1`.
pub fn classify_sasakian(f: &FCoefficients) -> bool {
    (f.f3 - (f.f1 - 1.0)).abs() <= 1e-12
}

/// Stricter variant that also demands `f2 = f1 - 1`, the conclusion known to
/// hold for Sasakian generalized (κ,μ)-space forms.
pub fn classify_sasakian_strict(f: &FCoefficients) -> bool {
    classify_sasakian(f) && (f.f2 - (f.f1 - 1.0)).abs() <= 1e-12
}

/// Columns `X_1..X_m, φX_1..φX_m` of an orthonormal φ-adapted basis of the
/// contact distribution in which h is diagonal (`h X_i = λ_i X_i`).
///
/// Canonical points return the identity columns unchanged.
pub fn adapted_frame(a: &AmbientPoint) -> Result<DMatrix<f64>> {
    let violations = validate_ambient(a);
    if !violations.is_empty() {
        return Err(Error::InvalidAmbient(violations));
    }
    let m = a.m;
    let d = a.dim();
    if is_canonical(a) {
        return Ok(DMatrix::identity(d, 2 * m));
    }
    let phi = a.phi.matrix();
    // h restricted to the contact distribution (first 2m axes, since ξ is last).
    let hc = SymOp::new(a.h.matrix().view((0, 0), (2 * m, 2 * m)).into_owned())?;
    let (vals, vecs) = hc.eigen();
    let lift = |c: nalgebra::DVectorView<f64>| {
        let mut v = Vector::zeros(d);
        v.rows_mut(0, 2 * m).copy_from(&c);
        v
    };
    let mut xs: Vec<Vector> = Vec::with_capacity(m);
    let mut positives: Vec<(f64, Vector)> = vals
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-9)
        .map(|(i, &l)| (l, lift(vecs.column(i))))
        .collect();
    positives.sort_by(|p, q| q.0.total_cmp(&p.0));
    xs.extend(positives.into_iter().map(|(_, v)| v));
    let zero_block: Vec<Vector> = vals
        .iter()
        .enumerate()
        .filter(|(_, &l)| l.abs() <= 1e-9)
        .map(|(i, _)| lift(vecs.column(i)))
        .collect();
    let mut chosen: Vec<Vector> = xs.iter().flat_map(|x| [x.clone(), phi * x]).collect();
    for w0 in zero_block {
        if xs.len() == m {
            break;
        }
        let mut w = w0;
        for _ in 0..2 {
            for q in &chosen {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            let x = w / norm;
            chosen.push(x.clone());
            chosen.push(phi * &x);
            xs.push(x);
        }
    }
    if xs.len() != m {
        return Err(Error::BadFrame(format!(
            "could not build a phi-adapted basis ({} of {m} pairs)",
            xs.len()
        )));
    }
    let mut out = DMatrix::zeros(d, 2 * m);
    for (i, x) in xs.iter().enumerate() {
        out.set_column(i, x);
        out.set_column(m + i, &(phi * x));
    }
    Ok(out)
}

fn is_canonical(a: &AmbientPoint) -> bool {
    let m = a.m;
    if max_abs(&(a.phi.matrix() - canonical_phi(m).matrix())) > 0.0 {
        return false;
    }
    let h = a.h.matrix();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if i != j && h[(i, j)] != 0.0 {
                return false;
            }
        }
    }
    (0..m).all(|i| h[(m + i, m + i)] == -h[(i, i)])
}

#[derive(Serialize, Deserialize)]
struct AmbientJson {
    m: usize,
    f: [f64; 7],
    phi: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], ncols: usize) -> Result<DMatrix<f64>> {
    for r in rows {
        if r.len() != ncols {
            return Err(Error::DimensionMismatch { expected: ncols, found: r.len() });
        }
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl From<AmbientPoint> for AmbientJson {
    fn from(a: AmbientPoint) -> Self {
        AmbientJson {
            m: a.m,
            f: a.f.to_array(),
            phi: matrix_rows(a.phi.matrix()),
            h: matrix_rows(a.h.matrix()),
        }
    }
}

impl TryFrom<AmbientJson> for AmbientPoint {
    type Error = Error;

    fn try_from(j: AmbientJson) -> Result<Self> {
        let d = 2 * j.m + 1;
        let phi = SkewOp::new(matrix_from_rows(&j.phi, d)?)?;
        let h = SymOp::new(matrix_from_rows(&j.h, d)?)?;
        AmbientPoint::new(j.m, phi, h, FCoefficients::from_array(j.f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_orthogonal, random_unit, rng_from_seed};

    fn e(d: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(d);
        v[i] = 1.0;
        v
    }

    fn unit_r1(m: usize) -> AmbientPoint {
        AmbientPoint::sasakian(m, FCoefficients::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
            .unwrap()
    }

    fn generic(m: usize, seed: u64) -> AmbientPoint {
        let lambdas: Vec<f64> = (0..m).map(|i| 0.3 * (i as f64 + 1.0) - 0.5).collect();
        let f = FCoefficients::from_array([1.3, -0.4, 0.7, 0.9, -1.1, 0.6, 0.25]);
        let a = AmbientPoint::canonical(m, &lambdas, f).unwrap();
        a.conjugated(&random_orthogonal(2 * m, seed)).unwrap()
    }

    #[test]
    fn standard_sasakian_point_is_valid() {
        assert!(validate_ambient(&unit_r1(3)).is_empty());
        assert!(validate_ambient(&generic(3, 9)).is_empty());
    }

    #[test]
    fn phi_commuting_h_is_rejected() {
        let base = unit_r1(2);
        let mut h = DMatrix::identity(5, 5);
        h[(4, 4)] = 0.0;
        let bad = AmbientPoint::new(2, base.phi().clone(), SymOp::new(h).unwrap(), *base.f()).unwrap();
        let v = validate_ambient(&bad);
        assert!(v.iter().any(|x| x.identity == "h phi+phi h=0"));
    }

    #[test]
    fn phi_moving_xi_is_rejected() {
        let base = unit_r1(2);
        let mut p = base.phi().matrix().clone();
        p[(0, 4)] = 1.0;
        p[(4, 0)] = -1.0;
        let bad = AmbientPoint::new(2, SkewOp::new(p).unwrap(), base.h().clone(), *base.f()).unwrap();
        let v = validate_ambient(&bad);
        assert!(v.iter().any(|x| x.identity == "phi xi=0"));
    }

    #[test]
    fn r1_on_orthonormal_pair() {
        let a = unit_r1(2);
        let r = curvature_component(&a, CurvatureTerm::R1, &e(5, 0), &e(5, 1), &e(5, 1)).unwrap();
        assert_eq!(r, e(5, 0));
        assert_eq!(ambient_curvature(&a, &e(5, 0), &e(5, 1), &e(5, 1), &e(5, 0)).unwrap(), 1.0);
    }

    #[test]
    fn r51_vanishes_without_h() {
        let a = unit_r1(2);
        let mut rng = rng_from_seed(1);
        let (x, y, z) = (random_unit(&mut rng, 5), random_unit(&mut rng, 5), random_unit(&mut rng, 5));
        let r = curvature_component(&a, CurvatureTerm::R51, &x, &y, &z).unwrap();
        assert!(r.amax() == 0.0);
    }

    #[test]
    fn r2_is_invisible_on_legendrian_planes() {
        // X_1, X_2, X_3 span a Legendrian plane: φX_i is orthogonal to all of them.
        let a = generic(3, 4);
        let frame = adapted_frame(&a).unwrap();
        let t: Vec<Vector> = (0..3).map(|i| frame.column(i).into_owned()).collect();
        for x in &t {
            for y in &t {
                for z in &t {
                    let r = curvature_component(&a, CurvatureTerm::R2, x, y, z).unwrap();
                    for w in &t {
                        assert!(r.dot(w).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn phi_sectional_curvature_of_sasakian_space_form() {
        let a = AmbientPoint::sasakian(2, kappa_mu_coefficients(5.0, 1.0, 0.0)).unwrap();
        let x = Vector::from_column_slice(&[0.6, 0.0, 0.0, 0.8, 0.0]);
        let px = a.phi().apply(&x);
        let k = ambient_curvature(&a, &x, &px, &px, &x).unwrap();
        assert!((k - 5.0).abs() < 1e-13);
    }

    #[test]
    fn curvature_is_antisymmetric_and_pair_symmetric() {
        let a = generic(3, 17);
        let mut rng = rng_from_seed(99);
        for _ in 0..50 {
            let v: Vec<Vector> = (0..4).map(|_| random_unit(&mut rng, 7)).collect();
            let r = |p: usize, q: usize, s: usize, t: usize| {
                ambient_curvature(&a, &v[p], &v[q], &v[s], &v[t]).unwrap()
            };
            let base = r(0, 1, 2, 3);
            assert!((base + r(1, 0, 2, 3)).abs() < 1e-10);
            assert!((base + r(0, 1, 3, 2)).abs() < 1e-10);
            assert!((base - r(2, 3, 0, 1)).abs() < 1e-10);
            assert!(r(0, 0, 2, 3).abs() < 1e-12);
        }
    }

    #[test]
    fn divided_form_reproduces_undivided_r5() {
        let a = generic(2, 5).with_f(FCoefficients::undivided(0.0, 0.0, 0.0, 0.0, 1.7, 0.0));
        let mut rng = rng_from_seed(6);
        for _ in 0..20 {
            let v: Vec<Vector> = (0..4).map(|_| random_unit(&mut rng, 5)).collect();
            let r51 = curvature_component(&a, CurvatureTerm::R51, &v[0], &v[1], &v[2]).unwrap();
            let r52 = curvature_component(&a, CurvatureTerm::R52, &v[0], &v[1], &v[2]).unwrap();
            let undivided = 1.7 * (r51 - r52).dot(&v[3]);
            let got = ambient_curvature(&a, &v[0], &v[1], &v[2], &v[3]).unwrap();
            assert!((got - undivided).abs() < 1e-13);
        }
    }

    #[test]
    fn kappa_mu_examples() {
        let f = kappa_mu_coefficients(1.0, 1.0, 0.0);
        assert_eq!(f.to_array(), [1.0, 0.0, 0.0, 1.0, 0.5, -0.5, 1.0]);
        let g = kappa_mu_coefficients(-3.0, 0.0, 0.0);
        assert_eq!((g.f1, g.f2), (0.0, -1.0));
        assert_eq!(kappa_mu_coefficients(5.0, 1.0, 0.0).f3, 1.0);
    }

    #[test]
    fn non_sasakian_examples() {
        let f = non_sasakian_divided_coefficients(0.0, 0.0).unwrap();
        assert_eq!(f.to_array(), [1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0]);
        let g = non_sasakian_divided_coefficients(0.0, 2.0).unwrap();
        // Straight from the closed forms: f3 = (2-2-0)/2 and f52 = (0-2)/2.
        assert_eq!(g.to_array(), [0.0, -1.0, 0.0, 1.0, 0.0, -1.0, -1.0]);
        assert!(matches!(non_sasakian_divided_coefficients(1.0, 0.3), Err(Error::SingularKappa)));
    }

    #[test]
    fn sasakian_classification() {
        assert!(classify_sasakian(&FCoefficients::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])));
        assert!(!classify_sasakian(&FCoefficients::from_array([1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0])));
        for c in [-3.0, 0.0, 1.0, 2.5, 7.0] {
            assert!(classify_sasakian(&kappa_mu_coefficients(c, 1.0, 0.4)));
            assert!(classify_sasakian_strict(&kappa_mu_coefficients(c, 1.0, 0.4)));
        }
    }

    #[test]
    fn bad_index() {
        assert!(matches!(CurvatureTerm::try_from(5), Err(Error::BadIndex(5))));
        assert_eq!(CurvatureTerm::try_from(52).unwrap(), CurvatureTerm::R52);
    }

    #[test]
    fn json_round_trip_is_bit_faithful() {
        let a = generic(3, 21);
        let s = serde_json::to_string(&a).unwrap();
        let back: AmbientPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn adapted_frame_diagonalizes_h() {
        let a = generic(3, 33);
        let fr = adapted_frame(&a).unwrap();
        let m = 3;
        for i in 0..m {
            let x = fr.column(i).into_owned();
            let px = fr.column(m + i).into_owned();
            assert!((a.phi().apply(&x) - &px).norm() < 1e-10);
            let hx = a.h().apply(&x);
            let l = hx.dot(&x);
            assert!((hx - &x * l).norm() < 1e-9);
        }
        assert!(crate::linalg::gram_error(&fr) < 1e-10);
    }
}
