//! Small dense linear algebra shared by every other module.
//!
//! All geometry is expressed in orthonormal coordinates, so inner products are
//! plain dot products and the metric never appears explicitly. Dimensions stay
//! at desk scale (at most [`MAX_DIM`]).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Column vector in orthonormal coordinates.
pub type Vector = DVector<f64>;

/// Pivot tolerance used by [`orthonormalize`].
pub const RANK_TOL: f64 = 1e-10;
/// Tolerance on `|<b_i, b_j> - delta_ij|` for a constructed [`Subspace`].
pub const ORTHO_TOL: f64 = 1e-12;
/// Largest supported dimension.
pub const MAX_DIM: usize = 64;

/// Symmetric operator. The constructor symmetrizes, so entries satisfy
/// `a[(i, j)] == a[(j, i)]` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymOp(DMatrix<f64>);

impl SymOp {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let t = m.transpose();
        Ok(SymOp((m + t) * 0.5))
    }

    pub fn zeros(n: usize) -> Self {
        SymOp(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymOp(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        SymOp(DMatrix::from_diagonal(&Vector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Sum of squared entries.
    pub fn norm_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.0 * x
    }

    /// `x^T A y`.
    pub fn form(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.0 * y))
    }

    /// `B^T A B` for a basis matrix `B`.
    pub fn restrict(&self, basis: &DMatrix<f64>) -> SymOp {
        SymOp::new(basis.transpose() * &self.0 * basis).expect("square by construction")
    }

    pub fn scale(&self, s: f64) -> SymOp {
        SymOp(&self.0 * s)
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<f64>) {
        let n = self.dim();
        if n == 0 {
            return (Vec::new(), DMatrix::zeros(0, 0));
        }
        let se = SymmetricEigen::new(self.0.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (c, &i) in order.iter().enumerate() {
            vectors.set_column(c, &se.eigenvectors.column(i));
        }
        (values, vectors)
    }
}

impl std::ops::Add for &SymOp {
    type Output = SymOp;
    fn add(self, rhs: &SymOp) -> SymOp {
        SymOp(&self.0 + &rhs.0)
    }
}

/// Skew-symmetric operator; the constructor antisymmetrizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewOp(DMatrix<f64>);

impl SkewOp {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let t = m.transpose();
        Ok(SkewOp((m - t) * 0.5))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.0 * x
    }
}

/// Orthonormally spanned subspace. The basis is stored as matrix columns.
///
/// A dimension-zero subspace is representable (an empty kernel, for example).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wraps columns that are already orthonormal (checked at [`ORTHO_TOL`]
    /// scaled by a small multiple to absorb accumulated rounding).
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self> {
        let err = gram_error(&basis);
        if err > 1e2 * ORTHO_TOL {
            return Err(Error::BadFrame(format!(
                "basis is not orthonormal (gram residual {err:e})"
            )));
        }
        Ok(Subspace { basis })
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// Span of the listed coordinate axes.
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Self {
        let mut basis = DMatrix::zeros(ambient_dim, axes.len());
        for (c, &a) in axes.iter().enumerate() {
            basis[(a, c)] = 1.0;
        }
        Subspace { basis }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vector(&self, i: usize) -> Vector {
        self.basis.column(i).into_owned()
    }

    pub fn vectors(&self) -> Vec<Vector> {
        (0..self.dim()).map(|i| self.vector(i)).collect()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &Vector) -> f64 {
        let proj = &self.basis * (self.basis.transpose() * v);
        (v - proj).norm()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Subspace {
        complement_basis(&self.basis)
    }

    /// Re-bases the subspace by an orthogonal `k x k` matrix (same span).
    pub fn rotated(&self, q: &DMatrix<f64>) -> Result<Subspace> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.nrows(),
            });
        }
        Subspace::from_orthonormal(&self.basis * q)
    }

    /// Rows of the basis vectors, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.vectors()
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect()
    }
}

/// Largest deviation of `B^T B` from the identity.
pub fn gram_error(basis: &DMatrix<f64>) -> f64 {
    let g = basis.transpose() * basis;
    let k = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Gram–Schmidt with one re-orthogonalization pass.
///
/// Fails with [`Error::RankDeficient`] when a pivot falls below [`RANK_TOL`]
/// relative to the largest input norm.
pub fn orthonormalize(vs: &[Vector]) -> Result<Subspace> {
    let dim = match vs.first() {
        Some(v) => v.len(),
        None => return Err(Error::BadDimension { expected: ">= 1 vector".into(), found: 0 }),
    };
    if let Some(v) = vs.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    let scale = vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut out: Vec<Vector> = Vec::with_capacity(vs.len());
    let mut rank = 0;
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if scale == 0.0 || norm <= RANK_TOL * scale {
            continue;
        }
        out.push(w / norm);
        rank += 1;
    }
    if rank < vs.len() {
        return Err(Error::RankDeficient { rank, count: vs.len() });
    }
    let basis = DMatrix::from_columns(&out);
    Ok(Subspace { basis })
}

/// Orthonormal completion of the column span of `basis`.
pub fn complement_basis(basis: &DMatrix<f64>) -> Subspace {
    let n = basis.nrows();
    let mut cols: Vec<Vector> = (0..basis.ncols()).map(|i| basis.column(i).into_owned()).collect();
    let k = cols.len();
    for axis in 0..n {
        if cols.len() == n {
            break;
        }
        let mut w = Vector::zeros(n);
        w[axis] = 1.0;
        for _ in 0..2 {
            for q in &cols {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            cols.push(w / norm);
        }
    }
    let rest: Vec<Vector> = cols.split_off(k);
    if rest.is_empty() {
        return Subspace::empty(n);
    }
    Subspace { basis: DMatrix::from_columns(&rest) }
}

/// Smallest eigenvalue of a symmetric operator.
pub fn min_eigenvalue(a: &SymOp) -> f64 {
    a.eigen().0.first().copied().unwrap_or(f64::NAN)
}

/// Largest eigenvalue of a symmetric operator.
pub fn max_eigenvalue(a: &SymOp) -> f64 {
    a.eigen().0.last().copied().unwrap_or(f64::NAN)
}

/// Mixes a base seed with a stream counter (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniformly distributed unit vector.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

/// Haar-distributed orthogonal matrix drawn from an existing generator.
pub fn random_orthogonal_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Seeded Haar-distributed orthogonal matrix.
pub fn random_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    assert!(dim >= 1, "random_orthogonal needs dim >= 1");
    let mut rng = rng_from_seed(seed);
    random_orthogonal_with(&mut rng, dim)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn orthonormalize_keeps_standard_basis() {
        let s = orthonormalize(&[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(s.vector(0), v(&[1.0, 0.0, 0.0]));
        assert_eq!(s.vector(1), v(&[0.0, 1.0, 0.0]));
    }

    #[test]
    fn orthonormalize_by_hand() {
        let s = orthonormalize(&[v(&[1.0, 0.0]), v(&[1.0, 1.0])]).unwrap();
        assert!((s.vector(0) - v(&[1.0, 0.0])).norm() < 1e-15);
        assert!((s.vector(1) - v(&[0.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn orthonormalize_rejects_dependent() {
        let a = v(&[0.3, -1.0, 2.0]);
        let err = orthonormalize(&[a.clone(), &a * 2.0]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 1, count: 2 }));
    }

    #[test]
    fn orthonormalize_is_idempotent() {
        let mut rng = rng_from_seed(3);
        let vs: Vec<Vector> = (0..4).map(|_| gaussian_vector(&mut rng, 6)).collect();
        let s = orthonormalize(&vs).unwrap();
        assert!(gram_error(s.basis()) <= ORTHO_TOL);
        let again = orthonormalize(&s.vectors()).unwrap();
        assert!(max_abs(&(again.basis() - s.basis())) <= ORTHO_TOL);
    }

    #[test]
    fn min_eigenvalue_of_simple_operators() {
        assert!((min_eigenvalue(&SymOp::identity(3)) - 1.0).abs() < 1e-14);
        assert!((min_eigenvalue(&SymOp::from_diagonal(&[2.0, -5.0, 0.0])) + 5.0).abs() < 1e-14);
    }

    #[test]
    fn min_eigenvalue_below_rayleigh_quotients() {
        let mut rng = rng_from_seed(11);
        let g = DMatrix::from_fn(5, 5, |_, _| rng.sample::<f64, _>(StandardNormal));
        let a = SymOp::new(g).unwrap();
        let lo = min_eigenvalue(&a);
        for _ in 0..100 {
            let x = random_unit(&mut rng, 5);
            assert!(lo <= a.form(&x, &x) + 1e-12);
        }
        // min <= max
        assert!(lo + min_eigenvalue(&a.scale(-1.0)) <= 1e-12);
    }

    #[test]
    fn random_orthogonal_properties() {
        let q1 = random_orthogonal(1, 5);
        assert!((q1[(0, 0)].abs() - 1.0).abs() < 1e-15);
        assert_eq!(random_orthogonal(3, 7), random_orthogonal(3, 7));
        let q = random_orthogonal(5, 42);
        assert!(gram_error(&q) <= ORTHO_TOL);
    }

    #[test]
    fn complement_spans_the_rest() {
        let s = orthonormalize(&[v(&[1.0, 1.0, 0.0])]).unwrap();
        let c = s.complement();
        assert_eq!(c.dim(), 2);
        let mut joint = DMatrix::zeros(3, 3);
        joint.set_column(0, &s.vector(0));
        joint.set_column(1, &c.vector(0));
        joint.set_column(2, &c.vector(1));
        assert!(gram_error(&joint) < 1e-14);
    }

    #[test]
    fn symmetrizing_constructor_is_exact() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 3.0]);
        let s = SymOp::new(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        let k = SkewOp::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 3.0])).unwrap();
        assert_eq!(k.matrix()[(0, 1)], -k.matrix()[(1, 0)]);
        assert_eq!(k.matrix()[(0, 0)], 0.0);
    }
}
