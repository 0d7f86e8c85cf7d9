//! Deterministic instance generators and brute-force oracles.
//!
//! Generated submanifolds always use a φ-adapted basis of the ambient point
//! (see [`adapted_frame`]), so tangent-frame coordinates line up with the
//! block structure that the equality forms are written in.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{
    adapted_frame, classify_sasakian, classify_sasakian_strict, kappa_mu_coefficients,
    non_sasakian_divided_coefficients, AmbientPoint, FCoefficients,
};
use crate::error::{Error, Result};
use crate::invariants::{enumerate_tuples, TupleSpec};
use crate::linalg::{derive_seed, random_orthogonal_with, rng_from_seed, Vector, MAX_DIM};
use crate::submanifold::{build_submanifold, SubmanifoldPoint};

/// Largest n accepted by [`oracle_invariants`].
pub const ORACLE_MAX_N: usize = 5;

const STREAM_H: u64 = 1;
const STREAM_CONJ: u64 = 2;
const STREAM_FRAME: u64 = 3;
const STREAM_SIGMA: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General,
    Sasakian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FSource {
    Explicit { f: FCoefficients },
    KappaMu { c: f64, kappa: f64, mu: f64 },
    NonSasakian { kappa: f64, mu: f64 },
}

impl FSource {
    pub fn coefficients(&self) -> Result<FCoefficients> {
        match *self {
            FSource::Explicit { f } => Ok(f),
            FSource::KappaMu { c, kappa, mu } => Ok(kappa_mu_coefficients(c, kappa, mu)),
            FSource::NonSasakian { kappa, mu } => non_sasakian_divided_coefficients(kappa, mu),
        }
    }
}

/// How the tangent plane sits relative to the adapted basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    /// Rotations of `X_1..X_n`; `(φh)^T = 0`.
    Adapted,
    /// `cos θ_i X_i + sin θ_i φX_i`, then rotated; `(φh)^T ≠ 0` when h ≠ 0.
    Twisted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Random,
    TotallyGeodesic,
    Umbilical { lambda: f64 },
    EqualityBasic { a: f64, b: f64 },
    EqualityDelta { dims: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub m: usize,
    pub n: usize,
    pub mode: Mode,
    pub f_source: FSource,
    /// Eigenvalues of h on `X_1..X_m`; drawn from U(-1, 1) when absent.
    /// Ignored in Sasakian mode.
    #[serde(default)]
    pub h_eigenvalues: Option<Vec<f64>>,
    pub sigma_scale: f64,
    pub seed: u64,
    #[serde(default = "default_frame")]
    pub frame: FrameKind,
    /// Conjugate the contact distribution by a random rotation.
    #[serde(default)]
    pub conjugate: bool,
    #[serde(default = "default_family")]
    pub family: Family,
    /// In Sasakian mode, also require `f2 = f1 - 1`.
    #[serde(default)]
    pub strict_sasakian: bool,
}

fn default_frame() -> FrameKind {
    FrameKind::Adapted
}

fn default_family() -> Family {
    Family::Random
}

impl GeneratorSpec {
    /// Sasakian space form with `f1 = 1` (c = 1, κ = 1, μ = 0).
    pub fn sasakian(m: usize, n: usize, seed: u64) -> Self {
        GeneratorSpec {
            m,
            n,
            mode: Mode::Sasakian,
            f_source: FSource::KappaMu { c: 1.0, kappa: 1.0, mu: 0.0 },
            h_eigenvalues: None,
            sigma_scale: 1.0,
            seed,
            frame: FrameKind::Adapted,
            conjugate: false,
            family: Family::Random,
            strict_sasakian: false,
        }
    }

    /// General mode with explicit coefficients `f`.
    pub fn general(m: usize, n: usize, f: FCoefficients, seed: u64) -> Self {
        GeneratorSpec {
            mode: Mode::General,
            f_source: FSource::Explicit { f },
            ..GeneratorSpec::sasakian(m, n, seed)
        }
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }
}

/// Builds the ambient point of a spec and checks the dimension and mode rules.
pub fn make_ambient(spec: &GeneratorSpec) -> Result<AmbientPoint> {
    let (m, n) = (spec.m, spec.n);
    if n < 2 {
        return Err(Error::BadSpec(format!("n = {n}; submanifolds need n >= 2")));
    }
    if n > m {
        return Err(Error::BadSpec(format!(
            "n = {n} > m = {m}: a C-totally real submanifold of a (2m+1)-dimensional space needs n <= m"
        )));
    }
    if 2 * m + 1 > MAX_DIM {
        return Err(Error::BadSpec(format!("m = {m} exceeds the dimension cap 2m+1 <= {MAX_DIM}")));
    }
    if !(spec.sigma_scale >= 0.0 && spec.sigma_scale.is_finite()) {
        return Err(Error::BadSpec(format!("sigma_scale must be finite and >= 0, got {}", spec.sigma_scale)));
    }
    let f = spec.f_source.coefficients().map_err(|e| Error::BadSpec(e.to_string()))?;
    if !f.is_finite() {
        return Err(Error::BadSpec("f-coefficients must be finite".into()));
    }
    let lambdas = match spec.mode {
        Mode::Sasakian => {
            let ok = if spec.strict_sasakian { classify_sasakian_strict(&f) } else { classify_sasakian(&f) };
            if !ok {
                return Err(Error::BadSpec(format!(
                    "Sasakian mode needs f3 = f1 - 1{} (f1 = {}, f2 = {}, f3 = {})",
                    if spec.strict_sasakian { " and f2 = f1 - 1" } else { "" },
                    f.f1,
                    f.f2,
                    f.f3
                )));
            }
            vec![0.0; m]
        }
        Mode::General => match &spec.h_eigenvalues {
            Some(l) if l.len() != m => {
                return Err(Error::BadSpec(format!("{} h eigenvalues given, m = {m}", l.len())))
            }
            Some(l) => l.clone(),
            None => {
                let mut rng = rng_from_seed(derive_seed(spec.seed, STREAM_H));
                (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
            }
        },
    };
    let a = AmbientPoint::canonical(m, &lambdas, f)?;
    if spec.conjugate {
        let q = random_orthogonal_with(&mut rng_from_seed(derive_seed(spec.seed, STREAM_CONJ)), 2 * m);
        a.conjugated(&q)
    } else {
        Ok(a)
    }
}

/// Tangent frame `e_i = Σ_j q_ji (cos θ_j X_j + sin θ_j φX_j)` and matching
/// normal frame `φe_1..φe_n, X_{n+1}.., φX_{n+1}.., ξ`.
fn frames(a: &AmbientPoint, n: usize, angles: &[f64], q: &DMatrix<f64>) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let m = a.m();
    if n > m {
        return Err(Error::DimensionTooLarge { n, m });
    }
    if n < 2 {
        return Err(Error::BadDimension { expected: "n >= 2".into(), found: n });
    }
    let fr = adapted_frame(a)?;
    let base: Vec<Vector> = (0..n)
        .map(|i| {
            let (s, c) = angles[i].sin_cos();
            fr.column(i) * c + fr.column(m + i) * s
        })
        .collect();
    let tangent: Vec<Vector> = (0..n)
        .map(|i| base.iter().enumerate().fold(Vector::zeros(a.dim()), |acc, (j, b)| acc + b * q[(j, i)]))
        .collect();
    let mut normal: Vec<Vector> = tangent.iter().map(|e| a.phi().apply(e)).collect();
    normal.extend((n..m).map(|i| fr.column(i).into_owned()));
    normal.extend((n..m).map(|i| fr.column(m + i).into_owned()));
    normal.push(a.xi());
    Ok((tangent, normal))
}

fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    if scale == 0.0 {
        return s;
    }
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-scale..=scale);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

fn random_free_sigma(n: usize, count: usize, scale: f64, seed: u64) -> Vec<DMatrix<f64>> {
    let mut rng = rng_from_seed(derive_seed(seed, STREAM_SIGMA));
    (0..count).map(|_| random_symmetric(&mut rng, n, scale)).collect()
}

/// Legendrian `X_1..X_n` rotated within their span, with free σ uniform in
/// `[-sigma_scale, sigma_scale]`.
pub fn make_random_submanifold(a: &AmbientPoint, n: usize, sigma_scale: f64, seed: u64) -> Result<SubmanifoldPoint> {
    if n > a.m() {
        return Err(Error::DimensionTooLarge { n, m: a.m() });
    }
    let q = random_orthogonal_with(&mut rng_from_seed(derive_seed(seed, STREAM_FRAME)), n);
    let (t, nf) = frames(a, n, &vec![0.0; n], &q)?;
    let free = random_free_sigma(n, nf.len() - 1, sigma_scale, seed);
    build_submanifold(a.clone(), &t, &nf, &free)
}

/// Like [`make_random_submanifold`] but each `X_i` is tilted towards `φX_i` by
/// a random angle, so `(φh)^T` and hence `A_ξ` are generally nonzero.
pub fn make_twisted_submanifold(a: &AmbientPoint, n: usize, sigma_scale: f64, seed: u64) -> Result<SubmanifoldPoint> {
    if n > a.m() {
        return Err(Error::DimensionTooLarge { n, m: a.m() });
    }
    let mut rng = rng_from_seed(derive_seed(seed, STREAM_FRAME));
    let q = random_orthogonal_with(&mut rng, n);
    let angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let (t, nf) = frames(a, n, &angles, &q)?;
    let free = random_free_sigma(n, nf.len() - 1, sigma_scale, seed);
    build_submanifold(a.clone(), &t, &nf, &free)
}

fn aligned(a: &AmbientPoint, n: usize) -> Result<(Vec<Vector>, Vec<Vector>)> {
    frames(a, n, &vec![0.0; n], &DMatrix::identity(n, n))
}

/// `σ(X, Y) = λ <X, Y> e_r` for normal-frame index `normal_index` (0-based).
pub fn make_totally_umbilical(a: &AmbientPoint, n: usize, lambda: f64, normal_index: usize) -> Result<SubmanifoldPoint> {
    let (t, nf) = aligned(a, n)?;
    let q = nf.len();
    if normal_index >= q {
        return Err(Error::BadSpec(format!("normal index {normal_index} out of range 0..{q}")));
    }
    if normal_index == q - 1 {
        // A_ξ is pinned to (φh)^T, which vanishes in the adapted frame.
        if lambda != 0.0 {
            return Err(Error::IncompatibleXiConstraint(format!(
                "A_xi = (phi h)^T = 0 in the adapted frame, cannot equal {lambda} I"
            )));
        }
        return build_submanifold(a.clone(), &t, &nf, &vec![DMatrix::zeros(n, n); q - 1]);
    }
    let mut free = vec![DMatrix::zeros(n, n); q - 1];
    free[normal_index] = DMatrix::identity(n, n) * lambda;
    build_submanifold(a.clone(), &t, &nf, &free)
}

fn require_h_zero(a: &AmbientPoint, what: &str) -> Result<()> {
    if crate::linalg::max_abs(a.h().matrix()) > crate::ambient::STRUCTURE_TOL {
        return Err(Error::BadSpec(format!("{what} needs a Sasakian-mode ambient (h = 0)")));
    }
    Ok(())
}

/// `A_{n+1} = diag(a, b, (a+b) I)` and `A_r = [[c_r, d_r], [d_r, -c_r]] ⊕ 0`
/// for the remaining non-ξ normals; `A_ξ = 0`.
pub fn make_equality_basic(
    amb: &AmbientPoint,
    n: usize,
    a: f64,
    b: f64,
    c_list: &[f64],
    d_list: &[f64],
) -> Result<SubmanifoldPoint> {
    require_h_zero(amb, "the basic equality form")?;
    if n < 3 {
        return Err(Error::BadSpec(format!("the basic equality form needs n >= 3, got {n}")));
    }
    let (t, nf) = aligned(amb, n)?;
    let others = nf.len() - 2;
    if c_list.len() != others || d_list.len() != others {
        return Err(Error::BadSpec(format!(
            "expected {others} c and d values, got {} and {}",
            c_list.len(),
            d_list.len()
        )));
    }
    let mut first = DMatrix::identity(n, n) * (a + b);
    first[(0, 0)] = a;
    first[(1, 1)] = b;
    let mut free = vec![first];
    for (&c, &d) in c_list.iter().zip(d_list) {
        let mut s = DMatrix::zeros(n, n);
        s[(0, 0)] = c;
        s[(1, 1)] = -c;
        s[(0, 1)] = d;
        s[(1, 0)] = d;
        free.push(s);
    }
    build_submanifold(amb.clone(), &t, &nf, &free)
}

/// Shape-operator data for [`make_equality_delta`]: for each non-ξ normal r,
/// the diagonal blocks `A^r_j` and the tail value `a_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaBlockSpec {
    pub blocks: Vec<Vec<DMatrix<f64>>>,
    pub tail: Vec<f64>,
}

impl DeltaBlockSpec {
    /// Random symmetric blocks with the diagonal shifted so every block trace
    /// equals its normal's `a_r`.
    pub fn random(t: &TupleSpec, normals: usize, scale: f64, seed: u64) -> Self {
        let mut rng = rng_from_seed(derive_seed(seed, STREAM_SIGMA));
        let mut blocks = Vec::with_capacity(normals);
        let mut tail = Vec::with_capacity(normals);
        for _ in 0..normals {
            let a_r = if scale == 0.0 { 0.0 } else { rng.random_range(-scale..=scale) };
            let bs = t
                .dims()
                .iter()
                .map(|&d| {
                    let mut s = random_symmetric(&mut rng, d, scale);
                    let shift = (a_r - s.trace()) / d as f64;
                    for i in 0..d {
                        s[(i, i)] += shift;
                    }
                    s
                })
                .collect();
            blocks.push(bs);
            tail.push(a_r);
        }
        DeltaBlockSpec { blocks, tail }
    }
}

/// Frame-aligned `A_r = diag(A^r_1, …, A^r_k, a_r I)` with `tr A^r_j = a_r`.
pub fn make_equality_delta(a: &AmbientPoint, n: usize, t: &TupleSpec, spec: &DeltaBlockSpec) -> Result<SubmanifoldPoint> {
    require_h_zero(a, "the delta equality form")?;
    t.validate(n)?;
    let (tf, nf) = aligned(a, n)?;
    let normals = nf.len() - 1;
    if spec.blocks.len() != normals || spec.tail.len() != normals {
        return Err(Error::BadSpec(format!("expected block data for {normals} normals")));
    }
    let mut free = Vec::with_capacity(normals);
    for (r, (bs, &a_r)) in spec.blocks.iter().zip(&spec.tail).enumerate() {
        if bs.len() != t.k() {
            return Err(Error::BadSpec(format!("normal {r}: {} blocks for tuple {t}", bs.len())));
        }
        let mut s = DMatrix::zeros(n, n);
        let mut c = 0;
        for (j, (blk, &d)) in bs.iter().zip(t.dims()).enumerate() {
            if blk.nrows() != d || blk.ncols() != d {
                return Err(Error::BadSpec(format!("normal {r} block {j} is not {d}x{d}")));
            }
            let tr = blk.trace();
            if (tr - a_r).abs() > 1e-12 * (1.0 + a_r.abs()) {
                return Err(Error::TraceMismatch { normal: r, block: j, trace: tr, expected: a_r });
            }
            s.view_mut((c, c), (d, d)).copy_from(blk);
            c += d;
        }
        for i in c..n {
            s[(i, i)] = a_r;
        }
        free.push(s);
    }
    build_submanifold(a.clone(), &tf, &nf, &free)
}

/// One generated instance per spec; every random choice derives from `spec.seed`.
pub fn forge_instance(spec: &GeneratorSpec) -> Result<SubmanifoldPoint> {
    let a = make_ambient(spec)?;
    let n = spec.n;
    let twisted = spec.frame == FrameKind::Twisted;
    match &spec.family {
        Family::Random if twisted => make_twisted_submanifold(&a, n, spec.sigma_scale, spec.seed),
        Family::Random => make_random_submanifold(&a, n, spec.sigma_scale, spec.seed),
        _ if twisted => Err(Error::BadSpec("structured families use the adapted frame".into())),
        Family::TotallyGeodesic => make_totally_umbilical(&a, n, 0.0, 0),
        Family::Umbilical { lambda } => make_totally_umbilical(&a, n, *lambda, 0),
        Family::EqualityBasic { a: pa, b: pb } => {
            let others = 2 * spec.m - n - 1;
            let mut rng = rng_from_seed(derive_seed(spec.seed, STREAM_SIGMA));
            let s = spec.sigma_scale;
            let mut draw = || if s == 0.0 { 0.0 } else { rng.random_range(-s..=s) };
            let cs: Vec<f64> = (0..others).map(|_| draw()).collect();
            let ds: Vec<f64> = (0..others).map(|_| draw()).collect();
            make_equality_basic(&a, n, *pa, *pb, &cs, &ds)
        }
        Family::EqualityDelta { dims } => {
            let t = TupleSpec::new(dims);
            let blocks = DeltaBlockSpec::random(&t, 2 * spec.m - n, spec.sigma_scale, spec.seed);
            make_equality_delta(&a, n, &t, &blocks)
        }
    }
}

/// Independently recomputed invariants; every infimum is a plain sampled
/// minimum with no local refinement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRecord {
    pub tau: f64,
    pub inf_sectional: f64,
    /// Keyed by tuple, e.g. `"(2)"`; the value is τ minus the sampled minimum.
    pub delta: BTreeMap<String, f64>,
    /// Keyed by k.
    pub theta: BTreeMap<usize, f64>,
}

/// Curvature array filled entry by entry through the Gauss equation, with no
/// use of its symmetries.
struct OracleTable {
    n: usize,
    r: Vec<f64>,
}

impl OracleTable {
    fn new(s: &SubmanifoldPoint) -> Self {
        let n = s.n();
        let e: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
        let mut r = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r.push(s.induced_curvature_coords(&e[i], &e[j], &e[k], &e[l]).expect("tangent"));
                    }
                }
            }
        }
        OracleTable { n, r }
    }

    fn curv(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        let mut p = 0;
        for &xi in x {
            for &yj in y {
                for &zk in z {
                    let c = xi * yj * zk;
                    for &wl in w {
                        acc += c * self.r[p] * wl;
                        p += 1;
                    }
                }
            }
        }
        debug_assert_eq!(p, n * n * n * n);
        acc
    }

    fn tau_of(&self, cols: &[Vec<f64>]) -> f64 {
        let mut t = 0.0;
        for a in 0..cols.len() {
            for b in a + 1..cols.len() {
                t += self.curv(&cols[a], &cols[b], &cols[b], &cols[a]);
            }
        }
        t
    }
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

/// Random orthonormal columns by Gram–Schmidt on Gaussian vectors.
fn gaussian_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(k);
    while out.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        for _ in 0..2 {
            for q in &out {
                let c: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

const ORACLE_CHUNK: usize = 4096;

fn chunked_min<F>(samples: usize, seed: u64, f: F) -> f64
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(ORACLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed ^ 0x6f72_6163_6c65, c as u64));
            let len = ORACLE_CHUNK.min(samples - c * ORACLE_CHUNK);
            (0..len).map(|_| f(&mut rng)).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn check_oracle_size(s: &SubmanifoldPoint) -> Result<()> {
    if s.n() > ORACLE_MAX_N {
        return Err(Error::TooLarge { n: s.n(), max: ORACLE_MAX_N });
    }
    Ok(())
}

/// τ as a double loop over frame pairs of Gauss-equation sectional curvatures.
pub fn oracle_tau(s: &SubmanifoldPoint) -> f64 {
    let n = s.n();
    let mut t = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (unit(n, i), unit(n, j));
            t += s.induced_curvature_coords(&x, &y, &y, &x).expect("tangent");
        }
    }
    t
}

/// Minimum of K over `density` random planes plus the coordinate planes.
pub fn oracle_inf_sectional(s: &SubmanifoldPoint, density: usize, seed: u64) -> Result<f64> {
    check_oracle_size(s)?;
    let t = OracleTable::new(s);
    let n = s.n();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (unit(n, i), unit(n, j));
            best = best.min(t.curv(x.as_slice(), y.as_slice(), y.as_slice(), x.as_slice()));
        }
    }
    let sampled = chunked_min(density, seed, |rng| {
        let f = gaussian_frame(rng, n, 2);
        t.curv(&f[0], &f[1], &f[1], &f[0])
    });
    Ok(best.min(sampled))
}

/// τ minus the minimum of Σ τ(L_j) over `density` random tuples plus every
/// coordinate tuple.
pub fn oracle_delta(s: &SubmanifoldPoint, tuple: &TupleSpec, density: usize, seed: u64) -> Result<f64> {
    check_oracle_size(s)?;
    let n = s.n();
    tuple.validate(n)?;
    let t = OracleTable::new(s);
    let tau = oracle_tau(s);
    if tuple.is_empty() {
        return Ok(tau);
    }
    let eval = |cols: &[Vec<f64>]| -> f64 {
        let mut c = 0;
        let mut sum = 0.0;
        for &d in tuple.dims() {
            sum += t.tau_of(&cols[c..c + d]);
            c += d;
        }
        sum
    };
    let mut best = f64::INFINITY;
    let axes: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i).as_slice().to_vec()).collect();
    for perm in permutations(n) {
        let cols: Vec<Vec<f64>> = perm.iter().map(|&i| axes[i].clone()).collect();
        best = best.min(eval(&cols));
    }
    let total = tuple.total();
    let sampled = chunked_min(density, seed, |rng| eval(&gaussian_frame(rng, n, total)));
    Ok(tau - best.min(sampled))
}

/// `(1/(k-1))` times the minimum of `Ric_P(X)` over `density` random pairs,
/// with X the first column of a random frame and P its first k columns.
pub fn oracle_theta(s: &SubmanifoldPoint, k: usize, density: usize, seed: u64) -> Result<f64> {
    check_oracle_size(s)?;
    let n = s.n();
    if k < 2 || k > n {
        return Err(Error::BadK { k, n });
    }
    let t = OracleTable::new(s);
    let ric = |f: &[Vec<f64>]| (1..k).map(|j| t.curv(&f[0], &f[j], &f[j], &f[0])).sum::<f64>();
    let axes: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i).as_slice().to_vec()).collect();
    let mut best = f64::INFINITY;
    for perm in permutations(n) {
        let cols: Vec<Vec<f64>> = perm.iter().map(|&i| axes[i].clone()).collect();
        best = best.min(ric(&cols));
    }
    let sampled = chunked_min(density, seed, |rng| ric(&gaussian_frame(rng, n, k)));
    Ok(best.min(sampled) / (k - 1) as f64)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// τ, inf K, δ(t) for every t in S(n), and θ_k for every k, all by plain
/// enumeration and sampling at the given density.
pub fn oracle_invariants(s: &SubmanifoldPoint, density: usize) -> Result<OracleRecord> {
    oracle_invariants_seeded(s, density, 0)
}

pub fn oracle_invariants_seeded(s: &SubmanifoldPoint, density: usize, seed: u64) -> Result<OracleRecord> {
    check_oracle_size(s)?;
    let n = s.n();
    let mut delta = BTreeMap::new();
    for t in enumerate_tuples(n) {
        delta.insert(t.to_string(), oracle_delta(s, &t, density, seed)?);
    }
    let mut theta = BTreeMap::new();
    for k in 2..=n {
        theta.insert(k, oracle_theta(s, k, density, seed)?);
    }
    Ok(OracleRecord { tau: oracle_tau(s), inf_sectional: oracle_inf_sectional(s, density, seed)?, delta, theta })
}
