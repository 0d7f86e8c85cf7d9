// Constructs a C-totally real submanifold by hand and reads off its induced
// curvature, mean curvature and relative null space.

use chen_bounds::ambient::{kappa_mu_coefficients, AmbientPoint};
use chen_bounds::invariants::CurvatureTable;
use chen_bounds::submanifold::build_submanifold;
use chen_bounds::linalg::Vector;
use nalgebra::DMatrix;

fn axis(d: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(d);
    v[i] = 1.0;
    v
}

pub fn run_example() -> anyhow::Result<()> {
    let m = 3;
    let n = 3;
    let d = 2 * m + 1;
    let a = AmbientPoint::sasakian(m, kappa_mu_coefficients(1.0, 1.0, 0.0))?;

    // Legendrian frame X_1..X_3 with normals φX_1..φX_3 and ξ.
    let tangent: Vec<Vector> = (0..n).map(|i| axis(d, i)).collect();
    let mut normal: Vec<Vector> = (0..n).map(|i| axis(d, m + i)).collect();
    normal.push(axis(d, 2 * m));

    let mut a1 = DMatrix::zeros(n, n);
    a1[(0, 1)] = 1.0;
    a1[(1, 0)] = 1.0;
    let a2 = DMatrix::from_diagonal(&Vector::from_vec(vec![0.5, 0.5, 1.0]));
    let s = build_submanifold(a, &tangent, &normal, &[a1, a2, DMatrix::zeros(n, n)])?;

    let table = CurvatureTable::new(&s);
    for i in 0..n {
        for j in i + 1..n {
            println!("K(e{}, e{}) = {:.4}", i + 1, j + 1, table.sectional(&axis(n, i), &axis(n, j)));
        }
    }
    println!("tau = {:.4}", table.scalar_curvature());
    println!("|H|^2 = {:.4}, |sigma|^2 = {:.4}", s.mean_curvature().norm_sq, s.sigma_norm_sq());
    println!("relative null space dim = {}", s.relative_null_space().dim());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
