// Builds a non-Sasakian (κ,μ)-space form point and inspects its structure.

use chen_bounds::ambient::{
    ambient_curvature, classify_sasakian, non_sasakian_divided_coefficients, validate_ambient, AmbientPoint,
};
use chen_bounds::linalg::{random_unit, rng_from_seed};

pub fn run_example() -> anyhow::Result<()> {
    let (kappa, mu) = (0.75, 0.5);
    let f = non_sasakian_divided_coefficients(kappa, mu)?;
    println!("f = {:?}", f.to_array());

    // h has eigenvalues ±sqrt(1 - κ) on the contact distribution.
    let lambda = (1.0 - kappa).sqrt();
    let a = AmbientPoint::canonical(3, &[lambda; 3], f)?;
    println!("dim = {}, sasakian = {}", a.dim(), classify_sasakian(a.f()));
    anyhow::ensure!(validate_ambient(&a).is_empty(), "structure identities fail");

    let mut rng = rng_from_seed(1);
    let x = random_unit(&mut rng, a.dim());
    let y = random_unit(&mut rng, a.dim());
    let r = ambient_curvature(&a, &x, &y, &y, &x)?;
    let swapped = ambient_curvature(&a, &y, &x, &y, &x)?;
    println!("R(x,y,y,x) = {r:.6}, R(y,x,y,x) = {swapped:.6}");
    anyhow::ensure!((r + swapped).abs() < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
