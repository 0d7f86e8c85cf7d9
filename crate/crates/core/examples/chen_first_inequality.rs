// First Chen inequality: sampled planes on a random instance, then the
// equality case A = diag(a, b, a + b, ...).

use chen_bounds::forge::{forge_instance, make_ambient, make_equality_basic, GeneratorSpec};
use chen_bounds::inequalities::{detect_equality_form_basic, InequalityContext, Tolerances};
use chen_bounds::invariants::SearchBudget;
use chen_bounds::linalg::{random_orthogonal, Subspace};
use chen_bounds::invariants::Witness;

pub fn run_example() -> anyhow::Result<()> {
    let s = forge_instance(&GeneratorSpec::sasakian(5, 4, 42))?;
    let ctx = InequalityContext::new(&s, Tolerances::default());
    let inf = ctx.table().inf_sectional(&SearchBudget::with_seed(42));
    println!("inf K = {:.6} ({:?})", inf.value, inf.certified);
    if let Witness::Plane(pi) = &inf.witness {
        let r = ctx.chen_first(pi)?;
        println!("delta_M = {:.6} <= {:.6} (slack {:.3e})", r.lhs, r.rhs, r.slack);
    }
    let mut worst = f64::INFINITY;
    for seed in 0..200 {
        let q = random_orthogonal(4, seed);
        let pi = Subspace::from_orthonormal(q.columns(0, 2).into_owned())?;
        worst = worst.min(ctx.chen_first(&pi)?.slack);
    }
    println!("min slack over 200 random planes = {worst:.4}");

    let amb = make_ambient(&GeneratorSpec::sasakian(4, 4, 0))?;
    let eq = make_equality_basic(&amb, 4, 1.0, 2.0, &[0.3, 0.0, 0.0], &[0.1, 0.0, 0.0])?;
    let pi = Subspace::coordinate(4, &[0, 1]);
    let r = InequalityContext::new(&eq, Tolerances::default()).chen_first(&pi)?;
    let form = detect_equality_form_basic(&eq, &pi, 1e-7)?;
    println!("equality instance: lhs = {:.9}, rhs = {:.9}, equality = {}, form matched = {}", r.lhs, r.rhs, r.equality, form.matched);
    anyhow::ensure!(r.equality && form.matched);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
