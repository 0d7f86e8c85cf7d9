// Ricci curvature against ‖H‖² in a general space form, plus the Sasakian
// Ricci-tensor bound.

use chen_bounds::ambient::FCoefficients;
use chen_bounds::forge::{forge_instance, FrameKind, GeneratorSpec};
use chen_bounds::inequalities::{InequalityContext, Tolerances};
use chen_bounds::linalg::Subspace;

pub fn run_example() -> anyhow::Result<()> {
    let f = FCoefficients::from_array([1.0, 0.3, -0.2, 0.7, 0.4, -0.6, 0.5]);
    let mut spec = GeneratorSpec::general(4, 3, f, 7);
    spec.frame = FrameKind::Twisted;
    let s = forge_instance(&spec)?;
    let ctx = InequalityContext::new(&s, Tolerances::default());
    let (vals, vecs) = ctx.table().ricci_tensor().eigen();
    for (i, v) in vals.iter().enumerate() {
        let r = ctx.ricci_bound(&vecs.column(i).into_owned())?;
        println!("Ric = {v:.5}: bound {:.5}, slack {:.5}", r.rhs, r.slack);
    }

    let s = forge_instance(&GeneratorSpec::sasakian(3, 3, 7))?;
    let ctx = InequalityContext::new(&s, Tolerances::default());
    let u = Subspace::coordinate(3, &[0]).vector(0);
    for r in ctx.sasakian_suite(&Subspace::coordinate(3, &[0, 1]), &u)? {
        println!("{:<22} lhs {:>9.5} rhs {:>9.5} slack {:>9.5}", r.name, r.lhs, r.rhs, r.slack);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
