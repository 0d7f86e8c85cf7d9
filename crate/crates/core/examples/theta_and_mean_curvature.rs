// 2τ against n(n−1)‖H‖², and its θ_k version on umbilical instances where
// every bound is tight.

use chen_bounds::forge::{forge_instance, Family, GeneratorSpec};
use chen_bounds::inequalities::{InequalityContext, Tolerances};
use chen_bounds::invariants::SearchBudget;

pub fn run_example() -> anyhow::Result<()> {
    let budget = SearchBudget::with_seed(0);
    for lambda in [0.0, 0.5, 1.0, 2.0] {
        let s = forge_instance(&GeneratorSpec::sasakian(4, 4, 0).with_family(Family::Umbilical { lambda }))?;
        let ctx = InequalityContext::new(&s, Tolerances::default());
        let mean = ctx.mean_vs_scalar()?;
        let theta = ctx.theta_bound(3, &budget)?;
        println!(
            "lambda {lambda}: mean slack {:.1e}, theta_3 = {:.4} ({:?}, slack {:.1e})",
            mean.slack, theta.extra["theta"], theta.mode, theta.slack
        );
    }
    let s = forge_instance(&GeneratorSpec::sasakian(4, 4, 5))?;
    let ctx = InequalityContext::new(&s, Tolerances::default());
    for k in 2..=4 {
        let r = ctx.theta_bound(k, &budget)?;
        println!("random instance k = {k}: theta {:.4}, {:?}, slack {:.4}", r.extra["theta"], r.mode, r.slack);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
