// Compares the engine's refined searches with plain sampled minima.

use chen_bounds::forge::{forge_instance, oracle_invariants_seeded, GeneratorSpec};
use chen_bounds::invariants::{CurvatureTable, SearchBudget};

pub fn run_example() -> anyhow::Result<()> {
    let s = forge_instance(&GeneratorSpec::sasakian(4, 3, 11))?;
    let table = CurvatureTable::new(&s);
    let budget = SearchBudget::with_seed(11);
    let oracle = oracle_invariants_seeded(&s, 50_000, 11)?;
    let engine = table.inf_sectional(&budget);
    println!("tau: engine {:.12} oracle {:.12}", table.scalar_curvature(), oracle.tau);
    println!("inf K: engine {:.8} oracle {:.8}", engine.value, oracle.inf_sectional);
    for (t, v) in &oracle.delta {
        println!("delta{t}: oracle {v:.6}");
    }
    for (k, v) in &oracle.theta {
        println!("theta_{k}: engine {:.6} oracle {v:.6}", table.theta_k(*k, &budget)?.value);
    }
    anyhow::ensure!(engine.value <= oracle.inf_sectional + 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
